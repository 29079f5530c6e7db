//! Integer complexity `‖n‖`: the dense table, the single-value oracle, and
//! witness expressions.

pub mod bounds;
mod expression;
mod oracle;
mod table;

pub use expression::{expression_complexity, Expression};
pub use oracle::{complexity, ComplexityOracle, STANDALONE_LIMIT};
pub use table::{ComplexityTable, DEFAULT_MEMORY_CAP, FORMAT_VERSION, MAGIC};

pub(crate) use oracle::small_divisors;
