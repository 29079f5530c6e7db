use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::bounds::cube_lt;
use super::expression::Expression;
use crate::error::{Error, Result};

/// Magic bytes at the start of a table cache file.
pub const MAGIC: &[u8; 4] = b"ICPX";
/// Current cache format version.
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: u64 = 4 + 1 + 8;

/// Default memory cap for a table build: 4 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 4 << 30;

/// Dense table of `‖n‖` for `1 ≤ n ≤ limit`, one byte per entry.
///
/// Entry 0 is a placeholder so that `values[n]` is the complexity of `n`.
/// Once built the table is immutable and can be shared freely across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    values: Vec<u8>,
}

impl std::fmt::Debug for ComplexityTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexityTable")
            .field("limit", &self.limit())
            .finish()
    }
}

impl ComplexityTable {
    /// Builds the table up to `limit` under [`DEFAULT_MEMORY_CAP`].
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_cap(limit, DEFAULT_MEMORY_CAP)
    }

    /// Builds the table, failing fast when `limit + 1` bytes exceed `cap`.
    ///
    /// Entries are finalized in ascending order. When entry `n` is final, the
    /// products `n·m` for `2 ≤ m ≤ n` are pushed forward, so every product
    /// split `d·(n/d)` with `d ≤ √n` has been applied before `n` is reached.
    /// Sum splits `a + (n−a)` are scanned with `a` ascending and stop as soon
    /// as `(a·(n−a))³ ≥ 3^best`, since then `‖a‖+‖n−a‖ ≥ 3·log₃(a(n−a)) ≥ best`.
    pub fn build_with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::NonPositive);
        }
        let needed = limit.saturating_add(1);
        if needed > cap || usize::try_from(needed).is_err() {
            return Err(Error::MemoryCap { limit, needed, cap });
        }
        let n_max = limit as usize;
        let mut v = vec![u8::MAX; n_max + 1];
        v[0] = 0;
        v[1] = 1;
        for n in 1..=n_max {
            if n > 1 {
                let mut best = v[n] as u32;
                let half = n / 2;
                for a in 1..=half {
                    let span = (a as u128) * ((n - a) as u128);
                    if span > cube_lt(best) {
                        break;
                    }
                    let s = v[a] as u32 + v[n - a] as u32;
                    if s < best {
                        best = s;
                    }
                }
                if best >= u8::MAX as u32 {
                    return Err(Error::EntryOverflow {
                        n: n as u64,
                        value: best,
                    });
                }
                v[n] = best as u8;
            }
            let vn = v[n] as u32;
            if n >= 2 {
                let top = (n_max / n).min(n);
                for m in 2..=top {
                    let idx = n * m;
                    let s = vn + v[m] as u32;
                    if s < v[idx] as u32 {
                        v[idx] = s as u8;
                    }
                }
            }
        }
        Ok(Self { values: v })
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `‖n‖` if `1 ≤ n ≤ limit`.
    #[inline]
    pub fn get(&self, n: u64) -> Option<u32> {
        if n == 0 || n > self.limit() {
            None
        } else {
            Some(self.values[n as usize] as u32)
        }
    }

    /// `‖n‖`, or a range error.
    pub fn complexity(&self, n: u64) -> Result<u32> {
        if n == 0 {
            return Err(Error::NonPositive);
        }
        self.get(n).ok_or_else(|| self.range_error(n))
    }

    pub(crate) fn range_error(&self, n: impl ToString) -> Error {
        Error::OutOfRange {
            value: n.to_string(),
            limit: self.limit(),
        }
    }

    /// Raw entries for `1..=limit`.
    pub fn entries(&self) -> &[u8] {
        &self.values[1..]
    }

    /// Reconstructs a minimal `(1,+,·)` expression for `n`.
    ///
    /// Ties prefer a product split with the smallest divisor, then a sum split
    /// with the smallest summand.
    pub fn best_expression(&self, n: u64) -> Result<Expression> {
        let target = self.complexity(n)?;
        Ok(self.witness(n, target))
    }

    fn witness(&self, n: u64, target: u32) -> Expression {
        if n == 1 {
            return Expression::One;
        }
        let c = |x: u64| self.values[x as usize] as u32;
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) && c(d) + c(n / d) == target {
                return Expression::product(self.witness(d, c(d)), self.witness(n / d, c(n / d)));
            }
            d += 1;
        }
        for a in 1..=n / 2 {
            if c(a) + c(n - a) == target {
                return Expression::sum(self.witness(a, c(a)), self.witness(n - a, c(n - a)));
            }
        }
        unreachable!("table entry {n} has no realizing split")
    }

    /// Writes the bit-exact cache format: magic, version byte, LE u64 limit,
    /// then one byte per entry for `1..=limit`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&self.limit().to_le_bytes())?;
        w.write_all(self.entries())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| Error::BadTableFile("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::BadTableFile("bad magic bytes".into()));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)
            .map_err(|_| Error::BadTableFile("truncated header".into()))?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::BadTableFile(format!(
                "unsupported version {}",
                version[0]
            )));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)
            .map_err(|_| Error::BadTableFile("truncated header".into()))?;
        let limit = u64::from_le_bytes(len);
        if limit == 0 {
            return Err(Error::BadTableFile("zero limit".into()));
        }
        let n = usize::try_from(limit)
            .map_err(|_| Error::BadTableFile(format!("limit {limit} too large")))?;
        let mut values = Vec::with_capacity(n + 1);
        values.push(0u8);
        values.resize(n + 1, 0);
        r.read_exact(&mut values[1..]).map_err(|_| {
            Error::BadTableFile(format!("expected {limit} entries, file is shorter"))
        })?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::BadTableFile(format!(
                "trailing bytes after {limit} entries"
            )));
        }
        if values[1] != 1 {
            return Err(Error::BadTableFile("entry for 1 is not 1".into()));
        }
        Ok(Self { values })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let len = file.metadata()?.len();
        let table = Self::read_from(BufReader::new(file))?;
        if len != HEADER_LEN + table.limit() {
            return Err(Error::BadTableFile("length mismatch".into()));
        }
        Ok(table)
    }
}
