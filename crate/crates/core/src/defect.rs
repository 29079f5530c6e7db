//! Exact values of the form `C − 3·log₃ n`.
//!
//! Every defect-like quantity (`δ(n)`, `δ(E)`, `δ(f,C)`, `δ_{f,C}(n⃗)`) has
//! this shape. Values are kept as the integer pair `(C, n)` with all factors
//! of 3 stripped from `n` (each stripped factor lowers `C` by 3), and ordered
//! by comparing `3^(C₁−C₂)·n₂³` against `n₁³` in big integers. No floating
//! point takes part in any comparison; [`ExactDefect::approx`] exists only for
//! display.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::complexity::ComplexityTable;
use crate::error::{Error, Result};

/// `C − 3·log₃ n` in canonical form (`3 ∤ n`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactDefect {
    c: i64,
    n: BigUint,
}

impl ExactDefect {
    /// Builds and canonicalizes `C − 3·log₃ n`. Panics if `n = 0`.
    pub fn new(c: i64, n: impl Into<BigUint>) -> Self {
        let mut n: BigUint = n.into();
        assert!(!n.is_zero(), "defect argument must be positive");
        let mut c = c;
        let three = BigUint::from(3u32);
        loop {
            let (q, r) = n.div_rem(&three);
            if !r.is_zero() {
                break;
            }
            n = q;
            c -= 3;
        }
        Self { c, n }
    }

    /// The integer `k`, i.e. `k − 3·log₃ 1`.
    pub fn integer(k: i64) -> Self {
        Self {
            c: k,
            n: BigUint::one(),
        }
    }

    /// Canonical `C`.
    pub fn c(&self) -> i64 {
        self.c
    }

    /// Canonical argument (never divisible by 3).
    pub fn n(&self) -> &BigUint {
        &self.n
    }

    /// `C mod 3` of the canonical form, in `0..3`.
    pub fn congruence_class(&self) -> u8 {
        self.c.rem_euclid(3) as u8
    }

    /// `self + k`.
    pub fn plus(&self, k: i64) -> Self {
        Self {
            c: self.c + k,
            n: self.n.clone(),
        }
    }

    /// Exact ordering of the real values.
    pub fn compare(&self, other: &Self) -> Ordering {
        // δ₁ < δ₂  ⇔  C₁ − C₂ < 3·log₃(n₁/n₂)  ⇔  3^(C₁−C₂)·n₂³ < n₁³.
        let diff = self.c - other.c;
        let three = BigUint::from(3u32);
        let mut lhs = other.n.pow(3);
        let mut rhs = self.n.pow(3);
        if diff >= 0 {
            lhs *= three.pow(diff as u32);
        } else {
            rhs *= three.pow((-diff) as u32);
        }
        lhs.cmp(&rhs)
    }

    /// If the two values differ by an integer, returns `self − other`.
    ///
    /// The difference of two such values is rational only when the arguments
    /// agree up to powers of 3, i.e. when the canonical arguments are equal.
    pub fn mod1_congruent(&self, other: &Self) -> Option<i64> {
        (self.n == other.n).then(|| self.c - other.c)
    }

    /// Exact truth of `C − 3·log₃ n < k`.
    pub fn less_than_int(&self, k: i64) -> bool {
        self.compare(&Self::integer(k)) == Ordering::Less
    }

    /// Exact ordering against the rational `num/den` (`den > 0`).
    pub fn compare_rational(&self, num: i64, den: u64) -> Ordering {
        assert!(den > 0, "denominator must be positive");
        // C − 3·log₃ n  vs  p/q   ⇔   3^(qC − p)  vs  n^(3q).
        let e = den as i128 * self.c as i128 - num as i128;
        let rhs = self.n.pow(3 * den as u32);
        if e < 0 {
            // 3^e < 1 ≤ n^(3q).
            return Ordering::Less;
        }
        let e = u32::try_from(e).expect("exponent fits in u32");
        BigUint::from(3u32).pow(e).cmp(&rhs)
    }

    /// Floating approximation for display only.
    pub fn approx(&self) -> f64 {
        self.c as f64 - 3.0 * log3_big(&self.n)
    }

    /// Twelve-digit decimal rendering used in reports.
    pub fn approx_string(&self) -> String {
        format!("{:.12}", self.approx())
    }
}

impl PartialOrd for ExactDefect {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactDefect {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl fmt::Display for ExactDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} - 3log3({}) ≈ {}",
            self.c,
            self.n,
            self.approx_string()
        )
    }
}

impl Serialize for ExactDefect {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactDefect", 3)?;
        st.serialize_field("C", &self.c)?;
        st.serialize_field("n", &self.n.to_string())?;
        st.serialize_field("approx", &self.approx_string())?;
        st.end()
    }
}

/// An upper bound `s` on defects: either a value of the same shape or a
/// rational number. Both compare exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DefectBound {
    Defect(ExactDefect),
    Rational { num: i64, den: u64 },
}

impl DefectBound {
    /// `d ≤ s`.
    pub fn admits(&self, d: &ExactDefect) -> bool {
        match self {
            DefectBound::Defect(s) => d <= s,
            DefectBound::Rational { num, den } => {
                d.compare_rational(*num, *den) != Ordering::Greater
            }
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            DefectBound::Defect(s) => s.approx(),
            DefectBound::Rational { num, den } => *num as f64 / *den as f64,
        }
    }
}

impl From<ExactDefect> for DefectBound {
    fn from(d: ExactDefect) -> Self {
        DefectBound::Defect(d)
    }
}

impl fmt::Display for DefectBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefectBound::Defect(d) => d.fmt(f),
            DefectBound::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

/// Accepts `p/q`, a decimal such as `1.5`, or `C:n` for `C − 3·log₃ n`.
impl std::str::FromStr for DefectBound {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("'{s}' is not a defect bound (use p/q, a decimal, or C:n)"),
        };
        let s = s.trim();
        if let Some((c, n)) = s.split_once(':') {
            let c: i64 = c.trim().parse().map_err(|_| bad())?;
            let n: BigUint = n.trim().parse().map_err(|_| bad())?;
            if n.is_zero() {
                return Err(bad());
            }
            return Ok(DefectBound::Defect(ExactDefect::new(c, n)));
        }
        if let Some((p, q)) = s.split_once('/') {
            let num: i64 = p.trim().parse().map_err(|_| bad())?;
            let den: u64 = q.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            return Ok(DefectBound::Rational { num, den });
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let whole: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let part: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let negative = int.starts_with('-');
        let num = whole * den as i64 + if negative { -part } else { part };
        let g = num.unsigned_abs().gcd(&den).max(1);
        Ok(DefectBound::Rational {
            num: num / g as i64,
            den: den / g,
        })
    }
}

fn log3_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().unwrap_or(f64::INFINITY).ln() / 3f64.ln()
    } else {
        let shift = bits - 64;
        let top = (n >> shift).to_f64().unwrap();
        (top.ln() + shift as f64 * std::f64::consts::LN_2) / 3f64.ln()
    }
}

/// `δ(n) = ‖n‖ − 3·log₃ n` from the table.
pub fn defect_of(n: u64, table: &ComplexityTable) -> Result<ExactDefect> {
    if n == 0 {
        return Err(Error::NonPositive);
    }
    let c = table.complexity(n)?;
    Ok(ExactDefect::new(c as i64, n))
}
