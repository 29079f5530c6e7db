//! Exact `‖n‖` for values beyond the dense table.
//!
//! The search answers "is `‖n‖ ≤ t`?" by branch and bound. Products `d·(n/d)`
//! with `d ≤ √n` are tried first, then sums `a + (n−a)` with `a` ascending
//! until `(a·(n−a))³ > 3^t`; past that point `‖a‖+‖n−a‖ ≥ 3·log₃(a(n−a)) > t`.
//! Each recursive query carries the remaining budget, and the logarithmic
//! lower bound prunes a subproblem as soon as its budget drops below
//! `3·log₃` of its argument. `‖n‖` itself is found by tightening an upper
//! bound downward until a query fails.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::bounds::{cube_le, log_lower_bound};
use super::table::ComplexityTable;
use crate::error::{Error, Result};

/// Limit of the table an oracle builds for itself when none is supplied.
pub const STANDALONE_LIMIT: u64 = 1 << 16;

#[derive(Clone, Copy, Debug)]
struct Bounds {
    lower: u32,
    upper: u32,
}

/// Complexity oracle over the whole of `u64`, backed by a dense table.
///
/// All methods take `&self`; the memo sits behind a mutex that is never held
/// across recursive calls, so an oracle can be shared between threads.
pub struct ComplexityOracle<'t> {
    table: Cow<'t, ComplexityTable>,
    memo: Mutex<HashMap<u64, Bounds>>,
}

impl<'t> ComplexityOracle<'t> {
    pub fn new(table: &'t ComplexityTable) -> Self {
        Self {
            table: Cow::Borrowed(table),
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// An oracle owning a small table of limit [`STANDALONE_LIMIT`].
    pub fn standalone() -> ComplexityOracle<'static> {
        let table = ComplexityTable::build(STANDALONE_LIMIT).expect("small table always fits");
        ComplexityOracle {
            table: Cow::Owned(table),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn table(&self) -> &ComplexityTable {
        &self.table
    }

    /// Number of values with cached bounds beyond the table.
    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    /// `‖n‖` for `n ≥ 1`.
    pub fn complexity(&self, n: u64) -> u32 {
        assert!(n >= 1, "complexity of 0 is undefined");
        if let Some(c) = self.table.get(n) {
            return c;
        }
        let (mut lower, mut upper) = self.bounds(n);
        while lower < upper {
            match self.fits(n, upper - 1) {
                Some(found) => upper = found,
                None => lower = upper,
            }
        }
        upper
    }

    /// `‖n‖` for an arbitrary-precision argument that fits in u64.
    pub fn complexity_big(&self, n: &BigUint) -> Result<u32> {
        let v = n.to_u64().ok_or_else(|| Error::TooLarge(n.to_string()))?;
        if v == 0 {
            return Err(Error::NonPositive);
        }
        Ok(self.complexity(v))
    }

    /// Returns the cost of some split of `n` using at most `t` ones, if any.
    pub fn fits(&self, n: u64, t: u32) -> Option<u32> {
        if let Some(c) = self.table.get(n) {
            return (c <= t).then_some(c);
        }
        let (lower, upper) = self.bounds(n);
        if t < lower {
            return None;
        }
        if upper <= t {
            return Some(upper);
        }

        let found = self.search(n, t);
        let mut memo = self.memo.lock().unwrap();
        let b = memo.get_mut(&n).expect("bounds seeded above");
        match found {
            Some(c) => b.upper = b.upper.min(c),
            None => b.lower = b.lower.max(t + 1),
        }
        found
    }

    fn search(&self, n: u64, t: u32) -> Option<u32> {
        for d in small_divisors(n) {
            let cd = self.complexity(d);
            if cd >= t {
                continue;
            }
            if let Some(c) = self.fits(n / d, t - cd) {
                return Some(cd + c);
            }
        }
        let limit = cube_le(t);
        for a in 1..=n / 2 {
            if (a as u128) * ((n - a) as u128) > limit {
                break;
            }
            let ca = self.complexity(a);
            if ca >= t {
                continue;
            }
            if let Some(c) = self.fits(n - a, t - ca) {
                return Some(ca + c);
            }
        }
        None
    }

    /// Current `[lower, upper]` for `n`, seeding the memo on first sight.
    fn bounds(&self, n: u64) -> (u32, u32) {
        if let Some(b) = self.memo.lock().unwrap().get(&n) {
            return (b.lower, b.upper);
        }
        let lower = log_lower_bound(n as u128);
        let upper = self.horner_bound(n);
        let mut memo = self.memo.lock().unwrap();
        let b = memo.entry(n).or_insert(Bounds { lower, upper });
        (b.lower, b.upper)
    }

    /// Upper bound from mixed base-2/base-3 Horner schemes over the table.
    fn horner_bound(&self, n: u64) -> u32 {
        let mut cache = HashMap::new();
        self.horner_rec(n, &mut cache)
    }

    fn horner_rec(&self, n: u64, cache: &mut HashMap<u64, u32>) -> u32 {
        if let Some(c) = self.table.get(n) {
            return c;
        }
        if n < 6 {
            return n as u32;
        }
        if let Some(&c) = cache.get(&n) {
            return c;
        }
        // n = 3q + r uses ‖q‖ + 3 + r ones (r ≤ 2); n = 2q + r uses ‖q‖ + 2 + r.
        let by3 = self.horner_rec(n / 3, cache) + 3 + (n % 3) as u32;
        let by2 = self.horner_rec(n / 2, cache) + 2 + (n % 2) as u32;
        let best = by3.min(by2);
        cache.insert(n, best);
        best
    }
}

/// `‖n‖` using `table` when given, otherwise a standalone oracle.
pub fn complexity(n: u64, table: Option<&ComplexityTable>) -> u32 {
    match table {
        Some(t) => ComplexityOracle::new(t).complexity(n),
        None => ComplexityOracle::standalone().complexity(n),
    }
}

/// Divisors `d` of `n` with `2 ≤ d ≤ √n`, ascending.
pub(crate) fn small_divisors(n: u64) -> Vec<u64> {
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    let mut out: Vec<u64> = divs
        .into_iter()
        .filter(|&d| d >= 2 && (d as u128) * (d as u128) <= n as u128)
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors() {
        assert_eq!(small_divisors(36), vec![2, 3, 4, 6]);
        assert_eq!(small_divisors(97), Vec::<u64>::new());
        assert_eq!(small_divisors(2 * 2 * 3 * 7), vec![2, 3, 4, 6, 7]);
        assert_eq!(small_divisors(1), Vec::<u64>::new());
    }

    #[test]
    fn agrees_with_table_beyond_small_table() {
        let big = ComplexityTable::build(200_000).unwrap();
        let small = ComplexityTable::build(500).unwrap();
        let oracle = ComplexityOracle::new(&small);
        for n in (501..200_000u64)
            .step_by(997)
            .chain([1094, 2188, 59_049, 177_147])
        {
            assert_eq!(oracle.complexity(n), big.get(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn free_function() {
        assert_eq!(complexity(11, None), 8);
        assert_eq!(complexity(1, None), 1);
        assert_eq!(complexity(6, None), 5);
        let t = ComplexityTable::build(100).unwrap();
        assert_eq!(complexity(3u64.pow(10), Some(&t)), 30);
    }

    #[test]
    fn big_arguments() {
        let o = ComplexityOracle::standalone();
        assert_eq!(o.complexity_big(&BigUint::from(3u64.pow(30))).unwrap(), 90);
        let huge = BigUint::from(u64::MAX) + 1u32;
        assert!(matches!(o.complexity_big(&huge), Err(Error::TooLarge(_))));
    }
}
