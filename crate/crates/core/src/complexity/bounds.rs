//! Integer forms of the logarithmic lower bound `‖n‖ ≥ 3·log₃ n`.
//!
//! Every comparison against `3·log₃ x` is reduced to `x³ ≤ 3^t`, which is
//! decided exactly by precomputing `⌊3^(t/3)⌋` (the integer cube root of
//! `3^t`) for every `t` we can meet.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Largest `t` for which thresholds are tabulated. `‖n‖ < 3·log₂ n + 1`
/// keeps every u64 argument far below this.
pub const MAX_T: usize = 400;

struct Thresholds {
    /// `le[t]` = max x with x³ ≤ 3^t (saturated at u128::MAX).
    le: Vec<u128>,
    /// `lt[t]` = max x with x³ < 3^t.
    lt: Vec<u128>,
}

fn thresholds() -> &'static Thresholds {
    static CELL: OnceLock<Thresholds> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut le = Vec::with_capacity(MAX_T + 1);
        let mut lt = Vec::with_capacity(MAX_T + 1);
        let three = BigUint::from(3u32);
        for t in 0..=MAX_T {
            let p = three.pow(t as u32);
            let r = p.cbrt();
            let exact = &r * &r * &r == p;
            let le_t = r.to_u128().unwrap_or(u128::MAX);
            let lt_t = if exact {
                (r - 1u32).to_u128().unwrap_or(u128::MAX)
            } else {
                le_t
            };
            le.push(le_t);
            lt.push(lt_t);
        }
        Thresholds { le, lt }
    })
}

/// Max `x` with `x³ ≤ 3^t`.
#[inline]
pub fn cube_le(t: u32) -> u128 {
    let t = t as usize;
    if t > MAX_T {
        u128::MAX
    } else {
        thresholds().le[t]
    }
}

/// Max `x` with `x³ < 3^t`.
#[inline]
pub fn cube_lt(t: u32) -> u128 {
    let t = t as usize;
    if t > MAX_T {
        u128::MAX
    } else {
        thresholds().lt[t]
    }
}

/// `⌈3·log₃ n⌉`, the smallest `t` with `n³ ≤ 3^t`.
pub fn log_lower_bound(n: u128) -> u32 {
    let th = &thresholds().le;
    // th is nondecreasing; binary search for the first t with n <= th[t].
    let idx = th.partition_point(|&x| x < n);
    idx as u32
}

/// Floor of `(3/ln 2)·ln n`, the binary-Horner upper bound (n > 1).
pub fn log_upper_bound(n: u64) -> u32 {
    if n <= 1 {
        return 1;
    }
    // Float is fine here: this bound only feeds table invariant checks, and a
    // tiny epsilon keeps exact-boundary cases on the safe side.
    ((3.0 / std::f64::consts::LN_2) * (n as f64).ln() + 1e-9).floor() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_three_are_exact_boundaries() {
        for k in 0..40u32 {
            let p = 3u128.pow(k);
            assert_eq!(log_lower_bound(p), 3 * k);
            assert_eq!(cube_le(3 * k), p);
            assert_eq!(cube_lt(3 * k), p - 1);
        }
    }

    #[test]
    fn lower_bound_matches_float_away_from_boundaries() {
        for n in (2u128..5000).filter(|n| !matches!(n, 3 | 9 | 27 | 81 | 243 | 729 | 2187)) {
            let f = 3.0 * (n as f64).ln() / 3f64.ln();
            assert_eq!(log_lower_bound(n), f.ceil() as u32, "n={n}");
        }
    }
}
