use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest supported degree; monomials are bitmasks over the variables.
pub const MAX_DEGREE: usize = 63;

/// A multilinear polynomial built by the low-defect construction rules.
///
/// Monomials are stored as bitmasks (bit `i` is `x_{i+1}`), so every
/// variable occurs with degree at most 1 by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LowDefectPoly {
    degree: usize,
    coeffs: BTreeMap<u64, BigUint>,
}

impl LowDefectPoly {
    pub fn constant(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::NonPositive);
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, BigUint::from(k));
        Ok(Self { degree: 0, coeffs })
    }

    /// `self ⊗ other`: the product with `other`'s variables renumbered past
    /// `self`'s.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let degree = self.degree + other.degree;
        check_degree(degree)?;
        let mut coeffs = BTreeMap::new();
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &other.coeffs {
                coeffs.insert(m1 | (m2 << self.degree), c1 * c2);
            }
        }
        Ok(Self { degree, coeffs })
    }

    /// `self ⊗ x + c` with a fresh last variable.
    pub fn times_var_plus(&self, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::NonPositive);
        }
        check_degree(self.degree + 1)?;
        let bit = 1u64 << self.degree;
        let mut coeffs: BTreeMap<u64, BigUint> = self
            .coeffs
            .iter()
            .map(|(m, k)| (m | bit, k.clone()))
            .collect();
        coeffs.insert(0, BigUint::from(c));
        Ok(Self {
            degree: self.degree + 1,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.degree) - 1
    }

    /// Coefficient of `x₁⋯x_d`.
    pub fn leading_coefficient(&self) -> BigUint {
        self.coeffs
            .get(&self.full_mask())
            .cloned()
            .unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigUint {
        self.coeffs.get(&0).cloned().unwrap_or_default()
    }

    /// Coefficient of the monomial over the given 1-based variables.
    pub fn coefficient(&self, vars: &[usize]) -> BigUint {
        if vars.iter().any(|&v| v == 0 || v > self.degree) {
            return BigUint::zero();
        }
        let mask = vars.iter().fold(0u64, |m, &v| m | 1 << (v - 1));
        self.coeffs.get(&mask).cloned().unwrap_or_default()
    }

    /// Nonzero terms as (1-based variable list, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, BigUint)> {
        let mut out: Vec<_> = self
            .coeffs
            .iter()
            .map(|(&m, c)| (mask_vars(m), c.clone()))
            .collect();
        out.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// `f(3^{n₁}, …, 3^{n_d})`.
    pub fn evaluate(&self, exponents: &[u32]) -> Result<BigUint> {
        if exponents.len() != self.degree {
            return Err(Error::Arity {
                expected: self.degree,
                got: exponents.len(),
            });
        }
        let three = BigUint::from(3u32);
        let mut total = BigUint::zero();
        for (&m, c) in &self.coeffs {
            let e: u32 = (0..self.degree)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| exponents[i])
                .sum();
            total += c * three.pow(e);
        }
        Ok(total)
    }

    /// Multilinear, constant term and leading coefficient positive, and
    /// every variable present.
    pub fn is_well_formed(&self) -> bool {
        let full = self.full_mask();
        let used = self.coeffs.keys().fold(0u64, |acc, m| acc | m);
        self.coeffs.keys().all(|m| m & !full == 0)
            && self.coeffs.values().all(|c| !c.is_zero())
            && !self.constant_term().is_zero()
            && !self.leading_coefficient().is_zero()
            && used == full
    }
}

fn check_degree(d: usize) -> Result<()> {
    if d > MAX_DEGREE {
        return Err(Error::Unsupported(format!(
            "degree {d} exceeds the maximum of {MAX_DEGREE}"
        )));
    }
    Ok(())
}

fn mask_vars(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect()
}

fn write_term(f: &mut fmt::Formatter<'_>, vars: &[usize], c: &BigUint) -> fmt::Result {
    if vars.is_empty() || !c.is_one() {
        write!(f, "{c}")?;
    }
    for v in vars {
        write!(f, "x{v}")?;
    }
    Ok(())
}

impl fmt::Display for LowDefectPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (vars, c)) in self.terms().iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write_term(f, vars, c)?;
        }
        Ok(())
    }
}

/// `f̂ = f · x_{d+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AugmentedPoly {
    base: LowDefectPoly,
}

impl AugmentedPoly {
    pub fn base(&self) -> &LowDefectPoly {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.base.degree + 1
    }

    pub fn leading_coefficient(&self) -> BigUint {
        self.base.leading_coefficient()
    }

    pub fn constant_term(&self) -> BigUint {
        BigUint::zero()
    }

    /// `f(3^{n₁}, …, 3^{n_d}) · 3^{n_{d+1}}`.
    pub fn evaluate(&self, exponents: &[u32]) -> Result<BigUint> {
        let Some((&last, head)) = exponents.split_last() else {
            return Err(Error::Arity {
                expected: self.degree(),
                got: 0,
            });
        };
        if exponents.len() != self.degree() {
            return Err(Error::Arity {
                expected: self.degree(),
                got: exponents.len(),
            });
        }
        Ok(self.base.evaluate(head)? * BigUint::from(3u32).pow(last))
    }
}

pub fn augment(f: &LowDefectPoly) -> AugmentedPoly {
    AugmentedPoly { base: f.clone() }
}

impl fmt::Display for AugmentedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.degree();
        if self.base.degree == 0 {
            let c = self.base.constant_term();
            if c.is_one() {
                write!(f, "x{x}")
            } else {
                write!(f, "{c}x{x}")
            }
        } else {
            write!(f, "({})x{x}", self.base)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(a: u64, c: u64) -> LowDefectPoly {
        LowDefectPoly::constant(a)
            .unwrap()
            .times_var_plus(c)
            .unwrap()
    }

    #[test]
    fn construction_and_display() {
        let f = lin(2, 1);
        assert_eq!(f.to_string(), "2x1 + 1");
        let g = f.tensor(&lin(3, 1)).unwrap();
        assert_eq!(g.to_string(), "6x1x2 + 2x1 + 3x2 + 1");
        assert_eq!(g.leading_coefficient(), BigUint::from(6u32));
        assert_eq!(g.coefficient(&[2]), BigUint::from(3u32));
        assert!(g.is_well_formed());
        let h = f.times_var_plus(1).unwrap();
        assert_eq!(h.to_string(), "2x1x2 + x2 + 1");
        assert!(h.is_well_formed());
    }

    #[test]
    fn evaluation() {
        assert_eq!(lin(2, 1).evaluate(&[2]).unwrap(), BigUint::from(19u32));
        assert_eq!(
            LowDefectPoly::constant(5).unwrap().evaluate(&[]).unwrap(),
            BigUint::from(5u32)
        );
        let g = lin(2, 1).tensor(&lin(3, 1)).unwrap();
        assert_eq!(g.evaluate(&[1, 1]).unwrap(), BigUint::from(70u32));
        assert!(matches!(
            g.evaluate(&[1]),
            Err(Error::Arity {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn augmentation() {
        let one = augment(&LowDefectPoly::constant(1).unwrap());
        assert_eq!(one.to_string(), "x1");
        assert_eq!(one.evaluate(&[2]).unwrap(), BigUint::from(9u32));
        let f = augment(&lin(2, 1));
        assert_eq!(f.to_string(), "(2x1 + 1)x2");
        assert_eq!(f.degree(), 2);
        assert_eq!(f.constant_term(), BigUint::zero());
        assert_eq!(f.evaluate(&[1, 1]).unwrap(), BigUint::from(21u32));
        let g = augment(&lin(2, 1).times_var_plus(1).unwrap());
        assert_eq!(g.to_string(), "(2x1x2 + x2 + 1)x3");
    }

    #[test]
    fn rejects_zero() {
        assert!(LowDefectPoly::constant(0).is_err());
        assert!(lin(2, 1).times_var_plus(0).is_err());
    }
}
