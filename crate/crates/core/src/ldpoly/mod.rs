//! Low-defect expressions, trees, polynomials and pairs.
//!
//! Pairs `(f, C)` are only ever produced by the three construction rules (a
//! constant `k` with `C ≥ ‖k‖`, a tensor product adding the `C`s, and
//! `f ⊗ x + c` adding some `D ≥ ‖c‖`), or from a tree/expression whose
//! complexity bounds `C` from below. That keeps `C ≥ ‖a‖ + deg f` true for
//! every pair the crate hands out, which the substantiality shortcut relies
//! on.

mod expr;
mod poly;
mod tree;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

pub use expr::{expr_to_poly, expr_to_tree, LowDefectExpr};
pub use poly::{augment, AugmentedPoly, LowDefectPoly, MAX_DEGREE};
pub use tree::{tree_complexity, tree_to_poly, LowDefectTree};

use crate::complexity::{small_divisors, ComplexityTable};
use crate::defect::ExactDefect;
use crate::error::{Error, Result};
use crate::stability::{Certificate, Policy, StabilityOracle};

/// A low-defect polynomial together with the base complexity of its
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LowDefectPair {
    poly: LowDefectPoly,
    c: u64,
}

impl LowDefectPair {
    /// `(k, C)` with `C ≥ ‖k‖`.
    pub fn constant(k: u64, c: u64, table: &ComplexityTable) -> Result<Self> {
        let ck = table.complexity(k)? as u64;
        if c < ck {
            return Err(Error::Contract(format!("C = {c} is below ‖{k}‖ = {ck}")));
        }
        Ok(Self {
            poly: LowDefectPoly::constant(k)?,
            c,
        })
    }

    /// `(k, ‖k‖)`.
    pub fn minimal_constant(k: u64, table: &ComplexityTable) -> Result<Self> {
        let ck = table.complexity(k)? as u64;
        Self::constant(k, ck, table)
    }

    /// `(f₁ ⊗ f₂, C₁ + C₂)`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            poly: self.poly.tensor(&other.poly)?,
            c: self.c + other.c,
        })
    }

    /// `(f ⊗ x + c, C + D)` with `D ≥ ‖c‖`.
    pub fn extend(&self, c: u64, d: u64, table: &ComplexityTable) -> Result<Self> {
        let cc = table.complexity(c)? as u64;
        if d < cc {
            return Err(Error::Contract(format!("D = {d} is below ‖{c}‖ = {cc}")));
        }
        Ok(Self {
            poly: self.poly.times_var_plus(c)?,
            c: self.c + d,
        })
    }

    /// The pair of a tree with `C` its tree complexity.
    pub fn from_tree(t: &LowDefectTree, table: &ComplexityTable) -> Result<Self> {
        t.validate()?;
        Ok(Self {
            poly: t.to_poly()?,
            c: t.complexity(table)?,
        })
    }

    /// The pair `(f, ‖E‖)` of an expression.
    pub fn from_expr(e: &LowDefectExpr, table: &ComplexityTable) -> Result<Self> {
        Ok(Self {
            poly: e.to_poly()?,
            c: e.complexity(table)?,
        })
    }

    /// `(f, C)` for the polynomial of `e` with a caller-chosen `C`, which must
    /// be at least the complexity of the expression's tree.
    pub fn from_expr_with_c(e: &LowDefectExpr, c: u64, table: &ComplexityTable) -> Result<Self> {
        let tree = e.to_tree()?;
        let floor = tree.complexity(table)?;
        if c < floor {
            return Err(Error::Contract(format!(
                "C = {c} is below the tree complexity {floor} of {e}"
            )));
        }
        Ok(Self {
            poly: tree.to_poly()?,
            c,
        })
    }

    pub fn poly(&self) -> &LowDefectPoly {
        &self.poly
    }

    pub fn base_complexity(&self) -> u64 {
        self.c
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn leading_coefficient(&self) -> BigUint {
        self.poly.leading_coefficient()
    }

    /// `δ(f, C) = C − 3·log₃ a`.
    pub fn delta(&self) -> ExactDefect {
        ExactDefect::new(self.c as i64, self.leading_coefficient())
    }

    /// `δ_{f,C}(n⃗) = C + 3Σnᵢ − 3·log₃ f(3^{n₁}, …)`.
    pub fn delta_at(&self, exponents: &[u32]) -> Result<ExactDefect> {
        let value = self.poly.evaluate(exponents)?;
        let sum: i64 = exponents.iter().map(|&e| e as i64).sum();
        Ok(ExactDefect::new(self.c as i64 + 3 * sum, value))
    }

    pub fn evaluate(&self, exponents: &[u32]) -> Result<BigUint> {
        self.poly.evaluate(exponents)
    }
}

impl Serialize for LowDefectPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LowDefectPair", 4)?;
        st.serialize_field("poly", &self.poly.to_string())?;
        st.serialize_field("C", &self.c)?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field(
            "leading_coefficient",
            &self.leading_coefficient().to_string(),
        )?;
        st.end()
    }
}

pub fn tensor(p1: &LowDefectPair, p2: &LowDefectPair) -> Result<LowDefectPair> {
    p1.tensor(p2)
}

pub fn extend(p: &LowDefectPair, c: u64, d: u64, table: &ComplexityTable) -> Result<LowDefectPair> {
    p.extend(c, d, table)
}

pub fn delta_pair(p: &LowDefectPair) -> ExactDefect {
    p.delta()
}

pub fn delta_at(p: &LowDefectPair, exponents: &[u32]) -> Result<ExactDefect> {
    p.delta_at(exponents)
}

fn to_u64(n: &BigUint) -> Result<u64> {
    n.to_u64().ok_or_else(|| Error::TooLarge(n.to_string()))
}

/// Outcome of the substantiality test for a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Substantiality {
    pub substantial: bool,
    /// `C − ‖a‖_st`.
    pub k: i64,
    /// `k − deg f`; zero exactly when substantial.
    pub gap: i64,
    pub certificate: Certificate,
    /// Decided by `δ(f,C) < deg f + 1` without a stability lookup.
    pub by_small_defect: bool,
}

/// Decides `C = ‖a‖_st + deg f`.
///
/// When `δ(f,C) < deg f + 1` the answer is yes without consulting
/// stability: `C − deg f − ‖a‖_st = δ(f,C) − deg f − δ_st(a) < 1` and the
/// left side is a non-negative integer.
pub fn substantiality(
    p: &LowDefectPair,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<Substantiality> {
    let deg = p.degree() as i64;
    if p.delta().less_than_int(deg + 1) {
        return Ok(Substantiality {
            substantial: true,
            k: deg,
            gap: 0,
            certificate: Certificate::Certified,
            by_small_defect: true,
        });
    }
    let a = to_u64(&p.leading_coefficient())?;
    let (st, certificate) = stab.stable_complexity(a, policy)?;
    let k = p.c as i64 - st as i64;
    if k < deg {
        return Err(Error::Invariant(format!(
            "C − ‖a‖_st = {k} is below the degree {deg}"
        )));
    }
    Ok(Substantiality {
        substantial: k == deg,
        k,
        gap: k - deg,
        certificate,
        by_small_defect: false,
    })
}

/// Definitional check `C = ‖a‖_st + deg f`, never taking the shortcut.
pub fn substantial_by_definition(
    p: &LowDefectPair,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<(bool, Certificate)> {
    let a = to_u64(&p.leading_coefficient())?;
    let (st, cert) = stab.stable_complexity(a, policy)?;
    Ok((p.c == st as u64 + p.degree() as u64, cert))
}

pub fn is_substantial(
    p: &LowDefectPair,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<(bool, Certificate)> {
    let s = substantiality(p, stab, policy)?;
    Ok((s.substantial, s.certificate))
}

/// `(k, gap)` with `k = C − ‖a‖_st` and `gap = k − deg f`.
pub fn insubstantiality_gap(
    p: &LowDefectPair,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<(i64, i64)> {
    let s = substantiality(p, stab, policy)?;
    Ok((s.k, s.gap))
}

/// Reads substantiality of `(tree_to_poly(T), tree_complexity(T))` off the
/// tree: every edge label is 1, no leaf is labeled 1, the product `N` of the
/// vertex labels is stable, and `‖N‖ = Σ_{w(v)>1} ‖w(v)‖`.
pub fn substantial_by_tree(
    t: &LowDefectTree,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<(bool, Certificate)> {
    t.validate()?;
    if t.edge_labels().iter().any(|&e| e != 1) || t.leaf_labels().contains(&1) {
        return Ok((false, Certificate::Certified));
    }
    let n = to_u64(&t.leading_coefficient())?;
    let split: u64 = t
        .vertex_labels()
        .into_iter()
        .filter(|&w| w > 1)
        .map(|w| stab.complexity(w) as u64)
        .sum();
    if stab.complexity(n) as u64 != split {
        return Ok((false, Certificate::Certified));
    }
    stab.is_stable(n, policy)
}

/// `((((q x₁ + 1) x₂ + 1) ⋯) x_k + 1, ‖q‖ + k)`, substantial when `q` is
/// stable.
pub fn canonical_substantial(
    q: u64,
    k: usize,
    table: &ComplexityTable,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<LowDefectPair> {
    let (stable, _) = stab.is_stable(q, policy)?;
    if !stable {
        return Err(Error::Contract(format!("{q} is not stable")));
    }
    let mut p = LowDefectPair::minimal_constant(q, table)?;
    for _ in 0..k {
        p = p.extend(1, 1, table)?;
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degree1Kind {
    /// `a x + 1`.
    AxPlusOne,
    /// `b (a x + 1)` with `b > 1`.
    BTimesAxPlusOne,
    Other,
}

/// Shape of a degree-1 polynomial `αx + β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Degree1Form {
    pub kind: Degree1Kind,
    /// Set unless `kind` is `Other`.
    pub a: Option<u64>,
    pub b: Option<u64>,
}

/// Writes `αx + β` as `b(ax + 1)` when `β | α` (so `b = β`, `a = α/β`).
pub fn degree1_form(f: &LowDefectPoly) -> Result<Degree1Form> {
    if f.degree() != 1 {
        return Err(Error::Contract(format!(
            "expected a degree-1 polynomial, got degree {}",
            f.degree()
        )));
    }
    let alpha = to_u64(&f.leading_coefficient())?;
    let beta = to_u64(&f.constant_term())?;
    if alpha % beta != 0 {
        return Ok(Degree1Form {
            kind: Degree1Kind::Other,
            a: None,
            b: None,
        });
    }
    let kind = if beta == 1 {
        Degree1Kind::AxPlusOne
    } else {
        Degree1Kind::BTimesAxPlusOne
    };
    Ok(Degree1Form {
        kind,
        a: Some(alpha / beta),
        b: Some(beta),
    })
}

/// Whether a degree-1 polynomial of the given form is substantial (with `C`
/// its absolute base complexity): `ax + 1` needs `a` stable; `b(ax + 1)`
/// needs `ab` stable and `‖ab‖ = ‖a‖ + ‖b‖`.
pub fn degree1_substantial(
    form: &Degree1Form,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<(bool, Certificate)> {
    match (form.kind, form.a, form.b) {
        (Degree1Kind::AxPlusOne, Some(a), _) => stab.is_stable(a, policy),
        (Degree1Kind::BTimesAxPlusOne, Some(a), Some(b)) => {
            let ab = a
                .checked_mul(b)
                .ok_or_else(|| Error::TooLarge(format!("{a}·{b}")))?;
            if stab.complexity(ab) != stab.complexity(a) + stab.complexity(b) {
                return Ok((false, Certificate::Certified));
            }
            stab.is_stable(ab, policy)
        }
        _ => Ok((false, Certificate::Certified)),
    }
}

/// All divisors of `n`, ascending.
fn divisors(n: u64) -> Vec<u64> {
    let small = small_divisors(n);
    let mut out = vec![1];
    out.extend(&small);
    out.extend(small.iter().rev().map(|d| n / d).filter(|&q| q * q != n));
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exact `‖f‖` (the least `C` over all constructions of `f`) for degree at
/// most 2.
///
/// `‖f‖` is the minimum tree complexity over trees whose polynomial is `f`.
/// With at most two edges the tree is a single vertex, one edge, a star or a
/// chain, and each shape's labels are pinned down by divisor choices of the
/// coefficients, so the search enumerates divisors of coefficient gcds. Its
/// cost grows with the divisor counts; higher degrees are rejected.
pub fn absolute_base_complexity(f: &LowDefectPoly, table: &ComplexityTable) -> Result<u64> {
    let cpx = |n: u64| -> Result<u64> { Ok(table.complexity(n)? as u64) };
    let inner = |w: u64| -> Result<u64> {
        if w > 1 {
            cpx(w)
        } else {
            Ok(0)
        }
    };
    let coef = |vars: &[usize]| to_u64(&f.coefficient(vars));
    let mut best: Option<u64> = None;
    let mut offer = |c: u64| best = Some(best.map_or(c, |b| b.min(c)));
    match f.degree() {
        0 => offer(cpx(coef(&[])?)?),
        1 => {
            // r (l x + e)
            let (alpha, beta) = (coef(&[1])?, coef(&[])?);
            for r in divisors(alpha.gcd(&beta)) {
                offer(inner(r)? + cpx(alpha / r)? + cpx(beta / r)?);
            }
        }
        2 => {
            let (c11, c10, c01, c00) = (coef(&[1, 2])?, coef(&[1])?, coef(&[2])?, coef(&[])?);
            if c10 != 0 {
                // Star: r (l₁x₁ + e₁)(l₂x₂ + e₂).
                let g = c11.gcd(&c10).gcd(&c01).gcd(&c00);
                for r in divisors(g) {
                    let (g11, g10, g01, g00) = (c11 / r, c10 / r, c01 / r, c00 / r);
                    for l1 in divisors(g11.gcd(&g10)) {
                        let (l2, e2) = (g11 / l1, g10 / l1);
                        if g01 % l2 != 0 {
                            continue;
                        }
                        let e1 = g01 / l2;
                        if e1 as u128 * e2 as u128 != g00 as u128 {
                            continue;
                        }
                        offer(inner(r)? + cpx(l1)? + cpx(l2)? + cpx(e1)? + cpx(e2)?);
                    }
                }
            } else {
                // Chain: r (m (l x₁ + e₂) x₂ + e₁).
                let g = c11.gcd(&c01).gcd(&c00);
                for r in divisors(g) {
                    let (h11, h01, e1) = (c11 / r, c01 / r, c00 / r);
                    for m in divisors(h11.gcd(&h01)) {
                        let (l, e2) = (h11 / m, h01 / m);
                        offer(inner(r)? + inner(m)? + cpx(l)? + cpx(e1)? + cpx(e2)?);
                    }
                }
            }
        }
        d => {
            return Err(Error::Unsupported(format!(
                "absolute base complexity is only searched for degree ≤ 2, got {d}"
            )))
        }
    }
    best.ok_or_else(|| Error::Contract(format!("{f} is not a low-defect polynomial")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::ComplexityOracle;

    struct Fixture {
        table: ComplexityTable,
    }

    impl Fixture {
        fn new() -> Self {
            Self {
                table: ComplexityTable::build(5000).unwrap(),
            }
        }
        fn pair(&self, src: &str) -> LowDefectPair {
            let e = LowDefectExpr::parse(src).unwrap();
            LowDefectPair::from_tree(&e.to_tree().unwrap(), &self.table).unwrap()
        }
    }

    #[test]
    fn tensor_examples() {
        let fx = Fixture::new();
        let t = &fx.table;
        let lin = LowDefectPair::minimal_constant(2, t)
            .unwrap()
            .extend(1, 1, t)
            .unwrap();
        assert_eq!(lin.base_complexity(), 3);
        let two = LowDefectPair::minimal_constant(2, t).unwrap();
        let p = tensor(&lin, &two).unwrap();
        assert_eq!(p.poly().to_string(), "4x1 + 2");
        assert_eq!(p.base_complexity(), 5);

        let one = LowDefectPair::minimal_constant(1, t).unwrap();
        let p = one.tensor(&one).unwrap();
        assert_eq!(p.poly().to_string(), "1");
        assert_eq!(p.base_complexity(), 2);

        let p = lin.tensor(&lin).unwrap();
        assert_eq!(p.poly().to_string(), "4x1x2 + 2x1 + 2x2 + 1");
        assert_eq!((p.degree(), p.base_complexity()), (2, 6));
    }

    #[test]
    fn extend_examples() {
        let fx = Fixture::new();
        let t = &fx.table;
        let two = LowDefectPair::minimal_constant(2, t).unwrap();
        let p = extend(&two, 1, 1, t).unwrap();
        assert_eq!(
            (p.poly().to_string(), p.base_complexity()),
            ("2x1 + 1".into(), 3)
        );
        let q = extend(&p, 1, 1, t).unwrap();
        assert_eq!(
            (q.poly().to_string(), q.base_complexity()),
            ("2x1x2 + x2 + 1".into(), 4)
        );
        assert!(matches!(extend(&two, 1, 0, t), Err(Error::Contract(_))));
        assert!(matches!(
            LowDefectPair::constant(5, 4, t),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn deltas() {
        let fx = Fixture::new();
        let t = &fx.table;
        let lin = fx.pair("2x1+1");
        assert_eq!(lin.delta(), ExactDefect::new(3, 2u32));
        assert_eq!(fx.pair("3").delta(), ExactDefect::integer(0));
        let big = fx.pair("2(1094x1+1)");
        assert_eq!(big.base_complexity(), 25);
        assert_eq!(big.delta(), ExactDefect::new(25, 2188u32));
        let d2188 = crate::defect::defect_of(2188, t).unwrap();
        assert_eq!(big.delta().mod1_congruent(&d2188), Some(3));

        assert_eq!(lin.delta_at(&[1]).unwrap(), ExactDefect::new(6, 7u32));
        assert_eq!(fx.pair("3").delta_at(&[]).unwrap(), ExactDefect::integer(0));
        let at0 = lin.delta_at(&[0]).unwrap();
        assert_eq!(at0, ExactDefect::integer(0));
        assert!(at0 < lin.delta());
        assert!(matches!(lin.delta_at(&[]), Err(Error::Arity { .. })));
    }

    #[test]
    fn substantiality_examples() {
        let fx = Fixture::new();
        let t = &fx.table;
        let cpx = ComplexityOracle::new(t);
        let stab = StabilityOracle::new(&cpx, 12);

        let canon = canonical_substantial(2, 3, t, &stab, Policy::Strict).unwrap();
        assert_eq!((canon.degree(), canon.base_complexity()), (3, 5));
        assert_eq!(canon.poly().to_string(), "2x1x2x3 + x2x3 + x3 + 1");
        let s = substantiality(&canon, &stab, Policy::Strict).unwrap();
        assert!(s.substantial && s.by_small_defect);

        let two = LowDefectPair::minimal_constant(2, t).unwrap();
        let p = two.extend(2, 2, t).unwrap();
        assert_eq!(p.poly().to_string(), "2x1 + 2");
        let s = substantiality(&p, &stab, Policy::Strict).unwrap();
        assert!(!s.substantial);
        assert!(!s.by_small_defect);
        assert_eq!((s.k, s.gap), (2, 1));

        let big = fx.pair("2(1094x1+1)");
        let s = substantiality(&big, &stab, Policy::Strict).unwrap();
        assert!(!s.substantial);
        assert_eq!(
            insubstantiality_gap(&big, &stab, Policy::Strict).unwrap(),
            (3, 2)
        );

        assert_eq!(
            insubstantiality_gap(&fx.pair("2x1+1"), &stab, Policy::Strict).unwrap(),
            (1, 0)
        );
        assert_eq!(
            insubstantiality_gap(&fx.pair("3"), &stab, Policy::Strict).unwrap(),
            (0, 0)
        );
    }

    #[test]
    fn canonical_small_cases() {
        let fx = Fixture::new();
        let t = &fx.table;
        let cpx = ComplexityOracle::new(t);
        let stab = StabilityOracle::new(&cpx, 12);
        let p0 = canonical_substantial(2, 0, t, &stab, Policy::Strict).unwrap();
        assert_eq!(
            (p0.poly().to_string(), p0.base_complexity()),
            ("2".into(), 2)
        );
        let p1 = canonical_substantial(2, 1, t, &stab, Policy::Strict).unwrap();
        assert_eq!(
            (p1.poly().to_string(), p1.base_complexity()),
            ("2x1 + 1".into(), 3)
        );
        // 1 is unstable.
        assert!(matches!(
            canonical_substantial(1, 2, t, &stab, Policy::Strict),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn tree_substantiality() {
        let fx = Fixture::new();
        let cpx = ComplexityOracle::new(&fx.table);
        let stab = StabilityOracle::new(&cpx, 12);
        let yes = LowDefectTree::vertex(1).with_child(1, LowDefectTree::vertex(2));
        assert_eq!(
            substantial_by_tree(&yes, &stab, Policy::Strict).unwrap(),
            (true, Certificate::Certified)
        );
        let edge2 = LowDefectTree::vertex(1).with_child(2, LowDefectTree::vertex(2));
        assert!(
            !substantial_by_tree(&edge2, &stab, Policy::Strict)
                .unwrap()
                .0
        );
        let leaf1 = LowDefectTree::vertex(1).with_child(1, LowDefectTree::vertex(1));
        assert!(
            !substantial_by_tree(&leaf1, &stab, Policy::Strict)
                .unwrap()
                .0
        );
    }

    #[test]
    fn degree_one_forms() {
        let fx = Fixture::new();
        let f = |s: &str| degree1_form(fx.pair(s).poly()).unwrap();
        assert_eq!(
            f("2x1+1"),
            Degree1Form {
                kind: Degree1Kind::AxPlusOne,
                a: Some(2),
                b: Some(1)
            }
        );
        let g = f("2(3x1+1)");
        assert_eq!(
            (g.kind, g.a, g.b),
            (Degree1Kind::BTimesAxPlusOne, Some(3), Some(2))
        );
        let h = f("2(2x1+1)");
        assert_eq!(
            (h.kind, h.a, h.b),
            (Degree1Kind::BTimesAxPlusOne, Some(2), Some(2))
        );
        assert_eq!(f("2x1+3").kind, Degree1Kind::Other);
        assert!(degree1_form(fx.pair("5").poly()).is_err());

        let cpx = ComplexityOracle::new(&fx.table);
        let stab = StabilityOracle::new(&cpx, 12);
        assert!(
            degree1_substantial(&f("2x1+1"), &stab, Policy::Strict)
                .unwrap()
                .0
        );
        // 2x + 2 = 2(1·x + 1) but ‖2‖ ≠ ‖1‖ + ‖2‖.
        assert!(
            !degree1_substantial(&f("x1+2"), &stab, Policy::Strict)
                .unwrap()
                .0
        );
        // 3(2x+1): ‖6‖ = ‖2‖ + ‖3‖ and 6 is stable.
        assert!(
            degree1_substantial(&f("3(2x1+1)"), &stab, Policy::Strict)
                .unwrap()
                .0
        );
    }

    #[test]
    fn absolute_complexity_small_degrees() {
        let fx = Fixture::new();
        let t = &fx.table;
        let abs = |s: &str| absolute_base_complexity(fx.pair(s).poly(), t).unwrap();
        assert_eq!(abs("5"), 5);
        assert_eq!(abs("4x1+2"), 5);
        assert_eq!(abs("2x1+1"), 3);
        assert_eq!(abs("(2x1+1)(3x2+1)"), 7);
        assert_eq!(abs("(2x1+1)x2+1"), 4);
        assert_eq!(abs("3(2x1+1)x2+1"), 7);
        let cubic = fx.pair("((2x1+1)x2+1)x3+1");
        assert!(matches!(
            absolute_base_complexity(cubic.poly(), t),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(divisors(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(7), vec![1, 7]);
    }
}
