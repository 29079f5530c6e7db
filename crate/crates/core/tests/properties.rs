use std::sync::OnceLock;

use intcpx::complexity::bounds::{log_lower_bound, log_upper_bound};
use intcpx::defect::{defect_of, ExactDefect};
use intcpx::ldpoly::{
    is_substantial, substantial_by_definition, substantial_by_tree, substantiality, LowDefectExpr,
    LowDefectPair, LowDefectTree,
};
use intcpx::represent::{exceptional_set, leader_decompose, ExceptionMode};
use intcpx::structure::{closure_membership, convergence_series, SeriesMode};
use intcpx::{ComplexityOracle, ComplexityTable, Policy, StabilityOracle};
use num_traits::ToPrimitive;
use proptest::prelude::*;

const LIMIT: u64 = 2_000_000;
const HORIZON: u32 = 6;

fn table() -> &'static ComplexityTable {
    static T: OnceLock<ComplexityTable> = OnceLock::new();
    T.get_or_init(|| ComplexityTable::build(LIMIT).unwrap())
}

fn with_stab<R>(f: impl FnOnce(&ComplexityTable, &StabilityOracle<'_>) -> R) -> R {
    let t = table();
    let cpx = ComplexityOracle::new(t);
    let stab = StabilityOracle::new(&cpx, HORIZON);
    f(t, &stab)
}

/// Trees with at most `edges` edges, vertex labels in 1..=6, edge labels in 1..=3.
fn tree(edges: u32) -> impl Strategy<Value = LowDefectTree> {
    let leaf = (1u64..=6).prop_map(LowDefectTree::vertex);
    leaf.prop_recursive(edges, edges, 3, |inner| {
        (1u64..=6, prop::collection::vec((1u64..=3, inner), 0..=2)).prop_map(|(w, kids)| {
            kids.into_iter()
                .fold(LowDefectTree::vertex(w), |t, (e, c)| t.with_child(e, c))
        })
    })
    .prop_filter("bounded degree", move |t| t.degree() <= edges as usize)
}

/// Expressions with constants in 1..=8; variables are renumbered afterwards.
fn expr() -> impl Strategy<Value = LowDefectExpr> {
    let leaf = (1u64..=8).prop_map(LowDefectExpr::Const);
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| LowDefectExpr::Product(Box::new(a), Box::new(b))),
            (inner, 1u64..=4).prop_map(|(e, c)| LowDefectExpr::Extend {
                inner: Box::new(e),
                var: 0,
                c
            }),
        ]
    })
}

fn renumber(e: LowDefectExpr, next: &mut usize) -> LowDefectExpr {
    match e {
        LowDefectExpr::Const(k) => LowDefectExpr::Const(k),
        LowDefectExpr::Product(a, b) => {
            let a = renumber(*a, next);
            let b = renumber(*b, next);
            LowDefectExpr::Product(Box::new(a), Box::new(b))
        }
        LowDefectExpr::Extend { inner, c, .. } => {
            let inner = renumber(*inner, next);
            *next += 1;
            LowDefectExpr::Extend {
                inner: Box::new(inner),
                var: *next,
                c,
            }
        }
    }
}

fn pair_of(t: &LowDefectTree) -> LowDefectPair {
    LowDefectPair::from_tree(t, table()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complexity_invariants(n in 2u64..10_000, m in 2u64..200) {
        let t = table();
        let c = |x: u64| t.get(x).unwrap();
        prop_assert!(c(n) >= log_lower_bound(n as u128));
        prop_assert!(c(n) <= log_upper_bound(n));
        prop_assert!(c(n * m) <= c(n) + c(m));
        prop_assert!(c(n + m) <= c(n) + c(m));
        prop_assert!(c(3 * n) <= c(n) + 3);
        prop_assert!(defect_of(n, t).unwrap() >= ExactDefect::integer(0));
    }

    #[test]
    fn exact_order_agrees_with_floats_away_from_ties(a in 1u64..100_000, b in 1u64..100_000) {
        let t = table();
        let (da, db) = (defect_of(a, t).unwrap(), defect_of(b, t).unwrap());
        if (da.approx() - db.approx()).abs() > 1e-9 {
            prop_assert_eq!(da < db, da.approx() < db.approx());
        }
    }

    #[test]
    fn polynomials_are_well_formed(t in tree(4)) {
        let p = pair_of(&t);
        prop_assert!(p.poly().is_well_formed());
        prop_assert_eq!(p.degree(), t.degree());
        prop_assert_eq!(p.leading_coefficient(), t.leading_coefficient());
    }

    #[test]
    fn construction_bound_dominates_values(t in tree(3), e0 in 0u32..4, e1 in 0u32..4, e2 in 0u32..4) {
        let p = pair_of(&t);
        let ex: Vec<u32> = [e0, e1, e2].into_iter().take(p.degree()).collect();
        let v = p.evaluate(&ex).unwrap().to_u64().unwrap();
        prop_assume!(v <= LIMIT);
        let bound = p.base_complexity() + 3 * ex.iter().map(|&x| x as u64).sum::<u64>();
        prop_assert!(table().get(v).unwrap() as u64 <= bound);
    }

    #[test]
    fn pointwise_defects_increase_and_stay_below(t in tree(3), e0 in 0u32..4, e1 in 0u32..4, e2 in 0u32..4, bump in 0usize..3) {
        let p = pair_of(&t);
        prop_assume!(p.degree() >= 1);
        let ex: Vec<u32> = [e0, e1, e2].into_iter().take(p.degree()).collect();
        let here = p.delta_at(&ex).unwrap();
        prop_assert!(here < p.delta());
        let mut up = ex.clone();
        up[bump % p.degree()] += 1;
        prop_assert!(here < p.delta_at(&up).unwrap());
    }

    #[test]
    fn base_complexity_bounds_lead(t in tree(4)) {
        let p = pair_of(&t);
        let a = p.leading_coefficient().to_u64().unwrap();
        let ca = table().get(a).unwrap() as u64;
        prop_assert!(p.base_complexity() >= ca + p.degree() as u64);
    }

    #[test]
    fn equal_pair_defects_share_class(t1 in tree(2), t2 in tree(2), slack in 0u64..3) {
        let p = pair_of(&t1);
        let q = pair_of(&t2);
        // Shift q by whole multiples of 3·log₃ so that collisions actually occur.
        let q = LowDefectPair::constant(3, 3 + slack, table()).unwrap().tensor(&q).unwrap();
        if p.delta() == q.delta() {
            prop_assert_eq!(p.base_complexity() % 3, q.base_complexity() % 3);
        }
        if let Some(diff) = p.delta().mod1_congruent(&q.delta()) {
            prop_assert_eq!(
                (p.base_complexity() as i64 - q.base_complexity() as i64 - diff).rem_euclid(3),
                0
            );
        }
    }

    #[test]
    fn tree_never_costs_more_than_its_expression(e in expr()) {
        let e = renumber(e, &mut 0);
        let t = table();
        let tree = e.to_tree().unwrap();
        prop_assert!(tree.complexity(t).unwrap() <= e.complexity(t).unwrap());
        prop_assert_eq!(e.to_poly().unwrap(), tree.to_poly().unwrap());
        let back = LowDefectExpr::parse(&e.to_string()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn small_defect_shortcut_agrees_with_definition(t in tree(3)) {
        let p = pair_of(&t);
        prop_assume!(p.delta().less_than_int(p.degree() as i64 + 1));
        with_stab(|_, stab| {
            let fast = substantiality(&p, stab, Policy::Strict).unwrap();
            assert!(fast.by_small_defect && fast.substantial);
            let slow = substantial_by_definition(&p, stab, Policy::Strict).unwrap();
            assert_eq!(slow, (true, intcpx::Certificate::Certified));
        });
    }

    #[test]
    fn tree_reading_agrees_with_definition(t in tree(3)) {
        let p = pair_of(&t);
        prop_assume!(p.leading_coefficient().to_u64().unwrap() <= 5000);
        with_stab(|_, stab| {
            let by_tree = substantial_by_tree(&t, stab, Policy::Assume).unwrap().0;
            let by_def = is_substantial(&p, stab, Policy::Assume).unwrap().0;
            assert_eq!(by_tree, by_def, "{t:?}");
        });
    }

    #[test]
    fn leader_decomposition_preserves_defect(n in 1u64..1_000_000) {
        let t = table();
        let (m, k) = leader_decompose(n, t).unwrap();
        prop_assert_eq!(m * 3u64.pow(k), n);
        prop_assert_eq!(defect_of(m, t).unwrap(), defect_of(n, t).unwrap());
        prop_assert_eq!(t.get(n).unwrap(), t.get(m).unwrap() + 3 * k);
    }

    #[test]
    fn closure_is_upward_closed(n in 1u64..100_000, c in 0i64..60) {
        let t = table();
        if closure_membership(c, n, t).unwrap() {
            prop_assert!(closure_membership(c + 1, n, t).unwrap());
        }
    }
}

#[test]
fn stable_exceptions_contain_plain_exceptions() {
    with_stab(|t, stab| {
        for src in [
            "x1+1",
            "2x1+1",
            "x1+2",
            "2(x1+1)",
            "4x1+1",
            "(x1+1)(x2+1)",
            "5x1+1",
        ] {
            let e = LowDefectExpr::parse(src).unwrap();
            let p = LowDefectPair::from_tree(&e.to_tree().unwrap(), t).unwrap();
            let bounds = vec![5; p.degree()];
            let plain =
                exceptional_set(&p, &bounds, stab, Policy::Assume, ExceptionMode::Plain).unwrap();
            let stable =
                exceptional_set(&p, &bounds, stab, Policy::Assume, ExceptionMode::Stable).unwrap();
            for tu in &plain.tuples {
                assert!(stable.tuples.contains(tu), "{src} {tu:?}");
            }
        }
    });
}

#[test]
fn series_below_shifted_stable_defects() {
    // For stable q ≤ 30, δ(q·3^k + 1) stays below δ(q) + 1 and the
    // non-exceptional terms sit in class ‖q‖ + 1.
    with_stab(|t, stab| {
        for q in 2..=30u64 {
            let Ok((true, intcpx::Certificate::Certified)) = stab.is_stable(q, Policy::Strict)
            else {
                continue;
            };
            let r = convergence_series(q, 1, 8, stab, Policy::Strict, SeriesMode::Plain).unwrap();
            assert!(r.bounded_by_target, "q = {q}");
            let want = (t.get(q).unwrap() + 1) % 3;
            let regular: Vec<_> = r.terms.iter().filter(|t| !t.exceptional).collect();
            for term in &regular {
                assert_eq!(term.class as u32, want, "q = {q}, k = {}", term.k);
            }
            // Exceptional terms (7·3² + 1 = 2⁶) may dip; the regular ones climb.
            assert!(
                regular.windows(2).all(|w| w[0].value < w[1].value),
                "q = {q}"
            );
        }
    });
}
