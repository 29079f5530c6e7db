//! 3-representations by low-defect polynomials, exceptional sets, leaders and
//! a truncated good-covering verifier.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::ComplexityTable;
use crate::defect::{defect_of, DefectBound, ExactDefect};
use crate::error::{Error, Result};
use crate::ldpoly::{LowDefectExpr, LowDefectPair, LowDefectPoly};
use crate::stability::{Certificate, Policy, StabilityOracle, VerdictKind};

fn big_string<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Exponents with `f(3^{n₁}, …, 3^{n_d}) · 3^{n_{d+1}} = target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepresentationWitness {
    pub exponents: Vec<u32>,
    /// `n_{d+1}` for the augmented polynomial.
    pub augmented_exponent: Option<u32>,
    #[serde(serialize_with = "big_string")]
    pub target: BigUint,
    /// `‖target‖ = C + 3·Σ(all exponents)`; `None` until checked against a
    /// pair.
    pub efficient: Option<bool>,
}

impl RepresentationWitness {
    pub fn exponent_sum(&self) -> u64 {
        self.exponents.iter().map(|&e| e as u64).sum::<u64>()
            + self.augmented_exponent.unwrap_or(0) as u64
    }
}

/// Calls `visit` on every tuple of `d` non-negative integers summing to `s`.
fn compositions(d: usize, s: u32, visit: &mut impl FnMut(&[u32])) {
    fn rec(buf: &mut Vec<u32>, d: usize, left: u32, visit: &mut impl FnMut(&[u32])) {
        if buf.len() + 1 == d {
            buf.push(left);
            visit(buf);
            buf.pop();
            return;
        }
        for e in 0..=left {
            buf.push(e);
            rec(buf, d, left - e, visit);
            buf.pop();
        }
    }
    if d == 0 {
        if s == 0 {
            visit(&[]);
        }
        return;
    }
    rec(&mut Vec::with_capacity(d), d, s, visit);
}

/// All exponent tuples with `f(3^{n⃗}) = n`, by increasing `Σnᵢ`.
///
/// `f(3^{n⃗}) ≥ a·3^{Σnᵢ}` for leading coefficient `a`, so the scan stops once
/// that exceeds `n`.
fn plain_representations(f: &LowDefectPoly, n: &BigUint) -> Vec<Vec<u32>> {
    let a = f.leading_coefficient();
    let three = BigUint::from(3u32);
    let mut out = Vec::new();
    let mut s = 0u32;
    loop {
        if &a * three.pow(s) > *n {
            break;
        }
        compositions(f.degree(), s, &mut |t| {
            if f.evaluate(t).expect("arity matches") == *n {
                out.push(t.to_vec());
            }
        });
        if f.degree() == 0 {
            break;
        }
        s += 1;
    }
    out
}

/// Every way `f` (or `f̂` when `augmented`) 3-represents `n`.
pub fn find_representations(
    f: &LowDefectPoly,
    n: &BigUint,
    augmented: bool,
) -> Vec<RepresentationWitness> {
    if n.is_zero() {
        return Vec::new();
    }
    let three = BigUint::from(3u32);
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut k = 0u32;
    loop {
        for exponents in plain_representations(f, &rest) {
            out.push(RepresentationWitness {
                exponents,
                augmented_exponent: augmented.then_some(k),
                target: n.clone(),
                efficient: None,
            });
        }
        if !augmented || !(&rest % &three).is_zero() {
            break;
        }
        rest /= &three;
        k += 1;
    }
    out
}

/// Result of an efficiency check.
#[derive(Clone, Debug, Serialize)]
pub struct Efficiency {
    pub efficient: bool,
    /// The first efficient witness, if any.
    pub witness: Option<RepresentationWitness>,
    /// Every representation, each flagged.
    pub representations: Vec<RepresentationWitness>,
}

/// Whether `(f, C)` (or `(f̂, C)`) efficiently 3-represents `n ≤ limit`.
pub fn is_efficiently_represented(
    p: &LowDefectPair,
    n: u64,
    table: &ComplexityTable,
    augmented: bool,
) -> Result<Efficiency> {
    let cn = table.complexity(n)? as u64;
    let mut reps = find_representations(p.poly(), &BigUint::from(n), augmented);
    for r in &mut reps {
        r.efficient = Some(cn == p.base_complexity() + 3 * r.exponent_sum());
    }
    let witness = reps.iter().find(|r| r.efficient == Some(true)).cloned();
    Ok(Efficiency {
        efficient: witness.is_some(),
        witness,
        representations: reps,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionMode {
    /// Compare `‖·‖` with the naive bound.
    Plain,
    /// Compare `‖·‖_st` with the naive bound.
    Stable,
}

impl std::str::FromStr for ExceptionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(ExceptionMode::Plain),
            "stable" => Ok(ExceptionMode::Stable),
            other => Err(Error::Contract(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalSet {
    pub mode: ExceptionMode,
    pub tuples: Vec<Vec<u32>>,
    pub scanned: usize,
    pub certificate: Certificate,
}

/// Calls `visit` on every tuple with `0 ≤ nᵢ ≤ bounds[i]`.
fn box_tuples(bounds: &[u32], visit: &mut impl FnMut(&[u32]) -> Result<()>) -> Result<()> {
    let mut t = vec![0u32; bounds.len()];
    loop {
        visit(&t)?;
        let mut i = 0;
        loop {
            if i == bounds.len() {
                return Ok(());
            }
            if t[i] < bounds[i] {
                t[i] += 1;
                break;
            }
            t[i] = 0;
            i += 1;
        }
    }
}

/// Tuples in the box where the complexity of `f(3^{n⃗})` falls below
/// `C + 3Σnᵢ`.
///
/// Stable mode needs no stability lookup when already `‖v‖` is below the
/// bound; otherwise `‖v‖` equals the bound and the tuple is exceptional
/// exactly when `v` is unstable. Unresolved verdicts are errors under
/// [`Policy::Strict`] and count as stable under [`Policy::Assume`].
pub fn exceptional_set(
    p: &LowDefectPair,
    bounds: &[u32],
    stab: &StabilityOracle<'_>,
    policy: Policy,
    mode: ExceptionMode,
) -> Result<ExceptionalSet> {
    if bounds.len() != p.degree() {
        return Err(Error::Arity {
            expected: p.degree(),
            got: bounds.len(),
        });
    }
    let table = stab.complexity_oracle().table();
    let mut tuples = Vec::new();
    let mut unresolved = Vec::new();
    let mut scanned = 0usize;
    let mut certificate = Certificate::Certified;
    box_tuples(bounds, &mut |t| {
        scanned += 1;
        let value = p.evaluate(t)?;
        let v = value
            .to_u64()
            .filter(|&v| v <= table.limit())
            .ok_or_else(|| table.range_error(&value))?;
        let bound = p.base_complexity() + 3 * t.iter().map(|&e| e as u64).sum::<u64>();
        let cv = table.complexity(v)? as u64;
        if cv > bound {
            return Err(Error::Invariant(format!(
                "‖{v}‖ = {cv} exceeds the construction bound {bound}"
            )));
        }
        if cv < bound {
            tuples.push(t.to_vec());
            return Ok(());
        }
        if mode == ExceptionMode::Stable {
            match stab.verdict(v)?.kind {
                VerdictKind::StableCertified => {}
                VerdictKind::UnstableCertified => tuples.push(t.to_vec()),
                VerdictKind::UnknownAtHorizon => {
                    unresolved.push(t.to_vec());
                    certificate = Certificate::HorizonAssumed;
                }
            }
        }
        Ok(())
    })?;
    if policy == Policy::Strict && !unresolved.is_empty() {
        return Err(Error::Indeterminate(format!(
            "stability of f(3^n) unresolved at horizon {} for tuples {:?}",
            stab.horizon(),
            unresolved
        )));
    }
    Ok(ExceptionalSet {
        mode,
        tuples,
        scanned,
        certificate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalK {
    /// Least `K ≤ k_max` with no exceptional `k ∈ [K, k_max]`; `None` when
    /// `k_max` itself is exceptional.
    #[serde(rename = "K_observed")]
    pub k_observed: Option<u32>,
    pub k_max: u32,
    pub exceptions: Vec<u32>,
    pub certificate: Certificate,
}

/// Empirical threshold past which a degree-1 pair has no exceptions.
pub fn minimal_k_degree1(
    p: &LowDefectPair,
    k_max: u32,
    stab: &StabilityOracle<'_>,
    policy: Policy,
    mode: ExceptionMode,
) -> Result<MinimalK> {
    if p.degree() != 1 {
        return Err(Error::Contract(format!(
            "expected a degree-1 pair, got degree {}",
            p.degree()
        )));
    }
    let set = exceptional_set(p, &[k_max], stab, policy, mode)?;
    let exceptions: Vec<u32> = set.tuples.iter().map(|t| t[0]).collect();
    let k_observed = match exceptions.last() {
        None => Some(0),
        Some(&last) if last < k_max => Some(last + 1),
        Some(_) => None,
    };
    Ok(MinimalK {
        k_observed,
        k_max,
        exceptions,
        certificate: set.certificate,
    })
}

/// `3 ∤ n` or `‖n‖ < 3 + ‖n/3‖`.
pub fn is_leader(n: u64, table: &ComplexityTable) -> Result<bool> {
    let cn = table.complexity(n)?;
    Ok(!n.is_multiple_of(3) || cn < 3 + table.complexity(n / 3)?)
}

pub fn leaders(limit: u64, table: &ComplexityTable) -> Result<Vec<u64>> {
    if limit > table.limit() {
        return Err(table.range_error(limit));
    }
    (1..=limit)
        .filter_map(|n| is_leader(n, table).map(|l| l.then_some(n)).transpose())
        .collect()
}

/// `(m, k)` with `n = m·3^k`, `m` a leader and `δ(m) = δ(n)`.
pub fn leader_decompose(n: u64, table: &ComplexityTable) -> Result<(u64, u32)> {
    let mut m = n;
    let mut k = 0;
    while !is_leader(m, table)? {
        m /= 3;
        k += 1;
    }
    Ok((m, k))
}

/// One entry of a covering file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringEntry {
    pub expression: String,
    #[serde(rename = "C")]
    pub c: u64,
}

/// Parses covering entries into pairs; each `C` must be at least the tree
/// complexity of its expression.
pub fn covering_pairs(
    entries: &[CoveringEntry],
    table: &ComplexityTable,
) -> Result<Vec<LowDefectPair>> {
    entries
        .iter()
        .map(|e| LowDefectPair::from_expr_with_c(&LowDefectExpr::parse(&e.expression)?, e.c, table))
        .collect()
}

pub fn read_covering_file(path: impl AsRef<std::path::Path>) -> Result<Vec<CoveringEntry>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectBoundViolation {
    pub index: usize,
    pub pair: LowDefectPair,
    pub delta: ExactDefect,
}

#[derive(Clone, Debug, Serialize)]
pub struct UncoveredLeader {
    pub n: u64,
    pub delta: ExactDefect,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringReport {
    pub pass: bool,
    pub bound: DefectBound,
    pub truncation: u64,
    pub leaders_checked: usize,
    /// Candidates with `δ(f,C) > s`.
    pub defect_bound_violations: Vec<DefectBoundViolation>,
    /// Leaders `n ≤ N` with `δ(n) ≤ s` that no candidate efficiently
    /// 3-represents.
    pub uncovered_leaders: Vec<UncoveredLeader>,
}

/// Checks both good-covering conditions at truncation `limit`: every
/// candidate has `δ(f,C) ≤ s`, and every leader `n ≤ limit` with `δ(n) ≤ s`
/// is efficiently 3-represented by some candidate.
pub fn verify_covering(
    candidates: &[LowDefectPair],
    s: &DefectBound,
    limit: u64,
    table: &ComplexityTable,
) -> Result<CoveringReport> {
    if limit > table.limit() {
        return Err(table.range_error(limit));
    }
    let defect_bound_violations: Vec<_> = candidates
        .iter()
        .enumerate()
        .filter(|(_, p)| !s.admits(&p.delta()))
        .map(|(index, p)| DefectBoundViolation {
            index,
            pair: p.clone(),
            delta: p.delta(),
        })
        .collect();

    let low: Vec<(u64, ExactDefect)> = (1..=limit)
        .into_par_iter()
        .map(|n| -> Result<Option<(u64, ExactDefect)>> {
            let d = defect_of(n, table)?;
            Ok((s.admits(&d) && is_leader(n, table)?).then_some((n, d)))
        })
        .filter_map(|r| r.transpose())
        .collect::<Result<_>>()?;

    let mut uncovered_leaders = Vec::new();
    for (n, delta) in &low {
        let mut covered = false;
        for p in candidates {
            if is_efficiently_represented(p, *n, table, false)?.efficient {
                covered = true;
                break;
            }
        }
        if !covered {
            uncovered_leaders.push(UncoveredLeader {
                n: *n,
                delta: delta.clone(),
            });
        }
    }
    Ok(CoveringReport {
        pass: defect_bound_violations.is_empty() && uncovered_leaders.is_empty(),
        bound: s.clone(),
        truncation: limit,
        leaders_checked: low.len(),
        defect_bound_violations,
        uncovered_leaders,
    })
}

/// Distinct targets reached in a box, for cross-checking searches.
pub fn box_values(f: &LowDefectPoly, bounds: &[u32]) -> Result<BTreeSet<BigUint>> {
    let mut out = BTreeSet::new();
    box_tuples(bounds, &mut |t| {
        out.insert(f.evaluate(t)?);
        Ok(())
    })?;
    Ok(out)
}
