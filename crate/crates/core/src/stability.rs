//! Stability of `n` under multiplication by powers of 3.
//!
//! `n` is stable when `‖3^k n‖ = ‖n‖ + 3k` for every `k`. Along the sequence
//! `3^k n` the defect never increases and only drops by integers, and it
//! stays `≥ 0`. Two closing certificates follow:
//!
//! * if `δ(n) < 1` no drop is possible, so `n` is stable;
//! * if the last observed drop lands at a defect `< 1`, the tail is stable
//!   from there on, which pins `K(n)` and `‖n‖_st` exactly.
//!
//! Anything else is reported as [`VerdictKind::UnknownAtHorizon`] together
//! with the horizon-assumed stable complexity, and callers decide through
//! [`Policy`] whether to proceed.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::complexity::{ComplexityOracle, ComplexityTable};
use crate::defect::ExactDefect;
use crate::error::{Error, Result};

/// Default scan depth.
pub const DEFAULT_HORIZON: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Fail on anything not certified.
    Strict,
    /// Proceed with horizon-assumed values and mark results accordingly.
    Assume,
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Policy::Strict),
            "assume" => Ok(Policy::Assume),
            other => Err(Error::Contract(format!("unknown policy '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    HorizonAssumed,
    Certified,
}

impl Certificate {
    /// The weaker of two certificates.
    pub fn and(self, other: Certificate) -> Certificate {
        self.min(other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    StableCertified,
    UnstableCertified,
    UnknownAtHorizon,
}

/// `K(n)`, either exact or a lower bound when the tail is not certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KValue {
    pub value: u32,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub n: u64,
    pub kind: VerdictKind,
    #[serde(rename = "K")]
    pub k: Option<KValue>,
    /// First `k` with `‖3^k n‖ < ‖n‖ + 3k`, for unstable verdicts.
    pub witness_k: Option<u32>,
    pub horizon: u32,
    pub complexity: u32,
    pub stable_complexity: u32,
    pub certificate: Certificate,
    /// `‖3^k n‖ − 3k` for each scanned `k`.
    pub scan: Vec<u32>,
}

impl StabilityVerdict {
    /// `Δ(n) = ‖n‖ − ‖n‖_st`.
    pub fn gap(&self) -> u32 {
        self.complexity - self.stable_complexity
    }
}

/// Sound (not complete) stability test: `δ(n) < 1`.
pub fn stable_by_small_defect(n: u64, table: &ComplexityTable) -> Result<bool> {
    let c = table.complexity(n)?;
    Ok(ExactDefect::new(c as i64, n).less_than_int(1))
}

/// Scans `‖3^k n‖` for `k = 0..=horizon`.
pub fn stability_scan(
    n: u64,
    horizon: u32,
    oracle: &ComplexityOracle<'_>,
) -> Result<StabilityVerdict> {
    if n == 0 {
        return Err(Error::NonPositive);
    }
    let c0 = oracle.complexity(n);
    let mut verdict = StabilityVerdict {
        n,
        kind: VerdictKind::UnknownAtHorizon,
        k: None,
        witness_k: None,
        horizon,
        complexity: c0,
        stable_complexity: c0,
        certificate: Certificate::HorizonAssumed,
        scan: vec![c0],
    };
    if ExactDefect::new(c0 as i64, n).less_than_int(1) {
        verdict.kind = VerdictKind::StableCertified;
        verdict.k = Some(KValue {
            value: 0,
            exact: true,
        });
        verdict.certificate = Certificate::Certified;
        return Ok(verdict);
    }

    let mut last_drop = None;
    let mut value = n;
    let mut prev = c0;
    for k in 1..=horizon {
        value = value
            .checked_mul(3)
            .ok_or_else(|| Error::TooLarge(format!("{n}·3^{k}")))?;
        let m = oracle.complexity(value) - 3 * k;
        if m > prev {
            return Err(Error::Invariant(format!(
                "defect of {n}·3^{k} exceeds that of {n}·3^{}",
                k - 1
            )));
        }
        verdict.scan.push(m);
        if m < prev {
            last_drop = Some(k);
            verdict.witness_k.get_or_insert(k);
            if ExactDefect::new(m as i64, n).less_than_int(1) {
                break;
            }
        }
        prev = m;
    }

    let tail = *verdict.scan.last().unwrap();
    verdict.stable_complexity = tail;
    if let Some(drop) = last_drop {
        verdict.kind = VerdictKind::UnstableCertified;
        let certified_tail = ExactDefect::new(tail as i64, n).less_than_int(1);
        verdict.k = Some(KValue {
            value: drop,
            exact: certified_tail,
        });
        if certified_tail {
            verdict.certificate = Certificate::Certified;
        }
    }
    Ok(verdict)
}

/// Cached stability verdicts at a fixed horizon.
pub struct StabilityOracle<'a> {
    cpx: &'a ComplexityOracle<'a>,
    horizon: u32,
    cache: Mutex<HashMap<u64, StabilityVerdict>>,
}

impl<'a> StabilityOracle<'a> {
    pub fn new(cpx: &'a ComplexityOracle<'a>, horizon: u32) -> Self {
        Self {
            cpx,
            horizon,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn complexity_oracle(&self) -> &'a ComplexityOracle<'a> {
        self.cpx
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn complexity(&self, n: u64) -> u32 {
        self.cpx.complexity(n)
    }

    pub fn verdict(&self, n: u64) -> Result<StabilityVerdict> {
        if let Some(v) = self.cache.lock().unwrap().get(&n) {
            return Ok(v.clone());
        }
        let v = stability_scan(n, self.horizon, self.cpx)?;
        self.cache.lock().unwrap().insert(n, v.clone());
        Ok(v)
    }

    /// Overrides a cached verdict, e.g. after a factorization upgrade.
    pub fn record(&self, verdict: StabilityVerdict) {
        self.cache.lock().unwrap().insert(verdict.n, verdict);
    }

    /// Whether `n` is stable, under `policy`.
    pub fn is_stable(&self, n: u64, policy: Policy) -> Result<(bool, Certificate)> {
        let v = self.verdict(n)?;
        match v.kind {
            VerdictKind::StableCertified => Ok((true, Certificate::Certified)),
            VerdictKind::UnstableCertified => Ok((false, Certificate::Certified)),
            VerdictKind::UnknownAtHorizon => match policy {
                Policy::Strict => Err(unknown(n, self.horizon)),
                Policy::Assume => Ok((true, Certificate::HorizonAssumed)),
            },
        }
    }

    /// `‖n‖_st`, under `policy`.
    pub fn stable_complexity(&self, n: u64, policy: Policy) -> Result<(u32, Certificate)> {
        let v = self.verdict(n)?;
        require(&v, policy)?;
        Ok((v.stable_complexity, v.certificate))
    }

    /// `δ_st(n) = ‖n‖_st − 3·log₃ n`.
    pub fn stable_defect(&self, n: u64, policy: Policy) -> Result<(ExactDefect, Certificate)> {
        let (st, cert) = self.stable_complexity(n, policy)?;
        Ok((ExactDefect::new(st as i64, n), cert))
    }

    /// `Δ(n) = ‖n‖ − ‖n‖_st`.
    pub fn delta_gap(&self, n: u64, policy: Policy) -> Result<(u32, Certificate)> {
        let v = self.verdict(n)?;
        require(&v, policy)?;
        Ok((v.gap(), v.certificate))
    }
}

fn unknown(n: u64, horizon: u32) -> Error {
    Error::Indeterminate(format!(
        "stability of {n} is unresolved at horizon {horizon}"
    ))
}

fn require(v: &StabilityVerdict, policy: Policy) -> Result<()> {
    if policy == Policy::Strict && v.certificate != Certificate::Certified {
        return Err(unknown(v.n, v.horizon));
    }
    Ok(())
}

/// A truth value that may be unresolved under a strict policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Judgement {
    /// `None` when the fact could not be certified and the policy is strict.
    pub holds: Option<bool>,
    pub certificate: Certificate,
}

impl Judgement {
    fn certain(holds: bool) -> Self {
        Self {
            holds: Some(holds),
            certificate: Certificate::Certified,
        }
    }

    fn from(holds: bool, certificate: Certificate, policy: Policy) -> Self {
        if certificate == Certificate::Certified || policy == Policy::Assume {
            Self {
                holds: Some(holds),
                certificate,
            }
        } else {
            Self {
                holds: None,
                certificate,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Some hypothesis is false.
    NotApplicable,
    /// Hypotheses and conclusion all hold.
    Confirmed,
    /// Hypotheses hold but the conclusion fails; this indicates a bug.
    Violated,
    Indeterminate,
}

/// Both directions of the factorization/stability correspondence for
/// `N = n₁⋯n_k`:
///
/// 1. `N` stable and `‖N‖ = Σ‖nᵢ‖` imply every `nᵢ` stable;
/// 2. every `nᵢ` stable and `‖N‖_st = Σ‖nᵢ‖_st` imply `N` stable.
#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub product: u64,
    pub factors: Vec<u64>,
    pub complexity: u32,
    pub factor_complexities: Vec<u32>,
    pub stable_complexity: u32,
    pub factor_stable_complexities: Vec<u32>,
    /// `‖N‖ = Σ‖nᵢ‖` (always certified).
    pub complexity_additive: bool,
    /// `‖N‖_st = Σ‖nᵢ‖_st`.
    pub stable_additive: Judgement,
    pub product_stable: Judgement,
    pub factors_stable: Vec<Judgement>,
    pub direction1: Outcome,
    pub direction2: Outcome,
    /// Numbers whose stability this report certifies beyond their own scans.
    pub upgraded: Vec<u64>,
}

fn judge(s: &StabilityOracle<'_>, n: u64, policy: Policy) -> Result<(Judgement, u32, Certificate)> {
    let v = s.verdict(n)?;
    let stable = v.kind != VerdictKind::UnstableCertified;
    let stable_cert = if v.kind == VerdictKind::UnknownAtHorizon {
        Certificate::HorizonAssumed
    } else {
        Certificate::Certified
    };
    Ok((
        Judgement::from(stable, stable_cert, policy),
        v.stable_complexity,
        v.certificate,
    ))
}

fn implication(hyps: &[Judgement], conclusion: Judgement) -> Outcome {
    if hyps.iter().any(|h| h.holds == Some(false)) {
        return Outcome::NotApplicable;
    }
    if hyps.iter().any(|h| h.holds.is_none()) {
        return Outcome::Indeterminate;
    }
    match conclusion.holds {
        Some(true) => Outcome::Confirmed,
        Some(false) => Outcome::Violated,
        None => Outcome::Indeterminate,
    }
}

/// Checks both factorization directions on `factors` (each `> 1`).
///
/// Direction 1 doubles as a propagation rule: when `N` is certified stable
/// and `‖N‖ = Σ‖nᵢ‖`, factors whose own scans were inconclusive are recorded
/// as certified stable in `stab` and listed in [`FactorizationReport::upgraded`].
pub fn factorization_check(
    factors: &[u64],
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<FactorizationReport> {
    if factors.is_empty() {
        return Err(Error::Contract("at least one factor is required".into()));
    }
    if let Some(&bad) = factors.iter().find(|&&f| f <= 1) {
        return Err(Error::Contract(format!("factors must exceed 1, got {bad}")));
    }
    let product = factors
        .iter()
        .try_fold(1u64, |acc, &f| acc.checked_mul(f))
        .ok_or_else(|| Error::TooLarge(format!("product of {factors:?}")))?;

    let complexity = stab.complexity(product);
    let factor_complexities: Vec<u32> = factors.iter().map(|&f| stab.complexity(f)).collect();
    let complexity_additive = complexity == factor_complexities.iter().sum::<u32>();

    let (product_stable, stable_complexity, product_st_cert) = judge(stab, product, policy)?;
    let mut factors_stable = Vec::new();
    let mut factor_stable_complexities = Vec::new();
    let mut st_cert = product_st_cert;
    for &f in factors {
        let (j, st, cert) = judge(stab, f, policy)?;
        factors_stable.push(j);
        factor_stable_complexities.push(st);
        st_cert = st_cert.and(cert);
    }
    let stable_additive = Judgement::from(
        stable_complexity == factor_stable_complexities.iter().sum::<u32>(),
        st_cert,
        policy,
    );

    let all_factors = Judgement {
        holds: if factors_stable.iter().any(|j| j.holds == Some(false)) {
            Some(false)
        } else if factors_stable.iter().any(|j| j.holds.is_none()) {
            None
        } else {
            Some(true)
        },
        certificate: factors_stable
            .iter()
            .fold(Certificate::Certified, |c, j| c.and(j.certificate)),
    };

    let direction1 = implication(
        &[product_stable, Judgement::certain(complexity_additive)],
        all_factors,
    );
    let direction2 = implication(&[all_factors, stable_additive], product_stable);

    let mut upgraded = Vec::new();
    if product_stable.holds == Some(true)
        && product_stable.certificate == Certificate::Certified
        && complexity_additive
    {
        for (&f, j) in factors.iter().zip(&factors_stable) {
            if j.certificate != Certificate::Certified {
                let mut v = stab.verdict(f)?;
                v.kind = VerdictKind::StableCertified;
                v.k = Some(KValue {
                    value: 0,
                    exact: true,
                });
                v.stable_complexity = v.complexity;
                v.certificate = Certificate::Certified;
                stab.record(v);
                upgraded.push(f);
            }
        }
    }

    Ok(FactorizationReport {
        product,
        factors: factors.to_vec(),
        complexity,
        factor_complexities,
        stable_complexity,
        factor_stable_complexities,
        complexity_additive,
        stable_additive,
        product_stable,
        factors_stable,
        direction1,
        direction2,
        upgraded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> ComplexityTable {
        ComplexityTable::build(100_000).unwrap()
    }

    #[test]
    fn small_defect_test() {
        let t = setup();
        assert!(stable_by_small_defect(2, &t).unwrap());
        assert!(stable_by_small_defect(2188, &t).unwrap());
        assert!(!stable_by_small_defect(1, &t).unwrap());
        assert!(stable_by_small_defect(200_000, &t).is_err());
    }

    #[test]
    fn one_is_unstable_with_k_one() {
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let v = stability_scan(1, 2, &o).unwrap();
        assert_eq!(v.kind, VerdictKind::UnstableCertified);
        assert_eq!(
            v.k,
            Some(KValue {
                value: 1,
                exact: true
            })
        );
        assert_eq!(v.witness_k, Some(1));
        assert_eq!(v.stable_complexity, 0);
        assert_eq!(v.certificate, Certificate::Certified);
        assert_eq!(v.gap(), 1);
    }

    #[test]
    fn two_is_stable_without_scanning() {
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let v = stability_scan(2, 0, &o).unwrap();
        assert_eq!(v.kind, VerdictKind::StableCertified);
        assert_eq!(v.stable_complexity, 2);
        assert_eq!(v.scan, vec![2]);
    }

    #[test]
    fn eight_is_stable() {
        // ‖8‖ = 6 = ‖(1+1)(1+1)(1+1)‖ and δ(8) < 1.
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let v = stability_scan(8, 3, &o).unwrap();
        assert_eq!(v.complexity, 6);
        assert_eq!(v.kind, VerdictKind::StableCertified);
        assert_eq!(v.stable_complexity, 6);
        assert_eq!(v.gap(), 0);
    }

    #[test]
    fn uncertified_tail() {
        // 107: ‖107‖ = 16, ‖321‖ = 18 (drop of 1), but δ(321) > 1.
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let v = stability_scan(107, 6, &o).unwrap();
        assert_eq!(v.kind, VerdictKind::UnstableCertified);
        assert_eq!(v.witness_k, Some(1));
        assert_eq!(
            v.k,
            Some(KValue {
                value: 1,
                exact: false
            })
        );
        assert_eq!(v.stable_complexity, 15);
        assert_eq!(v.certificate, Certificate::HorizonAssumed);
    }

    #[test]
    fn oracle_policies() {
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let s = StabilityOracle::new(&o, 6);
        assert_eq!(
            s.stable_complexity(1, Policy::Strict).unwrap(),
            (0, Certificate::Certified)
        );
        assert_eq!(s.delta_gap(1, Policy::Strict).unwrap().0, 1);
        let (d, _) = s.stable_defect(1, Policy::Strict).unwrap();
        assert_eq!(d, ExactDefect::integer(0));
        assert!(matches!(
            s.stable_complexity(107, Policy::Strict),
            Err(Error::Indeterminate(_))
        ));
        assert_eq!(
            s.stable_complexity(107, Policy::Assume).unwrap(),
            (15, Certificate::HorizonAssumed)
        );
        // 856 shows no drop within the horizon and has δ > 1.
        assert!(matches!(
            s.is_stable(856, Policy::Strict),
            Err(Error::Indeterminate(_))
        ));
        assert_eq!(
            s.is_stable(856, Policy::Assume).unwrap(),
            (true, Certificate::HorizonAssumed)
        );
    }

    #[test]
    fn factorization_856() {
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let s = StabilityOracle::new(&o, DEFAULT_HORIZON);
        let r = factorization_check(&[8, 107], &s, Policy::Assume).unwrap();
        assert_eq!(r.product, 856);
        assert!(!r.complexity_additive);
        assert_eq!(r.stable_additive.holds, Some(true));
        assert_eq!(r.stable_complexity, 21);
        assert_eq!(r.factor_stable_complexities, vec![6, 15]);
        let strict = factorization_check(&[8, 107], &s, Policy::Strict).unwrap();
        assert_eq!(strict.stable_additive.holds, None);
    }

    #[test]
    fn factorization_six() {
        let t = setup();
        let o = ComplexityOracle::new(&t);
        let s = StabilityOracle::new(&o, DEFAULT_HORIZON);
        let r = factorization_check(&[2, 3], &s, Policy::Strict).unwrap();
        assert!(r.complexity_additive);
        assert_eq!(r.direction1, Outcome::Confirmed);
        assert_eq!(r.direction2, Outcome::Confirmed);
        assert!(matches!(
            factorization_check(&[1, 6], &s, Policy::Strict),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn overflow_is_a_resource_error() {
        // δ(11·3^38) = δ(11) > 1, and 11·3^39 no longer fits in u64.
        let o = ComplexityOracle::standalone();
        let n = 11 * 3u64.pow(38);
        assert!(matches!(stability_scan(n, 3, &o), Err(Error::TooLarge(_))));
    }
}
