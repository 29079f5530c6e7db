//! The defect set at finite truncations.
//!
//! Nothing here assigns ordinal positions: a finite enumeration cannot
//! certify an index like `ω·2 + 1`. Each point instead carries its limit
//! degree `Δ(n) = ‖n‖ − ‖n‖_st`, which is 0 for isolated points of the closure
//! and `k ≥ 1` for limit points of degree `k`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::complexity::ComplexityTable;
use crate::defect::{defect_of, DefectBound, ExactDefect};
use crate::error::{Error, Result};
use crate::stability::{Certificate, Policy, StabilityOracle};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Member {
    pub n: u64,
    pub complexity: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub value: ExactDefect,
    /// Every `n ≤ N` with this defect, ascending; the first is the leader.
    pub members: Vec<Member>,
    /// `‖n‖ mod 3`.
    pub class: u8,
    /// `Δ` of the members, once annotated.
    pub limit_degree: Option<u32>,
    pub stable_certificate: Option<Certificate>,
}

impl CatalogEntry {
    pub fn representative(&self) -> &Member {
        &self.members[0]
    }

    pub fn is_stable(&self) -> Option<bool> {
        self.limit_degree.map(|k| k == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectCatalog {
    pub truncation: u64,
    pub bound: DefectBound,
    pub entries: Vec<CatalogEntry>,
}

/// Distinct values `δ(n) ≤ s` over `n ≤ N`, in exact increasing order.
///
/// Two defects are equal exactly when their canonical `(C, n)` forms agree,
/// so grouping by the canonical form merges the families `n, 3n, 9n, …`.
pub fn enumerate_defects(
    limit: u64,
    s: &DefectBound,
    table: &ComplexityTable,
) -> Result<DefectCatalog> {
    if limit > table.limit() {
        return Err(table.range_error(limit));
    }
    let hits: Vec<(u64, ExactDefect)> = (1..=limit)
        .into_par_iter()
        .map(|n| defect_of(n, table).map(|d| (n, d)))
        .filter(|r| r.as_ref().map_or(true, |(_, d)| s.admits(d)))
        .collect::<Result<_>>()?;
    let mut groups: HashMap<ExactDefect, Vec<Member>> = HashMap::new();
    for (n, d) in hits {
        groups.entry(d).or_default().push(Member {
            n,
            complexity: table.get(n).expect("in range"),
        });
    }
    let mut entries: Vec<CatalogEntry> = groups
        .into_iter()
        .map(|(value, mut members)| {
            members.sort_by_key(|m| m.n);
            CatalogEntry {
                class: value.congruence_class(),
                value,
                members,
                limit_degree: None,
                stable_certificate: None,
            }
        })
        .collect();
    entries.par_sort_by(|a, b| a.value.cmp(&b.value));
    Ok(DefectCatalog {
        truncation: limit,
        bound: s.clone(),
        entries,
    })
}

impl DefectCatalog {
    /// Fills in limit degrees from the leaders' stability verdicts.
    pub fn annotate(&mut self, stab: &StabilityOracle<'_>, policy: Policy) -> Result<()> {
        for e in &mut self.entries {
            let (k, cert) = classify_limit_degree(e.representative().n, stab, policy)?;
            e.limit_degree = Some(k);
            e.stable_certificate = Some(cert);
        }
        Ok(())
    }

    /// Columns `n, C, class, approx_value, limit_degree, stable_certificate`,
    /// one row per distinct value, keyed by its leader.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "n",
            "C",
            "class",
            "approx_value",
            "limit_degree",
            "stable_certificate",
        ])?;
        for e in &self.entries {
            let rep = e.representative();
            let cert = match e.stable_certificate {
                Some(Certificate::Certified) => "certified",
                Some(Certificate::HorizonAssumed) => "horizon-assumed",
                None => "",
            };
            out.write_record([
                rep.n.to_string(),
                rep.complexity.to_string(),
                e.class.to_string(),
                e.value.approx_string(),
                e.limit_degree.map(|k| k.to_string()).unwrap_or_default(),
                cert.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `Δ(n)`: 0 when `δ(n)` is isolated in the closure, `k ≥ 1` when it is a
/// limit point of degree `k`.
pub fn classify_limit_degree(
    n: u64,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<(u32, Certificate)> {
    stab.delta_gap(n, policy)
}

/// Whether `C − 3·log₃ n` lies in the closure of the defect set, i.e.
/// `C ≥ ‖n‖`.
pub fn closure_membership(c: i64, n: u64, table: &ComplexityTable) -> Result<bool> {
    Ok(c >= table.complexity(n)? as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessReport {
    pub pass: bool,
    pub entries_checked: usize,
    pub problems: Vec<String>,
}

/// Checks that no value carries two classes: each entry's members all have
/// the entry's value and `‖n‖ ≡ class (mod 3)`, and values strictly increase
/// so no value is listed twice.
pub fn check_class_disjointness(catalog: &DefectCatalog) -> DisjointnessReport {
    let mut problems = Vec::new();
    for (i, e) in catalog.entries.iter().enumerate() {
        if e.members.is_empty() {
            problems.push(format!("entry {i} has no members"));
        }
        for m in &e.members {
            if ExactDefect::new(m.complexity as i64, m.n) != e.value {
                problems.push(format!("δ({}) differs from the value of entry {i}", m.n));
            }
            if (m.complexity % 3) as u8 != e.class {
                problems.push(format!(
                    "‖{}‖ = {} is not in class {} of entry {i}",
                    m.n, m.complexity, e.class
                ));
            }
        }
        if i > 0 {
            let prev = &catalog.entries[i - 1];
            match prev.value.cmp(&e.value) {
                Ordering::Less => {}
                Ordering::Equal => problems.push(format!(
                    "entries {} and {i} share a value (classes {} and {})",
                    i - 1,
                    prev.class,
                    e.class
                )),
                Ordering::Greater => {
                    problems.push(format!("entries {} and {i} are out of order", i - 1))
                }
            }
        }
    }
    DisjointnessReport {
        pass: problems.is_empty(),
        entries_checked: catalog.entries.len(),
        problems,
    }
}

/// `m = b(a·3^k + 1)·3^ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyWitness {
    pub a: u64,
    pub b: u64,
    pub k: u32,
    pub l: u32,
}

/// Every way to write `m = b(a·3^k + 1)·3^ℓ` for the given `(a, b)`.
///
/// Both loops stop as soon as the value exceeds `m`, so the search is
/// exhaustive.
pub fn family_witnesses(a: u64, b: u64, m: u64) -> Vec<FamilyWitness> {
    let m = m as u128;
    let mut out = Vec::new();
    let mut k = 0u32;
    let mut a3k = a as u128;
    loop {
        let base = b as u128 * (a3k + 1);
        if base > m {
            break;
        }
        let mut v = base;
        let mut l = 0u32;
        while v <= m {
            if v == m {
                out.push(FamilyWitness { a, b, k, l });
            }
            v *= 3;
            l += 1;
        }
        a3k *= 3;
        k += 1;
    }
    out
}

/// All witnesses `m = b(a·3^k + 1)·3^ℓ` over every factorization `ab = q`,
/// including `b = 1` and `a = 1`.
pub fn counterexample_check(q: u64, m: u64) -> Result<Vec<FamilyWitness>> {
    if q == 0 || m == 0 {
        return Err(Error::NonPositive);
    }
    Ok((1..=q)
        .filter(|b| q.is_multiple_of(*b))
        .flat_map(|b| family_witnesses(q / b, b, m))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMode {
    /// `δ(b(a·3^k+1))`.
    Plain,
    /// `δ_st(b(a·3^k+1))`.
    Stable,
}

impl std::str::FromStr for SeriesMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(SeriesMode::Plain),
            "stable" => Ok(SeriesMode::Stable),
            other => Err(Error::Contract(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesTerm {
    pub k: u32,
    pub n: u64,
    /// `‖n‖` in plain mode, `‖n‖_st` in stable mode.
    pub complexity: u32,
    pub value: ExactDefect,
    pub class: u8,
    /// Complexity below the naive `S + 3k + 1`.
    pub exceptional: bool,
    /// Sign of `value − target`.
    pub versus_target: i8,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub a: u64,
    pub b: u64,
    pub mode: SeriesMode,
    /// `S`: `‖a‖ + ‖b‖` (with `‖b‖` dropped for `b = 1`) in plain mode,
    /// `‖a‖_st + ‖b‖_st` in stable mode.
    pub naive_base: u32,
    /// `δ_st(ab) + 1`, as `(‖ab‖_st + 1, ab)`.
    pub target: ExactDefect,
    pub target_certificate: Certificate,
    pub terms: Vec<SeriesTerm>,
    pub strictly_increasing: bool,
    pub bounded_by_target: bool,
    pub certificate: Certificate,
}

fn sign(o: Ordering) -> i8 {
    match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// The series of (stable) defects of `b(a·3^k + 1)` for `k ≤ k_max` against
/// its limit `δ_st(ab) + 1`.
pub fn convergence_series(
    a: u64,
    b: u64,
    k_max: u32,
    stab: &StabilityOracle<'_>,
    policy: Policy,
    mode: SeriesMode,
) -> Result<ConvergenceReport> {
    if a == 0 || b == 0 {
        return Err(Error::NonPositive);
    }
    let too_large = || Error::TooLarge(format!("{b}({a}·3^{k_max}+1)"));
    let ab = a.checked_mul(b).ok_or_else(too_large)?;
    let (st_ab, target_certificate) = stab.stable_complexity(ab, policy)?;
    let target = ExactDefect::new(st_ab as i64 + 1, ab);

    let mut certificate = target_certificate;
    let naive_base = match mode {
        SeriesMode::Plain => stab.complexity(a) + if b > 1 { stab.complexity(b) } else { 0 },
        SeriesMode::Stable => {
            let (sa, ca) = stab.stable_complexity(a, policy)?;
            let (sb, cb) = stab.stable_complexity(b, policy)?;
            certificate = certificate.and(ca).and(cb);
            sa + sb
        }
    };

    let mut terms = Vec::new();
    for k in 0..=k_max {
        let n = 3u64
            .checked_pow(k)
            .and_then(|p| p.checked_mul(a))
            .and_then(|x| x.checked_add(1))
            .and_then(|x| x.checked_mul(b))
            .ok_or_else(too_large)?;
        let (complexity, cert) = match mode {
            SeriesMode::Plain => (stab.complexity(n), Certificate::Certified),
            SeriesMode::Stable => stab.stable_complexity(n, policy)?,
        };
        certificate = certificate.and(cert);
        let value = ExactDefect::new(complexity as i64, n);
        terms.push(SeriesTerm {
            k,
            n,
            complexity,
            class: (complexity % 3) as u8,
            exceptional: complexity < naive_base + 3 * k + 1,
            versus_target: sign(value.cmp(&target)),
            value,
            certificate: cert,
        });
    }
    let strictly_increasing = terms.windows(2).all(|w| w[0].value < w[1].value);
    let bounded_by_target = terms.iter().all(|t| t.versus_target < 0);
    Ok(ConvergenceReport {
        a,
        b,
        mode,
        naive_base,
        target,
        target_certificate,
        terms,
        strictly_increasing,
        bounded_by_target,
        certificate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypotheses {
    pub b_greater_than_one: bool,
    /// `‖a‖ + ‖b‖ = ‖ab‖ + 1`.
    pub complexity_relation: bool,
    pub ab_stable: Option<bool>,
    pub a_stable: Option<bool>,
    pub b_stable: Option<bool>,
    pub certificate: Certificate,
}

impl Hypotheses {
    fn hold(&self) -> bool {
        self.b_greater_than_one
            && self.complexity_relation
            && self.ab_stable == Some(true)
            && self.a_stable == Some(true)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationRow {
    pub k: u32,
    pub l: u32,
    pub n: u64,
    pub complexity: u32,
    /// `‖a‖ + ‖b‖ + 3k + 3ℓ + 1`.
    pub predicted: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub a: u64,
    pub b: u64,
    pub hypotheses: Hypotheses,
    /// Hypotheses hold and the scan ran.
    pub applicable: bool,
    /// Why the scan did not run.
    pub precondition: Option<String>,
    /// `ℓ > 0` rows are scanned only when `b` is stable too.
    pub rows: Vec<StabilizationRow>,
    /// Least `K` such that every scanned row with `k ≥ K` matches the
    /// prediction; `None` if the last scanned `k` still misses it.
    #[serde(rename = "K_observed")]
    pub k_observed: Option<u32>,
    /// Rows above the prediction. The prediction is also an upper bound for
    /// every `k`, so any entry here indicates a bug.
    pub violations: Vec<StabilizationRow>,
    pub certificate: Certificate,
}

fn judged(
    stab: &StabilityOracle<'_>,
    n: u64,
    policy: Policy,
    cert: &mut Certificate,
) -> Result<Option<bool>> {
    match stab.is_stable(n, policy) {
        Ok((s, c)) => {
            *cert = cert.and(c);
            Ok(Some(s))
        }
        Err(Error::Indeterminate(_)) => {
            *cert = cert.and(Certificate::HorizonAssumed);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Scans `‖b(a·3^k + 1)·3^ℓ‖` against `‖a‖ + ‖b‖ + 3k + 3ℓ + 1` when `ab` and
/// `a` are stable, `‖a‖ + ‖b‖ = ‖ab‖ + 1` and `b > 1`.
pub fn stabilization_check(
    a: u64,
    b: u64,
    k_max: u32,
    l_max: u32,
    stab: &StabilityOracle<'_>,
    policy: Policy,
) -> Result<StabilizationReport> {
    if a == 0 || b == 0 {
        return Err(Error::NonPositive);
    }
    let ab = a
        .checked_mul(b)
        .ok_or_else(|| Error::TooLarge(format!("{a}·{b}")))?;
    let (ca, cb, cab) = (stab.complexity(a), stab.complexity(b), stab.complexity(ab));
    let mut cert = Certificate::Certified;
    let b_greater_than_one = b > 1;
    let complexity_relation = ca + cb == cab + 1;
    let (ab_stable, a_stable, b_stable) = if b_greater_than_one && complexity_relation {
        (
            judged(stab, ab, policy, &mut cert)?,
            judged(stab, a, policy, &mut cert)?,
            judged(stab, b, policy, &mut cert)?,
        )
    } else {
        (None, None, None)
    };
    let hypotheses = Hypotheses {
        b_greater_than_one,
        complexity_relation,
        ab_stable,
        a_stable,
        b_stable,
        certificate: cert,
    };
    let mut report = StabilizationReport {
        a,
        b,
        applicable: false,
        precondition: None,
        rows: Vec::new(),
        k_observed: None,
        violations: Vec::new(),
        certificate: cert,
        hypotheses,
    };
    if !report.hypotheses.hold() {
        let h = &report.hypotheses;
        report.precondition = Some(if !h.b_greater_than_one {
            "b > 1 is required".to_string()
        } else if !h.complexity_relation {
            format!("‖a‖ + ‖b‖ = {} but ‖ab‖ + 1 = {}", ca + cb, cab + 1)
        } else if h.ab_stable.is_none() || h.a_stable.is_none() {
            format!(
                "stability of ab or a is unresolved at horizon {}",
                stab.horizon()
            )
        } else if h.ab_stable == Some(false) {
            format!("ab = {ab} is not stable")
        } else {
            format!("a = {a} is not stable")
        });
        return Ok(report);
    }
    report.applicable = true;
    let l_top = if b_stable == Some(true) { l_max } else { 0 };
    let mut last_miss: Option<u32> = None;
    for k in 0..=k_max {
        for l in 0..=l_top {
            let n = 3u64
                .checked_pow(k)
                .and_then(|p| p.checked_mul(a))
                .and_then(|x| x.checked_add(1))
                .and_then(|x| x.checked_mul(b))
                .and_then(|x| x.checked_mul(3u64.checked_pow(l)?))
                .ok_or_else(|| Error::TooLarge(format!("{b}({a}·3^{k}+1)·3^{l}")))?;
            let row = StabilizationRow {
                k,
                l,
                n,
                complexity: stab.complexity(n),
                predicted: ca + cb + 3 * k + 3 * l + 1,
            };
            if row.complexity != row.predicted {
                last_miss = Some(k);
            }
            if row.complexity > row.predicted {
                report.violations.push(row.clone());
            }
            report.rows.push(row);
        }
    }
    report.k_observed = match last_miss {
        None => Some(0),
        Some(k) if k < k_max => Some(k + 1),
        Some(_) => None,
    };
    Ok(report)
}

/// Pairs `(a, b)` with `ab ≤ limit` meeting every hypothesis, certified.
pub fn stabilization_instances(limit: u64, stab: &StabilityOracle<'_>) -> Result<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for ab in 2..=limit {
        let cab = stab.complexity(ab);
        for b in 2..=ab {
            if ab % b != 0 {
                continue;
            }
            let a = ab / b;
            if stab.complexity(a) + stab.complexity(b) != cab + 1 {
                continue;
            }
            let ok = |n| matches!(stab.is_stable(n, Policy::Strict), Ok((true, _)));
            if ok(ab) && ok(a) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}
