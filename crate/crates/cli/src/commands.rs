use std::fmt::Write as _;

use anyhow::{Context, Result};
use intcpx::defect::defect_of;
use intcpx::ldpoly::augment;
use intcpx::ldpoly::{insubstantiality_gap, substantiality, LowDefectExpr, LowDefectPair};
use intcpx::represent::{
    covering_pairs, exceptional_set, leaders, minimal_k_degree1, read_covering_file,
    verify_covering,
};
use intcpx::stability::KValue;
use intcpx::structure::{
    convergence_series, counterexample_check, enumerate_defects, family_witnesses,
    stabilization_check, stabilization_instances, FamilyWitness,
};
use intcpx::{
    Certificate, ComplexityOracle, ComplexityTable, ExactDefect, Policy, StabilityOracle,
    VerdictKind,
};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{Command, LdpCmd, PairArgs};
use crate::output::{Csv, Report, Status};

/// Everything a table-backed command may need.
pub struct Ctx<'a> {
    pub table: &'a ComplexityTable,
    pub cpx: &'a ComplexityOracle<'a>,
    pub stab: &'a StabilityOracle<'a>,
    pub policy: Policy,
}

/// One JSON value per input, unwrapped when there is a single input.
fn per_input(values: Vec<serde_json::Value>) -> serde_json::Value {
    if values.len() == 1 {
        values.into_iter().next().unwrap()
    } else {
        serde_json::Value::Array(values)
    }
}

fn cert_name(c: Certificate) -> &'static str {
    match c {
        Certificate::Certified => "certified",
        Certificate::HorizonAssumed => "horizon-assumed",
    }
}

fn k_text(k: Option<KValue>) -> String {
    match k {
        Some(KValue { value, exact: true }) => format!("K={value}"),
        Some(KValue {
            value,
            exact: false,
        }) => format!("K>={value}"),
        None => "K=?".into(),
    }
}

fn pair(args: &PairArgs, table: &ComplexityTable) -> Result<LowDefectPair> {
    let e = LowDefectExpr::parse(&args.expression)?;
    Ok(match args.c {
        Some(c) => LowDefectPair::from_expr_with_c(&e, c, table)?,
        None => LowDefectPair::from_tree(&e.to_tree()?, table)?,
    })
}

/// Commands that never touch the complexity table.
pub fn run_tableless(cmd: &Command) -> Option<Result<Report>> {
    match cmd {
        Command::Counterexample { q, a, b, m } => Some(counterexample(*q, *a, *b, *m)),
        _ => None,
    }
}

fn counterexample(q: Option<u64>, a: Option<u64>, b: Option<u64>, m: u64) -> Result<Report> {
    let witnesses: Vec<FamilyWitness> = match (q, a, b) {
        (Some(q), _, _) => counterexample_check(q, m)?,
        (None, Some(a), Some(b)) => {
            anyhow::ensure!(a > 0 && b > 0, intcpx::Error::NonPositive);
            family_witnesses(a, b, m)
        }
        _ => unreachable!("argument parser enforces --q or both --a and --b"),
    };
    let mut text = String::new();
    if witnesses.is_empty() {
        text.push_str("none\n");
    }
    let mut csv = Csv::new(&["m", "a", "b", "k", "l"]);
    for w in &witnesses {
        writeln!(text, "{m} = {}({}·3^{}+1)·3^{}", w.b, w.a, w.k, w.l)?;
        csv.row(vec![
            m.to_string(),
            w.a.to_string(),
            w.b.to_string(),
            w.k.to_string(),
            w.l.to_string(),
        ]);
    }
    let json = json!({ "q": q, "a": a, "b": b, "m": m, "witnesses": witnesses, "none": witnesses.is_empty() });
    Ok(Report::new(&json, text)?
        .with_csv(csv)?
        .named("family non-representation")
        .check(witnesses.is_empty()))
}

pub fn run(cmd: &Command, ctx: &Ctx<'_>) -> Result<Report> {
    let (table, stab, policy) = (ctx.table, ctx.stab, ctx.policy);
    match cmd {
        Command::Table(_) | Command::Counterexample { .. } => {
            unreachable!("dispatched before a context exists")
        }

        Command::Cpx { n } => {
            anyhow::ensure!(n.iter().all(|&x| x > 0), intcpx::Error::NonPositive);
            let values: Vec<u32> = n.par_iter().map(|&x| ctx.cpx.complexity(x)).collect();
            let mut csv = Csv::new(&["n", "complexity"]);
            let mut text = String::new();
            let mut json = Vec::new();
            for (&x, &c) in n.iter().zip(&values) {
                writeln!(text, "{c}")?;
                csv.row(vec![x.to_string(), c.to_string()]);
                json.push(json!({ "n": x, "complexity": c }));
            }
            Report::new(&per_input(json), text)?.with_csv(csv)
        }

        Command::Expr { n } => {
            let e = table.best_expression(*n)?;
            let c = table.complexity(*n)?;
            let json = json!({ "n": n, "complexity": c, "expression": e.to_string() });
            Report::new(&json, format!("{e}\n"))
        }

        Command::Defect { n } => {
            let values: Vec<ExactDefect> = n
                .par_iter()
                .map(|&x| defect_of(x, table))
                .collect::<intcpx::Result<_>>()?;
            let mut csv = Csv::new(&["n", "complexity", "C", "m", "approx"]);
            let mut text = String::new();
            let mut json = Vec::new();
            for (&x, d) in n.iter().zip(&values) {
                let c = table.complexity(x)?;
                writeln!(text, "{d}")?;
                csv.row(vec![
                    x.to_string(),
                    c.to_string(),
                    d.c().to_string(),
                    d.n().to_string(),
                    d.approx_string(),
                ]);
                json.push(json!({ "n": x, "complexity": c, "defect": d }));
            }
            Report::new(&per_input(json), text)?.with_csv(csv)
        }

        Command::Stable { n } => {
            let verdicts = n
                .par_iter()
                .map(|&x| stab.verdict(x))
                .collect::<intcpx::Result<Vec<_>>>()?;
            let mut text = String::new();
            let mut csv = Csv::new(&[
                "n",
                "kind",
                "K",
                "K_exact",
                "complexity",
                "stable_complexity",
                "certificate",
                "horizon",
            ]);
            let mut unknown = false;
            for v in &verdicts {
                unknown |= v.kind == VerdictKind::UnknownAtHorizon;
                writeln!(
                    text,
                    "{} {:?} {} complexity={} stable_complexity={} ({})",
                    v.n,
                    v.kind,
                    k_text(v.k),
                    v.complexity,
                    v.stable_complexity,
                    cert_name(v.certificate)
                )?;
                csv.row(vec![
                    v.n.to_string(),
                    format!("{:?}", v.kind),
                    v.k.map(|k| k.value.to_string()).unwrap_or_default(),
                    v.k.map(|k| k.exact.to_string()).unwrap_or_default(),
                    v.complexity.to_string(),
                    v.stable_complexity.to_string(),
                    cert_name(v.certificate).into(),
                    v.horizon.to_string(),
                ]);
            }
            let json: Vec<_> = verdicts
                .iter()
                .map(serde_json::to_value)
                .collect::<Result<_, _>>()?;
            let status = if unknown && policy == Policy::Strict {
                Status::Indeterminate
            } else {
                Status::Ok
            };
            Ok(Report::new(&per_input(json), text)?
                .with_csv(csv)?
                .with_status(status))
        }

        Command::KOf { n } => {
            let mut text = String::new();
            let mut csv = Csv::new(&["n", "K", "exact", "certificate"]);
            let mut json = Vec::new();
            let mut status = Status::Ok;
            for &x in n {
                let v = stab.verdict(x)?;
                let (k, cert) = match (v.kind, v.k) {
                    (VerdictKind::StableCertified, _) => (
                        KValue {
                            value: 0,
                            exact: true,
                        },
                        Certificate::Certified,
                    ),
                    (VerdictKind::UnstableCertified, Some(k)) => (k, v.certificate),
                    // No drop seen within the horizon.
                    _ => (
                        KValue {
                            value: 0,
                            exact: false,
                        },
                        Certificate::HorizonAssumed,
                    ),
                };
                if cert != Certificate::Certified && policy == Policy::Strict {
                    status = Status::Indeterminate;
                }
                writeln!(text, "{x} {} ({})", k_text(Some(k)), cert_name(cert))?;
                csv.row(vec![
                    x.to_string(),
                    k.value.to_string(),
                    k.exact.to_string(),
                    cert_name(cert).into(),
                ]);
                json.push(json!({ "n": x, "K": k.value, "exact": k.exact, "certificate": cert }));
            }
            Ok(Report::new(&per_input(json), text)?
                .with_csv(csv)?
                .with_status(status))
        }

        Command::StableCpx { n } => {
            let mut text = String::new();
            let mut csv = Csv::new(&[
                "n",
                "stable_complexity",
                "stable_defect_approx",
                "certificate",
            ]);
            let mut json = Vec::new();
            for &x in n {
                let (st, cert) = stab.stable_complexity(x, policy)?;
                let d = ExactDefect::new(st as i64, x);
                writeln!(text, "{st} ({})", cert_name(cert))?;
                csv.row(vec![
                    x.to_string(),
                    st.to_string(),
                    d.approx_string(),
                    cert_name(cert).into(),
                ]);
                json.push(json!({ "n": x, "stable_complexity": st, "stable_defect": d, "certificate": cert }));
            }
            Report::new(&per_input(json), text)?.with_csv(csv)
        }

        Command::Ldp(sub) => ldp(sub, ctx),

        Command::Exceptions {
            pair: pa,
            bounds,
            mode,
        } => {
            let p = pair(pa, table)?;
            let set = exceptional_set(&p, bounds, stab, policy, *mode)?;
            let mut csv = Csv::new(&["tuple"]);
            let mut text = format!(
                "{} exceptional of {} scanned ({})\n",
                set.tuples.len(),
                set.scanned,
                cert_name(set.certificate)
            );
            for t in &set.tuples {
                let s = t
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                writeln!(text, "{s}")?;
                csv.row(vec![s]);
            }
            let json = json!({ "pair": p, "bounds": bounds, "result": set });
            Ok(Report::new(&json, text)?
                .with_csv(csv)?
                .named("exceptional set"))
        }

        Command::MinK {
            pair: pa,
            k_max,
            mode,
        } => {
            let p = pair(pa, table)?;
            let r = minimal_k_degree1(&p, *k_max, stab, policy, *mode)?;
            let k = r
                .k_observed
                .map_or_else(|| format!("none up to {k_max}"), |k| k.to_string());
            let text = format!(
                "K_observed={k} exceptions={:?} ({})\n",
                r.exceptions,
                cert_name(r.certificate)
            );
            let json = json!({ "pair": p, "result": r });
            Ok(Report::new(&json, text)?.named("degree-one stabilization threshold"))
        }

        Command::Leaders { up_to } => {
            let ls = leaders(*up_to, table)?;
            let mut csv = Csv::new(&["n", "complexity", "defect_approx"]);
            let mut text = String::new();
            let mut json = Vec::new();
            for &n in &ls {
                let d = defect_of(n, table)?;
                writeln!(text, "{n}")?;
                csv.row(vec![
                    n.to_string(),
                    table.complexity(n)?.to_string(),
                    d.approx_string(),
                ]);
                json.push(json!({ "n": n, "defect": d }));
            }
            Report::new(&json, text)?.with_csv(csv)
        }

        Command::VerifyCovering { file, s, n } => {
            let entries =
                read_covering_file(file).with_context(|| format!("reading {}", file.display()))?;
            let pairs = covering_pairs(&entries, table)?;
            let r = verify_covering(&pairs, s, *n, table)?;
            let mut text = format!(
                "{}: {} candidates, {} leaders with defect ≤ {} up to {}\n",
                if r.pass { "pass" } else { "FAIL" },
                pairs.len(),
                r.leaders_checked,
                s,
                n
            );
            for v in &r.defect_bound_violations {
                writeln!(
                    text,
                    "candidate {} exceeds the bound: δ(f,C) = {}",
                    v.index, v.delta
                )?;
            }
            for u in &r.uncovered_leaders {
                writeln!(
                    text,
                    "leader {} not efficiently represented: δ = {}",
                    u.n, u.delta
                )?;
            }
            let mut csv = Csv::new(&["kind", "item", "defect_approx"]);
            for v in &r.defect_bound_violations {
                csv.row(vec![
                    "bound".into(),
                    v.index.to_string(),
                    v.delta.approx_string(),
                ]);
            }
            for u in &r.uncovered_leaders {
                csv.row(vec![
                    "uncovered".into(),
                    u.n.to_string(),
                    u.delta.approx_string(),
                ]);
            }
            let pass = r.pass;
            Ok(Report::new(&r, text)?
                .with_csv(csv)?
                .named("good covering at truncation")
                .check(pass))
        }

        Command::Enumerate { s, n, annotate } => {
            let mut cat = enumerate_defects(*n, s, table)?;
            if *annotate {
                cat.annotate(stab, policy)?;
            }
            let mut text = String::new();
            for e in &cat.entries {
                let rep = e.representative();
                write!(text, "{} {} class={}", rep.n, e.value, e.class)?;
                if let (Some(k), Some(c)) = (e.limit_degree, e.stable_certificate) {
                    write!(text, " limit_degree={k} ({})", cert_name(c))?;
                }
                text.push('\n');
            }
            let mut raw = Vec::new();
            cat.write_csv(&mut raw)?;
            Ok(Report::new(&cat, text)?.with_raw_csv(String::from_utf8(raw)?))
        }

        Command::Converge { a, b, k_max, mode } => {
            let r = convergence_series(*a, *b, *k_max, stab, policy, *mode)?;
            let mut text = format!("target {}\n", r.target);
            let mut csv = Csv::new(&[
                "k",
                "n",
                "complexity",
                "C",
                "m",
                "approx",
                "class",
                "exceptional",
                "versus_target",
            ]);
            for t in &r.terms {
                writeln!(
                    text,
                    "k={} n={} complexity={} δ={} class={}{}",
                    t.k,
                    t.n,
                    t.complexity,
                    t.value,
                    t.class,
                    if t.exceptional { " exceptional" } else { "" }
                )?;
                csv.row(vec![
                    t.k.to_string(),
                    t.n.to_string(),
                    t.complexity.to_string(),
                    t.value.c().to_string(),
                    t.value.n().to_string(),
                    t.value.approx_string(),
                    t.class.to_string(),
                    t.exceptional.to_string(),
                    t.versus_target.to_string(),
                ]);
            }
            writeln!(
                text,
                "strictly_increasing={} bounded_by_target={} ({})",
                r.strictly_increasing,
                r.bounded_by_target,
                cert_name(r.certificate)
            )?;
            let pass = r.bounded_by_target;
            Ok(Report::new(&r, text)?
                .with_csv(csv)?
                .named("convergence below the stable limit")
                .check(pass))
        }

        Command::Stabilization {
            instances: Some(limit),
            ..
        } => {
            let found = stabilization_instances(*limit, stab)?;
            let mut csv = Csv::new(&["a", "b"]);
            let mut text = String::new();
            for (a, b) in &found {
                writeln!(text, "a={a} b={b}")?;
                csv.row(vec![a.to_string(), b.to_string()]);
            }
            let json: Vec<_> = found
                .iter()
                .map(|(a, b)| json!({ "a": a, "b": b }))
                .collect();
            Report::new(&json, text)?.with_csv(csv)
        }

        Command::Stabilization {
            a, b, k_max, l_max, ..
        } => {
            let (a, b) = (a.expect("required"), b.expect("required"));
            let r = stabilization_check(a, b, *k_max, *l_max, stab, policy)?;
            let mut csv = Csv::new(&["k", "l", "n", "complexity", "predicted"]);
            for row in &r.rows {
                csv.row(vec![
                    row.k.to_string(),
                    row.l.to_string(),
                    row.n.to_string(),
                    row.complexity.to_string(),
                    row.predicted.to_string(),
                ]);
            }
            let text = if let Some(why) = &r.precondition {
                format!("not applicable: {why}\n")
            } else {
                let k = r
                    .k_observed
                    .map_or_else(|| format!("none up to {k_max}"), |k| k.to_string());
                format!(
                    "K_observed={k} rows={} violations={} ({})\n",
                    r.rows.len(),
                    r.violations.len(),
                    cert_name(r.certificate)
                )
            };
            let h = &r.hypotheses;
            let unresolved = h.b_greater_than_one
                && h.complexity_relation
                && (h.ab_stable.is_none() || h.a_stable.is_none());
            let status = if unresolved && policy == Policy::Strict {
                Status::Indeterminate
            } else if r.violations.is_empty() {
                Status::Ok
            } else {
                Status::Failed
            };
            Ok(Report::new(&r, text)?
                .with_csv(csv)?
                .named("degree-one stabilization")
                .with_status(status))
        }
    }
}

fn ldp(cmd: &LdpCmd, ctx: &Ctx<'_>) -> Result<Report> {
    let (table, stab, policy) = (ctx.table, ctx.stab, ctx.policy);
    match cmd {
        LdpCmd::Parse { expression } => {
            let e = LowDefectExpr::parse(expression)?;
            let tree = e.to_tree()?;
            let poly = e.to_poly()?;
            let tree_c = tree.complexity(table)?;
            let expr_c = e.complexity(table)?;
            let json = json!({
                "expression": e.to_string(),
                "poly": poly.to_string(),
                "augmented": augment(&poly).to_string(),
                "degree": poly.degree(),
                "leading_coefficient": poly.leading_coefficient().to_string(),
                "C": tree_c,
                "expression_complexity": expr_c,
                "tree": tree,
            });
            let text = format!(
                "{poly}\ndegree={} leading_coefficient={} C={tree_c} expression_complexity={expr_c}\n",
                poly.degree(),
                poly.leading_coefficient()
            );
            Report::new(&json, text)
        }
        LdpCmd::Eval { expression, at } => {
            let poly = LowDefectExpr::parse(expression)?.to_poly()?;
            let v = poly.evaluate(at)?;
            let json = json!({ "poly": poly.to_string(), "at": at, "value": v.to_string() });
            Report::new(&json, format!("{v}\n"))
        }
        LdpCmd::Delta { pair: pa, at } => {
            let p = pair(pa, table)?;
            let d = match at {
                Some(at) => p.delta_at(at)?,
                None => p.delta(),
            };
            let json = json!({ "pair": p, "at": at, "delta": d });
            Report::new(&json, format!("{d}\n"))
        }
        LdpCmd::Substantial { pair: pa } => {
            let p = pair(pa, table)?;
            let s = substantiality(&p, stab, policy)?;
            let text = format!(
                "{} k={} gap={}{} ({})\n",
                if s.substantial {
                    "substantial"
                } else {
                    "insubstantial"
                },
                s.k,
                s.gap,
                if s.by_small_defect {
                    " small-defect"
                } else {
                    ""
                },
                cert_name(s.certificate)
            );
            let json = json!({ "pair": p, "result": s });
            Report::new(&json, text)
        }
        LdpCmd::Gap { pair: pa } => {
            let p = pair(pa, table)?;
            let (k, gap) = insubstantiality_gap(&p, stab, policy)?;
            let json = json!({ "pair": p, "k": k, "gap": gap });
            Report::new(&json, format!("{gap}\n"))
        }
    }
}
