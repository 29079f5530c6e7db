mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use intcpx::{ComplexityOracle, ComplexityTable, StabilityOracle};

use args::{Cli, Command, Global, TableCmd, DEFAULT_LIMIT};
use commands::Ctx;
use output::{Report, Status, UsageError};

/// Loads the cached table if it covers the requested limit, otherwise builds
/// one (and caches it when a path is given).
fn load_table(g: &Global) -> Result<ComplexityTable> {
    let limit = g.limit.unwrap_or(DEFAULT_LIMIT);
    if let Some(path) = &g.table {
        if path.exists() {
            let t = ComplexityTable::load(path)
                .with_context(|| format!("loading {}", path.display()))?;
            if g.limit.is_none_or(|want| t.limit() >= want) {
                return Ok(t);
            }
        }
        let t = ComplexityTable::build(limit)?;
        t.save(path)
            .with_context(|| format!("writing {}", path.display()))?;
        return Ok(t);
    }
    Ok(ComplexityTable::build(limit)?)
}

fn table_info(t: &ComplexityTable) -> Result<Report> {
    let max = t.entries().iter().copied().max().unwrap_or(0);
    let json = serde_json::json!({
        "limit": t.limit(),
        "format_version": intcpx::complexity::FORMAT_VERSION,
        "bytes": t.entries().len(),
        "max_complexity": max,
    });
    Report::new(&json, format!("limit={} max_complexity={max}\n", t.limit()))
}

fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    if g.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(g.threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    if let Some(r) = commands::run_tableless(&cli.command) {
        return r;
    }
    match &cli.command {
        Command::Table(TableCmd::Build { out }) => {
            let t = ComplexityTable::build(g.limit.unwrap_or(DEFAULT_LIMIT))?;
            let path = out
                .as_ref()
                .or(g.table.as_ref())
                .ok_or_else(|| UsageError("table build needs --out or --table".into()))?;
            t.save(path)
                .with_context(|| format!("writing {}", path.display()))?;
            table_info(&t)
        }
        Command::Table(TableCmd::Info) => table_info(&load_table(g)?),
        cmd => {
            let table = load_table(g)?;
            let cpx = ComplexityOracle::new(&table);
            let stab = StabilityOracle::new(&cpx, g.horizon);
            let ctx = Ctx {
                table: &table,
                cpx: &cpx,
                stab: &stab,
                policy: g.policy,
            };
            commands::run(cmd, &ctx)
        }
    }
}

fn exit_status(e: &anyhow::Error) -> Status {
    if e.downcast_ref::<UsageError>().is_some() {
        return Status::Usage;
    }
    match e.downcast_ref::<intcpx::Error>() {
        Some(intcpx::Error::Indeterminate(_)) => Status::Indeterminate,
        Some(intcpx::Error::Io(_)) => Status::Failed,
        _ if e.downcast_ref::<std::io::Error>().is_some() => Status::Failed,
        // Out-of-range values, malformed expressions and violated contracts
        // all come from the invocation.
        _ => Status::Usage,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        let mut out = std::io::stdout().lock();
        report.emit(cli.global.format, &mut out)?;
        out.flush()?;
        Ok(report.status)
    });
    let status = match result {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_status(&e)
        }
    };
    ExitCode::from(status as u8)
}
