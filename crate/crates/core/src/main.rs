use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpr::harness::{self, emit, sibling, ExperimentKind, Options, OutputFormat};
use gpr::Result;

/// Generalized phase retrieval experiments.
///
/// Environment: PR_THREADS caps the worker pool.
/// Exit codes: 0 ok, 2 usage, 3 data, 4 numerical.
#[derive(Parser)]
#[command(name = "gpr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a target and measurement ensemble and store it (needs --out).
    Gen(Options),
    /// Solve one instance from a random start; writes the trace and a summary.
    Solve(Options),
    /// Many random starts against one fixed instance.
    Figure1(Options),
    /// Recovery probability against the ratio m/n.
    Sweep(Options),
    /// Objective values on a 2D grid for n = 2.
    Landscape(Options),
    /// Coverage scan, per-region certificates, and restricted-Hessian probe.
    Certify(Options),
    /// Exact subproblem solver against the eigen oracle on random instances.
    TrsBench(Options),
}

fn json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(command: Command) -> Result<()> {
    let (kind, opts) = match command {
        Command::Gen(o) => (ExperimentKind::Gen, o),
        Command::Solve(o) => (ExperimentKind::Solve, o),
        Command::Figure1(o) => (ExperimentKind::Figure1, o),
        Command::Sweep(o) => (ExperimentKind::Sweep, o),
        Command::Landscape(o) => (ExperimentKind::Landscape, o),
        Command::Certify(o) => (ExperimentKind::Certify, o),
        Command::TrsBench(o) => (ExperimentKind::TrsBench, o),
    };
    harness::pool_threads()?;
    let spec = opts.resolve(kind)?;
    let out = spec.out.as_deref();
    match kind {
        ExperimentKind::Gen => {
            let r = harness::run_gen(&spec)?;
            println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
        }
        ExperimentKind::Solve => {
            let r = harness::run_solve(&spec)?;
            r.write(out, spec.format)?;
            eprintln!(
                "status {:?}, {} iterations, relative error {}",
                r.summary.status,
                r.summary.iterations,
                r.summary.final_rel_error.map_or("n/a".into(), |e| format!("{e:e}"))
            );
        }
        ExperimentKind::Figure1 => {
            let r = harness::run_figure1(&spec)?;
            emit(out, spec.format, &r.to_csv(), &json(&r))?;
            eprintln!("{}/{} runs reached dist <= 1e-4 ||x||", r.successes, r.rows.len());
        }
        ExperimentKind::Sweep => {
            let r = harness::run_sweep(&spec)?;
            emit(out, spec.format, &r.to_csv(), &json(&r))?;
            for row in &r.rows {
                eprintln!("m/n = {}: {}/{}", row.ratio, row.successes, row.trials);
            }
        }
        ExperimentKind::Landscape => {
            let grid = harness::run_landscape(&spec)?;
            match (spec.format, out) {
                (OutputFormat::Csv, Some(p)) => grid.write(p)?,
                _ => {
                    let mut value = grid.metadata_json();
                    value["values"] = json(&grid.values);
                    emit(out, spec.format, &grid.to_csv(), &value)?;
                }
            }
        }
        ExperimentKind::Certify => {
            let (report, samples) = harness::run_certify(&spec)?;
            match (spec.format, out) {
                (OutputFormat::Csv, Some(p)) => {
                    gpr::landscape::write_certificates_csv(p, &samples)?;
                    emit(Some(&sibling(p, ".summary.json")), OutputFormat::Json, "", &json(&report))?;
                }
                _ => emit(out, OutputFormat::Json, "", &json(&report))?,
            }
            eprintln!("uncovered samples: {}", report.coverage.uncovered);
            for t in &report.tallies {
                eprintln!("{}: {}/{} pass", t.region.as_str(), t.passed, t.samples);
            }
        }
        ExperimentKind::TrsBench => {
            let r = harness::run_trs_bench(&spec)?;
            emit(out, spec.format, &r.to_csv(), &json(&r))?;
            eprintln!("max KKT residual {:e}, max Q gap {:e}", r.max_kkt, r.max_q_gap);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

