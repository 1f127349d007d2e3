//! `statgeom`: run scenario checks and print deterministic reports.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use statgeom::geometry::SamplePlan;
use statgeom::scenario::{bundled, load_scenario_file, ScenarioDoc};
use statgeom::{catalog, run_scenario, Error, RunOptions};

#[derive(Parser)]
#[command(name = "statgeom", version, about = "Verify statistical manifolds with almost product-like structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario's checks and report the results.
    Verify {
        /// Scenario file.
        #[arg(required_unless_present = "bundled", conflicts_with = "bundled")]
        path: Option<PathBuf>,
        /// Built-in scenario id (E1..E7 or a synthetic id).
        #[arg(long)]
        bundled: Option<String>,
        /// Tolerance replacing the scenario default and per-check overrides.
        #[arg(long)]
        tol: Option<f64>,
        /// Run only these checks (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
        /// Sample N seeded random points instead of the scenario's plan.
        #[arg(long)]
        points: Option<usize>,
        /// Seed for the random sample points.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the check catalog.
    ListChecks,
    /// Write the built-in example scenarios into a directory.
    EmitExamples { dir: PathBuf },
}

/// Write to stdout; a closed pipe is not an error worth reporting.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn load(path: Option<PathBuf>, id: Option<String>) -> Result<ScenarioDoc, Error> {
    match (path, id) {
        (_, Some(id)) => bundled::bundled_scenario(&id),
        (Some(p), None) => load_scenario_file(&p),
        (None, None) => Err(Error::Io("no scenario given".into())),
    }
}

fn verify(
    path: Option<PathBuf>,
    id: Option<String>,
    tol: Option<f64>,
    checks: Vec<String>,
    report: Format,
    points: Option<usize>,
    seed: Option<u64>,
) -> Result<bool, Error> {
    if let Some(t) = tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Schema {
                path: "--tol".into(),
                message: "tolerance must be positive".into(),
            });
        }
    }
    let doc = load(path, id)?;
    let mut plan = doc.plan;
    if let Some(n) = points {
        plan = SamplePlan { grid: 0, random: n, seed: plan.seed };
    }
    if let Some(s) = seed {
        plan.seed = s;
    }
    if plan.grid == 0 && plan.random == 0 {
        return Err(Error::Schema {
            path: "--points".into(),
            message: "at least one sample point is required".into(),
        });
    }
    let opts = RunOptions {
        checks: (!checks.is_empty()).then_some(checks),
        tolerance: tol,
        plan: Some(plan),
    };
    let rep = run_scenario(&doc, &opts)?;
    match report {
        Format::Text => out(&rep.to_text()),
        Format::Json => out(&rep.to_json()),
    }
    Ok(rep.passed())
}

fn list_checks() {
    let width = catalog().iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in catalog() {
        out(&format!("{:width$}  {:12}  {}  [{}]\n", c.name, c.scope.label(), c.description, c.anchor));
    }
}

fn emit_examples(dir: PathBuf) -> Result<(), Error> {
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for id in bundled::IDS {
        let file = bundled::bundled_file(id)?;
        let path = dir.join(format!("{id}.json"));
        std::fs::write(&path, file.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        out(&format!("{}\n", path.display()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            path,
            bundled,
            tol,
            checks,
            report,
            points,
            seed,
        } => verify(path, bundled, tol, checks, report, points, seed).map(|ok| if ok { 0 } else { 1 }),
        Command::ListChecks => {
            list_checks();
            Ok(0)
        }
        Command::EmitExamples { dir } => emit_examples(dir).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
