use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nhpassage::scenario::{
    export_csv, export_svg, run_cyclic, run_two_level, verify, RunReport, ScenarioConfig, ScenarioRegistry,
};
use nhpassage::Result;

#[derive(Parser)]
#[command(name = "nhpassage", version, about = "Nonadiabatic passages under non-Hermitian Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-level transfer (a, b, c, d or custom)
    TwoLevel(RunArgs),
    /// Three-level cyclic transfer
    Cyclic(RunArgs),
    /// Any scenario plus the extended residual suite
    Verify(RunArgs),
    /// List registered scenarios
    List,
}

#[derive(Args)]
struct RunArgs {
    /// a|b|c|d for two-level, cw|ccw for cyclic, or a full scenario id
    #[arg(long)]
    scenario: Option<String>,
    /// cw|ccw
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    loops: Option<usize>,
    /// Stage half-duration T
    #[arg(long = "T", id = "period")]
    period: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// key = value configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn scenario_id(kind: &str, args: &RunArgs) -> Option<String> {
    let short = args.scenario.as_deref().or(args.direction.as_deref())?;
    Some(match (kind, short) {
        (_, "a" | "b" | "c" | "d") => format!("two_level_{short}"),
        (_, "cw" | "ccw") => format!("cyclic_{short}"),
        _ => short.to_string(),
    })
}

fn config(kind: &str, args: &RunArgs) -> Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::for_scenario(if kind == "cyclic" { "cyclic_cw" } else { "two_level_a" }),
    };
    if let Some(id) = scenario_id(kind, args) {
        cfg.scenario = id;
    }
    if let Some(v) = args.loops {
        cfg.loops = v;
    }
    if let Some(v) = args.period {
        cfg.period = v;
    }
    if args.dt.is_some() {
        cfg.dt = args.dt;
    }
    if let Some(v) = args.tolerance {
        cfg.tolerance = v;
    }
    if args.csv.is_some() {
        cfg.csv = args.csv.clone();
    }
    if args.svg.is_some() {
        cfg.svg = args.svg.clone();
    }
    Ok(cfg)
}

fn print_report(report: &RunReport) {
    println!("scenario {}", report.scenario);
    for cp in &report.checkpoints {
        let pops: Vec<String> = report
            .level_labels
            .iter()
            .zip(&cp.populations)
            .map(|(l, p)| format!("{l}={p:.9}"))
            .collect();
        println!("  t/T={:<6.3} {} total={:.9}  ({})", cp.t / report.period, pops.join(" "), cp.total, cp.label);
    }
    for check in &report.checks {
        println!("{check}");
    }
    println!("{}", if report.passed() { "ALL CHECKS PASSED" } else { "SOME CHECKS FAILED" });
}

fn run(cli: Cli) -> Result<bool> {
    let registry = ScenarioRegistry::with_builtins();
    let (kind, args) = match &cli.command {
        Command::List => {
            for id in registry.ids() {
                println!("{id:<12} {}", registry.get(id)?.summary());
            }
            return Ok(true);
        }
        Command::TwoLevel(a) => ("two-level", a),
        Command::Cyclic(a) => ("cyclic", a),
        Command::Verify(a) => ("verify", a),
    };
    let cfg = config(kind, args)?;
    let report = match kind {
        "two-level" => run_two_level(&registry, &cfg)?,
        "cyclic" => run_cyclic(&registry, &cfg)?,
        _ => verify(&registry, &cfg)?,
    };
    print_report(&report);
    if let Some(path) = &cfg.csv {
        export_csv(&report, path)?;
    }
    if let Some(path) = &cfg.svg {
        export_svg(&report, path)?;
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
