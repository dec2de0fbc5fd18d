use std::path::PathBuf;
use std::process::ExitCode;

use charsweep_cli::{bundled, list_scenarios, run_scenario, CliError, Scenario};
use clap::Parser;

/// Characteristic sweeping solver for scalar conservation laws.
#[derive(Parser, Debug)]
#[command(name = "charsweep", version)]
struct Args {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory; defaults to the scenario's `out` or `out/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare against a finite-volume reference with this many cells.
    #[arg(long = "with-reference", value_name = "M")]
    with_reference: Option<usize>,
    /// Phase the first step so shock activations land on the time grid.
    #[arg(long = "phased-step")]
    phased_step: bool,
    /// Also write the multivalued characteristic surface.
    #[arg(long = "emit-multivalue")]
    emit_multivalue: bool,
    /// Override the time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the output spacing in X.
    #[arg(long)]
    dx: Option<f64>,
    /// Override the final time.
    #[arg(long = "T", value_name = "T")]
    t: Option<f64>,
    /// Print the bundled scenario names and exit.
    #[arg(long)]
    list: bool,
}

fn load(spec: &str) -> Result<Scenario, CliError> {
    let text = match std::fs::read_to_string(spec) {
        Ok(t) => t,
        Err(e) => match bundled(spec) {
            Some(t) => t.to_string(),
            None => return Err(CliError::Parse(format!("cannot read {spec}: {e}"))),
        },
    };
    Scenario::parse(&text)
}

fn run(args: Args) -> Result<(), CliError> {
    if args.list {
        for n in list_scenarios() {
            println!("{n}");
        }
        return Ok(());
    }
    let spec = args.scenario.ok_or_else(|| CliError::Parse("--scenario is required".into()))?;
    let mut sc = load(&spec)?;
    for (name, v) in [("dt", args.dt), ("dx", args.dx), ("T", args.t)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Parse(format!("--{name} must be positive")));
            }
        }
    }
    sc.dt = args.dt.unwrap_or(sc.dt);
    sc.dx = args.dx.unwrap_or(sc.dx);
    sc.t = args.t.unwrap_or(sc.t);
    if args.with_reference.is_some() {
        sc.reference = args.with_reference;
    }
    sc.phased_step |= args.phased_step;
    sc.emit_multivalue |= args.emit_multivalue;
    let out = args.out.or_else(|| sc.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(&sc.name));
    let summary = run_scenario(&sc, &out)?;
    println!(
        "{}: {} curves, {} discontinuities at T = {}; files in {}",
        sc.name,
        summary.graph.curves.len(),
        summary.slice.discontinuities.len(),
        sc.t,
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("charsweep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
