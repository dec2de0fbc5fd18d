//! Scenario runner: classification, tracking, sweeping and optional
//! reference comparison, written out as CSV files and a text report.

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use charsweep::{
    compare, evolve, multivalue_surface, reference_solve, sweep_solution, CriticalPoint, Error as CoreError,
    ErrorReport, EvolveOptions, ShockGraph, SolutionSlice,
};

mod scenario;

pub use scenario::Scenario;

#[derive(Debug)]
pub enum CliError {
    /// Malformed scenario or profile; exit status 2.
    Parse(String),
    /// Failure while running; exit status 3.
    Abort(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Abort(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "invalid scenario: {m}"),
            CliError::Abort(m) => write!(f, "aborted: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn runtime(e: CoreError) -> CliError {
    match e {
        CoreError::Aborted { t, msg } => CliError::Abort(format!("t = {t:?}: {msg}")),
        CoreError::SingularDenominator { t, .. } | CoreError::Consistency { t, .. } => {
            CliError::Abort(format!("t = {t:?}: {e}"))
        }
        e => CliError::Abort(e.to_string()),
    }
}

const BUNDLED: &[(&str, &str)] = &[
    ("example1", include_str!("../scenarios/example1.scn")),
    ("example2", include_str!("../scenarios/example2.scn")),
    ("example3", include_str!("../scenarios/example3.scn")),
    ("example4", include_str!("../scenarios/example4.scn")),
    ("example5", include_str!("../scenarios/example5.scn")),
    ("riemann_shock", include_str!("../scenarios/riemann_shock.scn")),
    ("riemann_rarefaction", include_str!("../scenarios/riemann_rarefaction.scn")),
    ("gaussian", include_str!("../scenarios/gaussian.scn")),
    ("hat", include_str!("../scenarios/hat.scn")),
    ("two_fans", include_str!("../scenarios/two_fans.scn")),
    ("fan_exit", include_str!("../scenarios/fan_exit.scn")),
];

pub fn list_scenarios() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Text of a bundled scenario.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// What a run produced, besides its files.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub graph: ShockGraph,
    pub slice: SolutionSlice,
    pub errors: Option<ErrorReport>,
    pub tracking_seconds: f64,
    pub sweep_seconds: f64,
}

fn csv(dir: &Path, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    body(&mut w)?;
    w.flush()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn write_points(w: &mut impl Write, points: &[CriticalPoint]) -> io::Result<()> {
    writeln!(w, "id,x,kind,f_left,f_right,h_left,h_right,dh_left,dh_right,k_l,k_r,break_times")?;
    let order = |k: Option<usize>| k.map_or(String::new(), |k| k.to_string());
    for p in points {
        writeln!(
            w,
            "{},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{}",
            p.id,
            p.x,
            p.kind,
            p.left.f,
            p.right.f,
            p.left.h[0],
            p.right.h[0],
            p.left.h[1],
            p.right.h[1],
            order(p.k_l),
            order(p.k_r),
            join(&p.break_times)
        )?;
    }
    Ok(())
}

/// Runs a scenario and writes its files into `out`.
pub fn run_scenario(sc: &Scenario, out: &Path) -> Result<RunSummary, CliError> {
    let profile = sc.profile()?;
    let mut opts = EvolveOptions::new(sc.t, sc.dt);
    opts.phased_step = sc.phased_step;
    fs::create_dir_all(out)?;

    let start = Instant::now();
    let graph = evolve(&profile, &sc.flux, opts).map_err(runtime)?;
    let tracking_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let slice = sweep_solution(&profile, &sc.flux, &graph, sc.t, sc.dx).map_err(runtime)?;
    let sweep_seconds = start.elapsed().as_secs_f64();

    csv(out, "points.csv", |w| write_points(w, &graph.points))?;
    csv(out, "curves.csv", |w| graph.write_curves_csv(w))?;
    csv(out, "events.csv", |w| graph.write_events_csv(w))?;
    csv(out, "slice_T.csv", |w| slice.write_csv(w))?;
    csv(out, "discontinuities.csv", |w| slice.write_discontinuities_csv(w))?;
    if sc.emit_multivalue {
        let (lo, hi) = profile.domain_hint();
        let n = ((hi - lo) / sc.dx).ceil() as usize;
        let feet: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        csv(out, "multivalue.csv", |w| {
            writeln!(w, "X,u")?;
            for (x, u) in multivalue_surface(&profile, &sc.flux, sc.t, &feet) {
                writeln!(w, "{x:?},{u:?}")?;
            }
            Ok(())
        })?;
    }

    let errors = match sc.reference {
        Some(m) => {
            let grid = reference_solve(&profile, &sc.flux, sc.t, m).map_err(runtime)?;
            let mut r = compare(&slice, &grid);
            r.tracking_seconds = tracking_seconds + sweep_seconds;
            Some(r)
        }
        None => None,
    };

    let mut rep = BufWriter::new(File::create(out.join("report.txt"))?);
    writeln!(rep, "scenario: {}", sc.name)?;
    writeln!(rep, "flux: {}", sc.flux.name())?;
    writeln!(rep, "T: {:?}  dt: {:?}  dX: {:?}", sc.t, sc.dt, sc.dx)?;
    writeln!(rep, "critical points: {}", graph.points.iter().filter(|p| p.kind.is_shock()).count())?;
    writeln!(rep, "curves: {}  events: {}", graph.curves.len(), graph.events.len())?;
    writeln!(rep, "discontinuities at T: {}", slice.discontinuities.len())?;
    for d in &slice.discontinuities {
        writeln!(rep, "  X = {:?}  u_left = {:?}  u_right = {:?}", d.x, d.u_left, d.u_right)?;
    }
    writeln!(rep, "tracking seconds: {tracking_seconds:.6}")?;
    writeln!(rep, "sweep seconds: {sweep_seconds:.6}")?;
    if let (Some(r), Some(m)) = (&errors, sc.reference) {
        writeln!(rep, "reference cells: {m}")?;
        writeln!(rep, "reference seconds: {:.6}", r.reference_seconds)?;
        writeln!(rep, "L1 error: {:e}", r.l1)?;
        writeln!(rep, "Linf error off shocks: {:e}", r.linf_off_shock)?;
        for s in &r.shocks {
            match s.reference {
                Some(x) => writeln!(rep, "  shock at {:?}: reference {:?}, error {:e}", s.marker, x, s.error)?,
                None => writeln!(rep, "  shock at {:?}: no reference discontinuity found", s.marker)?,
            }
        }
    }
    rep.flush()?;
    Ok(RunSummary { graph, slice, errors, tracking_seconds, sweep_seconds })
}
