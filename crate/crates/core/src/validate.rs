//! Independent checks: a first-order finite-volume reference solver, the
//! Burgers shock invariant, and error metrics between a swept slice and a
//! grid solution.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::profile::{PiecewiseProfile, Side};
use crate::sweep::SolutionSlice;

pub const CFL: f64 = 0.45;
const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_DEPTH: usize = 50;
/// Cells skipped on each side of a jump before neighbouring variation is measured.
const SMEAR: usize = 4;
const NEIGHBOURS: usize = 5;

/// Cell averages on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub time: f64,
    pub u: Vec<f64>,
    /// Largest step taken.
    pub dt_used: f64,
    pub cfl: f64,
    pub steps: usize,
    pub seconds: f64,
}

impl GridSolution {
    pub fn cells(&self) -> usize {
        self.u.len()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn mass(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.dx
    }

    /// Averages groups of `factor` cells onto a grid `factor` times coarser.
    pub fn coarsen(&self, factor: usize) -> Result<GridSolution> {
        if factor == 0 || !self.u.len().is_multiple_of(factor) {
            return Err(Error::Precondition(format!("cannot coarsen {} cells by {factor}", self.u.len())));
        }
        let u = self.u.chunks(factor).map(|c| c.iter().sum::<f64>() / factor as f64).collect();
        Ok(GridSolution { dx: self.dx * factor as f64, u, ..self.clone() })
    }

    /// `sum |u - v| dx` against a grid on the same cells.
    pub fn l1_distance(&self, other: &GridSolution) -> Result<f64> {
        if self.u.len() != other.u.len() || (self.x_min - other.x_min).abs() > 1e-12 * self.dx {
            return Err(Error::Precondition("grids differ".into()));
        }
        Ok(self.u.iter().zip(&other.u).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.dx)
    }
}

pub fn total_variation(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, SIMPSON_DEPTH)
}

/// `int_a^b f`, split at breakpoints.
pub fn profile_integral(profile: &PiecewiseProfile, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return -profile_integral(profile, b, a, tol);
    }
    let mut cuts = vec![a];
    cuts.extend(profile.breakpoints().iter().copied().filter(|&c| c > a && c < b));
    cuts.push(b);
    let n = (cuts.len() - 1) as f64;
    cuts.windows(2)
        .map(|w| {
            let piece = &profile.pieces()[profile.piece_at(0.5 * (w[0] + w[1]))];
            integrate(&|x| piece.eval(x), w[0], w[1], tol / n)
        })
        .sum()
}

/// `(x_r - x_l)(f(x_l) + f(x_r)) - 2 int f`, constant along a first-kind
/// Burgers shock.
pub fn burgers_kind1_invariant(profile: &PiecewiseProfile, x_l: f64, x_r: f64) -> Result<f64> {
    if x_l == x_r {
        return Ok(0.0);
    }
    let fl = profile.eval(x_l, Side::Left, 0)?;
    let fr = profile.eval(x_r, Side::Right, 0)?;
    Ok((x_r - x_l) * (fl + fr) - 2.0 * profile_integral(profile, x_l, x_r, SIMPSON_TOL))
}

/// Exact cell averages of the profile.
pub fn cell_averages(profile: &PiecewiseProfile, x_min: f64, x_max: f64, m: usize) -> Vec<f64> {
    let dx = (x_max - x_min) / m as f64;
    (0..m)
        .map(|i| {
            let a = x_min + i as f64 * dx;
            profile_integral(profile, a, a + dx, 1e-12 * dx) / dx
        })
        .collect()
}

fn threads() -> usize {
    std::env::var("CHARSWEEP_THREADS").ok().and_then(|v| v.parse().ok()).unwrap_or(1)
}

fn llf(model: &FluxModel, a: f64, b: f64) -> f64 {
    let c = model.speed(a).abs().max(model.speed(b).abs());
    0.5 * (model.eval(a) + model.eval(b)) - 0.5 * c * (b - a)
}

/// Local Lax-Friedrichs on the profile's domain with zero-gradient ends.
pub fn reference_solve(profile: &PiecewiseProfile, model: &FluxModel, t: f64, m: usize) -> Result<GridSolution> {
    Ok(reference_snapshots(profile, model, &[t], m)?.swap_remove(0))
}

/// One run of [`reference_solve`] stopping exactly at each of the increasing
/// `times`; `seconds` is cumulative.
pub fn reference_snapshots(profile: &PiecewiseProfile, model: &FluxModel, times: &[f64], m: usize) -> Result<Vec<GridSolution>> {
    if m < 100 || times.is_empty() || !(times[0] > 0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(format!("need m >= 100 and increasing positive times, got {m} and {times:?}")));
    }
    let start = Instant::now();
    let (x_min, x_max) = profile.domain_hint();
    let dx = (x_max - x_min) / m as f64;
    let mut u = cell_averages(profile, x_min, x_max, m);
    let mut flux = vec![0.0; m + 1];
    let pool = match threads() {
        n if n > 1 => Some(rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Precondition(e.to_string()))?),
        _ => None,
    };
    let (mut now, mut steps, mut dt_used) = (0.0, 0usize, 0.0f64);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while now < t {
            let a = u.iter().map(|&v| model.speed(v).abs()).fold(0.0, f64::max);
            let mut dt = if a > 0.0 { CFL * dx / a } else { t - now };
            if now + dt >= t {
                dt = t - now;
            }
            let side = |i: usize| u[i.clamp(1, m) - 1];
            let face = |i: usize| llf(model, side(i), u[i.min(m - 1)]);
            match &pool {
                Some(p) => p.install(|| flux.par_iter_mut().enumerate().for_each(|(i, f)| *f = face(i))),
                None => flux.iter_mut().enumerate().for_each(|(i, f)| *f = face(i)),
            }
            let r = dt / dx;
            let update = |(i, v): (usize, &mut f64)| *v -= r * (flux[i + 1] - flux[i]);
            match &pool {
                Some(p) => p.install(|| u.par_iter_mut().enumerate().for_each(update)),
                None => u.iter_mut().enumerate().for_each(update),
            }
            now = if now + dt >= t { t } else { now + dt };
            steps += 1;
            dt_used = dt_used.max(dt);
        }
        out.push(GridSolution {
            x_min,
            x_max,
            dx,
            time: t,
            u: u.clone(),
            dt_used,
            cfl: CFL,
            steps,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(out)
}

/// Matched discontinuity between a slice marker and the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockMatch {
    pub marker: f64,
    /// Interface of the nearest detected grid discontinuity.
    pub reference: Option<f64>,
    /// `|marker - reference|`, infinite when nothing was detected.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub l1: f64,
    pub linf_off_shock: f64,
    pub shocks: Vec<ShockMatch>,
    pub tracking_seconds: f64,
    pub reference_seconds: f64,
}

impl ErrorReport {
    pub fn shock_location_errors(&self) -> Vec<f64> {
        self.shocks.iter().map(|s| s.error).collect()
    }

    pub fn mismatches(&self) -> usize {
        self.shocks.iter().filter(|s| s.reference.is_none()).count()
    }
}

/// Interfaces `x_{i+1/2}` where the jump dominates its surroundings.
pub fn grid_discontinuities(grid: &GridSolution) -> Vec<f64> {
    let jumps: Vec<f64> = grid.u.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let n = jumps.len();
    let scale = grid.u.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut out = Vec::new();
    for i in 0..n {
        let j = jumps[i];
        if j <= 1e-6 * scale {
            continue;
        }
        let near = i.saturating_sub(SMEAR - 1)..(i + SMEAR).min(n);
        if near.clone().any(|k| jumps[k] > j || (jumps[k] == j && k < i)) {
            continue;
        }
        let far = (i.saturating_sub(SMEAR + NEIGHBOURS)..i.saturating_sub(SMEAR))
            .chain((i + SMEAR + 1).min(n)..(i + SMEAR + 1 + NEIGHBOURS).min(n));
        let neighbour = far.map(|k| jumps[k]).fold(0.0, f64::max);
        if j > 3.0 * neighbour {
            out.push(grid.x_min + (i + 1) as f64 * grid.dx);
        }
    }
    out
}

/// Slice averages over the grid cells, `None` outside the slice's support.
pub fn slice_cell_averages(slice: &SolutionSlice, grid: &GridSolution) -> Vec<Option<f64>> {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(slice.samples.len() + 2 * slice.discontinuities.len());
    let mut marks = slice.discontinuities.iter().peekable();
    for s in &slice.samples {
        while let Some(d) = marks.next_if(|d| d.x < s.x) {
            pts.push((d.x, d.u_left));
            pts.push((d.x, d.u_right));
        }
        pts.push((s.x, s.u));
    }
    let (Some(first), Some(last)) = (pts.first().map(|p| p.0), pts.last().map(|p| p.0)) else {
        return vec![None; grid.cells()];
    };
    // integral of the piecewise-linear interpolant from first to each point
    let mut acc = vec![0.0; pts.len()];
    for k in 1..pts.len() {
        acc[k] = acc[k - 1] + 0.5 * (pts[k].0 - pts[k - 1].0) * (pts[k].1 + pts[k - 1].1);
    }
    let cum = |x: f64| -> f64 {
        let k = pts.partition_point(|p| p.0 <= x);
        if k == 0 {
            return 0.0;
        }
        let (x0, u0) = pts[k - 1];
        if k == pts.len() {
            return acc[k - 1];
        }
        let (x1, u1) = pts[k];
        let ux = u0 + (u1 - u0) * (x - x0) / (x1 - x0);
        acc[k - 1] + 0.5 * (x - x0) * (u0 + ux)
    };
    (0..grid.cells())
        .map(|i| {
            let a = grid.x_min + i as f64 * grid.dx;
            let b = a + grid.dx;
            (a >= first && b <= last).then(|| (cum(b) - cum(a)) / grid.dx)
        })
        .collect()
}

/// L1 over the common support, sup error away from markers, and shock
/// location errors against the grid's detected discontinuities.
pub fn compare(slice: &SolutionSlice, grid: &GridSolution) -> ErrorReport {
    let avg = slice_cell_averages(slice, grid);
    let mut l1 = 0.0;
    let mut linf = 0.0f64;
    let away = 10.0 * grid.dx;
    for (i, a) in avg.iter().enumerate() {
        let Some(a) = a else { continue };
        let e = (a - grid.u[i]).abs();
        l1 += e * grid.dx;
        let x = grid.center(i);
        if slice.discontinuities.iter().all(|d| (d.x - x).abs() > away) {
            linf = linf.max(e);
        }
    }
    let found = grid_discontinuities(grid);
    let shocks = slice
        .discontinuities
        .iter()
        .map(|d| {
            let reference = found.iter().copied().min_by(|a, b| (a - d.x).abs().total_cmp(&(b - d.x).abs()));
            ShockMatch { marker: d.x, reference, error: reference.map_or(f64::INFINITY, |r| (r - d.x).abs()) }
        })
        .collect();
    ErrorReport { l1, linf_off_shock: linf, shocks, tracking_seconds: 0.0, reference_seconds: grid.seconds }
}
