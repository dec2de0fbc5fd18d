//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so that a failing criterion is reported next to
//! its measurements instead of aborting the remaining ones.

use std::time::Instant;

use charsweep::classify::seed_polynomial;
use charsweep::shockdyn::advance_sample;
use charsweep::validate::{grid_discontinuities, GridSolution};
use charsweep::*;
use charsweep_cli::{bundled, list_scenarios, Scenario};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn scenario(name: &str) -> (Scenario, PiecewiseProfile) {
    let sc = Scenario::parse(bundled(name).unwrap()).unwrap();
    let p = sc.profile().unwrap();
    (sc, p)
}

fn run(sc: &Scenario, p: &PiecewiseProfile) -> ShockGraph {
    evolve(p, &sc.flux, EvolveOptions::new(sc.t, sc.dt)).unwrap()
}

fn min_time(reps: usize, mut f: impl FnMut()) -> f64 {
    (0..reps)
        .map(|_| {
            let s = Instant::now();
            f();
            s.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion1() -> Outcome {
    let p = PiecewiseProfile::parse("x < 0: 1 ; x >= 0: 0").unwrap();
    let m = FluxModel::Burgers;
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for t in [1.0, 5.0, 10.0] {
        let start = Instant::now();
        let g = evolve(&p, &m, EvolveOptions::new(t, 0.01)).unwrap();
        let s = sweep_solution(&p, &m, &g, t, 1e-2).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let xi = g.curves[0].samples.last().unwrap().xi;
        worst = worst.max((xi - t / 2.0).abs()).max((s.discontinuities[0].x - t / 2.0).abs());
    }
    outcome(worst <= 1e-12 && slowest < 0.1, format!("max |xi - T/2| = {worst:e}, slowest run {slowest:.4} s"))
}

fn earliest_break(src: &str, model: FluxModel, kind: PointKind) -> f64 {
    let p = PiecewiseProfile::parse(src).unwrap();
    classify_points(&p, &model)
        .unwrap()
        .iter()
        .filter(|c| c.kind == kind)
        .flat_map(|c| c.break_times.iter().copied())
        .fold(f64::INFINITY, f64::min)
}

fn criterion2() -> Outcome {
    let t2 = earliest_break("x < 0: 1 - exp(x) ; x >= 0: x^2 - 2*x", FluxModel::Burgers, PointKind::Shock2);
    let tg = earliest_break("exp(-x^2)", FluxModel::Burgers, PointKind::Shock3);
    let t4 = earliest_break("x < 0: -(x^2 + 2*x + 1)/2 ; x >= 0: x + 1", FluxModel::PowerQuartic, PointKind::Shock4);
    let eg = (tg - (std::f64::consts::E / 2.0).sqrt()).abs();
    let e4 = (t4 - 4.0).abs();
    outcome(
        t2 == 0.5 && eg <= 1e-9 && e4 <= 1e-9,
        format!("example2 {t2:?}, gaussian error {eg:e}, example4 error {e4:e}"),
    )
}

fn criterion3() -> Outcome {
    let mut worst = 0.0f64;
    for k in 2..=6 {
        let p = if k % 2 == 0 { -1.0 } else { 1.0 };
        worst = worst.max((negative_root(k, p, -1.0).unwrap() + 1.0).abs());
    }
    // (-1)^k (r(p2) - r(p1)) / (p2 - p1) > 0 on a grid of admissible p
    let mut checked = 0;
    let mut bad = 0;
    for k in 2..=6usize {
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let grid: Vec<f64> = (0..60).map(|i| sign * 0.05 * 1.1f64.powi(i)).collect();
        let mut roots: Vec<(f64, f64)> = grid.iter().map(|&p| (p, negative_root(k, p, -1.0).unwrap())).collect();
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in roots.windows(2) {
            checked += 1;
            let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
            let root_ok = seed_polynomial(k, w[0].0, -1.0, w[0].1).abs() <= 1e-9 * (1.0 + w[0].1.abs().powi(k as i32 + 1));
            if parity * (w[1].1 - w[0].1) / (w[1].0 - w[0].0) <= 0.0 || !root_ok {
                bad += 1;
            }
        }
    }
    outcome(worst <= 1e-12 && bad == 0, format!("max |r + 1| = {worst:e}; monotonicity violations {bad}/{checked}"))
}

fn kind1_drift(p: &PiecewiseProfile, g: &ShockGraph) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut n = 0;
    for c in &g.curves {
        let stretch: Vec<&Sample> = c.samples.iter().filter(|s| s.regime() == Regime::Kind1 && s.x_l() < s.x_r()).collect();
        let Some(first) = stretch.first() else { continue };
        let q0 = burgers_kind1_invariant(p, first.x_l(), first.x_r()).unwrap();
        let mut scale = 0.0f64;
        let mut dev = 0.0f64;
        for s in &stretch {
            let (fl, fr) = (p.eval(s.x_l(), Side::Left, 0).unwrap(), p.eval(s.x_r(), Side::Right, 0).unwrap());
            scale = scale.max((s.x_r() - s.x_l()) * (fl.abs() + fr.abs()));
            dev = dev.max((burgers_kind1_invariant(p, s.x_l(), s.x_r()).unwrap() - q0).abs());
            n += 1;
        }
        worst = worst.max(dev / scale);
    }
    (worst, n)
}

fn kind3_residual(g: &ShockGraph) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut n = 0;
    for c in &g.curves {
        let third: Vec<(&Sample, f64, f64)> = c
            .samples
            .iter()
            .filter_map(|s| match s.regime() {
                Regime::Kind3 { x1, x2 } => Some((s, x1, x2)),
                _ => None,
            })
            .collect();
        let Some(&(s0, x1, x2)) = third.first() else { continue };
        // xi = (x1 + x2)/2 + C t, with C fixed by the first sample
        let c0 = (s0.xi - 0.5 * (x1 + x2)) / s0.t;
        for (s, x1, x2) in &third {
            worst = worst.max((s.xi - 0.5 * (x1 + x2) - c0 * s.t).abs());
            n += 1;
        }
    }
    (worst, n)
}

fn criterion4() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for name in ["example1", "example2", "example5"] {
        let (sc, p) = scenario(name);
        let g = evolve(&p, &sc.flux, EvolveOptions::new(10.0, 1e-3)).unwrap();
        let (drift, n) = kind1_drift(&p, &g);
        let (res, n3) = kind3_residual(&g);
        pass &= drift <= 1e-6 && n > 0 && res <= 1e-8;
        lines.push(format!("{name}: invariant drift {drift:.2e} over {n} samples, kind3 samples {n3}"));
    }
    let (sc, p) = scenario("two_fans");
    let (res, n3) = kind3_residual(&run(&sc, &p));
    pass &= res <= 1e-8 && n3 > 0;
    lines.push(format!("two_fans: kind3 residual {res:.2e} over {n3} samples"));
    outcome(pass, lines.join("; "))
}

fn criterion5() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut ex1 = None;
    for name in ["example1", "example2", "example3", "example4", "example5"] {
        let (sc, p) = scenario(name);
        let g = run(&sc, &p);
        let slice = sweep_solution(&p, &sc.flux, &g, sc.t, sc.dx).unwrap();
        let coarse = reference_solve(&p, &sc.flux, sc.t, 4000).unwrap();
        let fine = reference_solve(&p, &sc.flux, sc.t, 16000).unwrap();
        let own = coarse.l1_distance(&fine.coarsen(4).unwrap()).unwrap();
        let r = compare(&slice, &coarse);
        let cells: Vec<f64> = r.shocks.iter().map(|s| s.error / coarse.dx).collect();
        let ok_loc = !cells.is_empty() && cells.iter().all(|&c| c <= 2.0);
        let ok_l1 = r.l1 <= 2.0 * own;
        pass &= ok_loc && ok_l1;
        lines.push(format!(
            "{name}: shock offsets {} cells{}, L1 {:.3e} vs 2x self {:.3e}{}",
            cells.iter().map(|c| format!("{c:.2}")).collect::<Vec<_>>().join(" "),
            if ok_loc { "" } else { " (FAIL)" },
            r.l1,
            2.0 * own,
            if ok_l1 { "" } else { " (FAIL)" }
        ));
        if name == "example1" {
            ex1 = Some((sc, p, coarse.seconds, fine.seconds));
        }
    }
    let (sc, p, t4000, t16000) = ex1.unwrap();
    let t1000 = reference_solve(&p, &sc.flux, sc.t, 1000).unwrap().seconds;
    let track = |dx: f64| {
        min_time(5, || {
            let g = run(&sc, &p);
            sweep_solution(&p, &sc.flux, &g, sc.t, dx).unwrap();
        })
    };
    let (ta, tb) = (track(1e-2), track(1e-3));
    let flat = (ta - tb).abs() <= 0.1 * ta.max(tb);
    let linear = t4000 / t1000 >= 4.0 && t16000 / t4000 >= 4.0;
    let faster = 5.0 * tb <= t4000;
    pass &= flat && linear && faster;
    lines.push(format!(
        "example1 timing: tracking {ta:.4} s at dX=1e-2, {tb:.4} s at dX=1e-3; reference {t1000:.3}/{t4000:.3}/{t16000:.3} s at m=1000/4000/16000"
    ));
    outcome(pass, lines.join("; "))
}

fn criterion6() -> Outcome {
    let (sc, p) = scenario("example2");
    let m = sc.flux.clone();
    let g = evolve(&p, &m, EvolveOptions::new(2.0, 1e-3)).unwrap();
    let tb = 0.5;
    let (t0, t1) = (tb + 0.2, tb + 1.0);
    let c = &g.curves[0];
    let before = c.sample_before(t0).unwrap();
    let start = advance_sample(&p, &m, &g.fans, before, t0, 1e-4).unwrap();
    let mut errs = Vec::new();
    for dt in [0.02, 0.01, 0.005] {
        let a = advance_sample(&p, &m, &g.fans, &start, t1, dt).unwrap();
        let r = advance_sample(&p, &m, &g.fans, &start, t1, dt / 16.0).unwrap();
        errs.push((a.x_l() - r.x_l()).abs().max((a.x_r() - r.x_r()).abs()).max((a.xi - r.xi).abs()));
    }
    let rates: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let events = g.events.iter().filter(|e| e.time > t0 && e.time < t1).count();
    outcome(
        events == 0 && rates.iter().all(|&r| r >= 3.5),
        format!(
            "errors {}, rates {rates:.2?}, events in stretch {events}",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn fan_edge_gap(p: &PiecewiseProfile, m: &FluxModel, g: &ShockGraph, s: &SolutionSlice) -> (f64, usize) {
    let t = s.time;
    let mut worst = 0.0f64;
    let mut n = 0;
    for fan in &g.fans {
        for (ray, piece) in [(fan.h_lo, fan.left_piece), (fan.h_hi, fan.right_piece)] {
            let x_edge = fan.center + ray * t;
            let i = s.samples.partition_point(|q| q.x < x_edge);
            let (Some(a), Some(b)) = (i.checked_sub(1).map(|i| s.samples[i]), s.samples.get(i)) else { continue };
            if a.provenance == b.provenance || s.discontinuities.iter().any(|d| d.x >= a.x && d.x <= b.x) {
                continue;
            }
            // characteristic foot of the adjacent piece reaching the edge
            let (lo, hi) = p.piece_bounds(piece);
            let (mut l, mut r) = if piece == fan.left_piece { (lo.max(fan.center - 50.0), fan.center) } else { (fan.center, hi.min(fan.center + 50.0)) };
            let img = |x: f64| x + p.local(m, piece, x).h * t - x_edge;
            for _ in 0..200 {
                let mid = 0.5 * (l + r);
                if img(mid) < 0.0 {
                    l = mid;
                } else {
                    r = mid;
                }
            }
            let u_char = p.local(m, piece, 0.5 * (l + r)).f;
            let u_fan = rarefaction_value(m, p, fan.center, x_edge, t).unwrap();
            worst = worst.max((u_char - u_fan).abs());
            n += 1;
        }
    }
    (worst, n)
}

fn criterion7() -> Outcome {
    let mut unstable = 0;
    let mut kind1 = 0;
    let mut folds = 0;
    let mut edge = (0.0f64, 0);
    let mut jump = 0.0f64;
    let mut jump_at = String::new();
    let (mut checked, mut skipped) = (0, 0);
    for name in list_scenarios() {
        let (sc, p) = scenario(name);
        let m = &sc.flux;
        let g = run(&sc, &p);
        for c in &g.curves {
            for s in &c.samples {
                if let (Source::Foot { x: xl, piece: pl }, Source::Foot { x: xr, piece: pr }) = (s.left, s.right) {
                    if xl == xr {
                        continue;
                    }
                    let (a, b) = (p.local(m, pl, xl), p.local(m, pr, xr));
                    let slope = (a.h - b.h) / (xl - xr);
                    kind1 += 1;
                    if !(a.dh > slope && b.dh > slope) {
                        unstable += 1;
                    }
                }
            }
            // 5-point central differences where samples are evenly spaced
            let sm = &c.samples;
            for i in 2..sm.len().saturating_sub(2) {
                let w = &sm[i - 2..=i + 2];
                let h = w[2].t - w[1].t;
                let even = w.windows(2).all(|q| ((q[1].t - q[0].t) - h).abs() <= 1e-9 * h);
                if !even || w.iter().any(|q| std::mem::discriminant(&q.regime()) != std::mem::discriminant(&w[2].regime())) {
                    continue;
                }
                let d4 = (-w[4].xi + 8.0 * w[3].xi - 8.0 * w[1].xi + w[0].xi) / (12.0 * h);
                let d2 = (w[3].xi - w[1].xi) / (2.0 * h);
                // the stencil cannot resolve the slope to the tolerance here
                if (d4 - d2).abs() > 1e-4 {
                    skipped += 1;
                    continue;
                }
                let state = |src: Source| match src {
                    Source::Foot { x, piece } => p.local(m, piece, x).f,
                    Source::Fan { fan, center } => g.fans[fan].state(m, (w[2].xi - center) / w[2].t),
                };
                let (ul, ur) = (state(w[2].left), state(w[2].right));
                if ul == ur {
                    continue;
                }
                let r = (d4 - (m.eval(ul) - m.eval(ur)) / (ul - ur)).abs();
                if r > jump {
                    jump = r;
                    jump_at = format!("{name} curve {} t = {:.4}", c.id, w[2].t);
                }
                checked += 1;
            }
        }
        let s = sweep_solution(&p, m, &g, sc.t, sc.dx).unwrap();
        folds += s.samples.windows(2).filter(|w| w[1].x <= w[0].x).count();
        let (gap, n) = fan_edge_gap(&p, m, &g, &s);
        edge = (edge.0.max(gap), edge.1 + n);
    }
    outcome(
        unstable == 0 && folds == 0 && edge.0 <= 1e-8 && jump <= 1e-4,
        format!(
            "unstable kind1 samples {unstable}/{kind1}; folds {folds}; fan-edge gap {:.2e} over {} edges; jump residual {jump:.2e} ({jump_at}) over {checked} samples ({skipped} skipped where the stencil is unresolved)",
            edge.0, edge.1
        ),
    )
}

fn max_jump_interface(grid: &GridSolution, lo: f64, hi: f64) -> f64 {
    let mut best = (0.0, f64::NAN);
    for i in 0..grid.cells() - 1 {
        let x = grid.x_min + (i + 1) as f64 * grid.dx;
        let j = (grid.u[i + 1] - grid.u[i]).abs();
        if x > lo && x < hi && j > best.0 {
            best = (j, x);
        }
    }
    best.1
}

fn criterion8() -> Outcome {
    let (sc, p) = scenario("example3");
    let m = sc.flux.clone();
    let g = run(&sc, &p);
    let points: Vec<&CriticalPoint> = g.points.iter().filter(|c| c.kind == PointKind::Shock3).collect();
    let tb = points.iter().flat_map(|c| c.break_times.iter().copied()).fold(f64::INFINITY, f64::min);
    let times = [tb, 2.5, 3.0, 4.0, 6.0, 8.0, 10.0];
    let snaps = reference_snapshots(&p, &m, &times, 16000).unwrap();
    let dx = snaps[0].dx;
    let mut worst_window = 0.0f64;
    let mut worst_late = 0.0f64;
    let mut locus = 0.0f64;
    for (t, grid) in times.iter().zip(&snaps) {
        for c in &points {
            let (lo, hi) = if c.x < 0.0 { (f64::NEG_INFINITY, 0.0) } else { (0.0, f64::INFINITY) };
            let curve = g.curves.iter().find(|k| (k.samples[0].xi - c.x).abs() < (k.samples[0].xi + c.x).abs()).unwrap();
            let xi = if *t < curve.t_start() {
                // at the break time the shock sits where the neighbouring characteristics meet
                c.x + c.left.h[0] * t
            } else {
                advance_sample(&p, &m, &g.fans, curve.sample_before(*t).unwrap(), *t, 1e-3).unwrap().xi
            };
            let reference = if *t <= 2.0 {
                max_jump_interface(grid, lo, hi)
            } else {
                grid_discontinuities(grid)
                    .into_iter()
                    .filter(|x| *x > lo && *x < hi)
                    .min_by(|a, b| (a - xi).abs().total_cmp(&(b - xi).abs()))
                    .unwrap_or(f64::NAN)
            };
            let cells = (reference - xi).abs() / dx;
            let cells = if cells.is_nan() { f64::INFINITY } else { cells };
            if *t <= 2.0 {
                worst_window = worst_window.max(cells);
            } else {
                worst_late = worst_late.max(cells);
            }
            locus = locus.max((t - 0.5 * xi * xi).abs());
        }
    }
    outcome(
        worst_window <= 2.0 && worst_late <= 2.0,
        format!(
            "t_b = {tb:?}; offset {worst_window:.2} cells on [t_b, 2], {worst_late:.2} cells on (2, 10]; max |t - xi^2/2| = {locus:.2e} on both branches (the mirror branch also satisfies t = xi^2/2, not t = -xi^2/2)"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("riemann shock speed and runtime", criterion1),
        ("break times", criterion2),
        ("seed polynomial roots", criterion3),
        ("burgers invariants", criterion4),
        ("reference equivalence and scaling", criterion5),
        ("rk4 order", criterion6),
        ("property suites", criterion7),
        ("example 3 shock locus", criterion8),
    ];
    let start = Instant::now();
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        passed += o.pass as usize;
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {passed}/{} criteria passed in {:.1} s", criteria.len(), start.elapsed().as_secs_f64());
}
