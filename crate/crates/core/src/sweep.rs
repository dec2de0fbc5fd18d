//! The single-valued solution at a fixed time, assembled from characteristic
//! feet, rarefaction fans and the tracked shock curves.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};

use crate::classify::StraightSegment;
use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::profile::PiecewiseProfile;
use crate::shockdyn::motion::Ctx;
use crate::shockdyn::{Fan, Sample, ShockGraph, Source};

const SCAN: usize = 2048;
const BISECT_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Characteristic,
    Rarefaction,
    StraightLine,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Characteristic => "characteristic",
            Provenance::Rarefaction => "rarefaction",
            Provenance::StraightLine => "straight_line",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSample {
    pub x: f64,
    pub u: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discontinuity {
    pub x: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub curve: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSlice {
    pub time: f64,
    pub samples: Vec<SliceSample>,
    pub discontinuities: Vec<Discontinuity>,
}

impl SolutionSlice {
    /// Value at `x` from the nearest sample at or left of it.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let i = self.samples.partition_point(|s| s.x <= x);
        i.checked_sub(1).map(|i| self.samples[i].u)
    }

    /// Writes `X,u,provenance`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "X,u,provenance")?;
        for s in &self.samples {
            writeln!(w, "{:?},{:?},{}", s.x, s.u, s.provenance)?;
        }
        Ok(())
    }

    /// Writes `X,u_left,u_right`.
    pub fn write_discontinuities_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "X,u_left,u_right")?;
        for d in &self.discontinuities {
            writeln!(w, "{:?},{:?},{:?}", d.x, d.u_left, d.u_right)?;
        }
        Ok(())
    }
}

/// State on the fan centred at `fan_center` reaching `(x, t)`.
pub fn rarefaction_value(model: &FluxModel, profile: &PiecewiseProfile, fan_center: f64, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("rarefaction needs t > 0, got {t}")));
    }
    let fan = Fan::at(profile, model, fan_center)?;
    let ray = (x - fan_center) / t;
    let tol = 1e-12 * (1.0 + fan.h_lo.abs().max(fan.h_hi.abs()));
    if ray < fan.h_lo - tol || ray > fan.h_hi + tol {
        return Err(Error::OutOfFan { x, t });
    }
    Ok(fan.state(model, ray))
}

/// Value carried to `(x, t)` by a linear-speed segment before it focuses.
pub fn straight_line_value(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    seg: &StraightSegment,
    x: f64,
    t: f64,
) -> Result<f64> {
    let d = 1.0 + seg.k * t;
    if t < 0.0 {
        return Err(Error::Precondition(format!("negative time {t}")));
    }
    if d <= 0.0 {
        return Err(Error::FocusedSegment { t, t_focus: seg.focus_time() });
    }
    let x0 = (x - seg.k * seg.c * t) / d;
    let tol = 1e-12 * (1.0 + x0.abs());
    if x0 < seg.a - tol || x0 > seg.b + tol {
        return Err(Error::Precondition(format!("X = {x} outside the span of the segment at t = {t}")));
    }
    Ok(profile.local(model, seg.piece, x0).f)
}

/// Parametric curve `(x0 + h(x0) t, f(x0))`; folds where characteristics cross.
pub fn multivalue_surface(profile: &PiecewiseProfile, model: &FluxModel, t: f64, feet: &[f64]) -> Vec<(f64, f64)> {
    feet.iter()
        .map(|&x0| {
            let l = profile.local_at(model, x0);
            (x0 + l.h * t, l.f)
        })
        .collect()
}

/// Position on the initial line with fans opened up at their centres.
#[derive(Debug, Clone, Copy)]
struct Key {
    x: f64,
    rank: u8,
    ray: f64,
}

impl Key {
    fn foot(x: f64) -> Key {
        Key { x, rank: 0, ray: 0.0 }
    }

    fn cmp(&self, o: &Key) -> Ordering {
        self.x.total_cmp(&o.x).then(self.rank.cmp(&o.rank)).then(self.ray.total_cmp(&o.ray))
    }

    fn lt(&self, o: &Key) -> bool {
        self.cmp(o) == Ordering::Less
    }
}

enum Atom {
    Feet { piece: usize, a: f64, b: f64 },
    Rays { fan: usize },
}

struct Sweep<'a> {
    ctx: Ctx<'a>,
    segments: &'a [StraightSegment],
    t: f64,
    dx: f64,
    lo: f64,
    hi: f64,
    out: Vec<SliceSample>,
}

impl Sweep<'_> {
    fn source_key(&self, src: Source, xi: f64) -> Key {
        match src {
            Source::Foot { x, piece } => {
                let rank = if piece > 0 && x == self.ctx.profile.piece_bounds(piece).0 { 2 } else { 0 };
                Key { x, rank, ray: 0.0 }
            }
            Source::Fan { fan, center } => {
                let f = &self.ctx.fans[fan];
                let ray = ((xi - center) / self.t).clamp(f.h_lo, f.h_hi);
                Key { x: center, rank: 1, ray }
            }
        }
    }

    fn source_state(&self, src: Source, xi: f64) -> f64 {
        match src {
            Source::Foot { x, piece } => self.ctx.foot(x, piece).f,
            Source::Fan { fan, center } => self.ctx.fans[fan].state(self.ctx.model, (xi - center) / self.t),
        }
    }

    fn image(&self, piece: usize, x: f64) -> f64 {
        x + self.ctx.foot(x, piece).h * self.t
    }

    fn feet(&mut self, piece: usize, p: f64, q: f64, skip_start: bool) -> Result<()> {
        let mut x = p;
        if self.image(piece, q) < self.lo {
            return Ok(());
        }
        if self.image(piece, p) < self.lo {
            let (mut a, mut b) = (p, q);
            for _ in 0..BISECT_ITERS {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if self.image(piece, m) < self.lo {
                    a = m;
                } else {
                    b = m;
                }
            }
            x = b;
        } else if skip_start {
            x = self.next_foot(piece, x);
        }
        let seg = self.segments.iter().find(|s| {
            s.piece == piece && (s.k >= 0.0 || 1.0 + s.k * self.t > 0.0)
        });
        while x < q {
            let l = self.ctx.profile.local(self.ctx.model, piece, x);
            let big_x = x + l.h * self.t;
            if big_x > self.hi {
                break;
            }
            let (u, provenance) = match seg {
                Some(s) if x >= s.a && x <= s.b => (straight_line_value(self.ctx.profile, self.ctx.model, s, big_x, self.t)?, Provenance::StraightLine),
                _ => (l.f, Provenance::Characteristic),
            };
            self.out.push(SliceSample { x: big_x, u, provenance });
            x = self.next_foot(piece, x);
        }
        Ok(())
    }

    fn next_foot(&self, piece: usize, x: f64) -> f64 {
        let d = 1.0 + self.ctx.foot(x, piece).dh * self.t;
        x + self.dx / d.max(1e-6)
    }

    fn rays(&mut self, fan: usize, r1: f64, r2: f64, skip_start: bool) {
        let f = &self.ctx.fans[fan];
        let (x1, x2) = (f.center + r1 * self.t, f.center + r2 * self.t);
        let start = x1.max(self.lo);
        let mut j = if skip_start && start == x1 { 1 } else { 0 };
        loop {
            let x = start + j as f64 * self.dx;
            if x >= x2 || x > self.hi {
                break;
            }
            let u = f.state(self.ctx.model, (x - f.center) / self.t);
            self.out.push(SliceSample { x, u, provenance: Provenance::Rarefaction });
            j += 1;
        }
    }
}

/// Sweeps the initial line at time `t` with output spacing about `dx`.
pub fn sweep_solution(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    graph: &ShockGraph,
    t: f64,
    dx: f64,
) -> Result<SolutionSlice> {
    if !(dx > 0.0) || !(t >= 0.0) {
        return Err(Error::Precondition(format!("need t >= 0 and dX > 0, got {t} and {dx}")));
    }
    if t > graph.t_end {
        return Err(Error::MissingGraph { covered: graph.t_end, requested: t });
    }
    let ctx = Ctx { profile, model, fans: &graph.fans };
    let (lo, hi) = profile.domain_hint();
    let reach = (0..=SCAN)
        .map(|i| profile.local_at(model, lo + (hi - lo) * i as f64 / SCAN as f64).h.abs())
        .fold(0.0, f64::max)
        * t;
    let (x_lo, x_hi) = (lo - reach - dx, hi + reach + dx);

    let mut states: Vec<(usize, Sample)> = Vec::new();
    for c in graph.alive_at(t) {
        let s = c.sample_before(t).expect("alive curve has a sample");
        let s = if s.t == t { *s } else { ctx.integrate(s, t)? };
        states.push((c.id, s));
    }

    let mut sw = Sweep { ctx, segments: &graph.segments, t, dx, lo, hi, out: Vec::new() };
    let mut swallowed: Vec<(Key, Key)> = states
        .iter()
        .map(|(_, s)| (sw.source_key(s.left, s.xi), sw.source_key(s.right, s.xi)))
        .collect();
    swallowed.sort_by(|a, b| a.0.cmp(&b.0));

    let n = profile.pieces().len();
    let mut atoms = Vec::new();
    for i in 0..n {
        let (a, b) = profile.piece_bounds(i);
        let (a, b) = (a.max(x_lo), b.min(x_hi));
        if a < b {
            atoms.push(Atom::Feet { piece: i, a, b });
        }
        if i + 1 < n {
            if let Some(f) = graph.fans.iter().find(|f| f.center == b && f.h_lo < f.h_hi) {
                atoms.push(Atom::Rays { fan: f.id });
            }
        }
    }

    for atom in &atoms {
        let (start, end) = match *atom {
            Atom::Feet { piece, a, b } => {
                let rank = if piece > 0 && a == profile.piece_bounds(piece).0 { 2 } else { 0 };
                (Key { x: a, rank, ray: 0.0 }, Key::foot(b))
            }
            Atom::Rays { fan } => {
                let f = &graph.fans[fan];
                (Key { x: f.center, rank: 1, ray: f.h_lo }, Key { x: f.center, rank: 1, ray: f.h_hi })
            }
        };
        let mut visible = Vec::new();
        let (mut cur, mut after_shock) = (start, false);
        for (k1, k2) in &swallowed {
            if !(k1.lt(&end) && start.lt(k2)) {
                continue;
            }
            if cur.lt(k1) {
                visible.push((cur, *k1, after_shock));
            }
            if cur.lt(k2) {
                cur = *k2;
                after_shock = true;
            }
        }
        if cur.lt(&end) {
            visible.push((cur, end, after_shock));
        }
        for (p, q, skip) in visible {
            match *atom {
                Atom::Feet { piece, .. } => sw.feet(piece, p.x, q.x, skip)?,
                Atom::Rays { fan } => sw.rays(fan, p.ray, q.ray, skip),
            }
        }
    }

    let discontinuities = states
        .iter()
        .filter(|(_, s)| s.xi >= lo && s.xi <= hi)
        .map(|&(curve, s)| Discontinuity {
            x: s.xi,
            u_left: sw.source_state(s.left, s.xi),
            u_right: sw.source_state(s.right, s.xi),
            curve,
        })
        .collect();

    if let Some(w) = sw.out.windows(2).find(|w| w[1].x <= w[0].x) {
        return Err(Error::Consistency {
            t,
            msg: format!("swept positions fold at X = {} then {}", w[0].x, w[1].x),
        });
    }
    Ok(SolutionSlice { time: t, samples: sw.out, discontinuities })
}
