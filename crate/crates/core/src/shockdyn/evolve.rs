//! Event-driven evolution of all shock curves of a profile.

use super::motion::Ctx;
use super::{CurveStatus, Event, EventKind, Fan, Origin, Participant, Sample, ShockCurve, ShockGraph, Source};
use crate::classify::{
    classify_points, min_gap, seed_all, CriticalPoint, PointKind, SeedRegime, ShockSeed, StraightSegment,
    DELTA_DEFAULT_FRACTION, DELTA_MAX_FRACTION,
};
use crate::error::{Error, Foot, Result};
use crate::flux::FluxModel;
use crate::profile::PiecewiseProfile;

const LOCATE_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Seed offset; defaults to a thousandth of the smallest gap between
    /// critical points.
    pub delta: Option<f64>,
    /// Shorten the step before an activation so later steps land on it.
    pub phased_step: bool,
}

impl EvolveOptions {
    pub fn new(t_end: f64, dt: f64) -> Self {
        EvolveOptions { t_end, dt, delta: None, phased_step: false }
    }
}

#[derive(Debug, Clone)]
enum Task {
    Seed(ShockSeed),
    Segment(usize),
}

#[derive(Debug, Clone)]
struct Pending {
    t: f64,
    x: f64,
    task: Task,
}

#[derive(Debug, Clone, Copy)]
struct Live {
    curve: usize,
    s: Sample,
}

#[derive(Debug, Clone, Copy)]
enum Cand {
    Barrier { live: usize, side: Foot, x: f64, point: usize },
    Exit { live: usize, side: Foot },
    Merge { left: usize },
}

/// Runs the graph forward one step at a time.
pub struct Evolver<'a> {
    profile: &'a PiecewiseProfile,
    model: &'a FluxModel,
    opts: EvolveOptions,
    graph: ShockGraph,
    live: Vec<Live>,
    pending: Vec<Pending>,
    activated: Vec<bool>,
    cancelled: Vec<bool>,
    fan_of_point: Vec<Option<usize>>,
    bp_point: Vec<usize>,
    /// Interior third-kind points by piece, sorted by location.
    interior: Vec<Vec<(f64, usize)>>,
    t: f64,
}

/// Complete graph on `[0, opts.t_end]`.
pub fn evolve(profile: &PiecewiseProfile, model: &FluxModel, opts: EvolveOptions) -> Result<ShockGraph> {
    let mut ev = Evolver::new(profile, model, opts)?;
    while !ev.finished() {
        ev.advance()?;
    }
    Ok(ev.into_graph())
}

impl<'a> Evolver<'a> {
    pub fn new(profile: &'a PiecewiseProfile, model: &'a FluxModel, opts: EvolveOptions) -> Result<Self> {
        if !(opts.t_end > 0.0 && opts.dt > 0.0) {
            return Err(Error::Precondition(format!("need T > 0 and dt > 0, got {} and {}", opts.t_end, opts.dt)));
        }
        let points = classify_points(profile, model)?;
        let gap = min_gap(&points, profile);
        let delta = opts.delta.unwrap_or(DELTA_DEFAULT_FRACTION * gap);
        if !(delta > 0.0 && delta <= DELTA_MAX_FRACTION * gap) {
            return Err(Error::Precondition(format!("delta {delta} outside (0, {}]", DELTA_MAX_FRACTION * gap)));
        }
        let mut fans = Vec::new();
        let mut fan_of_point = vec![None; points.len()];
        for p in points.iter().filter(|p| p.kind.has_fan()) {
            fan_of_point[p.id] = Some(fans.len());
            fans.push(Fan::from_point(model, fans.len(), p)?);
        }
        let mut bp_point = Vec::new();
        let mut interior = vec![Vec::new(); profile.pieces().len()];
        for p in &points {
            if p.at_breakpoint {
                bp_point.push(p.id);
            } else {
                interior[p.left.piece].push((p.x, p.id));
            }
        }
        let mut segments: Vec<StraightSegment> = Vec::new();
        for p in &points {
            if let Some(seg) = p.segment {
                if !segments.iter().any(|s| s.piece == seg.piece) {
                    segments.push(seg);
                }
            }
        }
        let mut pending = Vec::new();
        for p in points.iter().filter(|p| p.kind.is_shock()) {
            for seed in seed_all(profile, model, p, delta, -1.0)? {
                pending.push(Pending { t: seed.t0.max(0.0), x: p.x, task: Task::Seed(seed) });
            }
        }
        for (i, seg) in segments.iter().enumerate() {
            if seg.a.is_finite() && seg.b.is_finite() && seg.k < 0.0 {
                pending.push(Pending { t: seg.focus_time(), x: seg.a, task: Task::Segment(i) });
            }
        }
        pending.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.x.total_cmp(&b.x)));
        let n = points.len();
        let mut ev = Evolver {
            profile,
            model,
            opts,
            graph: ShockGraph {
                points,
                segments,
                fans,
                curves: Vec::new(),
                events: Vec::new(),
                cancelled_points: Vec::new(),
                delta,
                t_end: 0.0,
            },
            live: Vec::new(),
            pending,
            activated: vec![false; n],
            cancelled: vec![false; n],
            fan_of_point,
            bp_point,
            interior,
            t: 0.0,
        };
        ev.activate_due()?;
        Ok(ev)
    }

    fn ctx(&self) -> Ctx<'_> {
        Ctx { profile: self.profile, model: self.model, fans: &self.graph.fans }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn finished(&self) -> bool {
        self.t >= self.opts.t_end
    }

    pub fn graph(&self) -> &ShockGraph {
        &self.graph
    }

    pub fn into_graph(mut self) -> ShockGraph {
        for l in &self.live {
            self.graph.curves[l.curve].status = CurveStatus::Finished;
        }
        self.graph.t_end = self.t;
        self.graph
    }

    fn record(&mut self, curve: usize, s: Sample) {
        let samples = &mut self.graph.curves[curve].samples;
        match samples.last_mut() {
            Some(last) if last.t >= s.t => *last = s,
            _ => samples.push(s),
        }
    }

    fn record_live(&mut self) {
        for i in 0..self.live.len() {
            let l = self.live[i];
            self.record(l.curve, l.s);
        }
    }

    fn new_curve(&mut self, origin: Origin, s: Sample) -> usize {
        let id = self.graph.curves.len();
        self.graph.curves.push(ShockCurve { id, origin, samples: vec![s], status: CurveStatus::Active });
        self.live.push(Live { curve: id, s });
        self.sort_live();
        id
    }

    fn sort_live(&mut self) {
        self.live.sort_by(|a, b| {
            a.s.xi
                .total_cmp(&b.s.xi)
                .then(a.s.left.x().total_cmp(&b.s.left.x()))
                .then(a.curve.cmp(&b.curve))
        });
    }

    fn event(&mut self, kind: EventKind, participants: Vec<Participant>) {
        self.graph.events.push(Event { time: self.t, kind, participants });
    }

    /// Whether `(lo, hi)` overlaps the foot span of a live curve.
    fn overlaps_live(&self, lo: f64, hi: f64) -> bool {
        self.live.iter().any(|l| {
            let (a, b) = (l.s.left.x(), l.s.right.x());
            lo.max(a) < hi.min(b)
        })
    }

    fn activate_due(&mut self) -> Result<()> {
        let eps = 1e-12 * self.t.abs().max(1.0);
        while let Some(p) = self.pending.first() {
            if p.t > self.t + eps {
                break;
            }
            let p = self.pending.remove(0);
            match p.task {
                Task::Seed(seed) => self.activate_seed(seed)?,
                Task::Segment(i) => self.activate_segment(i)?,
            }
        }
        Ok(())
    }

    fn activate_seed(&mut self, seed: ShockSeed) -> Result<()> {
        let point = self.graph.points[seed.origin].clone();
        if self.cancelled[point.id] {
            return Ok(());
        }
        let lo = seed.xl0.min(point.x);
        let hi = seed.xr0.max(point.x);
        if self.overlaps_live(lo, hi) {
            self.cancel_point(point.id, None);
            return Ok(());
        }
        self.activated[point.id] = true;
        let t0 = seed.t0.max(0.0);
        let fan = self.fan_of_point[point.id];
        let (left, right) = match seed.regime {
            SeedRegime::Kind1 => (
                Source::Foot { x: seed.xl0, piece: seed.left_piece },
                Source::Foot { x: seed.xr0, piece: seed.right_piece },
            ),
            SeedRegime::Kind2CrossFromLeft => (
                Source::Foot { x: seed.xl0, piece: seed.left_piece },
                Source::Fan { fan: fan.expect("fourth-kind point has a fan"), center: point.x },
            ),
            SeedRegime::Kind2CrossFromRight => (
                Source::Fan { fan: fan.expect("fourth-kind point has a fan"), center: point.x },
                Source::Foot { x: seed.xr0, piece: seed.right_piece },
            ),
        };
        let s = self.ctx().synced(Sample { t: t0, left, right, xi: f64::NAN });
        let id = self.new_curve(Origin::Point(point.id), s);
        if let Some(f) = fan {
            self.event(
                EventKind::EnterRarefaction,
                vec![Participant::Curve(id), Participant::Point(point.id), Participant::Fan(f)],
            );
        }
        Ok(())
    }

    fn activate_segment(&mut self, i: usize) -> Result<()> {
        let seg = self.graph.segments[i];
        let ends: Vec<usize> = self
            .graph
            .points
            .iter()
            .filter(|p| p.segment.is_some_and(|s| s.piece == seg.piece))
            .map(|p| p.id)
            .collect();
        if ends.iter().any(|&p| self.cancelled[p]) || self.overlaps_live(seg.a, seg.b) {
            return Ok(());
        }
        if seg.piece == 0 || seg.piece + 1 >= self.profile.pieces().len() {
            return Ok(());
        }
        for &p in &ends {
            self.activated[p] = true;
        }
        let left = Source::Foot { x: seg.a, piece: seg.piece - 1 };
        let right = Source::Foot { x: seg.b, piece: seg.piece + 1 };
        let s = self.ctx().synced(Sample { t: self.t, left, right, xi: f64::NAN });
        let id = self.new_curve(Origin::Segment(i), s);
        let mut parts = vec![Participant::Curve(id)];
        parts.extend(ends.iter().map(|&p| Participant::Point(p)));
        self.event(EventKind::StraightLineActivate, parts);
        Ok(())
    }

    /// Drops the pending work of point `id`; for a fourth-kind point only
    /// the seed of `side` when given.
    fn cancel_point(&mut self, id: usize, side: Option<Foot>) {
        if self.cancelled[id] {
            return;
        }
        let point = &self.graph.points[id];
        let seg_piece = point.segment.map(|s| s.piece);
        let before = self.pending.len();
        let segments = &self.graph.segments;
        self.pending.retain(|p| match &p.task {
            Task::Seed(s) => {
                if s.origin != id {
                    return true;
                }
                match side {
                    Some(Foot::Left) => s.regime != SeedRegime::Kind2CrossFromLeft,
                    Some(Foot::Right) => s.regime != SeedRegime::Kind2CrossFromRight,
                    None => false,
                }
            }
            Task::Segment(i) => Some(segments[*i].piece) != seg_piece,
        });
        let removed = before != self.pending.len();
        let mut cancelled = vec![];
        if removed || (!self.activated[id] && point.kind != PointKind::Inert) {
            let still_pending = self.pending.iter().any(|p| matches!(&p.task, Task::Seed(s) if s.origin == id));
            if !still_pending && !self.activated[id] {
                cancelled.push(id);
            }
            if let Some(piece) = seg_piece {
                for q in &self.graph.points {
                    if q.id != id && q.segment.is_some_and(|s| s.piece == piece) && !self.activated[q.id] {
                        cancelled.push(q.id);
                    }
                }
            }
        }
        if !removed && cancelled.is_empty() {
            return;
        }
        let mut parts = vec![Participant::Point(id)];
        for &c in &cancelled {
            self.cancelled[c] = true;
            self.graph.cancelled_points.push(c);
            if c != id {
                parts.push(Participant::Point(c));
            }
        }
        self.event(EventKind::CancelPoint, parts);
    }

    /// Nearest barrier ahead of a foot: the end of its piece or a pending
    /// interior point.
    fn barrier(&self, s: &Sample, side: Foot) -> Option<(f64, usize)> {
        let (src, dir) = match side {
            Foot::Left => (s.left, -1.0),
            Foot::Right => (s.right, 1.0),
        };
        let Source::Foot { x, piece } = src else { return None };
        let (lo, hi) = self.profile.piece_bounds(piece);
        let mut best = if dir < 0.0 {
            lo.is_finite().then(|| (lo, self.bp_point[piece - 1]))
        } else {
            hi.is_finite().then(|| (hi, self.bp_point[piece]))
        };
        for &(px, id) in &self.interior[piece] {
            if self.activated[id] || self.cancelled[id] {
                continue;
            }
            let ahead = if dir < 0.0 { px < x } else { px > x };
            let nearer = best.is_none_or(|(bx, _)| if dir < 0.0 { px > bx } else { px < bx });
            if ahead && nearer {
                best = Some((px, id));
            }
        }
        best
    }

    fn gauge(&self, c: &Cand, states: &[Sample]) -> f64 {
        let ctx = self.ctx();
        match *c {
            Cand::Barrier { live, side, x, .. } => match side {
                Foot::Left => states[live].left.x() - x,
                Foot::Right => x - states[live].right.x(),
            },
            Cand::Exit { live, side } => {
                let s = &states[live];
                let ray = ctx.ray(s, side).unwrap_or(f64::NAN);
                let fan = match side {
                    Foot::Left => s.left,
                    Foot::Right => s.right,
                };
                let Source::Fan { fan, .. } = fan else { return f64::NAN };
                let fan = &self.graph.fans[fan];
                match side {
                    Foot::Left => ray - fan.h_lo,
                    Foot::Right => fan.h_hi - ray,
                }
            }
            Cand::Merge { left } => states[left + 1].xi - states[left].xi,
        }
    }

    fn candidates(&self, starts: &[Sample]) -> Vec<Cand> {
        let mut out = Vec::new();
        for (i, s) in starts.iter().enumerate() {
            for side in [Foot::Left, Foot::Right] {
                let src = match side {
                    Foot::Left => s.left,
                    Foot::Right => s.right,
                };
                match src {
                    Source::Foot { .. } => {
                        if let Some((x, point)) = self.barrier(s, side) {
                            out.push(Cand::Barrier { live: i, side, x, point });
                        }
                    }
                    Source::Fan { .. } => out.push(Cand::Exit { live: i, side }),
                }
            }
        }
        for i in 0..starts.len().saturating_sub(1) {
            out.push(Cand::Merge { left: i });
        }
        out
    }

    fn participants(c: &Cand) -> Vec<usize> {
        match *c {
            Cand::Barrier { live, .. } | Cand::Exit { live, .. } => vec![live],
            Cand::Merge { left } => vec![left, left + 1],
        }
    }

    fn abort(&mut self, curve: usize, err: Error) -> Error {
        self.event(EventKind::SingularReseed, vec![Participant::Curve(curve)]);
        Error::Aborted { t: self.t, msg: format!("curve {curve}: {err}") }
    }

    fn integrate_all(&mut self, t1: f64) -> Result<Vec<Sample>> {
        let mut out = Vec::with_capacity(self.live.len());
        for i in 0..self.live.len() {
            let r = self.ctx().integrate(&self.live[i].s, t1);
            match r {
                Ok(s) => out.push(s),
                Err(e) => {
                    let c = self.live[i].curve;
                    return Err(self.abort(c, e));
                }
            }
        }
        Ok(out)
    }

    /// Smallest `tau` in `[0, h]` at which `c` fires, with the states there.
    fn locate(&self, c: &Cand, starts: &[Sample], h: f64) -> Result<(f64, Vec<Sample>)> {
        let ctx = self.ctx();
        let idx = Self::participants(c);
        let at = |tau: f64| -> Result<Vec<Sample>> {
            let mut states = starts.to_vec();
            for &i in &idx {
                states[i] = if tau == 0.0 { starts[i] } else { ctx.integrate(&starts[i], self.t + tau)? };
            }
            Ok(states)
        };
        let g0 = self.gauge(c, starts);
        if !(g0 > 0.0) {
            return Ok((0.0, starts.to_vec()));
        }
        let (mut a, mut ga) = (0.0, g0);
        let mut sb = at(h)?;
        let (mut b, mut gb) = (h, self.gauge(c, &sb));
        let tol = 1e-14 * (self.t + h).abs().max(1.0);
        let mut last = 0;
        for _ in 0..LOCATE_ITERS {
            if b - a <= tol {
                break;
            }
            let mut m = b - gb * (b - a) / (gb - ga);
            if !(m > a && m < b) {
                m = 0.5 * (a + b);
            }
            let sm = at(m)?;
            let gm = self.gauge(c, &sm);
            if gm > 0.0 {
                a = m;
                ga = gm;
                if last == -1 {
                    gb *= 0.5;
                }
                last = -1;
            } else {
                b = m;
                gb = gm;
                sb = sm;
                if last == 1 {
                    ga *= 0.5;
                }
                last = 1;
                if gm == 0.0 {
                    break;
                }
            }
        }
        Ok((b, sb))
    }

    fn event_x(&self, c: &Cand, states: &[Sample]) -> f64 {
        match *c {
            Cand::Barrier { x, .. } => x,
            Cand::Exit { live, .. } => states[live].xi,
            Cand::Merge { left } => states[left].xi,
        }
    }

    fn next_activation(&self) -> f64 {
        self.pending.first().map_or(f64::INFINITY, |p| p.t)
    }

    /// Advances by one step of at most `dt`, stopping at the first event.
    pub fn advance(&mut self) -> Result<()> {
        let t = self.t;
        let dt = self.opts.dt;
        let t_act = self.next_activation();
        let mut t1 = (t + dt).min(self.opts.t_end);
        if self.opts.phased_step && t_act > t1 && t_act < self.opts.t_end {
            let rem = (t_act - t) - ((t_act - t) / dt).floor() * dt;
            if rem > 1e-9 * dt {
                t1 = t + rem;
            }
        }
        if t_act < t1 {
            t1 = t_act;
        }
        let h = t1 - t;
        let starts: Vec<Sample> = self.live.iter().map(|l| l.s).collect();
        let ends = if h > 0.0 { self.integrate_all(t1)? } else { starts.clone() };

        let mut fired: Option<(f64, f64, Cand, Vec<Sample>)> = None;
        for c in self.candidates(&starts) {
            let g0 = self.gauge(&c, &starts);
            let g1 = self.gauge(&c, &ends);
            if g0 > 0.0 && !(g1 <= 0.0) {
                continue;
            }
            let (tau, states) = match self.locate(&c, &starts, h) {
                Ok(r) => r,
                Err(e) => {
                    let curve = self.live[Self::participants(&c)[0]].curve;
                    return Err(self.abort(curve, e));
                }
            };
            let x = self.event_x(&c, &states);
            let tol = 1e-14 * t1.abs().max(1.0);
            let better = match &fired {
                None => true,
                Some((bt, bx, _, _)) => tau < bt - tol || (tau <= bt + tol && x < *bx),
            };
            if better {
                fired = Some((tau, x, c, states));
            }
        }

        match fired {
            None => {
                for (l, s) in self.live.iter_mut().zip(ends) {
                    l.s = s;
                }
                self.t = t1;
                self.record_live();
            }
            Some((tau, _, c, states)) => {
                let te = t + tau;
                let idx = Self::participants(&c);
                let mut next = Vec::with_capacity(self.live.len());
                for (i, s) in starts.iter().enumerate() {
                    if idx.contains(&i) {
                        next.push(states[i]);
                    } else if tau == 0.0 {
                        next.push(*s);
                    } else if te == t1 {
                        next.push(ends[i]);
                    } else {
                        match self.ctx().integrate(s, te) {
                            Ok(n) => next.push(n),
                            Err(e) => {
                                let curve = self.live[i].curve;
                                return Err(self.abort(curve, e));
                            }
                        }
                    }
                }
                for (l, s) in self.live.iter_mut().zip(next) {
                    l.s = s;
                    l.s.t = te;
                }
                self.t = te;
                self.record_live();
                self.apply(c)?;
            }
        }
        self.activate_due()
    }

    fn apply(&mut self, c: Cand) -> Result<()> {
        match c {
            Cand::Barrier { live, side, x, point } => self.cross(live, side, x, point),
            Cand::Exit { live, side } => {
                let l = self.live[live];
                let src = match side {
                    Foot::Left => l.s.left,
                    Foot::Right => l.s.right,
                };
                let Source::Fan { fan, center } = src else {
                    return Err(Error::Consistency { t: self.t, msg: "fan exit without fan".into() });
                };
                let f = &self.graph.fans[fan];
                let foot = match side {
                    Foot::Left => Source::Foot { x: center, piece: f.left_piece },
                    Foot::Right => Source::Foot { x: center, piece: f.right_piece },
                };
                let mut s = l.s;
                match side {
                    Foot::Left => s.left = foot,
                    Foot::Right => s.right = foot,
                }
                s = self.ctx().synced(s);
                self.live[live].s = s;
                self.record(l.curve, s);
                self.event(EventKind::ExitRarefaction, vec![Participant::Curve(l.curve), Participant::Fan(fan)]);
                Ok(())
            }
            Cand::Merge { left } => {
                let (a, b) = (self.live[left], self.live[left + 1]);
                let xi = 0.5 * (a.s.xi + b.s.xi);
                let s = self.ctx().synced(Sample { t: self.t, left: a.s.left, right: b.s.right, xi });
                self.ctx().rates(&s).map_err(|e| Error::Aborted { t: self.t, msg: format!("merged shock: {e}") })?;
                self.live.retain(|l| l.curve != a.curve && l.curve != b.curve);
                let id = self.new_curve(Origin::Merge(a.curve, b.curve), s);
                self.graph.curves[a.curve].status = CurveStatus::Merged(id);
                self.graph.curves[b.curve].status = CurveStatus::Merged(id);
                self.event(
                    EventKind::Merge,
                    vec![Participant::Curve(a.curve), Participant::Curve(b.curve), Participant::Curve(id)],
                );
                Ok(())
            }
        }
    }

    /// A foot reached the point `point` at `x`.
    fn cross(&mut self, live: usize, side: Foot, x: f64, point: usize) -> Result<()> {
        let p: CriticalPoint = self.graph.points[point].clone();
        let l = self.live[live];
        let src = match side {
            Foot::Left => l.s.left,
            Foot::Right => l.s.right,
        };
        let Source::Foot { piece, .. } = src else {
            return Err(Error::Consistency { t: self.t, msg: "barrier crossing without foot".into() });
        };
        // the side of the point the foot arrives from
        let from = match side {
            Foot::Left => Foot::Right,
            Foot::Right => Foot::Left,
        };
        if p.kind == PointKind::Shock4 {
            self.cancel_point(point, Some(from));
        } else if !self.activated[point] && p.kind != PointKind::Inert && p.kind != PointKind::Rarefaction {
            self.cancel_point(point, None);
        }
        let new_src = if !p.at_breakpoint {
            Source::Foot { x, piece }
        } else if let Some(fan) = self.fan_of_point[point] {
            Source::Fan { fan, center: x }
        } else {
            let piece = match side {
                Foot::Left => piece - 1,
                Foot::Right => piece + 1,
            };
            Source::Foot { x, piece }
        };
        let mut s = l.s;
        match side {
            Foot::Left => s.left = new_src,
            Foot::Right => s.right = new_src,
        }
        s = self.ctx().synced(s);
        self.live[live].s = s;
        self.record(l.curve, s);
        if let Source::Fan { fan, .. } = new_src {
            self.event(
                EventKind::EnterRarefaction,
                vec![Participant::Curve(l.curve), Participant::Point(point), Participant::Fan(fan)],
            );
        }
        Ok(())
    }
}
