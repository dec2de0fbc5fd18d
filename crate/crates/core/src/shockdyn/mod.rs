//! Shock curves: the foot equations, their integration, and the graph of
//! curves, fans and events produced by a run.

mod evolve;
pub(crate) mod motion;

use std::fmt;
use std::io::{self, Write};

use crate::classify::{CriticalPoint, StraightSegment};
use crate::error::{Error, Foot, Result};
use crate::flux::FluxModel;
use crate::profile::{PiecewiseProfile, Side};

pub use evolve::{evolve, EvolveOptions, Evolver};
pub use motion::advance_sample;

/// Largest admitted mismatch between the two feet's characteristic
/// positions at a first-kind sample.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Rarefaction fan centred at a point where `h` jumps up.
#[derive(Debug, Clone, PartialEq)]
pub struct Fan {
    pub id: usize,
    pub point: Option<usize>,
    pub center: f64,
    pub u_left: f64,
    pub u_right: f64,
    /// Speeds of the bounding rays, `h(x*-)` and `h(x*+)`.
    pub h_lo: f64,
    pub h_hi: f64,
    pub left_piece: usize,
    pub right_piece: usize,
}

impl Fan {
    /// Fan between the states `u_left` and `u_right` at `center`.
    pub fn new(model: &FluxModel, center: f64, u_left: f64, u_right: f64) -> Result<Fan> {
        if !model.is_monotone_on(u_left.min(u_right), u_left.max(u_right)) {
            return Err(Error::InvalidBracket { a: u_left, b: u_right });
        }
        let (h_lo, h_hi) = (model.speed(u_left), model.speed(u_right));
        if !(h_lo <= h_hi) {
            return Err(Error::Precondition(format!("fan at {center} has decreasing speeds {h_lo} > {h_hi}")));
        }
        Ok(Fan { id: 0, point: None, center, u_left, u_right, h_lo, h_hi, left_piece: 0, right_piece: 0 })
    }

    /// Fan of the profile at the breakpoint `center`.
    pub fn at(profile: &PiecewiseProfile, model: &FluxModel, center: f64) -> Result<Fan> {
        let left_piece = profile.piece_index(center, Side::Left)?;
        let right_piece = profile.piece_index(center, Side::Right)?;
        let ul = profile.pieces()[left_piece].eval(center);
        let ur = profile.pieces()[right_piece].eval(center);
        let mut fan = Fan::new(model, center, ul, ur)?;
        fan.left_piece = left_piece;
        fan.right_piece = right_piece;
        Ok(fan)
    }

    pub(crate) fn from_point(model: &FluxModel, id: usize, p: &CriticalPoint) -> Result<Fan> {
        let mut fan = Fan::new(model, p.x, p.left.f, p.right.f)?;
        fan.id = id;
        fan.point = Some(p.id);
        fan.left_piece = p.left.piece;
        fan.right_piece = p.right.piece;
        Ok(fan)
    }

    /// State on the ray of speed `ray`, clamped to the fan's edges.
    pub fn state(&self, model: &FluxModel, ray: f64) -> f64 {
        let (a, b) = (self.u_left.min(self.u_right), self.u_left.max(self.u_right));
        model.invert_unchecked(ray, a, b)
    }

    pub fn contains_ray(&self, ray: f64) -> bool {
        ray >= self.h_lo && ray <= self.h_hi
    }
}

/// Where one side state of a shock comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// A characteristic foot on the initial line, served by `piece`.
    Foot { x: f64, piece: usize },
    /// A ray of a rarefaction fan.
    Fan { fan: usize, center: f64 },
}

impl Source {
    /// Foot coordinate, or the fan centre.
    pub fn x(&self) -> f64 {
        match *self {
            Source::Foot { x, .. } => x,
            Source::Fan { center, .. } => center,
        }
    }

    pub fn is_fan(&self) -> bool {
        matches!(self, Source::Fan { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Kind1,
    Kind2CrossFromLeft,
    Kind2CrossFromRight,
    Kind3 { x1: f64, x2: f64 },
}

impl Regime {
    pub fn of(left: &Source, right: &Source) -> Regime {
        match (left, right) {
            (Source::Foot { .. }, Source::Foot { .. }) => Regime::Kind1,
            (Source::Foot { .. }, Source::Fan { .. }) => Regime::Kind2CrossFromLeft,
            (Source::Fan { .. }, Source::Foot { .. }) => Regime::Kind2CrossFromRight,
            (Source::Fan { center: x1, .. }, Source::Fan { center: x2, .. }) => Regime::Kind3 { x1: *x1, x2: *x2 },
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Kind1 => f.write_str("kind1"),
            Regime::Kind2CrossFromLeft => f.write_str("kind2_left"),
            Regime::Kind2CrossFromRight => f.write_str("kind2_right"),
            Regime::Kind3 { .. } => f.write_str("kind3"),
        }
    }
}

/// State of a shock curve at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub left: Source,
    pub right: Source,
    pub xi: f64,
}

impl Sample {
    pub fn regime(&self) -> Regime {
        Regime::of(&self.left, &self.right)
    }

    pub fn x_l(&self) -> f64 {
        self.left.x()
    }

    pub fn x_r(&self) -> f64 {
        self.right.x()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveStatus {
    Active,
    Merged(usize),
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Point(usize),
    /// Focus of the straight segment with this index.
    Segment(usize),
    Merge(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockCurve {
    pub id: usize,
    pub origin: Origin,
    pub samples: Vec<Sample>,
    pub status: CurveStatus,
}

impl ShockCurve {
    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_stop(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Whether the curve takes part in the solution at `t`; curves ending
    /// in a merge at `t` are replaced by the merged curve.
    pub fn alive_at(&self, t: f64) -> bool {
        let stop = self.t_stop();
        self.t_start() <= t
            && match self.status {
                CurveStatus::Merged(_) => t < stop,
                _ => t <= stop,
            }
    }

    /// Last sample with `sample.t <= t`.
    pub fn sample_before(&self, t: f64) -> Option<&Sample> {
        let i = self.samples.partition_point(|s| s.t <= t);
        i.checked_sub(1).map(|i| &self.samples[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    CancelPoint,
    Merge,
    EnterRarefaction,
    ExitRarefaction,
    StraightLineActivate,
    SingularReseed,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::CancelPoint => "cancel_point",
            EventKind::Merge => "merge",
            EventKind::EnterRarefaction => "enter_rarefaction",
            EventKind::ExitRarefaction => "exit_rarefaction",
            EventKind::StraightLineActivate => "straight_line_activate",
            EventKind::SingularReseed => "singular_reseed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Participant {
    Curve(usize),
    Point(usize),
    Fan(usize),
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Participant::Curve(i) => write!(f, "curve:{i}"),
            Participant::Point(i) => write!(f, "point:{i}"),
            Participant::Fan(i) => write!(f, "fan:{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub participants: Vec<Participant>,
}

/// Everything a run produced on `[0, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockGraph {
    pub points: Vec<CriticalPoint>,
    pub segments: Vec<StraightSegment>,
    pub fans: Vec<Fan>,
    pub curves: Vec<ShockCurve>,
    pub events: Vec<Event>,
    pub cancelled_points: Vec<usize>,
    pub delta: f64,
    pub t_end: f64,
}

impl ShockGraph {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Curves taking part in the solution at `t`, left to right.
    pub fn alive_at(&self, t: f64) -> Vec<&ShockCurve> {
        let mut out: Vec<&ShockCurve> = self.curves.iter().filter(|c| c.alive_at(t)).collect();
        out.sort_by(|a, b| {
            let (sa, sb) = (a.sample_before(t).unwrap(), b.sample_before(t).unwrap());
            sa.xi.total_cmp(&sb.xi).then(sa.x_l().total_cmp(&sb.x_l()))
        });
        out
    }

    /// Writes `curve_id,regime,t,x_l,x_r,xi`, one row per sample.
    pub fn write_curves_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "curve_id,regime,t,x_l,x_r,xi")?;
        for c in &self.curves {
            for s in &c.samples {
                writeln!(w, "{},{},{:?},{:?},{:?},{:?}", c.id, s.regime(), s.t, s.x_l(), s.x_r(), s.xi)?;
            }
        }
        Ok(())
    }

    /// Writes `time,type,participants` with participants separated by spaces.
    pub fn write_events_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "time,type,participants")?;
        for e in &self.events {
            let parts: Vec<String> = e.participants.iter().map(|p| p.to_string()).collect();
            writeln!(w, "{:?},{},{}", e.time, e.kind, parts.join(" "))?;
        }
        Ok(())
    }
}

/// Jump-condition speed `(G(u_r) - G(u_l)) / (u_r - u_l)`.
pub fn shock_speed(model: &FluxModel, u_l: f64, u_r: f64) -> Result<f64> {
    if u_l == u_r {
        return Err(Error::DegenerateJump(u_l));
    }
    Ok(model.chord_slope(u_l, u_r))
}

/// Foot velocities of a first-kind shock with feet `x_l`, `x_r` at time `t`.
/// The left foot uses left limits and the right foot right limits.
pub fn rhs_kind1(profile: &PiecewiseProfile, model: &FluxModel, x_l: f64, x_r: f64, t: f64) -> Result<(f64, f64)> {
    let left = Source::Foot { x: x_l, piece: profile.piece_index(x_l, Side::Left)? };
    let right = Source::Foot { x: x_r, piece: profile.piece_index(x_r, Side::Right)? };
    let ctx = motion::Ctx { profile, model, fans: &[] };
    let s = Sample { t, left, right, xi: f64::NAN };
    let (fl, fr) = (ctx.foot(x_l, profile.piece_index(x_l, Side::Left)?).f, ctx.foot(x_r, profile.piece_index(x_r, Side::Right)?).f);
    if fl == fr {
        return Err(Error::DegenerateJump(fl));
    }
    let r = ctx.rates(&s)?;
    Ok((r.dl, r.dr))
}

/// Velocity of the foot of a second-kind shock whose other side lies in
/// `fan`. `side` names the foot's side of the shock.
pub fn rhs_kind2(profile: &PiecewiseProfile, model: &FluxModel, x_foot: f64, t: f64, fan: &Fan, side: Foot) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("second-kind rate needs t > 0, got {t}")));
    }
    let fans = [Fan { id: 0, ..fan.clone() }];
    let fan_src = Source::Fan { fan: 0, center: fan.center };
    let ctx = motion::Ctx { profile, model, fans: &fans };
    let s = match side {
        Foot::Left => {
            let foot = Source::Foot { x: x_foot, piece: profile.piece_index(x_foot, Side::Left)? };
            Sample { t, left: foot, right: fan_src, xi: f64::NAN }
        }
        Foot::Right => {
            let foot = Source::Foot { x: x_foot, piece: profile.piece_index(x_foot, Side::Right)? };
            Sample { t, left: fan_src, right: foot, xi: f64::NAN }
        }
    };
    let xi = ctx.xi_of(&s);
    let ray = (xi - fan.center) / t;
    if !fan.contains_ray(ray) {
        return Err(Error::OutOfFan { x: xi, t });
    }
    let r = ctx.rates(&s)?;
    Ok(match side {
        Foot::Left => r.dl,
        Foot::Right => r.dr,
    })
}

/// `dxi/dt` of a third-kind shock at `xi` between the fans `fan1` (left
/// state) and `fan2` (right state).
pub fn rhs_kind3(model: &FluxModel, xi: f64, t: f64, fan1: &Fan, fan2: &Fan) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("third-kind rate needs t > 0, got {t}")));
    }
    let u1 = fan1.state(model, (xi - fan1.center) / t);
    let u2 = fan2.state(model, (xi - fan2.center) / t);
    if u1 == u2 && !matches!(model, FluxModel::Burgers) {
        return Err(Error::DegenerateJump(u1));
    }
    Ok(model.chord_slope(u1, u2))
}

#[cfg(test)]
mod tests;
