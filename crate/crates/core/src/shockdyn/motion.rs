//! Right-hand sides of the foot equations and their RK4 integration.
//!
//! Near a freshly formed shock the feet move like the square root of the
//! elapsed time and `1 + h' t` is small. Steps that change that
//! denominator too much are retried with the fastest foot as the
//! independent variable, where the solution is smooth.

use super::{Fan, Sample, Source};
use crate::error::{Error, Foot, Result};
use crate::flux::FluxModel;
use crate::profile::{speed_jet, PiecewiseProfile};

/// Largest relative change of a foot's denominator in one time-mode step.
const MAX_DENOM_CHANGE: f64 = 0.3;
/// Fraction of the denominator's e-folding length used as a foot-mode step.
const FLIP_FRACTION: f64 = 0.2;
const MAX_SUBSTEPS: usize = 100_000;

pub(crate) struct Ctx<'a> {
    pub profile: &'a PiecewiseProfile,
    pub model: &'a FluxModel,
    pub fans: &'a [Fan],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct FootState {
    pub f: f64,
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Rates {
    pub dl: f64,
    pub dr: f64,
    pub dxi: f64,
    /// `1 + h' t` at each foot, NaN on a fan side.
    pub den_l: f64,
    pub den_r: f64,
    pub foot_l: Option<FootState>,
    pub foot_r: Option<FootState>,
}

impl Rates {
    fn den(&self, side: Foot) -> f64 {
        match side {
            Foot::Left => self.den_l,
            Foot::Right => self.den_r,
        }
    }
}

/// Integration variables `(t, x_l, x_r, xi)`.
type Vars = [f64; 4];

fn vars(s: &Sample) -> Vars {
    [s.t, s.left.x(), s.right.x(), s.xi]
}

fn with_vars(s: &Sample, v: Vars) -> Sample {
    let set = |src: Source, x: f64| match src {
        Source::Foot { piece, .. } => Source::Foot { x, piece },
        fan => fan,
    };
    Sample { t: v[0], left: set(s.left, v[1]), right: set(s.right, v[2]), xi: v[3] }
}

fn axpy(a: &Vars, h: f64, k: &Vars) -> Vars {
    [a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2], a[3] + h * k[3]]
}

impl Ctx<'_> {
    pub fn foot(&self, x: f64, piece: usize) -> FootState {
        let fj = self.profile.pieces()[piece].jet(x, 2);
        let f = fj.value();
        let hj = speed_jet(self.model, fj);
        FootState { f, h: hj.value(), dh: hj.derivative(1), d2h: hj.derivative(2) }
    }

    /// Shock position: from a foot when there is one, else the stored value.
    pub fn xi_of(&self, s: &Sample) -> f64 {
        match (s.left, s.right) {
            (Source::Foot { x, piece }, _) | (_, Source::Foot { x, piece }) => {
                let l = self.foot(x, piece);
                x + l.h * s.t
            }
            _ => s.xi,
        }
    }

    pub fn synced(&self, mut s: Sample) -> Sample {
        s.xi = self.xi_of(&s);
        s
    }

    /// Ray speed of a fan side, `(xi - x*) / t`.
    pub fn ray(&self, s: &Sample, side: Foot) -> Option<f64> {
        let src = match side {
            Foot::Left => s.left,
            Foot::Right => s.right,
        };
        match src {
            Source::Fan { center, .. } => Some((s.xi - center) / s.t),
            Source::Foot { .. } => None,
        }
    }

    fn side_state(&self, src: Source, xi: f64, t: f64) -> (f64, Option<FootState>) {
        match src {
            Source::Foot { x, piece } => {
                let st = self.foot(x, piece);
                (st.f, Some(st))
            }
            Source::Fan { fan, center } => (self.fans[fan].state(self.model, (xi - center) / t), None),
        }
    }

    pub fn rates(&self, s: &Sample) -> Result<Rates> {
        let t = s.t;
        let xi = self.xi_of(s);
        let (ul, fl) = self.side_state(s.left, xi, t);
        let (ur, fr) = self.side_state(s.right, xi, t);
        if !(ul.is_finite() && ur.is_finite()) {
            return Err(Error::Consistency { t, msg: format!("non-finite side state at xi = {xi}") });
        }
        let speed = self.model.chord_slope(ul, ur);
        // s - h_l and s - h_r without cancellation
        let gap_l = (ur - ul) * self.model.second_divided(ul, ur);
        let gap_r = (ul - ur) * self.model.second_divided(ur, ul);
        let foot_rate = |st: &Option<FootState>, gap: f64, side: Foot, x: f64| -> Result<(f64, f64)> {
            match st {
                None => Ok((0.0, f64::NAN)),
                Some(st) => {
                    let den = 1.0 + st.dh * t;
                    if !(den > 0.0) {
                        return Err(Error::SingularDenominator { foot: side, x, t });
                    }
                    Ok((gap / den, den))
                }
            }
        };
        let (dl, den_l) = foot_rate(&fl, gap_l, Foot::Left, s.left.x())?;
        let (dr, den_r) = foot_rate(&fr, gap_r, Foot::Right, s.right.x())?;
        Ok(Rates { dl, dr, dxi: speed, den_l, den_r, foot_l: fl, foot_r: fr })
    }

    fn deriv_time(&self, s: &Sample) -> Result<(Vars, Rates)> {
        let r = self.rates(s)?;
        Ok(([1.0, r.dl, r.dr, r.dxi], r))
    }

    fn deriv_foot(&self, s: &Sample, side: Foot) -> Result<(Vars, Rates)> {
        let r = self.rates(s)?;
        let v = match side {
            Foot::Left => r.dl,
            Foot::Right => r.dr,
        };
        if !(v != 0.0 && v.is_finite()) {
            return Err(Error::Consistency { t: s.t, msg: "stationary foot in foot-mode step".into() });
        }
        Ok(([1.0 / v, r.dl / v, r.dr / v, r.dxi / v], r))
    }

    fn rk4(&self, s: &Sample, h: f64, deriv: impl Fn(&Sample) -> Result<(Vars, Rates)>) -> Result<Sample> {
        let y = vars(s);
        let (k1, _) = deriv(s)?;
        let (k2, _) = deriv(&with_vars(s, axpy(&y, 0.5 * h, &k1)))?;
        let (k3, _) = deriv(&with_vars(s, axpy(&y, 0.5 * h, &k2)))?;
        let (k4, _) = deriv(&with_vars(s, axpy(&y, h, &k3)))?;
        let mut out = y;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(self.synced(with_vars(s, out)))
    }

    /// One RK4 step in time, accepted only if every foot denominator stays
    /// positive and changes by less than `MAX_DENOM_CHANGE`.
    fn time_step(&self, s: &Sample, h: f64) -> Result<Sample> {
        let r0 = self.rates(s)?;
        let mut next = self.rk4(s, h, |x| self.deriv_time(x))?;
        next.t = s.t + h;
        let r1 = self.rates(&next)?;
        for side in [Foot::Left, Foot::Right] {
            let (d0, d1) = (r0.den(side), r1.den(side));
            if d0.is_finite() && (d1 - d0).abs() > MAX_DENOM_CHANGE * d0 {
                return Err(Error::SingularDenominator { foot: side, x: next.left.x(), t: next.t });
            }
        }
        Ok(next)
    }

    /// One RK4 step with `side`'s foot as independent variable, never
    /// passing `t1` and landing on it exactly when within reach.
    fn foot_step(&self, s: &Sample, t1: f64, side: Foot) -> Result<Sample> {
        let r = self.rates(s)?;
        let (v, st) = match side {
            Foot::Left => (r.dl, r.foot_l),
            Foot::Right => (r.dr, r.foot_r),
        };
        let st = st.ok_or_else(|| Error::Precondition("foot-mode step on a fan side".into()))?;
        let den = r.den(side);
        let dden = st.d2h * s.t + st.dh / v;
        let eta_acc = if dden != 0.0 { FLIP_FRACTION * den / dden.abs() } else { f64::INFINITY };
        let eta_time = (t1 - s.t) * v.abs();
        let dir = v.signum();
        let deriv = |x: &Sample| self.deriv_foot(x, side);
        if eta_time > eta_acc {
            let mut eta = eta_acc;
            for _ in 0..40 {
                if let Ok(n) = self.rk4(s, dir * eta, deriv) {
                    if n.t > s.t && n.t < t1 {
                        return Ok(n);
                    }
                    if n.t >= t1 {
                        break;
                    }
                }
                eta *= 0.5;
            }
            if eta_time <= 2.0 * eta_acc {
                return self.land(s, t1, side, eta_time);
            }
            return Err(Error::Aborted { t: s.t, msg: "foot-mode step failed".into() });
        }
        self.land(s, t1, side, eta_time)
    }

    /// Foot-mode step whose end time is exactly `t1`.
    fn land(&self, s: &Sample, t1: f64, side: Foot, guess: f64) -> Result<Sample> {
        let dir = match side {
            Foot::Left => self.rates(s)?.dl.signum(),
            Foot::Right => self.rates(s)?.dr.signum(),
        };
        let step = |eta: f64| self.rk4(s, dir * eta, |x| self.deriv_foot(x, side));
        let tol = 4.0 * f64::EPSILON * t1.abs().max(1.0);
        let (mut a, mut fa) = (0.0, s.t - t1);
        let mut b = guess;
        let mut fb = f64::NAN;
        for _ in 0..60 {
            match step(b) {
                Ok(n) => {
                    fb = n.t - t1;
                    if fb >= 0.0 {
                        break;
                    }
                    a = b;
                    fa = fb;
                    b *= 2.0;
                }
                Err(_) => b = 0.5 * (a + b),
            }
        }
        if !(fb >= 0.0) {
            return Err(Error::Aborted { t: s.t, msg: "could not bracket landing step".into() });
        }
        let mut best = step(b)?;
        let mut best_err = fb;
        let mut last = 0;
        for _ in 0..100 {
            if best_err.abs() <= tol || b - a <= f64::EPSILON * b.abs() {
                break;
            }
            let mut c = b - fb * (b - a) / (fb - fa);
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let n = step(c)?;
            let fc = n.t - t1;
            if fc >= 0.0 {
                b = c;
                fb = fc;
                best = n;
                best_err = fc;
                if last == 1 {
                    fa *= 0.5;
                }
                last = 1;
            } else {
                a = c;
                fa = fc;
                if last == -1 {
                    fb *= 0.5;
                }
                last = -1;
            }
        }
        best.t = t1;
        Ok(self.synced(best))
    }

    /// Foot with the smallest denominator.
    fn stiff_foot(&self, s: &Sample) -> Option<Foot> {
        let r = self.rates(s).ok()?;
        match (r.den_l.is_finite(), r.den_r.is_finite()) {
            (true, true) => Some(if r.den_l <= r.den_r { Foot::Left } else { Foot::Right }),
            (true, false) => Some(Foot::Left),
            (false, true) => Some(Foot::Right),
            _ => None,
        }
    }

    /// Advances `s` to `t1` with as few substeps as the denominators allow.
    pub fn integrate(&self, s: &Sample, t1: f64) -> Result<Sample> {
        let mut cur = *s;
        let mut substeps = 0;
        while cur.t < t1 {
            substeps += 1;
            if substeps > MAX_SUBSTEPS {
                return Err(Error::Aborted { t: cur.t, msg: "too many substeps".into() });
            }
            if let Ok(mut n) = self.time_step(&cur, t1 - cur.t) {
                n.t = t1;
                return Ok(n);
            }
            match self.stiff_foot(&cur) {
                Some(side) => cur = self.foot_step(&cur, t1, side)?,
                None => {
                    let mut h = 0.5 * (t1 - cur.t);
                    loop {
                        if let Ok(n) = self.time_step(&cur, h) {
                            cur = n;
                            break;
                        }
                        h *= 0.5;
                        if h < 1e-14 * t1.abs().max(1.0) {
                            return Err(Error::Aborted { t: cur.t, msg: "time step underflow".into() });
                        }
                    }
                }
            }
        }
        Ok(cur)
    }
}

/// Integrates a shock state from `sample.t` to `t1` in steps of `dt`,
/// without event handling.
pub fn advance_sample(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    fans: &[Fan],
    sample: &Sample,
    t1: f64,
    dt: f64,
) -> Result<Sample> {
    if !(dt > 0.0) || t1 < sample.t {
        return Err(Error::Precondition(format!("bad step {dt} or target {t1}")));
    }
    let ctx = Ctx { profile, model, fans };
    let t0 = sample.t;
    let n = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let mut cur = ctx.synced(*sample);
    for i in 1..=n {
        let target = if i == n { t1 } else { t0 + i as f64 * dt };
        cur = ctx.integrate(&cur, target)?;
    }
    Ok(cur)
}
