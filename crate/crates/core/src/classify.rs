//! Classification of the critical points of an initial condition, break
//! times, and asymptotic initial points for the shock equations.

use std::fmt;

use crate::error::{Error, Foot, Result};
use crate::flux::{FluxModel, MAX_ORDER};
use crate::jet::factorial;
use crate::profile::{PiecewiseProfile, Side};

/// Samples of `h'` per smooth piece in the interior minimum search.
pub const N_SCAN: usize = 2048;

/// Upper end of the negative-root search interval `(-S_MAX, 0)`.
pub const S_MAX: f64 = 1e6;

/// Largest seed offset, as a fraction of the smallest gap between critical points.
pub const DELTA_MAX_FRACTION: f64 = 1e-2;

/// Default seed offset, as a fraction of the smallest gap between critical points.
pub const DELTA_DEFAULT_FRACTION: f64 = 1e-3;

const JUMP_TOL: f64 = 1e-12;
const VANISH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Shock1,
    Shock2,
    Shock3,
    Shock4,
    Rarefaction,
    StraightLine,
    /// No condition holds.
    Inert,
}

impl PointKind {
    pub fn is_shock(self) -> bool {
        matches!(self, PointKind::Shock1 | PointKind::Shock2 | PointKind::Shock3 | PointKind::Shock4)
    }

    /// Whether a rarefaction fan is centred at the point.
    pub fn has_fan(self) -> bool {
        matches!(self, PointKind::Rarefaction | PointKind::Shock4)
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::Shock1 => "shock1",
            PointKind::Shock2 => "shock2",
            PointKind::Shock3 => "shock3",
            PointKind::Shock4 => "shock4",
            PointKind::Rarefaction => "rarefaction",
            PointKind::StraightLine => "straight_line",
            PointKind::Inert => "inert",
        })
    }
}

/// One-sided data at a critical point.
#[derive(Debug, Clone, PartialEq)]
pub struct SideData {
    pub piece: usize,
    pub f: f64,
    /// `h^(k)` for `k = 0..=MAX_ORDER`.
    pub h: Vec<f64>,
}

impl SideData {
    fn at(profile: &PiecewiseProfile, model: &FluxModel, piece: usize, x: f64) -> SideData {
        let jet = profile.h_jet(model, piece, x, MAX_ORDER);
        SideData { piece, f: profile.pieces()[piece].eval(x), h: jet.derivatives() }
    }

    fn finite(&self) -> bool {
        self.f.is_finite() && self.h[..3].iter().all(|v| v.is_finite())
    }

    /// Smallest `k >= from` whose `h^(k)` does not vanish.
    fn first_order(&self, from: usize) -> Option<usize> {
        let scale = self.h[1].abs().max(1.0);
        (from..=MAX_ORDER).find(|&k| self.h[k].is_finite() && self.h[k].abs() > VANISH_TOL * scale)
    }
}

/// Linear characteristic-speed segment `h(x) = k (x + c)` on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightSegment {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub c: f64,
    pub piece: usize,
}

impl StraightSegment {
    /// Time at which all characteristics of the segment meet.
    pub fn focus_time(&self) -> f64 {
        -1.0 / self.k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub id: usize,
    pub x: f64,
    pub kind: PointKind,
    pub left: SideData,
    pub right: SideData,
    pub k_l: Option<usize>,
    pub k_r: Option<usize>,
    pub break_times: Vec<f64>,
    /// `h'` is not finite at the point; seeds use the fallback.
    pub singular: bool,
    pub at_breakpoint: bool,
    /// Sides of a fourth-kind point whose edge of the fan breaks.
    pub crossing: Vec<Foot>,
    pub segment: Option<StraightSegment>,
}

impl CriticalPoint {
    /// Characteristic speeds bounding the fan, `[h(x*-), h(x*+)]`.
    pub fn fan_speeds(&self) -> (f64, f64) {
        (self.left.h[0], self.right.h[0])
    }
}

/// Finds and classifies all critical points, sorted by location.
pub fn classify_points(profile: &PiecewiseProfile, model: &FluxModel) -> Result<Vec<CriticalPoint>> {
    let mut points = Vec::new();
    for (i, &x) in profile.breakpoints().iter().enumerate() {
        points.push(classify_breakpoint(profile, model, i, x)?);
    }
    for piece in 0..profile.pieces().len() {
        points.extend(interior_minima(profile, model, piece));
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    for (id, p) in points.iter_mut().enumerate() {
        p.id = id;
    }
    Ok(points)
}

fn base_point(x: f64, left: SideData, right: SideData, at_breakpoint: bool) -> CriticalPoint {
    let singular = !(left.finite() && right.finite());
    CriticalPoint {
        id: 0,
        x,
        kind: PointKind::Inert,
        k_l: None,
        k_r: None,
        left,
        right,
        break_times: Vec::new(),
        singular,
        at_breakpoint,
        crossing: Vec::new(),
        segment: None,
    }
}

/// `h'` grows when moving away from `x*` to the left.
fn left_rises(s: &SideData, k: Option<usize>) -> bool {
    k.is_some_and(|k| if k % 2 == 0 { s.h[k] < 0.0 } else { s.h[k] > 0.0 })
}

/// `h'` grows when moving away from `x*` to the right.
fn right_rises(s: &SideData, k: Option<usize>) -> bool {
    k.is_some_and(|k| s.h[k] > 0.0)
}

fn classify_breakpoint(profile: &PiecewiseProfile, model: &FluxModel, i: usize, x: f64) -> Result<CriticalPoint> {
    let left = SideData::at(profile, model, i, x);
    let right = SideData::at(profile, model, i + 1, x);
    let mut p = base_point(x, left, right, true);
    if p.singular {
        let jump = (p.left.f - p.right.f).abs() > JUMP_TOL * p.left.f.abs().max(p.right.f.abs()).max(1.0);
        p.kind = if jump && p.left.h[0] > p.right.h[0] {
            PointKind::Shock1
        } else if jump && p.left.h[0] < p.right.h[0] {
            PointKind::Rarefaction
        } else {
            PointKind::Shock2
        };
        p.break_times = if p.kind == PointKind::Rarefaction { vec![] } else { vec![0.0] };
        return Ok(p);
    }
    p.k_l = p.left.first_order(2);
    p.k_r = p.right.first_order(2);
    let (hl, hr) = (p.left.h[0], p.right.h[0]);
    let (dl, dr) = (p.left.h[1], p.right.h[1]);
    let scale = p.left.f.abs().max(p.right.f.abs()).max(1.0);
    let jump = (p.left.f - p.right.f).abs() > JUMP_TOL * scale;
    let hscale = hl.abs().max(hr.abs()).max(1.0);

    if jump {
        if hl > hr + JUMP_TOL * hscale {
            p.kind = PointKind::Shock1;
            p.break_times = vec![0.0];
        } else if hl < hr - JUMP_TOL * hscale {
            if dl < 0.0 && left_rises(&p.left, p.k_l) {
                p.crossing.push(Foot::Left);
                p.break_times.push(-1.0 / dl);
            }
            if dr < 0.0 && right_rises(&p.right, p.k_r) {
                p.crossing.push(Foot::Right);
                p.break_times.push(-1.0 / dr);
            }
            p.kind = if p.crossing.is_empty() { PointKind::Rarefaction } else { PointKind::Shock4 };
        }
        return Ok(p);
    }

    let dscale = dl.abs().max(dr.abs()).max(1.0);
    if dl.min(dr) >= 0.0 {
        return Ok(p);
    }
    let slope_jump = (dl - dr).abs() > VANISH_TOL * dscale;
    if slope_jump {
        let (side, k, rises) = if dl < dr {
            (&p.left, p.k_l, left_rises(&p.left, p.k_l))
        } else {
            (&p.right, p.k_r, right_rises(&p.right, p.k_r))
        };
        if k.is_none() {
            p.segment = Some(straight_segment(profile, side, x));
            p.kind = PointKind::StraightLine;
            p.break_times = vec![-1.0 / side.h[1]];
        } else if rises {
            p.kind = PointKind::Shock2;
            p.break_times = vec![-1.0 / dl.min(dr)];
        }
        return Ok(p);
    }
    // f' continuous, h'(x*) < 0
    match (p.k_l, p.k_r) {
        (None, None) => {}
        (None, Some(_)) | (Some(_), None) => {
            let side = if p.k_l.is_none() { &p.left } else { &p.right };
            p.segment = Some(straight_segment(profile, side, x));
            p.kind = PointKind::StraightLine;
            p.break_times = vec![-1.0 / side.h[1]];
        }
        _ => {
            if left_rises(&p.left, p.k_l) && right_rises(&p.right, p.k_r) {
                p.kind = PointKind::Shock3;
                p.break_times = vec![-1.0 / dl];
            }
        }
    }
    Ok(p)
}

fn straight_segment(profile: &PiecewiseProfile, s: &SideData, x: f64) -> StraightSegment {
    let (a, b) = profile.piece_bounds(s.piece);
    let k = s.h[1];
    StraightSegment { a, b, k, c: s.h[0] / k - x, piece: s.piece }
}

fn interior_minima(profile: &PiecewiseProfile, model: &FluxModel, piece: usize) -> Vec<CriticalPoint> {
    let (lo, hi) = profile.piece_bounds(piece);
    let (dlo, dhi) = profile.domain_hint();
    let (a, b) = (lo.max(dlo), hi.min(dhi));
    if !(a < b) {
        return Vec::new();
    }
    let dh = |x: f64| profile.h_jet(model, piece, x, 1).derivative(1);
    let step = (b - a) / (N_SCAN - 1) as f64;
    let xs: Vec<f64> = (0..N_SCAN).map(|j| a + step * j as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| dh(x)).collect();
    let mut out = Vec::new();
    for j in 1..N_SCAN - 1 {
        let v = vals[j];
        if !(v < 0.0 && v < vals[j - 1] && v <= vals[j + 1]) {
            continue;
        }
        let x = refine_minimum(dh, xs[j - 1], xs[j + 1], |x| {
            let jet = profile.h_jet(model, piece, x, 3);
            (jet.derivative(2), jet.derivative(3))
        });
        let edge = 1e-9 * (1.0 + x.abs());
        if x - lo <= edge || hi - x <= edge {
            continue;
        }
        let side = SideData::at(profile, model, piece, x);
        if !side.finite() || side.h[1] >= 0.0 {
            continue;
        }
        let k = side.first_order(3);
        let Some(k) = k else { continue };
        if k % 2 == 0 || side.h[k] <= 0.0 {
            continue;
        }
        if out.iter().any(|p: &CriticalPoint| (p.x - x).abs() <= 1e-9 * (1.0 + x.abs())) {
            continue;
        }
        let mut p = base_point(x, side.clone(), side, false);
        p.kind = PointKind::Shock3;
        p.k_l = Some(k);
        p.k_r = Some(k);
        p.break_times = vec![-1.0 / p.left.h[1]];
        out.push(p);
    }
    out
}

/// Golden-section search for the minimum of `g` on `[a, b]`, polished by
/// Newton steps on `g'` using `(g', g'')`.
fn refine_minimum(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, dg: impl Fn(f64) -> (f64, f64)) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (lo0, hi0) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-12 * (1.0 + a.abs().max(b.abs())) {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..8 {
        let (d1, d2) = dg(x);
        if !(d2 > 0.0) || !d1.is_finite() {
            break;
        }
        let next = x - d1 / d2;
        if !(next > lo0 && next < hi0) {
            break;
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Break times of a shock point.
pub fn break_times(point: &CriticalPoint) -> Result<Vec<f64>> {
    if !point.kind.is_shock() {
        return Err(Error::InvalidKind(point.kind.to_string()));
    }
    Ok(point.break_times.clone())
}

/// The seed polynomial for order `k`, ratio `p` and factor `a`:
/// `s^(k+1) + (1 - a k)/(a (k - 1)) s^k + (a - k)/(a (k - 1)) p s + p / a`.
/// With `a = -1` this is `s^(k+1) - (k+1)/(k-1) s^k + (k+1)/(k-1) p s - p`.
pub fn seed_polynomial(k: usize, p: f64, a: f64, s: f64) -> f64 {
    let km1 = (k - 1) as f64;
    let kf = k as f64;
    let sk = s.powi(k as i32);
    s * sk + (1.0 - a * kf) / (a * km1) * sk + (a - kf) / (a * km1) * p * s + p / a
}

fn seed_polynomial_slope(k: usize, p: f64, a: f64, s: f64) -> f64 {
    let km1 = (k - 1) as f64;
    let kf = k as f64;
    let skm1 = s.powi(k as i32 - 1);
    (kf + 1.0) * skm1 * s + (1.0 - a * kf) / (a * km1) * kf * skm1 + (a - kf) / (a * km1) * p
}

/// The negative root of [`seed_polynomial`] nearest to zero.
pub fn negative_root(k: usize, p: f64, a: f64) -> Result<f64> {
    if k < 2 || p == 0.0 || !p.is_finite() || !(a < 0.0) {
        return Err(Error::Precondition(format!("negative_root needs k >= 2, p != 0, A < 0 (k = {k}, p = {p}, A = {a})")));
    }
    let fail = || Error::RootBracket { k, p, a, s_max: S_MAX };
    let poly = |s: f64| seed_polynomial(k, p, a, s);
    // log-spaced scan from -1e-9 down to -S_MAX
    let n = 4000;
    let (lmin, lmax) = (-9.0f64, S_MAX.log10());
    let mut prev_s = 0.0;
    let mut prev_v = poly(0.0);
    for j in 0..=n {
        let s = -(10f64.powf(lmin + (lmax - lmin) * j as f64 / n as f64));
        let v = poly(s);
        if v == 0.0 {
            return Ok(s);
        }
        if v.signum() != prev_v.signum() {
            return Ok(polish_root(&poly, |s| seed_polynomial_slope(k, p, a, s), s, prev_s));
        }
        prev_s = s;
        prev_v = v;
    }
    Err(fail())
}

fn polish_root(poly: &impl Fn(f64) -> f64, slope: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = poly(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = poly(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = slope(s);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = s - poly(s) / d;
        if poly(next).abs() < poly(s).abs() {
            s = next;
        } else {
            break;
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedRegime {
    Kind1,
    Kind2CrossFromLeft,
    Kind2CrossFromRight,
}

/// Initial point of a shock curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockSeed {
    pub t0: f64,
    pub xl0: f64,
    pub xr0: f64,
    pub regime: SeedRegime,
    pub origin: usize,
    /// Pieces serving the left and right feet; the fan side of a
    /// second-kind seed carries the piece adjacent to the fan.
    pub left_piece: usize,
    pub right_piece: usize,
}

/// Smallest gap between consecutive critical points, bounded by the domain width.
pub fn min_gap(points: &[CriticalPoint], profile: &PiecewiseProfile) -> f64 {
    let (a, b) = profile.domain_hint();
    let mut gap = b - a;
    for w in points.windows(2) {
        let d = w[1].x - w[0].x;
        if d > 0.0 {
            gap = gap.min(d);
        }
    }
    gap
}

fn h_at(profile: &PiecewiseProfile, model: &FluxModel, piece: usize, x: f64) -> (f64, f64) {
    let l = profile.local(model, piece, x);
    (l.h, l.dh)
}

/// Local stability condition at a foot pair.
pub fn stability_check(profile: &PiecewiseProfile, model: &FluxModel, x_l: f64, x_r: f64) -> Result<bool> {
    let pl = profile.piece_index(x_l, Side::Left)?;
    let pr = profile.piece_index(x_r, Side::Right)?;
    stability_on(profile, model, pl, x_l, pr, x_r)
}

pub(crate) fn stability_on(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    pl: usize,
    x_l: f64,
    pr: usize,
    x_r: f64,
) -> Result<bool> {
    let (hl, dl) = h_at(profile, model, pl, x_l);
    let (hr, dr) = h_at(profile, model, pr, x_r);
    if hl == hr {
        return Err(Error::UndefinedSlope);
    }
    let m = (hl - hr) / (x_l - x_r);
    Ok(dl > m && dr > m)
}

/// Intersection time of the characteristics from two feet.
fn meet_time(profile: &PiecewiseProfile, model: &FluxModel, pl: usize, xl: f64, pr: usize, xr: f64) -> f64 {
    let (hl, _) = h_at(profile, model, pl, xl);
    let (hr, _) = h_at(profile, model, pr, xr);
    (xr - xl) / (hl - hr)
}

/// Initial point for the curve of a shock point. Fourth-kind points with two
/// breaking sides return the earlier one; see [`seed_all`].
pub fn seed_shock(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    point: &CriticalPoint,
    delta: f64,
    a: f64,
) -> Result<ShockSeed> {
    let mut seeds = seed_all(profile, model, point, delta, a)?;
    seeds.sort_by(|x, y| x.t0.total_cmp(&y.t0));
    Ok(seeds.swap_remove(0))
}

/// All initial points of a shock point.
pub fn seed_all(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    point: &CriticalPoint,
    delta: f64,
    a: f64,
) -> Result<Vec<ShockSeed>> {
    if !point.kind.is_shock() {
        return Err(Error::InvalidKind(point.kind.to_string()));
    }
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    let seed = |d: f64| raw_seeds(profile, model, point, d, a);
    let seeds = seed(delta)?;
    let passes = |s: &[ShockSeed]| -> bool { s.iter().all(|s| seed_is_stable(profile, model, point, s)) };
    if passes(&seeds) {
        return Ok(seeds);
    }
    let mut d = delta;
    for _ in 0..60 {
        d *= 0.5;
        if let Ok(s) = seed(d) {
            if passes(&s) {
                return Err(Error::SeedRejected { max_delta: d });
            }
        }
    }
    Err(Error::SeedRejected { max_delta: 0.0 })
}

fn seed_is_stable(profile: &PiecewiseProfile, model: &FluxModel, point: &CriticalPoint, s: &ShockSeed) -> bool {
    if !(s.t0.is_finite() && s.t0 >= 0.0) {
        return false;
    }
    if s.regime != SeedRegime::Kind1 {
        let (piece, x) = match s.regime {
            SeedRegime::Kind2CrossFromLeft => (s.left_piece, s.xl0),
            _ => (s.right_piece, s.xr0),
        };
        let (_, dh) = h_at(profile, model, piece, x);
        return 1.0 + dh * s.t0 > 0.0;
    }
    if s.xl0 == point.x || s.xr0 == point.x || point.singular {
        return true;
    }
    matches!(stability_on(profile, model, s.left_piece, s.xl0, s.right_piece, s.xr0), Ok(true))
}

fn raw_seeds(
    profile: &PiecewiseProfile,
    model: &FluxModel,
    point: &CriticalPoint,
    delta: f64,
    a: f64,
) -> Result<Vec<ShockSeed>> {
    let x = point.x;
    let (pl, pr) = (point.left.piece, point.right.piece);
    let kind1 = |xl0: f64, xr0: f64| {
        let t0 = meet_time(profile, model, pl, xl0, pr, xr0);
        ShockSeed { t0, xl0, xr0, regime: SeedRegime::Kind1, origin: point.id, left_piece: pl, right_piece: pr }
    };
    if point.kind == PointKind::Shock1 {
        return Ok(vec![ShockSeed {
            t0: 0.0,
            xl0: x,
            xr0: x,
            regime: SeedRegime::Kind1,
            origin: point.id,
            left_piece: pl,
            right_piece: pr,
        }]);
    }
    if point.singular {
        let mut s = kind1(x - delta, x + delta);
        if !(s.t0.is_finite() && s.t0 > 0.0) {
            s.t0 = 0.0;
        }
        return Ok(vec![s]);
    }
    let (hm, hp) = (&point.left.h, &point.right.h);
    match point.kind {
        PointKind::Shock2 => {
            let (dm, dp) = (hm[1], hp[1]);
            if dp < dm {
                let kr = point.k_r.ok_or_else(|| Error::Precondition("second-kind point without k_r".into()))?;
                let p = (kr as f64 - 1.0) * hp[kr] / ((1.0 - a * kr as f64) * factorial(kr) * (dp - dm));
                Ok(vec![kind1(x + p * delta.powi(kr as i32), x + delta)])
            } else {
                let kl = point.k_l.ok_or_else(|| Error::Precondition("second-kind point without k_l".into()))?;
                let p = (kl as f64 - 1.0) * hm[kl] / ((1.0 - a * kl as f64) * factorial(kl) * (dm - dp));
                Ok(vec![kind1(x - delta, x + p * (-delta).powi(kl as i32))])
            }
        }
        PointKind::Shock3 => {
            let (kl, kr) = match (point.k_l, point.k_r) {
                (Some(l), Some(r)) => (l, r),
                _ => return Err(Error::Precondition("third-kind point without side orders".into())),
            };
            if kl == kr {
                let s = negative_root(kl, hp[kl] / hm[kl], a)?;
                Ok(vec![kind1(x + s * delta, x + delta)])
            } else if kl < kr {
                let base = (1.0 - kr as f64) * factorial(kl) * hp[kr] / ((1.0 - a * kr as f64) * factorial(kr) * hm[kl]);
                let dxl = -base.abs().powf(1.0 / kl as f64) * delta.powf(kr as f64 / kl as f64);
                Ok(vec![kind1(x + dxl, x + delta)])
            } else {
                let sign = if kl % 2 == 0 { 1.0 } else { -1.0 };
                let base = sign * (1.0 - kl as f64) * factorial(kr) * hm[kl] / ((1.0 - a * kl as f64) * factorial(kl) * hp[kr]);
                let dxr = base.abs().powf(1.0 / kr as f64) * delta.powf(kl as f64 / kr as f64);
                Ok(vec![kind1(x - delta, x + dxr)])
            }
        }
        PointKind::Shock4 => {
            let mut out = Vec::new();
            for &side in &point.crossing {
                let (h, k, dx, regime) = match side {
                    Foot::Left => (hm, point.k_l, -delta, SeedRegime::Kind2CrossFromLeft),
                    Foot::Right => (hp, point.k_r, delta, SeedRegime::Kind2CrossFromRight),
                };
                let k = k.ok_or_else(|| Error::Precondition("fourth-kind side without order".into()))?;
                let kf = k as f64;
                let denom = -h[1] - 2.0 * h[k] * dx.powi(k as i32 - 1) / (factorial(k - 1) * (kf + 1.0));
                let t0 = 1.0 / denom;
                let (xl0, xr0) = match side {
                    Foot::Left => (x + dx, x),
                    Foot::Right => (x, x + dx),
                };
                out.push(ShockSeed { t0, xl0, xr0, regime, origin: point.id, left_piece: pl, right_piece: pr });
            }
            Ok(out)
        }
        _ => Err(Error::InvalidKind(point.kind.to_string())),
    }
}

/// `A(x_l, x_r)`: ratio of the jump-speed offsets of the two sides.
pub fn jump_offset_ratio(model: &FluxModel, u_l: f64, u_r: f64) -> Result<f64> {
    if u_l == u_r {
        return Err(Error::DegenerateJump(u_l));
    }
    let num = model.second_divided(u_l, u_r);
    let den = model.second_divided(u_r, u_l);
    // (s - G'(u_l)) / (s - G'(u_r)) = -(G[u_l,u_l,u_r]) / G[u_r,u_r,u_l]
    Ok(-num / den)
}
