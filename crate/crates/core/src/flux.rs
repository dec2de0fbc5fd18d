//! Flux models `G(u)` with exact derivatives and inversion of the
//! characteristic speed `G'`.
//!
//! Every model is a polynomial in `u`, so derivatives of any order and the
//! divided differences used by the jump condition are computed exactly from
//! the coefficient list. Burgers and the quartic flux get closed forms on the
//! hot paths.

use std::borrow::Cow;

use crate::error::{Error, Result};

/// Highest derivative order served by [`FluxModel::derivative`] and by the
/// profile side-derivative queries.
pub const MAX_ORDER: usize = 8;

/// Absolute tolerance on `G'(u) - c` accepted by [`FluxModel::invert_speed`].
pub const INV_TOL: f64 = 1e-12;

/// Number of samples of `G''` used to detect a non-monotone bracket.
const MONOTONE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum FluxModel {
    /// `G(u) = u^2 / 2`
    Burgers,
    /// `G(u) = u^4 / 12`
    PowerQuartic,
    /// `G(u) = sum_i c_i u^i`
    Polynomial(Vec<f64>),
}

impl FluxModel {
    /// Builds a polynomial flux, trimming trailing zero coefficients.
    pub fn polynomial(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        let mut c: Vec<f64> = coeffs.into();
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("flux coefficients must be finite".into()));
        }
        while c.len() > 1 && c[c.len() - 1] == 0.0 {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        Ok(FluxModel::Polynomial(c))
    }

    pub fn name(&self) -> &'static str {
        match self {
            FluxModel::Burgers => "burgers",
            FluxModel::PowerQuartic => "quartic",
            FluxModel::Polynomial(_) => "poly",
        }
    }

    /// Coefficients `c_i` of `G(u) = sum_i c_i u^i`.
    pub fn coefficients(&self) -> Cow<'_, [f64]> {
        match self {
            FluxModel::Burgers => Cow::Owned(vec![0.0, 0.0, 0.5]),
            FluxModel::PowerQuartic => Cow::Owned(vec![0.0, 0.0, 0.0, 0.0, 1.0 / 12.0]),
            FluxModel::Polynomial(c) => Cow::Borrowed(c),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            FluxModel::Burgers => 0.5 * u * u,
            FluxModel::PowerQuartic => {
                let u2 = u * u;
                u2 * u2 / 12.0
            }
            FluxModel::Polynomial(c) => horner(c, u),
        }
    }

    /// Characteristic speed `G'(u)`.
    #[inline]
    pub fn speed(&self, u: f64) -> f64 {
        match self {
            FluxModel::Burgers => u,
            FluxModel::PowerQuartic => u * u * u / 3.0,
            FluxModel::Polynomial(c) => derivative_value(c, u, 1),
        }
    }

    /// `G''(u)`.
    #[inline]
    pub fn speed_slope(&self, u: f64) -> f64 {
        match self {
            FluxModel::Burgers => 1.0,
            FluxModel::PowerQuartic => u * u,
            FluxModel::Polynomial(c) => derivative_value(c, u, 2),
        }
    }

    /// `G^(order)(u)`; order 0 returns `G(u)`.
    pub fn derivative(&self, u: f64, order: usize) -> Result<f64> {
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: MAX_ORDER });
        }
        Ok(match (self, order) {
            (_, 0) => self.eval(u),
            (_, 1) => self.speed(u),
            (_, 2) => self.speed_slope(u),
            _ => derivative_value(&self.coefficients(), u, order),
        })
    }

    /// Coefficients of `G'` as a polynomial in `u`.
    pub fn speed_coefficients(&self) -> Vec<f64> {
        differentiate_coeffs(&self.coefficients())
    }

    /// Divided difference `G[a, b] = (G(b) - G(a)) / (b - a)`, equal to
    /// `G'(a)` when `a == b`. Evaluated without cancellation.
    pub fn chord_slope(&self, a: f64, b: f64) -> f64 {
        match self {
            FluxModel::Burgers => 0.5 * (a + b),
            FluxModel::PowerQuartic => (a + b) * (a * a + b * b) / 12.0,
            FluxModel::Polynomial(c) => {
                let mut sum = 0.0;
                for (i, ci) in c.iter().enumerate().skip(1) {
                    // sum_{j<i} a^j b^(i-1-j)
                    let mut term = 0.0;
                    let mut apow = 1.0;
                    for j in 0..i {
                        term += apow * b.powi((i - 1 - j) as i32);
                        apow *= a;
                    }
                    sum += ci * term;
                }
                sum
            }
        }
    }

    /// Second divided difference `G[a, a, b]`; `G[a, b] - G'(a) = (b - a) G[a, a, b]`.
    pub fn second_divided(&self, a: f64, b: f64) -> f64 {
        match self {
            FluxModel::Burgers => 0.5,
            FluxModel::PowerQuartic => (3.0 * a * a + 2.0 * a * b + b * b) / 12.0,
            FluxModel::Polynomial(c) => {
                let mut sum = 0.0;
                for (i, ci) in c.iter().enumerate().skip(2) {
                    // complete homogeneous polynomial of degree i-2 in (a, a, b)
                    let mut term = 0.0;
                    let mut apow = 1.0;
                    for m in 0..=(i - 2) {
                        term += (m + 1) as f64 * apow * b.powi((i - 2 - m) as i32);
                        apow *= a;
                    }
                    sum += ci * term;
                }
                sum
            }
        }
    }

    /// Solves `G'(u) = c` for `u` in `bracket` by bisection-safeguarded Newton.
    pub fn invert_speed(&self, c: f64, bracket: (f64, f64)) -> Result<f64> {
        let (a, b) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
        if !self.is_monotone_on(a, b) {
            return Err(Error::InvalidBracket { a, b });
        }
        let (sa, sb) = (self.speed(a), self.speed(b));
        let (lo, hi) = if sa <= sb { (sa, sb) } else { (sb, sa) };
        if !(c >= lo - INV_TOL && c <= hi + INV_TOL) || !c.is_finite() {
            return Err(Error::OutOfRange { c, lo, hi });
        }
        Ok(self.invert_unchecked(c, a, b))
    }

    /// Inversion without the monotonicity scan; `G'` must be monotone on
    /// `[a, b]`. Values of `c` outside the range clamp to the end points.
    pub(crate) fn invert_unchecked(&self, c: f64, a: f64, b: f64) -> f64 {
        match self {
            FluxModel::Burgers => return c.clamp(a.min(b), a.max(b)),
            FluxModel::PowerQuartic => return (3.0 * c).cbrt().clamp(a.min(b), a.max(b)),
            FluxModel::Polynomial(_) => {}
        }
        let increasing = self.speed(b) >= self.speed(a);
        let g = |u: f64| {
            let r = self.speed(u) - c;
            if increasing {
                r
            } else {
                -r
            }
        };
        let (mut lo, mut hi) = (a, b);
        if g(lo) >= 0.0 {
            return lo;
        }
        if g(hi) <= 0.0 {
            return hi;
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = g(u);
            if r == 0.0 {
                return u;
            }
            if r < 0.0 {
                lo = u;
            } else {
                hi = u;
            }
            let slope = self.speed_slope(u) * if increasing { 1.0 } else { -1.0 };
            let mut next = if slope != 0.0 { u - r / slope } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1e-300) || hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
                return next;
            }
            u = next;
        }
        u
    }

    /// True when `G''` does not take both signs on sampled points of `[a, b]`.
    pub fn is_monotone_on(&self, a: f64, b: f64) -> bool {
        let (mut pos, mut neg) = (false, false);
        for i in 0..=MONOTONE_SAMPLES {
            let u = a + (b - a) * i as f64 / MONOTONE_SAMPLES as f64;
            let s = self.speed_slope(u);
            pos |= s > 0.0;
            neg |= s < 0.0;
        }
        !(pos && neg)
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * u + ci)
}

fn differentiate_coeffs(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(i, ci)| i as f64 * ci).collect()
}

fn derivative_value(c: &[f64], u: f64, order: usize) -> f64 {
    // sum_{i>=order} c_i * i!/(i-order)! * u^(i-order)
    let mut acc = 0.0;
    for i in (order..c.len()).rev() {
        let mut falling = 1.0;
        for j in 0..order {
            falling *= (i - j) as f64;
        }
        acc = acc * u + c[i] * falling;
    }
    acc
}
