//! Piecewise-smooth initial conditions.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::ExprNode;
use crate::flux::{FluxModel, MAX_ORDER};
use crate::jet::Jet;
use crate::parse::parse_pieces;

/// Which one-sided limit a query uses at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Interior,
}

/// Interior points sampled per piece when checking for singularities.
const VALIDATION_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseProfile {
    breakpoints: Vec<f64>,
    pieces: Vec<ExprNode>,
    domain: (f64, f64),
}

impl PiecewiseProfile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw = parse_pieces(text)?;
        if raw[0].lo != f64::NEG_INFINITY {
            return Err(Error::InvalidProfile(format!(
                "first piece (at {}) must be unbounded below",
                raw[0].pos
            )));
        }
        let last = &raw[raw.len() - 1];
        if last.hi != f64::INFINITY {
            return Err(Error::InvalidProfile(format!("last piece (at {}) must be unbounded above", last.pos)));
        }
        let mut breakpoints = Vec::with_capacity(raw.len() - 1);
        for w in raw.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidProfile(format!(
                    "pieces at {} and {} do not tile the line: {} vs {}",
                    w[0].pos, w[1].pos, w[0].hi, w[1].lo
                )));
            }
            breakpoints.push(w[0].hi);
        }
        Self::new(breakpoints, raw.into_iter().map(|p| p.expr).collect())
    }

    pub fn new(breakpoints: Vec<f64>, pieces: Vec<ExprNode>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidProfile(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidProfile("breakpoints must be finite and strictly increasing".into()));
        }
        let domain = match (breakpoints.first(), breakpoints.last()) {
            (Some(&a), Some(&b)) => (a - 5.0, b + 5.0),
            _ => (-5.0, 5.0),
        };
        let profile = PiecewiseProfile { breakpoints, pieces, domain };
        profile.check_finite()?;
        Ok(profile)
    }

    fn check_finite(&self) -> Result<()> {
        for (i, e) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_bounds(i);
            let a = if lo.is_finite() { lo } else { hi.min(0.0) - 10.0 };
            let b = if hi.is_finite() { hi } else { lo.max(0.0) + 10.0 };
            for s in 0..=VALIDATION_SAMPLES {
                let x = a + (b - a) * s as f64 / VALIDATION_SAMPLES as f64;
                if !e.eval(x).is_finite() {
                    return Err(Error::SingularPiece { piece: i, x });
                }
            }
        }
        Ok(())
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidProfile(format!("invalid domain [{lo}, {hi}]")));
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[ExprNode] {
        &self.pieces
    }

    pub fn domain_hint(&self) -> (f64, f64) {
        self.domain
    }

    /// Open interval covered by piece `i`; end pieces extend to infinity.
    pub fn piece_bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
        let hi = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    /// Index of the piece that serves `x` from the given side.
    pub fn piece_index(&self, x: f64, side: Side) -> Result<usize> {
        match side {
            Side::Left => Ok(self.breakpoints.partition_point(|&b| b < x)),
            Side::Right => Ok(self.breakpoints.partition_point(|&b| b <= x)),
            Side::Interior => {
                let i = self.breakpoints.partition_point(|&b| b < x);
                if self.breakpoints.get(i) == Some(&x) {
                    Err(Error::AmbiguousSide { x })
                } else {
                    Ok(i)
                }
            }
        }
    }

    /// Piece containing `x`, preferring the right piece at a breakpoint.
    #[inline]
    pub fn piece_at(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    /// `f(x)` with right-continuity at breakpoints.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.pieces[self.piece_at(x)].eval(x)
    }

    /// `f^(order)(x)` from the indicated side.
    pub fn eval(&self, x: f64, side: Side, order: usize) -> Result<f64> {
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: MAX_ORDER });
        }
        let i = self.piece_index(x, side)?;
        if order == 0 {
            return Ok(self.pieces[i].eval(x));
        }
        Ok(self.pieces[i].jet(x, order).derivative(order))
    }

    /// Taylor jet of `h = G'(f)` for piece `i` at `x` through order `n`.
    pub fn h_jet(&self, model: &FluxModel, i: usize, x: f64, n: usize) -> Jet {
        speed_jet(model, self.pieces[i].jet(x, n))
    }

    /// `h^(order)(x)` from the indicated side, where `h = G'(f)`.
    pub fn char_speed(&self, model: &FluxModel, x: f64, side: Side, order: usize) -> Result<f64> {
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: MAX_ORDER });
        }
        let i = self.piece_index(x, side)?;
        Ok(self.h_jet(model, i, x, order).derivative(order))
    }

    /// `(f, h, h')` on piece `i` at `x`.
    #[inline]
    pub fn local(&self, model: &FluxModel, i: usize, x: f64) -> Local {
        let j = self.pieces[i].jet(x, 1);
        let (f, df) = (j.value(), j.coeff(1));
        Local { f, h: model.speed(f), dh: model.speed_slope(f) * df }
    }

    /// `(f, h, h')` at `x` using the piece that contains it.
    #[inline]
    pub fn local_at(&self, model: &FluxModel, x: f64) -> Local {
        self.local(model, self.piece_at(x), x)
    }

    /// Translated copy `f(x - a)`.
    pub fn shifted(&self, a: f64) -> PiecewiseProfile {
        let sub = |e: &ExprNode| substitute(e, &ExprNode::Sub(Box::new(ExprNode::Variable), Box::new(ExprNode::Constant(a))));
        PiecewiseProfile {
            breakpoints: self.breakpoints.iter().map(|b| b + a).collect(),
            pieces: self.pieces.iter().map(sub).collect(),
            domain: (self.domain.0 + a, self.domain.1 + a),
        }
    }

    /// Copy with `c` added to every piece.
    pub fn offset(&self, c: f64) -> PiecewiseProfile {
        PiecewiseProfile {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|e| ExprNode::Add(Box::new(e.clone()), Box::new(ExprNode::Constant(c))))
                .collect(),
            domain: self.domain,
        }
    }
}

/// Value, characteristic speed and its slope at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local {
    pub f: f64,
    pub h: f64,
    pub dh: f64,
}

/// Jet of `G'(f)` from a jet of `f`.
pub(crate) fn speed_jet(model: &FluxModel, f: Jet) -> Jet {
    match model {
        FluxModel::Burgers => f,
        FluxModel::PowerQuartic => f.powi(3).scale(1.0 / 3.0),
        FluxModel::Polynomial(_) => f.poly(&model.speed_coefficients()),
    }
}

fn substitute(e: &ExprNode, with: &ExprNode) -> ExprNode {
    use ExprNode::*;
    let s = |a: &ExprNode| Box::new(substitute(a, with));
    match e {
        Constant(c) => Constant(*c),
        Variable => with.clone(),
        Add(l, r) => Add(s(l), s(r)),
        Sub(l, r) => Sub(s(l), s(r)),
        Mul(l, r) => Mul(s(l), s(r)),
        Div(l, r) => Div(s(l), s(r)),
        Pow(a, p) => Pow(s(a), *p),
        Exp(a) => Exp(s(a)),
        Ln(a) => Ln(s(a)),
        Sin(a) => Sin(s(a)),
        Cos(a) => Cos(s(a)),
        Negate(a) => Negate(s(a)),
    }
}

/// Serializes back to the piece grammar.
impl fmt::Display for PiecewiseProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.breakpoints.is_empty() {
            return write!(f, "{}", self.pieces[0]);
        }
        for (i, e) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_bounds(i);
            if i > 0 {
                f.write_str("; ")?;
            }
            match (lo.is_finite(), hi.is_finite()) {
                (false, _) => write!(f, "x < {hi}: {e}")?,
                (_, false) => write!(f, "x >= {lo}: {e}")?,
                _ => write!(f, "{lo} <= x < {hi}: {e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const EX1: &str = "x < 0: x + 1.5 ; x >= 0: x^2 - 2*x";
    const EX2: &str = "x < 0: 1 - exp(x) ; x >= 0: x^2 - 2*x";
    const EX4: &str = "x < 0: -(x+1)^2/2 ; x >= 0: x + 1";

    #[test]
    fn parse_examples() {
        let p = PiecewiseProfile::parse(EX1).unwrap();
        assert_eq!(p.breakpoints(), &[0.0]);
        assert_eq!(p.pieces().len(), 2);
        let r = PiecewiseProfile::parse("x < 0: 1 ; x >= 0: 0").unwrap();
        assert_eq!(r.value(-3.0), 1.0);
        assert_eq!(r.value(3.0), 0.0);
        assert!(matches!(
            PiecewiseProfile::parse("x < 0: 1/x ; x >= 0: 0"),
            Err(Error::SingularPiece { piece: 0, .. })
        ));
    }

    #[test]
    fn tiling_errors() {
        assert!(matches!(PiecewiseProfile::parse("x < 0: 1 ; x >= 1: 0"), Err(Error::InvalidProfile(_))));
        assert!(matches!(PiecewiseProfile::parse("0 <= x < 1: 1 ; x >= 1: 0"), Err(Error::InvalidProfile(_))));
        assert!(matches!(PiecewiseProfile::parse("x < 0: 1 ; -1 <= x < 1: 0; x >= 1: 2"), Err(Error::InvalidProfile(_))));
        assert!(matches!(PiecewiseProfile::parse("x < 0: 1 ; x >= 0: ln(x - 1)"), Err(Error::SingularPiece { .. })));
    }

    #[test]
    fn eval_examples() {
        let p = PiecewiseProfile::parse(EX2).unwrap();
        assert_eq!(p.eval(0.0, Side::Left, 0).unwrap(), 0.0);
        assert_eq!(p.eval(0.0, Side::Right, 1).unwrap(), -2.0);
        let r = PiecewiseProfile::parse("x < 0: 1 ; x >= 0: 0").unwrap();
        assert_eq!(r.eval(-5.0, Side::Interior, 0).unwrap(), 1.0);
        assert_eq!(r.eval(0.0, Side::Interior, 0), Err(Error::AmbiguousSide { x: 0.0 }));
        assert_eq!(
            r.eval(1.0, Side::Right, 9),
            Err(Error::UnsupportedOrder { order: 9, max: MAX_ORDER })
        );
    }

    #[test]
    fn char_speed_examples() {
        let p2 = PiecewiseProfile::parse(EX2).unwrap();
        assert_eq!(p2.char_speed(&FluxModel::Burgers, 0.0, Side::Right, 1).unwrap(), -2.0);
        let p4 = PiecewiseProfile::parse(EX4).unwrap();
        assert_relative_eq!(
            p4.char_speed(&FluxModel::PowerQuartic, 0.0, Side::Left, 1).unwrap(),
            -0.25,
            epsilon = 1e-15
        );
        // h = -(x+1)^6/24 on the left, so h'' = -30(x+1)^4/24
        assert_relative_eq!(
            p4.char_speed(&FluxModel::PowerQuartic, 0.0, Side::Left, 2).unwrap(),
            -1.25,
            epsilon = 1e-14
        );
        let r = PiecewiseProfile::parse("x < 0: 1 ; x >= 0: 0").unwrap();
        assert_eq!(r.char_speed(&FluxModel::PowerQuartic, 2.0, Side::Interior, 1).unwrap(), 0.0);
    }

    #[test]
    fn polynomial_flux_route_matches_closed_form() {
        let p = PiecewiseProfile::parse(EX4).unwrap();
        let poly = FluxModel::polynomial(vec![0.0, 0.0, 0.0, 0.0, 1.0 / 12.0]).unwrap();
        for k in 0..=MAX_ORDER {
            assert_relative_eq!(
                p.char_speed(&poly, -0.3, Side::Interior, k).unwrap(),
                p.char_speed(&FluxModel::PowerQuartic, -0.3, Side::Interior, k).unwrap(),
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
    }

    fn char_speed_fd(p: &PiecewiseProfile, m: &FluxModel, x: f64) {
        let step = 1e-5;
        for k in 1..=3 {
            let a = p.char_speed(m, x + step, Side::Interior, k - 1).unwrap();
            let b = p.char_speed(m, x - step, Side::Interior, k - 1).unwrap();
            let fd = (a - b) / (2.0 * step);
            let exact = p.char_speed(m, x, Side::Interior, k).unwrap();
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "k={k} x={x}: {fd} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn char_speed_matches_finite_differences(x in -3.0f64..3.0) {
            prop_assume!(x.abs() > 1e-3);
            let p = PiecewiseProfile::parse(EX2).unwrap();
            char_speed_fd(&p, &FluxModel::Burgers, x);
            let q = PiecewiseProfile::parse(EX4).unwrap();
            char_speed_fd(&q, &FluxModel::PowerQuartic, x);
            let g = PiecewiseProfile::parse("exp((-x^4 + 5*x^2)/10)").unwrap();
            char_speed_fd(&g, &FluxModel::polynomial(vec![0.0, 1.0, 0.5, 0.25]).unwrap(), x);
        }

        #[test]
        fn serialization_round_trip(xs in proptest::collection::vec(-6.0f64..6.0, 100)) {
            for src in [EX1, EX2, EX4, "x < -1: 0; -1 <= x < 1: 1.5 - x - 0.1*x^3; x >= 1: 3", "2*x/(1+x^2)^2"] {
                let p = PiecewiseProfile::parse(src).unwrap();
                let q = PiecewiseProfile::parse(&p.to_string()).unwrap();
                for &x in &xs {
                    prop_assert_eq!(p.value(x).to_bits(), q.value(x).to_bits());
                }
            }
        }
    }
}
