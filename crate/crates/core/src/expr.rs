//! Expression trees for the pieces of an initial condition.

use std::fmt;

use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Constant(f64),
    Variable,
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    /// Base raised to a constant exponent.
    Pow(Box<ExprNode>, f64),
    Exp(Box<ExprNode>),
    Ln(Box<ExprNode>),
    Sin(Box<ExprNode>),
    Cos(Box<ExprNode>),
    Negate(Box<ExprNode>),
}

use ExprNode::*;

fn b(e: ExprNode) -> Box<ExprNode> {
    Box::new(e)
}

impl ExprNode {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Constant(c) => *c,
            Variable => x,
            Add(l, r) => l.eval(x) + r.eval(x),
            Sub(l, r) => l.eval(x) - r.eval(x),
            Mul(l, r) => l.eval(x) * r.eval(x),
            Div(l, r) => l.eval(x) / r.eval(x),
            Pow(base, e) => {
                let v = base.eval(x);
                if *e == e.trunc() && e.abs() <= 64.0 {
                    v.powi(*e as i32)
                } else {
                    v.powf(*e)
                }
            }
            Exp(a) => a.eval(x).exp(),
            Ln(a) => {
                let v = a.eval(x);
                if v > 0.0 {
                    v.ln()
                } else {
                    f64::NAN
                }
            }
            Sin(a) => a.eval(x).sin(),
            Cos(a) => a.eval(x).cos(),
            Negate(a) => -a.eval(x),
        }
    }

    /// Taylor expansion at `x` through order `n`.
    pub fn jet(&self, x: f64, n: usize) -> Jet {
        match self {
            Constant(c) => Jet::constant(*c, n),
            Variable => Jet::variable(x, n),
            Add(l, r) => l.jet(x, n) + r.jet(x, n),
            Sub(l, r) => l.jet(x, n) - r.jet(x, n),
            Mul(l, r) => l.jet(x, n) * r.jet(x, n),
            Div(l, r) => l.jet(x, n) / r.jet(x, n),
            Pow(base, e) => base.jet(x, n).powf(*e),
            Exp(a) => a.jet(x, n).exp(),
            Ln(a) => a.jet(x, n).ln(),
            Sin(a) => a.jet(x, n).sin_cos().0,
            Cos(a) => a.jet(x, n).sin_cos().1,
            Negate(a) => -a.jet(x, n),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Constant(_) => true,
            Variable => false,
            Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r) => l.is_constant() && r.is_constant(),
            Pow(a, _) | Exp(a) | Ln(a) | Sin(a) | Cos(a) | Negate(a) => a.is_constant(),
        }
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derivative(&self) -> ExprNode {
        match self {
            Constant(_) => Constant(0.0),
            Variable => Constant(1.0),
            Add(l, r) => add(l.derivative(), r.derivative()),
            Sub(l, r) => sub(l.derivative(), r.derivative()),
            Mul(l, r) => add(mul(l.derivative(), (**r).clone()), mul((**l).clone(), r.derivative())),
            Div(l, r) => div(
                sub(mul(l.derivative(), (**r).clone()), mul((**l).clone(), r.derivative())),
                pow((**r).clone(), 2.0),
            ),
            Pow(a, e) => mul(mul(Constant(*e), pow((**a).clone(), e - 1.0)), a.derivative()),
            Exp(a) => mul(self.clone(), a.derivative()),
            Ln(a) => div(a.derivative(), (**a).clone()),
            Sin(a) => mul(Cos(a.clone()), a.derivative()),
            Cos(a) => neg(mul(Sin(a.clone()), a.derivative())),
            Negate(a) => neg(a.derivative()),
        }
    }
}

fn add(l: ExprNode, r: ExprNode) -> ExprNode {
    match (&l, &r) {
        (Constant(a), Constant(c)) => Constant(a + c),
        (Constant(z), _) if *z == 0.0 => r,
        (_, Constant(z)) if *z == 0.0 => l,
        _ => Add(b(l), b(r)),
    }
}

fn sub(l: ExprNode, r: ExprNode) -> ExprNode {
    match (&l, &r) {
        (Constant(a), Constant(c)) => Constant(a - c),
        (_, Constant(z)) if *z == 0.0 => l,
        (Constant(z), _) if *z == 0.0 => neg(r),
        _ => Sub(b(l), b(r)),
    }
}

fn mul(l: ExprNode, r: ExprNode) -> ExprNode {
    match (&l, &r) {
        (Constant(a), Constant(c)) => Constant(a * c),
        (Constant(z), _) | (_, Constant(z)) if *z == 0.0 => Constant(0.0),
        (Constant(o), _) if *o == 1.0 => r,
        (_, Constant(o)) if *o == 1.0 => l,
        _ => Mul(b(l), b(r)),
    }
}

fn div(l: ExprNode, r: ExprNode) -> ExprNode {
    match (&l, &r) {
        (Constant(z), _) if *z == 0.0 => Constant(0.0),
        (_, Constant(o)) if *o == 1.0 => l,
        _ => Div(b(l), b(r)),
    }
}

fn pow(a: ExprNode, e: f64) -> ExprNode {
    if e == 0.0 {
        Constant(1.0)
    } else if e == 1.0 {
        a
    } else {
        Pow(b(a), e)
    }
}

fn neg(a: ExprNode) -> ExprNode {
    match a {
        Constant(c) => Constant(-c),
        Negate(inner) => *inner,
        other => Negate(b(other)),
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 {
        write!(f, "(-{})", -v)
    } else {
        write!(f, "{v}")
    }
}

/// Fully parenthesized form accepted back by the profile parser.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant(c) => write_number(f, *c),
            Variable => f.write_str("x"),
            Add(l, r) => write!(f, "({l} + {r})"),
            Sub(l, r) => write!(f, "({l} - {r})"),
            Mul(l, r) => write!(f, "({l} * {r})"),
            Div(l, r) => write!(f, "({l} / {r})"),
            Pow(a, e) => {
                write!(f, "({a}^")?;
                write_number(f, *e)?;
                f.write_str(")")
            }
            Exp(a) => write!(f, "exp({a})"),
            Ln(a) => write!(f, "ln({a})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Negate(a) => write!(f, "(-{a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::parse::parse_expr;
    use approx::assert_relative_eq;

    const SAMPLES: [&str; 6] = [
        "x^2 - 2*x",
        "1 - exp(x)",
        "2*x/(1+x^2)^2",
        "exp((-x^4 + 5*x^2)/10)",
        "sin(3*x) * cos(x) + ln(2 + x^2)",
        "(x + 3)^0.5 - 1/(x + 4)",
    ];

    #[test]
    fn symbolic_and_jet_derivatives_agree() {
        for src in SAMPLES {
            let e = parse_expr(src).unwrap();
            let mut d = e.clone();
            for k in 0..=5 {
                for &x in &[-0.9, -0.2, 0.4, 1.3] {
                    let jet = e.jet(x, 5).derivative(k);
                    let sym = d.eval(x);
                    assert_relative_eq!(jet, sym, max_relative = 1e-10, epsilon = 1e-10);
                }
                d = d.derivative();
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for src in SAMPLES {
            let e = parse_expr(src).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e, again, "{src} -> {e}");
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert_eq!(parse_expr("exp(2) * 3").unwrap().derivative().eval(1.0), 0.0);
    }
}
