//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] holds normalized Taylor coefficients `a_k = g^(k)(x0) / k!` up
//! to a fixed order. Propagating jets through an expression tree yields exact
//! high-order derivatives without building the derivative expressions.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::flux::MAX_ORDER;

const N: usize = MAX_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; N],
    /// Highest order carried.
    n: usize,
}

impl Jet {
    pub fn constant(v: f64, n: usize) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Jet { c, n: n.min(MAX_ORDER) }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, n: usize) -> Self {
        let mut j = Jet::constant(x0, n);
        if j.n >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Normalized coefficient `g^(k) / k!`.
    pub fn coeff(&self, k: usize) -> f64 {
        if k <= self.n {
            self.c[k]
        } else {
            0.0
        }
    }

    /// Derivative `g^(k)(x0)`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    /// All derivatives `g, g', ..., g^(n)`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.derivative(k)).collect()
    }

    fn zip(self, rhs: Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let n = self.n.min(rhs.n);
        let mut c = [0.0; N];
        for k in 0..=n {
            c[k] = f(self.c[k], rhs.c[k]);
        }
        Jet { c, n }
    }

    pub fn scale(mut self, s: f64) -> Jet {
        for k in 0..=self.n {
            self.c[k] *= s;
        }
        self
    }

    pub fn exp(self) -> Jet {
        let mut e = [0.0; N];
        e[0] = self.c[0].exp();
        for k in 1..=self.n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet { c: e, n: self.n }
    }

    pub fn ln(self) -> Jet {
        let a0 = self.c[0];
        let mut l = [0.0; N];
        l[0] = if a0 > 0.0 { a0.ln() } else { f64::NAN };
        for k in 1..=self.n {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - s / k as f64) / a0;
        }
        Jet { c: l, n: self.n }
    }

    pub fn sin_cos(self) -> (Jet, Jet) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        (s[0], c[0]) = self.c[0].sin_cos();
        for k in 1..=self.n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let ja = j as f64 * self.c[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet { c: s, n: self.n }, Jet { c, n: self.n })
    }

    /// `self^r` for a real constant exponent.
    pub fn powf(self, r: f64) -> Jet {
        if r == r.trunc() && r.abs() <= 64.0 {
            return self.powi(r as i32);
        }
        let a0 = self.c[0];
        let mut p = [0.0; N];
        p[0] = a0.powf(r);
        for k in 1..=self.n {
            let mut s = 0.0;
            for j in 1..=k {
                s += ((r + 1.0) * j as f64 - k as f64) * self.c[j] * p[k - j];
            }
            p[k] = s / (k as f64 * a0);
        }
        Jet { c: p, n: self.n }
    }

    pub fn powi(self, e: i32) -> Jet {
        let mut base = self;
        let mut acc = Jet::constant(1.0, self.n);
        let mut m = e.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            m >>= 1;
        }
        if e < 0 {
            Jet::constant(1.0, self.n) / acc
        } else {
            acc
        }
    }

    /// Evaluates the polynomial `sum_i coeffs[i] * self^i`.
    pub fn poly(self, coeffs: &[f64]) -> Jet {
        let mut acc = Jet::constant(0.0, self.n);
        for &ci in coeffs.iter().rev() {
            acc = acc * self;
            acc.c[0] += ci;
        }
        acc
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.n.min(rhs.n);
        let mut c = [0.0; N];
        for k in 0..=n {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.c[j] * rhs.c[k - j];
            }
            c[k] = s;
        }
        Jet { c, n }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let n = self.n.min(rhs.n);
        let b0 = rhs.c[0];
        let mut c = [0.0; N];
        for k in 0..=n {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= rhs.c[j] * c[k - j];
            }
            c[k] = s / b0;
        }
        Jet { c, n }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_of_identity_has_unit_derivatives() {
        let j = Jet::variable(0.0, 8).exp();
        for k in 0..=8 {
            assert_relative_eq!(j.derivative(k), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sin_cos_cycle() {
        let x = 0.7;
        let (s, c) = Jet::variable(x, 8).sin_cos();
        let expect_s = [x.sin(), x.cos(), -x.sin(), -x.cos()];
        for k in 0..=8 {
            assert_relative_eq!(s.derivative(k), expect_s[k % 4], epsilon = 1e-12);
            assert_relative_eq!(c.derivative(k), expect_s[(k + 1) % 4], epsilon = 1e-12);
        }
    }

    #[test]
    fn ln_and_fractional_power() {
        let x = 1.8;
        let l = Jet::variable(x, 6).ln();
        // d^k/dx^k ln x = (-1)^(k-1) (k-1)! / x^k
        for k in 1..=6 {
            let expect = (-1f64).powi(k as i32 - 1) * factorial(k - 1) / x.powi(k as i32);
            assert_relative_eq!(l.derivative(k), expect, max_relative = 1e-12);
        }
        let p = Jet::variable(x, 4).powf(0.5);
        assert_relative_eq!(p.derivative(1), 0.5 / x.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(p.derivative(2), -0.25 * x.powf(-1.5), max_relative = 1e-13);
    }

    #[test]
    fn division_and_negative_integer_power_agree() {
        let x = Jet::variable(-0.4, 8);
        let one_plus = x * x + Jet::constant(1.0, 8);
        let a = Jet::constant(1.0, 8) / (one_plus * one_plus);
        let b = one_plus.powi(-2);
        for k in 0..=8 {
            assert_relative_eq!(a.derivative(k), b.derivative(k), max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn integer_power_at_zero_is_exact() {
        let j = Jet::variable(0.0, 8).powf(3.0);
        assert_eq!(j.derivative(3), 6.0);
        assert_eq!(j.derivative(2), 0.0);
    }
}
