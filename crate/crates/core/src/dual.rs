//! Forward-mode dual numbers.
//!
//! `Dual<S>` carries a value and one directional derivative. Nesting
//! (`Dual<Dual<f64>>`) yields second derivatives along a direction, which is
//! how manufactured forcings and cutoff curvatures are computed.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Self { re, eps }
    }

    /// Independent variable: derivative seed 1.
    pub fn variable(re: S) -> Self {
        Self { re, eps: S::cst(1.0) }
    }

    pub fn constant(re: S) -> Self {
        Self { re, eps: S::cst(0.0) }
    }

    #[inline]
    fn chain(self, value: S, slope: S) -> Self {
        Self { re: value, eps: slope * self.eps }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Self::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn cst(v: f64) -> Self {
        Self::constant(S::cst(v))
    }

    fn re(&self) -> f64 {
        self.re.re()
    }

    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }

    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }

    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, S::cst(1.0) - t * t)
    }

    fn cosh(self) -> Self {
        // sinh(x) = tanh(x) cosh(x) keeps the trait surface small.
        let c = self.re.cosh();
        self.chain(c, self.re.tanh() * c)
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        self.chain(r, S::cst(0.5) / r)
    }

    fn abs(self) -> Self {
        if self.re.re() < 0.0 {
            -self
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::cst(1.0),
            _ => self.chain(self.re.powi(n), S::cst(n as f64) * self.re.powi(n - 1)),
        }
    }
}

impl<S: fmt::Display> fmt::Display for Dual<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.re, self.eps)
    }
}

/// Value and first derivative of a scalar function at `x`.
pub fn derivative<S: Scalar, F: Fn(Dual<S>) -> Dual<S>>(f: F, x: S) -> (S, S) {
    let y = f(Dual::variable(x));
    (y.re, y.eps)
}

/// Value, first and second derivative of a scalar function at `x`.
pub fn second_derivative<S: Scalar, F: Fn(Dual<Dual<S>>) -> Dual<Dual<S>>>(f: F, x: S) -> (S, S, S) {
    let seed = Dual::new(Dual::variable(x), Dual::constant(S::cst(1.0)));
    let y = f(seed);
    (y.re.re, y.re.eps, y.eps.eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_and_quotient_rules() {
        let (v, d) = derivative(|x| x * x / (x + Dual::cst(1.0)), 2.0_f64);
        assert_relative_eq!(v, 4.0 / 3.0);
        // (x^2 + 2x)/(x+1)^2 at 2
        assert_relative_eq!(d, 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn nested_gives_second_derivative() {
        let (v, d1, d2) = second_derivative(|x| x.sin() * x.powi(3), 0.7_f64);
        let (s, c) = (0.7_f64.sin(), 0.7_f64.cos());
        assert_relative_eq!(v, s * 0.343);
        assert_relative_eq!(d1, c * 0.343 + 3.0 * 0.49 * s, epsilon = 1e-14);
        assert_relative_eq!(d2, -s * 0.343 + 6.0 * 0.49 * c + 6.0 * 0.7 * s, epsilon = 1e-13);
    }

    #[test]
    fn hyperbolic_and_abs() {
        let (_, d) = derivative(|x| x.tanh(), 0.3_f64);
        assert_relative_eq!(d, 1.0 - 0.3_f64.tanh().powi(2), epsilon = 1e-15);
        let (_, d) = derivative(|x| x.cosh(), 0.3_f64);
        assert_relative_eq!(d, 0.3_f64.sinh(), epsilon = 1e-15);
        let (_, d) = derivative(|x| x.sech(), 0.3_f64);
        assert_relative_eq!(d, -0.3_f64.tanh() / 0.3_f64.cosh(), epsilon = 1e-15);
        let (_, d) = derivative(|x| x.abs(), -1.5_f64);
        assert_eq!(d, -1.0);
        let (_, d) = derivative(|x| x.sqrt(), 4.0_f64);
        assert_relative_eq!(d, 0.25);
    }
}
