//! Forward-mode dual numbers, used to differentiate the spectral
//! reconstruction with respect to family parameters.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar abstraction shared by `f64` and [`Dual`].
pub(crate) trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(value: f64, like: &Self) -> Self;
    fn value(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;

    fn scale(&self, k: f64) -> Self {
        self.clone() * Self::cst(k, self)
    }
}

impl Real for f64 {
    fn cst(value: f64, _: &Self) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
}

/// Value plus gradient with respect to a fixed set of seed variables.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Dual {
    pub re: f64,
    pub eps: Vec<f64>,
}

impl Dual {
    pub fn constant(re: f64, n: usize) -> Self {
        Dual { re, eps: vec![0.0; n] }
    }

    /// The `index`-th independent variable out of `n`.
    pub fn variable(re: f64, index: usize, n: usize) -> Self {
        let mut eps = vec![0.0; n];
        eps[index] = 1.0;
        Dual { re, eps }
    }

    fn chain(&self, re: f64, slope: f64) -> Self {
        Dual { re, eps: self.eps.iter().map(|e| e * slope).collect() }
    }
}

fn zip_eps(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    // constants built with `cst` carry the partner's width, so lengths agree
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual { re: self.re + rhs.re, eps: zip_eps(&self.eps, &rhs.eps, |x, y| x + y) }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual { re: self.re - rhs.re, eps: zip_eps(&self.eps, &rhs.eps, |x, y| x - y) }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let (a, b) = (self.re, rhs.re);
        Dual { re: a * b, eps: zip_eps(&self.eps, &rhs.eps, |x, y| x * b + a * y) }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let (a, b) = (self.re, rhs.re);
        let b2 = b * b;
        Dual { re: a / b, eps: zip_eps(&self.eps, &rhs.eps, |x, y| (x * b - a * y) / b2) }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { re: -self.re, eps: self.eps.into_iter().map(|e| -e).collect() }
    }
}

impl Real for Dual {
    fn cst(value: f64, like: &Self) -> Self {
        Dual::constant(value, like.eps.len())
    }
    fn value(&self) -> f64 {
        self.re
    }
    fn sqrt(&self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn sin(&self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn ln(&self) -> Self {
        self.chain(self.re.ln(), 1.0 / self.re)
    }
    fn exp(&self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Real>(x: &T, y: &T) -> T {
        (x.clone() * y.clone()).sin() + x.sqrt() / y.clone() - x.ln().exp()
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (x, y) = (0.7, 1.3);
        let d = f(&Dual::variable(x, 0, 2), &Dual::variable(y, 1, 2));
        let h = 1e-6;
        let gx = (f(&(x + h), &y) - f(&(x - h), &y)) / (2.0 * h);
        let gy = (f(&x, &(y + h)) - f(&x, &(y - h))) / (2.0 * h);
        assert!((d.re - f(&x, &y)).abs() < 1e-15);
        assert!((d.eps[0] - gx).abs() < 1e-8);
        assert!((d.eps[1] - gy).abs() < 1e-8);
    }
}
