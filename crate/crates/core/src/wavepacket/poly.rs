use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Complex polynomial in one variable; `coeffs[k]` multiplies `u^k`.
/// Never empty: the zero polynomial is `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.re == T::zero() && c.im == T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex::new(T::zero(), T::zero()));
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex::new(*c, T::zero())).collect())
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(T::one(), T::zero()))
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    /// `u^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex::new(T::zero(), T::zero()); k + 1];
        c[k] = Complex::new(T::one(), T::zero());
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex::new(T::zero(), T::zero())
    }

    pub fn eval(&self, u: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * u + *c)
    }

    pub fn eval_real(&self, u: T) -> Complex<T> {
        self.eval(Complex::new(u, T::zero()))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|a| *a * c).collect())
    }

    /// `u · p(u)`.
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Complex::new(T::zero(), T::zero()));
        c.extend_from_slice(&self.coeffs);
        Self::new(c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| *c * T::from_usize(k).expect("degree fits the scalar"))
                .collect(),
        )
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `q(v) = p(v + h)`.
    pub fn taylor_shift(&self, h: Complex<T>) -> Self {
        // repeated synthetic division
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += h * next;
            }
        }
        Self::new(c)
    }

    /// Coefficient moduli, the majorant `Σ |c_k| r^k` of `|p(u)|` at `|u| = r`.
    pub fn moduli(&self) -> Vec<T> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn max_diff(&self, other: &Self) -> T {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex::new(T::zero(), T::zero());
        (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or(zero);
                let b = other.coeffs.get(k).copied().unwrap_or(zero);
                (a - b).norm()
            })
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Complex::new(T::zero(), T::zero());
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(zero) + o.coeffs.get(k).copied().unwrap_or(zero))
                .collect(),
        )
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, o: &Poly<T>) -> Poly<T> {
        self + &o.scale(Complex::new(-T::one(), T::zero()))
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, o: &Poly<T>) -> Poly<T> {
        let mut c = vec![Complex::new(T::zero(), T::zero()); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += *a * *b;
            }
        }
        Poly::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn arithmetic() {
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        let q = Poly::from_real(&[0.0, 0.0, 3.0]);
        assert_eq!((&p * &q).coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0), c(0.0, 6.0)]);
        assert_eq!((&p - &p), Poly::zero());
        assert_eq!(q.derivative(), Poly::from_real(&[0.0, 6.0]));
        assert_eq!(Poly::<f64>::one().shift_up(), Poly::monomial(1));
        assert_eq!(Poly::<f64>::zero().shift_up(), Poly::zero());
        assert_eq!(Poly::<f64>::monomial(3).degree(), 3);
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Poly::new(vec![c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.25), c(0.0, 1.0)]);
        let h = c(0.3, -0.7);
        let q = p.taylor_shift(h);
        for v in [c(0.0, 0.0), c(1.5, 0.0), c(-0.4, 2.0)] {
            assert!((q.eval(v) - p.eval(v + h)).norm() < 1e-12);
        }
    }
}
