//! Dense polynomials with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Coefficients in ascending degree; trailing zeros are trimmed so the
/// leading coefficient is nonzero (the zero polynomial is `[0]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex::zero());
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect())
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: Complex<T>, k: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `z - r`
    pub fn linear_root(r: Complex<T>) -> Self {
        Self::new(vec![-r, Complex::one()])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        roots.iter().fold(Self::constant(Complex::one()), |acc, &r| &acc * &Self::linear_root(r))
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex<T> {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// Value together with the first and second derivative.
    pub fn eval_with_derivatives(&self, z: Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
        let mut p = Complex::zero();
        let mut dp = Complex::zero();
        let mut ddp = Complex::zero();
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * z + dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, ddp * T::lit(2.0))
    }

    /// `sum |c_k| |z|^k`, the rounding scale of a Horner evaluation at `z`.
    pub fn magnitude_at(&self, z: Complex<T>) -> T {
        let r = z.norm();
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    pub fn max_coeff_norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(Complex::zero());
        }
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * T::from_usize(k).expect("small degree")).collect(),
        )
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `p(s z)`
    pub fn scale_variable(&self, s: Complex<T>) -> Self {
        let mut pow = Complex::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * pow);
            pow *= s;
        }
        Self::new(out)
    }

    /// `z^d p(1/z)` for `d >= degree`.
    pub fn reversed(&self, d: usize) -> Self {
        assert!(d >= self.degree(), "reversal degree below polynomial degree");
        let mut out = vec![Complex::zero(); d + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[d - k] = c;
        }
        Self::new(out)
    }

    pub fn powi(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(Complex::one()), |acc, _| &acc * self)
    }

    /// `sum_k c_k num^k den^(d-k)`: the numerator of `p(num/den)` brought to
    /// total degree `d >= degree`.
    pub fn substitute_fraction(&self, num: &Self, den: &Self, d: usize) -> Self {
        assert!(d >= self.degree());
        let num_pows: Vec<Self> = (0..=d)
            .scan(Self::constant(Complex::one()), |acc, _| {
                let cur = acc.clone();
                *acc = &*acc * num;
                Some(cur)
            })
            .collect();
        let den_pows: Vec<Self> = (0..=d)
            .scan(Self::constant(Complex::one()), |acc, _| {
                let cur = acc.clone();
                *acc = &*acc * den;
                Some(cur)
            })
            .collect();
        self.coeffs
            .iter()
            .enumerate()
            .fold(Self::constant(Complex::zero()), |acc, (k, &c)| &acc + &(&num_pows[k] * &den_pows[d - k]).scale(c))
    }

    /// Synthetic division by `z - r`: returns `(quotient, remainder)`.
    pub fn div_linear(&self, r: Complex<T>) -> (Self, Complex<T>) {
        if self.degree() == 0 {
            return (Self::constant(Complex::zero()), self.coeffs[0]);
        }
        let n = self.degree();
        let mut q = vec![Complex::zero(); n];
        let mut acc = Complex::zero();
        for k in (0..=n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Self::new(q), acc)
    }

    /// Exact removal of a common factor `z^k` from the low end; returns `k`.
    pub fn strip_low_zeros(&mut self) -> usize {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count().min(self.degree());
        self.coeffs.drain(..k);
        k
    }

    pub fn map_coeffs(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }
}

impl<T: Real> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        let mut out = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Real> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.map_coeffs(|c| -c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;
    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![re(1.0), re(2.0), re(0.0), re(0.0)]);
        assert_eq!(p.degree(), 1);
        let z = Polynomial::<f64>::new(vec![]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn synthetic_division() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let (q, r) = p.div_linear(re(1.0));
        assert_eq!(q, Polynomial::from_real(&[1.0, 1.0]));
        assert_eq!(r, re(0.0));
        let (_, r) = p.div_linear(re(3.0));
        assert_eq!(r, re(8.0));
    }

    #[test]
    fn derivatives_match_symbolic() {
        // z^3 - 2z + 5
        let p = Polynomial::from_real(&[5.0, -2.0, 0.0, 1.0]);
        let z = C::new(0.3, -1.2);
        let (v, d1, d2) = p.eval_with_derivatives(z);
        assert!((v - (z * z * z - z * 2.0 + 5.0)).norm() < 1e-14);
        assert!((d1 - (z * z * 3.0 - 2.0)).norm() < 1e-14);
        assert!((d2 - z * 6.0).norm() < 1e-14);
        assert!((p.derivative().eval(z) - d1).norm() < 1e-14);
    }

    #[test]
    fn substitute_fraction_matches_pointwise() {
        let p = Polynomial::from_real(&[1.0, -2.0, 0.5, 3.0]);
        let num = Polynomial::from_real(&[1.0, 1.0]);
        let den = Polynomial::from_real(&[0.0, 1.0]);
        let q = p.substitute_fraction(&num, &den, 4);
        let w = C::new(0.7, 0.2);
        let expected = p.eval((w + 1.0) / w) * w.powu(4);
        assert!((q.eval(w) - expected).norm() < 1e-12);
    }

    #[test]
    fn reversal_and_low_zeros() {
        let mut p = Polynomial::from_real(&[0.0, 0.0, 2.0, 1.0]);
        assert_eq!(p.strip_low_zeros(), 2);
        assert_eq!(p, Polynomial::from_real(&[2.0, 1.0]));
        assert_eq!(p.reversed(3), Polynomial::from_real(&[0.0, 0.0, 1.0, 2.0]));
    }

    proptest! {
        #[test]
        fn product_evaluates_as_product(
            a in proptest::collection::vec(-5.0f64..5.0, 1..6),
            b in proptest::collection::vec(-5.0f64..5.0, 1..6),
            x in -2.0f64..2.0, y in -2.0f64..2.0,
        ) {
            let (pa, pb) = (Polynomial::from_real(&a), Polynomial::from_real(&b));
            let z = C::new(x, y);
            let lhs = (&pa * &pb).eval(z);
            let rhs = pa.eval(z) * pb.eval(z);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn division_reconstructs(c in proptest::collection::vec(-5.0f64..5.0, 2..8), r in -2.0f64..2.0) {
            let p = Polynomial::from_real(&c);
            let (q, rem) = p.div_linear(re(r));
            let back = &(&q * &Polynomial::linear_root(re(r))) + &Polynomial::constant(rem);
            for k in 0..=p.degree() {
                prop_assert!((back.coeff(k) - p.coeff(k)).norm() < 1e-9);
            }
        }
    }
}
