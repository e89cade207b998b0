//! Möbius transformations of the Riemann sphere.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{principal_root, Real};
use crate::sphere::ExtendedComplex;

/// Smallest admissible `|ad - bc|`.
pub const MOBIUS_EPS: f64 = 1e-12;

/// `z -> (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> MobiusMap<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() <= T::lit(MOBIUS_EPS) {
            return Err(Error::InvalidArgument(format!("singular Möbius map: |ad - bc| = {:e}", det.norm().as_f64())));
        }
        Ok(Self { a, b, c, d })
    }

    fn raw(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(Complex::one(), Complex::zero(), Complex::zero(), Complex::one())
    }

    /// `1 / (z - 1)`: sends 1 to infinity and infinity to 0.
    pub fn one_to_infinity() -> Self {
        Self::raw(Complex::zero(), Complex::one(), Complex::one(), -Complex::one())
    }

    /// `(z + 1) / (z - 1)`: sends 1 to infinity and -1 to 0.
    pub fn plus_minus_one_to_poles() -> Self {
        Self::raw(Complex::one(), Complex::one(), Complex::one(), -Complex::one())
    }

    /// `xi z`
    pub fn rotation(xi: Complex<T>) -> Result<Self> {
        Self::new(xi, Complex::zero(), Complex::zero(), Complex::one())
    }

    /// `z / (-c)^(1/n)` with the principal root: carries the roots of
    /// `z^n + c` onto the n-th roots of unity.
    pub fn root_normalizer(n: u32, c: Complex<T>) -> Result<Self> {
        let s = principal_root(-c, n);
        if s.is_zero() {
            return Err(Error::InvalidArgument("c must be nonzero".into()));
        }
        Self::new(s.inv(), Complex::zero(), Complex::zero(), Complex::one())
    }

    /// `1 / z`
    pub fn reciprocal() -> Self {
        Self::raw(Complex::zero(), Complex::one(), Complex::one(), Complex::zero())
    }

    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Self::raw(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn apply(&self, z: ExtendedComplex<T>) -> ExtendedComplex<T> {
        match z {
            ExtendedComplex::Infinity => {
                if self.c.is_zero() {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::saturating(self.a / self.c)
                }
            }
            ExtendedComplex::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                if den.is_zero() {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::saturating(num / den)
                }
            }
        }
    }

    pub fn apply_finite(&self, z: Complex<T>) -> ExtendedComplex<T> {
        self.apply(ExtendedComplex::Finite(z))
    }
}
