//! Points of the Riemann sphere.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real};

/// A finite complex number or the point at infinity.
///
/// Finite values never hold NaN or infinite components; constructors reject
/// NaN and fold infinite components into [`ExtendedComplex::Infinity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> ExtendedComplex<T> {
    /// Wraps `z`, mapping overflowed components to infinity.
    pub fn new(z: Complex<T>) -> Result<Self> {
        if z.re.is_nan() || z.im.is_nan() {
            return Err(Error::NotFinite(format!("{z:?}")));
        }
        if is_finite(z) {
            Ok(Self::Finite(z))
        } else {
            Ok(Self::Infinity)
        }
    }

    /// Like [`ExtendedComplex::new`] but NaN is also sent to infinity.
    ///
    /// Used on the hot evaluation path where NaN can only come from
    /// overflow in `inf/inf` style quotients.
    #[inline]
    pub(crate) fn saturating(z: Complex<T>) -> Self {
        if is_finite(z) {
            Self::Finite(z)
        } else {
            Self::Infinity
        }
    }

    pub fn real(re: T) -> Self {
        Self::Finite(Complex::new(re, T::zero()))
    }

    pub fn zero() -> Self {
        Self::Finite(Complex::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn finite(&self) -> Option<Complex<T>> {
        match *self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }

    /// Modulus, `+inf` at infinity.
    pub fn norm(&self) -> T {
        match self {
            Self::Finite(z) => z.norm(),
            Self::Infinity => T::infinity(),
        }
    }

    /// `1/z` on the sphere: `0 <-> inf`.
    pub fn recip(&self) -> Self {
        match *self {
            Self::Infinity => Self::zero(),
            Self::Finite(z) if z.is_zero() => Self::Infinity,
            Self::Finite(z) => Self::saturating(crate::scalar::safe_inv(z)),
        }
    }

    /// Euclidean distance, with `d(inf, inf) = 0` and `d(z, inf) = inf`.
    pub fn distance(&self, other: &Self) -> T {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => (a - b).norm(),
            (Self::Infinity, Self::Infinity) => T::zero(),
            _ => T::infinity(),
        }
    }

    /// Chordal distance on the unit sphere (bounded by 2).
    pub fn chordal_distance(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => {
                two * (a - b).norm() / ((T::one() + a.norm_sqr()).sqrt() * (T::one() + b.norm_sqr()).sqrt())
            }
            (Self::Infinity, Self::Infinity) => T::zero(),
            (Self::Finite(a), Self::Infinity) | (Self::Infinity, Self::Finite(a)) => {
                two / (T::one() + a.norm_sqr()).sqrt()
            }
        }
    }

    pub fn to_f64(&self) -> ExtendedComplex<f64> {
        match self {
            Self::Finite(z) => ExtendedComplex::Finite(Complex::new(z.re.as_f64(), z.im.as_f64())),
            Self::Infinity => ExtendedComplex::Infinity,
        }
    }
}

impl<T: Real> From<Complex<T>> for ExtendedComplex<T> {
    fn from(z: Complex<T>) -> Self {
        Self::saturating(z)
    }
}

impl<T: Real> fmt::Display for ExtendedComplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Self::Infinity => f.write_str("inf"),
        }
    }
}
