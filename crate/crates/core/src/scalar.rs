//! Scalar abstraction shared by the map, root-finding and orbit code.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the numerical core is generic over.
///
/// The associated constants carry the precision-dependent thresholds used by
/// map evaluation; they are chosen so that f64 matches the documented
/// defaults and f32 stays inside its exponent range.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// `|Q(z)| < NEAR_POLE_RATIO * |P(z)|` is treated as a pole.
    const NEAR_POLE_RATIO: Self;
    /// Above this modulus, rational maps are evaluated in the chart `w = 1/z`.
    const REFLECT_THRESHOLD: Self;

    /// Lossy conversion from an f64 literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const NEAR_POLE_RATIO: f64 = 1e-300;
    const REFLECT_THRESHOLD: f64 = 1e150;
}

impl Real for f32 {
    const NEAR_POLE_RATIO: f32 = 1e-37;
    const REFLECT_THRESHOLD: f32 = 1e18;
}

#[inline]
pub(crate) fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `1/z` without the overflow of `|z|^2` at extreme magnitudes.
pub(crate) fn safe_inv<T: Real>(z: Complex<T>) -> Complex<T> {
    let s = z.norm();
    (z.conj() / s) / s
}

/// Principal n-th root: argument in (-pi/n, pi/n].
pub fn principal_root<T: Real>(z: Complex<T>, n: u32) -> Complex<T> {
    if z.re.is_zero() && z.im.is_zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let nn = T::from_u32(n).expect("small integer");
    let (r, theta) = z.to_polar();
    Complex::from_polar(r.powf(T::one() / nn), theta / nn)
}

/// `e^{2 pi i k / n}`.
pub fn root_of_unity<T: Real>(k: u32, n: u32) -> Complex<T> {
    let nn = T::from_u32(n).expect("small integer");
    let kk = T::from_u32(k % n).expect("small integer");
    Complex::from_polar(T::one(), T::TAU() * kk / nn)
}

/// All n-th roots of unity in index order.
pub fn roots_of_unity<T: Real>(n: u32) -> Vec<Complex<T>> {
    (0..n).map(|k| root_of_unity(k, n)).collect()
}
