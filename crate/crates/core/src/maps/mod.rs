//! The Chebyshev–Halley rational maps and the closed-form quantities around
//! them.
//!
//! Every map is stored as an explicit numerator/denominator pair expanded
//! once at construction, then evaluated by Horner's rule. The families are:
//!
//! * `O(n, alpha)`: the method applied to `z^n - 1`,
//! * `Oc(n, alpha, c)`: the method applied to `z^n + c`,
//! * `B(a) = z^3 (z - a) / (1 - a z)`: `O(2, alpha)` in the chart
//!   `(z + 1)/(z - 1)`, with `a = 2(alpha - 1)`,
//! * `R(n, alpha)`: `O(n, alpha)` in the chart `1/(z - 1)`,
//! * Newton's method on `z^n - 1`,
//! * the method applied to an arbitrary polynomial.

mod mobius;

pub use mobius::{MobiusMap, MOBIUS_EPS};

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{cx, is_finite, principal_root, root_of_unity, roots_of_unity, Real};
use crate::sphere::ExtendedComplex;

/// Distance from `1/2` and `(2n-1)/(2n-2)` below which `alpha` is degenerate.
pub const DEGENERATE_EPS: f64 = 1e-8;

/// True when `O(n, alpha)` drops degree: `alpha` near `1/2` or `(2n-1)/(2n-2)`.
pub fn degenerate_check<T: Real>(n: u32, alpha: Complex<T>) -> bool {
    let eps = T::lit(DEGENERATE_EPS);
    let nf = T::from_u32(n).expect("small n");
    let halley = Complex::new(T::lit(0.5), T::zero());
    let upper = Complex::new((nf + nf - T::one()) / (nf + nf - T::lit(2.0)), T::zero());
    (alpha - halley).norm() < eps || (alpha - upper).norm() < eps
}

/// One Chebyshev–Halley step on `g` from the finite point `z`.
///
/// Computed as `z - g (2 g'^2 + (1 - 2 alpha) g g'') / (2 g' (g'^2 - alpha g g''))`,
/// which is the usual `(1 + L/2 / (1 - alpha L)) g/g'` form with the
/// denominators of `L` cleared.
pub fn ch_step<T: Real>(g: &Polynomial<T>, alpha: Complex<T>, z: Complex<T>) -> Result<ExtendedComplex<T>> {
    if g.degree() < 1 {
        return Err(Error::InvalidArgument("ch_step needs a polynomial of degree >= 1".into()));
    }
    let (g0, g1, g2) = g.eval_with_derivatives(z);
    if g1.is_zero() {
        if g0.is_zero() {
            return Err(Error::Indeterminate { z: to_c64(z) });
        }
        return Ok(ExtendedComplex::Infinity);
    }
    let two = T::lit(2.0);
    let g1sq = g1 * g1;
    let gg2 = g0 * g2;
    let num = g0 * (g1sq * two + gg2 * (Complex::<T>::one() - alpha * two));
    let den = g1 * (g1sq - alpha * gg2) * two;
    if den.is_zero() {
        if num.is_zero() {
            return Err(Error::Indeterminate { z: to_c64(z) });
        }
        return Ok(ExtendedComplex::Infinity);
    }
    Ok(ExtendedComplex::saturating(z - num / den))
}

/// Which rational map a [`MapSpec`] holds.
#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    GenericCh {
        poly: Polynomial<T>,
        alpha: Complex<T>,
    },
    O {
        n: u32,
        alpha: Complex<T>,
    },
    Oc {
        n: u32,
        alpha: Complex<T>,
        c: Complex<T>,
    },
    B {
        a: Complex<T>,
    },
    R {
        n: u32,
        alpha: Complex<T>,
    },
    NewtonFn {
        n: u32,
    },
    /// `1 / f(1 / z)`: the inner map seen from the chart at infinity.
    Reciprocal(Box<Family<T>>),
}

impl<T: Real> fmt::Display for Family<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::GenericCh { poly, alpha } => write!(f, "generic-ch(deg={}, alpha={alpha})", poly.degree()),
            Family::O { n, alpha } => write!(f, "O(n={n}, alpha={alpha})"),
            Family::Oc { n, alpha, c } => write!(f, "Oc(n={n}, alpha={alpha}, c={c})"),
            Family::B { a } => write!(f, "B(a={a})"),
            Family::R { n, alpha } => write!(f, "R(n={n}, alpha={alpha})"),
            Family::NewtonFn { n } => write!(f, "newton(n={n})"),
            Family::Reciprocal(inner) => write!(f, "reciprocal({inner})"),
        }
    }
}

/// A rational map `P/Q` with its provenance.
#[derive(Clone, Debug)]
pub struct MapSpec<T> {
    family: Family<T>,
    num: Polynomial<T>,
    den: Polynomial<T>,
    // `z^d P(1/z)` and `z^d Q(1/z)` at their own degrees, for large |z|
    num_rev: Polynomial<T>,
    den_rev: Polynomial<T>,
}

/// Numerator/denominator of `O(n, alpha)` before any checks.
fn o_parts<T: Real>(n: u32, alpha: Complex<T>) -> (Polynomial<T>, Polynomial<T>) {
    let nn = n as usize;
    let nf = Complex::new(T::from_u32(n).expect("small n"), T::zero());
    let one = Complex::<T>::one();
    let two = one + one;
    let nm1 = nf - one;
    let mut num = vec![Complex::zero(); 2 * nn + 1];
    num[0] = (one - alpha * two) * nm1;
    num[nn] = two - alpha * T::lit(4.0) - nf * T::lit(4.0) + alpha * nf * T::lit(6.0) - alpha * nf * nf * two;
    num[2 * nn] = nm1 * (one - alpha * two - nf * two + alpha * nf * two);
    let e1 = alpha * (one - nf);
    let e2 = -alpha - nf + alpha * nf;
    let mut den = vec![Complex::zero(); 2 * nn];
    den[nn - 1] = nf * two * e1;
    den[2 * nn - 1] = nf * two * e2;
    (Polynomial::new(num), Polynomial::new(den))
}

/// Rejects parameters where `O(n, alpha)` has a common zero of `P` and `Q`.
///
/// `Q = 2n z^(n-1) (E1 + E2 z^n)`, so the candidates are `z = 0` and the
/// solutions of `z^n = -E1/E2`; `P` is a quadratic in `z^n`.
fn check_o_reduced<T: Real>(n: u32, num: &Polynomial<T>, den: &Polynomial<T>) -> Result<()> {
    let nn = n as usize;
    let tol = T::epsilon() * T::lit(64.0);
    let (p0, pn, p2n) = (num.coeff(0), num.coeff(nn), num.coeff(2 * nn));
    if p0.norm() <= tol * (p0.norm() + pn.norm() + p2n.norm()) {
        return Err(Error::CommonRoot { root: Complex::new(0.0, 0.0) });
    }
    let (e1, e2) = (den.coeff(nn - 1), den.coeff(2 * nn - 1));
    if !e2.is_zero() {
        let t = -e1 / e2;
        let v = p0 + pn * t + p2n * t * t;
        let scale = p0.norm() + pn.norm() * t.norm() + p2n.norm() * t.norm_sqr();
        if v.norm() <= tol * scale {
            return Err(Error::CommonRoot { root: to_c64(principal_root(t, n)) });
        }
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    Ok(())
}

fn check_alpha<T: Real>(n: u32, alpha: Complex<T>, allow_degenerate: bool) -> Result<()> {
    if !is_finite(alpha) {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    }
    if !allow_degenerate && degenerate_check(n, alpha) {
        return Err(Error::DegenerateParameter { n, alpha: to_c64(alpha), eps: DEGENERATE_EPS });
    }
    Ok(())
}

pub(crate) fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

impl<T: Real> MapSpec<T> {
    fn assemble(family: Family<T>, num: Polynomial<T>, den: Polynomial<T>) -> Self {
        let num_rev = num.reversed(num.degree());
        let den_rev = den.reversed(den.degree());
        Self { family, num, den, num_rev, den_rev }
    }

    /// `O(n, alpha)`; degenerate parameters are rejected.
    pub fn o(n: u32, alpha: Complex<T>) -> Result<Self> {
        Self::o_with(n, alpha, false)
    }

    /// `O(n, alpha)`; with `allow_degenerate` the degree and common-root
    /// checks are skipped and the unreduced expansion is stored.
    pub fn o_with(n: u32, alpha: Complex<T>, allow_degenerate: bool) -> Result<Self> {
        check_n(n)?;
        check_alpha(n, alpha, allow_degenerate)?;
        let (num, den) = o_parts(n, alpha);
        if !allow_degenerate {
            check_o_reduced(n, &num, &den)?;
        }
        Ok(Self::assemble(Family::O { n, alpha }, num, den))
    }

    /// The method applied to `z^n + c`, built as `s O(z / s)` with
    /// `s = (-c)^(1/n)` (principal branch).
    pub fn oc(n: u32, alpha: Complex<T>, c: Complex<T>) -> Result<Self> {
        Self::oc_with(n, alpha, c, false)
    }

    pub fn oc_with(n: u32, alpha: Complex<T>, c: Complex<T>, allow_degenerate: bool) -> Result<Self> {
        check_n(n)?;
        check_alpha(n, alpha, allow_degenerate)?;
        if c.is_zero() || !is_finite(c) {
            return Err(Error::InvalidArgument("c must be finite and nonzero".into()));
        }
        let (num, den) = o_parts(n, alpha);
        if !allow_degenerate {
            check_o_reduced(n, &num, &den)?;
        }
        let s = principal_root(-c, n);
        let inv = s.inv();
        let num = num.scale_variable(inv).scale(s);
        let den = den.scale_variable(inv);
        Ok(Self::assemble(Family::Oc { n, alpha, c }, num, den))
    }

    /// `B(a) = z^3 (z - a) / (1 - a z)`.
    pub fn b(a: Complex<T>) -> Result<Self> {
        if !is_finite(a) {
            return Err(Error::InvalidArgument("a must be finite".into()));
        }
        // common root iff a = 0 (degree drops) or a^2 = 1 (z - a = -(1 - a z)/a)
        let eps = T::lit(DEGENERATE_EPS);
        if a.norm() < eps || (a * a - Complex::one()).norm() < eps {
            return Err(Error::CommonRoot { root: to_c64(a) });
        }
        let num = Polynomial::new(vec![Complex::zero(), Complex::zero(), Complex::zero(), -a, Complex::one()]);
        let den = Polynomial::new(vec![Complex::one(), -a]);
        Ok(Self::assemble(Family::B { a }, num, den))
    }

    /// `R(n, alpha) = M ∘ O(n, alpha) ∘ M^-1` with `M(z) = 1/(z - 1)`.
    ///
    /// `O - 1 = (z - 1)^3 G / Q_O`; dividing the triple root out before the
    /// change of variables gives the exact degrees `2n` over `2n - 3`.
    pub fn r(n: u32, alpha: Complex<T>) -> Result<Self> {
        check_n(n)?;
        check_alpha(n, alpha, false)?;
        let (num_o, den_o) = o_parts(n, alpha);
        check_o_reduced(n, &num_o, &den_o)?;
        let mut g = &num_o - &den_o;
        let one = Complex::<T>::one();
        for _ in 0..3 {
            let scale = g.magnitude_at(one);
            let (q, rem) = g.div_linear(one);
            if rem.norm() > T::lit(1e-9) * scale {
                return Err(Error::RootNotPresent {
                    root: Complex::new(1.0, 0.0),
                    residual: rem.norm().as_f64(),
                    bound: (T::lit(1e-9) * scale).as_f64(),
                });
            }
            g = q;
        }
        let nn = n as usize;
        let w_plus_one = Polynomial::new(vec![one, one]);
        let w = Polynomial::monomial(one, 1);
        let num = den_o.substitute_fraction(&w_plus_one, &w, 2 * nn);
        let den = g.substitute_fraction(&w_plus_one, &w, 2 * nn - 3);
        Ok(Self::assemble(Family::R { n, alpha }, num, den))
    }

    /// Newton's method on `z^n - 1`: `((n-1) z^n + 1) / (n z^(n-1))`.
    pub fn newton(n: u32) -> Result<Self> {
        check_n(n)?;
        let nn = n as usize;
        let nf = T::from_u32(n).expect("small n");
        let mut num = vec![Complex::zero(); nn + 1];
        num[0] = Complex::one();
        num[nn] = Complex::new(nf - T::one(), T::zero());
        let den = Polynomial::monomial(Complex::new(nf, T::zero()), nn - 1);
        Ok(Self::assemble(Family::NewtonFn { n }, Polynomial::new(num), den))
    }

    /// The method applied to an arbitrary polynomial `g`.
    ///
    /// Only the common power of `z` is divided out; other common factors
    /// (e.g. at multiple roots of `g`) stay in the stored expansion and
    /// evaluation at such points falls back to [`ch_step`].
    pub fn generic_ch(poly: Polynomial<T>, alpha: Complex<T>) -> Result<Self> {
        if poly.degree() < 1 {
            return Err(Error::InvalidArgument("polynomial must have degree >= 1".into()));
        }
        if !is_finite(alpha) {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        let g1 = poly.derivative();
        let g2 = g1.derivative();
        let two = Complex::new(T::lit(2.0), T::zero());
        let g1sq = &g1 * &g1;
        let gg2 = &poly * &g2;
        let corr_num = &poly * &(&g1sq.scale(two) + &gg2.scale(Complex::<T>::one() - alpha * two));
        let mut den = (&g1 * &(&g1sq - &gg2.scale(alpha))).scale(two);
        let z = Polynomial::monomial(Complex::one(), 1);
        let mut num = &(&z * &den) - &corr_num;
        let k = num.coeffs().iter().zip(den.coeffs()).take_while(|(a, b)| a.is_zero() && b.is_zero()).count();
        if k > 0 && k <= num.degree().min(den.degree()) {
            num = Polynomial::new(num.coeffs()[k..].to_vec());
            den = Polynomial::new(den.coeffs()[k..].to_vec());
        }
        Ok(Self::assemble(Family::GenericCh { poly, alpha }, num, den))
    }

    /// The same map seen in the chart `w = 1/z`.
    pub fn reciprocal(&self) -> Self {
        let d = self.num.degree().max(self.den.degree());
        let mut num = self.den.reversed(d);
        let mut den = self.num.reversed(d);
        let k = num.coeffs().iter().zip(den.coeffs()).take_while(|(a, b)| a.is_zero() && b.is_zero()).count();
        if k > 0 {
            num = Polynomial::new(num.coeffs()[k..].to_vec());
            den = Polynomial::new(den.coeffs()[k..].to_vec());
        }
        Self::assemble(Family::Reciprocal(Box::new(self.family.clone())), num, den)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn numerator(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial<T> {
        &self.den
    }

    /// Topological degree `max(deg P, deg Q)`.
    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    /// Image of infinity: by comparing degrees.
    fn eval_at_infinity(&self) -> ExtendedComplex<T> {
        let (dp, dq) = (self.num.degree(), self.den.degree());
        match dp.cmp(&dq) {
            std::cmp::Ordering::Greater => ExtendedComplex::Infinity,
            std::cmp::Ordering::Equal => ExtendedComplex::saturating(self.num.leading() / self.den.leading()),
            std::cmp::Ordering::Less => ExtendedComplex::zero(),
        }
    }

    pub fn eval(&self, z: ExtendedComplex<T>) -> ExtendedComplex<T> {
        match z {
            ExtendedComplex::Infinity => self.eval_at_infinity(),
            ExtendedComplex::Finite(z) => self.eval_finite(z),
        }
    }

    /// Evaluates at a finite point; poles (and near-poles) give infinity.
    pub fn eval_finite(&self, z: Complex<T>) -> ExtendedComplex<T> {
        if z.norm() > T::REFLECT_THRESHOLD {
            return self.eval_reflected(z);
        }
        let p = self.num.eval(z);
        let q = self.den.eval(z);
        if q.is_zero() || q.norm() < T::NEAR_POLE_RATIO * p.norm() {
            if p.is_zero() {
                if let Family::GenericCh { poly, alpha } = &self.family {
                    return ch_step(poly, *alpha, z).unwrap_or(ExtendedComplex::Infinity);
                }
            }
            return ExtendedComplex::Infinity;
        }
        ExtendedComplex::saturating(p / q)
    }

    /// `P(z)/Q(z) = w^(dq - dp) P~(w) / Q~(w)` with `w = 1/z`.
    fn eval_reflected(&self, z: Complex<T>) -> ExtendedComplex<T> {
        let w = crate::scalar::safe_inv(z);
        let p = self.num_rev.eval(w);
        let q = self.den_rev.eval(w);
        if q.is_zero() || q.norm() < T::NEAR_POLE_RATIO * p.norm() {
            return ExtendedComplex::Infinity;
        }
        let mut v = p / q;
        let (dp, dq) = (self.num.degree(), self.den.degree());
        if dp > dq {
            for _ in 0..dp - dq {
                v *= z;
            }
        } else {
            for _ in 0..dq - dp {
                v *= w;
            }
        }
        ExtendedComplex::saturating(v)
    }

    fn ensure_not_pole(&self, z: Complex<T>, p: Complex<T>, q: Complex<T>) -> Result<()> {
        if q.is_zero() || q.norm() < T::NEAR_POLE_RATIO * p.norm() {
            return Err(Error::PoleAtPoint { z: to_c64(z) });
        }
        Ok(())
    }

    /// `(P'Q - PQ') / Q^2`.
    pub fn eval_derivative(&self, z: Complex<T>) -> Result<Complex<T>> {
        let (p, dp, _) = self.num.eval_with_derivatives(z);
        let (q, dq, _) = self.den.eval_with_derivatives(z);
        self.ensure_not_pole(z, p, q)?;
        Ok((dp * q - p * dq) / (q * q))
    }

    pub fn eval_second_derivative(&self, z: Complex<T>) -> Result<Complex<T>> {
        let (p, dp, ddp) = self.num.eval_with_derivatives(z);
        let (q, dq, ddq) = self.den.eval_with_derivatives(z);
        self.ensure_not_pole(z, p, q)?;
        let two = T::lit(2.0);
        let w = dp * q - p * dq;
        Ok((ddp * q - p * ddq) / (q * q) - dq * w * two / (q * q * q))
    }

    /// The `n` free critical points of `O`/`Oc` (rotations of the principal
    /// one, in index order) or `[c-, c+]` for `B`.
    pub fn free_critical_points(&self) -> Result<Vec<Complex<T>>> {
        match &self.family {
            Family::O { n, alpha } => o_free_critical_points(*n, *alpha),
            Family::Oc { n, alpha, c } => {
                let s = principal_root(-*c, *n);
                Ok(o_free_critical_points(*n, *alpha)?.into_iter().map(|z| z * s).collect())
            }
            Family::B { a } => Ok(b_free_critical_points(*a).to_vec()),
            other => Err(Error::UnsupportedFamily { op: "free_critical_points", family: other.to_string() }),
        }
    }

    /// Superattracting fixed points the family is built around, in index
    /// order: `xi^k` for `O`/Newton, `s xi^k` for `Oc`, `[0, inf]` for `B`,
    /// `M(xi^k)` for `R` (so index 0 is infinity).
    pub fn superattracting_points(&self) -> Vec<ExtendedComplex<T>> {
        match &self.family {
            Family::O { n, .. } | Family::NewtonFn { n } => {
                roots_of_unity::<T>(*n).into_iter().map(ExtendedComplex::Finite).collect()
            }
            Family::Oc { n, c, .. } => {
                let s = principal_root(-*c, *n);
                roots_of_unity::<T>(*n).into_iter().map(|z| ExtendedComplex::Finite(z * s)).collect()
            }
            Family::B { .. } => vec![ExtendedComplex::zero(), ExtendedComplex::Infinity],
            Family::R { n, .. } => {
                let m = MobiusMap::one_to_infinity();
                (0..*n).map(|k| m.apply_finite(root_of_unity(k, *n))).collect()
            }
            Family::GenericCh { .. } | Family::Reciprocal(_) => Vec::new(),
        }
    }

    /// Radius beyond which every point lies in the immediate basin of
    /// infinity: `2|a|` for `B` and `n|alpha|` for `R` (the latter for
    /// `alpha` large enough). `None` for families without such a bound.
    pub fn escape_radius(&self) -> Option<T> {
        match &self.family {
            Family::B { a } => Some(a.norm() * T::lit(2.0)),
            Family::R { n, alpha } => Some(alpha.norm() * T::from_u32(*n).expect("small n")),
            _ => None,
        }
    }
}

fn o_free_critical_points<T: Real>(n: u32, alpha: Complex<T>) -> Result<Vec<Complex<T>>> {
    let nf = T::from_u32(n).expect("small n");
    let one = T::one();
    let two = T::lit(2.0);
    let nm1 = nf - one;
    let num = alpha * (nm1 * nm1) * (alpha * two - one);
    let t0 = nf * (two * nf - one);
    let t1 = alpha * ((T::lit(4.0) * nf - one) * nm1);
    let t2 = alpha * alpha * (two * nm1 * nm1);
    let den = -t1 + t2 + t0;
    let scale = t0.abs() + t1.norm() + t2.norm();
    if den.norm() <= T::lit(1e-14) * scale {
        return Err(Error::DegenerateCriticalPoints { alpha: to_c64(alpha) });
    }
    let c = principal_root(num / den, n);
    Ok((0..n).map(|k| c * root_of_unity::<T>(k, n)).collect())
}

/// `c± = (2 + a^2 ± sqrt((a^2 - 4)(a^2 - 1))) / (3a)`, returned as `[c-, c+]`.
pub fn b_free_critical_points<T: Real>(a: Complex<T>) -> [Complex<T>; 2] {
    let a2 = a * a;
    let root = ((a2 - cx::<T>(4.0, 0.0)) * (a2 - Complex::one())).sqrt();
    let base = a2 + cx::<T>(2.0, 0.0);
    let three_a = a * T::lit(3.0);
    [(base - root) / three_a, (base + root) / three_a]
}
