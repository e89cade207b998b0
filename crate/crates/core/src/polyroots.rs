//! Simultaneous polynomial root finding (Aberth–Ehrlich), deflation and
//! preimages of points under rational maps.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::maps::{to_c64, MapSpec};
use crate::poly::Polynomial;
use crate::scalar::Real;
use crate::sphere::ExtendedComplex;

/// Backward-error tolerance: a root `r` of `p` is accepted when
/// `|p(r)| <= TOL_ROOT * sum |c_k| |r|^k`.
pub const TOL_ROOT: f64 = 1e-10;

/// [`TOL_ROOT`], loosened to what the scalar type can resolve.
fn root_tol<T: Real>() -> T {
    T::lit(TOL_ROOT).max(T::epsilon() * T::lit(1e3))
}
/// Polished roots closer than this (relative to `1 + |r|`) are one root.
pub const MULTIPLICITY_TOL: f64 = 1e-6;
/// Raw Aberth iterates closer than this are treated as one cluster and
/// re-centred; multiple roots only converge to about `eps^(1/m)`.
pub const CLUSTER_TOL: f64 = 1e-4;
pub const MAX_SWEEPS: usize = 500;

/// Roots of a polynomial, sorted by `(re, im)`, with multiplicity shown by
/// repetition.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet<T> {
    pub roots: Vec<Complex<T>>,
    pub residuals: Vec<T>,
    pub converged: Vec<bool>,
}

impl<T: Real> RootSet<T> {
    fn empty() -> Self {
        Self { roots: Vec::new(), residuals: Vec::new(), converged: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Distinct roots with multiplicities, merging roots within
    /// [`MULTIPLICITY_TOL`].
    pub fn distinct(&self) -> Vec<(Complex<T>, usize)> {
        let tol = T::lit(MULTIPLICITY_TOL);
        let mut out: Vec<(Complex<T>, usize)> = Vec::new();
        for &r in &self.roots {
            match out.iter_mut().find(|(q, _)| (*q - r).norm() <= tol * (T::one() + r.norm())) {
                Some(entry) => entry.1 += 1,
                None => out.push((r, 1)),
            }
        }
        out
    }

    /// Multiplicity of `z` in the set.
    pub fn multiplicity_of(&self, z: Complex<T>) -> usize {
        let tol = T::lit(MULTIPLICITY_TOL);
        self.roots.iter().filter(|r| (**r - z).norm() <= tol * (T::one() + z.norm())).count()
    }
}

fn lexicographic<T: Real>(a: &Complex<T>, b: &Complex<T>) -> Ordering {
    a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

fn accepted<T: Real>(p: &Polynomial<T>, r: Complex<T>) -> (T, bool) {
    let res = p.eval(r).norm();
    (res, res <= root_tol::<T>() * p.magnitude_at(r))
}

/// All roots of `p` (degree >= 1).
///
/// Exact zero roots are split off first; the rest start on a circle of
/// Cauchy-bound radius rotated by a fixed angle and are refined by
/// Gauss–Seidel Aberth sweeps. Clusters of iterates are then re-centred on
/// the simple root of the matching derivative, and simple roots get a Newton
/// polish. Fails with [`Error::NonConvergence`] if any root misses the
/// backward-error tolerance.
pub fn find_roots<T: Real>(p: &Polynomial<T>) -> Result<RootSet<T>> {
    if p.degree() < 1 {
        return Err(Error::InvalidArgument("find_roots needs degree >= 1".into()));
    }
    let mut work = p.clone();
    let zeros = work.strip_low_zeros();
    let mut roots = vec![Complex::zero(); zeros];
    if work.degree() >= 1 {
        let mut found = aberth(&work);
        polish_clusters(&work, &mut found);
        polish_simple(&work, &mut found);
        roots.extend(found);
    }
    roots.sort_by(lexicographic);
    let (residuals, converged): (Vec<T>, Vec<bool>) = roots.iter().map(|&r| accepted(p, r)).unzip();
    let set = RootSet { roots, residuals, converged };
    if !set.all_converged() {
        return Err(Error::NonConvergence {
            unconverged: set.converged.iter().filter(|c| !**c).count(),
            partial: set.roots.iter().map(|&r| to_c64(r)).collect(),
        });
    }
    Ok(set)
}

fn aberth<T: Real>(p: &Polynomial<T>) -> Vec<Complex<T>> {
    let d = p.degree();
    let lead = p.leading();
    let monic = p.map_coeffs(|c| c / lead);
    if d == 1 {
        return vec![-monic.coeff(0)];
    }
    let radius = T::one() + (0..d).map(|k| monic.coeff(k).norm()).fold(T::zero(), T::max);
    let df = T::from_usize(d).expect("small degree");
    let offset = T::lit(0.4);
    let mut z: Vec<Complex<T>> = (0..d)
        .map(|k| Complex::from_polar(radius, T::TAU() * T::from_usize(k).expect("small") / df + offset))
        .collect();
    let mut done = vec![false; d];
    let eps = T::epsilon();
    let dmonic = monic.derivative();
    for _ in 0..MAX_SWEEPS {
        let mut active = false;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let pv = monic.eval(z[k]);
            if pv.norm() <= eps * T::lit(4.0) * monic.magnitude_at(z[k]) {
                done[k] = true;
                continue;
            }
            let dv = dmonic.eval(z[k]);
            let ratio = if dv.is_zero() { pv } else { pv / dv };
            let mut sum = Complex::zero();
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    let diff = z[k] - zj;
                    if !diff.is_zero() {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex::<T>::one() - ratio * sum;
            let step = if denom.is_zero() { ratio } else { ratio / denom };
            z[k] -= step;
            if step.norm() <= eps * T::lit(2.0) * z[k].norm() {
                done[k] = true;
            } else {
                active = true;
            }
        }
        if !active {
            break;
        }
    }
    z
}

fn nth_derivative<T: Real>(p: &Polynomial<T>, m: usize) -> Polynomial<T> {
    (0..m).fold(p.clone(), |acc, _| acc.derivative())
}

/// Re-centres each cluster of `m` iterates on the simple root of `p^(m-1)`
/// near their mean, keeping the originals if that does not help.
fn polish_clusters<T: Real>(p: &Polynomial<T>, roots: &mut [Complex<T>]) {
    let n = roots.len();
    let tol = T::lit(CLUSTER_TOL);
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() <= tol * (T::one() + roots[i].norm()) {
                let (li, lj) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == lj {
                        *l = li;
                    }
                }
            }
        }
    }
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[label[i]] {
            continue;
        }
        seen[label[i]] = true;
        let members: Vec<usize> = (0..n).filter(|&j| label[j] == label[i]).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let mf = T::from_usize(m).expect("small");
        let mut mu = members.iter().fold(Complex::zero(), |acc, &j| acc + roots[j]) / mf;
        let lower = nth_derivative(p, m - 1);
        let upper = lower.derivative();
        for _ in 0..3 {
            let dv = upper.eval(mu);
            if dv.is_zero() {
                break;
            }
            let next = mu - lower.eval(mu) / dv;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            mu = next;
        }
        let worst = members.iter().map(|&j| p.eval(roots[j]).norm()).fold(T::zero(), T::max);
        if p.eval(mu).norm() <= worst {
            for &j in &members {
                roots[j] = mu;
            }
        }
    }
}

/// Two Newton steps on roots that are not repeated.
fn polish_simple<T: Real>(p: &Polynomial<T>, roots: &mut [Complex<T>]) {
    let dp = p.derivative();
    let snapshot = roots.to_vec();
    for (k, r) in roots.iter_mut().enumerate() {
        if snapshot.iter().enumerate().any(|(j, s)| j != k && *s == *r) {
            continue;
        }
        for _ in 0..2 {
            let dv = dp.eval(*r);
            if dv.is_zero() {
                break;
            }
            let next = *r - p.eval(*r) / dv;
            if p.eval(next).norm() < p.eval(*r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
}

/// Divides `(z - root)^multiplicity` out of `p`, checking each remainder.
pub fn deflate<T: Real>(p: &Polynomial<T>, root: Complex<T>, multiplicity: usize) -> Result<Polynomial<T>> {
    let mut cur = p.clone();
    for _ in 0..multiplicity {
        let bound = root_tol::<T>() * cur.magnitude_at(root).max(T::min_positive_value());
        let (q, rem) = cur.div_linear(root);
        if rem.norm() > bound || cur.degree() == 0 {
            return Err(Error::RootNotPresent {
                root: to_c64(root),
                residual: rem.norm().as_f64(),
                bound: bound.as_f64(),
            });
        }
        cur = q;
    }
    Ok(cur)
}

/// The polynomial whose roots are the finite preimages of `w`:
/// `P - wQ`, or `Q` for `w = inf`.
pub fn preimage_polynomial<T: Real>(spec: &MapSpec<T>, w: ExtendedComplex<T>) -> Polynomial<T> {
    match w {
        ExtendedComplex::Infinity => spec.denominator().clone(),
        ExtendedComplex::Finite(w) => spec.numerator() - &spec.denominator().scale(w),
    }
}

/// Finite preimages of `w` under `spec`, with multiplicity.
pub fn preimages<T: Real>(spec: &MapSpec<T>, w: ExtendedComplex<T>) -> Result<RootSet<T>> {
    let poly = preimage_polynomial(spec, w);
    if poly.degree() == 0 {
        return Ok(RootSet::empty());
    }
    find_roots(&poly)
}
