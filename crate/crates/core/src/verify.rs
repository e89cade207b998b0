//! Numerical checks of the escape bounds, the zero-location argument,
//! the segment argument and the conjugacy identities.
//!
//! Every check returns a [`LemmaReport`] whose `pass` flag is exactly
//! `worst_margin > 0`. Random sampling uses SplitMix64 with the seed stored
//! in the report, so reruns are bit-identical.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{classify_orbit, rotation_agreement, ClassificationGrid, OrbitOutcome, OrbitParams};
use crate::error::{Error, Result};
use crate::maps::{b_free_critical_points, ch_step, degenerate_check, MapSpec, MobiusMap};
use crate::poly::Polynomial;
use crate::polyroots::find_roots;
use crate::scalar::root_of_unity;
use crate::sphere::ExtendedComplex;

pub const DEFAULT_SEED: u64 = 0x5eed_2024_c4eb_1e11;
/// Values of alpha tried when looking for where an asymptotic bound kicks in.
pub const ALPHA_LADDER: [f64; 6] = [10.0, 50.0, 100.0, 500.0, 1000.0, 5000.0];
/// Pass threshold for the conjugacy residuals.
pub const CONJUGACY_TOL: f64 = 1e-9;
/// Pass threshold for the rotation agreement fraction.
pub const SYMMETRY_FRACTION: f64 = 0.99;
/// Points of `t` in `[-1, 1]` used to bound the segment coefficients.
pub const KAPPA_SAMPLES: usize = 10001;
const MAX_WITNESSES: usize = 16;

type E = ExtendedComplex<f64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub params: BTreeMap<String, Value>,
    pub samples: usize,
    pub worst_margin: f64,
    pub pass: bool,
    pub witnesses: Vec<Complex64>,
    pub seed: Option<u64>,
    /// Computed quantities worth keeping (roots, constants, sub-margins).
    pub values: BTreeMap<String, Value>,
}

impl LemmaReport {
    fn new(lemma: &str, params: &[(&str, Value)]) -> Self {
        Self {
            lemma: lemma.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            samples: 0,
            worst_margin: f64::INFINITY,
            pass: false,
            witnesses: Vec::new(),
            seed: None,
            values: BTreeMap::new(),
        }
    }

    /// Folds one normalized margin into the worst margin.
    fn margin(&mut self, m: f64, witness: Option<Complex64>) {
        let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
        self.worst_margin = self.worst_margin.min(m);
        if m <= 0.0 {
            if let Some(w) = witness {
                if self.witnesses.len() < MAX_WITNESSES {
                    self.witnesses.push(w);
                }
            }
        }
    }

    fn value(&mut self, key: &str, v: Value) {
        self.values.insert(key.to_string(), v);
    }

    fn finish(mut self) -> Self {
        self.pass = self.worst_margin > 0.0;
        self
    }
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform point with modulus in `(lo, hi]` on a uniform random ray.
fn sample_annulus(rng: &mut SplitMix64, lo: f64, hi: f64) -> Complex64 {
    let u: f64 = rng.random();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(hi - (hi - lo) * u, theta)
}

fn modulus(v: E) -> f64 {
    v.norm()
}

/// `|B_a(z)| > |z|` for `|z|` in `(2a, 4a]`.
pub fn verify_escape_bound_b(a: f64, n_samples: usize, seed: u64) -> Result<LemmaReport> {
    let mut r = rng(seed);
    let points: Vec<Complex64> = (0..n_samples).map(|_| sample_annulus(&mut r, 2.0 * a, 4.0 * a)).collect();
    let mut report = verify_escape_bound_b_at(a, &points)?;
    report.seed = Some(seed);
    Ok(report)
}

/// [`verify_escape_bound_b`] on caller-chosen points.
/// Margin is `min(|B_a(z)| - |z|)`.
pub fn verify_escape_bound_b_at(a: f64, points: &[Complex64]) -> Result<LemmaReport> {
    if !(a > 1.0) {
        return Err(Error::InvalidArgument(format!("escape bound for B needs a > 1, got {a}")));
    }
    let spec = MapSpec::b(Complex64::new(a, 0.0))?;
    let mut report = LemmaReport::new("escape-b", &[("a", json!(a))]);
    let mut min_ratio = f64::INFINITY;
    for &z in points {
        let image = modulus(spec.eval_finite(z));
        min_ratio = min_ratio.min(image / z.norm());
        report.margin(image - z.norm(), Some(z));
    }
    report.samples = points.len();
    report.value("min_growth_ratio", json!(min_ratio));
    Ok(report.finish())
}

/// Position and size of `B_a(c+)`, and escape of its orbit for `a > 400`.
pub fn verify_critical_value_escape(a: f64) -> Result<LemmaReport> {
    if !(a > 2.0) {
        return Err(Error::InvalidArgument(format!("critical value check needs a > 2, got {a}")));
    }
    let ac = Complex64::new(a, 0.0);
    let spec = MapSpec::b(ac)?;
    let [_, cp] = b_free_critical_points(ac);
    let c_plus = cp.re;
    let image = modulus(spec.eval_finite(cp));
    let bound = a * a / 162.0;
    let mut report = LemmaReport::new("critical-value-escape", &[("a", json!(a))]);
    report.margin((c_plus - a / 2.0).min(a - c_plus) / a, Some(cp));
    report.margin(image / bound - 1.0, Some(cp));
    report.value("c_plus", json!(c_plus));
    report.value("image_modulus", json!(image));
    report.value("a2_over_162", json!(bound));
    report.value("image_exceeds_2a", json!(image > 2.0 * a));
    report.value("a2_over_162_exceeds_2a", json!(bound > 2.0 * a));
    report.value("above_324", json!(a > 324.0));
    report.value("above_400", json!(a > 400.0));
    let params = OrbitParams::new(2000, 1e-9).with_escape_radius(Some(2.0 * a));
    let outcome = classify_orbit(&spec, E::Finite(cp), &[Complex64::new(0.0, 0.0)], &params);
    report.value("orbit", json!(outcome.tag()));
    if a > 400.0 {
        report.margin(image / (2.0 * a) - 1.0, Some(cp));
        let escaped = matches!(outcome, OrbitOutcome::Escaped { .. });
        report.margin(if escaped { 1.0 } else { -1.0 }, Some(cp));
    }
    report.samples = 1;
    Ok(report.finish())
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `S(z) = -n z^n + (alpha (n-1) - n) sum_{k<n} C(n,k) z^k`.
pub fn s_polynomial(n: u32, alpha: f64) -> Polynomial<f64> {
    let e2 = alpha * f64::from(n - 1) - f64::from(n);
    let mut coeffs: Vec<f64> = (0..n).map(|k| e2 * binomial(n, k)).collect();
    coeffs.push(-f64::from(n));
    Polynomial::from_real(&coeffs)
}

/// Bisection root of `S` in `(alpha(n-1) - n, alpha(n-1))`, to full
/// double precision. Fails with `SignCheckFailed` unless `S` is positive
/// at the left end and negative at the right.
pub fn zero_of_s(n: u32, alpha: f64) -> Result<f64> {
    let s = s_polynomial(n, alpha);
    let eval = |x: f64| s.eval(Complex64::new(x, 0.0)).re;
    let (mut lo, mut hi) = (alpha * f64::from(n - 1) - f64::from(n), alpha * f64::from(n - 1));
    let (s_lo, s_hi) = (eval(lo), eval(hi));
    if !(s_lo > 0.0 && s_hi < 0.0) {
        return Err(Error::SignCheckFailed { lo, hi, s_lo, s_hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sign change of `S` on `(alpha(n-1) - n, alpha(n-1))` and the
/// corresponding zero of `R(n, alpha)`.
pub fn verify_zero_interval(n: u32, alpha: f64) -> Result<LemmaReport> {
    if n < 3 || !(alpha > 2.0) {
        return Err(Error::InvalidArgument(format!(
            "zero interval needs n >= 3 and alpha > 2, got n={n}, alpha={alpha}"
        )));
    }
    let (lo, hi) = (alpha * f64::from(n - 1) - f64::from(n), alpha * f64::from(n - 1));
    let z0 = zero_of_s(n, alpha)?;
    let s = s_polynomial(n, alpha);
    let at = |x: f64| s.eval(Complex64::new(x, 0.0)).re;
    let mut report = LemmaReport::new("zero-interval", &[("n", json!(n)), ("alpha", json!(alpha))]);
    let scale_s = s.magnitude_at(Complex64::new(hi, 0.0));
    report.margin(at(lo) / scale_s, None);
    report.margin(-at(hi) / scale_s, None);
    report.margin((z0 - lo).min(hi - z0) / (hi - lo), Some(Complex64::new(z0, 0.0)));

    let r = MapSpec::r(n, Complex64::new(alpha, 0.0))?;
    let z = Complex64::new(z0, 0.0);
    let q = r.denominator().eval(z).norm();
    let scale = z0.abs() * r.numerator().magnitude_at(z) / q;
    let value = modulus(r.eval_finite(z));
    report.margin(1.0 - value / (1e-6 * scale), Some(z));

    let s_res = at(z0).abs();
    let s_max = s.max_coeff_norm();
    report.value("interval", json!([lo, hi]));
    report.value("z0", json!(z0));
    report.value("r_at_z0", json!(value));
    report.value("r_scale", json!(scale));
    report.value("s_at_z0", json!(s_res));
    report.value("s_max_coeff", json!(s_max));
    report.value("s_residual_within_1e-8_max_coeff", json!(s_res <= 1e-8 * s_max));
    report.samples = 1;
    Ok(report.finish())
}

fn escape_r_min_ratio(n: u32, alpha: f64, points: &[Complex64], report: Option<&mut LemmaReport>) -> Result<f64> {
    let r = MapSpec::r(n, Complex64::new(alpha, 0.0))?;
    let radius = f64::from(n) * alpha;
    let mut worst = f64::INFINITY;
    let mut report = report;
    for &u in points {
        let z = u * radius;
        let m = modulus(r.eval_finite(z)) / z.norm() - 1.0;
        worst = worst.min(m);
        if let Some(rep) = report.as_deref_mut() {
            rep.margin(m, Some(z));
        }
    }
    Ok(worst)
}

/// `|R(z)| > |z|` for `|z|` in `(n alpha, 2 n alpha]`, plus the smallest
/// rung of [`ALPHA_LADDER`] from which every larger rung also passes.
/// Margin is `min(|R(z)|/|z| - 1)`.
pub fn verify_escape_bound_r(n: u32, alpha: f64, n_samples: usize, seed: u64) -> Result<LemmaReport> {
    if n < 3 || !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "escape bound for R needs n >= 3 and alpha > 0, got n={n}, alpha={alpha}"
        )));
    }
    let mut r = rng(seed);
    // unit-scaled samples, reused for every alpha on the ladder
    let points: Vec<Complex64> = (0..n_samples).map(|_| sample_annulus(&mut r, 1.0, 2.0)).collect();
    let mut report = LemmaReport::new("escape-r", &[("n", json!(n)), ("alpha", json!(alpha))]);
    escape_r_min_ratio(n, alpha, &points, Some(&mut report))?;
    let mut ladder = Vec::new();
    for &a in &ALPHA_LADDER {
        let skip = degenerate_check(n, Complex64::new(a, 0.0));
        let ok = !skip && escape_r_min_ratio(n, a, &points, None)? > 0.0;
        ladder.push((a, ok));
    }
    let from = ladder.iter().rposition(|&(_, ok)| !ok).map_or(0, |i| i + 1);
    report.value("ladder", json!(ladder.iter().map(|&(a, ok)| json!({"alpha": a, "pass": ok})).collect::<Vec<_>>()));
    report.value("ladder_min_alpha", ladder.get(from).map_or(Value::Null, |&(a, _)| json!(a)));
    report.samples = n_samples;
    report.seed = Some(seed);
    Ok(report.finish())
}

/// Leading coefficients of the segment argument at `u = 1/2 + i t`:
/// `c(t) = 2 n^(2n-1) u^(2n-3) (n - 1 - n u)` from the numerator and
/// `d(t) = q (n u)^(2n-3)` from the denominator, where `q` is the part of
/// the top coefficient of the denominator proportional to alpha.
pub fn segment_coefficients(n: u32, t: f64) -> Result<(Complex64, Complex64)> {
    let q = r_denominator_alpha_slope(n)?;
    Ok(segment_coefficients_with(n, q, t))
}

fn segment_coefficients_with(n: u32, q: Complex64, t: f64) -> (Complex64, Complex64) {
    let nf = f64::from(n);
    let u = Complex64::new(0.5, t);
    let e = (2 * n - 3) as i32;
    let c = u.powi(e) * (Complex64::new(nf - 1.0, 0.0) - u * nf) * (2.0 * nf.powi(2 * n as i32 - 1));
    let d = q * (u * nf).powi(e);
    (c, d)
}

/// Slope in alpha of the top (degree `2n-3`) denominator coefficient of `R`.
fn r_denominator_alpha_slope(n: u32) -> Result<Complex64> {
    let top = 2 * n as usize - 3;
    let at = |a: f64| -> Result<Complex64> { Ok(MapSpec::r(n, Complex64::new(a, 0.0))?.denominator().coeff(top)) };
    Ok(at(1.0)? - at(0.0)?)
}

/// `kappa = min |c| / (2 max |d|)` over a dense grid of `t` in `[-1, 1]`.
pub fn segment_kappa(n: u32) -> Result<f64> {
    let q = r_denominator_alpha_slope(n)?;
    let (mut cmin, mut dmax) = (f64::INFINITY, 0.0f64);
    for k in 0..KAPPA_SAMPLES {
        let t = -1.0 + 2.0 * k as f64 / (KAPPA_SAMPLES - 1) as f64;
        let (c, d) = segment_coefficients_with(n, q, t);
        cmin = cmin.min(c.norm());
        dmax = dmax.max(d.norm());
    }
    Ok(cmin / (2.0 * dmax))
}

/// Image of the segment `n alpha (1/2 + i t)`, `t` in `[-1, 1]`, under
/// `R(n, alpha)`: `|R| > n alpha` and `|R(z)/(1+z)^2| > kappa` at every
/// sample, endpoints outside the disk of radius `n alpha`, and the zero of
/// `S` between `n alpha / 2` and `n alpha`.
pub fn verify_segment(n: u32, alpha: f64, n_samples: usize) -> Result<LemmaReport> {
    if n < 3 || n_samples < 2 || !(alpha > 2.0) {
        return Err(Error::InvalidArgument(format!(
            "segment check needs n >= 3, alpha > 2 and at least two samples, got n={n}, alpha={alpha}, samples={n_samples}"
        )));
    }
    let r = MapSpec::r(n, Complex64::new(alpha, 0.0))?;
    let radius = f64::from(n) * alpha;
    let kappa = segment_kappa(n)?;
    let mut report = LemmaReport::new("segment", &[("n", json!(n)), ("alpha", json!(alpha))]);
    let mut min_t = f64::INFINITY;
    let mut min_r = f64::INFINITY;
    for k in 0..n_samples {
        let t = -1.0 + 2.0 * k as f64 / (n_samples - 1) as f64;
        let z = Complex64::new(0.5, t) * radius;
        let value = r.eval_finite(z);
        let big = modulus(value);
        let tz = big / (z + 1.0).norm_sqr();
        min_r = min_r.min(big / radius);
        min_t = min_t.min(tz / kappa);
        report.margin(big / radius - 1.0, Some(z));
        report.margin(tz / kappa - 1.0, Some(z));
    }
    for sign in [1.0, -1.0] {
        let end = Complex64::new(0.5, sign) * radius;
        report.margin(end.norm() / radius - 1.0, Some(end));
    }
    let z0 = zero_of_s(n, alpha)?;
    report.margin((z0 - radius / 2.0).min(radius - z0) / radius, Some(Complex64::new(z0, 0.0)));
    report.value("kappa", json!(kappa));
    report.value("min_r_over_radius", json!(min_r));
    report.value("min_t_over_kappa", json!(min_t));
    report.value("z0", json!(z0));
    report.samples = n_samples;
    Ok(report.finish())
}

/// `|l - r| / (1 + |r|)`, with infinities compared on the sphere.
fn residual(l: E, r: E) -> f64 {
    match (l, r) {
        (E::Infinity, E::Infinity) => 0.0,
        (E::Finite(a), E::Finite(b)) => (a - b).norm() / (1.0 + b.norm()),
        _ => l.chordal_distance(&r),
    }
}

struct ConjugacyCheck {
    name: &'static str,
    max: f64,
    witness: Option<Complex64>,
    count: usize,
}

impl ConjugacyCheck {
    fn new(name: &'static str) -> Self {
        Self { name, max: 0.0, witness: None, count: 0 }
    }

    fn record(&mut self, z: Complex64, res: f64) {
        self.count += 1;
        if res > self.max || res.is_nan() {
            self.max = if res.is_nan() { f64::INFINITY } else { res };
            self.witness = Some(z);
        }
    }
}

/// Residuals of `O∘η = η∘Oc`, `O(ξ^k z) = ξ^k O(z)`, `M2∘O(2) = B∘M2`,
/// `M∘O = R∘M`, and of the closed form against a direct method step, over
/// random points of `0.15 <= |z| <= 3` away from poles.
pub fn verify_conjugacies(n: u32, alpha: Complex64, c: Complex64, n_samples: usize, seed: u64) -> Result<LemmaReport> {
    if n < 2 || degenerate_check(n, alpha) {
        return Err(Error::DegenerateParameter { n, alpha, eps: crate::maps::DEGENERATE_EPS });
    }
    let o = MapSpec::o(n, alpha)?;
    let oc = MapSpec::oc(n, alpha, c)?;
    let eta = MobiusMap::root_normalizer(n, c)?;
    let poles = find_roots(o.denominator())?.roots;
    let far_from_poles = |z: Complex64| poles.iter().all(|p| (z - p).norm() > 1e-4);
    let mut g = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    g[0] = Complex64::new(-1.0, 0.0);
    g[n as usize] = Complex64::new(1.0, 0.0);
    let g = Polynomial::new(g);

    let o2 = (!degenerate_check(2, alpha)).then(|| MapSpec::o(2, alpha)).transpose()?;
    let b = match &o2 {
        Some(_) => Some(MapSpec::b((alpha - 1.0) * 2.0)?),
        None => None,
    };
    let poles2 = match &o2 {
        Some(s) => find_roots(s.denominator())?.roots,
        None => Vec::new(),
    };
    let r = MapSpec::r(n, alpha)?;
    let m = MobiusMap::one_to_infinity();
    let m2 = MobiusMap::plus_minus_one_to_poles();

    let mut checks = [
        ConjugacyCheck::new("eta"),
        ConjugacyCheck::new("rotation"),
        ConjugacyCheck::new("cayley_b"),
        ConjugacyCheck::new("one_to_infinity_r"),
        ConjugacyCheck::new("method_step"),
    ];
    let mut rng = rng(seed);
    let mut drawn = 0usize;
    while checks[0].count < n_samples && drawn < 100 * n_samples.max(1) {
        drawn += 1;
        let z = sample_annulus(&mut rng, 0.15, 3.0);
        if !far_from_poles(z) || (z - 1.0).norm() < 1e-2 {
            continue;
        }
        let oz = o.eval_finite(z);
        let Some(ozf) = oz.finite() else { continue };
        if (ozf - 1.0).norm() < 1e-3 {
            continue;
        }
        // eta: O(eta z) = eta(Oc z), sampled at w = eta^-1 z so O is evaluated at z
        let w = eta.inverse().apply_finite(z);
        if let Some(w) = w.finite() {
            checks[0].record(z, residual(o.eval(eta.apply_finite(w)), eta.apply(oc.eval_finite(w))));
        }
        let k = rng.random_range(0..n);
        let xi = root_of_unity::<f64>(k, n);
        checks[1].record(z, residual(o.eval_finite(xi * z), E::Finite(xi * ozf)));
        if let (Some(o2), Some(b)) = (&o2, &b) {
            if poles2.iter().all(|p| (z - p).norm() > 1e-4) {
                if let Some(o2z) = o2.eval_finite(z).finite() {
                    if (o2z - 1.0).norm() > 1e-3 {
                        checks[2].record(z, residual(m2.apply_finite(o2z), b.eval(m2.apply_finite(z))));
                    }
                }
            }
        }
        checks[3].record(z, residual(m.apply_finite(ozf), r.eval(m.apply_finite(z))));
        if let Ok(step) = ch_step(&g, alpha, z) {
            checks[4].record(z, residual(oz, step));
        }
    }
    let mut report = LemmaReport::new("conjugacies", &[("n", json!(n)), ("alpha", cjson(alpha)), ("c", cjson(c))]);
    for chk in &checks {
        report.value(&format!("{}_max_residual", chk.name), json!(chk.max));
        report.value(&format!("{}_samples", chk.name), json!(chk.count));
        report.margin(1.0 - chk.max / CONJUGACY_TOL, chk.witness);
    }
    report.samples = checks[0].count;
    report.seed = Some(seed);
    Ok(report.finish())
}

/// Fraction of non-boundary pixels whose class matches that of the pixel
/// at the rotated point, under the shift of root indices. Passes at 0.99.
pub fn symmetry_report(grid: &ClassificationGrid<f64>, n: u32) -> Result<LemmaReport> {
    let (agree, total, witnesses) = rotation_agreement(grid, n, n as usize)?;
    let w = &grid.window;
    let mut report = LemmaReport::new(
        "symmetry",
        &[
            ("n", json!(n)),
            ("window", json!([w.re_min, w.re_max, w.im_min, w.im_max])),
            ("size", json!([w.width, w.height])),
        ],
    );
    let fraction = if total == 0 { 0.0 } else { agree as f64 / total as f64 };
    report.margin(fraction - SYMMETRY_FRACTION, None);
    report.witnesses = witnesses;
    report.samples = total;
    report.value("agreeing", json!(agree));
    report.value("fraction", json!(fraction));
    Ok(report.finish())
}

/// Parameters for [`run_all`].
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub n: u32,
    pub alpha: f64,
    /// Parameter of `B`; defaults to `2(alpha - 1)`.
    pub a: Option<f64>,
    pub c: Complex64,
    pub samples: usize,
    pub segment_samples: usize,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(n: u32, alpha: f64) -> Self {
        Self {
            n,
            alpha,
            a: None,
            c: Complex64::new(-1.0, 2.0),
            samples: 1000,
            segment_samples: 201,
            seed: DEFAULT_SEED,
        }
    }

    pub fn a(&self) -> f64 {
        self.a.unwrap_or(2.0 * (self.alpha - 1.0))
    }
}

/// Every check that applies to the given parameters, in a fixed order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<LemmaReport>> {
    let a = cfg.a();
    let mut out = vec![verify_escape_bound_b(a, cfg.samples, cfg.seed)?, verify_critical_value_escape(a)?];
    if cfg.n >= 3 {
        out.push(verify_zero_interval(cfg.n, cfg.alpha)?);
        out.push(verify_escape_bound_r(cfg.n, cfg.alpha, cfg.samples, cfg.seed)?);
        out.push(verify_segment(cfg.n, cfg.alpha, cfg.segment_samples)?);
    }
    out.push(verify_conjugacies(cfg.n, Complex64::new(cfg.alpha, 0.0), cfg.c, cfg.samples, cfg.seed)?);
    Ok(out)
}
