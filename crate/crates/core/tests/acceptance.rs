//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chdyn::dynamics::{
    classify_orbit, connectivity_probe, with_workers, OrbitParams, OutcomeClass, ProbeConfig, Verdict,
};
use chdyn::maps::b_free_critical_points;
use chdyn::polyroots::preimage_polynomial;
use chdyn::render::{dynamical_grid, parameter_grid, render_grid, write_grid_dump, Image, Palette, RenderConfig};
use chdyn::verify::{self, symmetry_report, SuiteConfig, DEFAULT_SEED};
use chdyn::{ch_step, degenerate_check, Complex64, ExtendedComplex, GridWindow64, MapSpec64, Polynomial64};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

const WORKER_COUNTS: [usize; 3] = [1, 2, 8];

// Real root of 3z^3 - 51z^2 - 51z - 17, from a 30-digit solver.
const Z0_3_10: f64 = 17.963_902_335_781_402;
// Image hashes recorded from the first verified run.
const GOLDEN_DYNAMICAL_O3: &str = "0d6617cfc2d02f66e6b0a6f5c0dbf263d588da231ba08046c576e9d8f247702a";
const GOLDEN_PARAMETER_N3: &str = "20c1e22bb279a420454696975eaaef6ae0adfa7b89cef0a878130814eb3dee15";
const GOLDEN_PARAMETER_N5: &str = "de548db13ac96c9d9333e090fef4f99ccffcc24659c73aa65767a22c8f5bc6d9";

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, format!("{what} took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
}

fn rng() -> SplitMix64 {
    SplitMix64::seed_from_u64(DEFAULT_SEED)
}

fn random_alpha(rng: &mut SplitMix64, n: u32) -> Complex64 {
    loop {
        let a = c(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        if !degenerate_check(n, a) {
            return a;
        }
    }
}

fn unity_minus(n: u32) -> Polynomial64 {
    let mut co = vec![c(0.0, 0.0); n as usize + 1];
    co[0] = c(-1.0, 0.0);
    co[n as usize] = c(1.0, 0.0);
    Polynomial64::new(co)
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn closed_form_agreement() -> Check {
    let start = Instant::now();
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.random_range(2..=6u32);
        let alpha = random_alpha(&mut rng, n);
        let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let o = MapSpec64::o(n, alpha).map_err(err)?;
        let step = ch_step(&unity_minus(n), alpha, z).map_err(err)?;
        let closed = o.eval_finite(z);
        let rel = match (step, closed) {
            (ExtendedComplex::Infinity, ExtendedComplex::Infinity) => 0.0,
            (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b)) => {
                let d = (a - b).norm();
                if b.norm() > 0.0 {
                    d / b.norm()
                } else {
                    d
                }
            }
            _ => f64::INFINITY,
        };
        worst = worst.max(rel);
    }
    ensure(worst <= 1e-10, format!("max relative error {worst:.3e} > 1e-10"))?;
    within(start.elapsed(), 1.0, "10^4 samples")?;
    Ok(format!("max relative error {worst:.2e} over 10^4 samples"))
}

fn conjugacy_suite() -> Check {
    let start = Instant::now();
    let rep = verify::verify_conjugacies(3, c(10.0, 0.0), c(-1.0, 2.0), 1000, DEFAULT_SEED).map_err(err)?;
    let pick = |suffix: &'static str| {
        rep.values.iter().filter(move |(k, _)| k.ends_with(suffix)).filter_map(|(_, v)| v.as_f64())
    };
    let worst = pick("_max_residual").fold(0.0, f64::max);
    let fewest = pick("_samples").fold(f64::INFINITY, f64::min);
    ensure(rep.pass && worst <= 1e-9, format!("max residual {worst:.3e}"))?;
    ensure(fewest >= 1000.0, format!("only {fewest} samples for one identity"))?;
    within(start.elapsed(), 1.0, "conjugacy suite")?;
    Ok(format!("max residual {worst:.2e}, at least {fewest} samples per identity"))
}

fn superattraction() -> Check {
    let mut rng = rng();
    let (mut w0, mut w1, mut w2) = (0.0f64, 0.0f64, 0.0f64);
    for n in 2..=6u32 {
        for _ in 0..20 {
            let alpha = random_alpha(&mut rng, n);
            let o = MapSpec64::o(n, alpha).map_err(err)?;
            for j in 0..n {
                let xi = Complex64::from_polar(1.0, std::f64::consts::TAU * f64::from(j) / f64::from(n));
                let v = o.eval_finite(xi).finite().ok_or("root maps to infinity")?;
                w0 = w0.max((v - xi).norm());
                w1 = w1.max(o.eval_derivative(xi).map_err(err)?.norm());
                w2 = w2.max(o.eval_second_derivative(xi).map_err(err)?.norm());
            }
        }
    }
    ensure(w0 <= 1e-10 && w1 <= 1e-8 && w2 <= 1e-6, format!("|O-xi| {w0:.2e}, |O'| {w1:.2e}, |O''| {w2:.2e}"))?;
    Ok(format!("|O-xi| {w0:.1e}, |O'| {w1:.1e}, |O''| {w2:.1e}"))
}

fn escape_bound_b() -> Check {
    let mut parts = Vec::new();
    for a in [2.0, 20.0, 500.0] {
        let rep = verify::verify_escape_bound_b(a, 1000, DEFAULT_SEED).map_err(err)?;
        ensure(
            rep.samples == 1000 && rep.pass && rep.worst_margin > 0.0,
            format!("a={a}: margin {}", rep.worst_margin),
        )?;
        parts.push(format!("a={a} margin {:.3e}", rep.worst_margin));
    }
    Ok(parts.join(", "))
}

fn large_a_escape() -> Check {
    let start = Instant::now();
    let a = 500.0;
    let b = MapSpec64::b(c(a, 0.0)).map_err(err)?;
    let [_, cp] = b_free_critical_points(c(a, 0.0));
    ensure(cp.im.abs() < 1e-9 && a / 2.0 < cp.re && cp.re < a, format!("c+ = {cp}"))?;
    let value = b.eval_finite(cp).norm();
    ensure(value > a * a / 162.0 && a * a / 162.0 > 2.0 * a, format!("|B(c+)| = {value}"))?;
    let params = OrbitParams::new(2000, 1e-9).with_escape_radius(b.escape_radius());
    let out = classify_orbit(&b, ExtendedComplex::Finite(cp), &[c(0.0, 0.0)], &params);
    ensure(out.class() == OutcomeClass::Escaped, format!("orbit of c+ is {}", out.tag()))?;
    let v = connectivity_probe(2, c(a / 2.0 + 1.0, 0.0), &ProbeConfig::default()).map_err(err)?;
    ensure(v.verdict == Verdict::InfinitelyConnected, format!("probe verdict {:?}", v.verdict))?;
    within(start.elapsed(), 30.0, "criterion")?;
    Ok(format!("c+ = {:.4}, |B(c+)| = {value:.1}, probe(2, 251) InfinitelyConnected", cp.re))
}

fn probe_at_nine() -> Check {
    let v = connectivity_probe(2, c(9.0, 0.0), &ProbeConfig::default()).map_err(err)?;
    ensure(v.verdict == Verdict::InfinitelyConnected, format!("probe verdict {:?}", v.verdict))?;
    Ok("probe(2, 9) InfinitelyConnected".into())
}

fn zero_interval() -> Check {
    let mut parts = Vec::new();
    for (n, alpha) in [(3u32, 10.0), (4, 50.0), (5, 100.0)] {
        let rep = verify::verify_zero_interval(n, alpha).map_err(err)?;
        ensure(rep.pass, format!("(n={n}, alpha={alpha}): margin {}", rep.worst_margin))?;
        let z0 = rep.values["z0"].as_f64().ok_or("z0 missing")?;
        if n == 3 {
            ensure(17.9 < z0 && z0 < 18.0, format!("z0 = {z0} outside (17.9, 18.0)"))?;
            ensure((z0 - Z0_3_10).abs() <= 1e-9 * Z0_3_10, format!("z0 = {z0:.15} drifted from {Z0_3_10}"))?;
        }
        parts.push(format!("({n},{alpha}) z0={z0:.6}"));
    }
    Ok(parts.join(", "))
}

fn large_alpha_bounds() -> Check {
    let start = Instant::now();
    for (n, alpha) in [(3u32, 1000.0), (4, 2000.0), (5, 2000.0)] {
        let esc = verify::verify_escape_bound_r(n, alpha, 1000, DEFAULT_SEED).map_err(err)?;
        ensure(esc.pass && esc.samples == 1000, format!("escape bound ({n},{alpha}): margin {}", esc.worst_margin))?;
        let seg = verify::verify_segment(n, alpha, 201).map_err(err)?;
        ensure(seg.pass && seg.samples == 201, format!("segment ({n},{alpha}): margin {}", seg.worst_margin))?;
        let z0 = verify::zero_of_s(n, alpha).map_err(err)?;
        let na = f64::from(n) * alpha;
        ensure(na / 2.0 < z0 && z0 < na, format!("z0 = {z0} outside ({}, {na})", na / 2.0))?;
    }
    within(start.elapsed(), 2.0, "criterion")?;
    Ok("escape, segment and zero location hold at (3,1000), (4,2000), (5,2000)".into())
}

struct Render {
    name: &'static str,
    golden: &'static str,
    symmetric_n: Option<u32>,
    make: Box<dyn Fn() -> Result<(chdyn::ClassificationGrid64, Palette), String> + Send + Sync>,
}

fn reference_renders() -> Vec<Render> {
    let parameter_plane =
        |n: u32| -> Box<dyn Fn() -> Result<(chdyn::ClassificationGrid64, Palette), String> + Send + Sync> {
            Box::new(move || {
                let w = GridWindow64::new(-1.0, 4.0, -2.5, 2.5, 800, 800).map_err(err)?;
                Ok((parameter_grid(n, &w, &RenderConfig::default()).map_err(err)?, Palette::for_roots(n as usize)))
            })
        };
    vec![
        Render {
            name: "O(3,10) plane",
            golden: GOLDEN_DYNAMICAL_O3,
            symmetric_n: Some(3),
            make: Box::new(|| {
                let o = MapSpec64::o(3, c(10.0, 0.0)).map_err(err)?;
                let w = GridWindow64::new(-10.0, 10.0, -10.0, 10.0, 800, 800).map_err(err)?;
                Ok((dynamical_grid(&o, &w, &RenderConfig::default()), Palette::for_roots(3)))
            }),
        },
        Render {
            name: "parameter plane n=3",
            golden: GOLDEN_PARAMETER_N3,
            symmetric_n: None,
            make: parameter_plane(3),
        },
        Render {
            name: "parameter plane n=5",
            golden: GOLDEN_PARAMETER_N5,
            symmetric_n: None,
            make: parameter_plane(5),
        },
    ]
}

fn renders() -> Check {
    let mut parts = Vec::new();
    for r in reference_renders() {
        let mut hashes = Vec::new();
        for w in WORKER_COUNTS {
            let start = Instant::now();
            let (grid, palette) = with_workers(w, &r.make).map_err(err)??;
            within(start.elapsed(), 60.0, &format!("{} with {w} workers", r.name))?;
            if let (Some(n), 1) = (r.symmetric_n, w) {
                let rep = symmetry_report(&grid, n).map_err(err)?;
                ensure(rep.pass, format!("{} symmetry {}", r.name, rep.values["fraction"]))?;
            }
            hashes.push(render_grid(&grid, &palette).content_hash());
        }
        ensure(hashes.iter().all(|h| *h == hashes[0]), format!("{} differs across worker counts: {hashes:?}", r.name))?;
        ensure(hashes[0] == r.golden, format!("{} hash {} does not match golden {}", r.name, hashes[0], r.golden))?;
        parts.push(format!("{} {}", r.name, &hashes[0][..12]));
    }
    Ok(parts.join(", "))
}

fn root_zero_fraction(grid: &chdyn::ClassificationGrid64) -> f64 {
    let other = grid.cells.iter().filter(|o| o.class() != OutcomeClass::Root(0)).count();
    other as f64 / grid.cells.len() as f64
}

fn julia_inside_basin() -> Check {
    let cfg = RenderConfig::default();
    let newton = MapSpec64::newton(3).map_err(err)?;
    let w = GridWindow64::new(-2.0, 2.0, -2.0, 2.0, 400, 400).map_err(err)?;
    let rep_newton = symmetry_report(&dynamical_grid(&newton, &w, &cfg), 3).map_err(err)?;
    ensure(rep_newton.pass, format!("Newton symmetry {}", rep_newton.values["fraction"]))?;
    let o = MapSpec64::o(3, c(10.0, 0.0)).map_err(err)?;
    let w = GridWindow64::new(-10.0, 10.0, -10.0, 10.0, 400, 400).map_err(err)?;
    let rep_o = symmetry_report(&dynamical_grid(&o, &w, &cfg), 3).map_err(err)?;
    ensure(rep_o.pass, format!("O(3,10) symmetry {}", rep_o.values["fraction"]))?;
    let zoom = GridWindow64::new(1.620, 1.623, -0.0015, 0.0015, 400, 400).map_err(err)?;
    let frac = root_zero_fraction(&dynamical_grid(&o, &zoom, &cfg));
    ensure(frac >= 0.01, format!("only {:.3}% of the zoom window leaves the basin of 1", 100.0 * frac))?;
    Ok(format!(
        "symmetry Newton {} / O {}, zoom {:.1}% not converging to 1",
        rep_newton.values["fraction"],
        rep_o.values["fraction"],
        100.0 * frac
    ))
}

fn preimage_bookkeeping() -> Check {
    let mut rng = rng();
    let one = c(1.0, 0.0);
    let mut worst = 0.0f64;
    for n in 2..=4u32 {
        for _ in 0..5 {
            let alpha = random_alpha(&mut rng, n);
            let o = MapSpec64::o(n, alpha).map_err(err)?;
            let poly = preimage_polynomial(&o, ExtendedComplex::real(1.0));
            let roots = chdyn::preimages(&o, ExtendedComplex::real(1.0)).map_err(err)?;
            ensure(
                roots.multiplicity_of(one) == 3,
                format!("n={n} alpha={alpha}: z=1 has multiplicity {}", roots.multiplicity_of(one)),
            )?;
            let others: Vec<_> = roots.roots.iter().filter(|r| (**r - one).norm() > 1e-6).collect();
            ensure(others.len() == 2 * n as usize - 3, format!("n={n} alpha={alpha}: {} other roots", others.len()))?;
            for &r in others {
                worst = worst.max(poly.eval(r).norm() / poly.magnitude_at(r));
            }
        }
    }
    ensure(worst <= 1e-6, format!("residual {worst:.2e} > 1e-6"))?;
    Ok(format!("max residual {worst:.1e}"))
}

fn determinism() -> Check {
    let cfg = RenderConfig::default();
    let b = MapSpec64::b(c(16.0, 0.0)).map_err(err)?;
    let newton = MapSpec64::newton(3).map_err(err)?;
    let bw = GridWindow64::new(-40.0, 40.0, -40.0, 40.0, 200, 200).map_err(err)?;
    let nw = GridWindow64::new(-2.0, 2.0, -2.0, 2.0, 200, 200).map_err(err)?;
    let pw = GridWindow64::new(-1.0, 4.0, -2.5, 2.5, 150, 150).map_err(err)?;
    let snapshot = || -> Result<Vec<Vec<u8>>, String> {
        let gb = dynamical_grid(&b, &bw, &cfg);
        let gn = dynamical_grid(&newton, &nw, &cfg);
        let gp = parameter_grid(3, &pw, &cfg).map_err(err)?;
        let mut dump = Vec::new();
        write_grid_dump(&gb, &mut dump).map_err(err)?;
        let reports = verify::run_all(&SuiteConfig::new(3, 1000.0)).map_err(err)?;
        let mut rep_bytes = Vec::new();
        chdyn::report::write_lines(&mut rep_bytes, &reports).map_err(err)?;
        let probe =
            connectivity_probe(2, c(9.0, 0.0), &ProbeConfig { resolution: 256, ..Default::default() }).map_err(err)?;
        let images: Vec<Image> = vec![
            render_grid(&gb, &Palette::for_roots(1)),
            render_grid(&gn, &Palette::for_roots(3)),
            render_grid(&gp, &Palette::for_roots(3)),
        ];
        let mut out: Vec<Vec<u8>> = images.iter().map(Image::to_ppm).collect();
        out.push(dump);
        out.push(rep_bytes);
        out.push(serde_json::to_vec(&probe).map_err(err)?);
        Ok(out)
    };
    let mut runs = Vec::new();
    for w in WORKER_COUNTS {
        runs.push(with_workers(w, snapshot).map_err(err)??);
    }
    runs.push(with_workers(2, snapshot).map_err(err)??);
    ensure(runs.iter().all(|r| *r == runs[0]), "outputs differ between runs or worker counts")?;
    Ok(format!("{} artifacts identical over {} runs", runs[0].len(), runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("closed-form agreement", closed_form_agreement),
        ("conjugacy suite", conjugacy_suite),
        ("superattraction", superattraction),
        ("escape bound for B", escape_bound_b),
        ("critical escape at a=500", large_a_escape),
        ("probe at alpha=9", probe_at_nine),
        ("zero of R on the real axis", zero_interval),
        ("large-alpha bounds for R", large_alpha_bounds),
        ("reference renders", renders),
        ("Julia set inside the basin of 1", julia_inside_basin),
        ("preimage bookkeeping", preimage_bookkeeping),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2} s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2} s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
