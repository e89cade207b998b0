//! `chdyn` command-line interface.
//!
//! Exit codes: 0 success, 1 runtime failure (or a failed check), 2 bad
//! arguments or degenerate parameters, 3 undecided probe.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chdyn::dynamics::{connectivity_probe, with_workers, ClassificationGrid, GridWindow, ProbeConfig};
use chdyn::render::{
    dynamical_grid, dynamical_targets, parameter_grid, render_grid, write_grid_dump, write_ppm, Palette, RenderConfig,
};
use chdyn::verify::{self, LemmaReport, SuiteConfig, DEFAULT_SEED};
use chdyn::{preimages, Error, ExtendedComplex, MapSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use args::{parse_complex, parse_extended, parse_size, parse_window, Point};

#[derive(Parser)]
#[command(name = "chdyn", version, about = "Dynamics of Chebyshev–Halley iterations on z^n - 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Render a dynamical plane to a PPM image.
    Dyn(DynArgs),
    /// Render the parameter plane of O(n, alpha) to a PPM image.
    Param(ParamArgs),
    /// Decide whether the immediate basin of 1 is simply or infinitely connected.
    Probe(ProbeArgs),
    /// Run numerical checks of the escape, zero-location and conjugacy results.
    Verify(VerifyArgs),
    /// Print the preimages of a point under a map.
    Preimages(PreimagesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum FamilyArg {
    /// The method on z^n - 1 (needs --n, --alpha)
    #[value(name = "O")]
    O,
    /// The method on z^n + c (needs --n, --alpha, --c)
    #[value(name = "Oc")]
    Oc,
    /// z^3 (z - a)/(1 - a z) (needs --a)
    #[value(name = "B")]
    B,
    /// O in the chart 1/(z - 1) (needs --n, --alpha)
    #[value(name = "R")]
    R,
    /// Newton's method on z^n - 1 (needs --n)
    #[value(name = "newton")]
    Newton,
}

#[derive(Args, Serialize)]
struct MapArgs {
    /// Map family
    #[arg(long, value_enum, ignore_case = true, default_value = "O")]
    family: FamilyArg,
    /// Degree of z^n - 1
    #[arg(long)]
    n: Option<u32>,
    /// Method parameter, e.g. 10, 0.2+1.592i
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<Complex64>,
    /// Parameter of B
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: Option<Complex64>,
    /// Constant term for the Oc family
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    c: Option<Complex64>,
}

#[derive(Args, Serialize)]
struct OrbitArgs {
    /// Iteration cap per orbit
    #[arg(long, default_value_t = 2000)]
    max_iter: u32,
    /// Convergence radius around targets and for cycle detection
    #[arg(long, default_value_t = 1e-9)]
    conv_tol: f64,
    /// Worker threads (0 = one per logical CPU); affects speed only
    #[arg(long, env = "HD_WORKERS", default_value_t = 0)]
    #[serde(skip)]
    workers: usize,
    /// Also write the report lines to this file
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DynArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    /// re_min,re_max,im_min,im_max
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-2,2,-2,2")]
    window: [f64; 4],
    /// WIDTHxHEIGHT
    #[arg(long, value_parser = parse_size, default_value = "800x800")]
    size: (usize, usize),
    /// Do not stop orbits at the escape radius of B or R
    #[arg(long)]
    no_escape_radius: bool,
    /// Output PPM path
    #[arg(short, long)]
    output: PathBuf,
    /// Write one JSON line per pixel here
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    orbit: OrbitArgs,
}

#[derive(Args, Serialize)]
struct ParamArgs {
    /// Degree of z^n - 1
    #[arg(long)]
    n: u32,
    /// Window in the alpha plane: re_min,re_max,im_min,im_max
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-1,4,-2.5,2.5")]
    window: [f64; 4],
    /// WIDTHxHEIGHT
    #[arg(long, value_parser = parse_size, default_value = "500x500")]
    size: (usize, usize),
    /// Output PPM path
    #[arg(short, long)]
    output: PathBuf,
    /// Write one JSON line per pixel here
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    orbit: OrbitArgs,
}

#[derive(Args, Serialize)]
struct ProbeArgs {
    /// Degree of z^n - 1
    #[arg(long)]
    n: u32,
    /// Method parameter
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Complex64,
    /// Side of the square classification grid
    #[arg(long, default_value_t = 1024)]
    resolution: usize,
    /// Window half-width as a multiple of the largest relevant modulus
    #[arg(long, default_value_t = 1.5)]
    window_scale: f64,
    #[command(flatten)]
    #[serde(flatten)]
    orbit: OrbitArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Lemma {
    /// |B_a(z)| > |z| for |z| > 2a
    EscapeB,
    /// B_a(c+) lands in the basin of infinity
    CriticalValue,
    /// sign change and zero of S
    ZeroInterval,
    /// |R(z)| > |z| for |z| > n alpha
    EscapeR,
    /// image of the segment n alpha (1/2 + it)
    Segment,
    /// conjugacy identities and the closed form
    Conjugacies,
    /// rotation symmetry of an O(n, alpha) grid
    Symmetry,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Check to run (repeatable)
    #[arg(long, value_enum, required_unless_present = "all")]
    lemma: Vec<Lemma>,
    /// Run every check that applies to --n
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 3)]
    n: u32,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "10")]
    alpha: Complex64,
    /// Parameter of B (default 2(alpha - 1))
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Constant for the z^n + c conjugacy
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "-1+2i")]
    c: Complex64,
    /// Random samples per check
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Points on the segment
    #[arg(long, default_value_t = 201)]
    segment_samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Grid window for the symmetry check
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-10,10,-10,10")]
    window: [f64; 4],
    /// Grid size for the symmetry check
    #[arg(long, value_parser = parse_size, default_value = "400x400")]
    size: (usize, usize),
    #[command(flatten)]
    #[serde(flatten)]
    orbit: OrbitArgs,
}

#[derive(Args, Serialize)]
struct PreimagesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    map: MapArgs,
    /// Point whose preimages are wanted, or `inf`
    #[arg(long, value_parser = parse_extended, allow_hyphen_values = true)]
    w: Point,
    /// Also write the report lines to this file
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Failure with its exit code.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::DegenerateParameter { .. }
            | Error::CommonRoot { .. }
            | Error::DegenerateCriticalPoints { .. }
            | Error::UnsupportedFamily { .. }
            | Error::OutsideWindow { .. }
            | Error::WindowNotSymmetric { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn require<T>(v: Option<T>, flag: &str, family: FamilyArg) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("--{flag} is required for family {family:?}")))
}

fn build_spec(m: &MapArgs) -> Result<MapSpec<f64>, Failure> {
    let f = m.family;
    Ok(match f {
        FamilyArg::O => MapSpec::o(require(m.n, "n", f)?, require(m.alpha, "alpha", f)?)?,
        FamilyArg::Oc => MapSpec::oc(require(m.n, "n", f)?, require(m.alpha, "alpha", f)?, require(m.c, "c", f)?)?,
        FamilyArg::B => MapSpec::b(require(m.a, "a", f)?)?,
        FamilyArg::R => MapSpec::r(require(m.n, "n", f)?, require(m.alpha, "alpha", f)?)?,
        FamilyArg::Newton => MapSpec::newton(require(m.n, "n", f)?)?,
    })
}

fn window(w: [f64; 4], size: (usize, usize)) -> Result<GridWindow<f64>, Failure> {
    Ok(GridWindow::new(w[0], w[1], w[2], w[3], size.0, size.1)?)
}

fn pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R, Failure> {
    Ok(with_workers(workers, f)?)
}

/// Collects report lines, printing them and optionally saving them.
struct Reporter {
    lines: Vec<String>,
}

impl Reporter {
    fn new(cmd: &Command) -> Result<Self, Failure> {
        let header = json!({ "header": cmd, "version": env!("CARGO_PKG_VERSION") });
        let mut r = Self { lines: Vec::new() };
        r.push(&header)?;
        Ok(r)
    }

    fn push<S: Serialize>(&mut self, record: &S) -> Result<(), Failure> {
        let line = chdyn::report::to_line(record)?;
        println!("{line}");
        self.lines.push(line);
        Ok(())
    }

    fn save(&self, path: Option<&PathBuf>) -> Result<(), Failure> {
        if let Some(p) = path {
            chdyn::report::write_file(p, &self.lines)?;
        }
        Ok(())
    }
}

fn histogram(grid: &ClassificationGrid<f64>) -> BTreeMap<String, usize> {
    grid.histogram().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn dump(grid: &ClassificationGrid<f64>, path: Option<&PathBuf>) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let io = |e: std::io::Error| Failure::Runtime(format!("{}: {e}", path.display()));
    let file = std::fs::File::create(path).map_err(io)?;
    let mut out = std::io::BufWriter::new(file);
    write_grid_dump(grid, &mut out).map_err(io)?;
    out.flush().map_err(io)
}

fn cmd_dyn(cmd: &Command, a: &DynArgs) -> Outcome {
    let spec = build_spec(&a.map)?;
    let win = window(a.window, a.size)?;
    let cfg =
        RenderConfig { max_iter: a.orbit.max_iter, conv_tol: a.orbit.conv_tol, use_escape_radius: !a.no_escape_radius };
    check_orbit(&a.orbit)?;
    let mut rep = Reporter::new(cmd)?;
    let grid = pool(a.orbit.workers, || dynamical_grid(&spec, &win, &cfg))?;
    let (targets, radius) = dynamical_targets(&spec, cfg.use_escape_radius);
    let img = render_grid(&grid, &Palette::for_roots(targets.len()));
    write_ppm(&img, &a.output)?;
    dump(&grid, a.dump.as_ref())?;
    rep.push(&json!({
        "family": spec.family().to_string(),
        "targets": targets.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "escape_radius": radius,
        "histogram": histogram(&grid),
        "grid_sha256": grid.content_hash(),
        "image_sha256": img.content_hash(),
        "output": a.output,
    }))?;
    rep.save(a.orbit.report.as_ref())?;
    Ok(0)
}

fn cmd_param(cmd: &Command, a: &ParamArgs) -> Outcome {
    if a.n < 2 {
        return Err(usage(format!("--n must be at least 2, got {}", a.n)));
    }
    check_orbit(&a.orbit)?;
    let win = window(a.window, a.size)?;
    let cfg = RenderConfig { max_iter: a.orbit.max_iter, conv_tol: a.orbit.conv_tol, use_escape_radius: false };
    let mut rep = Reporter::new(cmd)?;
    let grid = pool(a.orbit.workers, || parameter_grid(a.n, &win, &cfg))??;
    let img = render_grid(&grid, &Palette::for_roots(a.n as usize));
    write_ppm(&img, &a.output)?;
    dump(&grid, a.dump.as_ref())?;
    rep.push(&json!({
        "histogram": histogram(&grid),
        "grid_sha256": grid.content_hash(),
        "image_sha256": img.content_hash(),
        "output": a.output,
    }))?;
    rep.save(a.orbit.report.as_ref())?;
    Ok(0)
}

fn cmd_probe(cmd: &Command, a: &ProbeArgs) -> Outcome {
    check_orbit(&a.orbit)?;
    if a.resolution < 4 || !(a.window_scale > 1.0) {
        return Err(usage("--resolution must be at least 4 and --window-scale above 1"));
    }
    let cfg = ProbeConfig {
        resolution: a.resolution,
        max_iter: a.orbit.max_iter,
        conv_tol: a.orbit.conv_tol,
        window_scale: a.window_scale,
        ..ProbeConfig::default()
    };
    let mut rep = Reporter::new(cmd)?;
    let verdict = pool(a.orbit.workers, || connectivity_probe(a.n, a.alpha, &cfg))??;
    rep.push(&verdict)?;
    rep.save(a.orbit.report.as_ref())?;
    Ok(if verdict.verdict.is_definite() { 0 } else { 3 })
}

fn real_alpha(alpha: Complex64) -> Result<f64, Failure> {
    if alpha.im != 0.0 {
        return Err(usage(format!("this check needs a real --alpha, got {alpha}")));
    }
    Ok(alpha.re)
}

fn run_lemma(lemma: Lemma, a: &VerifyArgs) -> Result<LemmaReport, Failure> {
    let b_param = || -> Result<f64, Failure> { Ok(a.a.unwrap_or(2.0 * (real_alpha(a.alpha)? - 1.0))) };
    Ok(match lemma {
        Lemma::EscapeB => verify::verify_escape_bound_b(b_param()?, a.samples, a.seed)?,
        Lemma::CriticalValue => verify::verify_critical_value_escape(b_param()?)?,
        Lemma::ZeroInterval => verify::verify_zero_interval(a.n, real_alpha(a.alpha)?)?,
        Lemma::EscapeR => verify::verify_escape_bound_r(a.n, real_alpha(a.alpha)?, a.samples, a.seed)?,
        Lemma::Segment => verify::verify_segment(a.n, real_alpha(a.alpha)?, a.segment_samples)?,
        Lemma::Conjugacies => verify::verify_conjugacies(a.n, a.alpha, a.c, a.samples, a.seed)?,
        Lemma::Symmetry => {
            let spec = MapSpec::o(a.n, a.alpha)?;
            let win = window(a.window, a.size)?;
            let cfg = RenderConfig { max_iter: a.orbit.max_iter, conv_tol: a.orbit.conv_tol, use_escape_radius: false };
            let grid = pool(a.orbit.workers, || dynamical_grid(&spec, &win, &cfg))?;
            verify::symmetry_report(&grid, a.n)?
        }
    })
}

fn cmd_verify(cmd: &Command, a: &VerifyArgs) -> Outcome {
    check_orbit(&a.orbit)?;
    let mut rep = Reporter::new(cmd)?;
    let reports = if a.all {
        let suite = SuiteConfig {
            a: a.a,
            c: a.c,
            samples: a.samples,
            segment_samples: a.segment_samples,
            seed: a.seed,
            ..SuiteConfig::new(a.n, real_alpha(a.alpha)?)
        };
        pool(a.orbit.workers, || verify::run_all(&suite))??
    } else {
        a.lemma.iter().map(|&l| run_lemma(l, a)).collect::<Result<Vec<_>, _>>()?
    };
    let mut all_pass = true;
    for r in &reports {
        all_pass &= r.pass;
        rep.push(r)?;
    }
    rep.save(a.orbit.report.as_ref())?;
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_preimages(cmd: &Command, a: &PreimagesArgs) -> Outcome {
    let spec = build_spec(&a.map)?;
    let w = match a.w.0 {
        Some(z) => ExtendedComplex::Finite(z),
        None => ExtendedComplex::Infinity,
    };
    let mut rep = Reporter::new(cmd)?;
    let poly = chdyn::polyroots::preimage_polynomial(&spec, w);
    let roots = preimages(&spec, w)?;
    for (z, mult) in roots.distinct() {
        let residual = poly.eval(z).norm();
        // adding 0.0 turns -0.0 into 0.0
        rep.push(&json!({ "root": [z.re + 0.0, z.im + 0.0], "multiplicity": mult, "residual": residual }))?;
    }
    rep.save(a.report.as_ref())?;
    Ok(0)
}

fn check_orbit(o: &OrbitArgs) -> Result<(), Failure> {
    if o.max_iter < 1 || !(o.conv_tol > 0.0) {
        return Err(usage("--max-iter must be at least 1 and --conv-tol positive"));
    }
    Ok(())
}

fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Dyn(a) => cmd_dyn(cmd, a),
        Command::Param(a) => cmd_param(cmd, a),
        Command::Probe(a) => cmd_probe(cmd, a),
        Command::Verify(a) => cmd_verify(cmd, a),
        Command::Preimages(a) => cmd_preimages(cmd, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
