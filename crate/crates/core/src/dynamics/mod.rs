//! Orbit classification and discretized basins.

mod component;
mod probe;

pub use component::{
    boundary_adjacent, escape_component, flood_fill, immediate_component, in_immediate_basin, trapping_radius,
    Component, ImmediateBasin, ProbeConfig, Ternary,
};
pub use probe::{connectivity_probe, verdict_from_evidence, ConnectivityVerdict, ProbeEvidence, Verdict};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::scalar::Real;
use crate::sphere::ExtendedComplex;

/// Iterations before period detection starts.
pub const CYCLE_BURN_IN: u32 = 50;
/// Longest period searched for.
pub const MAX_PERIOD: usize = 8;
/// Consecutive agreeing steps required for root or cycle convergence.
pub const CONSECUTIVE: u32 = 3;
/// Side length of the square tiles handed to worker threads.
pub const TILE: usize = 64;

/// Fate of one forward orbit.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum OrbitOutcome<T> {
    /// Entered the `conv_tol` disk of `targets[index]` at step `iterations`
    /// and stayed for three steps.
    ConvergedToRoot {
        index: usize,
        iterations: u32,
    },
    ConvergedToCycle {
        period: u32,
        representative: ExtendedComplex<T>,
        iterations: u32,
    },
    Escaped {
        iterations: u32,
    },
    #[default]
    Undecided,
}

/// Outcome with iteration counts and cycle positions dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Root(usize),
    Cycle,
    Escaped,
    Undecided,
}

impl<T: Real> OrbitOutcome<T> {
    pub fn class(&self) -> OutcomeClass {
        match self {
            Self::ConvergedToRoot { index, .. } => OutcomeClass::Root(*index),
            Self::ConvergedToCycle { .. } => OutcomeClass::Cycle,
            Self::Escaped { .. } => OutcomeClass::Escaped,
            Self::Undecided => OutcomeClass::Undecided,
        }
    }

    pub fn iterations(&self) -> Option<u32> {
        match self {
            Self::ConvergedToRoot { iterations, .. }
            | Self::ConvergedToCycle { iterations, .. }
            | Self::Escaped { iterations } => Some(*iterations),
            Self::Undecided => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::ConvergedToRoot { .. } => "root",
            Self::ConvergedToCycle { .. } => "cycle",
            Self::Escaped { .. } => "escaped",
            Self::Undecided => "undecided",
        }
    }
}

impl std::fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Root(k) => write!(f, "root[{k}]"),
            Self::Cycle => f.write_str("cycle"),
            Self::Escaped => f.write_str("escaped"),
            Self::Undecided => f.write_str("undecided"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitParams<T> {
    pub max_iter: u32,
    pub conv_tol: T,
    /// Only set when a lemma guarantees `|z| > r` lies in the immediate
    /// basin of infinity.
    pub escape_radius: Option<T>,
}

impl<T: Real> OrbitParams<T> {
    pub fn new(max_iter: u32, conv_tol: T) -> Self {
        Self { max_iter, conv_tol, escape_radius: None }
    }

    pub fn with_escape_radius(mut self, r: Option<T>) -> Self {
        self.escape_radius = r;
        self
    }
}

impl<T: Real> Default for OrbitParams<T> {
    fn default() -> Self {
        Self::new(2000, T::lit(1e-9))
    }
}

/// Iterates `spec` from `z0` and classifies the orbit.
///
/// Checks, at every step `k = 0..=max_iter`: escape (if a radius is set),
/// then proximity to a target, then (after [`CYCLE_BURN_IN`]) whether
/// `|z_k - z_(k-p)| < conv_tol` has held for three consecutive `k` for some
/// `p <= 8`, smallest period first.
pub fn classify_orbit<T: Real>(
    spec: &MapSpec<T>,
    z0: ExtendedComplex<T>,
    targets: &[Complex<T>],
    params: &OrbitParams<T>,
) -> OrbitOutcome<T> {
    let tol = params.conv_tol;
    let mut z = z0;
    let mut history = [ExtendedComplex::<T>::Infinity; MAX_PERIOD];
    let mut cycle_streak = [0u32; MAX_PERIOD + 1];
    let mut root_streak = 0u32;
    let mut root_index = usize::MAX;
    let mut root_start = 0u32;
    for k in 0..=params.max_iter {
        if let Some(r) = params.escape_radius {
            if z.norm() > r {
                return OrbitOutcome::Escaped { iterations: k };
            }
        }
        match z.finite().and_then(|w| targets.iter().position(|t| (w - t).norm() < tol)) {
            Some(j) => {
                if j == root_index {
                    root_streak += 1;
                } else {
                    root_index = j;
                    root_streak = 1;
                    root_start = k;
                }
                if root_streak >= CONSECUTIVE {
                    return OrbitOutcome::ConvergedToRoot { index: j, iterations: root_start };
                }
            }
            None => {
                root_streak = 0;
                root_index = usize::MAX;
            }
        }
        if k >= CYCLE_BURN_IN {
            for p in 1..=MAX_PERIOD {
                let prev = history[(k as usize + MAX_PERIOD - p) % MAX_PERIOD];
                if z.distance(&prev) < tol {
                    cycle_streak[p] += 1;
                    if cycle_streak[p] >= CONSECUTIVE {
                        return OrbitOutcome::ConvergedToCycle { period: p as u32, representative: z, iterations: k };
                    }
                } else {
                    cycle_streak[p] = 0;
                }
            }
        }
        history[k as usize % MAX_PERIOD] = z;
        if k == params.max_iter {
            break;
        }
        z = spec.eval(z);
    }
    OrbitOutcome::Undecided
}

/// Rectangle of the plane sampled at pixel centres; row 0 is the top
/// (largest imaginary part).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridWindow<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> GridWindow<T> {
    pub fn new(re_min: T, re_max: T, im_min: T, im_max: T, width: usize, height: usize) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || !(re_min < re_max) || !(im_min < im_max) || width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "invalid window [{re_min}, {re_max}] x [{im_min}, {im_max}] at {width}x{height}"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max, width, height })
    }

    /// Square window of half-width `half` around `center`.
    pub fn centered(center: Complex<T>, half: T, resolution: usize) -> Result<Self> {
        Self::new(center.re - half, center.re + half, center.im - half, center.im + half, resolution, resolution)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> T {
        (self.re_max - self.re_min) / T::from_usize(self.width).expect("size")
    }

    pub fn dy(&self) -> T {
        (self.im_max - self.im_min) / T::from_usize(self.height).expect("size")
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Complex<T> {
        let half = T::lit(0.5);
        let fi = T::from_usize(i).expect("size") + half;
        let fj = T::from_usize(j).expect("size") + half;
        Complex::new(self.re_min + fi * self.dx(), self.im_max - fj * self.dy())
    }

    /// Pixel containing `z`, if inside the window.
    pub fn pixel_of(&self, z: Complex<T>) -> Option<(usize, usize)> {
        let fi = ((z.re - self.re_min) / self.dx()).floor();
        let fj = ((self.im_max - z.im) / self.dy()).floor();
        if !(fi >= T::zero() && fj >= T::zero()) {
            return None;
        }
        let (i, j) = (fi.to_usize()?, fj.to_usize()?);
        (i < self.width && j < self.height).then_some((i, j))
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        self.pixel_of(z).is_some()
    }
}

/// Row-major outcomes over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationGrid<T> {
    pub window: GridWindow<T>,
    pub cells: Vec<OrbitOutcome<T>>,
}

impl<T: Real> ClassificationGrid<T> {
    pub fn get(&self, i: usize, j: usize) -> &OrbitOutcome<T> {
        &self.cells[self.window.index(i, j)]
    }

    pub fn class_at(&self, idx: usize) -> OutcomeClass {
        self.cells[idx].class()
    }

    /// Pixel counts per outcome class.
    pub fn histogram(&self) -> std::collections::BTreeMap<OutcomeClass, usize> {
        let mut h = std::collections::BTreeMap::new();
        for c in &self.cells {
            *h.entry(c.class()).or_insert(0) += 1;
        }
        h
    }

    /// SHA-256 over a canonical little-endian encoding of every cell.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.window.width as u64).to_le_bytes());
        hasher.update((self.window.height as u64).to_le_bytes());
        for cell in &self.cells {
            match cell {
                OrbitOutcome::ConvergedToRoot { index, iterations } => {
                    hasher.update([0u8]);
                    hasher.update((*index as u64).to_le_bytes());
                    hasher.update(iterations.to_le_bytes());
                }
                OrbitOutcome::ConvergedToCycle { period, representative, iterations } => {
                    hasher.update([1u8]);
                    hasher.update(period.to_le_bytes());
                    hasher.update(iterations.to_le_bytes());
                    match representative.to_f64() {
                        ExtendedComplex::Finite(z) => {
                            hasher.update(z.re.to_bits().to_le_bytes());
                            hasher.update(z.im.to_bits().to_le_bytes());
                        }
                        ExtendedComplex::Infinity => hasher.update([0xff; 16]),
                    }
                }
                OrbitOutcome::Escaped { iterations } => {
                    hasher.update([2u8]);
                    hasher.update(iterations.to_le_bytes());
                }
                OrbitOutcome::Undecided => hasher.update([3u8]),
            }
        }
        hex::encode(hasher.finalize())
    }
}

/// Evaluates `f` at every pixel centre, distributing 64x64 tiles over the
/// current rayon pool. The result is position-addressed, so it does not
/// depend on the schedule.
pub fn par_map_window<T, R, F>(window: &GridWindow<T>, f: F) -> Vec<R>
where
    T: Real,
    R: Default + Clone + Send,
    F: Fn(Complex<T>) -> R + Sync,
{
    let tiles_x = window.width.div_ceil(TILE);
    let tiles_y = window.height.div_ceil(TILE);
    let tiles: Vec<(usize, Vec<R>)> = (0..tiles_x * tiles_y)
        .into_par_iter()
        .map(|t| {
            let (tx, ty) = (t % tiles_x, t / tiles_x);
            let (x0, y0) = (tx * TILE, ty * TILE);
            let (x1, y1) = ((x0 + TILE).min(window.width), (y0 + TILE).min(window.height));
            let mut out = Vec::with_capacity((x1 - x0) * (y1 - y0));
            for j in y0..y1 {
                for i in x0..x1 {
                    out.push(f(window.pixel_center(i, j)));
                }
            }
            (t, out)
        })
        .collect();
    let mut cells = vec![R::default(); window.len()];
    for (t, values) in tiles {
        let (tx, ty) = (t % tiles_x, t / tiles_x);
        let (x0, y0) = (tx * TILE, ty * TILE);
        let x1 = (x0 + TILE).min(window.width);
        let w = x1 - x0;
        for (k, v) in values.into_iter().enumerate() {
            cells[window.index(x0 + k % w, y0 + k / w)] = v;
        }
    }
    cells
}

/// Classifies the orbit of every pixel centre.
pub fn classify_grid<T: Real>(
    spec: &MapSpec<T>,
    window: &GridWindow<T>,
    targets: &[Complex<T>],
    params: &OrbitParams<T>,
) -> ClassificationGrid<T> {
    let cells = par_map_window(window, |z| classify_orbit(spec, ExtendedComplex::Finite(z), targets, params));
    ClassificationGrid { window: *window, cells }
}

/// Runs `f` on a dedicated pool of `workers` threads (`0` = rayon default).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Fraction of comparable pixels whose class agrees with the class at the
/// pixel nearest `xi z` (`xi = e^(2 pi i/n)`), after shifting root indices
/// by one. Pixels where either side touches a differently classified
/// neighbour, or whose rotation leaves the window, are skipped.
///
/// Returns `(agreeing, compared, first disagreeing pixel centres)`.
pub fn rotation_agreement<T: Real>(
    grid: &ClassificationGrid<T>,
    n: u32,
    n_roots: usize,
) -> Result<(usize, usize, Vec<Complex<T>>)> {
    let w = &grid.window;
    let tol = T::lit(1e-9) * (w.re_max - w.re_min).abs().max(T::one());
    let centered = (w.re_min + w.re_max).abs() <= tol && (w.im_min + w.im_max).abs() <= tol;
    let square_pixels = (w.dx() - w.dy()).abs() <= T::lit(1e-9) * w.dx();
    if n == 0 || !centered || !square_pixels {
        return Err(Error::WindowNotSymmetric { n });
    }
    let xi = crate::scalar::root_of_unity::<T>(1, n);
    let rotate = |c: OutcomeClass| match c {
        OutcomeClass::Root(k) if n_roots > 0 => OutcomeClass::Root((k + 1) % n_roots),
        other => other,
    };
    let (mut agree, mut compared) = (0usize, 0usize);
    let mut witnesses = Vec::new();
    for idx in 0..grid.cells.len() {
        if boundary_adjacent(grid, idx) {
            continue;
        }
        let (i, j) = w.coords(idx);
        let Some((ri, rj)) = w.pixel_of(xi * w.pixel_center(i, j)) else { continue };
        let ridx = w.index(ri, rj);
        if boundary_adjacent(grid, ridx) {
            continue;
        }
        compared += 1;
        if rotate(grid.class_at(idx)) == grid.class_at(ridx) {
            agree += 1;
        } else if witnesses.len() < 16 {
            witnesses.push(w.pixel_center(i, j));
        }
    }
    Ok((agree, compared, witnesses))
}
