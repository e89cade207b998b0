//! Flood-filled components and grid-approximate basin membership.

use num_complex::Complex;
use serde::Serialize;

use super::{classify_grid, classify_orbit, ClassificationGrid, GridWindow, OrbitOutcome, OrbitParams, OutcomeClass};
use crate::error::{Error, Result};
use crate::maps::{to_c64, MapSpec};
use crate::polyroots::find_roots;
use crate::scalar::Real;
use crate::sphere::ExtendedComplex;

/// Three-valued answer; `Undecided` marks the limit of grid resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ternary {
    Yes,
    No,
    Undecided,
}

impl std::fmt::Display for Ternary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Yes => "yes",
            Self::No => "no",
            Self::Undecided => "undecided",
        })
    }
}

/// A 4-connected set of pixels of one grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub width: usize,
    pub height: usize,
    mask: Vec<bool>,
    size: usize,
}

impl Component {
    pub fn contains(&self, idx: usize) -> bool {
        self.mask.get(idx).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Member pixel indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i)).collect()
    }

    pub fn touches_border(&self) -> bool {
        let (w, h) = (self.width, self.height);
        (0..w).any(|i| self.contains(i) || self.contains((h - 1) * w + i))
            || (0..h).any(|j| self.contains(j * w) || self.contains(j * w + w - 1))
    }
}

fn neighbours(width: usize, height: usize, idx: usize) -> impl Iterator<Item = usize> {
    let (i, j) = (idx % width, idx / width);
    let left = (i > 0).then(|| idx - 1);
    let right = (i + 1 < width).then(|| idx + 1);
    let up = (j > 0).then(|| idx - width);
    let down = (j + 1 < height).then(|| idx + width);
    [left, right, up, down].into_iter().flatten()
}

/// 4-connected flood fill from `seed` over pixels satisfying `pred`.
/// Empty if the seed itself fails `pred`.
pub fn flood_fill<T: Real>(
    grid: &ClassificationGrid<T>,
    seed: usize,
    pred: impl Fn(&OrbitOutcome<T>) -> bool,
) -> Component {
    let (w, h) = (grid.window.width, grid.window.height);
    let mut mask = vec![false; w * h];
    let mut size = 0;
    if seed < mask.len() && pred(&grid.cells[seed]) {
        let mut stack = vec![seed];
        mask[seed] = true;
        while let Some(idx) = stack.pop() {
            size += 1;
            for nb in neighbours(w, h, idx) {
                if !mask[nb] && pred(&grid.cells[nb]) {
                    mask[nb] = true;
                    stack.push(nb);
                }
            }
        }
    }
    Component { width: w, height: h, mask, size }
}

/// True when some 4-neighbour of `idx` has a different outcome class.
pub fn boundary_adjacent<T: Real>(grid: &ClassificationGrid<T>, idx: usize) -> bool {
    let c = grid.class_at(idx);
    neighbours(grid.window.width, grid.window.height, idx).any(|nb| grid.class_at(nb) != c)
}

fn anchor_pixel<T: Real>(grid: &ClassificationGrid<T>, anchor: Complex<T>) -> Result<usize> {
    let (i, j) = grid.window.pixel_of(anchor).ok_or_else(|| Error::OutsideWindow { point: to_c64(anchor) })?;
    Ok(grid.window.index(i, j))
}

/// Pixels of the immediate basin of `root_index` containing `anchor`.
pub fn immediate_component<T: Real>(
    grid: &ClassificationGrid<T>,
    anchor: Complex<T>,
    root_index: usize,
) -> Result<Component> {
    let seed = anchor_pixel(grid, anchor)?;
    let found = grid.class_at(seed);
    if found != OutcomeClass::Root(root_index) {
        return Err(Error::AnchorMisclassified {
            expected: OutcomeClass::Root(root_index).to_string(),
            found: found.to_string(),
        });
    }
    Ok(flood_fill(grid, seed, |o| o.class() == OutcomeClass::Root(root_index)))
}

/// Component of escaping pixels containing `anchor`.
pub fn escape_component<T: Real>(grid: &ClassificationGrid<T>, anchor: Complex<T>) -> Result<Component> {
    let seed = anchor_pixel(grid, anchor)?;
    let found = grid.class_at(seed);
    if found != OutcomeClass::Escaped {
        return Err(Error::AnchorMisclassified {
            expected: OutcomeClass::Escaped.to_string(),
            found: found.to_string(),
        });
    }
    Ok(flood_fill(grid, seed, |o| o.class() == OutcomeClass::Escaped))
}

/// Settings shared by basin membership and the connectivity probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeConfig<T> {
    /// Side of the square coarse grid.
    pub resolution: usize,
    pub max_iter: u32,
    pub conv_tol: T,
    /// Default window half-width as a multiple of the largest relevant modulus.
    pub window_scale: T,
    /// Side of each refinement grid.
    pub zoom_resolution: usize,
    /// Maximum number of refinement levels.
    pub zoom_levels: u32,
}

impl<T: Real> Default for ProbeConfig<T> {
    fn default() -> Self {
        Self {
            resolution: 1024,
            max_iter: 2000,
            conv_tol: T::lit(1e-9),
            window_scale: T::lit(1.5),
            zoom_resolution: 128,
            zoom_levels: 10,
        }
    }
}

/// Radius `rho` such that sampled points of the circle `|z - root| = rho`
/// map into the disk of radius `rho/2` and no pole lies in the disk.
/// By the maximum principle the disk then lies in the immediate basin.
pub fn trapping_radius<T: Real>(spec: &MapSpec<T>, root: Complex<T>) -> Option<T> {
    let poles = find_roots(spec.denominator()).ok()?;
    let samples = 256;
    let mut rho = T::one().max(root.norm());
    for _ in 0..80 {
        let pole_inside = poles.roots.iter().any(|p| (p - root).norm() <= rho * T::lit(1.05));
        let ok = !pole_inside
            && (0..samples).all(|k| {
                let theta = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(samples).unwrap();
                let z = root + Complex::from_polar(rho, theta);
                match spec.eval_finite(z) {
                    ExtendedComplex::Finite(w) => (w - root).norm() < rho * T::lit(0.5),
                    ExtendedComplex::Infinity => false,
                }
            });
        if ok {
            return Some(rho);
        }
        rho *= T::lit(0.5);
    }
    None
}

/// Grid-approximate immediate basin of one attracting fixed point.
pub struct ImmediateBasin<'a, T: Real> {
    spec: &'a MapSpec<T>,
    targets: Vec<Complex<T>>,
    root_index: usize,
    params: OrbitParams<T>,
    cfg: ProbeConfig<T>,
    trap: Option<T>,
    pub grid: ClassificationGrid<T>,
    pub component: Component,
}

impl<'a, T: Real> ImmediateBasin<'a, T> {
    /// Classifies `window` and flood-fills from the target's pixel.
    pub fn build(
        spec: &'a MapSpec<T>,
        targets: Vec<Complex<T>>,
        root_index: usize,
        window: GridWindow<T>,
        cfg: ProbeConfig<T>,
    ) -> Result<Self> {
        let root = *targets
            .get(root_index)
            .ok_or_else(|| Error::InvalidArgument(format!("root index {root_index} out of range")))?;
        let params = OrbitParams::new(cfg.max_iter, cfg.conv_tol);
        let grid = classify_grid(spec, &window, &targets, &params);
        let component = immediate_component(&grid, root, root_index)?;
        let trap = trapping_radius(spec, root);
        Ok(Self { spec, targets, root_index, params, cfg, trap, grid, component })
    }

    fn root(&self) -> Complex<T> {
        self.targets[self.root_index]
    }

    /// Membership of `point` in the immediate basin.
    ///
    /// `No` needs the point's own orbit to miss the root, or its pixel to lie
    /// off the component, or a refinement window in which its component is
    /// enclosed. Pixels 4-adjacent to another class give `Undecided`.
    pub fn membership(&self, point: Complex<T>) -> Result<Ternary> {
        let outcome = classify_orbit(self.spec, ExtendedComplex::Finite(point), &self.targets, &self.params);
        match outcome.class() {
            OutcomeClass::Root(k) if k == self.root_index => {}
            OutcomeClass::Undecided => return Ok(Ternary::Undecided),
            _ => return Ok(Ternary::No),
        }
        let idx = anchor_pixel(&self.grid, point)?;
        if boundary_adjacent(&self.grid, idx) {
            return Ok(Ternary::Undecided);
        }
        if !self.component.contains(idx) {
            return Ok(Ternary::No);
        }
        Ok(self.refine(point))
    }

    /// Local size of the set mapping into the trapping disk near `point`.
    fn local_scale(&self, point: Complex<T>) -> Option<T> {
        let rho = self.trap?;
        let root = self.root();
        let mut z = point;
        let mut deriv = T::one();
        for _ in 0..self.params.max_iter {
            if (z - root).norm() < rho {
                return Some(rho / deriv);
            }
            deriv *= self.spec.eval_derivative(z).ok()?.norm();
            if !deriv.is_finite() {
                return Some(T::zero());
            }
            if deriv == T::zero() {
                return None;
            }
            z = self.spec.eval_finite(z).finite()?;
        }
        None
    }

    /// Looks for a basin island smaller than one coarse pixel around `point`.
    fn refine(&self, point: Complex<T>) -> Ternary {
        let w = &self.grid.window;
        let coarse = w.dx().min(w.dy());
        let scale = match self.local_scale(point) {
            Some(s) => s,
            None => return Ternary::Yes,
        };
        if scale >= coarse {
            return Ternary::Yes;
        }
        let res = self.cfg.zoom_resolution.max(8);
        let mut half = coarse * T::lit(1.5);
        for _ in 0..self.cfg.zoom_levels {
            let Ok(zoom) = GridWindow::centered(point, half, res) else { return Ternary::Undecided };
            let grid = classify_grid(self.spec, &zoom, &self.targets, &self.params);
            let spacing = zoom.dx();
            if let Some((i, j)) = zoom.pixel_of(point) {
                let seed = zoom.index(i, j);
                let comp = flood_fill(&grid, seed, |o| o.class() == OutcomeClass::Root(self.root_index));
                if !comp.is_empty() {
                    let root_here = zoom.pixel_of(self.root()).map(|(ri, rj)| comp.contains(zoom.index(ri, rj)));
                    if root_here == Some(true) {
                        return Ternary::Yes;
                    }
                    if !comp.touches_border() {
                        return Ternary::No;
                    }
                    if spacing * T::lit(8.0) <= scale {
                        return Ternary::Yes;
                    }
                }
            }
            half /= T::lit(16.0);
        }
        Ternary::Undecided
    }
}

/// Grid-approximate test of whether `point` lies in the immediate basin of
/// the attracting fixed point `root`. A root at infinity is handled in the
/// chart `w = 1/z`.
///
/// With an explicit window the basin is flood-filled on that grid. Without
/// one, square windows centred on the root grow by factors of 4 from the
/// trapping radius: if the basin is enclosed by a window that misses the
/// point the answer is `No`, otherwise the final grid (at
/// `cfg.resolution`) just covers the point with margin `window_scale`.
pub fn in_immediate_basin<T: Real>(
    spec: &MapSpec<T>,
    point: ExtendedComplex<T>,
    root: ExtendedComplex<T>,
    window: Option<GridWindow<T>>,
    cfg: &ProbeConfig<T>,
) -> Result<Ternary> {
    let chart;
    let (spec, point, root) = match root {
        ExtendedComplex::Infinity => {
            chart = spec.reciprocal();
            (&chart, point.recip(), ExtendedComplex::zero())
        }
        _ => (spec, point, root),
    };
    if point == root {
        return Ok(Ternary::Yes);
    }
    let (Some(p), Some(r)) = (point.finite(), root.finite()) else {
        return Err(Error::InvalidArgument("point at infinity outside the chart".into()));
    };
    let window = match window {
        Some(w) => w,
        None => return adaptive_membership(spec, p, r, cfg),
    };
    for z in [p, r] {
        if !window.contains(z) {
            return Err(Error::OutsideWindow { point: to_c64(z) });
        }
    }
    ImmediateBasin::build(spec, vec![r], 0, window, *cfg)?.membership(p)
}

/// Side of the grids used while growing the window.
const SEARCH_RESOLUTION: usize = 256;

fn adaptive_membership<T: Real>(
    spec: &MapSpec<T>,
    p: Complex<T>,
    r: Complex<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Ternary> {
    let full = cfg.window_scale * (p - r).norm();
    let params = OrbitParams::new(cfg.max_iter, cfg.conv_tol);
    let targets = [r];
    if let Some(rho) = trapping_radius(spec, r) {
        let mut half = rho * T::lit(2.0);
        while half < full {
            let w = GridWindow::centered(r, half, SEARCH_RESOLUTION)?;
            let grid = classify_grid(spec, &w, &targets, &params);
            let comp = immediate_component(&grid, r, 0)?;
            if !comp.touches_border() && !w.contains(p) {
                return Ok(Ternary::No);
            }
            half *= T::lit(4.0);
        }
    }
    let w = GridWindow::centered(r, full, cfg.resolution)?;
    ImmediateBasin::build(spec, vec![r], 0, w, *cfg)?.membership(p)
}
