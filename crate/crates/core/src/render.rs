//! Coloring of classification grids and PPM output.

use std::io::Write;
use std::path::Path;

use num_complex::Complex;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dynamics::{
    classify_grid, classify_orbit, par_map_window, ClassificationGrid, GridWindow, OrbitOutcome, OrbitParams,
};
use crate::error::{Error, Result};
use crate::maps::{degenerate_check, MapSpec};
use crate::scalar::{roots_of_unity, Real};
use crate::sphere::ExtendedComplex;

pub type Rgb = [u8; 3];

/// Row-major 8-bit RGB raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn get(&self, i: usize, j: usize) -> Rgb {
        self.pixels[j * self.width + i]
    }

    /// Binary PPM: `P6\n<w> <h>\n255\n` followed by the raw triples.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    /// Hex SHA-256 of the PPM encoding.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_ppm()))
    }
}

pub fn write_ppm(img: &Image, path: &Path) -> Result<()> {
    std::fs::write(path, img.to_ppm()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Iteration count at which shading bottoms out.
pub const SHADE_CAP: u32 = 64;
/// Darkest shade of any non-black color.
pub const MIN_VALUE: f64 = 0.35;

/// Colors per outcome class.
///
/// Roots get fully saturated hues, cycles are grey, escaping points use a
/// half-saturated hue and undecided points are black, so classes never
/// share a color whatever the shading.
#[derive(Clone, Debug, PartialEq)]
pub struct Palette {
    /// Hue in degrees for each root index.
    pub root_hues: Vec<f64>,
    pub escape_hue: f64,
    pub undecided: Rgb,
}

fn hsv(h: f64, s: f64, v: f64) -> Rgb {
    let h = h.rem_euclid(360.0) / 60.0;
    let c = v * s;
    let x = c * (1.0 - ((h % 2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r, g, b].map(|ch| ((ch + m) * 255.0).round().clamp(0.0, 255.0) as u8)
}

impl Palette {
    /// Evenly spaced hues starting at red for root 0.
    pub fn for_roots(count: usize) -> Self {
        let step = 360.0 / count.max(1) as f64;
        Self { root_hues: (0..count).map(|k| k as f64 * step).collect(), escape_hue: step / 2.0, undecided: [0, 0, 0] }
    }

    /// Brightness in `[MIN_VALUE, 1]`, falling with `log(1 + iterations)`.
    pub fn shade(iterations: u32) -> f64 {
        let t = ((1.0 + f64::from(iterations)).ln() / (1.0 + f64::from(SHADE_CAP)).ln()).clamp(0.0, 1.0);
        1.0 - (1.0 - MIN_VALUE) * t
    }

    pub fn color<T: Real>(&self, outcome: &OrbitOutcome<T>) -> Rgb {
        match *outcome {
            OrbitOutcome::ConvergedToRoot { index, iterations } => {
                let hue = self.root_hues.get(index).copied().unwrap_or(0.0);
                hsv(hue, 1.0, Self::shade(iterations))
            }
            OrbitOutcome::ConvergedToCycle { iterations, .. } => hsv(0.0, 0.0, Self::shade(iterations)),
            OrbitOutcome::Escaped { iterations } => hsv(self.escape_hue, 0.5, Self::shade(iterations)),
            OrbitOutcome::Undecided => self.undecided,
        }
    }
}

/// Colors every cell of a grid.
pub fn render_grid<T: Real>(grid: &ClassificationGrid<T>, palette: &Palette) -> Image {
    Image {
        width: grid.window.width,
        height: grid.window.height,
        pixels: grid.cells.iter().map(|c| palette.color(c)).collect(),
    }
}

/// Orbit settings for rendering.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderConfig<T> {
    pub max_iter: u32,
    pub conv_tol: T,
    /// Use the map's escape radius (for `B` and `R`) when it has one.
    pub use_escape_radius: bool,
}

impl<T: Real> Default for RenderConfig<T> {
    fn default() -> Self {
        Self { max_iter: 2000, conv_tol: T::lit(1e-9), use_escape_radius: true }
    }
}

/// Finite superattracting points used as targets, and the escape radius.
pub fn dynamical_targets<T: Real>(spec: &MapSpec<T>, use_escape_radius: bool) -> (Vec<Complex<T>>, Option<T>) {
    let targets = spec.superattracting_points().iter().filter_map(ExtendedComplex::finite).collect();
    (targets, if use_escape_radius { spec.escape_radius() } else { None })
}

pub fn dynamical_grid<T: Real>(
    spec: &MapSpec<T>,
    window: &GridWindow<T>,
    cfg: &RenderConfig<T>,
) -> ClassificationGrid<T> {
    let (targets, radius) = dynamical_targets(spec, cfg.use_escape_radius);
    let params = OrbitParams::new(cfg.max_iter, cfg.conv_tol).with_escape_radius(radius);
    classify_grid(spec, window, &targets, &params)
}

pub fn render_dynamical<T: Real>(
    spec: &MapSpec<T>,
    window: &GridWindow<T>,
    palette: &Palette,
    cfg: &RenderConfig<T>,
) -> Image {
    render_grid(&dynamical_grid(spec, window, cfg), palette)
}

/// Fate of the free critical point with smallest `|arg|` of `O(n, alpha)`
/// for every alpha in the window. Degenerate alpha, and alpha where the
/// critical points are undefined, are left `Undecided`.
pub fn parameter_grid<T: Real>(n: u32, window: &GridWindow<T>, cfg: &RenderConfig<T>) -> Result<ClassificationGrid<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let targets = roots_of_unity::<T>(n);
    let params = OrbitParams::new(cfg.max_iter, cfg.conv_tol);
    let cells = par_map_window(window, |alpha| {
        if degenerate_check(n, alpha) {
            return OrbitOutcome::Undecided;
        }
        let Ok(spec) = MapSpec::o(n, alpha) else { return OrbitOutcome::Undecided };
        let Ok(crit) = spec.free_critical_points() else { return OrbitOutcome::Undecided };
        classify_orbit(&spec, ExtendedComplex::Finite(crit[0]), &targets, &params)
    });
    Ok(ClassificationGrid { window: *window, cells })
}

pub fn render_parameter<T: Real>(
    n: u32,
    window: &GridWindow<T>,
    palette: &Palette,
    cfg: &RenderConfig<T>,
) -> Result<Image> {
    Ok(render_grid(&parameter_grid(n, window, cfg)?, palette))
}

#[derive(Serialize)]
struct DumpRecord {
    pixel: usize,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<u32>,
    iterations: Option<u32>,
}

/// One JSON line per pixel: index, outcome tag, iterations.
pub fn write_grid_dump<T: Real>(grid: &ClassificationGrid<T>, out: &mut impl Write) -> std::io::Result<()> {
    for (pixel, cell) in grid.cells.iter().enumerate() {
        let (root, period) = match cell {
            OrbitOutcome::ConvergedToRoot { index, .. } => (Some(*index), None),
            OrbitOutcome::ConvergedToCycle { period, .. } => (None, Some(*period)),
            _ => (None, None),
        };
        let rec = DumpRecord { pixel, outcome: cell.tag(), root, period, iterations: cell.iterations() };
        serde_json::to_writer(&mut *out, &rec).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
