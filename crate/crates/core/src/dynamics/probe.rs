//! Connectivity of the immediate basin of 1 for `O(n, alpha)`.

use num_complex::{Complex, Complex64};
use serde::Serialize;

use super::component::{ImmediateBasin, ProbeConfig, Ternary};
use super::{classify_orbit, GridWindow, OrbitParams, OutcomeClass};
use crate::error::{Error, Result};
use crate::maps::{degenerate_check, to_c64, MapSpec, DEGENERATE_EPS};
use crate::polyroots::{deflate, find_roots};
use crate::scalar::{roots_of_unity, Real};
use crate::sphere::ExtendedComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    SimplyConnectedCase1,
    SimplyConnectedCase2,
    InfinitelyConnected,
    Undecided,
}

impl Verdict {
    pub fn is_definite(self) -> bool {
        self != Self::Undecided
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeEvidence {
    pub critical_point: Complex64,
    pub critical_in_immediate: Ternary,
    /// Aggregate over the extra preimages: yes if any is yes, no if all are no.
    pub extra_preimage_in_immediate: Ternary,
    pub preimages_checked: Vec<(Complex64, Ternary)>,
    /// Where the orbit of the critical point settles.
    pub critical_orbit: OutcomeClass,
    /// Set when the critical orbit converges to a root other than 1, which
    /// the one-critical-point-per-basin argument does not anticipate.
    pub critical_converges_elsewhere: bool,
    pub window: [f64; 4],
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectivityVerdict {
    pub n: u32,
    pub alpha: Complex64,
    pub verdict: Verdict,
    pub evidence: ProbeEvidence,
}

/// Maps membership answers to a verdict.
///
/// | critical | extra preimages        | verdict               |
/// |----------|------------------------|-----------------------|
/// | no       | any                    | SimplyConnectedCase1  |
/// | yes      | some yes               | SimplyConnectedCase2  |
/// | yes      | all no (or none exist) | InfinitelyConnected   |
/// | otherwise                         | Undecided             |
pub fn verdict_from_evidence(critical: Ternary, extras: &[Ternary]) -> Verdict {
    match critical {
        Ternary::No => Verdict::SimplyConnectedCase1,
        Ternary::Undecided => Verdict::Undecided,
        Ternary::Yes => {
            if extras.contains(&Ternary::Yes) {
                Verdict::SimplyConnectedCase2
            } else if extras.iter().all(|&e| e == Ternary::No) {
                Verdict::InfinitelyConnected
            } else {
                Verdict::Undecided
            }
        }
    }
}

fn aggregate(extras: &[Ternary]) -> Ternary {
    if extras.contains(&Ternary::Yes) {
        Ternary::Yes
    } else if extras.iter().all(|&e| e == Ternary::No) {
        Ternary::No
    } else {
        Ternary::Undecided
    }
}

/// Decides whether the immediate basin of 1 under `O(n, alpha)` is simply
/// or infinitely connected, from the positions of the free critical point
/// nearest the positive real axis and of the preimages of 1 other than 1.
pub fn connectivity_probe<T: Real>(n: u32, alpha: Complex<T>, cfg: &ProbeConfig<T>) -> Result<ConnectivityVerdict> {
    if n >= 2 && degenerate_check(n, alpha) {
        return Err(Error::DegenerateParameter { n, alpha: to_c64(alpha), eps: DEGENERATE_EPS });
    }
    let spec = MapSpec::o(n, alpha)?;
    let critical = spec
        .free_critical_points()?
        .into_iter()
        .min_by(|a, b| a.arg().abs().partial_cmp(&b.arg().abs()).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::InvalidArgument("no free critical points".into()))?;

    let one = Complex::new(T::one(), T::zero());
    let fixed = spec.numerator() - spec.denominator();
    let extras = find_roots(&deflate(&fixed, one, 3)?)?.roots;

    let farthest = extras.iter().map(|z| z.norm()).fold(critical.norm().max(T::one()), T::max);
    let half = cfg.window_scale * farthest;
    let window = GridWindow::centered(Complex::new(T::zero(), T::zero()), half, cfg.resolution)?;
    let targets = roots_of_unity::<T>(n);
    let basin = ImmediateBasin::build(&spec, targets.clone(), 0, window, *cfg)?;

    let critical_in = basin.membership(critical)?;
    let mut checked = Vec::with_capacity(extras.len());
    for &z in &extras {
        checked.push((z, basin.membership(z)?));
    }
    let answers: Vec<Ternary> = checked.iter().map(|c| c.1).collect();
    let verdict = verdict_from_evidence(critical_in, &answers);

    let params = OrbitParams::new(cfg.max_iter, cfg.conv_tol);
    let critical_orbit = classify_orbit(&spec, ExtendedComplex::Finite(critical), &targets, &params).class();
    let critical_converges_elsewhere = matches!(critical_orbit, OutcomeClass::Root(k) if k != 0);

    let w = basin.grid.window;
    Ok(ConnectivityVerdict {
        n,
        alpha: to_c64(alpha),
        verdict,
        evidence: ProbeEvidence {
            critical_point: to_c64(critical),
            critical_in_immediate: critical_in,
            extra_preimage_in_immediate: aggregate(&answers),
            preimages_checked: checked.into_iter().map(|(z, t)| (to_c64(z), t)).collect(),
            critical_orbit,
            critical_converges_elsewhere,
            window: [w.re_min, w.re_max, w.im_min, w.im_max].map(|v| v.as_f64()),
            resolution: cfg.resolution,
        },
    })
}
