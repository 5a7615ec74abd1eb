//! Directionality of triangle links and phase landscapes of stored energy.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::{effective_link, EffectiveLink};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::network::{
    matched_coupling, phasor, CouplingSpec, DriveSpec, ModeSpec, NetworkSpec, Role, TopologyParams, Variant,
};
use crate::observables::Scenario;

/// Relative spread under which landscape values count as tied for the maximum.
pub const TIE_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GRID: usize = 41;
pub const MIN_GRID: usize = 21;
const MAX_LANDSCAPE_POINTS: usize = 4_000_000;

/// How the indirect path of a charger-battery link is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndirectPath {
    /// Bare direct coupling.
    Absent,
    /// Intermediate coupled at `sqrt(g_b Gamma / 2)` on both sides.
    Matched,
    Couplings {
        g1: f64,
        g2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsolationResult {
    pub theta: f64,
    pub forward_t: f64,
    pub backward_t: f64,
    /// `forward_t / backward_t`; infinite when nothing flows back.
    pub ratio: f64,
}

impl IsolationResult {
    pub fn is_isolating(&self) -> bool {
        self.ratio.is_infinite()
    }
}

fn ratio(forward: f64, backward: f64) -> f64 {
    if backward == 0.0 {
        if forward == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        forward / backward
    }
}

/// Squared forward/backward effective link amplitudes.
///
/// For the matched triangle these are `2 g^2 (1 - sin theta)` and `2 g^2 (1 + sin theta)`.
pub fn isolation(theta: f64, g_b: f64, big_gamma: f64, path: IndirectPath) -> Result<IsolationResult> {
    if !(big_gamma > 0.0) || !big_gamma.is_finite() {
        return Err(Error::Domain(format!("Gamma must be > 0, got {big_gamma}")));
    }
    let (forward_t, backward_t) = match path {
        IndirectPath::Matched => {
            let s = phasor(theta).im;
            (2.0 * g_b * g_b * (1.0 - s), 2.0 * g_b * g_b * (1.0 + s))
        }
        IndirectPath::Absent => {
            let l = EffectiveLink::direct(theta, g_b);
            (l.forward_amp.norm_sqr(), l.backward_amp.norm_sqr())
        }
        IndirectPath::Couplings { g1, g2 } => {
            let l = effective_link(theta, g_b, g1, g2, big_gamma)?;
            (l.forward_amp.norm_sqr(), l.backward_amp.norm_sqr())
        }
    };
    Ok(IsolationResult {
        theta,
        forward_t,
        backward_t,
        ratio: ratio(forward_t, backward_t),
    })
}

/// Whether a matched triangle at `theta` transmits more forward than backward,
/// i.e. `theta` lies in `(-pi, 0)`.
pub fn window_check(theta: f64) -> bool {
    theta > -PI && theta < 0.0
}

/// Full-network drive-relocation probe on a single matched triangle `c - a - b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResult {
    pub theta: f64,
    /// Battery steady energy with the drive on the charger.
    pub forward: f64,
    /// Charger steady energy with the same drive moved to the battery.
    pub backward: f64,
    pub ratio: f64,
}

pub fn probe_triangle(
    theta: f64,
    g_b: f64,
    gamma_c: f64,
    gamma_b: f64,
    big_gamma: f64,
    xi: f64,
) -> Result<ProbeResult> {
    let g = matched_coupling(g_b, big_gamma)?;
    let triangle = |driven: &str| NetworkSpec {
        modes: vec![
            ModeSpec::new("c", Role::Charger, gamma_c),
            ModeSpec::new("a", Role::Intermediate, big_gamma),
            ModeSpec::new("b", Role::Battery, gamma_b),
        ],
        couplings: vec![
            CouplingSpec::new("c", "b", g_b, theta),
            CouplingSpec::new("c", "a", g, 0.0),
            CouplingSpec::new("a", "b", g, 0.0),
        ],
        drives: vec![DriveSpec {
            mode: driven.to_string(),
            amplitude: Complex64::new(xi, 0.0),
        }],
    };
    let fwd = Scenario::from_system(dynamics::assemble(&triangle("c"))?)?;
    let bwd = Scenario::from_system(dynamics::assemble(&triangle("b"))?)?;
    let forward = fwd.steady_energy("b")?;
    let backward = bwd.steady_energy("c")?;
    Ok(ProbeResult {
        theta,
        forward,
        backward,
        ratio: ratio(forward, backward),
    })
}

/// `points` phases `-pi + 2 pi (i + 1) / points`, covering `(-pi, pi]`.
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| match i + 1 {
            // Land on pi exactly so the grid stays inside (-pi, pi].
            k if k == points => PI,
            k => -PI + 2.0 * PI * k as f64 / points as f64,
        })
        .collect()
}

/// Steady energy of one battery over a regular grid of direct-coupling phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseLandscape {
    pub target: String,
    /// Phase samples shared by every axis.
    pub axis: Vec<f64>,
    /// One axis per direct coupling.
    pub dims: usize,
    /// Row-major over axes, first axis slowest.
    pub values: Vec<f64>,
    pub max: f64,
    /// Every grid phase tuple within [`TIE_TOLERANCE`] of the maximum.
    pub argmax: Vec<Vec<f64>>,
}

impl PhaseLandscape {
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let p = self.axis.len();
        let mut idx = flat;
        let mut out = vec![0.0; self.dims];
        for d in (0..self.dims).rev() {
            out[d] = self.axis[idx % p];
            idx /= p;
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluate the full-network steady energy of `target` at every phase tuple.
/// `params.variant` must be `custom` (triangles) or `r1` (bare links).
pub fn phase_landscape(params: &TopologyParams, target: &str, points: usize) -> Result<PhaseLandscape> {
    if !matches!(params.variant, Variant::Custom | Variant::R1) {
        return Err(Error::InvalidParams(format!(
            "phase landscape needs variant custom or r1, got {}",
            params.variant
        )));
    }
    if points < MIN_GRID {
        return Err(Error::InvalidParams(format!(
            "landscape grid needs >= {MIN_GRID} points per axis"
        )));
    }
    let dims = params.n;
    let total = (points as f64).powi(dims as i32);
    if total > MAX_LANDSCAPE_POINTS as f64 {
        return Err(Error::InvalidParams(format!(
            "landscape of {total:e} points is too large"
        )));
    }
    let total = total as usize;
    let axis = phase_grid(points);

    let proto = PhaseLandscape {
        target: target.to_string(),
        axis: axis.clone(),
        dims,
        values: Vec::new(),
        max: 0.0,
        argmax: Vec::new(),
    };
    let values = (0..total)
        .into_par_iter()
        .map(|flat| {
            let p = params.with_thetas(proto.point(flat));
            Scenario::new(&p)?.steady_energy(target)
        })
        .collect::<Result<Vec<f64>>>()?;

    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max - TIE_TOLERANCE * max.abs())
        .map(|(i, _)| proto.point(i))
        .collect();
    Ok(PhaseLandscape {
        values,
        max,
        argmax,
        ..proto
    })
}
