//! First-moment linear dynamics `d alpha/dt = M alpha + d` of a mode network.
//!
//! For a coupling `(source -> target, g, theta)` the target row gains
//! `-i g e^{i theta}` in the source column and the source row gains
//! `-i g e^{-i theta}` in the target column. Mode `m` contributes
//! `-i detuning - decay/2` on the diagonal, and a drive `xi` on `m` contributes
//! `-i xi` to `d`. Hence `M + M^dagger = -diag(decay)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{self, Tolerance};
use crate::network::{phasor, NetworkSpec};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

/// Condition estimates above this refuse a steady state.
pub const MAX_CONDITION: f64 = 1e12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct LinearSystem {
    matrix: CMat,
    drive: CVec,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    decay: Vec<f64>,
}

impl LinearSystem {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn drive(&self) -> &CVec {
        &self.drive
    }

    pub fn dim(&self) -> usize {
        self.ids.len()
    }

    /// Mode ids in row order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn decay_rates(&self) -> &[f64] {
        &self.decay
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownMode(id.to_string()))
    }

    /// Same system with the drive vector scaled by `factor`.
    pub fn with_drive_scaled(&self, factor: Complex64) -> Self {
        Self {
            drive: &self.drive * factor,
            ..self.clone()
        }
    }

    fn rhs(&self, y: &CVec) -> CVec {
        &self.matrix * y + &self.drive
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub amplitudes: CVec,
    /// `||M alpha + d||`.
    pub residual: f64,
    /// 1-norm condition estimate of `M`.
    pub condition: f64,
}

impl SteadyState {
    pub fn energy(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<CVec>,
}

impl Trajectory {
    /// Amplitude of row `index` at every time.
    pub fn series(&self, index: usize) -> Vec<Complex64> {
        self.amplitudes.iter().map(|a| a[index]).collect()
    }

    /// Largest entrywise amplitude difference to another trajectory on the same grid.
    pub fn max_discrepancy(&self, other: &Trajectory) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// Largest real part among the eigenvalues of `M`.
    pub abscissa: f64,
}

pub fn assemble(spec: &NetworkSpec) -> Result<LinearSystem> {
    spec.check()?;
    let n = spec.modes.len();
    let ids: Vec<String> = spec.modes.iter().map(|m| m.id.clone()).collect();
    let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

    let mut matrix = CMat::zeros(n, n);
    for (i, m) in spec.modes.iter().enumerate() {
        matrix[(i, i)] = Complex64::new(-m.decay_rate / 2.0, -m.detuning);
    }
    for c in &spec.couplings {
        let s = index[&c.source];
        let t = index[&c.target];
        let e = phasor(c.phase);
        matrix[(t, s)] += -I * e * c.strength;
        matrix[(s, t)] += -I * e.conj() * c.strength;
    }
    let mut drive = CVec::zeros(n);
    for d in &spec.drives {
        drive[index[&d.mode]] += -I * d.amplitude;
    }
    let decay = spec.modes.iter().map(|m| m.decay_rate).collect();
    Ok(LinearSystem {
        matrix,
        drive,
        ids,
        index,
        decay,
    })
}

/// Solve `M alpha = -d` by LU with one round of iterative refinement.
pub fn steady_state(sys: &LinearSystem) -> Result<SteadyState> {
    let m = &sys.matrix;
    let lu = m.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(m) * norm1(&inverse);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    let rhs = -&sys.drive;
    let mut x = lu.solve(&rhs).ok_or(Error::Singular { condition })?;
    let r = &rhs - m * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let residual = (m * &x + &sys.drive).norm();
    let limit = 1e-10 * sys.drive.norm().max(1.0);
    if !(residual <= limit) {
        return Err(Error::Numeric(format!(
            "steady-state residual {residual:.3e} exceeds {limit:.3e}"
        )));
    }
    Ok(SteadyState {
        amplitudes: x,
        residual,
        condition,
    })
}

/// Spectral abscissa of `M` and whether it is negative.
pub fn is_stable(sys: &LinearSystem) -> Result<Stability> {
    let eig = eigenvalues(&sys.matrix)?;
    let abscissa = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    // Eigenvalues of a non-normal matrix are only resolved to about eps * ||M||.
    let slack = 64.0 * f64::EPSILON * sys.matrix.norm();
    Ok(Stability {
        stable: abscissa < -slack,
        abscissa,
    })
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("dynamics matrix".into()));
    }
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let n = m.nrows();
    let diag = |t: CMat| (0..n).map(|i| t[(i, i)]).collect::<Vec<_>>();
    let schur = |a: CMat| Schur::try_new(a, f64::EPSILON, SCHUR_MAX_ITER).map(|s| s.unpack().1);
    if let Some(t) = schur(m.clone()) {
        return Ok(diag(t));
    }
    // The shifted QR iteration can stall on highly symmetric inputs (uniform decay,
    // exact phase cancellations). Retry on similar matrices with the same spectrum.
    for seed in 1..=2 {
        let h = reflector(n, seed);
        if let Some(t) = schur(&h * m * &h) {
            return Ok(diag(t));
        }
    }
    let shift = Complex64::new(0.3, 0.7) * m.norm();
    if let Some(t) = schur(m + CMat::identity(n, n) * shift) {
        return Ok(diag(t).into_iter().map(|z| z - shift).collect());
    }
    Err(Error::Numeric("Schur decomposition did not converge".into()))
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Householder reflector `I - 2 v v^dagger` from a fixed dense unit vector.
fn reflector(n: usize, seed: usize) -> CMat {
    let s = seed as f64;
    let v = CVec::from_fn(n, |i, _| {
        let x = i as f64;
        Complex64::new(1.0 + 0.37 * s * x, 0.11 * (x * x) - 0.23 * s)
    });
    let v = &v / Complex64::new(v.norm(), 0.0);
    CMat::identity(n, n) - (&v * v.adjoint()) * Complex64::new(2.0, 0.0)
}

/// `exp(M t)`; scaling and squaring with a degree-13 Pade approximant at most.
pub fn propagator(sys: &LinearSystem, t: f64) -> CMat {
    (&sys.matrix * Complex64::new(t, 0.0)).exp()
}

/// Amplitudes at each time from `initial`, using the exact propagator
/// `alpha(t) = alpha_ss + exp(M t) (alpha(0) - alpha_ss)`. Falls back to the adaptive
/// integrator when no unique steady state exists.
pub fn evolve(sys: &LinearSystem, initial: &CVec, times: &[f64]) -> Result<Trajectory> {
    check_evolve_inputs(sys, initial, times)?;
    let ss = match steady_state(sys) {
        Ok(ss) => ss,
        Err(Error::Singular { .. }) => return evolve_integrated(sys, initial, times, Tolerance::default()),
        Err(e) => return Err(e),
    };
    let offset = initial - &ss.amplitudes;
    let amplitudes = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                initial.clone()
            } else {
                &ss.amplitudes + propagator(sys, t) * &offset
            }
        })
        .collect();
    Ok(Trajectory {
        times: times.to_vec(),
        amplitudes,
    })
}

/// Same contract as [`evolve`] but always through the Dormand-Prince integrator.
pub fn evolve_integrated(sys: &LinearSystem, initial: &CVec, times: &[f64], tol: Tolerance) -> Result<Trajectory> {
    check_evolve_inputs(sys, initial, times)?;
    let amplitudes = integrator::integrate(|_, y| sys.rhs(y), 0.0, initial, times, tol)?;
    Ok(Trajectory {
        times: times.to_vec(),
        amplitudes,
    })
}

fn check_evolve_inputs(sys: &LinearSystem, initial: &CVec, times: &[f64]) -> Result<()> {
    if initial.len() != sys.dim() {
        return Err(Error::Domain(format!(
            "initial state has {} entries, system has {} modes",
            initial.len(),
            sys.dim()
        )));
    }
    if initial.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("initial state".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time grid".into()));
    }
    if times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Domain("times must be >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Vacuum initial state for `sys`.
pub fn vacuum(sys: &LinearSystem) -> CVec {
    CVec::zeros(sys.dim())
}

fn norm1(m: &CMat) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
