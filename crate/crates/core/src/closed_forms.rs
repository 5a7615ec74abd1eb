//! Analytic steady states.
//!
//! Setting an intermediate mode's time derivative to zero is exact at steady state, so
//! every triangle `upstream - a_k - battery` collapses into one directional link with
//! complex forward/backward amplitudes and extra damping on both ends. Chains of such
//! links are solved by a backward continued fraction, stars by a single fold into the
//! charger. Both routes are independent of the dense solver in [`crate::dynamics`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{battery_id, phasor, Family, TopologyParams, Variant, CHARGER};
use crate::optimize::{scan_and_refine, Maximum, Scale};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Effective coupling between two modes after eliminating a shared intermediate.
///
/// In the downstream equation the upstream amplitude enters with `forward_amp`; in the
/// upstream equation the downstream amplitude enters with `backward_amp`. Induced decays
/// are amplitude damping rates added to each end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLink {
    pub forward_amp: Complex64,
    pub backward_amp: Complex64,
    pub induced_decay_upstream: f64,
    pub induced_decay_downstream: f64,
}

impl EffectiveLink {
    /// Bare direct coupling `g e^{i theta}` with no intermediate.
    pub fn direct(theta: f64, g_b: f64) -> Self {
        let e = phasor(theta);
        Self {
            forward_amp: -I * e * g_b,
            backward_amp: -I * e.conj() * g_b,
            induced_decay_upstream: 0.0,
            induced_decay_downstream: 0.0,
        }
    }

    /// Triangle at matched coupling `g1 = g2 = sqrt(g_b Gamma / 2)`, where `2 g1 g2 / Gamma = g_b`.
    /// `Gamma` drops out entirely.
    pub fn matched(theta: f64, g_b: f64) -> Self {
        let e = phasor(theta);
        Self {
            forward_amp: -(Complex64::new(1.0, 0.0) + I * e) * g_b,
            backward_amp: -(Complex64::new(1.0, 0.0) + I * e.conj()) * g_b,
            induced_decay_upstream: g_b,
            induced_decay_downstream: g_b,
        }
    }
}

/// General triangle elimination.
pub fn effective_link(theta: f64, g_b: f64, g1: f64, g2: f64, big_gamma: f64) -> Result<EffectiveLink> {
    if !(big_gamma > 0.0) || !big_gamma.is_finite() {
        return Err(Error::Domain(format!("Gamma must be > 0, got {big_gamma}")));
    }
    let e = phasor(theta);
    let indirect = Complex64::new(2.0 * g1 * g2 / big_gamma, 0.0);
    Ok(EffectiveLink {
        forward_amp: -I * e * g_b - indirect,
        backward_amp: -I * e.conj() * g_b - indirect,
        induced_decay_upstream: 2.0 * g1 * g1 / big_gamma,
        induced_decay_downstream: 2.0 * g2 * g2 / big_gamma,
    })
}

/// Effective directional chain `c = x_0 -> x_1 -> ... -> x_N`.
///
/// `forward[k - 1]` / `backward[k - 1]` belong to the link between sites `k - 1` and `k`;
/// `decay[j]` is the total effective energy decay rate of site `j` (own loss plus twice
/// every induced amplitude damping).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLinkCoeffs {
    pub forward: Vec<Complex64>,
    pub backward: Vec<Complex64>,
    pub decay: Vec<f64>,
}

impl ChainLinkCoeffs {
    pub fn from_links(links: &[EffectiveLink], own_decay: &[f64]) -> Result<Self> {
        if own_decay.len() != links.len() + 1 {
            return Err(Error::Domain(format!(
                "{} links need {} site decays, got {}",
                links.len(),
                links.len() + 1,
                own_decay.len()
            )));
        }
        let mut decay = own_decay.to_vec();
        for (k, l) in links.iter().enumerate() {
            decay[k] += 2.0 * l.induced_decay_upstream;
            decay[k + 1] += 2.0 * l.induced_decay_downstream;
        }
        Ok(Self {
            forward: links.iter().map(|l| l.forward_amp).collect(),
            backward: links.iter().map(|l| l.backward_amp).collect(),
            decay,
        })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// Steady amplitudes `[x_0, ..., x_N]` of a driven directional chain.
///
/// Backward recursion `chi_N = decay_N / 2`,
/// `chi_k = decay_k / 2 - backward_{k+1} forward_{k+1} / chi_{k+1}`, then
/// `x_0 = -i xi / chi_0` and `x_k = forward_k x_{k-1} / chi_k`.
pub fn directional_chain_steady(coeffs: &ChainLinkCoeffs, xi: Complex64) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if coeffs.backward.len() != n || coeffs.decay.len() != n + 1 {
        return Err(Error::Domain("inconsistent chain coefficient lengths".into()));
    }
    let mut chi = vec![Complex64::new(0.0, 0.0); n + 1];
    chi[n] = Complex64::new(coeffs.decay[n] / 2.0, 0.0);
    check_pivot(chi[n], coeffs.decay[n] / 2.0, n)?;
    for k in (0..n).rev() {
        let fold = coeffs.backward[k] * coeffs.forward[k] / chi[k + 1];
        chi[k] = Complex64::new(coeffs.decay[k] / 2.0, 0.0) - fold;
        check_pivot(chi[k], coeffs.decay[k] / 2.0 + fold.norm(), k)?;
    }
    let mut x = Vec::with_capacity(n + 1);
    x.push(-I * xi / chi[0]);
    for k in 1..=n {
        let prev = x[k - 1];
        x.push(coeffs.forward[k - 1] * prev / chi[k]);
    }
    Ok(x)
}

/// Star of directional legs hanging off a driven centre.
#[derive(Debug, Clone, PartialEq)]
pub struct StarCoeffs {
    pub center_decay: f64,
    pub forward: Vec<Complex64>,
    pub backward: Vec<Complex64>,
    pub leg_decay: Vec<f64>,
}

impl StarCoeffs {
    pub fn from_links(links: &[EffectiveLink], center_own: f64, legs_own: &[f64]) -> Result<Self> {
        if legs_own.len() != links.len() {
            return Err(Error::Domain("one leg decay per link expected".into()));
        }
        Ok(Self {
            center_decay: center_own + links.iter().map(|l| 2.0 * l.induced_decay_upstream).sum::<f64>(),
            forward: links.iter().map(|l| l.forward_amp).collect(),
            backward: links.iter().map(|l| l.backward_amp).collect(),
            leg_decay: legs_own
                .iter()
                .zip(links)
                .map(|(g, l)| g + 2.0 * l.induced_decay_downstream)
                .collect(),
        })
    }
}

/// Steady amplitudes `[centre, leg_1, ..., leg_N]`.
pub fn directional_star_steady(coeffs: &StarCoeffs, xi: Complex64) -> Result<Vec<Complex64>> {
    let n = coeffs.forward.len();
    if coeffs.backward.len() != n || coeffs.leg_decay.len() != n {
        return Err(Error::Domain("inconsistent star coefficient lengths".into()));
    }
    let mut center = Complex64::new(coeffs.center_decay / 2.0, 0.0);
    let mut scale = coeffs.center_decay / 2.0;
    for k in 0..n {
        let half = Complex64::new(coeffs.leg_decay[k] / 2.0, 0.0);
        check_pivot(half, half.re, k + 1)?;
        let fold = coeffs.backward[k] * coeffs.forward[k] / half;
        center -= fold;
        scale += fold.norm();
    }
    check_pivot(center, scale, 0)?;
    let c = -I * xi / center;
    let mut x = Vec::with_capacity(n + 1);
    x.push(c);
    for k in 0..n {
        x.push(coeffs.forward[k] * c / (coeffs.leg_decay[k] / 2.0));
    }
    Ok(x)
}

fn check_pivot(chi: Complex64, scale: f64, site: usize) -> Result<()> {
    if !(chi.norm() > 4.0 * f64::EPSILON * scale) || !chi.re.is_finite() || !chi.im.is_finite() {
        return Err(Error::ResonantDivergence { site });
    }
    Ok(())
}

/// Effective links of a topology, one per battery, in battery order.
pub fn links_for(params: &TopologyParams) -> Result<Vec<EffectiveLink>> {
    params.validate()?;
    let phases = params.direct_phases()?;
    if params.variant.has_intermediates() && !(params.big_gamma > 0.0) {
        return Err(Error::Domain("intermediate modes need Gamma > 0".into()));
    }
    Ok(phases
        .iter()
        .map(|&theta| match params.variant {
            Variant::R1 => EffectiveLink::direct(theta, params.g_b),
            _ => EffectiveLink::matched(theta, params.g_b),
        })
        .collect())
}

pub fn chain_coeffs(params: &TopologyParams) -> Result<ChainLinkCoeffs> {
    if params.family != Family::Cascaded {
        return Err(Error::InvalidParams("chain coefficients need family = cascaded".into()));
    }
    let links = links_for(params)?;
    let mut own = Vec::with_capacity(params.n + 1);
    own.push(params.gamma_c);
    own.extend_from_slice(&params.gamma_b);
    ChainLinkCoeffs::from_links(&links, &own)
}

pub fn star_coeffs(params: &TopologyParams) -> Result<StarCoeffs> {
    if params.family != Family::Parallel {
        return Err(Error::InvalidParams("star coefficients need family = parallel".into()));
    }
    let links = links_for(params)?;
    StarCoeffs::from_links(&links, params.gamma_c, &params.gamma_b)
}

/// Closed-form steady amplitudes of the charger and every battery.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormState {
    pub ids: Vec<String>,
    pub amplitudes: Vec<Complex64>,
}

impl ClosedFormState {
    pub fn energy(&self, id: &str) -> Result<f64> {
        self.ids
            .iter()
            .position(|x| x == id)
            .map(|i| self.amplitudes[i].norm_sqr())
            .ok_or_else(|| Error::UnknownMode(id.to_string()))
    }
}

pub fn closed_form_steady(params: &TopologyParams) -> Result<ClosedFormState> {
    let amplitudes = match params.family {
        Family::Cascaded => directional_chain_steady(&chain_coeffs(params)?, params.xi)?,
        Family::Parallel => directional_star_steady(&star_coeffs(params)?, params.xi)?,
    };
    let mut ids = vec![CHARGER.to_string()];
    ids.extend((1..=params.n).map(battery_id));
    Ok(ClosedFormState { ids, amplitudes })
}

pub fn closed_form_energy(params: &TopologyParams, target: &str) -> Result<f64> {
    closed_form_steady(params)?.energy(target)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be > 0, got {x}")))
    }
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be >= 0, got {x}")))
    }
}

/// Terminal-battery energy of the isolating cascaded chain,
/// `[2^{2N+1} g^N xi / ((2g + gamma)^2 (4g + gamma)^{N-1})]^2`.
pub fn cascaded_nr_energy(n: usize, g_b: f64, gamma: f64, xi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    positive("gamma", gamma)?;
    non_negative("g_b", g_b)?;
    let n_i = n as i32;
    let amp =
        2f64.powi(2 * n_i + 1) * g_b.powi(n_i) * xi / ((2.0 * g_b + gamma).powi(2) * (4.0 * g_b + gamma).powi(n_i - 1));
    Ok(amp * amp)
}

/// Energy of battery `k` (1-based) in the reciprocal star,
/// `16 g^2 xi^2 / (gamma_k^2 (gamma_c + 4 g^2 sum_j 1/gamma_j)^2)`.
pub fn parallel_r1_energy(n: usize, g_b: f64, gamma_c: f64, gamma_b: &[f64], xi: f64, k: usize) -> Result<f64> {
    if n == 0 || gamma_b.len() != n {
        return Err(Error::Domain(format!(
            "need N >= 1 battery decays, got {}",
            gamma_b.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Domain(format!("battery index {k} outside 1..={n}")));
    }
    positive("gamma_c", gamma_c)?;
    for &g in gamma_b {
        positive("gamma_b", g)?;
    }
    non_negative("g_b", g_b)?;
    let load: f64 = gamma_b.iter().map(|g| 1.0 / g).sum();
    let denom = gamma_b[k - 1] * (gamma_c + 4.0 * g_b * g_b * load);
    Ok(16.0 * g_b * g_b * xi * xi / (denom * denom))
}

/// Energy of a battery with decay `gamma_b_k` in the isolating star,
/// `64 xi^2 g^2 / ((2g + gamma_k)^2 (2 N g + gamma_c)^2)`.
pub fn parallel_nr_energy(n: usize, g_b: f64, gamma_c: f64, gamma_b_k: f64, xi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    positive("gamma_c", gamma_c)?;
    positive("gamma_b", gamma_b_k)?;
    non_negative("g_b", g_b)?;
    let d = (2.0 * g_b + gamma_b_k) * (2.0 * n as f64 * g_b + gamma_c);
    Ok(64.0 * xi * xi * g_b * g_b / (d * d))
}

/// `[N + sqrt(N (8 + N))] gamma / 8`, the maximizer of the isolating cascaded energy.
pub fn g_opt_odd(n: usize, gamma: f64) -> Result<f64> {
    if n % 2 == 0 {
        return Err(Error::Domain(format!("N must be odd, got {n}")));
    }
    positive("gamma", gamma)?;
    let nf = n as f64;
    Ok((nf + (nf * (8.0 + nf)).sqrt()) * gamma / 8.0)
}

/// Weak-coupling estimate of `G_{N1}` at `x = g_b / gamma`.
pub fn gain_approx(family: Family, n: usize, x: f64) -> f64 {
    let nf = n as f64;
    match family {
        Family::Cascaded => (2f64.powi(n as i32) / (4.0 * nf * x + 1.0)).powi(2),
        Family::Parallel => (2.0 / ((2.0 * nf + 2.0) * x + 1.0)).powi(2),
    }
}

/// `(G_{N1}, G_{N2})` as `g_b -> 0`.
pub fn gain_bounds(family: Family, n: usize) -> (f64, f64) {
    match family {
        Family::Cascaded => (4f64.powi(n as i32), 2f64.powi(n as i32)),
        Family::Parallel => (4.0, 2.0),
    }
}

/// Bracket for coupling optimizations, in units of `gamma`.
pub const GB_SEARCH_RANGE: (f64, f64) = (1e-4, 10.0);
const GB_SCAN_POINTS: usize = 401;
const GB_REL_TOL: f64 = 1e-10;

/// Maximize `energy(g_b)` over `g_b / gamma` in [`GB_SEARCH_RANGE`].
pub fn maximize_over_gb<F>(energy: F, gamma: f64) -> Result<Maximum>
where
    F: Fn(f64) -> Result<f64>,
{
    positive("gamma", gamma)?;
    scan_and_refine(
        &energy,
        GB_SEARCH_RANGE.0 * gamma,
        GB_SEARCH_RANGE.1 * gamma,
        GB_SCAN_POINTS,
        Scale::Log,
        GB_REL_TOL,
    )
}

/// Maximum terminal energy of the reciprocal chain (continued fraction) over `g_b`.
pub fn cascaded_r1_max(n: usize, gamma: f64, xi: f64) -> Result<Maximum> {
    let base = TopologyParams::uniform(Family::Cascaded, Variant::R1, n, 0.0, gamma, gamma, xi);
    let target = battery_id(n);
    maximize_over_gb(|g| closed_form_energy(&base.with_g_b(g), &target), gamma)
}

pub fn cascaded_nr_max(n: usize, gamma: f64, xi: f64) -> Result<Maximum> {
    maximize_over_gb(|g| cascaded_nr_energy(n, g, gamma, xi), gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogFitRow {
    pub n: usize,
    pub g_opt_nr: f64,
    pub e_max_nr: f64,
    pub g_opt_r1: f64,
    pub e_max_r1: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogFit {
    /// Least-squares `k` in `ratio ~ 1 + k ln N`.
    pub k: f64,
    pub rows: Vec<LogFitRow>,
}

/// Ratio of optimized isolating to optimized reciprocal terminal energy per odd `N`,
/// and the one-parameter fit `1 + k ln N`. The ratio does not depend on `gamma` or `xi`.
pub fn logfit_ratio(odd_ns: &[usize], gamma: f64) -> Result<LogFit> {
    if odd_ns.len() < 3 {
        return Err(Error::Domain("log fit needs at least 3 values of N".into()));
    }
    if let Some(n) = odd_ns.iter().find(|&&n| n % 2 == 0) {
        return Err(Error::Domain(format!("log fit takes odd N only, got {n}")));
    }
    let rows = odd_ns
        .iter()
        .map(|&n| {
            let nr = cascaded_nr_max(n, gamma, 1.0)?;
            let r1 = cascaded_r1_max(n, gamma, 1.0)?;
            Ok(LogFitRow {
                n,
                g_opt_nr: nr.x,
                e_max_nr: nr.value,
                g_opt_r1: r1.x,
                e_max_r1: r1.value,
                ratio: nr.value / r1.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (num, den) = rows.iter().fold((0.0, 0.0), |(num, den), r| {
        let l = (r.n as f64).ln();
        (num + l * (r.ratio - 1.0), den + l * l)
    });
    if den == 0.0 {
        return Err(Error::Domain("log fit needs some N > 1".into()));
    }
    Ok(LogFit { k: num / den, rows })
}
