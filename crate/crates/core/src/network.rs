//! Declarative mode networks and the cascaded / parallel charging topologies.
//!
//! A [`NetworkSpec`] lists bosonic modes (charger, batteries, lossy intermediates),
//! phased beam-splitter couplings and coherent drives. The builders turn a compact
//! [`TopologyParams`] bundle into such a network:
//!
//! * `r1`: direct couplings only (charger-battery, battery-battery).
//! * `r2`: each direct link is closed into a triangle by an intermediate mode `a_k`
//!   coupled at the matched strength `sqrt(g_b * Gamma / 2)`, with zero direct phase.
//! * `nr`: as `r2` with every direct phase set to `-pi/2`, the isolating flux.
//! * `custom`: as `r2` with caller-supplied direct phases.
//!
//! All rates are in units of the mode frequency; energies come out as `E / omega`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub const CHARGER: &str = "c";

pub fn battery_id(k: usize) -> String {
    format!("b{k}")
}

pub fn intermediate_id(k: usize) -> String {
    format!("a{k}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Charger,
    Battery,
    Intermediate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub id: String,
    pub role: Role,
    /// Energy decay rate; the amplitude decays at half this rate.
    pub decay_rate: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub detuning: f64,
}

impl ModeSpec {
    pub fn new(id: impl Into<String>, role: Role, decay_rate: f64) -> Self {
        Self {
            id: id.into(),
            role,
            decay_rate,
            detuning: 0.0,
        }
    }
}

/// Hamiltonian term `strength * e^{i phase} * source * target^dagger + h.c.`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub source: String,
    pub target: String,
    pub strength: f64,
    #[serde(default)]
    pub phase: f64,
}

impl CouplingSpec {
    pub fn new(source: impl Into<String>, target: impl Into<String>, strength: f64, phase: f64) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            strength,
            phase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub mode: String,
    /// Serialized as `[re, im]`.
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub modes: Vec<ModeSpec>,
    #[serde(default)]
    pub couplings: Vec<CouplingSpec>,
    #[serde(default)]
    pub drives: Vec<DriveSpec>,
}

impl NetworkSpec {
    pub fn mode(&self, id: &str) -> Option<&ModeSpec> {
        self.modes.iter().find(|m| m.id == id)
    }

    pub fn battery_ids(&self) -> Vec<String> {
        self.modes
            .iter()
            .filter(|m| m.role == Role::Battery)
            .map(|m| m.id.clone())
            .collect()
    }

    /// Fails with [`Error::Validation`] carrying every violation found.
    pub fn check(&self) -> Result<()> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cascaded,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    R1,
    R2,
    Nr,
    Custom,
}

impl Variant {
    pub fn has_intermediates(self) -> bool {
        !matches!(self, Variant::R1)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cascaded => "cascaded",
            Family::Parallel => "parallel",
        })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::R1 => "r1",
            Variant::R2 => "r2",
            Variant::Nr => "nr",
            Variant::Custom => "custom",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cascaded" => Ok(Family::Cascaded),
            "parallel" => Ok(Family::Parallel),
            _ => Err(Error::InvalidParams(format!("unknown family `{s}`"))),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r1" => Ok(Variant::R1),
            "r2" => Ok(Variant::R2),
            "nr" => Ok(Variant::Nr),
            "custom" => Ok(Variant::Custom),
            _ => Err(Error::InvalidParams(format!("unknown variant `{s}`"))),
        }
    }
}

/// Parameter bundle for one charging scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyParams {
    pub family: Family,
    pub variant: Variant,
    pub n: usize,
    pub g_b: f64,
    pub gamma_c: f64,
    pub gamma_b: Vec<f64>,
    /// Decay rate of every intermediate mode.
    pub big_gamma: f64,
    pub xi: Complex64,
    /// Direct-coupling phases. Read for `custom` (required) and `r1` (optional, default 0).
    pub thetas: Option<Vec<f64>>,
}

impl TopologyParams {
    /// Uniform decay `gamma` on charger and batteries.
    pub fn uniform(family: Family, variant: Variant, n: usize, g_b: f64, gamma: f64, big_gamma: f64, xi: f64) -> Self {
        Self {
            family,
            variant,
            n,
            g_b,
            gamma_c: gamma,
            gamma_b: vec![gamma; n],
            big_gamma,
            xi: Complex64::new(xi, 0.0),
            thetas: None,
        }
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn with_g_b(&self, g_b: f64) -> Self {
        Self { g_b, ..self.clone() }
    }

    pub fn with_thetas(&self, thetas: Vec<f64>) -> Self {
        Self {
            thetas: Some(thetas),
            ..self.clone()
        }
    }

    /// Terminal battery `b_N`.
    pub fn terminal_battery(&self) -> String {
        battery_id(self.n)
    }

    pub fn battery_ids(&self) -> Vec<String> {
        (1..=self.n).map(battery_id).collect()
    }

    /// Phases actually placed on the direct couplings.
    pub fn direct_phases(&self) -> Result<Vec<f64>> {
        match self.variant {
            Variant::R2 => Ok(vec![0.0; self.n]),
            Variant::Nr => Ok(vec![-FRAC_PI_2; self.n]),
            Variant::R1 => Ok(self
                .thetas
                .as_ref()
                .map(|t| t.iter().copied().map(wrap_phase).collect())
                .unwrap_or_else(|| vec![0.0; self.n])),
            Variant::Custom => match &self.thetas {
                Some(t) => Ok(t.iter().copied().map(wrap_phase).collect()),
                None => Err(Error::InvalidParams("variant `custom` requires thetas".into())),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n == 0 {
            return bad("battery count N must be at least 1".into());
        }
        let rate_ok = |x: f64| x.is_finite() && x >= 0.0;
        if !rate_ok(self.g_b) {
            return bad(format!("g_b must be finite and >= 0, got {}", self.g_b));
        }
        if !rate_ok(self.gamma_c) {
            return bad(format!("gamma_c must be finite and >= 0, got {}", self.gamma_c));
        }
        if self.gamma_b.len() != self.n {
            return bad(format!(
                "gamma_b has {} entries, expected N = {}",
                self.gamma_b.len(),
                self.n
            ));
        }
        if let Some(x) = self.gamma_b.iter().find(|x| !rate_ok(**x)) {
            return bad(format!("gamma_b entries must be finite and >= 0, got {x}"));
        }
        if !rate_ok(self.big_gamma) {
            return bad(format!("Gamma must be finite and >= 0, got {}", self.big_gamma));
        }
        if !(self.xi.re.is_finite() && self.xi.im.is_finite()) {
            return bad("drive amplitude must be finite".into());
        }
        if let Some(t) = &self.thetas {
            if t.len() != self.n {
                return bad(format!("thetas has {} entries, expected N = {}", t.len(), self.n));
            }
            if t.iter().any(|x| !x.is_finite()) {
                return bad("thetas must be finite".into());
            }
        }
        if self.variant == Variant::Custom && self.thetas.is_none() {
            return bad("variant `custom` requires thetas".into());
        }
        Ok(())
    }
}

/// Strength of both intermediate couplings that makes the indirect path
/// cancel the direct one at the isolating phase.
pub fn matched_coupling(g_b: f64, big_gamma: f64) -> Result<f64> {
    if !(big_gamma > 0.0) || !big_gamma.is_finite() {
        return Err(Error::Domain(format!("Gamma must be > 0, got {big_gamma}")));
    }
    if !(g_b >= 0.0) || !g_b.is_finite() {
        return Err(Error::Domain(format!("g_b must be >= 0, got {g_b}")));
    }
    Ok((g_b * big_gamma / 2.0).sqrt())
}

/// Wrap a phase into `(-pi, pi]`.
pub fn wrap_phase(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// `e^{i theta}`, exact at multiples of `pi/2`.
///
/// `cos(pi/2)` is `6e-17` in floating point, which would leave a residual backward
/// amplitude at the isolating phase.
pub fn phasor(theta: f64) -> Complex64 {
    let t = wrap_phase(theta);
    if t == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if t == FRAC_PI_2 {
        Complex64::new(0.0, 1.0)
    } else if t == -FRAC_PI_2 {
        Complex64::new(0.0, -1.0)
    } else if t == PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::new(t.cos(), t.sin())
    }
}

pub fn build(params: &TopologyParams) -> Result<NetworkSpec> {
    match params.family {
        Family::Cascaded => build_cascaded(params),
        Family::Parallel => build_parallel(params),
    }
}

pub fn build_cascaded(params: &TopologyParams) -> Result<NetworkSpec> {
    if params.family != Family::Cascaded {
        return Err(Error::InvalidParams("build_cascaded needs family = cascaded".into()));
    }
    build_with(params, |k| if k == 1 { CHARGER.to_string() } else { battery_id(k - 1) })
}

pub fn build_parallel(params: &TopologyParams) -> Result<NetworkSpec> {
    if params.family != Family::Parallel {
        return Err(Error::InvalidParams("build_parallel needs family = parallel".into()));
    }
    build_with(params, |_| CHARGER.to_string())
}

/// Shared builder; `upstream(k)` names the mode feeding battery `k`.
fn build_with(params: &TopologyParams, upstream: impl Fn(usize) -> String) -> Result<NetworkSpec> {
    params.validate()?;
    let phases = params.direct_phases()?;
    let n = params.n;

    let mut modes = Vec::with_capacity(2 * n + 1);
    modes.push(ModeSpec::new(CHARGER, Role::Charger, params.gamma_c));
    for k in 1..=n {
        modes.push(ModeSpec::new(battery_id(k), Role::Battery, params.gamma_b[k - 1]));
    }

    let mut couplings = Vec::with_capacity(3 * n);
    for k in 1..=n {
        couplings.push(CouplingSpec::new(upstream(k), battery_id(k), params.g_b, phases[k - 1]));
    }

    if params.variant.has_intermediates() {
        let g = matched_coupling(params.g_b, params.big_gamma)?;
        for k in 1..=n {
            modes.push(ModeSpec::new(intermediate_id(k), Role::Intermediate, params.big_gamma));
        }
        for k in 1..=n {
            couplings.push(CouplingSpec::new(upstream(k), intermediate_id(k), g, 0.0));
            couplings.push(CouplingSpec::new(intermediate_id(k), battery_id(k), g, 0.0));
        }
    }

    let spec = NetworkSpec {
        modes,
        couplings,
        drives: vec![DriveSpec {
            mode: CHARGER.to_string(),
            amplitude: params.xi,
        }],
    };
    debug_assert!(validate(&spec).is_empty());
    Ok(spec)
}

/// Every invariant violation in `spec`; empty means well-formed.
pub fn validate(spec: &NetworkSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.modes.is_empty() {
        out.push(Violation::new("network", "has no modes"));
    }

    let mut seen: HashMap<&str, usize> = HashMap::new();
    for m in &spec.modes {
        let count = seen.entry(m.id.as_str()).or_insert(0);
        *count += 1;
        if *count == 2 {
            out.push(Violation::new(format!("mode \"{}\"", m.id), "duplicate mode id"));
        }
        if m.id.is_empty() {
            out.push(Violation::new("mode \"\"", "empty mode id"));
        }
        if !(m.decay_rate.is_finite() && m.decay_rate >= 0.0) {
            out.push(Violation::new(
                format!("mode \"{}\"", m.id),
                format!("decay rate must be finite and >= 0, got {}", m.decay_rate),
            ));
        }
        if !m.detuning.is_finite() {
            out.push(Violation::new(format!("mode \"{}\"", m.id), "detuning must be finite"));
        }
    }

    let mut pairs: HashSet<(&str, &str)> = HashSet::new();
    for c in &spec.couplings {
        let name = format!("coupling {}->{}", c.source, c.target);
        for end in [&c.source, &c.target] {
            if !seen.contains_key(end.as_str()) {
                out.push(Violation::new(
                    name.clone(),
                    format!("references missing mode \"{end}\""),
                ));
            }
        }
        if c.source == c.target {
            out.push(Violation::new(name.clone(), "source and target are the same mode"));
        }
        if !(c.strength.is_finite() && c.strength >= 0.0) {
            out.push(Violation::new(
                name.clone(),
                format!("strength must be finite and >= 0, got {}", c.strength),
            ));
        }
        if !(c.phase.is_finite() && c.phase > -PI && c.phase <= PI) {
            out.push(Violation::new(
                name.clone(),
                format!("phase must lie in (-pi, pi], got {}", c.phase),
            ));
        }
        let key = if c.source <= c.target {
            (c.source.as_str(), c.target.as_str())
        } else {
            (c.target.as_str(), c.source.as_str())
        };
        if !pairs.insert(key) {
            out.push(Violation::new(name, "mode pair is already coupled"));
        }
    }

    for d in &spec.drives {
        let name = format!("drive on \"{}\"", d.mode);
        if !seen.contains_key(d.mode.as_str()) {
            out.push(Violation::new(
                name.clone(),
                format!("references missing mode \"{}\"", d.mode),
            ));
        }
        if !(d.amplitude.re.is_finite() && d.amplitude.im.is_finite()) {
            out.push(Violation::new(name, "amplitude must be finite"));
        }
    }
    out
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(family: Family, variant: Variant, n: usize) -> TopologyParams {
        TopologyParams::uniform(family, variant, n, 0.01, 0.1, 0.1, 1.0)
    }

    #[test]
    fn cascaded_r1_counts() {
        let s = build_cascaded(&params(Family::Cascaded, Variant::R1, 2)).unwrap();
        assert_eq!((s.modes.len(), s.couplings.len(), s.drives.len()), (3, 2, 1));
        assert_eq!(s.couplings[1].source, "b1");
        assert_eq!(s.couplings[1].target, "b2");
    }

    #[test]
    fn cascaded_nr_counts() {
        let s = build_cascaded(&params(Family::Cascaded, Variant::Nr, 3)).unwrap();
        assert_eq!(s.modes.len(), 7);
        assert_eq!(s.couplings.len(), 9);
        assert!(validate(&s).is_empty());
    }

    #[test]
    fn intermediate_strength_is_matched() {
        let s = build_cascaded(&params(Family::Cascaded, Variant::Nr, 1)).unwrap();
        for c in s.couplings.iter().filter(|c| c.source == "a1" || c.target == "a1") {
            assert_relative_eq!(c.strength, 0.022_360_679_774_997_9, max_relative = 1e-12);
            assert_eq!(c.phase, 0.0);
        }
    }

    #[test]
    fn parallel_counts() {
        let s = build_parallel(&params(Family::Parallel, Variant::R1, 3)).unwrap();
        assert_eq!((s.modes.len(), s.couplings.len()), (4, 3));
        assert!(s.couplings.iter().all(|c| c.source == CHARGER));

        let s = build_parallel(&params(Family::Parallel, Variant::Nr, 2)).unwrap();
        assert_eq!((s.modes.len(), s.couplings.len()), (5, 6));
        let ind: Vec<f64> = s
            .couplings
            .iter()
            .filter(|c| c.source.starts_with('a') || c.target.starts_with('a'))
            .map(|c| c.strength)
            .collect();
        assert_eq!(ind.len(), 4);
        assert!(ind.iter().all(|&g| g == ind[0]));
    }

    #[test]
    fn custom_phases_pass_through() {
        let p = params(Family::Parallel, Variant::Custom, 2).with_thetas(vec![FRAC_PI_2, -FRAC_PI_2]);
        let s = build_parallel(&p).unwrap();
        assert_eq!(s.couplings[0].phase, FRAC_PI_2);
        assert_eq!(s.couplings[1].phase, -FRAC_PI_2);
    }

    #[test]
    fn custom_without_thetas_is_rejected() {
        let p = params(Family::Cascaded, Variant::Custom, 2);
        assert!(matches!(build(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn invalid_params() {
        let mut p = params(Family::Cascaded, Variant::R1, 1);
        p.n = 0;
        p.gamma_b.clear();
        assert!(matches!(build(&p), Err(Error::InvalidParams(_))));

        let mut p = params(Family::Cascaded, Variant::R1, 2);
        p.gamma_c = -0.1;
        assert!(build(&p).is_err());

        // wrong builder for the family
        let p = params(Family::Parallel, Variant::R1, 2);
        assert!(build_cascaded(&p).is_err());
    }

    #[test]
    fn matched_coupling_values() {
        assert_relative_eq!(matched_coupling(0.01, 0.1).unwrap(), 0.0223607, max_relative = 1e-6);
        assert_eq!(matched_coupling(0.0, 0.3).unwrap(), 0.0);
        assert_relative_eq!(matched_coupling(5e-5, 1.0).unwrap(), 0.005, max_relative = 1e-12);
        assert!(matches!(matched_coupling(0.01, 0.0), Err(Error::Domain(_))));
        assert!(matches!(matched_coupling(0.01, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_reports_problems() {
        let good = build(&params(Family::Cascaded, Variant::R1, 2)).unwrap();
        assert!(validate(&good).is_empty());

        let mut dup = good.clone();
        dup.modes.push(ModeSpec::new("b1", Role::Battery, 0.1));
        let v = validate(&dup);
        assert_eq!(v.len(), 1);
        assert!(v[0].element.contains("b1"));

        let mut missing = good.clone();
        missing.couplings.push(CouplingSpec::new("b2", "b9", 0.1, 0.0));
        let v = validate(&missing);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("b9"));

        let mut pair = good.clone();
        pair.couplings.push(CouplingSpec::new("b1", "c", 0.1, 0.0));
        assert_eq!(validate(&pair).len(), 1);

        let empty = NetworkSpec {
            modes: vec![],
            couplings: vec![],
            drives: vec![],
        };
        assert_eq!(validate(&empty).len(), 1);
    }

    #[test]
    fn phasor_is_exact_on_quadrants() {
        assert_eq!(phasor(-FRAC_PI_2), Complex64::new(0.0, -1.0));
        assert_eq!(phasor(FRAC_PI_2), Complex64::new(0.0, 1.0));
        assert_eq!(phasor(PI), Complex64::new(-1.0, 0.0));
        assert_eq!(phasor(-PI), Complex64::new(-1.0, 0.0));
        let z = phasor(0.3);
        assert_relative_eq!(z.re, 0.3f64.cos());
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(-PI), PI);
        assert_eq!(wrap_phase(PI), PI);
        assert_relative_eq!(wrap_phase(3.0 * PI / 2.0), -FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(wrap_phase(-FRAC_PI_2), -FRAC_PI_2);
    }

    #[test]
    fn network_json_round_trip() {
        let s = build(&params(Family::Parallel, Variant::Nr, 2)).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: NetworkSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        assert!(serde_json::from_str::<NetworkSpec>(r#"{"modes":[],"extra":1}"#).is_err());
    }
}
