//! Stored energy, charging power and gain factors.
//!
//! Energies are `E / omega = |<mode>|^2`; for coherent drive on linear dynamics from
//! vacuum the mean amplitude carries the full occupation.

use serde::Serialize;

use crate::dynamics::{self, LinearSystem, SteadyState};
use crate::error::{Error, Result};
use crate::network::{build, Family, TopologyParams, Variant};
use crate::optimize::{scan_and_refine, Scale};

/// Ratios with a denominator below this are reported as undefined.
pub const RATIO_FLOOR: f64 = 1e-300;

/// Max-power scan: points, horizon in relaxation times, lower end in relaxation times.
pub const POWER_SCAN_POINTS: usize = 2000;
pub const POWER_HORIZON: f64 = 50.0;
pub const POWER_SCAN_START: f64 = 1e-6;
pub const POWER_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCurve {
    pub mode: String,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCurve {
    pub mode: String,
    pub times: Vec<f64>,
    pub power: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPower {
    pub t_star: f64,
    pub p_max: f64,
}

/// A network assembled and checked for stability, ready for repeated queries.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: LinearSystem,
    pub steady: SteadyState,
    pub abscissa: f64,
}

impl Scenario {
    pub fn new(params: &TopologyParams) -> Result<Self> {
        Self::from_system(dynamics::assemble(&build(params)?)?)
    }

    pub fn from_system(system: LinearSystem) -> Result<Self> {
        let stability = dynamics::is_stable(&system)?;
        if !stability.stable {
            return Err(Error::Unstable {
                abscissa: stability.abscissa,
            });
        }
        let steady = dynamics::steady_state(&system)?;
        Ok(Self {
            system,
            steady,
            abscissa: stability.abscissa,
        })
    }

    pub fn steady_energy(&self, target: &str) -> Result<f64> {
        Ok(self.steady.energy(self.system.index_of(target)?))
    }

    /// Energy of `row` at time `t` from vacuum: `|alpha_ss - (exp(M t) alpha_ss)_row|^2`.
    fn energy_at(&self, row: usize, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let u = dynamics::propagator(&self.system, t);
        let ss = &self.steady.amplitudes;
        let a = ss[row] - u.row(row).transpose().dot(ss);
        a.norm_sqr()
    }

    pub fn energy_curve(&self, target: &str, times: &[f64]) -> Result<EnergyCurve> {
        let row = self.system.index_of(target)?;
        check_times(times, false)?;
        Ok(EnergyCurve {
            mode: target.to_string(),
            times: times.to_vec(),
            energy: times.iter().map(|&t| self.energy_at(row, t)).collect(),
        })
    }

    pub fn power_curve(&self, target: &str, times: &[f64]) -> Result<PowerCurve> {
        let row = self.system.index_of(target)?;
        check_times(times, true)?;
        Ok(PowerCurve {
            mode: target.to_string(),
            times: times.to_vec(),
            power: times.iter().map(|&t| self.energy_at(row, t) / t).collect(),
        })
    }

    /// `max_t E(t) / t` over `(0, 50 / |abscissa|]`: logarithmic scan, golden refinement.
    pub fn max_power(&self, target: &str) -> Result<MaxPower> {
        let row = self.system.index_of(target)?;
        let t_relax = 1.0 / self.abscissa.abs();
        let m = scan_and_refine(
            |t| Ok(self.energy_at(row, t) / t),
            POWER_SCAN_START * t_relax,
            POWER_HORIZON * t_relax,
            POWER_SCAN_POINTS,
            Scale::Log,
            POWER_REL_TOL,
        )?;
        Ok(MaxPower {
            t_star: m.x,
            p_max: m.value,
        })
    }
}

fn check_times(times: &[f64], strictly_positive: bool) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time grid".into()));
    }
    if strictly_positive {
        if let Some(t) = times.iter().find(|&&t| t <= 0.0) {
            return Err(Error::Domain(format!("power needs t > 0, got {t}")));
        }
    } else if times.iter().any(|&t| t < 0.0) {
        return Err(Error::Domain("times must be >= 0".into()));
    }
    Ok(())
}

pub fn steady_energy(params: &TopologyParams, target: &str) -> Result<f64> {
    Scenario::new(params)?.steady_energy(target)
}

pub fn energy_curve(params: &TopologyParams, target: &str, times: &[f64]) -> Result<EnergyCurve> {
    Scenario::new(params)?.energy_curve(target, times)
}

pub fn power_curve(params: &TopologyParams, target: &str, times: &[f64]) -> Result<PowerCurve> {
    Scenario::new(params)?.power_curve(target, times)
}

pub fn max_power(params: &TopologyParams, target: &str) -> Result<MaxPower> {
    Scenario::new(params)?.max_power(target)
}

/// `num / den`, or `None` when the denominator is numerically zero.
pub fn gain_ratio(num: f64, den: f64) -> Option<f64> {
    if den.abs() < RATIO_FLOOR {
        None
    } else {
        Some(num / den)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerGains {
    pub nr: MaxPower,
    pub r1: MaxPower,
    pub r2: MaxPower,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainEntry {
    pub target: String,
    pub e_nr: f64,
    pub e_r1: f64,
    pub e_r2: f64,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub power: Option<PowerGains>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainReport {
    pub family: Family,
    pub n: usize,
    pub g_b: f64,
    pub gamma_c: f64,
    pub gamma_b: Vec<f64>,
    pub big_gamma: f64,
    pub entries: Vec<GainEntry>,
}

impl GainReport {
    pub fn entry(&self, target: &str) -> Option<&GainEntry> {
        self.entries.iter().find(|e| e.target == target)
    }
}

/// Steady energies (and optionally maximum powers) of the `nr`, `r1` and `r2` variants of
/// `base` and their ratios. Targets: `b_N` for cascaded, every battery for parallel.
pub fn gain_report(base: &TopologyParams, include_power: bool) -> Result<GainReport> {
    let targets = match base.family {
        Family::Cascaded => vec![base.terminal_battery()],
        Family::Parallel => base.battery_ids(),
    };
    let scenario = |v| Scenario::new(&base.with_variant(v));
    let (nr, (r1, r2)) = rayon::join(
        || scenario(Variant::Nr),
        || rayon::join(|| scenario(Variant::R1), || scenario(Variant::R2)),
    );
    let (nr, r1, r2) = (nr?, r1?, r2?);

    let entries = targets
        .into_iter()
        .map(|t| {
            let e_nr = nr.steady_energy(&t)?;
            let e_r1 = r1.steady_energy(&t)?;
            let e_r2 = r2.steady_energy(&t)?;
            let power = if include_power {
                let (p_nr, p_r1, p_r2) = (nr.max_power(&t)?, r1.max_power(&t)?, r2.max_power(&t)?);
                Some(PowerGains {
                    eta1: gain_ratio(p_nr.p_max, p_r1.p_max),
                    eta2: gain_ratio(p_nr.p_max, p_r2.p_max),
                    nr: p_nr,
                    r1: p_r1,
                    r2: p_r2,
                })
            } else {
                None
            };
            Ok(GainEntry {
                g1: gain_ratio(e_nr, e_r1),
                g2: gain_ratio(e_nr, e_r2),
                target: t,
                e_nr,
                e_r1,
                e_r2,
                power,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GainReport {
        family: base.family,
        n: base.n,
        g_b: base.g_b,
        gamma_c: base.gamma_c,
        gamma_b: base.gamma_b.clone(),
        big_gamma: base.big_gamma,
        entries,
    })
}

/// First grid time at which `energy` reaches `level`, if any.
pub fn first_crossing(curve: &EnergyCurve, level: f64) -> Option<f64> {
    curve
        .times
        .iter()
        .zip(&curve.energy)
        .find(|(_, &e)| e >= level)
        .map(|(&t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{CouplingSpec, DriveSpec, ModeSpec, NetworkSpec, Role};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn single(gamma: f64, xi: f64) -> Scenario {
        let spec = NetworkSpec {
            modes: vec![ModeSpec::new("c", Role::Charger, gamma)],
            couplings: vec![],
            drives: vec![DriveSpec {
                mode: "c".into(),
                amplitude: Complex64::new(xi, 0.0),
            }],
        };
        Scenario::from_system(dynamics::assemble(&spec).unwrap()).unwrap()
    }

    #[test]
    fn two_mode_steady_energy() {
        let p = TopologyParams::uniform(Family::Cascaded, Variant::R1, 1, 0.05, 0.1, 0.1, 1.0);
        assert_relative_eq!(steady_energy(&p, "b1").unwrap(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn cascaded_nr_three() {
        let p = TopologyParams::uniform(Family::Cascaded, Variant::Nr, 3, 0.01, 0.1, 0.1, 1.0);
        assert_relative_eq!(
            steady_energy(&p, "b3").unwrap(),
            0.205_675_618_697_970_4,
            max_relative = 1e-10
        );
    }

    #[test]
    fn undriven_is_empty() {
        let p = TopologyParams::uniform(Family::Parallel, Variant::Nr, 2, 0.01, 0.1, 0.1, 0.0);
        assert_eq!(steady_energy(&p, "b2").unwrap(), 0.0);
    }

    #[test]
    fn unknown_target() {
        let p = TopologyParams::uniform(Family::Parallel, Variant::Nr, 2, 0.01, 0.1, 0.1, 1.0);
        assert!(matches!(steady_energy(&p, "b7"), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn undamped_network_is_unstable() {
        let p = TopologyParams::uniform(Family::Cascaded, Variant::R1, 1, 0.05, 0.0, 0.1, 1.0);
        assert!(matches!(steady_energy(&p, "b1"), Err(Error::Unstable { .. })));
    }

    #[test]
    fn single_mode_energy_curve() {
        let (gamma, xi) = (0.1, 1.0);
        let s = single(gamma, xi);
        let times = [0.0, 3.0, 20.0, 100.0, 400.0];
        let curve = s.energy_curve("c", &times).unwrap();
        assert_eq!(curve.energy[0], 0.0);
        for (t, e) in times.iter().zip(&curve.energy) {
            let want = 4.0 * xi * xi / (gamma * gamma) * (1.0 - (-gamma * t / 2.0).exp()).powi(2);
            assert_relative_eq!(*e, want, max_relative = 1e-10, epsilon = 1e-300);
        }
    }

    #[test]
    fn single_mode_power() {
        let s = single(0.1, 1.0);
        let times = [0.5, 10.0, 25.0, 1e4];
        let p = s.power_curve("c", &times).unwrap();
        for (t, v) in times.iter().zip(&p.power) {
            let want = 400.0 * (1.0 - (-0.05 * t).exp()).powi(2) / t;
            assert_relative_eq!(*v, want, max_relative = 1e-10);
        }
        assert!(p.power[3] < 0.05);
        assert!(s.power_curve("c", &[0.0, 1.0]).is_err());

        // doubling the drive quadruples the power
        let s2 = single(0.1, 2.0);
        let p2 = s2.power_curve("c", &times).unwrap();
        for (a, b) in p.power.iter().zip(&p2.power) {
            assert_relative_eq!(*b, 4.0 * a, max_relative = 1e-12);
        }
    }

    #[test]
    fn single_mode_max_power() {
        // Oracle: t* = 2 u / gamma with 2u = e^u - 1; P_max = 2 xi^2 (1 - e^{-u})^2 / (u gamma).
        let u = 1.256_431_208_626_169_5_f64;
        for &gamma in &[0.1, 5e-4] {
            let m = single(gamma, 1.0).max_power("c").unwrap();
            assert_relative_eq!(m.t_star, 2.0 * u / gamma, max_relative = 1e-6);
            let pmax = 2.0 * (1.0 - (-u).exp()).powi(2) / (u * gamma);
            assert_relative_eq!(m.p_max, pmax, max_relative = 1e-12);
            assert_relative_eq!(m.p_max * gamma, 0.814_528_755_178_147_5, max_relative = 1e-10);
        }
    }

    #[test]
    fn max_power_below_steady_over_t() {
        let p = TopologyParams::uniform(Family::Cascaded, Variant::Nr, 2, 0.01, 0.1, 0.1, 1.0);
        let s = Scenario::new(&p).unwrap();
        let m = s.max_power("b2").unwrap();
        assert!(m.p_max <= s.steady_energy("b2").unwrap() / m.t_star);
    }

    #[test]
    fn ratio_helper() {
        assert_eq!(gain_ratio(3.5, 3.5), Some(1.0));
        assert_eq!(gain_ratio(1.0, 0.0), None);
    }

    #[test]
    fn parallel_gain_report() {
        let p = TopologyParams::uniform(Family::Parallel, Variant::Nr, 2, 0.01, 0.1, 0.1, 1.0);
        let r = gain_report(&p, false).unwrap();
        assert_eq!(r.entries.len(), 2);
        let e = r.entry("b1").unwrap();
        assert_relative_eq!(e.e_nr, 22.675_736_961_451_246, max_relative = 1e-10);
        assert_relative_eq!(e.e_r1, 13.717_421_124_828_535, max_relative = 1e-10);
        assert_relative_eq!(e.g1.unwrap(), 1.653, max_relative = 1e-3);
        assert!(e.power.is_none());
    }

    #[test]
    fn cascaded_gain_limit() {
        let p = TopologyParams::uniform(Family::Cascaded, Variant::Nr, 3, 1e-7, 0.1, 0.1, 1.0);
        let r = gain_report(&p, false).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_relative_eq!(r.entries[0].g1.unwrap(), 64.0, max_relative = 1e-3);
    }

    #[test]
    fn crossing_time() {
        let curve = EnergyCurve {
            mode: "b".into(),
            times: vec![0.0, 1.0, 2.0],
            energy: vec![0.0, 0.5, 1.0],
        };
        assert_eq!(first_crossing(&curve, 0.4), Some(1.0));
        assert_eq!(first_crossing(&curve, 2.0), None);
    }

    #[test]
    fn couplings_are_used() {
        // Sanity: an undriven battery coupled to a driven charger picks up energy.
        let spec = NetworkSpec {
            modes: vec![
                ModeSpec::new("c", Role::Charger, 0.1),
                ModeSpec::new("b", Role::Battery, 0.1),
            ],
            couplings: vec![CouplingSpec::new("c", "b", 0.02, 0.0)],
            drives: vec![DriveSpec {
                mode: "c".into(),
                amplitude: Complex64::new(1.0, 0.0),
            }],
        };
        let s = Scenario::from_system(dynamics::assemble(&spec).unwrap()).unwrap();
        assert!(s.steady_energy("b").unwrap() > 0.0);
    }
}
