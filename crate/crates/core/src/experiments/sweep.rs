//! One-parameter sweeps of a topology driven by a [`RunConfig`].

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{Observable, RunConfig, SweepConfig, SweepVariable};
use super::table::SweepTable;
use crate::error::{Error, Result};
use crate::network::{build, Family, TopologyParams, Variant};
use crate::observables::{gain_ratio, Scenario};
use crate::optimize::grid;

/// Alias for the terminal battery, stable across `N` sweeps.
pub const TERMINAL: &str = "bN";

/// Targets to report: the configured list, else `b_N` for cascaded and every battery
/// for parallel (only `b_N` when `N` itself is swept).
pub fn resolve_targets(targets: &[String], params: &TopologyParams, sweeping_n: bool) -> Vec<String> {
    if !targets.is_empty() {
        return targets.to_vec();
    }
    match (params.family, sweeping_n) {
        (Family::Parallel, false) => params.battery_ids(),
        (_, true) => vec![TERMINAL.to_string()],
        (Family::Cascaded, false) => vec![params.terminal_battery()],
    }
}

fn resolve(target: &str, params: &TopologyParams) -> String {
    if target == TERMINAL {
        params.terminal_battery()
    } else {
        target.to_string()
    }
}

/// `base` with the swept variable set to `v`.
pub fn params_at(base: &TopologyParams, sweep: &SweepConfig, v: f64) -> Result<TopologyParams> {
    let mut p = base.clone();
    match sweep.variable {
        SweepVariable::Gb => p.g_b = v,
        SweepVariable::Gamma => {
            p.gamma_c = v;
            p.gamma_b = vec![v; p.n];
        }
        SweepVariable::BigGamma => p.big_gamma = v,
        SweepVariable::Xi => p.xi = Complex64::new(v, 0.0),
        SweepVariable::N => {
            let n = v.round();
            if !(n >= 1.0) || (v - n).abs() > 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "battery count must be a positive integer, got {v}"
                )));
            }
            let n = n as usize;
            let gb = base.gamma_b.first().copied().unwrap_or(base.gamma_c);
            p.n = n;
            p.gamma_b = vec![gb; n];
            p.thetas = base.thetas.as_ref().map(|t| vec![t.first().copied().unwrap_or(0.0); n]);
        }
        SweepVariable::Theta => {
            let mut t = base.thetas.clone().unwrap_or_else(|| vec![0.0; base.n]);
            match sweep.index {
                Some(k) if k <= base.n => t[k - 1] = v,
                Some(k) => {
                    return Err(Error::InvalidParams(format!("phase index {k} exceeds N = {}", base.n)));
                }
                None => t.iter_mut().for_each(|x| *x = v),
            }
            p.thetas = Some(t);
        }
    }
    p.validate()?;
    Ok(p)
}

fn columns_for(observables: &[Observable], targets: &[String]) -> Vec<String> {
    let mut cols = Vec::new();
    for obs in observables {
        for t in targets {
            match obs {
                Observable::SteadyEnergy => cols.push(format!("E_{t}")),
                Observable::MaxPower => {
                    cols.push(format!("t_star_{t}"));
                    cols.push(format!("P_max_{t}"));
                }
                Observable::Gain => {
                    for c in ["E_nr", "E_r1", "E_r2", "G1", "G2"] {
                        cols.push(format!("{c}_{t}"));
                    }
                }
                Observable::Eta => {
                    cols.push(format!("eta1_{t}"));
                    cols.push(format!("eta2_{t}"));
                }
            }
        }
    }
    cols
}

fn undefined(what: &str) -> Error {
    Error::Numeric(format!("{what} undefined: vanishing denominator"))
}

/// Lazily built variants shared by all observables at one point.
struct PointScenarios<'a> {
    params: &'a TopologyParams,
    own: Option<Scenario>,
    variants: Option<(Scenario, Scenario, Scenario)>,
}

impl<'a> PointScenarios<'a> {
    fn own(&mut self) -> Result<&Scenario> {
        if self.own.is_none() {
            self.own = Some(Scenario::new(self.params)?);
        }
        Ok(self.own.as_ref().unwrap())
    }

    fn variants(&mut self) -> Result<&(Scenario, Scenario, Scenario)> {
        if self.variants.is_none() {
            let s = |v| Scenario::new(&self.params.with_variant(v));
            self.variants = Some((s(Variant::Nr)?, s(Variant::R1)?, s(Variant::R2)?));
        }
        Ok(self.variants.as_ref().unwrap())
    }
}

fn evaluate(params: &TopologyParams, observables: &[Observable], targets: &[String]) -> Result<Vec<f64>> {
    let mut sc = PointScenarios {
        params,
        own: None,
        variants: None,
    };
    let mut row = Vec::new();
    for obs in observables {
        for t in targets {
            let id = resolve(t, params);
            match obs {
                Observable::SteadyEnergy => row.push(sc.own()?.steady_energy(&id)?),
                Observable::MaxPower => {
                    let m = sc.own()?.max_power(&id)?;
                    row.extend([m.t_star, m.p_max]);
                }
                Observable::Gain => {
                    let (nr, r1, r2) = sc.variants()?;
                    let (e_nr, e_r1, e_r2) = (nr.steady_energy(&id)?, r1.steady_energy(&id)?, r2.steady_energy(&id)?);
                    let g1 = gain_ratio(e_nr, e_r1).ok_or_else(|| undefined("G1"))?;
                    let g2 = gain_ratio(e_nr, e_r2).ok_or_else(|| undefined("G2"))?;
                    row.extend([e_nr, e_r1, e_r2, g1, g2]);
                }
                Observable::Eta => {
                    let (nr, r1, r2) = sc.variants()?;
                    let p_nr = nr.max_power(&id)?.p_max;
                    let eta1 = gain_ratio(p_nr, r1.max_power(&id)?.p_max).ok_or_else(|| undefined("eta1"))?;
                    let eta2 = gain_ratio(p_nr, r2.max_power(&id)?.p_max).ok_or_else(|| undefined("eta2"))?;
                    row.extend([eta1, eta2]);
                }
            }
        }
    }
    Ok(row)
}

/// Metadata lines echoing a parameter bundle.
pub fn param_metadata(table: SweepTable, p: &TopologyParams) -> SweepTable {
    let mut t = table
        .meta("family", p.family)
        .meta("variant", p.variant)
        .meta("n", p.n)
        .meta("gb", p.g_b)
        .meta("gamma_c", p.gamma_c)
        .meta("gamma_b", format!("{:?}", p.gamma_b))
        .meta("big_gamma", p.big_gamma)
        .meta("xi", format!("[{}, {}]", p.xi.re, p.xi.im));
    if let Some(th) = &p.thetas {
        t = t.meta("thetas", format!("{th:?}"));
    }
    t.meta("units", "rates in omega, times in 1/omega, energies E/omega")
}

/// Evaluate the configured observables at every sweep point, in point order.
/// Failed points land in the table's error list; other points are unaffected.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTable> {
    let base = cfg.params()?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config {
        path: "sweep".into(),
        message: "missing sweep section".into(),
    })?;
    if sweep.variable == SweepVariable::Theta && !matches!(base.variant, Variant::Custom | Variant::R1) {
        return Err(Error::Config {
            path: "sweep.variable".into(),
            message: format!("theta sweeps need variant custom or r1, got {}", base.variant),
        });
    }
    let sweeping_n = sweep.variable == SweepVariable::N;
    let targets = resolve_targets(&cfg.targets, &base, sweeping_n);
    let spec = build(&base)?;
    for t in &targets {
        let id = resolve(t, &base);
        if spec.mode(&id).is_none() {
            return Err(Error::UnknownMode(id));
        }
    }

    let var = sweep.variable.name();
    let mut columns = vec![var.to_string()];
    columns.extend(columns_for(&cfg.observables, &targets));
    let desc = format!(
        "{} {:?} [{}, {}] {} points",
        var, sweep.scale, sweep.start, sweep.stop, sweep.points
    )
    .to_lowercase();
    let mut table = param_metadata(SweepTable::new("sweep", columns, 1), &base).meta("sweep", desc);

    let xs = grid(sweep.start, sweep.stop, sweep.points, sweep.scale.into());
    let results: Vec<Result<Vec<f64>>> = xs
        .par_iter()
        .map(|&x| {
            let p = params_at(&base, sweep, x)?;
            evaluate(&p, &cfg.observables, &targets)
        })
        .collect();
    for (i, (x, r)) in xs.iter().zip(results).enumerate() {
        match r {
            Ok(values) => {
                let mut row = vec![*x];
                row.extend(values);
                table.push(i, row);
            }
            Err(e) => table.fail(i, vec![*x], e.to_string()),
        }
    }
    Ok(table)
}
