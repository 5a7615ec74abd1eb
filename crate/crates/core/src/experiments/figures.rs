//! Standard figure tables, one per figure id.
//!
//! Charging tables use `gamma_c = gamma_b = Gamma = 0.1`, `xi = 1` with matched
//! intermediates; power tables use `gamma = 5e-4`, `Gamma = 1`. Sweep ranges and grid
//! densities are recorded in each table's metadata.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use super::sweep::param_metadata;
use super::table::{Format, SweepTable};
use crate::closed_forms::logfit_ratio;
use crate::error::{Error, Result};
use crate::network::{Family, TopologyParams, Variant};
use crate::nonreciprocity::{phase_landscape, DEFAULT_GRID};
use crate::observables::{gain_ratio, Scenario};
use crate::optimize::{grid, Scale};

pub const CHARGING_GAMMA: f64 = 0.1;
pub const POWER_GAMMA: f64 = 5e-4;
pub const POWER_BIG_GAMMA: f64 = 1.0;

/// Steady-energy and gain sweeps: `g_b / gamma` over `[0.001, 0.3]`.
pub const STEADY_SWEEP: (f64, f64, usize) = (0.001, 0.3, 301);
/// Power-gain sweeps: `g_b / gamma` over `[0.001, 0.1]`.
pub const ETA_SWEEP: (f64, f64, usize) = (0.001, 0.1, 100);
/// Landscapes use `g_b / gamma` of 0.1.
pub const LANDSCAPE_GB_RATIO: f64 = 0.1;
/// Charging dynamics: `t` over `[0, 2000]`.
pub const DYNAMICS_GRID: (f64, f64, usize) = (0.0, 2000.0, 2001);
/// Power curves: `t` over `[0, 1.2e5]`.
pub const POWER_GRID: (f64, f64, usize) = (0.0, 1.2e5, 2001);
pub const LOGFIT_NS: [usize; 8] = [1, 3, 5, 7, 9, 11, 13, 15];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig2e,
    Fig2f,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
}

impl FigureId {
    pub const ALL: [FigureId; 14] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::Fig2d,
        FigureId::Fig2e,
        FigureId::Fig2f,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig3d,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig4c,
        FigureId::Fig4d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig2d => "fig2d",
            FigureId::Fig2e => "fig2e",
            FigureId::Fig2f => "fig2f",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig3d => "fig3d",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig4c => "fig4c",
            FigureId::Fig4d => "fig4d",
        }
    }

    /// Column names, part of the export contract.
    pub fn columns(self) -> Vec<&'static str> {
        match self {
            FigureId::Fig2a | FigureId::Fig3a => vec!["theta1", "theta2", "E_b2"],
            FigureId::Fig2b | FigureId::Fig2c | FigureId::Fig3b => vec!["gb_over_gamma", "E_nr", "E_r1", "E_r2"],
            FigureId::Fig2d => vec!["gb_over_gamma", "G_31", "G_32"],
            FigureId::Fig2e => vec!["gb_over_gamma", "G_41", "G_42"],
            FigureId::Fig3c => vec!["gb_over_gamma", "G_21", "G_22"],
            FigureId::Fig2f => vec!["N", "gb_opt", "ratio_Emax"],
            FigureId::Fig3d => vec!["t", "E_nr", "E_r1", "E_r2"],
            FigureId::Fig4a | FigureId::Fig4b => vec!["t", "P_nr", "P_r1", "P_r2"],
            FigureId::Fig4c | FigureId::Fig4d => vec!["gb_over_gamma", "eta_41", "eta_42"],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown figure `{s}`")))
    }
}

fn charging(family: Family, n: usize, gb_ratio: f64) -> TopologyParams {
    let g = CHARGING_GAMMA;
    TopologyParams::uniform(family, Variant::Nr, n, gb_ratio * g, g, g, 1.0)
}

fn power(family: Family) -> TopologyParams {
    let g = POWER_GAMMA;
    TopologyParams::uniform(family, Variant::Nr, 4, 0.1 * g, g, POWER_BIG_GAMMA, 1.0)
}

fn table(id: FigureId, independent: usize, p: &TopologyParams) -> SweepTable {
    let cols = id.columns().into_iter().map(String::from).collect();
    param_metadata(SweepTable::new(id.name(), cols, independent), p).meta("figure", id.name())
}

fn fill(t: &mut SweepTable, xs: &[f64], results: Vec<Result<Vec<f64>>>) {
    for (i, (x, r)) in xs.iter().zip(results).enumerate() {
        match r {
            Ok(v) => {
                let mut row = vec![*x];
                row.extend(v);
                t.push(i, row);
            }
            Err(e) => t.fail(i, vec![*x], e.to_string()),
        }
    }
}

fn variants(p: &TopologyParams) -> Result<[Scenario; 3]> {
    Ok([
        Scenario::new(&p.with_variant(Variant::Nr))?,
        Scenario::new(&p.with_variant(Variant::R1))?,
        Scenario::new(&p.with_variant(Variant::R2))?,
    ])
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    gain_ratio(num, den).ok_or_else(|| Error::Numeric("ratio undefined: vanishing denominator".into()))
}

/// Steady energies (`gains = false`) or `G1, G2` of the target over a `g_b / gamma` sweep.
fn steady_sweep(id: FigureId, family: Family, n: usize, target: &str, gains: bool) -> Result<SweepTable> {
    let base = charging(family, n, 0.0);
    let (lo, hi, pts) = STEADY_SWEEP;
    let xs = grid(lo, hi, pts, Scale::Linear);
    let results = xs
        .par_iter()
        .map(|&x| {
            let [nr, r1, r2] = variants(&base.with_g_b(x * CHARGING_GAMMA))?;
            let e = [
                nr.steady_energy(target)?,
                r1.steady_energy(target)?,
                r2.steady_energy(target)?,
            ];
            if gains {
                Ok(vec![ratio(e[0], e[1])?, ratio(e[0], e[2])?])
            } else {
                Ok(e.to_vec())
            }
        })
        .collect();
    let mut t = table(id, 1, &base)
        .meta("target", target)
        .meta("sweep", format!("gb_over_gamma linear [{lo}, {hi}] {pts} points"));
    fill(&mut t, &xs, results);
    Ok(t)
}

fn landscape(id: FigureId, family: Family) -> Result<SweepTable> {
    let base = charging(family, 2, LANDSCAPE_GB_RATIO)
        .with_variant(Variant::Custom)
        .with_thetas(vec![0.0, 0.0]);
    let l = phase_landscape(&base, "b2", DEFAULT_GRID)?;
    let mut t = table(id, 2, &base)
        .meta("target", "b2")
        .meta("grid", format!("{0}x{0} over (-pi, pi]", DEFAULT_GRID))
        .meta("argmax", format!("{:?}", l.argmax));
    for (i, v) in l.values.iter().enumerate() {
        let mut row = l.point(i);
        row.push(*v);
        t.push(i, row);
    }
    Ok(t)
}

fn logfit(id: FigureId) -> Result<SweepTable> {
    let fit = logfit_ratio(&LOGFIT_NS, CHARGING_GAMMA)?;
    let cols = id.columns().into_iter().map(String::from).collect();
    let mut t = SweepTable::new(id.name(), cols, 1)
        .meta("family", Family::Cascaded)
        .meta("variants", "nr vs r1, each maximized over gb")
        .meta("gamma", CHARGING_GAMMA)
        .meta("xi", "[1, 0]")
        .meta("units", "rates in omega, times in 1/omega, energies E/omega")
        .meta("figure", id.name())
        .meta("gb_opt", "numeric maximizer of E_nr over gb, in units of omega")
        .meta("fit_k", fit.k);
    for (i, r) in fit.rows.iter().enumerate() {
        t.push(i, vec![r.n as f64, r.g_opt_nr, r.ratio]);
    }
    Ok(t)
}

fn dynamics(id: FigureId) -> Result<SweepTable> {
    let base = charging(Family::Parallel, 4, 0.01);
    let (lo, hi, pts) = DYNAMICS_GRID;
    let times = grid(lo, hi, pts, Scale::Linear);
    let curves = variants(&base)?
        .iter()
        .map(|s| s.energy_curve("b4", &times))
        .collect::<Result<Vec<_>>>()?;
    let mut t = table(id, 1, &base)
        .meta("target", "b4")
        .meta("time_grid", format!("linear [{lo}, {hi}] {pts} points"))
        .meta("initial_state", "vacuum");
    for (i, &tm) in times.iter().enumerate() {
        t.push(
            i,
            vec![tm, curves[0].energy[i], curves[1].energy[i], curves[2].energy[i]],
        );
    }
    Ok(t)
}

fn power_curves(id: FigureId, family: Family) -> Result<SweepTable> {
    let base = power(family);
    let (lo, hi, pts) = POWER_GRID;
    let times = grid(lo, hi, pts, Scale::Linear);
    let positive: Vec<f64> = times.iter().copied().filter(|&x| x > 0.0).collect();
    let curves = variants(&base)?
        .iter()
        .map(|s| s.power_curve("b4", &positive))
        .collect::<Result<Vec<_>>>()?;
    let offset = times.len() - positive.len();
    let mut t = table(id, 1, &base)
        .meta("target", "b4")
        .meta("time_grid", format!("linear [{lo}, {hi}] {pts} points"))
        .meta("initial_state", "vacuum")
        .meta("p_at_zero", "reported as 0");
    for (i, &tm) in times.iter().enumerate() {
        let row = if i < offset {
            vec![tm, 0.0, 0.0, 0.0]
        } else {
            let j = i - offset;
            vec![tm, curves[0].power[j], curves[1].power[j], curves[2].power[j]]
        };
        t.push(i, row);
    }
    Ok(t)
}

fn eta_sweep(id: FigureId, family: Family) -> Result<SweepTable> {
    let base = power(family);
    let (lo, hi, pts) = ETA_SWEEP;
    let xs = grid(lo, hi, pts, Scale::Linear);
    let results = xs
        .par_iter()
        .map(|&x| {
            let [nr, r1, r2] = variants(&base.with_g_b(x * POWER_GAMMA))?;
            let p = [
                nr.max_power("b4")?.p_max,
                r1.max_power("b4")?.p_max,
                r2.max_power("b4")?.p_max,
            ];
            Ok(vec![ratio(p[0], p[1])?, ratio(p[0], p[2])?])
        })
        .collect();
    let mut t = table(id, 1, &base)
        .meta("target", "b4")
        .meta("sweep", format!("gb_over_gamma linear [{lo}, {hi}] {pts} points"));
    fill(&mut t, &xs, results);
    Ok(t)
}

/// Compute one figure table.
pub fn figure_table(id: FigureId) -> Result<SweepTable> {
    use FigureId::*;
    match id {
        Fig2a => landscape(id, Family::Cascaded),
        Fig2b => steady_sweep(id, Family::Cascaded, 3, "b3", false),
        Fig2c => steady_sweep(id, Family::Cascaded, 4, "b4", false),
        Fig2d => steady_sweep(id, Family::Cascaded, 3, "b3", true),
        Fig2e => steady_sweep(id, Family::Cascaded, 4, "b4", true),
        Fig2f => logfit(id),
        Fig3a => landscape(id, Family::Parallel),
        Fig3b => steady_sweep(id, Family::Parallel, 2, "b2", false),
        Fig3c => steady_sweep(id, Family::Parallel, 2, "b2", true),
        Fig3d => dynamics(id),
        Fig4a => power_curves(id, Family::Cascaded),
        Fig4b => power_curves(id, Family::Parallel),
        Fig4c => eta_sweep(id, Family::Cascaded),
        Fig4d => eta_sweep(id, Family::Parallel),
    }
}

/// Write the figure table (and error sidecar, if any) into `out_dir`.
pub fn run_figure(id: FigureId, out_dir: &Path, format: Format, deterministic: bool) -> Result<Vec<PathBuf>> {
    figure_table(id)?.write(out_dir, format, deterministic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ids_parse() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig5a".parse::<FigureId>().is_err());
    }

    #[test]
    fn fig2b_schema_and_values() {
        let t = figure_table(FigureId::Fig2b).unwrap();
        assert_eq!(t.columns, ["gb_over_gamma", "E_nr", "E_r1", "E_r2"]);
        assert_eq!(t.len(), 301);
        assert!(t.errors.is_empty());
        for row in t.rows.iter().step_by(50) {
            let e = crate::closed_forms::cascaded_nr_energy(3, row[0] * CHARGING_GAMMA, CHARGING_GAMMA, 1.0).unwrap();
            assert_relative_eq!(row[1], e, max_relative = 1e-10);
        }
    }

    #[test]
    fn fig2f_schema() {
        let t = figure_table(FigureId::Fig2f).unwrap();
        assert_eq!(t.columns, ["N", "gb_opt", "ratio_Emax"]);
        assert_eq!(t.column("N").unwrap(), vec![1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0]);
    }
}
