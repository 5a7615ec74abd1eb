//! Charging from vacuum in a four-battery parallel network.
//!
//! Compares the closed-form propagator with an adaptive integrator and reports
//! when each variant first reaches 90% of the reciprocal steady energy.

use qbnet::dynamics::{assemble, evolve, evolve_integrated, vacuum};
use qbnet::integrator::Tolerance;
use qbnet::network::{build, Family, TopologyParams, Variant};
use qbnet::observables::{first_crossing, Scenario};
use qbnet::optimize::{grid, Scale};

fn main() -> qbnet::Result<()> {
    let base = TopologyParams::uniform(Family::Parallel, Variant::Nr, 4, 0.001, 0.1, 0.1, 1.0);
    let times = grid(0.0, 2000.0, 2001, Scale::Linear);
    let level = 0.9 * Scenario::new(&base.with_variant(Variant::R1))?.steady_energy("b4")?;

    for variant in [Variant::Nr, Variant::R2, Variant::R1] {
        let sys = assemble(&build(&base.with_variant(variant))?)?;
        let exact = evolve(&sys, &vacuum(&sys), &times)?;
        let stepped = evolve_integrated(&sys, &vacuum(&sys), &times, Tolerance::default())?;
        let scenario = Scenario::from_system(sys)?;
        let curve = scenario.energy_curve("b4", &times)?;
        let t90 = first_crossing(&curve, level).map_or("never".into(), |t| format!("{t:.0}"));
        println!(
            "{variant:>3}: E(2000) = {:.4e}, E_ss = {:.4e}, t(90% of E_r1) = {t90:>5}, integrator drift {:.1e}",
            curve.energy.last().unwrap(),
            scenario.steady_energy("b4")?,
            exact.max_discrepancy(&stepped),
        );
    }
    Ok(())
}
