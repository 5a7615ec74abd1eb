//! Maximum average charging power E(t)/t, for a single driven mode and for a
//! cascaded chain in each variant.

use num_complex::Complex64;
use qbnet::dynamics::assemble;
use qbnet::network::{DriveSpec, Family, ModeSpec, NetworkSpec, Role, TopologyParams, Variant};
use qbnet::observables::{gain_report, Scenario};

fn main() -> qbnet::Result<()> {
    let gamma = 0.1;
    let single = NetworkSpec {
        modes: vec![ModeSpec::new("c", Role::Charger, gamma)],
        couplings: vec![],
        drives: vec![DriveSpec {
            mode: "c".into(),
            amplitude: Complex64::new(1.0, 0.0),
        }],
    };
    let m = Scenario::from_system(assemble(&single)?)?.max_power("c")?;
    println!(
        "single mode: γ t* = {:.6}, P_max γ/ξ² = {:.10}",
        gamma * m.t_star,
        gamma * m.p_max
    );

    let base = TopologyParams::uniform(Family::Cascaded, Variant::Nr, 4, 5e-4 * 0.01, 5e-4, 1.0, 1.0);
    for variant in [Variant::Nr, Variant::R2, Variant::R1] {
        let m = Scenario::new(&base.with_variant(variant))?.max_power("b4")?;
        println!("{variant:>3}: t* = {:.4e}, P_max = {:.4e}", m.t_star, m.p_max);
    }
    let report = gain_report(&base, true)?;
    let p = report
        .entry("b4")
        .and_then(|e| e.power.clone())
        .expect("power gains requested");
    println!(
        "eta_41 = {:.3}, eta_42 = {:.3}",
        p.eta1.unwrap_or(f64::NAN),
        p.eta2.unwrap_or(f64::NAN)
    );
    Ok(())
}
