//! Nonreciprocal energy gains G1 = E_nr/E_r1 and G2 = E_nr/E_r2 across coupling strengths.

use qbnet::closed_forms::{gain_approx, gain_bounds};
use qbnet::network::{Family, TopologyParams, Variant};
use qbnet::observables::gain_report;

fn main() -> qbnet::Result<()> {
    let gamma = 0.1;
    for family in [Family::Cascaded, Family::Parallel] {
        let n = 3;
        let (b1, b2) = gain_bounds(family, n);
        println!("{family} N={n}: weak-coupling limits G1 -> {b1}, G2 -> {b2}");
        println!("  {:>8} {:>10} {:>10} {:>10}", "gb/γ", "G1", "G1 approx", "G2");
        for x in [1e-4, 1e-3, 0.01, 0.05, 0.1, 0.3, 1.0] {
            let base = TopologyParams::uniform(family, Variant::Nr, n, x * gamma, gamma, gamma, 1.0);
            let report = gain_report(&base, false)?;
            let e = report
                .entry(&base.terminal_battery())
                .expect("terminal battery reported");
            println!(
                "  {x:>8} {:>10.4} {:>10.4} {:>10.4}",
                e.g1.unwrap_or(f64::NAN),
                gain_approx(family, n, x),
                e.g2.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
