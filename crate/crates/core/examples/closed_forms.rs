//! Closed-form steady states against the full network, optimal couplings, and
//! the logarithmic growth of the optimized nonreciprocal advantage.

use qbnet::closed_forms::{cascaded_nr_energy, cascaded_nr_max, closed_form_energy, g_opt_odd, logfit_ratio};
use qbnet::network::{Family, TopologyParams, Variant};
use qbnet::observables::steady_energy;

fn main() -> qbnet::Result<()> {
    let gamma = 0.1;
    for variant in [Variant::R1, Variant::R2, Variant::Nr] {
        let p = TopologyParams::uniform(Family::Cascaded, variant, 5, 0.02, gamma, 0.1, 1.0);
        let full = steady_energy(&p, "b5")?;
        let cf = closed_form_energy(&p, "b5")?;
        println!("{variant:>3} N=5: full {full:.12e}, closed form {cf:.12e}");
    }
    println!(
        "nr explicit formula, N=3, g=0.01: {:.16}",
        cascaded_nr_energy(3, 0.01, gamma, 1.0)?
    );

    for n in [1, 3, 5, 7] {
        let m = cascaded_nr_max(n, gamma, 1.0)?;
        println!(
            "N={n}: numeric g_opt = {:.8}, formula {:.8}, E_max = {:.4}",
            m.x,
            g_opt_odd(n, gamma)?,
            m.value
        );
    }

    let fit = logfit_ratio(&[1, 3, 5, 7, 9, 11, 13, 15], gamma)?;
    for r in &fit.rows {
        println!("N={:>2}: max E_nr / max E_r1 = {:.6}", r.n, r.ratio);
    }
    println!("fit: ratio ≈ 1 + k ln N with k = {:.5}", fit.k);
    Ok(())
}
