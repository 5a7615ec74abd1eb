//! Directional transmission of a single loop versus the synthetic phase θ.

use std::f64::consts::FRAC_PI_2;

use qbnet::closed_forms::EffectiveLink;
use qbnet::nonreciprocity::{isolation, phase_grid, probe_triangle, window_check, IndirectPath};

fn main() -> qbnet::Result<()> {
    let (g_b, big_gamma, gamma) = (0.01, 0.1, 0.1);
    println!(
        "{:>8} {:>12} {:>12} {:>10} {:>6}",
        "θ", "forward", "backward", "ratio", "window"
    );
    for theta in phase_grid(12) {
        let r = isolation(theta, g_b, big_gamma, IndirectPath::Matched)?;
        println!(
            "{theta:>8.4} {:>12.4e} {:>12.4e} {:>10.3e} {:>6}",
            r.forward_t,
            r.backward_t,
            r.ratio,
            window_check(theta)
        );
    }

    let link = EffectiveLink::matched(-FRAC_PI_2, g_b);
    println!(
        "\nθ = -π/2 effective link: |forward| = {:.4}, |backward| = {:.1e}",
        link.forward_amp.norm(),
        link.backward_amp.norm()
    );

    // Same question asked of the full three-mode network.
    let probe = probe_triangle(-FRAC_PI_2, g_b, gamma, gamma, big_gamma, 1.0)?;
    println!(
        "full network: forward {:.4e}, backward {:.1e}",
        probe.forward, probe.backward
    );
    Ok(())
}
