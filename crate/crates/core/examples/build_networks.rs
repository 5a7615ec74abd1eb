//! Build the standard topologies, inspect them, and validate a hand-written spec.

use qbnet::network::{self, build, CouplingSpec, Family, ModeSpec, NetworkSpec, Role, TopologyParams, Variant};

fn main() -> qbnet::Result<()> {
    for (family, variant) in [
        (Family::Cascaded, Variant::R1),
        (Family::Cascaded, Variant::Nr),
        (Family::Parallel, Variant::Nr),
    ] {
        let p = TopologyParams::uniform(family, variant, 2, 0.01, 0.1, 0.1, 1.0);
        let spec = build(&p)?;
        println!(
            "{family} {variant}: {} modes, {} couplings",
            spec.modes.len(),
            spec.couplings.len()
        );
        for c in &spec.couplings {
            println!(
                "  {:>2} -> {:<2} g = {:.5}  phase = {:+.4}",
                c.source, c.target, c.strength, c.phase
            );
        }
    }

    // Specs serialize to the same JSON accepted under `network` in run configs.
    let p = TopologyParams::uniform(Family::Cascaded, Variant::Nr, 1, 0.01, 0.1, 0.1, 1.0);
    println!(
        "\n{}",
        serde_json::to_string_pretty(&build(&p)?).expect("spec serializes")
    );

    let broken = NetworkSpec {
        modes: vec![
            ModeSpec::new("c", Role::Charger, 0.1),
            ModeSpec::new("c", Role::Battery, 0.1),
        ],
        couplings: vec![CouplingSpec::new("c", "b9", 0.01, 0.0)],
        drives: vec![],
    };
    println!("\nviolations in a broken spec:");
    for v in network::validate(&broken) {
        println!("  {v}");
    }
    Ok(())
}
