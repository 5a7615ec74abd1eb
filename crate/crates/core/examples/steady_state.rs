//! Steady-state battery energies of a cascaded chain for each coupling variant.

use qbnet::dynamics::{assemble, steady_state};
use qbnet::network::{build, Family, TopologyParams, Variant};

fn main() -> qbnet::Result<()> {
    let n = 3;
    for variant in [Variant::R1, Variant::R2, Variant::Nr] {
        let p = TopologyParams::uniform(Family::Cascaded, variant, n, 0.01, 0.1, 0.1, 1.0);
        let sys = assemble(&build(&p)?)?;
        let ss = steady_state(&sys)?;
        print!("{variant:>3}:");
        for id in p.battery_ids() {
            print!("  E/ω[{id}] = {:.6e}", ss.energy(sys.index_of(&id)?));
        }
        println!("   (residual {:.1e}, condition {:.1e})", ss.residual, ss.condition);
    }
    Ok(())
}
