//! Terminal-battery energy over the two synthetic phases of an N=2 network,
//! printed as a coarse character map.

use qbnet::network::{Family, TopologyParams, Variant};
use qbnet::nonreciprocity::phase_landscape;

const SHADES: &[u8] = b" .:-=+*#%@";

fn main() -> qbnet::Result<()> {
    for family in [Family::Cascaded, Family::Parallel] {
        let p = TopologyParams::uniform(family, Variant::Custom, 2, 0.01, 0.1, 0.1, 1.0).with_thetas(vec![0.0, 0.0]);
        let l = phase_landscape(&p, "b2", 41)?;
        println!("{family}: max E/ω = {:.4} at {:?}", l.max, l.argmax);
        let (lo, span) = (l.min(), l.max - l.min());
        // Rows are θ2 from +π down to -π, columns θ1 from -π to +π.
        let size = l.axis.len();
        for j in (0..size).rev().step_by(2) {
            let line: String = (0..size)
                .map(|i| {
                    let v = l.values[i * size + j];
                    let k = (((v - lo) / span) * (SHADES.len() - 1) as f64).round() as usize;
                    SHADES[k] as char
                })
                .collect();
            println!("  {line}");
        }
    }
    Ok(())
}
