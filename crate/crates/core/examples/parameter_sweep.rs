//! A JSON-configured sweep, written as CSV to stdout.

use qbnet::experiments::{run_sweep, RunConfig};

const CONFIG: &str = r#"{
    "topology": {"family": "parallel", "variant": "nr", "n": 2, "gb": 0.01,
                 "gamma": 0.1, "big_gamma": 0.1, "xi": [1.0, 0.0]},
    "sweep": {"variable": "gb", "start": 0.0001, "stop": 0.1, "points": 7, "scale": "log"},
    "observables": ["steady_energy", "gain"]
}"#;

fn main() -> qbnet::Result<()> {
    let cfg = RunConfig::from_json(CONFIG)?;
    let table = run_sweep(&cfg)?;
    print!("{}", table.to_csv(true));
    if !table.errors.is_empty() {
        eprint!("{}", table.errors_csv());
    }
    Ok(())
}
