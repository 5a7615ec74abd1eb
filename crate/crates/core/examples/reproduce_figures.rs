//! Regenerate figure tables into a directory.
//!
//! `cargo run --release --example reproduce_figures -- [out_dir] [id ...]`
//! Defaults to `figures/` and the quick tables `fig2b fig2f fig3b`.

use std::path::PathBuf;

use qbnet::experiments::{run_figure, FigureId, Format};

fn main() -> qbnet::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "figures".into()));
    let mut ids: Vec<FigureId> = args.map(|a| a.parse()).collect::<qbnet::Result<_>>()?;
    if ids.is_empty() {
        ids = vec![FigureId::Fig2b, FigureId::Fig2f, FigureId::Fig3b];
    }
    for id in ids {
        for path in run_figure(id, &dir, Format::Csv, true)? {
            println!("{id}: {}", path.display());
        }
    }
    Ok(())
}
