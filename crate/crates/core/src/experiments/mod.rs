//! Figure reproduction, parameter sweeps and their file exports.

pub mod config;
pub mod figures;
pub mod sweep;
pub mod table;

pub use config::{Observable, RunConfig, SweepConfig, SweepVariable, TimeGrid, TopologyConfig};
pub use figures::{figure_table, run_figure, FigureId};
pub use sweep::run_sweep;
pub use table::{Format, PointError, SweepTable};

/// Environment variable bounding worker threads; `0` or unset means one per core.
pub const THREADS_ENV: &str = "QBNET_THREADS";

/// Thread pool sized from [`THREADS_ENV`].
pub fn thread_pool() -> crate::Result<rayon::ThreadPool> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| crate::Error::Config {
            path: THREADS_ENV.into(),
            message: format!("expected a non-negative integer, got `{v}`"),
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| crate::Error::Numeric(e.to_string()))
}
