//! Driven-dissipative bosonic networks used as quantum batteries.
//!
//! A charger mode `c` is driven coherently and hands energy to batteries
//! `b1..bN`, either along a chain (`cascaded`) or from a shared hub
//! (`parallel`). Each direct link `g_b e^{iθ}` can be paired with a lossy
//! intermediate mode; at matched coupling and `θ = -π/2` the pair transmits
//! in one direction only.
//!
//! Everything works at the level of mode amplitudes, `dα/dt = Mα + d`, with
//! `M + M† = -diag(γ)`. Energies are `|α|²` in units of the mode frequency.
//!
//! ```
//! use qbnet::network::{Family, TopologyParams, Variant};
//! use qbnet::observables::steady_energy;
//!
//! let p = TopologyParams::uniform(Family::Cascaded, Variant::Nr, 3, 0.01, 0.1, 0.1, 1.0);
//! let e = steady_energy(&p, "b3").unwrap();
//! assert!((e - 0.2056756186979704).abs() < 1e-12);
//! ```
//!
//! Runnable examples, one per capability (`cargo run --release --example <name>`):
//!
//! | example | shows |
//! |---|---|
//! | `build_networks` | topology builders, spec JSON, validation |
//! | `steady_state` | dense steady-state solve per variant |
//! | `charging_dynamics` | propagator vs integrator, charging times |
//! | `max_power` | maximum average power and its gains |
//! | `gain_report` | energy gains against weak-coupling limits |
//! | `closed_forms` | closed forms, optimal coupling, log fit |
//! | `isolation` | directional transmission versus θ |
//! | `phase_landscape` | energy over two phases |
//! | `parameter_sweep` | JSON-configured sweeps to CSV |
//! | `reproduce_figures` | figure tables written to disk |

// `!(x >= 0.0)` also rejects NaN; the negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_forms;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod network;
pub mod nonreciprocity;
pub mod observables;
pub mod optimize;

pub use error::{Error, Result};
