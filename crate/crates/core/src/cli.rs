//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure
//! (singular or unstable system). Diagnostics go to standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{self, LinearSystem};
use crate::error::{Error, Result};
use crate::experiments::table::{fmt_number, Format, SweepTable};
use crate::experiments::{self, run_figure, run_sweep, FigureId, RunConfig, TimeGrid};
use crate::network::{self, Family, TopologyParams, Variant};
use crate::nonreciprocity::phase_landscape;
use crate::observables::{gain_report, Scenario};
use crate::optimize::{grid, Scale};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qbnet",
    version,
    about = "Steady states, charging dynamics and gains of driven bosonic battery networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; inline flags override its topology.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; tables go to standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Omit the timestamp metadata line.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Debug, Args, Default)]
struct Inline {
    /// `cascaded` or `parallel` [default: cascaded].
    #[arg(long)]
    family: Option<Family>,
    /// `r1`, `r2`, `nr` or `custom` [default: nr].
    #[arg(long)]
    variant: Option<Variant>,
    /// Number of batteries [default: 1].
    #[arg(long)]
    n: Option<usize>,
    /// Direct coupling strength [default: 0.01].
    #[arg(long)]
    gb: Option<f64>,
    /// Decay rate of charger and batteries.
    #[arg(long)]
    gamma: Option<f64>,
    /// Charger decay rate, when it differs from `--gamma`.
    #[arg(long = "gamma-c")]
    gamma_c: Option<f64>,
    /// Decay rate of the intermediate modes.
    #[arg(long = "big-gamma")]
    big_gamma: Option<f64>,
    /// Drive amplitude, `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Direct-coupling phases, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    /// Target mode ids (default: terminal battery for cascaded, all batteries for parallel).
    #[arg(long, value_delimiter = ',')]
    target: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state energy of the target modes.
    Steady {
        #[command(flatten)]
        params: Inline,
        #[command(flatten)]
        common: Common,
    },
    /// Stored energy over a time grid, from vacuum.
    Evolve {
        #[command(flatten)]
        params: Inline,
        #[arg(long = "t-stop")]
        t_stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Maximum charging power and the time it is reached.
    Power {
        #[command(flatten)]
        params: Inline,
        #[command(flatten)]
        common: Common,
    },
    /// Steady energies of the nr, r1 and r2 variants and their ratios.
    Gains {
        #[command(flatten)]
        params: Inline,
        /// Also compare maximum charging powers.
        #[arg(long)]
        power: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Target energy over a grid of direct-coupling phases.
    Landscape {
        #[command(flatten)]
        params: Inline,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// One-parameter sweep described by the config file.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Write a named figure table (`fig2a` .. `fig4d`, or `all`).
    Figure {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a config file and the network it describes.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

/// Run the command line `argv` (including the program name); returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match experiments::thread_pool() {
        Ok(p) => p,
        Err(e) => return report(e),
    };
    let mut stdout = std::io::stdout().lock();
    match pool.install(|| run(cli.command)) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => report(e),
    }
}

fn report(e: Error) -> i32 {
    eprintln!("qbnet: error: {e}");
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn parse_xi(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| Error::InvalidParams(format!("bad drive amplitude `{s}`")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::InvalidParams(format!("bad drive amplitude `{s}`"))),
    }
}

/// Topology from the config (if any) overlaid with inline flags.
/// Unset values fall back to cascaded nr, N = 1, gb = 0.01, gamma = Gamma = 0.1, xi = 1.
fn resolve_params(cfg: &RunConfig, inline: &Inline) -> Result<TopologyParams> {
    let mut p = match &cfg.topology {
        Some(t) => t.to_params()?,
        None => TopologyParams::uniform(Family::Cascaded, Variant::Nr, 1, 0.01, 0.1, 0.1, 1.0),
    };
    if let Some(f) = inline.family {
        p.family = f;
    }
    if let Some(v) = inline.variant {
        p.variant = v;
    }
    if let Some(n) = inline.n {
        let gb = p.gamma_b.first().copied().unwrap_or(p.gamma_c);
        p.n = n;
        p.gamma_b = vec![gb; n];
    }
    if let Some(g) = inline.gb {
        p.g_b = g;
    }
    if let Some(g) = inline.gamma {
        p.gamma_c = g;
        p.gamma_b = vec![g; p.n];
    }
    if let Some(g) = inline.gamma_c {
        p.gamma_c = g;
    }
    if let Some(g) = inline.big_gamma {
        p.big_gamma = g;
    }
    if let Some(x) = &inline.xi {
        p.xi = parse_xi(x)?;
    }
    if let Some(t) = &inline.theta {
        p.thetas = Some(if t.len() == 1 { vec![t[0]; p.n] } else { t.clone() });
    }
    p.validate()?;
    Ok(p)
}

/// The system to analyse: an explicit config network wins over the topology.
fn resolve_system(cfg: &RunConfig, inline: &Inline) -> Result<(LinearSystem, Vec<String>)> {
    let inline_set = inline.family.is_some() || inline.variant.is_some() || inline.n.is_some() || inline.gb.is_some();
    let (spec, defaults) = match (&cfg.network, inline_set) {
        (Some(net), false) => (net.clone(), net.battery_ids()),
        _ => {
            let p = resolve_params(cfg, inline)?;
            let defaults = match p.family {
                Family::Cascaded => vec![p.terminal_battery()],
                Family::Parallel => p.battery_ids(),
            };
            (network::build(&p)?, defaults)
        }
    };
    let targets = inline
        .target
        .clone()
        .or_else(|| (!cfg.targets.is_empty()).then(|| cfg.targets.clone()))
        .unwrap_or(defaults);
    let sys = dynamics::assemble(&spec)?;
    for t in &targets {
        sys.index_of(t)?;
    }
    Ok((sys, targets))
}

fn emit(table: &SweepTable, common: &Common) -> Result<String> {
    let format: Format = common.format.into();
    match &common.out {
        Some(dir) => {
            let written = table.write(dir, format, common.deterministic)?;
            Ok(listing(&written))
        }
        None => Ok(match format {
            Format::Csv => table.to_csv(common.deterministic),
            Format::Json => table.to_json(common.deterministic) + "\n",
        }),
    }
}

fn listing(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| format!("wrote {}\n", p.display())).collect()
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Steady { params, common } => {
            let cfg = load_config(&common)?;
            let (sys, targets) = resolve_system(&cfg, &params)?;
            let sc = Scenario::from_system(sys)?;
            let energies = targets
                .iter()
                .map(|t| Ok((t.clone(), sc.steady_energy(t)?)))
                .collect::<Result<Vec<_>>>()?;
            match common.format {
                FormatArg::Json => {
                    let map: serde_json::Map<String, serde_json::Value> =
                        energies.into_iter().map(|(k, v)| (k, v.into())).collect();
                    Ok(json(&map))
                }
                FormatArg::Csv => {
                    let mut s = String::new();
                    for (t, e) in energies {
                        let _ = writeln!(s, "E/ω [{t}] = {e}");
                    }
                    Ok(s)
                }
            }
        }
        Command::Evolve {
            params,
            t_stop,
            points,
            common,
        } => {
            let cfg = load_config(&common)?;
            let (sys, targets) = resolve_system(&cfg, &params)?;
            let tg = cfg.time_grid.unwrap_or(TimeGrid {
                start: 0.0,
                stop: 1000.0,
                points: 1001,
            });
            let times = grid(
                tg.start,
                t_stop.unwrap_or(tg.stop),
                points.unwrap_or(tg.points),
                Scale::Linear,
            );
            let traj = dynamics::evolve(&sys, &dynamics::vacuum(&sys), &times)?;
            let mut cols = vec!["t".to_string()];
            cols.extend(targets.iter().map(|t| format!("E_{t}")));
            let mut table = SweepTable::new("evolve", cols, 1).meta("initial_state", "vacuum");
            let idx = targets.iter().map(|t| sys.index_of(t)).collect::<Result<Vec<_>>>()?;
            for (i, (t, a)) in traj.times.iter().zip(&traj.amplitudes).enumerate() {
                let mut row = vec![*t];
                row.extend(idx.iter().map(|&j| a[j].norm_sqr()));
                table.push(i, row);
            }
            emit(&table, &common)
        }
        Command::Power { params, common } => {
            let cfg = load_config(&common)?;
            let (sys, targets) = resolve_system(&cfg, &params)?;
            let sc = Scenario::from_system(sys)?;
            let mut table = SweepTable::new("power", vec!["target_index".into(), "t_star".into(), "P_max".into()], 1)
                .meta("targets", targets.join(" "));
            for (i, t) in targets.iter().enumerate() {
                let m = sc.max_power(t)?;
                table.push(i, vec![(i + 1) as f64, m.t_star, m.p_max]);
            }
            emit(&table, &common)
        }
        Command::Gains { params, power, common } => {
            let cfg = load_config(&common)?;
            let p = resolve_params(&cfg, &params)?;
            let report = gain_report(&p, power)?;
            match common.format {
                FormatArg::Json => Ok(json(&report)),
                FormatArg::Csv => {
                    let mut s = String::new();
                    for e in &report.entries {
                        let g = |x: Option<f64>| x.map(fmt_number).unwrap_or_else(|| "undefined".into());
                        let _ = writeln!(
                            s,
                            "[{}] E_nr = {} E_r1 = {} E_r2 = {} G1 = {} G2 = {}",
                            e.target,
                            e.e_nr,
                            e.e_r1,
                            e.e_r2,
                            g(e.g1),
                            g(e.g2)
                        );
                        if let Some(pw) = &e.power {
                            let _ = writeln!(
                                s,
                                "[{}] P_nr = {} P_r1 = {} P_r2 = {} eta1 = {} eta2 = {}",
                                e.target,
                                pw.nr.p_max,
                                pw.r1.p_max,
                                pw.r2.p_max,
                                g(pw.eta1),
                                g(pw.eta2)
                            );
                        }
                    }
                    Ok(s)
                }
            }
        }
        Command::Landscape { params, points, common } => {
            let cfg = load_config(&common)?;
            let mut p = resolve_params(&cfg, &params)?;
            if params.variant.is_none() && cfg.topology.is_none() {
                p.variant = Variant::Custom;
            }
            if p.thetas.is_none() {
                p.thetas = Some(vec![0.0; p.n]);
            }
            let target = params
                .target
                .as_ref()
                .and_then(|t| t.first().cloned())
                .unwrap_or_else(|| p.terminal_battery());
            let l = phase_landscape(&p, &target, points.unwrap_or(cfg.landscape_points))?;
            let mut cols: Vec<String> = (1..=p.n).map(|k| format!("theta{k}")).collect();
            cols.push(format!("E_{target}"));
            let mut table = experiments::sweep::param_metadata(SweepTable::new("landscape", cols, p.n), &p)
                .meta("target", &target)
                .meta("argmax", format!("{:?}", l.argmax));
            for (i, v) in l.values.iter().enumerate() {
                let mut row = l.point(i);
                row.push(*v);
                table.push(i, row);
            }
            emit(&table, &common)
        }
        Command::Sweep { common } => {
            let cfg = load_config(&common)?;
            let table = run_sweep(&cfg)?;
            let out = common.out.clone().or_else(|| cfg.out_dir.clone());
            emit(&table, &Common { out, ..common })
        }
        Command::Figure { id, common } => {
            let ids: Vec<FigureId> = if id == "all" {
                FigureId::ALL.to_vec()
            } else {
                vec![id.parse()?]
            };
            let cfg = match &common.config {
                Some(_) => load_config(&common)?,
                None => RunConfig::default(),
            };
            let dir = common
                .out
                .clone()
                .or(cfg.out_dir)
                .unwrap_or_else(|| Path::new(".").to_path_buf());
            let mut written = Vec::new();
            for id in ids {
                written.extend(run_figure(id, &dir, common.format.into(), common.deterministic)?);
            }
            Ok(listing(&written))
        }
        Command::Validate { common } => {
            let path = common.config.as_ref().ok_or_else(|| Error::Config {
                path: "--config".into(),
                message: "validate needs a config file".into(),
            })?;
            let cfg = RunConfig::load(path)?;
            let mut s = String::new();
            if let Some(net) = &cfg.network {
                let _ = writeln!(
                    s,
                    "network: {} modes, {} couplings",
                    net.modes.len(),
                    net.couplings.len()
                );
            }
            if cfg.topology.is_some() {
                let spec = network::build(&cfg.params()?)?;
                spec.check()?;
                let _ = writeln!(
                    s,
                    "topology: {} modes, {} couplings",
                    spec.modes.len(),
                    spec.couplings.len()
                );
            }
            s.push_str("ok\n");
            Ok(s)
        }
    }
}
