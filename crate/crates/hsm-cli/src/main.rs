//! `hsm`: partition-function tools for hard-core models on graphs and
//! grid-discretized hard spheres.
//!
//! Every command is a pure function of its input files, flags, and seed:
//! the same invocation always produces byte-identical output. Exit codes:
//! 0 success, 1 invalid input or failed verification, 2 an enumeration or
//! size cap was exceeded, 3 the fugacity lies outside the admissible
//! regime.

mod converge;
mod io;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use hsm_core::error::{Error, Result};
use hsm_core::estimator::{estimate_hard_sphere, estimate_partition_function, EstimatorConfig};
use hsm_core::hardcore::partition_function_bruteforce;
use hsm_core::hs::{cell_clique_cover, cells_to_clique_cover, Discretization, EdgeRule};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "hsm", version, about = "Hard-core and hard-sphere partition functions")]
struct Cli {
    /// Worker threads (default: HSM_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format, where the command supports a choice.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact partition function of a small explicit instance.
    HcZ {
        /// Instance file (JSON; see README for the format).
        #[arg(long)]
        instance: PathBuf,
    },
    /// Monte Carlo estimate of the partition function over a clique cover.
    Estimate {
        /// Instance file; a hard-sphere file when the cover is "cells".
        #[arg(long)]
        instance: PathBuf,
        /// "singletons", "cells", inline JSON like [[0,1],[2]], or @file.
        #[arg(long, default_value = "singletons")]
        cover: String,
        /// Target relative accuracy.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Seed for the sampler; fixed seed, fixed output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Continuous hard-sphere estimate through the grid discretization.
    HsEstimate {
        /// Hard-sphere instance file (JSON with d, ell, lambda).
        #[arg(long)]
        instance: PathBuf,
        /// Target relative accuracy for the continuous value.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Margin inside the admissible fugacity regime.
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        /// Seed for the sampler; fixed seed, fixed output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Discretization convergence sweep for one-dimensional instances.
    ConvergeStudy {
        /// Hard-sphere instance file; must have d = 1.
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated grid resolutions to sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        rho_list: Vec<f64>,
        /// Per-resolution target relative accuracy.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Seed for the sampler; fixed seed, fixed output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Self-checks of the sampler, influence, and spectral machinery.
    Verify {
        /// stationarity, influence, saw, complex, bounds, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Seed for the randomized members of each battery.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional extra instance to put through the applicable checks.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(i32::from(code)),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    init_threads(cli.threads)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::HcZ { instance } => {
            require_format("hc-z", cli.format, Format::Json)?;
            let inst = io::read_instance(&instance)?;
            let z = partition_function_bruteforce(&inst)?;
            let text = match cli.format {
                Some(Format::Json) => serde_json::json!({ "z": z }).to_string(),
                _ => format!("{z:?}"),
            };
            io::write_output(&text, out)?;
            Ok(0)
        }
        Command::Estimate {
            instance,
            cover,
            epsilon,
            seed,
        } => {
            require_format("estimate", cli.format, Format::Json)?;
            let spec = io::parse_cover_spec(&cover)?;
            let (inst, cover) = match spec {
                io::CoverSpec::Cells => {
                    let (hs, rho) = io::read_hs_instance(&instance)?;
                    let rho = rho.ok_or_else(|| {
                        Error::Validation(
                            "the cells cover needs a rho field in the instance file".into(),
                        )
                    })?;
                    let disc = Discretization::new(hs, rho, EdgeRule::Strict)?;
                    let cells = cell_clique_cover(&disc)?;
                    let cover = cells_to_clique_cover(&disc, &cells)?;
                    let (inst, _points) = disc.explicit_graph()?;
                    (inst, cover)
                }
                _ => {
                    let inst = io::read_instance(&instance)?;
                    let cover = io::cover_for_instance(&spec, inst.vertex_count())?;
                    (inst, cover)
                }
            };
            let config = EstimatorConfig::new(epsilon, seed);
            let report = estimate_partition_function(&inst, &cover, &config)?;
            io::write_output(&serde_json::to_string_pretty(&report)?, out)?;
            Ok(0)
        }
        Command::HsEstimate {
            instance,
            epsilon,
            delta,
            seed,
        } => {
            require_format("hs-estimate", cli.format, Format::Json)?;
            let (hs, _rho) = io::read_hs_instance(&instance)?;
            let report = estimate_hard_sphere(&hs, epsilon, delta, seed)?;
            io::write_output(&serde_json::to_string_pretty(&report)?, out)?;
            Ok(0)
        }
        Command::ConvergeStudy {
            instance,
            rho_list,
            epsilon,
            seed,
        } => {
            require_format("converge-study", cli.format, Format::Csv)?;
            let (hs, _rho) = io::read_hs_instance(&instance)?;
            let csv = converge::converge_study(&hs, &rho_list, epsilon, seed)?;
            io::write_output(&csv, out)?;
            Ok(0)
        }
        Command::Verify {
            suite,
            seed,
            instance,
        } => {
            require_format("verify", cli.format, Format::Json)?;
            let extra = instance.map(|p| io::read_instance(&p)).transpose()?;
            let report = verify::run_suite(&suite, seed, extra.as_ref())?;
            let text = match cli.format {
                Some(Format::Json) => serde_json::to_string_pretty(&report)?,
                _ => verify::render_text(&report),
            };
            io::write_output(&text, out)?;
            if report.ok {
                Ok(0)
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.ok)
                    .map(|c| c.name.as_str())
                    .collect();
                eprintln!("verification failed: {}", failed.join(", "));
                Ok(1)
            }
        }
    }
}

/// Commands support exactly one optional format; anything else is refused
/// up front so a typo never silently falls back to the default rendering.
fn require_format(cmd: &str, given: Option<Format>, allowed: Format) -> Result<()> {
    match given {
        None => Ok(()),
        Some(f) if f == allowed => Ok(()),
        Some(Format::Json) => Err(Error::Validation(format!("{cmd} cannot produce json"))),
        Some(Format::Csv) => Err(Error::Validation(format!("{cmd} cannot produce csv"))),
    }
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("HSM_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                Error::Validation(format!("HSM_THREADS must be a positive integer, got {s:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Validation("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    }
    Ok(())
}
