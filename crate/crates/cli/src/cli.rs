use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hiswipt::{Engine, SweepAxis};

use crate::figures::FigureId;

#[derive(Debug, Parser)]
#[command(
    name = "hiswipt",
    version,
    about = "Outage analysis of PS-SWIPT two-way AF relaying with hardware impairments"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one scenario key; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    /// Base seed of the Monte Carlo streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo draws per estimate.
    #[arg(long = "mc-n", global = true, value_name = "N")]
    pub mc_n: Option<u64>,
    /// Gauss–Chebyshev nodes for the joint relaying term.
    #[arg(long = "quadrature-n", global = true, value_name = "N")]
    pub quadrature_n: Option<usize>,
    /// Write the CSV table here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// analytic, mc or both.
    #[arg(long, global = true, value_parser = parse_engine)]
    pub engine: Option<Engine>,
    /// Worker threads for sweeps and simulation (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: hiswipt::Error| e.to_string())
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: hiswipt::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// System outage and its components for one scenario.
    Outage {
        /// tdbc, mabc or direct; the closed form covers tdbc only.
        #[arg(long)]
        protocol: Option<String>,
    },
    /// Outage along one parameter axis.
    Sweep {
        /// rho, beta, k_ave, gamma_th, d_ar or R_th.
        #[arg(long, value_parser = parse_axis)]
        axis: Option<SweepAxis>,
        /// `v1,v2,...`, `lin:a:b:n` or `log:a:b:n`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Data table behind one of the figure presets.
    Figure { id: FigureId },
    /// PS ratio minimizing the outage.
    OptimizeBeta {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Fitted diversity order against the predicted one.
    Diversity {
        #[arg(long)]
        rho_min: Option<f64>,
        #[arg(long)]
        rho_max: Option<f64>,
        #[arg(long, default_value_t = 8)]
        points: usize,
    },
    /// Energy efficiency.
    Ee,
    /// Analytic against Monte Carlo on a fixed set of scenarios.
    Validate,
}
