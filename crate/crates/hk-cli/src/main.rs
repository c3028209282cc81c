//! `hk`: command-line front end for the folding-model Herman-Kluk kernels.
//!
//! Emits deterministic CSV (UTF-8, `,`-separated, `#` comment headers with
//! the fully resolved parameters, floats at 17 significant digits). Exit
//! codes: 0 success, 2 argument error, 3 numerical failure.

mod commands;
mod output;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hk", version, about = "Herman-Kluk semiclassical kernels for the folding model")]
struct Cli {
    /// Folding strength g > 0
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Evolution interval tau > 0
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Planck constant hbar > 0
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Coherent-state width gamma > 0
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Optional key=value file (g, tau, hbar, gamma); explicit flags win
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel values on a q grid for the selected methods
    Kernel {
        /// q grid: a single value or min:max:count (inclusive)
        #[arg(long, default_value = "-5:5:501", allow_hyphen_values = true)]
        q: String,
        /// Comma list from {exact, sc, hk, hk2d, hksc}
        #[arg(long, default_value = "exact,hk,hksc")]
        methods: String,
        /// Trajectory step for the 2D method
        #[arg(long, default_value_t = 0.25)]
        dt: f64,
    },
    /// Exact + HK curves across several coherent-state widths
    SweepGamma {
        #[arg(long, default_value = "-5:5:201", allow_hyphen_values = true)]
        q: String,
        /// Comma list of l_gamma targets (mapped to gamma via the border formula)
        #[arg(long, default_value = "0.5,1,2,4")]
        lgamma: String,
    },
    /// Analytic vs numerically located shallow/deep border
    Border,
    /// Saddle inventory at the given q values
    Saddles {
        /// Comma list of q values
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Evolve a line manifold and detect caustics
    Manifold {
        /// Model: folding | morse
        #[arg(long, default_value = "folding")]
        model: String,
        #[arg(long)]
        q0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// hbar ladder at a fixed dimensionless target
    Scaling {
        /// Region: allowed | shallow | deep
        #[arg(long)]
        region: String,
        /// q/l for allowed/shallow, q/l_gamma for deep
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
        /// Comma list of hbar values
        #[arg(long, default_value = "1,0.5,0.25,0.125")]
        hbar_ladder: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("HK_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let params = match commands::resolve_params(
        cli.g,
        cli.tau,
        cli.hbar,
        cli.gamma,
        cli.config.as_deref(),
    ) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let result = match cli.command {
        Command::Kernel { q, methods, dt } => commands::cmd_kernel(&params, &q, &methods, dt),
        Command::SweepGamma { q, lgamma } => commands::cmd_sweep_gamma(&params, &q, &lgamma),
        Command::Border => commands::cmd_border(&params),
        Command::Saddles { q } => commands::cmd_saddles(&params, &q),
        Command::Manifold { model, q0, p_min, p_max, n, t, dt } => {
            commands::cmd_manifold(&params, &model, q0, p_min, p_max, n, t, dt)
        }
        Command::Scaling { region, target, hbar_ladder } => {
            commands::cmd_scaling(&params, &region, target, &hbar_ladder)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CmdError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
