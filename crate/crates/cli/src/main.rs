use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hokcov_cli::{run, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "hokcov", version, about = "Covariance models from higher-order kernels: variograms, fitting, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Empirical semivariogram of the input data (empvario.csv)
    Empvario(Opts),
    /// Two-stage weighted least squares fit (fit_report.txt, fit_model.txt, fit_trace.csv)
    Fit(Opts),
    /// Covariance and semivariogram on a lag grid (eval.csv, eval_spacetime.csv when beta is set)
    Eval(Opts),
    /// Gaussian field replicates at the input locations (simulate.csv)
    Simulate(Opts),
    /// Simulation envelope of the empirical semivariogram (envelope.csv, envelope.svg)
    Envelope(Opts),
    /// Minimum covariance-matrix eigenvalue on random configurations (pdcheck.txt)
    Pdcheck(Opts),
}

/// Every flag overrides the config key of the same name (dashes become
/// underscores). Use `none` to clear an optional value.
#[derive(Args, Default)]
struct Opts {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    x_column: Option<String>,
    #[arg(long)]
    y_column: Option<String>,
    #[arg(long)]
    z_column: Option<String>,
    #[arg(long)]
    value_column: Option<String>,
    /// Model record (as written by `fit`) supplying family and parameters
    #[arg(long)]
    model: Option<String>,
    /// gaussian_ho, bessel_c1, muller_c2, hole_effect, sine_cosine, cosine_exponential
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    nugget: Option<String>,
    /// low,high
    #[arg(long)]
    nugget_bounds: Option<String>,
    #[arg(long)]
    sill: Option<String>,
    #[arg(long)]
    sill_bounds: Option<String>,
    #[arg(long)]
    range: Option<String>,
    #[arg(long)]
    range_bounds: Option<String>,
    #[arg(long)]
    decay: Option<String>,
    #[arg(long)]
    decay_bounds: Option<String>,
    /// Space-time shift; enables the (h, t) grid in `eval`
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    n_bins: Option<String>,
    #[arg(long)]
    max_lag: Option<String>,
    #[arg(long)]
    global_budget: Option<String>,
    #[arg(long)]
    local_tol: Option<String>,
    #[arg(long)]
    local_max_evals: Option<String>,
    #[arg(long)]
    n_sim: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mean: Option<String>,
    #[arg(long)]
    h_max: Option<String>,
    #[arg(long)]
    n_h: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    n_t: Option<String>,
    #[arg(long)]
    pd_dim: Option<String>,
    #[arg(long)]
    pd_points: Option<String>,
    #[arg(long)]
    pd_seeds: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl Opts {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs: [(&str, &Option<String>); 35] = [
            ("input", &self.input),
            ("dim", &self.dim),
            ("x_column", &self.x_column),
            ("y_column", &self.y_column),
            ("z_column", &self.z_column),
            ("value_column", &self.value_column),
            ("model", &self.model),
            ("family", &self.family),
            ("r", &self.r),
            ("s", &self.s),
            ("nugget", &self.nugget),
            ("nugget_bounds", &self.nugget_bounds),
            ("sill", &self.sill),
            ("sill_bounds", &self.sill_bounds),
            ("range", &self.range),
            ("range_bounds", &self.range_bounds),
            ("decay", &self.decay),
            ("decay_bounds", &self.decay_bounds),
            ("beta", &self.beta),
            ("n_bins", &self.n_bins),
            ("max_lag", &self.max_lag),
            ("global_budget", &self.global_budget),
            ("local_tol", &self.local_tol),
            ("local_max_evals", &self.local_max_evals),
            ("n_sim", &self.n_sim),
            ("seed", &self.seed),
            ("mean", &self.mean),
            ("h_max", &self.h_max),
            ("n_h", &self.n_h),
            ("t_max", &self.t_max),
            ("n_t", &self.n_t),
            ("pd_dim", &self.pd_dim),
            ("pd_points", &self.pd_points),
            ("pd_seeds", &self.pd_seeds),
            ("output", &self.output),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let text = match &self.config {
            Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", path.display()))
            })?),
            None => None,
        };
        RunConfig::resolve(text.as_deref(), &self.overrides())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Cmd::Empvario(o) => (Command::Empvario, o),
        Cmd::Fit(o) => (Command::Fit, o),
        Cmd::Eval(o) => (Command::Eval, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
        Cmd::Envelope(o) => (Command::Envelope, o),
        Cmd::Pdcheck(o) => (Command::Pdcheck, o),
    };
    let result = opts.resolve().and_then(|cfg| {
        if opts.print_config {
            Ok(cfg.to_text())
        } else {
            run(&cfg, command)
        }
    });
    match result {
        Ok(summary) => {
            println!("{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
