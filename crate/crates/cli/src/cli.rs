//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::RunConfig;
use crate::error::Result;
use crate::selfcheck;

#[derive(Debug, Parser)]
#[command(name = "lieflow", version, about = "Flow matching on Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a vector field between two distributions.
    Train(RunArgs),
    /// Integrate source samples through a trained field; writes trajectories.csv.
    Flow(RunArgs),
    /// Compare flow endpoints with target samples; writes report.json.
    Eval(RunArgs),
    /// Run the fast property suite; exit code = number of failed checks.
    Selfcheck(SelfcheckArgs),
}

/// Flags shared by the run commands. Each one may also be given as a key in
/// the `--config` file; flags win.
#[derive(Debug, Args)]
struct RunArgs {
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group id: r1, r2, se2, so3, se2xr2 (any rN and `x`-joined products).
    #[arg(long)]
    group: Option<String>,
    /// Source distribution id (hline, vline, circle, gaussian, delta:..).
    #[arg(long)]
    source: Option<String>,
    /// Target distribution id.
    #[arg(long)]
    target: Option<String>,
    /// Training steps.
    #[arg(long)]
    steps: Option<String>,
    /// Training batch size.
    #[arg(long)]
    batch: Option<String>,
    /// Adam learning rate.
    #[arg(long)]
    lr: Option<String>,
    /// Learning-rate schedule: cosine (anneal to zero) or constant.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Training times are drawn from [0, 1 - epsilon).
    #[arg(long)]
    epsilon: Option<String>,
    /// Comma-separated metric weights, one per algebra direction.
    #[arg(long)]
    weights: Option<String>,
    /// Comma-separated hidden layer widths.
    #[arg(long)]
    hidden: Option<String>,
    /// Half-length of line distributions.
    #[arg(long)]
    extent: Option<String>,
    /// Circle radius.
    #[arg(long)]
    radius: Option<String>,
    /// Jitter standard deviation.
    #[arg(long)]
    sigma: Option<String>,
    /// Standard deviation of the gaussian distribution.
    #[arg(long)]
    spread: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Checkpoint path (default <out>/checkpoint.json).
    #[arg(long)]
    checkpoint: Option<String>,
    /// Trajectories CSV to evaluate instead of flowing a checkpoint.
    #[arg(long)]
    input: Option<String>,
    /// Number of samples to flow.
    #[arg(long)]
    n: Option<String>,
    /// Lie-Euler integration steps.
    #[arg(long)]
    flow_steps: Option<String>,
    /// Permutations for the MMD test.
    #[arg(long)]
    permutations: Option<String>,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    /// Corrupt the SE(2) exponential to exercise the failure path.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("group", self.group),
            ("source", self.source),
            ("target", self.target),
            ("steps", self.steps),
            ("batch", self.batch),
            ("lr", self.lr),
            ("schedule", self.schedule),
            ("seed", self.seed),
            ("epsilon", self.epsilon),
            ("weights", self.weights),
            ("hidden", self.hidden),
            ("extent", self.extent),
            ("radius", self.radius),
            ("sigma", self.sigma),
            ("spread", self.spread),
            ("out", self.out),
            ("checkpoint", self.checkpoint),
            ("input", self.input),
            ("n", self.n),
            ("flow-steps", self.flow_steps),
            ("permutations", self.permutations),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v);
            }
        }
        Ok(config)
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Train(args) => {
            let out = commands::train(&args.into_config()?)?;
            out.files.iter().for_each(|p| println!("wrote {}", p.display()));
        }
        Command::Flow(args) => {
            let out = commands::flow(&args.into_config()?)?;
            out.files.iter().for_each(|p| println!("wrote {}", p.display()));
        }
        Command::Eval(args) => {
            let (out, report) = commands::eval(&args.into_config()?)?;
            let (m, p) = (&report.metrics, &report.permutation_test);
            println!(
                "mmd {:.6}  energy {:.6}  null q95 {:.6}  q99 {:.6}  p {:.4}  defect {:.2e}",
                m.mmd, m.energy_distance, p.threshold_95, p.threshold_99, p.p_value, m.manifold_defect
            );
            out.files.iter().for_each(|p| println!("wrote {}", p.display()));
        }
        Command::Selfcheck(args) => {
            let failed = selfcheck::run_and_print(args.inject_fault);
            return Ok(failed.min(u8::MAX as usize) as u8);
        }
    }
    Ok(0)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
