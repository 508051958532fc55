use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcompress::{
    cmd_analyze, cmd_evaluate, cmd_optimize, cmd_report, cmd_stack, AnalyzeRequest, Overrides, Pool, Result,
    RunConfig, Which,
};

#[derive(Parser)]
#[command(name = "qcompress", version, about = "Compress spin-chain propagators into brickwall circuits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Each flag replaces the config key of the same name.
#[derive(Args)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    #[arg(long, global = true, value_delimiter = ',')]
    eval_sizes: Option<Vec<usize>>,
    #[arg(long, global = true, value_delimiter = ',')]
    archs: Option<Vec<String>>,
    #[arg(long, global = true, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
    #[arg(long, global = true, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    iterations: Option<Vec<usize>>,
    /// `paper` or `reduced`.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// `full` or `restricted`.
    #[arg(long, global = true)]
    cost: Option<String>,
    #[arg(long, global = true)]
    trotter_steps: Option<usize>,
    /// `NEEL` or `NEEL_QLM`.
    #[arg(long, global = true)]
    state: Option<String>,
}

impl Global {
    fn overrides(&self) -> Overrides {
        Overrides {
            model: self.model.clone(),
            ladder: self.ladder.clone(),
            eval_sizes: self.eval_sizes.clone(),
            archs: self.archs.clone(),
            depths: self.depths.clone(),
            times: self.times.clone(),
            grid: self.grid.clone(),
            iterations: self.iterations.clone(),
            cost: self.cost.clone(),
            seed: self.seed,
            out: self.out.clone(),
            workers: self.workers,
            trotter_steps: self.trotter_steps,
            state: self.state.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Warm-started optimization over the configured matrix.
    Optimize,
    /// ε of a checkpoint at the evaluation sizes.
    Evaluate {
        checkpoint: PathBuf,
        /// Add first- and second-order Trotter rows.
        #[arg(long)]
        trotter: bool,
    },
    /// One analysis report.
    Analyze {
        /// imbalance, string, otoc, errormap, blocks, spectrum or angles.
        which: String,
        checkpoints: Vec<PathBuf>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        center: Option<usize>,
    },
    /// ε of the checkpoint circuit applied n times.
    Stack {
        checkpoint: PathBuf,
        #[arg(long, short)]
        n: usize,
        #[arg(long)]
        size: Option<usize>,
    },
    /// Summary of every checkpoint in the output directory.
    Report,
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.global.config.as_deref(), &cli.global.overrides())?;
    match &cli.command {
        Command::Optimize => {
            let plan = cfg.plan()?;
            let pool = Pool::new(cfg.workers)?;
            let report = cmd_optimize(&plan, &pool)?;
            let failed = report.records.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} stages failed", report.records.len());
            }
        }
        Command::Evaluate { checkpoint, trotter } => {
            cmd_evaluate(&cfg, checkpoint, &cfg.eval_sizes, *trotter)?;
        }
        Command::Analyze { which, checkpoints, size, center } => {
            let req = AnalyzeRequest {
                which: Which::parse(which)?,
                checkpoints: checkpoints.clone(),
                size: *size,
                center: *center,
            };
            cmd_analyze(&cfg, &req)?;
        }
        Command::Stack { checkpoint, n, size } => {
            cmd_stack(&cfg, checkpoint, *n, *size)?;
        }
        Command::Report => {
            cmd_report(&cfg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
