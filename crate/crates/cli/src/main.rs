use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use infogen::scorer::TrainConfig;
use infogen_cli::{
    cmd_generate, cmd_perturb, cmd_score, cmd_synth, cmd_train, cmd_validate, CliError, RunConfig, TrainArgs,
    DEFAULT_CORPUS, DEFAULT_MODEL,
};

#[derive(Parser)]
#[command(name = "infogen", version, about = "Proportion-fact infographics from a design example library")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate infographics for a statement.
    Generate {
        statement: String,
        #[arg(long, default_value = DEFAULT_CORPUS)]
        corpus: PathBuf,
        #[arg(long, default_value = DEFAULT_MODEL)]
        model: PathBuf,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        m_prime: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0.02)]
        sigma_pos: f64,
        #[arg(long, default_value_t = 0.05)]
        sigma_size: f64,
        #[arg(long, default_value_t = 3.0)]
        snap_epsilon: f64,
        /// Also write per-output refinement traces as JSON lines.
        #[arg(long)]
        trace: bool,
    },
    /// Train the layout scorer on perturbation pairs.
    Train {
        #[arg(long, default_value = DEFAULT_CORPUS)]
        corpus: PathBuf,
        #[arg(long, default_value = DEFAULT_MODEL)]
        out: PathBuf,
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        n_train: usize,
        #[arg(long, default_value_t = 2_000)]
        n_val: usize,
        #[arg(long, default_value_t = 64)]
        hidden: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 0.9)]
        momentum: f64,
        #[arg(long, default_value_t = 32)]
        batch: usize,
        #[arg(long, default_value_t = 80)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a corpus file against the schema rules.
    Validate {
        #[arg(default_value = DEFAULT_CORPUS)]
        corpus: PathBuf,
    },
    /// Write a training/validation pair set.
    Perturb {
        #[arg(long, default_value = DEFAULT_CORPUS)]
        corpus: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2_000)]
        n_train: usize,
        #[arg(long, default_value_t = 200)]
        n_val: usize,
    },
    /// Score two draft files against each other.
    Score {
        #[arg(long, default_value = DEFAULT_MODEL)]
        model: PathBuf,
        draft_a: PathBuf,
        draft_b: PathBuf,
    },
    /// Write a synthetic example library.
    Synth {
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate {
            statement,
            corpus,
            model,
            out,
            m_prime,
            seed,
            iterations,
            sigma_pos,
            sigma_size,
            snap_epsilon,
            trace,
        } => {
            let config = RunConfig {
                corpus_path: corpus,
                model_path: model,
                output_dir: out,
                m_prime,
                seed,
                iterations,
                sigma_pos,
                sigma_size,
                snap_epsilon,
                trace,
            };
            let manifest = cmd_generate(&statement, &config)?;
            for o in &manifest.outputs {
                println!(
                    "{}  {:<32} example {}  score {:.3} -> {:.3}",
                    o.svg, o.choice, o.example_id, o.initial_anchor_score, o.final_anchor_score
                );
            }
        }
        Command::Train { corpus, out, metrics, n_train, n_val, hidden, lr, momentum, batch, epochs, seed } => {
            let args = TrainArgs {
                corpus_path: corpus,
                model_out: out,
                metrics_csv: metrics,
                n_train,
                n_val,
                config: TrainConfig { hidden, learning_rate: lr, momentum, batch_size: batch, epochs, seed },
            };
            let report = cmd_train(&args, |m| {
                eprintln!(
                    "epoch {:>3}  loss {:.4}  val acc {:.4} (original {:.4}, perturbed {:.4})",
                    m.epoch, m.train_loss, m.val_accuracy, m.val_accuracy_original, m.val_accuracy_perturbed
                );
            })?;
            println!(
                "best epoch {}: validation accuracy {:.4} (original vs perturbed {:.4})",
                report.best.epoch, report.best.val_accuracy, report.best.val_accuracy_original
            );
        }
        Command::Validate { corpus } => {
            let problems = cmd_validate(&corpus)?;
            if !problems.is_empty() {
                for p in &problems {
                    println!("{p}");
                }
                return Err(CliError::Invalid(format!("{} problem(s) found", problems.len())));
            }
            println!("ok");
        }
        Command::Perturb { corpus, out, seed, n_train, n_val } => {
            let data = cmd_perturb(&corpus, &out, seed, n_train, n_val)?;
            println!("wrote {} training and {} validation pairs", data.train.len(), data.val.len());
        }
        Command::Score { model, draft_a, draft_b } => {
            let (a, b) = cmd_score(&model, &draft_a, &draft_b)?;
            println!("{a:.6} {b:.6}");
        }
        Command::Synth { out, seed, n } => {
            let lib = cmd_synth(&out, seed, n)?;
            println!("wrote {} examples", lib.size());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
