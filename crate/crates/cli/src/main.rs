use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sedx_cli::commands::{analyze, evaluate, group, predict, synth, train};
use sedx_cli::config::RunConfig;
use sedx_cli::error::CliError;

/// Seasonal encoder-decoder forecasting toolkit.
#[derive(Parser)]
#[command(name = "sedx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-series ACF/PACF tables, lengths, and total-variation ranking.
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (series_id,lag,acf,pacf).
        #[arg(long)]
        out: PathBuf,
        /// key=value summary file (stdout when omitted).
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        max_lag: Option<usize>,
        /// Also rank series by total variation and keep this top share.
        #[arg(long)]
        top_fraction: Option<f64>,
    },
    /// Generate a synthetic corpus from the configured seasonal process.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the [synth] seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train one model (kind comes from the config) on one sequence.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output model file (JSON).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        series: Option<String>,
        /// Override the [train] seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Forecast from a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Output CSV (t,prediction).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        series: Option<String>,
        /// Anchor of the first predicted step (default: last feasible).
        #[arg(long)]
        anchor: Option<usize>,
    },
    /// Score forecasts on the terminal test region, or compare result files.
    Evaluate(EvaluateCmd),
    /// Build background models covering a multi-sequence corpus.
    Group {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output registry file (JSON).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Override the [train] seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct EvaluateCmd {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model file to score.
    #[arg(long, conflicts_with_all = ["registry", "copy_previous"])]
    model: Option<PathBuf>,
    /// Registry file to score (multi-sequence).
    #[arg(long, conflicts_with = "copy_previous")]
    registry: Option<PathBuf>,
    /// Score the copy-previous baseline instead of a model.
    #[arg(long)]
    copy_previous: bool,
    #[arg(long)]
    series: Option<String>,
    /// Output results CSV (series_id,window_anchor,mase,mape).
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value summary file (stdout when omitted).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Compare two result files instead of evaluating a model.
    #[arg(long, num_args = 2, value_names = ["CANDIDATE", "BASELINE"])]
    compare: Option<Vec<PathBuf>>,
    /// Labels for the compared files, as "candidate,baseline".
    #[arg(long)]
    names: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> sedx_cli::Result<()> {
    match command {
        Command::Analyze {
            corpus,
            config,
            out,
            summary,
            max_lag,
            top_fraction,
        } => {
            let config = RunConfig::load(&config)?;
            analyze::run(&analyze::AnalyzeArgs {
                corpus: &corpus,
                config: &config,
                out: &out,
                summary: summary.as_deref(),
                max_lag,
                top_fraction,
            })
        }
        Command::Synth { config, out, seed } => {
            let mut config = RunConfig::load(&config)?;
            if let (Some(seed), Some(synth)) = (seed, config.synth.as_mut()) {
                synth.seed = seed;
            }
            synth::run(&config, &out)
        }
        Command::Train {
            corpus,
            config,
            out,
            series,
            seed,
        } => {
            let mut config = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                config.train.seed = seed;
            }
            train::run(&corpus, &config, &out, series.as_deref())
        }
        Command::Predict {
            model,
            corpus,
            out,
            series,
            anchor,
        } => predict::run(&model, &corpus, &out, series.as_deref(), anchor),
        Command::Evaluate(cmd) => run_evaluate(cmd),
        Command::Group {
            corpus,
            config,
            out,
            summary,
            seed,
        } => {
            let mut config = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                config.train.seed = seed;
            }
            group::run(&corpus, &config, &out, summary.as_deref())
        }
    }
}

fn run_evaluate(cmd: EvaluateCmd) -> sedx_cli::Result<()> {
    if let Some(files) = &cmd.compare {
        let names = cmd.names.as_deref().unwrap_or("candidate,baseline");
        let (a, b) = names.split_once(',').ok_or_else(|| {
            CliError::Usage("--names expects two comma-separated labels".into())
        })?;
        let kv = evaluate::compare(&files[0], &files[1], (a, b))?;
        match &cmd.summary {
            Some(path) => kv.write(path)?,
            None => print!("{}", kv.render()),
        }
        return Ok(());
    }

    let corpus = cmd
        .corpus
        .ok_or_else(|| CliError::Usage("evaluate requires --corpus (or --compare)".into()))?;
    let config_path = cmd
        .config
        .ok_or_else(|| CliError::Usage("evaluate requires --config (or --compare)".into()))?;
    let out = cmd
        .out
        .ok_or_else(|| CliError::Usage("evaluate requires --out (or --compare)".into()))?;
    let config = RunConfig::load(&config_path)?;
    let method = if cmd.copy_previous {
        evaluate::Method::CopyPrevious
    } else if let Some(path) = &cmd.registry {
        evaluate::Method::Registry(Box::new(sedx_cli::model_file::RegistryFile::load(path)?))
    } else if let Some(path) = &cmd.model {
        evaluate::Method::Model(Box::new(sedx_cli::model_file::ModelFile::load(path)?))
    } else {
        return Err(CliError::Usage(
            "evaluate needs one of --model, --registry, or --copy-previous".into(),
        ));
    };
    evaluate::run(&evaluate::EvaluateArgs {
        corpus: &corpus,
        config: &config,
        method,
        series: cmd.series.as_deref(),
        out: &out,
        summary: cmd.summary.as_deref(),
    })
}
