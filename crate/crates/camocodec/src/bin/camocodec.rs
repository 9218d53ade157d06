use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use camocodec::config::PipelineConfig;
use camocodec::pipeline;
use camocodec::synth::{write_texture_dataset, TextureSpec};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "camocodec", version, about = "Camouflage images as audio and measure the classification trade-off")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON pipeline configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `paths.output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Render every manifest image to a WAV file.
    Encode {
        #[command(flatten)]
        common: Common,
        /// Also write decoded and mel spectrogram PGMs.
        #[arg(long)]
        spectrograms: bool,
    },
    /// Extract MFCC feature files for the train and validation splits.
    Featurize(Common),
    /// Train the audio model (grid-searches when the config has a grid).
    Train(Common),
    /// Grid-search the audio model.
    Grid(Common),
    /// Evaluate the audio model on the validation features.
    Eval(Common),
    /// Train and evaluate the raw-pixel baseline classifier.
    Baseline(Common),
    /// Compare the audio model with the baseline.
    Compare(Common),
    /// Write the synthetic texture dataset and its manifest.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(&common.config).with_context(|| format!("loading {}", common.config.display()))?;
    if let Some(out) = &common.out {
        cfg.paths.output = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg = cfg.with_seed(seed);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode { common, spectrograms } => {
            let s = pipeline::cmd_encode(&load(&common)?, spectrograms)?;
            println!("wrote {} WAV files in {}", s.wavs.len(), s.timing.formatted);
            if !s.fidelity.is_empty() {
                let min = s.fidelity.iter().cloned().fold(f64::INFINITY, f64::min);
                println!("spectrogram correlation: min {min:.4}");
            }
        }
        Command::Featurize(common) => print!("{}", pipeline::cmd_featurize(&load(&common)?)?.render()),
        Command::Train(common) => report_training(pipeline::cmd_train(&load(&common)?)?),
        Command::Grid(common) => report_training(pipeline::cmd_grid(&load(&common)?)?),
        Command::Eval(common) => print!("{}", pipeline::cmd_eval(&load(&common)?)?.rendered),
        Command::Baseline(common) => print!("{}", pipeline::cmd_baseline(&load(&common)?)?.eval.rendered),
        Command::Compare(common) => print!("{}", pipeline::cmd_compare(&load(&common)?)?.text),
        Command::Synth { out, seed } => {
            let path = write_texture_dataset(&out, &TextureSpec { seed, ..TextureSpec::default() })?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn report_training(s: pipeline::TrainSummary) {
    if let Some(grid) = &s.grid {
        println!("grid: {} configurations, best #{}", grid.rows.len(), grid.best);
    }
    if let Some(last) = s.history.last() {
        println!("epochs {}  val_acc {:.4}  val_loss {:.4}  time {}", last.epoch, last.val_acc, last.val_loss, s.timing.formatted);
    } else {
        println!("no epochs run");
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
