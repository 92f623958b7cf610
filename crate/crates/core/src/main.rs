use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use markov_loss::io::{self, CommandOptions, RunConfig};
use markov_loss::Error;

#[derive(Parser)]
#[command(
    name = "mlhmm",
    version,
    about = "Minimum-expected-loss HMM state decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sequences: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Decode simulated data without the outlier component.
    #[arg(long)]
    misspecified_emissions: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decode an observation file with the model and loss in the config.
    Decode {
        #[command(flatten)]
        common: Common,
        /// Observation file (overrides "observations" in the config).
        input: Option<PathBuf>,
    },
    /// Decode a pairwise-marginals table produced by any external model.
    DecodeMarginals {
        #[command(flatten)]
        common: Common,
        /// Pairwise marginals file (overrides "pairwise" in the config).
        input: Option<PathBuf>,
    },
    /// Write simulated sequences and their true states.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Run decoders over a grid of loss settings on simulated data.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Count call and transition errors of a predicted path against the truth.
    Compare {
        #[command(flatten)]
        common: Common,
        truth: Option<PathBuf>,
        prediction: Option<PathBuf>,
    },
}

fn setup(common: &Common) -> Result<(RunConfig, CommandOptions), Error> {
    let cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let opts = CommandOptions {
        out: common.out.clone(),
        seed: common.seed,
        sequences: common.sequences,
        length: common.length,
        threads: common.threads,
        misspecified_emissions: common.misspecified_emissions,
    };
    Ok((cfg, opts))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Decode { common, input } => {
            let (cfg, opts) = setup(&common)?;
            let out = io::cmd_decode(&cfg, &opts, input.as_deref())?;
            report_decode(&out);
        }
        Command::DecodeMarginals { common, input } => {
            let (cfg, opts) = setup(&common)?;
            let out = io::cmd_decode_marginals(&cfg, &opts, input.as_deref())?;
            report_decode(&out);
        }
        Command::Simulate { common } => {
            let (cfg, opts) = setup(&common)?;
            let path = io::cmd_simulate(&cfg, &opts)?;
            println!("wrote {}", path.display());
        }
        Command::Sweep { common } => {
            let (cfg, opts) = setup(&common)?;
            let out = io::cmd_sweep(&cfg, &opts)?;
            print!("{}", io::sweep_summary(&out.table));
            println!("wrote {}", out.csv_file.display());
        }
        Command::Compare {
            common,
            truth,
            prediction,
        } => {
            let (cfg, opts) = setup(&common)?;
            let truth = truth
                .or(cfg.truth.clone())
                .ok_or_else(|| Error::Config("no truth path given".into()))?;
            let prediction = prediction
                .or(cfg.prediction.clone())
                .ok_or_else(|| Error::Config("no prediction path given".into()))?;
            let report = io::cmd_compare(&truth, &prediction, &opts)?;
            println!("{}", markov_loss::metrics::ErrorReport::csv_header());
            println!("{}", report.csv_row());
        }
    }
    Ok(())
}

fn report_decode(out: &io::DecodeOutput) {
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!("expected loss {:.6}", out.expected_loss);
    println!(
        "wrote {} and {}",
        out.positions_file.display(),
        out.segments_file.display()
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
