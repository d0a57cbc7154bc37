use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use inferwatt_cli::commands::{
    cmd_fit, cmd_fleet, cmd_report, cmd_simulate, load_config, write_artifacts, CliError,
};
use inferwatt_cli::config::FormatConfig;

#[derive(Parser)]
#[command(name = "inferwatt", version, about = "Monte Carlo estimator of LLM inference energy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

impl Format {
    fn to_config(self) -> FormatConfig {
        match self {
            Format::Text => FormatConfig::Text,
            Format::Csv => FormatConfig::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit throughput models from the benchmark table
    Fit {
        /// Benchmark CSV; the embedded dataset when omitted
        #[arg(long)]
        benchmark: Option<PathBuf>,
        /// Fit a single model by exact name
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the configured scenario and print summaries
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Write the per-query sample CSV here
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Daily fleet energy for the configured scenarios
    Fleet {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Full document: fits, summaries, histogram, and fleet table
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit { benchmark, model, format } => {
            let doc = cmd_fit(benchmark.as_deref(), model.as_deref(), format.to_config())?;
            print!("{doc}");
            Ok(())
        }
        Command::Simulate { config, seed, samples_out, format } => {
            let loaded = load_config(&config)?;
            let artifacts = cmd_simulate(&loaded, seed, format.map(Format::to_config))?;
            let stdout = write_artifacts(
                &loaded,
                &artifacts.report,
                Some(&artifacts.samples_csv),
                Some(&artifacts.histogram_csv),
                samples_out.as_deref(),
            )?;
            if let Some(text) = stdout {
                print!("{text}");
            }
            Ok(())
        }
        Command::Fleet { config, seed } => {
            let loaded = load_config(&config)?;
            let report = cmd_fleet(&loaded, seed)?;
            print!("{report}");
            Ok(())
        }
        Command::Report { config, seed, samples_out, format } => {
            let loaded = load_config(&config)?;
            let artifacts = cmd_report(&loaded, seed, format.map(Format::to_config))?;
            let stdout = write_artifacts(
                &loaded,
                &artifacts.report,
                Some(&artifacts.samples_csv),
                Some(&artifacts.histogram_csv),
                samples_out.as_deref(),
            )?;
            if let Some(text) = stdout {
                print!("{text}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // Exit codes: 0 success, 1 usage/config error, 2 data error. Clap
    // would exit 2 on usage errors, so parse manually and remap.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            // help/version go to stdout and exit 0
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
