use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phaseret::io::{load_image, save_image};
use phaseret_bench::config::{ConfigOverrides, DenoiserSpec};
use phaseret_bench::report::{parse_rows_csv, rows_to_csv};
use phaseret_bench::{emit_table, run_experiment, BenchError, ExperimentConfig};

/// Phase-retrieval benchmark runner.
#[derive(Debug, Parser)]
#[command(name = "phaseret", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a sweep and write per-solve rows as CSV.
    Run(RunArgs),
    /// Summarize a rows CSV into the per-algorithm table.
    Table {
        input: PathBuf,
        /// Where to write the summary CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a denoiser to one image.
    Denoise {
        #[arg(long, default_value = "tv")]
        denoiser: String,
        input: PathBuf,
        output: PathBuf,
    },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// TOML file with the same keys as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Comma-separated subset of hio, prdeep, prdeep-dc, prdeep-l2.
    #[arg(long, value_delimiter = ',')]
    algs: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// e.g. `tv:weight=2,iters=50`, `median:window=3`, `cnn:path=w.bin`.
    #[arg(long)]
    denoiser: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Step size as a multiple of 1/L.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    linesearch: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    oversampling: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            dataset: self.dataset.clone(),
            algs: self.algs.clone(),
            alphas: self.alphas.clone(),
            denoiser: self.denoiser.clone(),
            lambda: self.lambda,
            tau: self.tau,
            iters: self.iters,
            linesearch: self.linesearch,
            seeds: self.seeds.clone(),
            oversampling: self.oversampling,
            out: self.out.clone(),
        }
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.clone(),
        source,
    })
}

fn read(path: &PathBuf) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.clone(),
        source,
    })
}

fn run(command: Command) -> Result<(), BenchError> {
    match command {
        Command::Run(args) => {
            let config = ExperimentConfig::resolve(args.config.as_deref(), &args.overrides())?;
            log::info!("running {config:?}");
            let rows = run_experiment(&config)?;
            write(&config.out, &rows_to_csv(&rows)?)?;
            print!("{}", emit_table(&rows)?.console);
        }
        Command::Table { input, out } => {
            let rows = parse_rows_csv(&read(&input)?)?;
            let table = emit_table(&rows)?;
            if let Some(out) = out {
                write(&out, &table.csv)?;
            }
            print!("{}", table.console);
        }
        Command::Denoise { denoiser, input, output } => {
            let spec: DenoiserSpec = denoiser.parse()?;
            let image = load_image(&input).map_err(|e| BenchError::config(e.to_string()))?;
            save_image(&spec.build()?.denoise(&image)?, &output)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
