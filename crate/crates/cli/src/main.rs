use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsvm_churn::experiment::{self, ExperimentConfig};
use qsvm_churn::Error;

#[derive(Parser)]
#[command(name = "qsvm-churn", version, about = "Quantum-kernel vs classical SVM on the Telco churn data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest, drop collinear columns, one-hot encode and undersample.
    Preprocess(Common),
    /// Explained variance per component and the elbow point.
    PcaScan(Common),
    /// Train quantum-kernel and classical SVMs for each PCA dimension.
    Run(Common),
    /// Render metrics.json as a markdown table.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Kernel worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Telco churn CSV.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        if let Some(output) = &self.output {
            config.output_dir = output.clone();
        }
        if let Some(dataset) = &self.dataset {
            config.dataset_path = dataset.clone();
        }
        Ok(config)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::MissingArtifact(_) => 3,
        Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => 2,
        Error::Io { .. } => 1,
        Error::Capacity(_)
        | Error::Index(_)
        | Error::Shape(_)
        | Error::Argument(_)
        | Error::Format { .. }
        | Error::Schema(_)
        | Error::Parse { .. }
        | Error::Type(_)
        | Error::Json { .. }
        | Error::Csv(_)
        | Error::DegenerateLabels(_) => 2,
        _ => 1,
    }
}

fn execute(command: &Command) -> Result<(), Error> {
    match command {
        Command::Preprocess(c) => {
            let config = c.resolve()?;
            let r = experiment::preprocess(&config)?;
            println!(
                "{} rows ingested, {} after undersampling, {} encoded columns",
                r.rows_ingested, r.rows_after_undersampling, r.encoded_columns
            );
            println!("dropped: {}", r.drop_list().join(", "));
        }
        Command::PcaScan(c) => {
            let config = c.resolve()?;
            let r = experiment::pca_scan(&config)?;
            println!(
                "elbow at component {} (cumulative variance {}); full rank cumulative {}",
                r.elbow_index, r.cumulative_at_elbow, r.cumulative_full_rank
            );
        }
        Command::Run(c) => {
            let config = c.resolve()?;
            let r = experiment::run(&config)?;
            print!("{}", experiment::metrics_csv(&r));
        }
        Command::Report(c) => {
            let config = c.resolve()?;
            print!("{}", experiment::report(&config)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
