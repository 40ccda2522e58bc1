use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optinv::bench::{self, sweep, Pipeline, ResultRow, Settings, RESULTS_HEADER};

#[derive(Parser)]
#[command(name = "optinv", version, about = "Learn and invert black-box optical imaging systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Known-plaintext attack on triple random phase encryption.
    TrpeAttack(Opts),
    /// Single-pixel imaging with patterns learned from training pairs.
    SpiBlind(Opts),
    /// Single-pixel imaging with the true patterns.
    SpiKnown(Opts),
    /// Every pipeline in `pipelines` over the `k` x `s` grid.
    Sweep(Opts),
}

#[derive(Args)]
struct Opts {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// mnist, fashion-mnist, cifar100 or synthetic.
    #[arg(long)]
    dataset: Option<String>,
    /// Dataset file (IDX images or CIFAR-100 binary).
    #[arg(long)]
    data_path: Option<PathBuf>,
    /// Training-sample count; comma separated for sweeps.
    #[arg(long)]
    k: Option<String>,
    /// Sampling ratio; comma separated for sweeps.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Any other configuration key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Opts {
    fn settings(&self) -> optinv::Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("dataset", self.dataset.clone()),
            ("data_path", self.data_path.as_ref().map(|p| p.display().to_string())),
            ("k", self.k.clone()),
            ("s", self.s.clone()),
            ("lr", self.lr.map(|v| v.to_string())),
            ("epochs", self.epochs.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("workers", self.workers.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        for pair in &self.overrides {
            s.set_pair(pair)?;
        }
        Ok(s)
    }
}

fn print_rows(rows: &[ResultRow]) {
    println!("{}", RESULTS_HEADER.join(","));
    for row in rows {
        println!("{}", row.fields().join(","));
    }
}

fn run(cli: Cli) -> optinv::Result<bool> {
    let (pipeline, opts) = match &cli.command {
        Command::TrpeAttack(o) => (Some(Pipeline::TrpeAttack), o),
        Command::SpiBlind(o) => (Some(Pipeline::SpiBlind), o),
        Command::SpiKnown(o) => (Some(Pipeline::SpiKnown), o),
        Command::Sweep(o) => (None, o),
    };
    let settings = opts.settings()?;
    let workers = settings.workers()?;
    match pipeline {
        Some(p) => {
            let cfg = settings.single(p)?;
            let record = sweep::with_workers(workers, || match p {
                Pipeline::TrpeAttack => bench::run_trpe_attack(&cfg),
                Pipeline::SpiBlind => bench::run_spi_blind(&cfg),
                Pipeline::SpiKnown => bench::run_spi_known(&cfg),
            })?
            .map_err(|e| {
                eprintln!("configuration echoed to {}", bench::pipeline::cell_dir(&cfg).join("config.txt").display());
                e
            })?;
            print_rows(&[record.row]);
            Ok(true)
        }
        None => {
            let cells = bench::expand_grid(&settings)?;
            let records = sweep::with_workers(workers, || bench::run_sweep(&cells))??;
            let rows: Vec<ResultRow> = records.into_iter().map(|r| r.row).collect();
            print_rows(&rows);
            Ok(rows.iter().all(ResultRow::is_ok))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some sweep cells failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
