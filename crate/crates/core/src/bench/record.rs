//! Result rows and their CSV form.

use std::path::Path;

use crate::bench::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::metrics::QualityReport;

pub const RESULTS_HEADER: [&str; 12] = [
    "pipeline",
    "dataset",
    "k",
    "s",
    "lr",
    "epochs",
    "seed",
    "mean_psnr_db",
    "std_psnr_db",
    "train_s",
    "infer_s_per_image",
    "status",
];

pub const VERSION: &str = concat!("optinv ", env!("CARGO_PKG_VERSION"));

/// One line of a results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub pipeline: String,
    pub dataset: String,
    pub k: usize,
    /// Empty for the TRPE attack.
    pub s: Option<f64>,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub mean_psnr_db: Option<f64>,
    pub std_psnr_db: Option<f64>,
    pub train_s: f64,
    pub infer_s_per_image: f64,
    /// `ok`, or `failed: <reason>`.
    pub status: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultRow {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Self {
            pipeline: cfg.pipeline.to_string(),
            dataset: cfg.dataset.kind.to_string(),
            k: cfg.num_train(),
            s: cfg.pipeline.is_spi().then_some(cfg.sampling_ratio),
            lr: cfg.learning_rate,
            epochs: cfg.epochs,
            seed: cfg.master_seed,
            mean_psnr_db: None,
            std_psnr_db: None,
            train_s: 0.0,
            infer_s_per_image: 0.0,
            status: "ok".into(),
        }
    }

    pub fn failed(cfg: &ExperimentConfig, err: &Error) -> Self {
        Self {
            status: format!("failed: {err}"),
            ..Self::for_config(cfg)
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn fields(&self) -> [String; 12] {
        [
            self.pipeline.clone(),
            self.dataset.clone(),
            self.k.to_string(),
            opt(self.s),
            self.lr.to_string(),
            self.epochs.to_string(),
            self.seed.to_string(),
            opt(self.mean_psnr_db),
            opt(self.std_psnr_db),
            self.train_s.to_string(),
            self.infer_s_per_image.to_string(),
            self.status.clone(),
        ]
    }

    /// Every column except the two wall-time ones.
    pub fn without_timing(&self) -> Self {
        Self {
            train_s: 0.0,
            infer_s_per_image: 0.0,
            ..self.clone()
        }
    }

    pub fn from_fields(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != RESULTS_HEADER.len() {
            return Err(Error::Format(format!("results row has {} columns", rec.len())));
        }
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Format(format!("bad number `{s}` in results row")))
        }
        let maybe = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
        Ok(Self {
            pipeline: rec[0].to_string(),
            dataset: rec[1].to_string(),
            k: num(&rec[2])?,
            s: maybe(&rec[3])?,
            lr: num(&rec[4])?,
            epochs: num(&rec[5])?,
            seed: num(&rec[6])?,
            mean_psnr_db: maybe(&rec[7])?,
            std_psnr_db: maybe(&rec[8])?,
            train_s: num(&rec[9])?,
            infer_s_per_image: num(&rec[10])?,
            status: rec[11].to_string(),
        })
    }
}

/// Outcome of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub config: ExperimentConfig,
    pub row: ResultRow,
    /// Absent for rows restored from an earlier run or failed runs.
    pub report: Option<QualityReport>,
    pub version: &'static str,
}

impl ResultRecord {
    pub fn mean_psnr(&self) -> Option<f64> {
        self.row.mean_psnr_db
    }
}

pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush().map_err(Error::at_path(path))?;
    Ok(())
}

/// Appends rows, writing the header first when the file is new.
pub fn append_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let fresh = !path.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(Error::at_path(path))?;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(RESULTS_HEADER)?;
    }
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush().map_err(Error::at_path(path))?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(Error::Format(format!("unexpected results header in {}", path.display())));
    }
    r.records().map(|rec| ResultRow::from_fields(&rec?)).collect()
}

pub fn write_per_image(path: &Path, psnr: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "psnr_db"])?;
    for (i, p) in psnr.iter().enumerate() {
        w.write_record([i.to_string(), p.to_string()])?;
    }
    w.flush().map_err(Error::at_path(path))?;
    Ok(())
}

pub fn read_per_image(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            rec.get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad per-image row in {}", path.display())))
        })
        .collect()
}
