//! The three experiment pipelines.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bench::config::{ExperimentConfig, Pipeline};
use crate::bench::record::{self, ResultRecord, ResultRow, VERSION};
use crate::datasets::{self, DatasetKind, ImageCorpus};
use crate::error::{Error, Result};
use crate::field::Image;
use crate::linreg::{self, TrainingSet, WeightMatrix};
use crate::metrics::{self, QualityReport};
use crate::pgm;
use crate::seed;
use crate::spi::{self, Measurements, PatternSet, SensingMatrix};
use crate::trpe::{self, PhaseMaskTriple};
use crate::tv::TvSolver;

/// Everything one experiment produces, before it is written to disk.
#[derive(Clone, Debug)]
pub struct CellOutput {
    pub report: QualityReport,
    /// Learned decryption matrix, learned patterns, or the true patterns.
    pub weights: WeightMatrix,
    pub references: Vec<Image>,
    pub recovered: Vec<Image>,
    pub train_seconds: f64,
    pub infer_seconds_per_image: f64,
}

/// Train and test images of an experiment. `corpus` is the already loaded
/// dataset file, if any; it is read from `cfg.dataset.path` otherwise.
pub fn load_split(cfg: &ExperimentConfig, corpus: Option<&ImageCorpus>) -> Result<(Vec<Image>, Vec<Image>)> {
    let d = &cfg.dataset;
    if d.kind == DatasetKind::Synthetic {
        let n = cfg.image_size;
        let base = seed::derive(d.split_seed, seed::tag::SYNTHETIC);
        let test = datasets::synthetic_corpus(d.num_test, n, n, seed::derive(base, 0));
        let train = datasets::synthetic_corpus(d.num_train, n, n, seed::derive(base, 1));
        return Ok((train.images, test.images));
    }
    let loaded;
    let corpus = match corpus {
        Some(c) => c,
        None => {
            let path = d.path.as_deref().ok_or_else(|| Error::Config("missing data_path".into()))?;
            loaded = datasets::load_corpus(d.kind, path)?;
            &loaded
        }
    };
    let (train, test) = datasets::split(corpus, d.num_train, d.num_test, d.split_seed)?;
    Ok((train.images, test.images))
}

/// Loads the dataset file named by `cfg`, or `None` for synthetic data.
pub fn load_corpus_for(cfg: &ExperimentConfig) -> Result<Option<ImageCorpus>> {
    match (&cfg.dataset.kind, &cfg.dataset.path) {
        (DatasetKind::Synthetic, _) => Ok(None),
        (kind, Some(path)) => datasets::load_corpus(*kind, path).map(Some),
        (_, None) => Err(Error::Config("missing data_path".into())),
    }
}

/// Runs an experiment in memory.
pub fn execute(cfg: &ExperimentConfig, corpus: Option<&ImageCorpus>) -> Result<CellOutput> {
    cfg.validate()?;
    let (train, test) = load_split(cfg, corpus)?;
    match cfg.pipeline {
        Pipeline::TrpeAttack => trpe_attack(cfg, &train, &test),
        Pipeline::SpiBlind | Pipeline::SpiKnown => spi(cfg, &train, &test),
    }
}

fn trpe_attack(cfg: &ExperimentConfig, train: &[Image], test: &[Image]) -> Result<CellOutput> {
    let n = cfg.image_size;
    let key = PhaseMaskTriple::generate(n, n, seed::derive(cfg.master_seed, seed::tag::KEY));

    let start = Instant::now();
    let pairs = trpe::gen_kpa_corpus(train, &key)?;
    let (inputs, targets) = pairs
        .into_iter()
        .map(|p| (p.ciphertext.into_values(), p.plaintext.into_pixels()))
        .unzip();
    let data = TrainingSet::<Complex64>::with_real_targets(inputs, targets)?;
    let w = linreg::train_complex(&data, &cfg.training())?;
    let train_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let recovered = test
        .par_iter()
        .map(|img| {
            let cipher = trpe::encrypt(img, &key)?;
            let y = w.predict(cipher.values())?;
            Image::from_clamped(n, n, y.iter().map(|v| v.re).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    finish(w.into(), test, recovered, train_seconds, start)
}

fn measure_all(images: &[Image], patterns: &PatternSet, sigma: f64, noise_seed: u64) -> Result<Vec<Measurements>> {
    images
        .par_iter()
        .enumerate()
        .map(|(i, img)| {
            let m = spi::measure(img, patterns)?;
            if sigma > 0.0 {
                spi::add_noise(&m, sigma, seed::derive(noise_seed, i as u64))
            } else {
                Ok(m)
            }
        })
        .collect()
}

fn spi(cfg: &ExperimentConfig, train: &[Image], test: &[Image]) -> Result<CellOutput> {
    let n = cfg.image_size;
    let num_patterns = spi::pattern_count(cfg.sampling_ratio, n * n);
    let patterns = PatternSet::generate(num_patterns, n, n, seed::derive(cfg.master_seed, seed::tag::PATTERNS))?;
    let noise = seed::derive(cfg.master_seed, seed::tag::NOISE);

    let start = Instant::now();
    let (operator, weights) = match cfg.pipeline {
        Pipeline::SpiBlind => {
            let measured = measure_all(train, &patterns, cfg.noise_sigma, seed::derive(noise, 0))?;
            let data = TrainingSet::new(
                train.iter().map(Image::vectorize).collect(),
                measured.into_iter().map(Measurements::into_vec).collect(),
            )?;
            let w = linreg::train_real(&data, &cfg.training())?;
            let estimated = SensingMatrix::new(num_patterns, n, n, w.data().to_vec())?;
            (estimated, WeightMatrix::from(w))
        }
        _ => {
            let truth = patterns.as_matrix().clone();
            let w = linreg::Weights::new(num_patterns, n * n, truth.data().to_vec())?;
            (truth, WeightMatrix::from(w))
        }
    };
    let solver = TvSolver::new(&operator, cfg.solver.clone())?;
    let train_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let measured = measure_all(test, &patterns, cfg.noise_sigma, seed::derive(noise, 1))?;
    let recovered = measured
        .par_iter()
        .map(|b| solver.solve(b).map(|r| r.image))
        .collect::<Result<Vec<_>>>()?;
    finish(weights, test, recovered, train_seconds, start)
}

fn finish(
    weights: WeightMatrix,
    test: &[Image],
    recovered: Vec<Image>,
    train_seconds: f64,
    infer_start: Instant,
) -> Result<CellOutput> {
    let infer_seconds_per_image = infer_start.elapsed().as_secs_f64() / test.len() as f64;
    Ok(CellOutput {
        report: metrics::evaluate_corpus(test, &recovered)?,
        weights,
        references: test.to_vec(),
        recovered,
        train_seconds,
        infer_seconds_per_image,
    })
}

/// Output directory of one experiment.
pub fn cell_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.join(cfg.cell_name())
}

fn config_text(cfg: &ExperimentConfig) -> String {
    format!(
        "# {VERSION}\n# grayscale luma {:?}, 28x28 images zero-padded to 32x32\n{}",
        datasets::LUMA,
        cfg.echo()
    )
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(Error::at_path(path))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(Error::at_path(path))
}

fn write_outputs(cfg: &ExperimentConfig, dir: &Path, out: &CellOutput, row: &ResultRow) -> Result<()> {
    out.weights.save(dir.join("weights.optw"))?;
    record::write_per_image(&dir.join("per_image.csv"), &out.report.per_image_psnr)?;
    let count = cfg.dump_images.min(out.references.len());
    if count > 0 {
        let images = dir.join("images");
        create_dir(&images)?;
        for (i, (reference, recovered)) in out.references.iter().zip(&out.recovered).take(count).enumerate() {
            pgm::save_pgm(images.join(format!("ref_{i:03}.pgm")), reference)?;
            pgm::save_pgm(images.join(format!("rec_{i:03}.pgm")), recovered)?;
            if cfg.dump_pairs {
                pgm::save_pgm(images.join(format!("pair_{i:03}.pgm")), &pgm::side_by_side(reference, recovered)?)?;
            }
        }
    }
    // written last: its presence marks a finished cell
    record::write_rows(&dir.join("record.csv"), std::slice::from_ref(row))
}

/// Runs one experiment and writes its cell directory: `config.txt`,
/// `weights.optw`, `per_image.csv`, PGM dumps under `images/` and a one-row
/// `record.csv`.
pub fn run_cell(cfg: &ExperimentConfig, corpus: Option<&ImageCorpus>) -> Result<ResultRecord> {
    cfg.validate()?;
    let dir = cell_dir(cfg);
    create_dir(&dir)?;
    let record_path = dir.join("record.csv");
    if record_path.exists() {
        std::fs::remove_file(&record_path).map_err(Error::at_path(&record_path))?;
    }
    write_text(&dir.join("config.txt"), &config_text(cfg))?;
    let out = execute(cfg, corpus)?;
    let row = ResultRow {
        mean_psnr_db: out.report.mean_psnr,
        std_psnr_db: out.report.std_psnr,
        train_s: out.train_seconds,
        infer_s_per_image: out.infer_seconds_per_image,
        ..ResultRow::for_config(cfg)
    };
    write_outputs(cfg, &dir, &out, &row)?;
    Ok(ResultRecord {
        config: cfg.clone(),
        row,
        report: Some(out.report),
        version: VERSION,
    })
}

/// A finished cell from an earlier run with the same configuration.
pub fn completed_cell(cfg: &ExperimentConfig) -> Option<ResultRecord> {
    let dir = cell_dir(cfg);
    let echo = std::fs::read_to_string(dir.join("config.txt")).ok()?;
    if echo != config_text(cfg) || !dir.join("weights.optw").is_file() {
        return None;
    }
    let rows = record::read_rows(&dir.join("record.csv")).ok()?;
    let [row] = rows.as_slice() else { return None };
    let expected = ResultRow::for_config(cfg);
    let same_cell = row.is_ok()
        && ResultRow {
            mean_psnr_db: None,
            std_psnr_db: None,
            ..row.without_timing()
        } == expected;
    let per_image = record::read_per_image(&dir.join("per_image.csv")).ok()?;
    if !same_cell || per_image.len() != cfg.dataset.num_test {
        return None;
    }
    let report = metrics::summarize(per_image);
    if report.mean_psnr != row.mean_psnr_db {
        return None;
    }
    Some(ResultRecord {
        config: cfg.clone(),
        row: row.clone(),
        report: Some(report),
        version: VERSION,
    })
}

fn run_checked(cfg: &ExperimentConfig, expected: Pipeline) -> Result<ResultRecord> {
    if cfg.pipeline != expected {
        return Err(Error::Config(format!(
            "config is for {}, not {expected}",
            cfg.pipeline
        )));
    }
    let record = run_cell(cfg, None)?;
    record::append_rows(&cfg.output_dir.join("results.csv"), std::slice::from_ref(&record.row))?;
    Ok(record)
}

/// Known-plaintext attack on a TRPE system: learn the decryption matrix from
/// K plaintext/ciphertext pairs and decrypt the test images with it.
pub fn run_trpe_attack(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    run_checked(cfg, Pipeline::TrpeAttack)
}

/// Blind single-pixel imaging: learn the patterns from K object/measurement
/// pairs, then reconstruct the test images by TV minimisation.
pub fn run_spi_blind(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    run_checked(cfg, Pipeline::SpiBlind)
}

/// Single-pixel imaging with the true patterns.
pub fn run_spi_known(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    run_checked(cfg, Pipeline::SpiKnown)
}
