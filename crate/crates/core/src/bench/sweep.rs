//! Grids of experiments.

use std::path::Path;

use rayon::prelude::*;

use crate::bench::config::{ExperimentConfig, Pipeline, Settings};
use crate::bench::pipeline::{completed_cell, load_corpus_for, run_cell};
use crate::bench::record::{self, ResultRecord, ResultRow, VERSION};
use crate::error::{Error, Result};
use crate::seed;

/// Seed of grid point `index`.
pub fn cell_seed(master_seed: u64, index: usize) -> u64 {
    seed::derive(master_seed, seed::tag::CELL.wrapping_add(index as u64))
}

/// Expands the settings into the experiments of a sweep, ordered by
/// pipeline, then K, then S.
///
/// Each `(K, S)` grid point gets its own seed; every pipeline at that point
/// uses it, so `spi-blind` and `spi-known` see the same patterns. The TRPE
/// attack does not depend on S and runs once per K, at the first S. The
/// train/test split is shared by the whole sweep.
pub fn expand_grid(settings: &Settings) -> Result<Vec<ExperimentConfig>> {
    let pipelines = settings.pipelines()?;
    let ks = settings.k_values()?;
    let ss = settings.s_values()?;
    if pipelines.is_empty() || ks.is_empty() {
        return Err(Error::Config("empty sweep grid: set `pipelines` and `k`".into()));
    }
    let master = settings.master_seed()?;
    let split = settings.split_seed()?;
    let mut cells = Vec::new();
    for &pipeline in &pipelines {
        for (ki, &k) in ks.iter().enumerate() {
            for (si, &s) in ss.iter().enumerate() {
                if pipeline == Pipeline::TrpeAttack && si > 0 {
                    continue;
                }
                let index = ki * ss.len() + si;
                cells.push(settings.experiment(pipeline, k, s, cell_seed(master, index), split)?);
            }
        }
    }
    Ok(cells)
}

/// Runs every cell, reusing cells finished by an earlier run, and writes
/// `results.csv` under the output directory with one row per cell in grid
/// order. A failing cell yields a `failed: ...` row and the sweep goes on.
/// Cells run in parallel on the current rayon pool.
pub fn run_sweep(cells: &[ExperimentConfig]) -> Result<Vec<ResultRecord>> {
    let first = cells.first().ok_or(Error::Empty("sweep grid"))?;
    if cells.iter().any(|c| c.dataset.kind != first.dataset.kind || c.dataset.path != first.dataset.path) {
        return Err(Error::Config("all sweep cells must share one dataset".into()));
    }
    if cells.iter().any(|c| c.output_dir != first.output_dir) {
        return Err(Error::Config("all sweep cells must share one output directory".into()));
    }
    let corpus = load_corpus_for(first)?;
    let records: Vec<ResultRecord> = cells
        .par_iter()
        .map(|cfg| {
            completed_cell(cfg).unwrap_or_else(|| match run_cell(cfg, corpus.as_ref()) {
                Ok(record) => record,
                Err(err) => ResultRecord {
                    config: cfg.clone(),
                    row: ResultRow::failed(cfg, &err),
                    report: None,
                    version: VERSION,
                },
            })
        })
        .collect();
    let rows: Vec<ResultRow> = records.iter().map(|r| r.row.clone()).collect();
    record::write_rows(&first.output_dir.join("results.csv"), &rows)?;
    Ok(records)
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Reads back the summary table of a sweep.
pub fn read_results(output_dir: &Path) -> Result<Vec<ResultRow>> {
    record::read_rows(&output_dir.join("results.csv"))
}
