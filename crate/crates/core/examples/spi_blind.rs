//! Blind single-pixel imaging. The illumination patterns are unknown: they
//! are learned as the rows of a regression matrix from object/intensity
//! pairs, then used for TV reconstruction of new objects.
//!
//!     cargo run --release --example spi_blind [mnist-idx-file]
//!
//! Without a file, objects are random piecewise-constant blocks.

use optinv::datasets::{load_corpus, split, DatasetKind};
use optinv::linreg::{train_real, TrainingConfig, TrainingSet};
use optinv::metrics::evaluate_corpus;
use optinv::seed;
use optinv::spi::{measure, pattern_count, Measurements, PatternSet, SensingMatrix};
use optinv::tv::{TvParams, TvSolver};
use optinv::Image;
use rand::Rng;

fn blocks(count: usize, n: usize, seed: u64) -> Vec<Image> {
    let mut rng = seed::rng(seed);
    (0..count)
        .map(|_| {
            let levels: Vec<f64> = (0..16).map(|_| rng.random()).collect();
            let pixels = (0..n * n).map(|i| levels[(i / n) * 4 / n * 4 + (i % n) * 4 / n]).collect();
            Image::new(n, n, pixels).unwrap()
        })
        .collect()
}

fn main() -> optinv::Result<()> {
    let (k, s) = (200, 0.4);
    let (train, test, n, params) = match std::env::args().nth(1) {
        Some(path) => {
            let corpus = load_corpus(DatasetKind::Mnist, path.as_ref())?;
            let (train, test) = split(&corpus, k, 20, 1)?;
            (train.images, test.images, 32, TvParams::default())
        }
        // the default data weight is tuned for 32x32 digits
        None => (blocks(k, 16, 1), blocks(20, 16, 2), 16, TvParams { mu: 16.0, ..TvParams::default() }),
    };

    let patterns = PatternSet::generate(pattern_count(s, n * n), n, n, 3)?;
    let intensities = |imgs: &[Image]| -> optinv::Result<Vec<Measurements>> {
        imgs.iter().map(|o| measure(o, &patterns)).collect()
    };
    let data = TrainingSet::new(
        train.iter().map(Image::vectorize).collect(),
        intensities(&train)?.into_iter().map(Measurements::into_vec).collect(),
    )?;
    let w = train_real(&data, &TrainingConfig::default())?;
    let learned = SensingMatrix::new(patterns.num_patterns(), n, n, w.data().to_vec())?;

    let err = learned
        .data()
        .iter()
        .zip(patterns.as_matrix().data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("{} patterns learned from {k} pairs, max entry error {err:.3}", patterns.num_patterns());

    for (label, a) in [("learned", &learned), ("true", patterns.as_matrix())] {
        let solver = TvSolver::new(a, params.clone())?;
        let recovered = intensities(&test)?
            .iter()
            .map(|b| solver.solve(b).map(|r| r.image))
            .collect::<optinv::Result<Vec<_>>>()?;
        let report = evaluate_corpus(&test, &recovered)?;
        println!("{label:>8} patterns: mean PSNR {:.2} dB", report.mean_psnr.unwrap_or(f64::INFINITY));
    }
    Ok(())
}
