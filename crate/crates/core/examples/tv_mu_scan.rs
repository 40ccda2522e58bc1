//! Scans the TV data weight `mu` for blind and known-pattern reconstruction
//! on MNIST. Patterns are learned once per sampling ratio, then every `mu`
//! reuses them.
//!
//!     cargo run --release --example tv_mu_scan -- <mnist-idx-file> [k] [s-list] [mu-list] [num-test]
//!     cargo run --release --example tv_mu_scan -- data/mnist/images-idx3-ubyte 200 0.05,1 0.125,1 50

use optinv::datasets::{load_corpus, split, DatasetKind};
use optinv::linreg::{train_real, TrainingConfig, TrainingSet};
use optinv::metrics::evaluate_corpus;
use optinv::spi::{measure, pattern_count, Measurements, PatternSet, SensingMatrix};
use optinv::tv::{TvParams, TvSolver};
use optinv::Image;
use rayon::prelude::*;

fn list(arg: Option<&String>, default: &str) -> Vec<f64> {
    arg.map_or(default, String::as_str)
        .split(',')
        .map(|v| v.trim().parse().expect("number list"))
        .collect()
}

fn main() -> optinv::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(path) = args.first() else {
        eprintln!("usage: tv_mu_scan <mnist-idx-file> [k] [s-list] [mu-list] [num-test]");
        std::process::exit(2);
    };
    let k = args.get(1).map_or(200, |v| v.parse().expect("k"));
    let ss = list(args.get(2), "0.05,0.2,0.4,1");
    let mus = list(args.get(3), "0.0625,0.125,0.25,1,4");
    let num_test = args.get(4).map_or(50, |v| v.parse().expect("num-test"));

    let corpus = load_corpus(DatasetKind::Mnist, path.as_ref())?;
    let (train, test) = split(&corpus, k, num_test, 7)?;
    println!("   S        mu   blind (dB)   known (dB)");
    for s in ss {
        let n = pattern_count(s, 1024);
        let patterns = PatternSet::generate(n, 32, 32, 11)?;
        let measure_all = |imgs: &[Image]| -> optinv::Result<Vec<Measurements>> {
            imgs.iter().map(|o| measure(o, &patterns)).collect()
        };
        let data = TrainingSet::new(
            train.images.iter().map(Image::vectorize).collect(),
            measure_all(&train.images)?.into_iter().map(Measurements::into_vec).collect(),
        )?;
        let w = train_real(&data, &TrainingConfig::default())?;
        let learned = SensingMatrix::new(n, 32, 32, w.data().to_vec())?;
        let b = measure_all(&test.images)?;
        for &mu in &mus {
            let params = TvParams { mu, ..TvParams::default() };
            let mut scores = Vec::new();
            for a in [&learned, patterns.as_matrix()] {
                let solver = TvSolver::new(a, params.clone())?;
                let rec = b
                    .par_iter()
                    .map(|b| solver.solve(b).map(|r| r.image))
                    .collect::<optinv::Result<Vec<_>>>()?;
                scores.push(evaluate_corpus(&test.images, &rec)?.mean_psnr.unwrap_or(f64::INFINITY));
            }
            println!("{s:>4} {mu:>9} {:>12.2} {:>12.2}", scores[0], scores[1]);
        }
    }
    Ok(())
}
