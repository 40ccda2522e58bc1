//! Known-plaintext attack on a TRPE system: collect plaintext/ciphertext
//! pairs, learn the complex inverse matrix by per-sample regression, and
//! decrypt unseen ciphertexts without the key.
//!
//!     cargo run --release --example clr_attack [size] [pairs]

use num_complex::Complex64;
use optinv::datasets::synthetic_corpus;
use optinv::linreg::{train_complex, TrainingConfig, TrainingSet};
use optinv::metrics::evaluate_corpus;
use optinv::trpe::{encrypt, gen_kpa_corpus, PhaseMaskTriple};
use optinv::Image;

fn main() -> optinv::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(8, |s| s.parse().expect("size"));
    let k: usize = args.next().map_or(2 * n * n, |s| s.parse().expect("pairs"));

    let key = PhaseMaskTriple::generate(n, n, 1);
    let known = synthetic_corpus(k, n, n, 2).images;
    let unseen = synthetic_corpus(20, n, n, 3).images;

    let pairs = gen_kpa_corpus(&known, &key)?;
    let (inputs, targets) = pairs
        .into_iter()
        .map(|p| (p.ciphertext.into_values(), p.plaintext.into_pixels()))
        .unzip();
    let data = TrainingSet::<Complex64>::with_real_targets(inputs, targets)?;
    let w = train_complex(&data, &TrainingConfig::default())?;

    let recovered = unseen
        .iter()
        .map(|img| {
            let y = w.predict(encrypt(img, &key)?.values())?;
            Image::from_clamped(n, n, y.iter().map(|v| v.re).collect())
        })
        .collect::<optinv::Result<Vec<_>>>()?;
    let report = evaluate_corpus(&unseen, &recovered)?;
    println!(
        "{n}x{n} images, {k} known pairs: mean PSNR {:.2} dB over {} unseen ciphertexts",
        report.mean_psnr.unwrap_or(f64::INFINITY),
        report.num_images
    );
    Ok(())
}
