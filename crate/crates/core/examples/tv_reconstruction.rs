//! Compressive single-pixel imaging with known patterns: total-variation
//! reconstruction against the pseudo-inverse baseline at several sampling
//! ratios.
//!
//!     cargo run --release --example tv_reconstruction

use optinv::metrics::{psnr, UNIT_PEAK};
use optinv::spi::{measure, pattern_count, PatternSet};
use optinv::tv::{reconstruct_pinv, TvParams, TvSolver};
use optinv::Image;

fn phantom(n: usize) -> optinv::Result<Image> {
    let pixels = (0..n * n)
        .map(|i| {
            let (r, c) = ((i / n) as f64, (i % n) as f64);
            let disc = (r - 12.0).powi(2) + (c - 18.0).powi(2) < 36.0;
            let bar = (20.0..26.0).contains(&r) && (4.0..28.0).contains(&c);
            if disc { 0.9 } else if bar { 0.5 } else { 0.1 }
        })
        .collect();
    Image::new(n, n, pixels)
}

fn main() -> optinv::Result<()> {
    let n = 32;
    let object = phantom(n)?;
    println!("   S     N   TV (dB)  pinv (dB)  iterations");
    for s in [0.05, 0.1, 0.2, 0.4] {
        let patterns = PatternSet::generate(pattern_count(s, n * n), n, n, 7)?;
        let b = measure(&object, &patterns)?;
        let solver = TvSolver::new(patterns.as_matrix(), TvParams::default())?;
        let tv = solver.solve(&b)?;
        let pinv = reconstruct_pinv(patterns.as_matrix(), &b)?;
        println!(
            "{s:>4} {:>5} {:>9.2} {:>10.2} {:>11}",
            patterns.num_patterns(),
            psnr(&object, &tv.image, UNIT_PEAK)?,
            psnr(&object, &pinv, UNIT_PEAK)?,
            tv.iterations_used
        );
    }
    Ok(())
}
