//! A small K x S sweep of the blind and known-pattern SPI pipelines on
//! synthetic 8x8 images, written as a results table plus per-cell outputs.
//!
//!     cargo run --release --example sweep [out-dir]

use optinv::bench::{expand_grid, run_sweep, Settings, RESULTS_HEADER};

fn main() -> optinv::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir().join("optinv-sweep").display().to_string()
    });
    let mut settings = Settings::parse(
        "pipelines = spi-blind, spi-known, trpe-attack
         dataset = synthetic
         image_size = 8
         k = 32, 128
         s = 0.25, 1
         num_test = 20
         epochs = 100
         # noise-like 8x8 objects want a much stronger data term than digits
         tv.mu = 64
         seed = 5",
    )?;
    settings.set("out", &out)?;

    let cells = expand_grid(&settings)?;
    println!("{} cells -> {out}", cells.len());
    let records = run_sweep(&cells)?;
    println!("{}", RESULTS_HEADER.join(","));
    for r in &records {
        println!("{}", r.row.fields().join(","));
    }
    // a second call finds every cell finished and only rewrites the table
    run_sweep(&cells)?;
    Ok(())
}
