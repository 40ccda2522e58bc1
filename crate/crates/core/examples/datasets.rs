//! Reads an IDX or CIFAR-100 file, converts it to 32x32 grayscale images,
//! splits it and writes a few test images as PGM.
//!
//!     cargo run --example datasets -- <mnist|fashion-mnist|cifar100> <file> [out-dir]

use std::path::PathBuf;

use optinv::datasets::{load_corpus, split, DatasetKind};
use optinv::pgm::save_pgm;

fn main() -> optinv::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [kind, path, rest @ ..] = args.as_slice() else {
        eprintln!("usage: datasets <mnist|fashion-mnist|cifar100> <file> [out-dir]");
        std::process::exit(2);
    };
    let kind: DatasetKind = kind.parse()?;
    let corpus = load_corpus(kind, path.as_ref())?;
    let mean = corpus.images.iter().flat_map(|i| i.pixels()).sum::<f64>()
        / (corpus.len() * 1024).max(1) as f64;
    println!("{kind}: {} images, mean intensity {mean:.4}", corpus.len());

    let (train, test) = split(&corpus, 100, 8, 0)?;
    println!("split into {} training and {} test images", train.len(), test.len());

    let out = rest.first().map_or_else(|| std::env::temp_dir().join("optinv-datasets"), PathBuf::from);
    std::fs::create_dir_all(&out)?;
    for (i, img) in test.images.iter().enumerate() {
        save_pgm(out.join(format!("test_{i}.pgm")), img)?;
    }
    println!("wrote {} PGM files to {}", test.len(), out.display());
    Ok(())
}
