//! Per-sample gradient-descent regression on small real and complex systems,
//! and the `.optw` weight file format.
//!
//!     cargo run --example regression

use num_complex::Complex64;
use optinv::linreg::{train_complex, train_real, training_loss, TrainingConfig, TrainingSet, WeightMatrix};

fn main() -> optinv::Result<()> {
    // y = 2x
    let real = TrainingSet::new(vec![vec![1.0], vec![2.0], vec![3.0]], vec![vec![2.0], vec![4.0], vec![6.0]])?;
    let cfg = TrainingConfig { learning_rate: 0.05, epochs: 200, ..Default::default() };
    let w = train_real(&real, &cfg)?;
    println!("real:    w = {:.9}, loss {:.2e}", w.get(0, 0), training_loss(&w, &real)?);

    // y = (2 - i) x
    let g = Complex64::new(2.0, -1.0);
    let xs = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)];
    let complex = TrainingSet::new(xs.iter().map(|&x| vec![x]).collect(), xs.iter().map(|&x| vec![g * x]).collect())?;
    let wc = train_complex(&complex, &cfg)?;
    println!("complex: w = {:.9}", wc.get(0, 0));

    let file = std::env::temp_dir().join("optinv-regression-example.optw");
    WeightMatrix::from(wc.clone()).save(&file)?;
    match WeightMatrix::load(&file)? {
        WeightMatrix::Complex(back) => println!("reloaded {}x{} complex matrix, equal: {}", back.rows(), back.cols(), back == wc),
        WeightMatrix::Real(_) => unreachable!("saved a complex matrix"),
    }
    std::fs::remove_file(file)?;
    Ok(())
}
