//! Encrypts an image with a random triple phase key and decrypts it again.
//!
//!     cargo run --example trpe_roundtrip

use optinv::trpe::{decrypt, encrypt, PhaseMaskTriple};
use optinv::Image;

fn main() -> optinv::Result<()> {
    let n = 32;
    // a bright square on a black background
    let pixels = (0..n * n)
        .map(|i| {
            let (r, c) = (i / n, i % n);
            if (8..24).contains(&r) && (8..24).contains(&c) { 1.0 } else { 0.0 }
        })
        .collect();
    let plain = Image::new(n, n, pixels)?;
    let key = PhaseMaskTriple::generate(n, n, 2024);

    let cipher = encrypt(&plain, &key)?;
    let back = decrypt(&cipher, &key)?;
    let err = back
        .values()
        .iter()
        .zip(plain.pixels())
        .map(|(c, p)| (c - p).norm())
        .fold(0.0, f64::max);

    let energy: f64 = plain.pixels().iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("|C| / |O|           = {:.12}", cipher.norm() / energy);
    println!("max |D(E(O)) - O|   = {err:.3e}");

    let wrong = decrypt(&cipher, &PhaseMaskTriple::generate(n, n, 2025))?;
    let wrong_err = wrong
        .values()
        .iter()
        .zip(plain.pixels())
        .map(|(c, p)| (c - p).norm())
        .fold(0.0, f64::max);
    println!("with the wrong key  = {wrong_err:.3}");
    Ok(())
}
