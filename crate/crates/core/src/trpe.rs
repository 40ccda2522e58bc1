//! Triple random phase encryption.
//!
//! The plaintext is the real amplitude of the input field. Encryption
//! multiplies by a phase mask in the input plane, Fourier transforms,
//! multiplies by a second mask, inverse transforms and multiplies by a third
//! mask in the output plane. The whole chain is a unitary linear map, which is
//! what makes it vulnerable to a regression attack.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{dft2, idft2, ComplexField, Image};
use crate::seed;

/// The key: phase masks for the input, Fourier and output planes, in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMaskTriple {
    height: usize,
    width: usize,
    masks: [Vec<f64>; 3],
}

impl PhaseMaskTriple {
    pub fn new(height: usize, width: usize, r1: Vec<f64>, r2: Vec<f64>, r3: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("phase mask dimensions must be positive".into()));
        }
        let masks = [r1, r2, r3];
        for mask in &masks {
            crate::error::check_dim("phase mask", height * width, mask.len())?;
            if let Some(index) = mask.iter().position(|p| !(0.0..TAU).contains(p)) {
                return Err(Error::Range {
                    index,
                    value: mask[index],
                    range: "[0, 2pi)",
                });
            }
        }
        Ok(Self {
            height,
            width,
            masks,
        })
    }

    /// Draws every phase i.i.d. uniform on `[0, 2pi)`.
    pub fn generate(height: usize, width: usize, seed: u64) -> Self {
        assert!(height > 0 && width > 0, "phase mask dimensions must be positive");
        let mut rng = seed::rng(seed);
        let mut draw = || {
            (0..height * width)
                .map(|_| rng.random_range(0.0..TAU))
                .collect::<Vec<f64>>()
        };
        let masks = [draw(), draw(), draw()];
        Self {
            height,
            width,
            masks,
        }
    }

    /// All-zero phases, which turn the system into the identity.
    pub fn zeros(height: usize, width: usize) -> Self {
        let zero = vec![0.0; height * width];
        Self {
            height,
            width,
            masks: [zero.clone(), zero.clone(), zero],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn input_plane(&self) -> &[f64] {
        &self.masks[0]
    }

    pub fn fourier_plane(&self) -> &[f64] {
        &self.masks[1]
    }

    pub fn output_plane(&self) -> &[f64] {
        &self.masks[2]
    }

    fn check(&self, field: &ComplexField) -> Result<()> {
        crate::error::check_dim("key height", self.height, field.height())?;
        crate::error::check_dim("key width", self.width, field.width())
    }
}

fn modulate(field: &mut ComplexField, phases: &[f64], sign: f64) {
    field.map_in_place(|i, v| v * Complex64::from_polar(1.0, sign * phases[i]));
}

/// Encrypts a plaintext image.
pub fn encrypt(plaintext: &Image, key: &PhaseMaskTriple) -> Result<ComplexField> {
    encrypt_field(&plaintext.to_field(), key)
}

/// Applies the encryption map to an arbitrary input field.
pub fn encrypt_field(input: &ComplexField, key: &PhaseMaskTriple) -> Result<ComplexField> {
    key.check(input)?;
    let mut field = input.clone();
    modulate(&mut field, key.input_plane(), 1.0);
    let mut spectrum = dft2(&field);
    modulate(&mut spectrum, key.fourier_plane(), 1.0);
    let mut out = idft2(&spectrum);
    modulate(&mut out, key.output_plane(), 1.0);
    Ok(out)
}

/// Inverts [`encrypt_field`] by backward propagation with conjugate masks.
pub fn decrypt(ciphertext: &ComplexField, key: &PhaseMaskTriple) -> Result<ComplexField> {
    key.check(ciphertext)?;
    let mut field = ciphertext.clone();
    modulate(&mut field, key.output_plane(), -1.0);
    let mut spectrum = dft2(&field);
    modulate(&mut spectrum, key.fourier_plane(), -1.0);
    let mut out = idft2(&spectrum);
    modulate(&mut out, key.input_plane(), -1.0);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlainCipherPair {
    pub plaintext: Image,
    pub ciphertext: ComplexField,
}

/// Encrypts every image under one key, giving the attacker's known pairs.
pub fn gen_kpa_corpus(images: &[Image], key: &PhaseMaskTriple) -> Result<Vec<PlainCipherPair>> {
    images
        .iter()
        .map(|img| {
            Ok(PlainCipherPair {
                plaintext: img.clone(),
                ciphertext: encrypt(img, key)?,
            })
        })
        .collect()
}
