//! Real images, complex light fields and unitary 2D Fourier transforms.
//!
//! Every grid is stored row-major, so flattening a grid into the vectors fed
//! to the regression is a plain copy of its backing buffer.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{check_dim, Error, Result};

/// A real image with pixel values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

/// What [`devectorize_image`] does with values outside `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutOfRange {
    Reject,
    Clamp,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        check_grid(height, width)?;
        check_dim("image pixels", height * width, pixels.len())?;
        for (index, &value) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Range {
                    index,
                    value,
                    range: "[0, 1]",
                });
            }
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    /// Builds an image from arbitrary finite values, clamping them into `[0, 1]`.
    /// NaN maps to 0.
    pub fn from_clamped(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        check_grid(height, width)?;
        check_dim("image pixels", height * width, values.len())?;
        let pixels = values
            .into_iter()
            .map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
            .collect();
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::filled(height, width, 0.0)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be positive");
        assert!((0.0..=1.0).contains(&value), "pixel value outside [0, 1]");
        Self {
            height,
            width,
            pixels: vec![value; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Row-major copy of the pixels.
    pub fn vectorize(&self) -> Vec<f64> {
        self.pixels.clone()
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    /// The image as a real-amplitude complex field.
    pub fn to_field(&self) -> ComplexField {
        ComplexField {
            height: self.height,
            width: self.width,
            values: self.pixels.iter().map(|&p| Complex64::new(p, 0.0)).collect(),
        }
    }
}

/// A complex amplitude grid, e.g. a ciphertext light field.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    height: usize,
    width: usize,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(height: usize, width: usize, values: Vec<Complex64>) -> Result<Self> {
        check_grid(height, width)?;
        check_dim("field values", height * width, values.len())?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(index));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "field dimensions must be positive");
        Self {
            height,
            width,
            values: vec![Complex64::new(0.0, 0.0); height * width],
        }
    }

    /// Field with real amplitudes taken from `values`, which need not lie in `[0, 1]`.
    pub fn from_real(height: usize, width: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            height,
            width,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.width + col]
    }

    pub fn vectorize(&self) -> Vec<Complex64> {
        self.values.clone()
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Euclidean norm over all entries.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn same_shape(&self, other: &ComplexField) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub(crate) fn map_in_place(&mut self, mut f: impl FnMut(usize, Complex64) -> Complex64) {
        for (i, v) in self.values.iter_mut().enumerate() {
            *v = f(i, *v);
        }
    }

    /// Real parts, clamped into an [`Image`].
    pub fn real_part_image(&self) -> Image {
        let re = self.values.iter().map(|v| v.re).collect();
        Image::from_clamped(self.height, self.width, re).expect("shape already validated")
    }
}

fn check_grid(height: usize, width: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid dimensions must be positive, got {height}x{width}"
        )));
    }
    Ok(())
}

/// Forward 2D DFT, scaled by `1/sqrt(height * width)` so it preserves the norm.
pub fn dft2(field: &ComplexField) -> ComplexField {
    transform(field, FftDirection::Forward)
}

/// Inverse of [`dft2`] under the same unitary scaling.
pub fn idft2(field: &ComplexField) -> ComplexField {
    transform(field, FftDirection::Inverse)
}

fn transform(field: &ComplexField, direction: FftDirection) -> ComplexField {
    let (h, w) = (field.height, field.width);
    let mut planner = FftPlanner::<f64>::new();
    let mut data = field.values.clone();

    let row_fft = planner.plan_fft(w, direction);
    row_fft.process(&mut data);

    // columns: transpose, transform rows, transpose back
    let mut transposed = vec![Complex64::new(0.0, 0.0); h * w];
    transpose(&data, &mut transposed, h, w);
    let col_fft = planner.plan_fft(h, direction);
    col_fft.process(&mut transposed);
    transpose(&transposed, &mut data, w, h);

    let scale = 1.0 / ((h * w) as f64).sqrt();
    for v in &mut data {
        *v *= scale;
    }
    ComplexField {
        height: h,
        width: w,
        values: data,
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Rebuilds an image from a row-major vector.
pub fn devectorize_image(
    values: &[f64],
    height: usize,
    width: usize,
    out_of_range: OutOfRange,
) -> Result<Image> {
    check_grid(height, width)?;
    check_dim("devectorize", height * width, values.len())?;
    match out_of_range {
        OutOfRange::Reject => Image::new(height, width, values.to_vec()),
        OutOfRange::Clamp => Image::from_clamped(height, width, values.to_vec()),
    }
}

/// Rebuilds a complex field from a row-major vector. Any finite values are allowed.
pub fn devectorize_field(values: &[Complex64], height: usize, width: usize) -> Result<ComplexField> {
    check_grid(height, width)?;
    check_dim("devectorize", height * width, values.len())?;
    ComplexField::new(height, width, values.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(h: usize, w: usize, seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..h * w)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexField::new(h, w, values).unwrap()
    }

    /// Direct summation DFT with unitary scaling.
    fn naive_dft2(field: &ComplexField, sign: f64) -> Vec<Complex64> {
        let (h, w) = (field.height(), field.width());
        let scale = 1.0 / ((h * w) as f64).sqrt();
        let mut out = vec![c(0.0, 0.0); h * w];
        for u in 0..h {
            for v in 0..w {
                let mut acc = c(0.0, 0.0);
                for y in 0..h {
                    for x in 0..w {
                        let phase = sign
                            * 2.0
                            * std::f64::consts::PI
                            * ((u * y) as f64 / h as f64 + (v * x) as f64 / w as f64);
                        acc += field.get(y, x) * Complex64::from_polar(1.0, phase);
                    }
                }
                out[u * w + v] = acc * scale;
            }
        }
        out
    }

    fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn delta_transforms_to_flat_half() {
        let mut values = vec![c(0.0, 0.0); 4];
        values[0] = c(1.0, 0.0);
        let out = dft2(&ComplexField::new(2, 2, values).unwrap());
        for v in out.values() {
            assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn flat_half_inverts_to_delta() {
        let out = idft2(&ComplexField::new(2, 2, vec![c(0.5, 0.0); 4]).unwrap());
        assert!((out.values()[0] - c(1.0, 0.0)).norm() < 1e-15);
        for v in &out.values()[1..] {
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn constant_field_concentrates_at_dc() {
        let n = 8;
        let value = c(0.3, -0.2);
        let out = dft2(&ComplexField::new(n, n, vec![value; n * n]).unwrap());
        assert!((out.values()[0] - value * n as f64).norm() < 1e-12);
        for v in &out.values()[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_norm() {
        let f = random_field(32, 32, 7);
        let back = idft2(&dft2(&f));
        assert!(max_abs_diff(back.values(), f.values()) < 1e-12);
        assert!((idft2(&f).norm() - f.norm()).abs() < 1e-12 * f.norm());
        assert!((dft2(&f).norm() - f.norm()).abs() < 1e-12 * f.norm());
    }

    #[test]
    fn matches_direct_summation_on_small_grids() {
        for (h, w) in [(1, 1), (1, 5), (3, 2), (4, 4), (5, 7), (8, 8)] {
            let f = random_field(h, w, (h * 31 + w) as u64);
            assert!(max_abs_diff(dft2(&f).values(), &naive_dft2(&f, -1.0)) < 1e-10);
            assert!(max_abs_diff(idft2(&f).values(), &naive_dft2(&f, 1.0)) < 1e-10);
        }
    }

    #[test]
    fn linearity() {
        let f = random_field(16, 16, 1);
        let g = random_field(16, 16, 2);
        let (a, b) = (c(0.7, -1.3), c(-2.0, 0.25));
        let combo: Vec<_> = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(x, y)| a * x + b * y)
            .collect();
        let lhs = dft2(&ComplexField::new(16, 16, combo).unwrap());
        let (ff, fg) = (dft2(&f), dft2(&g));
        let rhs: Vec<_> = ff
            .values()
            .iter()
            .zip(fg.values())
            .map(|(x, y)| a * x + b * y)
            .collect();
        assert!(max_abs_diff(lhs.values(), &rhs) < 1e-12);
    }

    #[test]
    fn vectorize_is_row_major() {
        let img = Image::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(img.vectorize(), vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(img.get(1, 0), 0.3);
        let one = ComplexField::new(1, 1, vec![c(2.0, 3.0)]).unwrap();
        assert_eq!(one.vectorize(), vec![c(2.0, 3.0)]);
    }

    #[test]
    fn devectorize_field_accepts_any_finite_values() {
        let values = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let f = devectorize_field(&values, 2, 2).unwrap();
        assert_eq!(f.get(0, 1), c(2.0, 0.0));
        assert_eq!(f.get(1, 0), c(3.0, 0.0));
    }

    #[test]
    fn devectorize_length_mismatch() {
        let err = devectorize_image(&[0.5, 0.5, 0.5], 2, 2, OutOfRange::Reject).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn devectorize_range_handling() {
        let clamped = devectorize_image(&[-0.1, 0.5], 1, 2, OutOfRange::Clamp).unwrap();
        assert_eq!(clamped.pixels(), &[0.0, 0.5]);
        let err = devectorize_image(&[-0.1, 0.5], 1, 2, OutOfRange::Reject).unwrap_err();
        assert!(matches!(err, Error::Range { index: 0, .. }));
    }

    #[test]
    fn non_finite_field_rejected() {
        let err = ComplexField::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(1)));
    }

    proptest::proptest! {
        #[test]
        fn devectorize_inverts_vectorize(seed in 0u64..1000, h in 1usize..33, w in 1usize..33) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pixels: Vec<f64> = (0..h * w).map(|_| rng.random::<f64>()).collect();
            let img = Image::new(h, w, pixels).unwrap();
            let back = devectorize_image(&img.vectorize(), h, w, OutOfRange::Reject).unwrap();
            proptest::prop_assert_eq!(back, img);
        }
    }
}
