//! Single-pixel imaging: illumination patterns and bucket-detector measurements.
//!
//! Each measurement is the inner product of the object with one pattern, so
//! the pattern set, stacked as rows, is exactly the weight matrix that the
//! blind reconstruction has to learn.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{check_dim, Error, Result};
use crate::field::Image;
use crate::seed;

/// A dense `rows x (height * width)` sensing operator. Rows need not be
/// nonnegative, so learned pattern estimates fit here as well.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingMatrix {
    rows: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl SensingMatrix {
    pub fn new(rows: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidArgument(
                "sensing matrix dimensions must be positive".into(),
            ));
        }
        check_dim("sensing matrix entries", rows * height * width, data.len())?;
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(index));
        }
        Ok(Self {
            rows,
            height,
            width,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.height * self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let m = self.cols();
        &self.data[n * m..(n + 1) * m]
    }

    /// `A x` for a vectorized image `x`, values unrestricted.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("sensing input", self.cols(), x.len())?;
        Ok(self
            .data
            .chunks_exact(self.cols())
            .map(|row| dot(row, x))
            .collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Illumination patterns with intensities in `[0, 1]`, one vectorized pattern per row.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternSet {
    matrix: SensingMatrix,
}

impl PatternSet {
    pub fn new(num_patterns: usize, height: usize, width: usize, rows: Vec<f64>) -> Result<Self> {
        let matrix = SensingMatrix::new(num_patterns, height, width, rows)?;
        if let Some(index) = matrix.data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Range {
                index,
                value: matrix.data[index],
                range: "[0, 1]",
            });
        }
        Ok(Self { matrix })
    }

    /// `num_patterns` patterns with i.i.d. uniform `[0, 1)` pixels.
    pub fn generate(num_patterns: usize, height: usize, width: usize, seed: u64) -> Result<Self> {
        if num_patterns == 0 {
            return Err(Error::InvalidArgument("at least one pattern is required".into()));
        }
        let mut rng = seed::rng(seed);
        let rows = (0..num_patterns * height * width)
            .map(|_| rng.random::<f64>())
            .collect();
        Self::new(num_patterns, height, width, rows)
    }

    pub fn num_patterns(&self) -> usize {
        self.matrix.rows
    }

    pub fn num_pixels(&self) -> usize {
        self.matrix.cols()
    }

    /// `N / M`.
    pub fn sampling_ratio(&self) -> f64 {
        self.num_patterns() as f64 / self.num_pixels() as f64
    }

    pub fn row(&self, n: usize) -> &[f64] {
        self.matrix.row(n)
    }

    pub fn as_matrix(&self) -> &SensingMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SensingMatrix {
        self.matrix
    }
}

/// Number of patterns for a sampling ratio, rounded to nearest (0.05 of 1024 pixels gives 51).
pub fn pattern_count(sampling_ratio: f64, num_pixels: usize) -> usize {
    ((sampling_ratio * num_pixels as f64).round() as usize).max(1)
}

/// Single-pixel intensity sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurements {
    intensities: Vec<f64>,
}

impl Measurements {
    pub fn new(intensities: Vec<f64>) -> Self {
        Self { intensities }
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.intensities
    }
}

/// Noise-free measurement: `I_n = sum_m P[n][m] * O[m]`.
pub fn measure(object: &Image, patterns: &PatternSet) -> Result<Measurements> {
    patterns.as_matrix().apply(object.pixels()).map(Measurements::new)
}

/// Adds zero-mean Gaussian noise with standard deviation `sigma * mean(|I|)`.
pub fn add_noise(m: &Measurements, sigma: f64, seed: u64) -> Result<Measurements> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 || m.is_empty() {
        return Ok(m.clone());
    }
    let scale = m.intensities.iter().map(|v| v.abs()).sum::<f64>() / m.len() as f64;
    let normal = Normal::new(0.0, sigma * scale)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = seed::rng(seed);
    Ok(Measurements::new(
        m.intensities
            .iter()
            .map(|v| v + normal.sample(&mut rng))
            .collect(),
    ))
}
