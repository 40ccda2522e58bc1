//! Per-sample gradient-descent linear regression, `y = W x`, over real or
//! complex inputs.
//!
//! For each training pair the current output `y' = W x` is computed and every
//! weight is updated with `w_nm += r (y_n - y'_n) conj(x_m)`, i.e. a rank-1
//! outer-product step. The conjugate is the identity for real inputs, so a
//! single generic loop serves both the real and the complex rule.
//!
//! Output rows never interact: row `n` of `W` only sees target component `n`.
//! Training therefore runs over independent blocks of rows, each block
//! streaming through the samples, and the result is bitwise identical no
//! matter how the blocks are scheduled.

use std::fmt::Debug;
use std::io::{Read, Write};
use std::ops::{Add, AddAssign, Mul, Sub};
use std::path::Path;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::seed;

/// Weights beyond this magnitude count as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

const ROW_BLOCK: usize = 16;

/// Field of the regression: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + 'static
{
    fn zero() -> Self;
    fn from_real(v: f64) -> Self;
    fn conj(self) -> Self;
    fn scale(self, r: f64) -> Self;
    fn abs_sqr(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(v: f64) -> Self {
        v
    }
    fn conj(self) -> Self {
        self
    }
    fn scale(self, r: f64) -> Self {
        self * r
    }
    fn abs_sqr(self) -> f64 {
        self * self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn scale(self, r: f64) -> Self {
        self * r
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Dense row-major `rows x cols` weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Weights<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("weight matrix dimensions must be positive".into()));
        }
        check_dim("weight entries", rows * cols, data.len())?;
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(index));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut w = Self::zeros(n, n);
        for i in 0..n {
            w.data[i * n + i] = T::from_real(1.0);
        }
        w
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, n: usize, m: usize) -> T {
        self.data[n * self.cols + m]
    }

    pub fn row(&self, n: usize) -> &[T] {
        &self.data[n * self.cols..(n + 1) * self.cols]
    }

    /// `W x`.
    pub fn predict(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim("predict input", self.cols, x.len())?;
        Ok(self.data.chunks_exact(self.cols).map(|row| dot(row, x)).collect())
    }

    /// Largest entrywise distance `|a - b|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).abs_sqr().sqrt())
            .fold(0.0, f64::max)
    }
}

#[inline]
fn dot<T: Scalar>(row: &[T], x: &[T]) -> T {
    let mut acc = T::zero();
    for (w, v) in row.iter().zip(x) {
        acc += *w * *v;
    }
    acc
}

/// Real or complex weights, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightMatrix {
    Real(Weights<f64>),
    Complex(Weights<Complex64>),
}

impl From<Weights<f64>> for WeightMatrix {
    fn from(w: Weights<f64>) -> Self {
        WeightMatrix::Real(w)
    }
}

impl From<Weights<Complex64>> for WeightMatrix {
    fn from(w: Weights<Complex64>) -> Self {
        WeightMatrix::Complex(w)
    }
}

const MAGIC: &[u8; 4] = b"OPTW";
const FORMAT_VERSION: u8 = 1;

impl WeightMatrix {
    pub fn rows(&self) -> usize {
        match self {
            WeightMatrix::Real(w) => w.rows,
            WeightMatrix::Complex(w) => w.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            WeightMatrix::Real(w) => w.cols,
            WeightMatrix::Complex(w) => w.cols,
        }
    }

    /// Binary layout: `OPTW`, version byte, kind byte (0 real, 1 complex),
    /// little-endian `u32` rows and cols, then `f64` entries (re/im interleaved
    /// for complex), all little-endian.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        let (kind, rows, cols) = match self {
            WeightMatrix::Real(w) => (0u8, w.rows, w.cols),
            WeightMatrix::Complex(w) => (1u8, w.rows, w.cols),
        };
        let as_u32 = |v: usize| {
            u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("dimension {v} exceeds u32")))
        };
        out.write_all(MAGIC)?;
        out.write_all(&[FORMAT_VERSION, kind])?;
        out.write_all(&as_u32(rows)?.to_le_bytes())?;
        out.write_all(&as_u32(cols)?.to_le_bytes())?;
        let mut buf = Vec::with_capacity(rows * cols * 16);
        match self {
            WeightMatrix::Real(w) => w.data.iter().for_each(|v| buf.extend_from_slice(&v.to_le_bytes())),
            WeightMatrix::Complex(w) => w.data.iter().for_each(|v| {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }),
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut input: impl Read) -> Result<Self> {
        let mut header = [0u8; 14];
        input.read_exact(&mut header).map_err(|_| Error::Format("weight file header is truncated".into()))?;
        if &header[..4] != MAGIC {
            return Err(Error::Format("not a weight matrix file (bad magic)".into()));
        }
        if header[4] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported weight file version {}", header[4])));
        }
        let kind = header[5];
        let rows = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
        let per_entry = match kind {
            0 => 1,
            1 => 2,
            other => return Err(Error::Format(format!("unknown weight kind flag {other}"))),
        };
        let mut payload = Vec::new();
        input.read_to_end(&mut payload)?;
        let expected = rows * cols * per_entry * 8;
        if payload.len() != expected {
            return Err(Error::Length {
                expected,
                found: payload.len(),
            });
        }
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(match kind {
            0 => WeightMatrix::Real(Weights::new(rows, cols, values)?),
            _ => WeightMatrix::Complex(Weights::new(
                rows,
                cols,
                values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect(),
            )?),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(Error::at_path(path))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(Error::at_path(path))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_seed: u64,
    /// Initial weights are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// Visit samples in a fresh seeded permutation every epoch.
    pub shuffle: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 300,
            init_seed: 0,
            init_scale: 0.01,
            shuffle: true,
        }
    }
}

impl TrainingConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidArgument("init scale must be >= 0".into()));
        }
        Ok(())
    }
}

/// Input/target pairs. Inputs share one length `M`, targets one length `N`.
#[derive(Clone, Debug)]
pub struct TrainingSet<T> {
    inputs: Vec<Vec<T>>,
    targets: Vec<Vec<T>>,
}

impl<T: Scalar> TrainingSet<T> {
    pub fn new(inputs: Vec<Vec<T>>, targets: Vec<Vec<T>>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty("training set"));
        }
        check_dim("training targets", inputs.len(), targets.len())?;
        let m = inputs[0].len();
        let n = targets[0].len();
        if m == 0 || n == 0 {
            return Err(Error::Empty("training vectors"));
        }
        for (x, y) in inputs.iter().zip(&targets) {
            check_dim("training input length", m, x.len())?;
            check_dim("training target length", n, y.len())?;
        }
        if let Some(index) = inputs.iter().chain(&targets).flatten().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(index));
        }
        Ok(Self { inputs, targets })
    }

    /// Real targets embedded in the input field (zero imaginary part for complex inputs).
    pub fn with_real_targets(inputs: Vec<Vec<T>>, targets: Vec<Vec<f64>>) -> Result<Self> {
        let targets = targets
            .into_iter()
            .map(|y| y.into_iter().map(T::from_real).collect())
            .collect();
        Self::new(inputs, targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.targets[0].len()
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[Vec<T>] {
        &self.targets
    }
}

/// Real-input regression with the update `w += r (y - y') x`.
pub fn train_real(data: &TrainingSet<f64>, cfg: &TrainingConfig) -> Result<Weights<f64>> {
    train(data, cfg)
}

/// Complex-input regression with the update `w += r (y - y') conj(x)`.
pub fn train_complex(data: &TrainingSet<Complex64>, cfg: &TrainingConfig) -> Result<Weights<Complex64>> {
    train(data, cfg)
}

/// Initial weights: real parts uniform in `[-scale, scale]`, drawn row-major
/// from the init stream; imaginary parts zero.
pub fn initial_weights<T: Scalar>(rows: usize, cols: usize, cfg: &TrainingConfig) -> Weights<T> {
    let mut w = Weights::zeros(rows, cols);
    if cfg.init_scale > 0.0 {
        let mut rng = seed::rng(seed::derive(cfg.init_seed, seed::tag::INIT));
        for v in &mut w.data {
            *v = T::from_real(rng.random_range(-cfg.init_scale..=cfg.init_scale));
        }
    }
    w
}

/// Sample visiting order for each epoch.
fn epoch_orders(samples: usize, cfg: &TrainingConfig) -> Vec<Vec<usize>> {
    let mut rng = seed::rng(seed::derive(cfg.init_seed, seed::tag::SHUFFLE));
    (0..cfg.epochs)
        .map(|_| {
            let mut order: Vec<usize> = (0..samples).collect();
            if cfg.shuffle {
                order.shuffle(&mut rng);
            }
            order
        })
        .collect()
}

/// Generic training loop behind [`train_real`] and [`train_complex`].
pub fn train<T: Scalar>(data: &TrainingSet<T>, cfg: &TrainingConfig) -> Result<Weights<T>> {
    cfg.validate()?;
    let (n_out, m_in) = (data.output_dim(), data.input_dim());
    let mut w = initial_weights::<T>(n_out, m_in, cfg);
    let orders = epoch_orders(data.len(), cfg);
    let conj_inputs: Vec<Vec<T>> = data
        .inputs
        .iter()
        .map(|x| x.iter().map(|v| v.conj()).collect())
        .collect();
    let targets = &data.targets;
    let r = cfg.learning_rate;

    let diverged = w
        .data
        .par_chunks_mut(ROW_BLOCK * m_in)
        .enumerate()
        .filter_map(|(block, rows)| {
            let first_row = block * ROW_BLOCK;
            for (epoch, order) in orders.iter().enumerate() {
                for &s in order {
                    let x = &data.inputs[s];
                    let xc = &conj_inputs[s];
                    let y = &targets[s];
                    for (local, row) in rows.chunks_exact_mut(m_in).enumerate() {
                        let err = (y[first_row + local] - dot(row, x)).scale(r);
                        for (wv, c) in row.iter_mut().zip(xc) {
                            *wv += err * *c;
                        }
                    }
                }
                if rows
                    .iter()
                    .any(|v| !v.is_finite() || v.abs_sqr() > DIVERGENCE_LIMIT * DIVERGENCE_LIMIT)
                {
                    return Some(epoch + 1);
                }
            }
            None
        })
        .min();

    match diverged {
        Some(epoch) => Err(Error::Diverged { epoch }),
        None => Ok(w),
    }
}

/// Mean over samples of `||y - W x||^2 / N`.
pub fn training_loss<T: Scalar>(w: &Weights<T>, data: &TrainingSet<T>) -> Result<f64> {
    check_dim("loss input dimension", w.cols, data.input_dim())?;
    check_dim("loss output dimension", w.rows, data.output_dim())?;
    let total: f64 = data
        .inputs
        .iter()
        .zip(&data.targets)
        .map(|(x, y)| {
            w.data
                .chunks_exact(w.cols)
                .zip(y)
                .map(|(row, &t)| (t - dot(row, x)).abs_sqr())
                .sum::<f64>()
        })
        .sum();
    Ok(total / (data.len() * w.rows) as f64)
}
