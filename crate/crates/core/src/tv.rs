//! Total-variation compressive sensing for single-pixel measurements.
//!
//! Solves `min_x TV(x) + mu/2 ||A x - b||^2` with anisotropic TV. The gradient
//! is split off as `w = D x` and handled by an augmented Lagrangian: the inner
//! loop alternates an exact soft-shrinkage step on `w` with an exact linear
//! solve for `x`, the outer loop updates the multipliers. The linear system
//! matrix `beta D^T D + mu A^T A` only depends on the operator, so it is
//! factored once per [`TvSolver`] and shared by every image measured with the
//! same patterns.
//!
//! The sequence reported per outer iteration is the best iterate so far, so
//! the objective it traces never increases.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};
use crate::field::Image;
use crate::spi::{Measurements, SensingMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct TvParams {
    /// Weight of the data-fidelity term.
    pub mu: f64,
    /// Penalty on the gradient splitting constraint.
    pub beta: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Relative change of `x` below which a loop stops.
    pub tol: f64,
    /// Project iterates onto `x >= 0`.
    pub nonneg: bool,
}

impl Default for TvParams {
    fn default() -> Self {
        Self {
            mu: 0.125,
            beta: 32.0,
            max_outer: 60,
            max_inner: 10,
            tol: 1e-4,
            nonneg: true,
        }
    }
}

impl TvParams {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.mu) || !positive(self.beta) || !positive(self.tol) {
            return Err(Error::InvalidArgument(format!(
                "mu, beta and tol must be positive (mu={}, beta={}, tol={})",
                self.mu, self.beta, self.tol
            )));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidArgument("iteration budgets must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconResult {
    /// Best iterate clamped to `[0, 1]`.
    pub image: Image,
    /// Best iterate before clamping.
    pub raw: Vec<f64>,
    pub iterations_used: usize,
    /// `||A x - b|| / ||b||` for the returned image (0 when `b = 0` is matched exactly).
    pub final_residual: f64,
    pub converged: bool,
}

/// Anisotropic total variation with replicate boundaries.
pub fn total_variation(img: &Image) -> f64 {
    tv_norm(img.pixels(), img.height(), img.width())
}

pub(crate) fn tv_norm(x: &[f64], h: usize, w: usize) -> f64 {
    let mut total = 0.0;
    for r in 0..h {
        for c in 0..w {
            let v = x[r * w + c];
            if c + 1 < w {
                total += (x[r * w + c + 1] - v).abs();
            }
            if r + 1 < h {
                total += (x[(r + 1) * w + c] - v).abs();
            }
        }
    }
    total
}

/// Forward differences: first `h*w` entries horizontal, next `h*w` vertical,
/// zero on the last column / row.
fn gradient(x: &[f64], h: usize, w: usize, out: &mut [f64]) {
    let m = h * w;
    let (dh, dv) = out.split_at_mut(m);
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            dh[i] = if c + 1 < w { x[i + 1] - x[i] } else { 0.0 };
            dv[i] = if r + 1 < h { x[i + w] - x[i] } else { 0.0 };
        }
    }
}

/// Adjoint of [`gradient`].
fn gradient_adjoint(g: &[f64], h: usize, w: usize, out: &mut [f64]) {
    let m = h * w;
    let (dh, dv) = g.split_at(m);
    out.iter_mut().for_each(|v| *v = 0.0);
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if c + 1 < w {
                out[i + 1] += dh[i];
                out[i] -= dh[i];
            }
            if r + 1 < h {
                out[i + w] += dv[i];
                out[i] -= dv[i];
            }
        }
    }
}

/// `D^T D` as a dense matrix: the 4-neighbour graph Laplacian with Neumann boundaries.
fn laplacian(h: usize, w: usize) -> DMatrix<f64> {
    let m = h * w;
    let mut l = DMatrix::zeros(m, m);
    let mut link = |a: usize, b: usize| {
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
        l[(a, b)] -= 1.0;
        l[(b, a)] -= 1.0;
    };
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if c + 1 < w {
                link(i, i + 1);
            }
            if r + 1 < h {
                link(i, i + w);
            }
        }
    }
    l
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_operator(a: &SensingMatrix) -> Result<()> {
    if a.data().iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("all-zero pattern matrix"));
    }
    Ok(())
}

fn check_measurements(a: &SensingMatrix, b: &Measurements) -> Result<()> {
    if b.is_empty() {
        return Err(Error::Empty("measurement vector"));
    }
    check_dim("measurement count", a.rows(), b.len())
}

/// A factored TV problem for one sensing operator.
pub struct TvSolver {
    params: TvParams,
    height: usize,
    width: usize,
    a: DMatrix<f64>,
    a_t: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
}

impl TvSolver {
    pub fn new(a: &SensingMatrix, params: TvParams) -> Result<Self> {
        params.validate()?;
        check_operator(a)?;
        let (h, w) = (a.height(), a.width());
        let mat = DMatrix::from_row_slice(a.rows(), a.cols(), a.data());
        let a_t = mat.transpose();
        let system = laplacian(h, w) * params.beta + (&a_t * &mat) * params.mu;
        let factor = Cholesky::new(system)
            .ok_or(Error::Degenerate("beta D^T D + mu A^T A is not positive definite"))?;
        Ok(Self {
            params,
            height: h,
            width: w,
            a: mat,
            a_t,
            factor,
        })
    }

    pub fn params(&self) -> &TvParams {
        &self.params
    }

    fn objective(&self, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let residual = &self.a * x - b;
        tv_norm(x.as_slice(), self.height, self.width) + 0.5 * self.params.mu * residual.norm_squared()
    }

    pub fn solve(&self, b: &Measurements) -> Result<ReconResult> {
        self.solve_traced(b).map(|(result, _)| result)
    }

    /// Like [`solve`](Self::solve), also returning the objective of the
    /// reported iterate after every outer iteration.
    pub fn solve_traced(&self, b: &Measurements) -> Result<(ReconResult, Vec<f64>)> {
        check_dim("measurement count", self.a.nrows(), b.len())?;
        if b.is_empty() {
            return Err(Error::Empty("measurement vector"));
        }
        let p = &self.params;
        let (h, w) = (self.height, self.width);
        let m = h * w;
        let b = DVector::from_column_slice(b.intensities());
        let atb = (&self.a_t * &b) * p.mu;

        let mut x = DVector::<f64>::zeros(m);
        let mut lambda = vec![0.0; 2 * m];
        let mut shrunk = vec![0.0; 2 * m];
        let mut grad = vec![0.0; 2 * m];
        let mut back = vec![0.0; m];

        let mut best = x.clone();
        let mut best_obj = self.objective(&x, &b);
        let mut trace = Vec::with_capacity(p.max_outer);
        let mut iterations = 0;
        let mut converged = false;
        let threshold = 1.0 / p.beta;

        for _ in 0..p.max_outer {
            let outer_start = x.clone();
            for _ in 0..p.max_inner {
                let inner_start = x.clone();
                gradient(x.as_slice(), h, w, &mut grad);
                for ((s, g), l) in shrunk.iter_mut().zip(&grad).zip(&lambda) {
                    let v = g - l / p.beta;
                    *s = v.signum() * (v.abs() - threshold).max(0.0);
                }
                for ((g, s), l) in grad.iter_mut().zip(&shrunk).zip(&lambda) {
                    *g = p.beta * s + l;
                }
                gradient_adjoint(&grad, h, w, &mut back);
                for (xi, (bi, ai)) in x.iter_mut().zip(back.iter().zip(atb.iter())) {
                    *xi = bi + ai;
                }
                self.factor.solve_mut(&mut x);
                if p.nonneg {
                    x.iter_mut().for_each(|v| *v = v.max(0.0));
                }
                iterations += 1;
                if relative_change(&x, &inner_start) <= p.tol {
                    break;
                }
            }
            gradient(x.as_slice(), h, w, &mut grad);
            for ((l, g), s) in lambda.iter_mut().zip(&grad).zip(&shrunk) {
                *l -= p.beta * (g - s);
            }

            let obj = self.objective(&x, &b);
            if obj <= best_obj {
                best_obj = obj;
                best.copy_from(&x);
            }
            trace.push(best_obj);
            if relative_change(&x, &outer_start) <= p.tol {
                converged = true;
                break;
            }
        }

        let image = Image::from_clamped(h, w, best.as_slice().to_vec())?;
        let fitted = &self.a * DVector::from_column_slice(image.pixels());
        let b_norm = b.norm();
        let res_norm = (fitted - &b).norm();
        let final_residual = if b_norm > 0.0 { res_norm / b_norm } else { res_norm };
        Ok((
            ReconResult {
                image,
                raw: best.as_slice().to_vec(),
                iterations_used: iterations,
                final_residual,
                converged,
            },
            trace,
        ))
    }
}

fn relative_change(x: &DVector<f64>, prev: &DVector<f64>) -> f64 {
    let diff = norm((x - prev).as_slice());
    let base = prev.norm();
    if base > 0.0 {
        diff / base
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// One-shot TV reconstruction. Use [`TvSolver`] to reuse the factorization.
pub fn reconstruct_tv(a: &SensingMatrix, b: &Measurements, params: &TvParams) -> Result<ReconResult> {
    check_measurements(a, b)?;
    TvSolver::new(a, params.clone())?.solve(b)
}

/// Minimum-norm least-squares reconstruction through the pseudo-inverse.
pub struct PinvSolver {
    height: usize,
    width: usize,
    pinv: DMatrix<f64>,
}

impl PinvSolver {
    pub fn new(a: &SensingMatrix) -> Result<Self> {
        check_operator(a)?;
        let mat = DMatrix::from_row_slice(a.rows(), a.cols(), a.data());
        let svd = mat.svd(true, true);
        let eps = svd.singular_values.max() * a.rows().max(a.cols()) as f64 * f64::EPSILON;
        let pinv = svd
            .pseudo_inverse(eps)
            .map_err(|_| Error::Degenerate("pseudo-inverse failed"))?;
        Ok(Self {
            height: a.height(),
            width: a.width(),
            pinv,
        })
    }

    /// Unclamped minimum-norm solution.
    pub fn solve_raw(&self, b: &Measurements) -> Result<Vec<f64>> {
        if b.is_empty() {
            return Err(Error::Empty("measurement vector"));
        }
        check_dim("measurement count", self.pinv.ncols(), b.len())?;
        let x = &self.pinv * DVector::from_column_slice(b.intensities());
        Ok(x.as_slice().to_vec())
    }

    pub fn solve(&self, b: &Measurements) -> Result<Image> {
        Image::from_clamped(self.height, self.width, self.solve_raw(b)?)
    }
}

pub fn reconstruct_pinv(a: &SensingMatrix, b: &Measurements) -> Result<Image> {
    check_measurements(a, b)?;
    PinvSolver::new(a)?.solve(b)
}
