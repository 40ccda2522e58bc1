//! PSNR and corpus-level quality reports.

use crate::error::{check_dim, Result};
use crate::field::Image;

/// Peak value of `[0, 1]` images.
pub const UNIT_PEAK: f64 = 1.0;

/// `10 log10(peak^2 / MSE)` in dB. Identical images give `f64::INFINITY`.
pub fn psnr(reference: &Image, candidate: &Image, peak: f64) -> Result<f64> {
    check_dim("psnr height", reference.height(), candidate.height())?;
    check_dim("psnr width", reference.width(), candidate.width())?;
    let mse = reference
        .pixels()
        .iter()
        .zip(candidate.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub per_image_psnr: Vec<f64>,
    /// Mean over the finite entries; `None` when every pair was identical.
    pub mean_psnr: Option<f64>,
    /// Sample standard deviation over the finite entries (0 for a single one).
    pub std_psnr: Option<f64>,
    pub num_images: usize,
    /// Pairs that matched exactly and were left out of the statistics.
    pub num_infinite: usize,
}

impl QualityReport {
    pub fn all_infinite(&self) -> bool {
        self.num_images > 0 && self.num_infinite == self.num_images
    }
}

/// Per-image PSNR at unit peak with dB-averaged statistics.
pub fn evaluate_corpus(references: &[Image], candidates: &[Image]) -> Result<QualityReport> {
    check_dim("corpus length", references.len(), candidates.len())?;
    let per_image_psnr = references
        .iter()
        .zip(candidates)
        .map(|(r, c)| psnr(r, c, UNIT_PEAK))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(per_image_psnr))
}

pub(crate) fn summarize(per_image_psnr: Vec<f64>) -> QualityReport {
    let finite: Vec<f64> = per_image_psnr.iter().copied().filter(|v| v.is_finite()).collect();
    let (mean_psnr, std_psnr) = match finite.len() {
        0 => (None, None),
        1 => (Some(finite[0]), Some(0.0)),
        n => {
            let mean = finite.iter().sum::<f64>() / n as f64;
            let var = finite.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (Some(mean), Some(var.sqrt()))
        }
    };
    QualityReport {
        num_images: per_image_psnr.len(),
        num_infinite: per_image_psnr.len() - finite.len(),
        per_image_psnr,
        mean_psnr,
        std_psnr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(v: f64) -> Image {
        Image::filled(4, 4, v)
    }

    #[test]
    fn analytic_values() {
        assert_eq!(psnr(&flat(0.3), &flat(0.3), 1.0).unwrap(), f64::INFINITY);
        assert!((psnr(&flat(0.2), &flat(0.3), 1.0).unwrap() - 20.0).abs() < 1e-9);
        assert!((psnr(&flat(0.0), &flat(0.5), 1.0).unwrap() - 6.020599913279624).abs() < 1e-12);
        assert!(psnr(&flat(0.0), &Image::zeros(4, 5), 1.0).is_err());
    }

    #[test]
    fn corpus_statistics() {
        let same = evaluate_corpus(&[flat(0.1), flat(0.2)], &[flat(0.1), flat(0.2)]).unwrap();
        assert!(same.all_infinite());
        assert_eq!(same.mean_psnr, None);

        // 20 dB and 30 dB pairs
        let r = evaluate_corpus(
            &[flat(0.5), flat(0.5)],
            &[flat(0.6), flat(0.5 + 0.1f64 / 10f64.sqrt())],
        )
        .unwrap();
        assert!((r.mean_psnr.unwrap() - 25.0).abs() < 1e-9);
        assert_eq!(r.num_images, 2);

        let single = evaluate_corpus(&[flat(0.5)], &[flat(0.6)]).unwrap();
        assert_eq!(single.std_psnr, Some(0.0));

        let mixed = evaluate_corpus(&[flat(0.5), flat(0.5)], &[flat(0.5), flat(0.6)]).unwrap();
        assert_eq!(mixed.num_infinite, 1);
        assert!((mixed.mean_psnr.unwrap() - 20.0).abs() < 1e-9);

        assert!(evaluate_corpus(&[flat(0.5)], &[]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn symmetric_and_shift_invariant(a in 0.0f64..0.5, d in 0.001f64..0.4, shift in 0.0f64..0.1) {
            let (x, y) = (flat(a), flat(a + d));
            let p = psnr(&x, &y, 1.0).unwrap();
            proptest::prop_assert_eq!(p, psnr(&y, &x, 1.0).unwrap());
            let shifted = psnr(&flat(a + shift), &flat(a + d + shift), 1.0).unwrap();
            proptest::prop_assert!((p - shifted).abs() < 1e-6);
            let wider = psnr(&x, &flat((a + d * 1.2).min(1.0)), 1.0).unwrap();
            proptest::prop_assert!(wider < p);
        }
    }
}
