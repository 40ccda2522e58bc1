//! Dataset ingestion: MNIST-style IDX image files and CIFAR-100 binary
//! batches, converted to 32x32 grayscale `[0, 1]` images.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Image;
use crate::seed;

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
pub const CIFAR_RECORD_LEN: usize = 3074;
pub const EXPERIMENT_SIZE: usize = 32;
/// Test images per experiment.
pub const DEFAULT_NUM_TEST: usize = 200;

/// Rec. 601 luma weights.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// An 8-bit image as stored in a dataset file. RGB data is planar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawImage {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl RawImage {
    pub fn gray(height: usize, width: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), height * width);
        Self {
            height,
            width,
            channels: 1,
            data,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(Error::at_path(path))
}

pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Vec<RawImage>> {
    parse_idx_images(&read_file(path.as_ref())?)
}

/// Parses an IDX3 unsigned-byte image file: big-endian magic `0x00000803`,
/// then count, rows and cols as big-endian `u32`, then the pixels.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<RawImage>> {
    if bytes.len() < 16 {
        return Err(Error::Length {
            expected: 16,
            found: bytes.len(),
        });
    }
    let word = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap());
    let magic = word(0);
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::Format(format!(
            "expected IDX image magic 0x{IDX_IMAGE_MAGIC:08x}, found 0x{magic:08x}"
        )));
    }
    let (count, rows, cols) = (word(4) as usize, word(8) as usize, word(12) as usize);
    let size = rows * cols;
    let expected = 16 + count * size;
    if bytes.len() < expected {
        return Err(Error::Length {
            expected,
            found: bytes.len(),
        });
    }
    Ok(bytes[16..expected]
        .chunks_exact(size.max(1))
        .take(count)
        .map(|chunk| RawImage::gray(rows, cols, chunk.to_vec()))
        .collect())
}

/// Writes grayscale images in IDX3 format. All images must share one shape.
pub fn write_idx_images(mut out: impl Write, images: &[RawImage]) -> Result<()> {
    let (rows, cols) = images.first().map_or((0, 0), |i| (i.height, i.width));
    if images.iter().any(|i| i.channels != 1 || i.height != rows || i.width != cols) {
        return Err(Error::InvalidArgument(
            "IDX images must be single-channel with a common shape".into(),
        ));
    }
    out.write_all(&IDX_IMAGE_MAGIC.to_be_bytes())?;
    for v in [images.len(), rows, cols] {
        out.write_all(&(v as u32).to_be_bytes())?;
    }
    for img in images {
        out.write_all(&img.data)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CifarRecord {
    pub coarse_label: u8,
    pub fine_label: u8,
    pub image: RawImage,
}

pub fn load_cifar100(path: impl AsRef<Path>) -> Result<Vec<CifarRecord>> {
    parse_cifar100(&read_file(path.as_ref())?)
}

/// Parses CIFAR-100 binary records: coarse label, fine label, then the R, G
/// and B planes of a 32x32 image, row-major.
pub fn parse_cifar100(bytes: &[u8]) -> Result<Vec<CifarRecord>> {
    if bytes.len() % CIFAR_RECORD_LEN != 0 {
        return Err(Error::Format(format!(
            "CIFAR-100 file size {} is not a multiple of {CIFAR_RECORD_LEN}",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(CIFAR_RECORD_LEN)
        .map(|rec| CifarRecord {
            coarse_label: rec[0],
            fine_label: rec[1],
            image: RawImage {
                height: 32,
                width: 32,
                channels: 3,
                data: rec[2..].to_vec(),
            },
        })
        .collect())
}

pub fn write_cifar100(mut out: impl Write, records: &[CifarRecord]) -> Result<()> {
    for r in records {
        if r.image.channels != 3 || r.image.height != 32 || r.image.width != 32 {
            return Err(Error::InvalidArgument("CIFAR records hold 32x32 RGB images".into()));
        }
        out.write_all(&[r.coarse_label, r.fine_label])?;
        out.write_all(&r.image.data)?;
    }
    Ok(())
}

/// Converts a dataset image to a 32x32 `[0, 1]` image: 28x28 grayscale is
/// zero-padded with a centred 2-pixel border, 32x32 RGB goes through luma,
/// 32x32 grayscale is only rescaled.
pub fn to_experiment_image(raw: &RawImage) -> Result<Image> {
    let n = EXPERIMENT_SIZE;
    let plane = raw.height * raw.width;
    if raw.data.len() != plane * raw.channels {
        return Err(Error::Dimension {
            context: "raw image data",
            expected: plane * raw.channels,
            found: raw.data.len(),
        });
    }
    match (raw.height, raw.width, raw.channels) {
        (28, 28, 1) => {
            let mut pixels = vec![0.0; n * n];
            for r in 0..28 {
                for c in 0..28 {
                    pixels[(r + 2) * n + c + 2] = raw.data[r * 28 + c] as f64 / 255.0;
                }
            }
            Image::new(n, n, pixels)
        }
        (32, 32, 1) => Image::new(n, n, raw.data.iter().map(|&v| v as f64 / 255.0).collect()),
        (32, 32, 3) => {
            let (r, rest) = raw.data.split_at(plane);
            let (g, b) = rest.split_at(plane);
            let pixels = (0..plane)
                .map(|i| {
                    let y = LUMA[0] * r[i] as f64 + LUMA[1] * g[i] as f64 + LUMA[2] * b[i] as f64;
                    (y / 255.0).clamp(0.0, 1.0)
                })
                .collect();
            Image::new(n, n, pixels)
        }
        (h, w, c) => Err(Error::InvalidArgument(format!(
            "unsupported raw image shape {h}x{w} with {c} channel(s)"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DatasetKind {
    Mnist,
    FashionMnist,
    Cifar100,
    /// Uniform random images, generated rather than loaded.
    Synthetic,
}

impl DatasetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::FashionMnist => "fashion-mnist",
            DatasetKind::Cifar100 => "cifar100",
            DatasetKind::Synthetic => "synthetic",
        }
    }
}

impl std::fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mnist" => Ok(DatasetKind::Mnist),
            "fashion-mnist" | "fashion_mnist" | "fashionmnist" => Ok(DatasetKind::FashionMnist),
            "cifar100" | "cifar-100" => Ok(DatasetKind::Cifar100),
            "synthetic" => Ok(DatasetKind::Synthetic),
            other => Err(Error::Config(format!("unknown dataset kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// File to read; unused for synthetic data.
    pub path: Option<PathBuf>,
    pub num_train: usize,
    pub num_test: usize,
    pub split_seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ImageCorpus {
    pub images: Vec<Image>,
    pub labels: Option<Vec<u8>>,
}

impl ImageCorpus {
    pub fn new(images: Vec<Image>) -> Self {
        Self { images, labels: None }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    fn select(&self, indices: &[usize]) -> ImageCorpus {
        ImageCorpus {
            images: indices.iter().map(|&i| self.images[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }
}

/// Loads a whole corpus from disk and converts every image.
pub fn load_corpus(kind: DatasetKind, path: &Path) -> Result<ImageCorpus> {
    match kind {
        DatasetKind::Mnist | DatasetKind::FashionMnist => {
            let images = load_idx_images(path)?
                .iter()
                .map(to_experiment_image)
                .collect::<Result<_>>()?;
            Ok(ImageCorpus::new(images))
        }
        DatasetKind::Cifar100 => {
            let records = load_cifar100(path)?;
            let images = records
                .iter()
                .map(|r| to_experiment_image(&r.image))
                .collect::<Result<_>>()?;
            Ok(ImageCorpus {
                images,
                labels: Some(records.iter().map(|r| r.fine_label).collect()),
            })
        }
        DatasetKind::Synthetic => Err(Error::Config(
            "synthetic corpora are generated, not loaded".into(),
        )),
    }
}

/// `count` images with i.i.d. uniform `[0, 1)` pixels.
pub fn synthetic_corpus(count: usize, height: usize, width: usize, seed: u64) -> ImageCorpus {
    let mut rng = seed::rng(seed);
    let images = (0..count)
        .map(|_| {
            let pixels = (0..height * width).map(|_| rng.random::<f64>()).collect();
            Image::new(height, width, pixels).expect("uniform samples lie in [0, 1)")
        })
        .collect();
    ImageCorpus::new(images)
}

/// Disjoint random train/test selection. The test set is the first
/// `num_test` entries of a seeded permutation and the training set the next
/// `num_train`, so for one seed the test set does not depend on `num_train`.
pub fn split(
    corpus: &ImageCorpus,
    num_train: usize,
    num_test: usize,
    seed: u64,
) -> Result<(ImageCorpus, ImageCorpus)> {
    let requested = num_train + num_test;
    if requested > corpus.len() {
        return Err(Error::InsufficientCorpus {
            requested,
            available: corpus.len(),
        });
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut seed::rng(seed));
    let test = corpus.select(&order[..num_test]);
    let train = corpus.select(&order[num_test..requested]);
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_bytes(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = IDX_IMAGE_MAGIC.to_be_bytes().to_vec();
        for v in [count, rows, cols] {
            b.extend_from_slice(&v.to_be_bytes());
        }
        b.extend_from_slice(pixels);
        b
    }

    #[test]
    fn idx_example() {
        let imgs = parse_idx_images(&idx_bytes(1, 2, 2, &[0, 128, 255, 64])).unwrap();
        assert_eq!(imgs, vec![RawImage::gray(2, 2, vec![0, 128, 255, 64])]);
    }

    #[test]
    fn idx_label_magic_rejected() {
        let mut b = idx_bytes(1, 2, 2, &[0; 4]);
        b[3] = 0x01;
        assert!(matches!(parse_idx_images(&b), Err(Error::Format(_))));
    }

    #[test]
    fn idx_truncated_payload() {
        let b = idx_bytes(2, 2, 2, &[1, 2, 3, 4]);
        assert!(matches!(parse_idx_images(&b), Err(Error::Length { expected: 24, found: 20 })));
        assert!(matches!(parse_idx_images(&b[..10]), Err(Error::Length { .. })));
    }

    #[test]
    fn cifar_records() {
        let mut rec = vec![3u8, 42];
        rec.extend((0..3072).map(|i| (i % 251) as u8));
        let parsed = parse_cifar100(&rec).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].fine_label, 42);
        // byte 2 of the record is R(0,0)
        assert_eq!(parsed[0].image.data[0], rec[2]);
        rec.push(0);
        assert!(matches!(parse_cifar100(&rec), Err(Error::Format(_))));
    }

    #[test]
    fn conversions() {
        let img = to_experiment_image(&RawImage::gray(28, 28, vec![255; 784])).unwrap();
        for r in 0..32 {
            for c in 0..32 {
                let inside = (2..30).contains(&r) && (2..30).contains(&c);
                assert_eq!(img.get(r, c), if inside { 1.0 } else { 0.0 });
            }
        }

        let mut rgb = vec![0u8; 3072];
        rgb[..1024].fill(255);
        let red = to_experiment_image(&RawImage {
            height: 32,
            width: 32,
            channels: 3,
            data: rgb,
        })
        .unwrap();
        assert!((red.get(0, 0) - 0.299).abs() < 1e-12);

        let gray = to_experiment_image(&RawImage::gray(32, 32, vec![51; 1024])).unwrap();
        assert!(gray.pixels().iter().all(|p| (p - 0.2).abs() < 1e-15));

        assert!(to_experiment_image(&RawImage::gray(30, 30, vec![0; 900])).is_err());
    }

    #[test]
    fn padding_preserves_content() {
        let data: Vec<u8> = (0..784).map(|i| (i * 7 % 256) as u8).collect();
        let img = to_experiment_image(&RawImage::gray(28, 28, data.clone())).unwrap();
        for r in 0..28 {
            for c in 0..28 {
                assert_eq!(img.get(r + 2, c + 2), data[r * 28 + c] as f64 / 255.0);
            }
        }
    }

    #[test]
    fn split_properties() {
        let corpus = synthetic_corpus(30, 2, 2, 1);
        let (train, test) = split(&corpus, 20, 10, 5).unwrap();
        assert_eq!((train.len(), test.len()), (20, 10));
        let (train2, test2) = split(&corpus, 20, 10, 5).unwrap();
        assert_eq!((train, test), (train2, test2));
        assert!(matches!(split(&corpus, 25, 10, 5), Err(Error::InsufficientCorpus { .. })));
    }

    #[test]
    fn split_sets_are_disjoint() {
        // images tagged by index through their first pixel
        let images = (0..50)
            .map(|i| Image::new(1, 1, vec![i as f64 / 64.0]).unwrap())
            .collect();
        let corpus = ImageCorpus::new(images);
        for seed in 0..1000 {
            let (train, test) = split(&corpus, 30, 20, seed).unwrap();
            let mut seen: Vec<f64> = train.images.iter().chain(&test.images).map(|i| i.pixels()[0]).collect();
            seen.sort_by(f64::total_cmp);
            seen.dedup();
            assert_eq!(seen.len(), 50);
        }
    }

    #[test]
    fn dataset_kind_names() {
        for kind in [DatasetKind::Mnist, DatasetKind::FashionMnist, DatasetKind::Cifar100, DatasetKind::Synthetic] {
            assert_eq!(kind.as_str().parse::<DatasetKind>().unwrap(), kind);
        }
        assert!("imagenet".parse::<DatasetKind>().is_err());
    }
}
