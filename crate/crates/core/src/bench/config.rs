//! `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::datasets::{DatasetKind, DatasetSpec, DEFAULT_NUM_TEST};
use crate::error::{Error, Result};
use crate::linreg::TrainingConfig;
use crate::seed;
use crate::tv::TvParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pipeline {
    TrpeAttack,
    SpiBlind,
    SpiKnown,
}

impl Pipeline {
    pub const ALL: [Pipeline; 3] = [Pipeline::TrpeAttack, Pipeline::SpiBlind, Pipeline::SpiKnown];

    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::TrpeAttack => "trpe-attack",
            Pipeline::SpiBlind => "spi-blind",
            Pipeline::SpiKnown => "spi-known",
        }
    }

    pub fn is_spi(self) -> bool {
        self != Pipeline::TrpeAttack
    }
}

impl std::fmt::Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown pipeline `{}`", s.trim())))
    }
}

/// One fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    /// `num_train` is the training-sample count K.
    pub dataset: DatasetSpec,
    pub image_size: usize,
    /// SPI only; ignored by the TRPE attack.
    pub sampling_ratio: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_scale: f64,
    pub shuffle: bool,
    pub solver: TvParams,
    /// Seed of every random draw except the train/test split.
    pub master_seed: u64,
    /// Relative std of Gaussian noise added to SPI measurements.
    pub noise_sigma: f64,
    pub output_dir: PathBuf,
    /// Number of test images written as PGM files.
    pub dump_images: usize,
    pub dump_pairs: bool,
}

impl ExperimentConfig {
    pub fn num_train(&self) -> usize {
        self.dataset.num_train
    }

    pub fn training(&self) -> TrainingConfig {
        TrainingConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            init_seed: seed::derive(self.master_seed, seed::tag::INIT),
            init_scale: self.init_scale,
            shuffle: self.shuffle,
        }
    }

    /// Directory name unique to the fields that change between sweep cells.
    pub fn cell_name(&self) -> String {
        let mut name = format!("{}_{}_k{}", self.pipeline, self.dataset.kind, self.num_train());
        if self.pipeline.is_spi() {
            let _ = write!(name, "_s{}", self.sampling_ratio);
        }
        let _ = write!(name, "_seed{}", self.master_seed);
        name
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.num_train == 0 || self.dataset.num_test == 0 {
            return Err(Error::Config("k and num_test must be at least 1".into()));
        }
        if self.pipeline.is_spi() && !(self.sampling_ratio > 0.0 && self.sampling_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "sampling ratio must lie in (0, 1], got {}",
                self.sampling_ratio
            )));
        }
        if self.dataset.kind != DatasetKind::Synthetic {
            if self.image_size != 32 {
                return Err(Error::Config("dataset images are always 32x32".into()));
            }
            if self.dataset.path.is_none() {
                return Err(Error::Config(format!("dataset {} needs data_path", self.dataset.kind)));
            }
        } else if self.image_size == 0 {
            return Err(Error::Config("image_size must be at least 1".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise_sigma must be >= 0".into()));
        }
        Ok(())
    }

    /// Key/value echo that parses back into the same configuration.
    pub fn echo(&self) -> String {
        let d = &self.dataset;
        let s = &self.solver;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("pipeline", self.pipeline.to_string());
        kv("dataset", d.kind.to_string());
        if let Some(p) = &d.path {
            kv("data_path", p.display().to_string());
        }
        kv("k", d.num_train.to_string());
        kv("num_test", d.num_test.to_string());
        kv("split_seed", d.split_seed.to_string());
        kv("image_size", self.image_size.to_string());
        kv("s", self.sampling_ratio.to_string());
        kv("lr", self.learning_rate.to_string());
        kv("epochs", self.epochs.to_string());
        kv("init_scale", self.init_scale.to_string());
        kv("shuffle", self.shuffle.to_string());
        kv("tv.mu", s.mu.to_string());
        kv("tv.beta", s.beta.to_string());
        kv("tv.max_outer", s.max_outer.to_string());
        kv("tv.max_inner", s.max_inner.to_string());
        kv("tv.tol", s.tol.to_string());
        kv("tv.nonneg", s.nonneg.to_string());
        kv("seed", self.master_seed.to_string());
        kv("noise_sigma", self.noise_sigma.to_string());
        kv("out", self.output_dir.display().to_string());
        kv("dump_images", self.dump_images.to_string());
        kv("dump_pairs", self.dump_pairs.to_string());
        out
    }
}

/// Every recognised key. Lists (`k`, `s`, `pipelines`) are comma separated.
pub const KEYS: &[&str] = &[
    "pipeline",
    "pipelines",
    "dataset",
    "data_path",
    "k",
    "num_test",
    "split_seed",
    "image_size",
    "s",
    "lr",
    "epochs",
    "init_scale",
    "shuffle",
    "tv.mu",
    "tv.beta",
    "tv.max_outer",
    "tv.max_inner",
    "tv.tol",
    "tv.nonneg",
    "seed",
    "noise_sigma",
    "out",
    "workers",
    "dump_images",
    "dump_pairs",
];

/// Parsed configuration before it is resolved into experiments. Later
/// assignments override earlier ones, which is how CLI flags win over the
/// file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    /// Value and whether it came from the config file.
    values: BTreeMap<String, (String, bool)>,
    /// Directory that relative paths from the file are resolved against.
    base_dir: Option<PathBuf>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            settings
                .insert(key.trim(), value.trim(), true)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(settings)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(Error::at_path(path))?;
        let mut settings = Self::parse(&text)?;
        settings.base_dir = path.parent().map(Path::to_path_buf);
        Ok(settings)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        self.insert(key, value, false)
    }

    fn insert(&mut self, key: &str, value: impl Into<String>, from_file: bool) -> Result<()> {
        let key = match key {
            "learning_rate" => "lr",
            "sampling_ratio" => "s",
            "master_seed" => "seed",
            "output_dir" => "out",
            "num_train" => "k",
            other => other,
        };
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), (value.into(), from_file));
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`"))),
        }
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key).map(str::to_ascii_lowercase).as_deref() {
            None => Ok(default),
            Some("true" | "yes" | "on" | "1") => Ok(true),
            Some("false" | "no" | "off" | "0") => Ok(false),
            Some(v) => Err(Error::Config(format!("invalid boolean `{v}` for `{key}`"))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let Some(v) = self.get(key) else {
            return Ok(Vec::new());
        };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Config(format!("invalid entry `{s}` in `{key}`")))
            })
            .collect()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let (value, from_file) = self.values.get(key)?;
        let p = PathBuf::from(value);
        Some(match &self.base_dir {
            Some(base) if *from_file && p.is_relative() => base.join(p),
            _ => p,
        })
    }

    pub fn master_seed(&self) -> Result<u64> {
        self.parsed("seed", 0)
    }

    /// Thread count; defaults to the available parallelism.
    pub fn workers(&self) -> Result<usize> {
        let default = std::thread::available_parallelism().map_or(1, |n| n.get());
        let w = self.parsed("workers", default)?;
        if w == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(w)
    }

    pub fn k_values(&self) -> Result<Vec<usize>> {
        self.list("k")
    }

    pub fn s_values(&self) -> Result<Vec<f64>> {
        let s = self.list("s")?;
        Ok(if s.is_empty() { vec![1.0] } else { s })
    }

    /// Pipelines of a sweep: `pipelines`, else the single `pipeline`.
    pub fn pipelines(&self) -> Result<Vec<Pipeline>> {
        let listed = self.list("pipelines")?;
        if !listed.is_empty() {
            return Ok(listed);
        }
        Ok(self.get("pipeline").map(str::parse).transpose()?.into_iter().collect())
    }

    /// Resolves one experiment; `k` and `s` override the configured values.
    pub fn experiment(
        &self,
        pipeline: Pipeline,
        k: usize,
        s: f64,
        master_seed: u64,
        split_seed: u64,
    ) -> Result<ExperimentConfig> {
        let defaults = TrainingConfig::default();
        let tv = TvParams::default();
        let kind: DatasetKind = self.parsed("dataset", DatasetKind::Synthetic)?;
        let cfg = ExperimentConfig {
            pipeline,
            dataset: DatasetSpec {
                kind,
                path: self.path("data_path"),
                num_train: k,
                num_test: self.parsed("num_test", DEFAULT_NUM_TEST)?,
                split_seed,
            },
            image_size: self.parsed("image_size", 32)?,
            sampling_ratio: s,
            learning_rate: self.parsed("lr", defaults.learning_rate)?,
            epochs: self.parsed("epochs", defaults.epochs)?,
            init_scale: self.parsed("init_scale", defaults.init_scale)?,
            shuffle: self.flag("shuffle", defaults.shuffle)?,
            solver: TvParams {
                mu: self.parsed("tv.mu", tv.mu)?,
                beta: self.parsed("tv.beta", tv.beta)?,
                max_outer: self.parsed("tv.max_outer", tv.max_outer)?,
                max_inner: self.parsed("tv.max_inner", tv.max_inner)?,
                tol: self.parsed("tv.tol", tv.tol)?,
                nonneg: self.flag("tv.nonneg", tv.nonneg)?,
            },
            master_seed,
            noise_sigma: self.parsed("noise_sigma", 0.0)?,
            output_dir: self.path("out").unwrap_or_else(|| PathBuf::from("results")),
            dump_images: self.parsed("dump_images", 8)?,
            dump_pairs: self.flag("dump_pairs", true)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The split seed: explicit `split_seed`, else derived from `seed`.
    pub fn split_seed(&self) -> Result<u64> {
        match self.get("split_seed") {
            Some(_) => self.parsed("split_seed", 0),
            None => Ok(seed::derive(self.master_seed()?, seed::tag::SPLIT)),
        }
    }

    /// The single experiment described by these settings.
    pub fn single(&self, pipeline: Pipeline) -> Result<ExperimentConfig> {
        let k = match self.k_values()?.as_slice() {
            [k] => *k,
            [] => return Err(Error::Config("missing `k`".into())),
            _ => return Err(Error::Config("a single run takes one `k`; use sweep for lists".into())),
        };
        let s = match self.s_values()?.as_slice() {
            [s] => *s,
            _ => return Err(Error::Config("a single run takes one `s`; use sweep for lists".into())),
        };
        let seed = self.master_seed()?;
        self.experiment(pipeline, k, s, seed, self.split_seed()?)
    }
}
