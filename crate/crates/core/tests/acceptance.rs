//! Acceptance criteria. One line per criterion is written straight to
//! stdout (bypassing test output capture).
//!
//! Dataset files are looked up under `$OPTINV_DATA_DIR`, by default the
//! workspace `data/` directory:
//!   mnist/images-idx3-ubyte     (see scripts/fetch_mnist.py)
//!   cifar100/train.bin          (CIFAR-100 binary version)
//!
//! The extended CLR cells (K = 200, 500) run with `cargo test --release
//! --test acceptance -- --ignored`.

use std::io::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use optinv::bench::{self, expand_grid, run_sweep, ResultRow, Settings};
use optinv::datasets::{self, CifarRecord, RawImage};
use optinv::linreg::{self, Scalar, TrainingConfig, TrainingSet, Weights};
use optinv::metrics::{psnr, UNIT_PEAK};
use optinv::spi::{self, PatternSet};
use optinv::trpe::{decrypt, encrypt, PhaseMaskTriple};
use optinv::tv::{reconstruct_tv, PinvSolver, TvParams, TvSolver};
use optinv::{seed, Image};
use rand::Rng;

type Outcome = Result<String, String>;

fn report(n: usize, title: &str, outcome: &Outcome) {
    let (tag, detail) = match outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n:>2} {tag}  {title}: {detail}");
    let _ = out.flush();
}

/// Runs a criterion, turning panics into failures.
fn run(n: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into());
        Err(msg)
    });
    report(n, title, &outcome);
    outcome.is_ok()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn data_dir() -> PathBuf {
    std::env::var_os("OPTINV_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn find(candidates: &[&str]) -> Result<PathBuf, String> {
    let dir = data_dir();
    candidates
        .iter()
        .map(|c| dir.join(c))
        .find(|p| p.is_file())
        .ok_or_else(|| format!("dataset file not found (looked for {candidates:?} under {})", dir.display()))
}

fn mnist_path() -> Result<PathBuf, String> {
    find(&["mnist/images-idx3-ubyte", "mnist/train-images-idx3-ubyte", "mnist/train-images.idx3-ubyte"])
}

fn cifar_path() -> Result<PathBuf, String> {
    find(&["cifar100/train.bin", "cifar-100-binary/train.bin"])
}

fn random_image(n: usize, rng: &mut impl Rng) -> Image {
    Image::new(n, n, (0..n * n).map(|_| rng.random()).collect()).unwrap()
}

// 1
fn trpe_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(1);
    let (mut max_err, mut worst_ratio) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let img = random_image(32, &mut rng);
        let key = PhaseMaskTriple::generate(32, 32, 1000 + i);
        let c = encrypt(&img, &key).unwrap();
        let back = decrypt(&c, &key).unwrap();
        for (b, o) in back.values().iter().zip(img.pixels()) {
            max_err = max_err.max((b - o).norm());
        }
        let o_norm = img.pixels().iter().map(|v| v * v).sum::<f64>().sqrt();
        worst_ratio = worst_ratio.max((c.norm() / o_norm - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        max_err < 1e-9 && worst_ratio <= 1e-10 && secs < 5.0,
        format!("max error {max_err:.2e}, max |ratio - 1| {worst_ratio:.2e}, {secs:.2} s"),
    )
}

/// Minimum-norm least squares `W = Y X^H (X X^H)^-1` with samples as columns.
fn normal_equations(inputs: &[Vec<Complex64>], targets: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let (m, n, k) = (inputs[0].len(), targets[0].len(), inputs.len());
    let x = DMatrix::from_fn(m, k, |r, c| inputs[c][r]);
    let y = DMatrix::from_fn(n, k, |r, c| targets[c][r]);
    let xh = x.adjoint();
    let gram = (&x * &xh).try_inverse().expect("generic inputs span the input space");
    y * xh * gram
}

fn sgd_gap<T: Scalar>(w: &Weights<T>, oracle: &DMatrix<Complex64>, to_c: impl Fn(T) -> Complex64) -> f64 {
    let mut gap = 0.0f64;
    for r in 0..w.rows() {
        for c in 0..w.cols() {
            gap = gap.max((to_c(w.get(r, c)) - oracle[(r, c)]).norm());
        }
    }
    gap
}

// 2
fn regression_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(2);
    let cfg = TrainingConfig {
        learning_rate: 0.05,
        epochs: 3000,
        ..TrainingConfig::default()
    };
    let mut worst = 0.0f64;
    let sym = |rng: &mut rand_chacha::ChaCha8Rng| rng.random_range(-1.0..1.0);
    for (n, m) in [(1, 1), (3, 4), (8, 5), (16, 16)] {
        let k = 4 * m;
        let truth: Vec<Complex64> = (0..n * m)
            .map(|_| Complex64::new(sym(&mut rng), sym(&mut rng)))
            .collect();
        let apply = |x: &[Complex64]| -> Vec<Complex64> {
            (0..n).map(|r| (0..m).map(|c| truth[r * m + c] * x[c]).sum()).collect()
        };

        // real system: the real part of the generator
        let xr: Vec<Vec<f64>> = (0..k).map(|_| (0..m).map(|_| sym(&mut rng)).collect()).collect();
        let yr: Vec<Vec<f64>> = xr
            .iter()
            .map(|x| {
                (0..n)
                    .map(|r| (0..m).map(|c| truth[r * m + c].re * x[c]).sum())
                    .collect()
            })
            .collect();
        let lift = |v: &[Vec<f64>]| -> Vec<Vec<Complex64>> {
            v.iter().map(|x| x.iter().map(|&a| Complex64::new(a, 0.0)).collect()).collect()
        };
        let oracle = normal_equations(&lift(&xr), &lift(&yr));
        let w = linreg::train_real(&TrainingSet::new(xr, yr).unwrap(), &cfg).unwrap();
        worst = worst.max(sgd_gap(&w, &oracle, |v| Complex64::new(v, 0.0)));

        let xc: Vec<Vec<Complex64>> = (0..k)
            .map(|_| (0..m).map(|_| Complex64::new(sym(&mut rng), sym(&mut rng))).collect())
            .collect();
        let yc: Vec<Vec<Complex64>> = xc.iter().map(|x| apply(x)).collect();
        let oracle = normal_equations(&xc, &yc);
        let w = linreg::train_complex(&TrainingSet::new(xc, yc).unwrap(), &cfg).unwrap();
        worst = worst.max(sgd_gap(&w, &oracle, |v| v));
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-4 && secs < 10.0,
        format!("max |W_sgd - W_ls| {worst:.2e} over real and complex systems up to 16x16, {secs:.2} s"),
    )
}

/// `W0 + r (y - W0 x) conj(x)^T`, by explicit loops.
fn hand_update<T: Scalar>(w0: &Weights<T>, x: &[T], y: &[T], r: f64) -> Vec<T> {
    let (n, m) = (w0.rows(), w0.cols());
    let mut out = w0.data().to_vec();
    for i in 0..n {
        let mut pred = T::zero();
        for j in 0..m {
            pred = pred + w0.get(i, j) * x[j];
        }
        let err = (y[i] - pred).scale(r);
        for j in 0..m {
            out[i * m + j] = out[i * m + j] + err * x[j].conj();
        }
    }
    out
}

fn max_diff<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(&p, &q)| (p - q).abs_sqr().sqrt()).fold(0.0, f64::max)
}

// 3
fn update_rule() -> Outcome {
    let one_epoch = |r: f64, scale: f64, init_seed: u64| TrainingConfig {
        learning_rate: r,
        epochs: 1,
        init_seed,
        init_scale: scale,
        shuffle: true,
    };
    let c = Complex64::new;
    let mut gaps = Vec::new();

    // real 2x3
    let cfg = one_epoch(0.1, 0.5, 11);
    let (x, y) = (vec![1.0, -2.0, 0.5], vec![3.0, -1.0]);
    let w0 = linreg::initial_weights::<f64>(2, 3, &cfg);
    let w = linreg::train_real(&TrainingSet::new(vec![x.clone()], vec![y.clone()]).unwrap(), &cfg).unwrap();
    gaps.push(max_diff(w.data(), &hand_update(&w0, &x, &y, 0.1)));

    // complex 2x2 with a random real start
    let cfg = one_epoch(0.05, 0.3, 12);
    let (x, y) = (vec![c(1.0, 2.0), c(-0.5, 0.25)], vec![c(0.0, 1.0), c(2.0, -3.0)]);
    let w0 = linreg::initial_weights::<Complex64>(2, 2, &cfg);
    let w = linreg::train_complex(&TrainingSet::new(vec![x.clone()], vec![y.clone()]).unwrap(), &cfg).unwrap();
    gaps.push(max_diff(w.data(), &hand_update(&w0, &x, &y, 0.05)));

    // complex 1x3 from zero with a real target: w = r y conj(x)
    let cfg = one_epoch(0.2, 0.0, 13);
    let x = vec![c(0.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)];
    let data = TrainingSet::<Complex64>::with_real_targets(vec![x.clone()], vec![vec![2.0]]).unwrap();
    let w = linreg::train_complex(&data, &cfg).unwrap();
    let expected: Vec<Complex64> = x.iter().map(|v| v.conj() * 0.4).collect();
    gaps.push(max_diff(w.data(), &expected));

    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    let shown: Vec<String> = gaps.iter().map(|g| format!("{g:.1e}")).collect();
    check(worst <= 1e-12, format!("3 cases, deviations {}", shown.join(", ")))
}

fn sweep_rows(config: &str, out: &Path) -> Result<Vec<ResultRow>, String> {
    let mut settings = Settings::parse(config).map_err(|e| e.to_string())?;
    settings.set("out", out.display().to_string()).unwrap();
    let cells = expand_grid(&settings).map_err(|e| e.to_string())?;
    let records = run_sweep(&cells).map_err(|e| e.to_string())?;
    let rows: Vec<ResultRow> = records.into_iter().map(|r| r.row).collect();
    if let Some(bad) = rows.iter().find(|r| !r.is_ok()) {
        return Err(format!("{} k={} s={:?}: {}", bad.pipeline, bad.k, bad.s, bad.status));
    }
    Ok(rows)
}

fn mean(rows: &[ResultRow], pipeline: &str, k: usize, s: Option<f64>) -> f64 {
    rows.iter()
        .find(|r| r.pipeline == pipeline && r.k == k && r.s == s)
        .and_then(|r| r.mean_psnr_db)
        .unwrap_or(f64::NAN)
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn clr_rows(ks: &str) -> Result<Vec<ResultRow>, String> {
    let data = mnist_path()?;
    let out = tempfile::tempdir().unwrap();
    let config = format!(
        "pipelines = trpe-attack\ndataset = mnist\ndata_path = {}\nk = {ks}\nlr = 0.01\nepochs = 300\nnum_test = 200\nseed = 2024\n",
        data.display()
    );
    sweep_rows(&config, out.path())
}

// 4 and 5
fn clr_table(rows: &Result<Vec<ResultRow>, String>) -> (Outcome, Outcome) {
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return (Err(e.clone()), Err(e.clone())),
    };
    let p = |k| mean(rows, "trpe-attack", k, None);
    let (p50, p100, p200) = (p(50), p(100), p(200));
    let slow = rows
        .iter()
        .filter(|r| r.k <= 100)
        .map(|r| r.train_s + r.infer_s_per_image * 200.0)
        .fold(0.0, f64::max);
    let table = check(
        within(p50, 17.44, 2.0) && within(p100, 19.44, 2.0) && slow <= 1200.0,
        format!("K=50 {p50:.2} dB (target 17.44), K=100 {p100:.2} dB (target 19.44), tolerance 2.0 dB; slowest cell {slow:.0} s"),
    );
    let monotone = check(
        p100 >= p50 - 0.5 && p200 >= p100 - 0.5,
        format!("K=50/100/200: {p50:.2} / {p100:.2} / {p200:.2} dB"),
    );
    (table, monotone)
}

fn lrcs_rows(data: Result<PathBuf, String>, dataset: &str, grids: &[(&str, &str)]) -> Result<Vec<ResultRow>, String> {
    let data = data?;
    let out = tempfile::tempdir().unwrap();
    let mut rows = Vec::new();
    for (ks, ss) in grids {
        let config = format!(
            "pipelines = spi-blind, spi-known\ndataset = {dataset}\ndata_path = {}\nk = {ks}\ns = {ss}\nlr = 0.01\nepochs = 300\nnum_test = 200\nseed = 2024\n",
            data.display()
        );
        rows.extend(sweep_rows(&config, out.path())?);
    }
    Ok(rows)
}

// 6
fn lrcs_table(rows: &Result<Vec<ResultRow>, String>) -> Outcome {
    let rows = rows.as_ref().map_err(Clone::clone)?;
    let blind = |k, s| mean(rows, "spi-blind", k, Some(s));
    let (s1, s500) = (blind(200, 1.0), blind(500, 1.0));
    let trend: Vec<f64> = [0.05, 0.2, 0.4, 1.0].iter().map(|&s| blind(200, s)).collect();
    let monotone = trend.windows(2).all(|w| w[1] >= w[0] - 0.5);
    check(
        within(s1, 24.21, 2.0) && within(s500, 26.43, 2.0) && monotone,
        format!(
            "K=200 S=1 {s1:.2} dB (target 24.21), K=500 S=1 {s500:.2} dB (target 26.43); K=200 over S=0.05/0.2/0.4/1: {}",
            trend.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(" / ")
        ),
    )
}

// 7
fn cifar_spot_check(rows: &Result<Vec<ResultRow>, String>) -> Outcome {
    let rows = rows.as_ref().map_err(Clone::clone)?;
    let v = mean(rows, "spi-blind", 1000, Some(1.0));
    check(within(v, 21.48, 2.5), format!("K=1000 S=1 {v:.2} dB (target 21.48, tolerance 2.5 dB)"))
}

// 8
fn tv_solver() -> Outcome {
    let start = Instant::now();
    let n = 32;
    let mut notes = Vec::new();
    let mut ok = true;

    let p = PatternSet::generate(spi::pattern_count(0.2, n * n), n, n, 8).unwrap();
    let zero = reconstruct_tv(p.as_matrix(), &spi::Measurements::new(vec![0.0; p.num_patterns()]), &TvParams::default()).unwrap();
    let zero_max = zero.image.pixels().iter().cloned().fold(0.0, f64::max);
    ok &= zero_max == 0.0 && zero.final_residual == 0.0;
    notes.push(format!("b=0 max pixel {zero_max}"));

    let c = 0.37;
    let object = Image::filled(n, n, c);
    let b = spi::measure(&object, &p).unwrap();
    let solver = TvSolver::new(p.as_matrix(), TvParams::default()).unwrap();
    let (rec, trace) = solver.solve_traced(&b).unwrap();
    let const_err = rec.image.pixels().iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
    ok &= const_err <= 1e-3;
    notes.push(format!("constant S=0.2 max error {const_err:.1e}"));
    let mut rises = trace.windows(2).filter(|w| w[1] > w[0] + 1e-9).count();

    let full = PatternSet::generate(n * n, n, n, 9).unwrap();
    let mut rng = seed::rng(10);
    let object = random_image(n, &mut rng);
    let b = spi::measure(&object, &full).unwrap();
    let direct = PinvSolver::new(full.as_matrix()).unwrap().solve(&b).unwrap();
    let params = TvParams {
        mu: 1048576.0,
        ..TvParams::default()
    };
    let (rec, trace) = TvSolver::new(full.as_matrix(), params).unwrap().solve_traced(&b).unwrap();
    let agreement = psnr(&direct, &rec.image, UNIT_PEAK).unwrap();
    ok &= agreement > 40.0;
    notes.push(format!("S=1 vs direct solve {agreement:.1} dB"));
    rises += trace.windows(2).filter(|w| w[1] > w[0] + 1e-9).count();
    ok &= rises == 0;
    notes.push(format!("objective increases {rises}"));

    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    notes.push(format!("{secs:.1} s"));
    check(ok, notes.join(", "))
}

// 9
fn spi_brute_force() -> Outcome {
    let mut rng = seed::rng(9);
    let patterns = PatternSet::generate(6, 4, 4, 99).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let pixels: Vec<f64> = (0..16).map(|_| [0.0, 0.5, 1.0][rng.random_range(0..3)]).collect();
        let object = Image::new(4, 4, pixels).unwrap();
        let fast = spi::measure(&object, &patterns).unwrap();
        for n in 0..6 {
            let mut sum = 0.0;
            for r in 0..4 {
                for c in 0..4 {
                    sum += patterns.row(n)[r * 4 + c] * object.get(r, c);
                }
            }
            worst = worst.max((sum - fast.intensities()[n]).abs());
        }
    }
    check(worst <= 1e-12, format!("1000 random {{0, 0.5, 1}} 4x4 objects, max deviation {worst:.1e}"))
}

// 10
fn known_dominates(sets: &[&Result<Vec<ResultRow>, String>]) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut cells = 0;
    for rows in sets {
        let rows = rows.as_ref().map_err(Clone::clone)?;
        for blind in rows.iter().filter(|r| r.pipeline == "spi-blind") {
            let known = mean(rows, "spi-known", blind.k, blind.s);
            let b = blind.mean_psnr_db.unwrap_or(f64::NAN);
            cells += 1;
            if !(known >= b - 0.1) {
                ok = false;
                lines.push(format!("K={} S={:?}: known {known:.2} < blind {b:.2}", blind.k, blind.s));
            }
        }
    }
    if ok {
        Ok(format!("{cells} cells, known >= blind - 0.1 dB in all"))
    } else {
        Err(lines.join("; "))
    }
}

// 11
fn format_round_trips() -> Outcome {
    let mut rng = seed::rng(11);
    let images: Vec<RawImage> = (0..5)
        .map(|_| RawImage::gray(28, 28, (0..784).map(|_| rng.random()).collect()))
        .collect();
    let mut idx = Vec::new();
    datasets::write_idx_images(&mut idx, &images).unwrap();
    let idx_ok = datasets::parse_idx_images(&idx).unwrap() == images;

    let records: Vec<CifarRecord> = (0..4)
        .map(|i| CifarRecord {
            coarse_label: i,
            fine_label: 50 + i,
            image: RawImage {
                height: 32,
                width: 32,
                channels: 3,
                data: (0..3072).map(|_| rng.random()).collect(),
            },
        })
        .collect();
    let mut bin = Vec::new();
    datasets::write_cifar100(&mut bin, &records).unwrap();
    let cifar_ok = bin.len() == 4 * 3074 && datasets::parse_cifar100(&bin).unwrap() == records;

    let img = random_image(32, &mut rng);
    let mut pgm = Vec::new();
    optinv::pgm::write_pgm(&mut pgm, &img).unwrap();
    let back = optinv::pgm::read_pgm(pgm.as_slice()).unwrap();
    let pgm_err = img.pixels().iter().zip(back.pixels()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    check(
        idx_ok && cifar_ok && pgm_err <= 1.0 / 255.0,
        format!("IDX bitwise {idx_ok}, CIFAR-100 bitwise {cifar_ok}, PGM max error {pgm_err:.2e}"),
    )
}

// 12
fn determinism() -> Outcome {
    let (data, dataset) = match mnist_path() {
        Ok(p) => (format!("data_path = {}", p.display()), "mnist"),
        Err(_) => (String::new(), "synthetic"),
    };
    let config = format!(
        "pipelines = trpe-attack, spi-blind, spi-known\ndataset = {dataset}\n{data}\nk = 24\ns = 0.2\nepochs = 20\nnum_test = 12\nseed = 77\n"
    );
    let runs: Vec<(tempfile::TempDir, Vec<ResultRow>)> = [1, 3]
        .into_iter()
        .map(|workers| {
            let dir = tempfile::tempdir().unwrap();
            let rows = bench::with_workers(workers, || sweep_rows(&config, dir.path())).unwrap()?;
            Ok((dir, rows))
        })
        .collect::<Result<_, String>>()?;
    let strip = |rows: &[ResultRow]| rows.iter().map(ResultRow::without_timing).collect::<Vec<_>>();
    let rows_equal = strip(&runs[0].1) == strip(&runs[1].1);

    let mut weights_equal = true;
    let mut files = 0;
    for entry in std::fs::read_dir(runs[0].0.path()).unwrap() {
        let cell = entry.unwrap().path();
        if cell.is_dir() {
            let name = cell.file_name().unwrap();
            let a = std::fs::read(cell.join("weights.optw")).unwrap();
            let b = std::fs::read(runs[1].0.path().join(name).join("weights.optw")).unwrap();
            weights_equal &= a == b;
            files += 1;
        }
    }
    check(
        rows_equal && weights_equal && files == 3,
        format!("{dataset}, 1 vs 3 threads: CSV rows equal {rows_equal}, {files} weight files equal {weights_equal}"),
    )
}

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    let mut record = |n: usize, ok: bool| {
        if !ok {
            failed.push(n);
        }
    };
    record(1, run(1, "TRPE round trip", trpe_round_trip));
    record(2, run(2, "regression matches least squares", regression_oracle));
    record(3, run(3, "single-sample update rule", update_rule));
    record(8, run(8, "TV solver correctness", tv_solver));
    record(9, run(9, "SPI measurement brute force", spi_brute_force));
    record(11, run(11, "format round trips", format_round_trips));
    record(12, run(12, "determinism", determinism));

    let clr = clr_rows("50, 100, 200");
    let (table, monotone) = clr_table(&clr);
    report(4, "CLR on MNIST", &table);
    report(5, "CLR monotone in K", &monotone);
    record(4, table.is_ok());
    record(5, monotone.is_ok());

    let mnist = lrcs_rows(mnist_path(), "mnist", &[("200", "0.05, 0.2, 0.4, 1"), ("500", "1")]);
    record(6, run(6, "LRCS on MNIST", || lrcs_table(&mnist)));
    let cifar = lrcs_rows(cifar_path(), "cifar100", &[("1000", "1")]);
    record(7, run(7, "LRCS on CIFAR-100", || cifar_spot_check(&cifar)));
    let swept: Vec<&Result<Vec<ResultRow>, String>> = [&mnist, &cifar].into_iter().filter(|r| r.is_ok()).collect();
    record(10, run(10, "known patterns dominate blind", || {
        if swept.is_empty() {
            return Err("no SPI sweep cells could be run".into());
        }
        known_dominates(&swept)
    }));

    failed.sort();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
#[ignore = "extended CLR cells, tens of minutes on one core"]
fn extended_clr_cells() {
    let rows = clr_rows("200, 500");
    let outcome = rows.as_ref().map_err(Clone::clone).and_then(|rows| {
        let (p200, p500) = (mean(rows, "trpe-attack", 200, None), mean(rows, "trpe-attack", 500, None));
        check(
            within(p200, 22.45, 2.0) && within(p500, 27.30, 2.0),
            format!("K=200 {p200:.2} dB (target 22.45), K=500 {p500:.2} dB (target 27.30)"),
        )
    });
    report(4, "CLR on MNIST, extended cells", &outcome);
    assert!(outcome.is_ok());
}
