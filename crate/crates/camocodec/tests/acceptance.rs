//! Acceptance gate: every criterion runs at its pinned tolerance and prints
//! one PASS/FAIL line. Oracles here are written independently of the library
//! code they check.

// `ensure!(a >= b)` must fail on NaN, which `!(cond)` does.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use camocodec::config::PipelineConfig;
use camocodec::pipeline::{self, layout};
use camocodec::synth::{gaussian_blobs, write_texture_dataset, TextureSpec};
use camocodec_core::dataset::{decode_features, encode_features, pca_fit, pca_transform, FeatureMatrix};
use camocodec_core::dnn::{
    decode_model, encode_model, forward, init_network, loss_and_grad, train, Activation, DenseNet, Mode, TrainConfig,
    TrainHistory,
};
use camocodec_core::dsp::{mfcc, MfccConfig};
use camocodec_core::metrics::{f1_score, format_hms, macro_average, roc_curve, weighted_average, ClassMetrics};
use camocodec_core::raster::{resize_bilinear, GrayImage};
use camocodec_core::sonify::{decode_wav, dequantize, encode_image, encode_wav, quantize, roundtrip_fidelity, AudioClip, EncodeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&mut Shared) -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t > budget {
        return Err(format!("took {:.1} s, budget {:.0} s", t.as_secs_f64(), budget.as_secs_f64()));
    }
    Ok(())
}

/// Artifacts kept from the first run of criteria 5, 8 and 9 for the
/// determinism rerun.
#[derive(Default)]
struct Shared {
    fidelity_wavs: Vec<Vec<u8>>,
    fidelity_scores: Vec<f64>,
    pipeline_tree: BTreeMap<String, Vec<u8>>,
    blobs: Option<(Vec<u8>, Vec<u8>, String)>,
    _scratch: Vec<tempfile::TempDir>,
}

// ---------------------------------------------------------------- criterion 1

fn metric_arithmetic(_: &mut Shared) -> Outcome {
    let start = Instant::now();
    // (precision, recall, printed f1) per class, then printed macro (p, r, f1)
    type Prf = (f64, f64, f64);
    let tables: [(&str, [Prf; 3], Prf); 2] = [
        ("image", [(0.93, 0.85, 0.89), (0.95, 0.95, 0.95), (0.88, 0.96, 0.92)], (0.92, 0.92, 0.92)),
        ("audio", [(0.86, 0.82, 0.84), (0.84, 0.91, 0.87), (0.91, 0.88, 0.89)], (0.87, 0.87, 0.87)),
    ];
    let mut worst = 0.0f64;
    for (name, rows, (mp, mr, mf)) in tables {
        let classes: Vec<ClassMetrics> = rows
            .iter()
            .map(|&(p, r, _)| ClassMetrics { precision: p, recall: r, f1: f1_score(p, r), support: 100 })
            .collect();
        for (m, &(p, r, printed)) in classes.iter().zip(&rows) {
            // independent harmonic mean
            let oracle = 2.0 / (1.0 / p + 1.0 / r);
            ensure!((m.f1 - oracle).abs() < 1e-12, "{name}: f1({p}, {r}) = {} but oracle {oracle}", m.f1);
            worst = worst.max((m.f1 - printed).abs());
            ensure!((m.f1 - printed).abs() <= 0.005, "{name}: f1({p}, {r}) = {:.4}, printed {printed}", m.f1);
        }
        let mac = macro_average(&classes);
        let wtd = weighted_average(&classes);
        for (label, got, want) in [("precision", mac.precision, mp), ("recall", mac.recall, mr), ("f1", mac.f1, mf)] {
            worst = worst.max((got - want).abs());
            ensure!((got - want).abs() <= 0.005, "{name}: macro {label} {got:.4} vs printed {want}");
        }
        ensure!(wtd == mac, "{name}: equal supports should make weighted == macro");
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("largest deviation from printed values {worst:.4}"))
}

// ---------------------------------------------------------------- criterion 2

fn timing_format(_: &mut Shared) -> Outcome {
    let a = format_hms(844.589522).map_err(|e| e.to_string())?;
    let b = format_hms(77.319555).map_err(|e| e.to_string())?;
    ensure!(a == "0 : 14 : 04.589522", "got {a:?}");
    ensure!(b == "0 : 01 : 17.319555", "got {b:?}");
    Ok(format!("{a:?}, {b:?}"))
}

// ---------------------------------------------------------------- criterion 3

/// Straight-line MFCC: direct DFT, explicit triangles, direct DCT.
fn naive_mfcc(x: &[f64], sr: u32, cfg: &MfccConfig) -> Vec<f64> {
    let n = cfg.n_fft;
    let bins = n / 2 + 1;
    let sr = f64::from(sr);
    let hz_to_mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let mel_to_hz = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let fmax = cfg.fmax.unwrap_or(sr / 2.0);
    let (m_lo, m_hi) = (hz_to_mel(cfg.fmin), hz_to_mel(fmax));
    let pts: Vec<f64> = (0..cfg.n_mels + 2).map(|i| mel_to_hz(m_lo + (m_hi - m_lo) * i as f64 / (cfg.n_mels + 1) as f64)).collect();
    let tri = |m: usize, f: f64| {
        let (lo, c, hi) = (pts[m], pts[m + 1], pts[m + 2]);
        ((f - lo) / (c - lo)).min((hi - f) / (hi - c)).max(0.0)
    };
    let cos_t: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
    let sin_t: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).sin()).collect();
    let frames = (x.len() - 1) / cfg.hop + 1;
    let mut out = Vec::new();
    for j in 0..frames {
        let seg: Vec<f64> = (0..n)
            .map(|i| {
                let w = 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos());
                x.get(j * cfg.hop + i).map_or(0.0, |s| s * w)
            })
            .collect();
        let power: Vec<f64> = (0..bins)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, &v) in seg.iter().enumerate() {
                    let idx = (k * t) % n;
                    re += v * cos_t[idx];
                    im -= v * sin_t[idx];
                }
                re * re + im * im
            })
            .collect();
        let logmel: Vec<f64> = (0..cfg.n_mels)
            .map(|m| {
                let e: f64 = (0..bins).map(|k| tri(m, k as f64 * sr / n as f64) * power[k]).sum();
                10.0 * e.max(1e-10).log10()
            })
            .collect();
        let nm = cfg.n_mels as f64;
        for q in 0..cfg.n_coeffs {
            let s: f64 = logmel.iter().enumerate().map(|(i, v)| v * (PI * q as f64 * (2 * i + 1) as f64 / (2.0 * nm)).cos()).sum();
            out.push(s * if q == 0 { (1.0 / nm).sqrt() } else { (2.0 / nm).sqrt() });
        }
    }
    out.resize(cfg.target_dim, 0.0);
    out
}

fn mfcc_oracle(_: &mut Shared) -> Outcome {
    let start = Instant::now();
    let cfg = MfccConfig::default();
    let sr = 22050;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for clip_i in 0..20 {
        let len = rng.random_range(1..=sr as usize);
        let kind = clip_i % 3;
        let f0 = rng.random_range(100.0..5000.0);
        let x: Vec<f64> = (0..len)
            .map(|t| match kind {
                0 => rng.random_range(-1.0..1.0),
                1 => 0.8 * (2.0 * PI * f0 * t as f64 / f64::from(sr)).sin(),
                _ => 0.5 * (2.0 * PI * f0 * t as f64 / f64::from(sr)).sin() + 0.3 * rng.random_range(-1.0..1.0),
            })
            .collect();
        let clip = AudioClip::new(sr, x.clone()).map_err(|e| e.to_string())?;
        let got = mfcc(&clip, &cfg).map_err(|e| e.to_string())?.values;
        let want = naive_mfcc(&x, sr, &cfg);
        ensure!(got.len() == 1228 && want.len() == 1228, "descriptor lengths {} / {}", got.len(), want.len());
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
        ensure!(err <= 1e-6, "clip {clip_i} (len {len}): max abs error {err:e}");
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("20 clips, max abs error {worst:.2e}"))
}

// ---------------------------------------------------------------- criterion 4

fn fd_loss(net: &DenseNet, x: &[f64], y: &[usize]) -> f64 {
    let k = net.n_classes();
    let (p, _) = forward(net, x, y.len(), Mode::Eval).unwrap();
    -y.iter().enumerate().map(|(i, &c)| p[i * k + c].ln()).sum::<f64>() / y.len() as f64
}

fn gradient_check(_: &mut Shared) -> Outcome {
    let start = Instant::now();
    let eps = 1e-5;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for activation in Activation::ALL {
        for seed in 0..10u64 {
            let cfg = TrainConfig { neurons: vec![4], activation, seed, ..TrainConfig::default() };
            let mut net = init_network(&cfg, 5, 3).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            for l in 0..net.n_layers() {
                net.biases_mut(l).iter_mut().for_each(|b| *b = rng.random_range(-0.3..0.3));
            }
            let x: Vec<f64> = (0..8 * 5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y: Vec<usize> = (0..8).map(|_| rng.random_range(0..3)).collect();
            let (_, grads) = loss_and_grad(&net, &x, &y).map_err(|e| e.to_string())?;
            for l in 0..net.n_layers() {
                for bias in [false, true] {
                    let analytic = if bias { &grads.biases[l] } else { &grads.weights[l] };
                    for (i, &g) in analytic.iter().enumerate() {
                        let shifted = |d: f64| {
                            let mut n = net.clone();
                            if bias {
                                n.biases_mut(l)[i] += d;
                            } else {
                                n.weights_mut(l)[i] += d;
                            }
                            fd_loss(&n, &x, &y)
                        };
                        let numeric = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
                        // floor keeps exact zeros (dead relu units) from dividing by zero
                        let rel = (g - numeric).abs() / g.abs().max(numeric.abs()).max(1e-7);
                        worst = worst.max(rel);
                        checked += 1;
                        ensure!(rel < 1e-4, "{activation:?} seed {seed} layer {l} param {i}: analytic {g:e} numeric {numeric:e}");
                    }
                }
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} partials, worst relative error {worst:.2e}"))
}

// ---------------------------------------------------------------- criterion 5

fn random_image(seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::new(64, 64, (0..64 * 64).map(|_| rng.random::<f64>()).collect()).unwrap()
}

fn fidelity_run() -> Result<(Vec<f64>, Vec<Vec<u8>>), String> {
    let cfg = EncodeConfig::default();
    let mut scores = Vec::new();
    let mut wavs = Vec::new();
    for i in 0..20 {
        let img = resize_bilinear(&random_image(500 + i), cfg.rows, cfg.cols).map_err(|e| e.to_string())?;
        scores.push(roundtrip_fidelity(&img, &cfg, i).map_err(|e| e.to_string())?);
        wavs.push(encode_wav(&encode_image(&img, &cfg, i).map_err(|e| e.to_string())?));
    }
    Ok((scores, wavs))
}

fn camouflage_fidelity(shared: &mut Shared) -> Outcome {
    let start = Instant::now();
    let (scores, wavs) = fidelity_run()?;
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(min >= 0.90, "minimum Pearson {min:.4} < 0.90 (all: {scores:.3?})");
    shared.fidelity_scores = scores;
    shared.fidelity_wavs = wavs;
    within(start, Duration::from_secs(60))?;
    Ok(format!("20 images, min Pearson {min:.4}"))
}

// ---------------------------------------------------------------- criterion 6

/// Fraction of (positive, negative) pairs ranked correctly, ties count half.
fn mann_whitney(scores: &[f64], pos: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if pos[i] && !pos[j] {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn auc_oracle(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for inst in 0..200 {
        let n = rng.random_range(2..=50);
        let mut pos: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        pos[0] = true;
        pos[1] = false;
        let coarse = inst % 2 == 0;
        let scores: Vec<f64> =
            (0..n).map(|_| if coarse { f64::from(rng.random_range(0..5u8)) / 4.0 } else { rng.random::<f64>() }).collect();
        let got = roc_curve(&scores, &pos).map_err(|e| e.to_string())?.area;
        let want = mann_whitney(&scores, &pos);
        worst = worst.max((got - want).abs());
        ensure!((got - want).abs() <= 1e-12, "instance {inst}: trapezoid {got} vs pairs {want}");
    }
    let perfect = roc_curve(&[0.9, 0.8, 0.3, 0.1], &[true, true, false, false]).map_err(|e| e.to_string())?.area;
    ensure!(perfect == 1.0, "perfect ranking gave {perfect}");
    let tied = roc_curve(&[0.5; 6], &[true, false, true, false, false, true]).map_err(|e| e.to_string())?.area;
    ensure!(tied == 0.5, "all-tied scores gave {tied}");
    Ok(format!("200 instances, max deviation {worst:.1e}; perfect 1.0, ties 0.5"))
}

// ---------------------------------------------------------------- criterion 7

fn canonical_sign(v: &mut [f64]) {
    let big = v.iter().cloned().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
    if big < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn pca_oracle(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut worst_recon = 0.0f64;
    for trial in 0..20 {
        let n = rng.random_range(3..=50);
        let dim = rng.random_range(2..=20);
        let scales: Vec<f64> = (0..dim).map(|j| 1.0 + j as f64 * 0.7).collect();
        let data: Vec<f64> = (0..n * dim).map(|i| rng.random_range(-1.0..1.0) * scales[i % dim] + 0.3).collect();
        let labels = vec![0u32; n];
        let x = FeatureMatrix::new(dim, data.clone(), labels, vec!["x".into()]).map_err(|e| e.to_string())?;

        // covariance eigendecomposition oracle
        let m = nalgebra::DMatrix::from_row_slice(n, dim, &data);
        let mean = m.row_mean();
        let centred = nalgebra::DMatrix::from_fn(n, dim, |i, j| m[(i, j)] - mean[j]);
        let cov = centred.transpose() * &centred / (n as f64 - 1.0);
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

        let k = (n - 1).min(dim);
        let model = pca_fit(&x, k).map_err(|e| e.to_string())?;
        for (c, &o) in order.iter().take(k).enumerate() {
            let var = eig.eigenvalues[o];
            let dv = (model.explained_variance[c] - var).abs();
            worst = worst.max(dv);
            ensure!(dv <= 1e-8, "trial {trial} ({n}x{dim}) variance {c}: {} vs {var}", model.explained_variance[c]);
            let mut v: Vec<f64> = eig.eigenvectors.column(o).iter().cloned().collect();
            canonical_sign(&mut v);
            let dc = model.component(c).iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(dc);
            ensure!(dc <= 1e-8, "trial {trial} ({n}x{dim}) component {c} differs by {dc:e}");
        }

        let full = pca_fit(&x, n.min(dim)).map_err(|e| e.to_string())?;
        let scores = pca_transform(&full, &x).map_err(|e| e.to_string())?;
        let back = full.reconstruct(&scores);
        let err = back.iter().zip(&data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_recon = worst_recon.max(err);
        ensure!(err < 1e-8, "trial {trial}: full-rank reconstruction error {err:e}");
    }
    Ok(format!("20 matrices, max deviation {worst:.1e}, reconstruction {worst_recon:.1e}"))
}

// ---------------------------------------------------------------- criterion 8

/// Every file under `root` keyed by relative path. Timing records are
/// excluded and the wall-clock column of history files is dropped.
fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
                continue;
            }
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
            if rel.starts_with("timing/") || rel.starts_with("compare/") {
                continue;
            }
            let bytes = fs::read(&p).unwrap();
            let bytes = if rel.ends_with("history.csv") { strip_last_column(&bytes) } else { bytes };
            out.insert(rel, bytes);
        }
    }
    out
}

fn strip_last_column(csv: &[u8]) -> Vec<u8> {
    let text = std::str::from_utf8(csv).unwrap();
    text.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n").into_bytes()
}

fn run_pipeline(dir: &Path) -> Result<(PipelineConfig, f64), String> {
    let manifest = write_texture_dataset(dir, &TextureSpec::default()).map_err(|e| e.to_string())?;
    let text = r#"{"paths": {"manifest": "manifest.csv", "output": "out"}}"#;
    let cfg = PipelineConfig::from_json(text, &dir.join("config.json")).map_err(|e| e.to_string())?;
    ensure!(cfg.paths.manifest == manifest, "manifest path {}", cfg.paths.manifest.display());
    pipeline::cmd_encode(&cfg, false).map_err(|e| e.to_string())?;
    let f = pipeline::cmd_featurize(&cfg).map_err(|e| e.to_string())?;
    ensure!(f.train_shape == (180, 1228) && f.val_shape == (60, 1228), "feature shapes {:?} {:?}", f.train_shape, f.val_shape);
    pipeline::cmd_train(&cfg).map_err(|e| e.to_string())?;
    let eval = pipeline::cmd_eval(&cfg).map_err(|e| e.to_string())?;
    Ok((cfg, eval.report.accuracy))
}

fn synthetic_end_to_end(shared: &mut Shared) -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (cfg, acc) = run_pipeline(dir.path())?;
    ensure!(acc >= 0.70, "validation accuracy {acc:.4} < 0.70");
    let out = &cfg.paths.output;
    let eval = out.join(layout::EVAL_DIR);
    let mut required: Vec<PathBuf> = ["report.txt", "confusion.csv", "auc.csv", "pca2.csv", "pca3.csv"].iter().map(|f| eval.join(f)).collect();
    for class in camocodec::synth::TEXTURE_CLASSES {
        required.push(eval.join(format!("roc_{class}.csv")));
        required.push(eval.join(format!("pr_{class}.csv")));
    }
    required.extend([layout::MODEL, layout::HISTORY, layout::TRAIN_FEATURES, layout::VAL_FEATURES].iter().map(|r| out.join(r)));
    for p in &required {
        ensure!(p.is_file(), "missing artifact {}", p.display());
    }
    let wavs = fs::read_dir(out.join("audio/vertical_bands")).map_err(|e| e.to_string())?.count();
    ensure!(wavs == 80, "{wavs} WAVs for one class, expected 80");
    let report = fs::read_to_string(eval.join("report.txt")).map_err(|e| e.to_string())?;
    let header = report.lines().find(|l| l.contains("precision")).unwrap_or("");
    let cols: Vec<&str> = header.split_whitespace().collect();
    ensure!(cols == ["precision", "recall", "f1-score", "support"], "report header {header:?}");
    for needle in ["accuracy", "macro avg", "weighted avg"] {
        ensure!(report.contains(needle), "report lacks {needle:?}");
    }
    let pca_rows = fs::read_to_string(eval.join("pca2.csv")).map_err(|e| e.to_string())?.lines().count() - 1;
    ensure!(pca_rows == 60, "pca2.csv has {pca_rows} rows");
    shared.pipeline_tree = snapshot(out);
    shared._scratch.push(dir);
    within(start, Duration::from_secs(600))?;
    Ok(format!("val accuracy {acc:.4}, {} artifacts, {:.1} s", shared.pipeline_tree.len(), start.elapsed().as_secs_f64()))
}

// ---------------------------------------------------------------- criterion 9

fn blob_run() -> Result<(f64, Vec<u8>, Vec<u8>, TrainHistory), String> {
    // A 6 sigma mean gap in 1228-d is poorly estimated from few samples (60 per
    // class leaves even nearest-centroid at ~0.95), so train on more; a narrow
    // hidden layer keeps that fast.
    let cfg = TrainConfig { seed: 21, neurons: vec![64], dropout_rate: 0.5, ..TrainConfig::default() };
    let tr = gaussian_blobs(3, 1500, 1228, 6.0, 1);
    let va = gaussian_blobs(3, 100, 1228, 6.0, 2);
    let net = init_network(&cfg, tr.dim(), 3).map_err(|e| e.to_string())?;
    let (net, hist) = train(net, &cfg, &tr, &va).map_err(|e| e.to_string())?;
    let acc = hist.last().map_or(0.0, |e| e.val_acc);
    Ok((acc, encode_model(&net), encode_features(&tr), hist))
}

fn blob_ceiling(shared: &mut Shared) -> Outcome {
    let start = Instant::now();
    let (acc, model, feats, hist) = blob_run()?;
    ensure!(hist.len() == 50, "{} epochs", hist.len());
    ensure!(acc >= 0.95, "val accuracy {acc:.4} < 0.95");
    shared.blobs = Some((model, feats, hist.to_csv()));
    within(start, Duration::from_secs(60))?;
    Ok(format!("val accuracy {acc:.4} after 50 epochs"))
}

// ---------------------------------------------------------------- criterion 10

fn determinism(shared: &mut Shared) -> Outcome {
    ensure!(!shared.fidelity_wavs.is_empty(), "criterion 5 produced nothing to compare");
    let (scores, wavs) = fidelity_run()?;
    ensure!(wavs == shared.fidelity_wavs, "criterion 5 WAV bytes differ between runs");
    ensure!(scores == shared.fidelity_scores, "criterion 5 fidelity differs between runs");

    ensure!(!shared.pipeline_tree.is_empty(), "criterion 8 produced nothing to compare");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (cfg, _) = run_pipeline(dir.path())?;
    let again = snapshot(&cfg.paths.output);
    ensure!(again.keys().eq(shared.pipeline_tree.keys()), "criterion 8 artifact sets differ");
    for (k, v) in &again {
        ensure!(shared.pipeline_tree[k] == *v, "criterion 8 artifact {k} differs");
    }

    let (model, feats, hist) = shared.blobs.clone().ok_or("criterion 9 produced nothing to compare")?;
    let (_, model2, feats2, hist2) = blob_run()?;
    ensure!(model == model2, "criterion 9 CAMN bytes differ");
    ensure!(feats == feats2, "criterion 9 CAMF bytes differ");
    ensure!(strip_last_column(hist.as_bytes()) == strip_last_column(hist2.to_csv().as_bytes()), "criterion 9 history differs");
    Ok(format!("{} WAVs, {} pipeline artifacts, blob model/features/history identical", wavs.len(), again.len()))
}

// ---------------------------------------------------------------- criterion 11

fn file_formats(_: &mut Shared) -> Outcome {
    let silence = encode_wav(&AudioClip::new(22050, vec![0.0; 22050]).unwrap());
    ensure!(silence.len() == 44_144, "silence WAV is {} bytes", silence.len());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples: Vec<f64> = (0..5000).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let clip = AudioClip::new(16000, samples.clone()).unwrap();
    let back = decode_wav(&encode_wav(&clip)).map_err(|e| e.to_string())?;
    ensure!(back.sample_rate() == 16000, "sample rate {}", back.sample_rate());
    let q: Vec<i16> = back.samples().iter().map(|&s| quantize(s)).collect();
    let want: Vec<i16> = samples.iter().map(|&s| quantize(s)).collect();
    ensure!(q == want, "quantized samples differ after WAV round trip");
    ensure!(back.samples().iter().zip(&want).all(|(&s, &w)| s == dequantize(w)), "decoded values are not dequantized codes");

    let x = FeatureMatrix::new(7, (0..35).map(|_| rng.random::<f64>() * 1e3 - 500.0).collect(), vec![0, 1, 2, 1, 0], vec!["a".into(), "b".into(), "c".into()])
        .unwrap();
    let x2 = decode_features(&encode_features(&x)).map_err(|e| e.to_string())?;
    ensure!(x2 == x, "CAMF round trip differs");
    ensure!(x2.data().iter().zip(x.data()).all(|(a, b)| a.to_bits() == b.to_bits()), "CAMF payload bits differ");

    let cfg = TrainConfig { neurons: vec![6, 5], activation: Activation::Tanh, seed: 5, ..TrainConfig::default() };
    let net = init_network(&cfg, 7, 3).unwrap();
    let net2 = decode_model(&encode_model(&net)).map_err(|e| e.to_string())?;
    ensure!(net2 == net, "CAMN round trip differs");
    Ok("WAV quantized equality, CAMF/CAMN exact, silence = 44144 bytes".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("metric arithmetic vs printed tables", metric_arithmetic),
        ("timing format", timing_format),
        ("MFCC oracle equivalence", mfcc_oracle),
        ("gradient correctness", gradient_check),
        ("round-trip camouflage fidelity", camouflage_fidelity),
        ("AUC oracle", auc_oracle),
        ("PCA oracle", pca_oracle),
        ("synthetic end-to-end", synthetic_end_to_end),
        ("synthetic separability ceiling", blob_ceiling),
        ("determinism", determinism),
        ("file-format fidelity", file_formats),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut shared = Shared::default();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut shared)))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} ({detail}) [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why} [{secs:.1} s]");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
