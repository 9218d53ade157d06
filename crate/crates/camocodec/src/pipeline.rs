//! The pipeline subcommands. Each reads its inputs from the configured
//! output directory (or the manifest) and writes artifacts under it using the
//! fixed names in [`layout`]. Everything except the files under `timing/` is
//! a pure function of configuration, data and seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use camocodec_core::dataset::{pca_fit, pca_transform, FeatureMatrix, Manifest};
use camocodec_core::dnn::{
    evaluate_config, init_network, predict, select_best, train_with_clock, DenseNet, GridResult, TrainConfig, TrainHistory,
};
use camocodec_core::dsp::mel_spectrogram;
use camocodec_core::metrics::{
    class_report, confusion_matrix, one_vs_rest_curves, render_report, round2, timing_report, ClassCurves, ClassReport,
    ConfusionMatrix, TimingRecord,
};
use camocodec_core::raster::{GrayImage, RasterImage};
use camocodec_core::sonify::decode_spectrogram;
use camocodec_core::stats::pearson;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::features::{build_features, build_pixel_features, encode_entry, pixel_row};
use crate::io::{load_features, load_image, load_model, read_text, save_features, save_model, save_pgm, save_wav, write_bytes};
use crate::manifest::{load_manifest, resolve};

/// Artifact names relative to the output directory.
pub mod layout {
    pub const AUDIO_DIR: &str = "audio";
    pub const SPECTROGRAM_DIR: &str = "spectrograms";
    pub const MEL_DIR: &str = "mel";
    pub const TRAIN_FEATURES: &str = "features/train.camf";
    pub const VAL_FEATURES: &str = "features/val.camf";
    pub const MODEL: &str = "model/audio.camn";
    pub const HISTORY: &str = "model/history.csv";
    pub const GRID_TABLE: &str = "model/grid.csv";
    pub const EVAL_DIR: &str = "eval";
    pub const BASELINE_DIR: &str = "baseline";
    pub const BASELINE_TRAIN: &str = "baseline/train.camf";
    pub const BASELINE_VAL: &str = "baseline/val.camf";
    pub const BASELINE_MODEL: &str = "baseline/model.camn";
    pub const BASELINE_HISTORY: &str = "baseline/history.csv";
    pub const TIMING_DIR: &str = "timing";
    pub const COMPARE_TEXT: &str = "compare/summary.txt";
    pub const COMPARE_CSV: &str = "compare/summary.csv";
}

fn out(cfg: &PipelineConfig, rel: &str) -> PathBuf {
    cfg.paths.output.join(rel)
}

fn stem(entry_path: &str) -> String {
    Path::new(entry_path).file_stem().map_or_else(|| entry_path.to_string(), |s| s.to_string_lossy().into_owned())
}

/// `<dir>/<label>/<stem>.<ext>` for entry `i`.
pub fn entry_artifact(cfg: &PipelineConfig, m: &Manifest, i: usize, dir: &str, ext: &str) -> PathBuf {
    let e = &m.entries[i];
    out(cfg, dir).join(&e.label).join(format!("{}.{ext}", stem(&e.path)))
}

fn timing_path(cfg: &PipelineConfig, stage: &str) -> PathBuf {
    out(cfg, layout::TIMING_DIR).join(format!("{stage}.csv"))
}

/// Writes `timing/<stage>.csv` as `stage,seconds,formatted`.
pub fn write_timing(cfg: &PipelineConfig, stage: &str, seconds: f64) -> Result<TimingRecord> {
    let rec = timing_report(stage, seconds)?;
    let text = format!("stage,seconds,formatted\n{},{},{}\n", rec.stage, rec.seconds, rec.formatted);
    write_bytes(&timing_path(cfg, stage), text.as_bytes())?;
    Ok(rec)
}

pub fn read_timing(cfg: &PipelineConfig, stage: &str) -> Result<TimingRecord> {
    let path = timing_path(cfg, stage);
    let text = read_text(&path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let bad = |message: String| Error::Manifest { path: path.clone(), line: 2, message };
    let rec = reader.records().next().ok_or_else(|| bad("no timing row".into()))?.map_err(|e| bad(e.to_string()))?;
    let seconds: f64 = rec[1].parse().map_err(|_| bad(format!("bad seconds `{}`", &rec[1])))?;
    Ok(timing_report(&rec[0], seconds)?)
}

/// Grayscale raster of a `[0, 1]` image.
fn gray_to_raster(img: &GrayImage) -> RasterImage {
    img.to_raster()
}

/// Log-mel spectrogram as an image: one row per mel band (highest at the
/// top), one column per frame, min-max scaled.
fn mel_image(values: &[f64], n_frames: usize, n_mels: usize) -> GrayImage {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut data = vec![0.0; n_frames * n_mels];
    for j in 0..n_frames {
        for b in 0..n_mels {
            let v = values[j * n_mels + b];
            data[(n_mels - 1 - b) * n_frames + j] = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
        }
    }
    GrayImage::new(n_frames, n_mels, data).expect("non-empty mel image")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeSummary {
    pub wavs: Vec<PathBuf>,
    /// Source-vs-decoded Pearson correlation per entry, when spectrograms were
    /// requested.
    pub fidelity: Vec<f64>,
    pub timing: TimingRecord,
}

/// One WAV per manifest entry; optionally the decoded spectrogram and the
/// log-mel spectrogram of each clip as PGMs.
pub fn cmd_encode(cfg: &PipelineConfig, spectrograms: bool) -> Result<EncodeSummary> {
    let start = Instant::now();
    let manifest_path = &cfg.paths.manifest;
    let m = load_manifest(manifest_path)?;
    let results: Vec<(PathBuf, Option<f64>)> = (0..m.entries.len())
        .into_par_iter()
        .map(|i| {
            let clip = encode_entry(manifest_path, &m, i, &cfg.encode, cfg.seed)?;
            let wav = entry_artifact(cfg, &m, i, layout::AUDIO_DIR, "wav");
            save_wav(&clip, &wav)?;
            if !spectrograms {
                return Ok((wav, None));
            }
            let src = resolve(manifest_path, &m.entries[i]);
            let decoded = decode_spectrogram(&clip, &cfg.encode).map_err(|source| Error::Encode { path: src.clone(), source })?;
            save_pgm(&gray_to_raster(&decoded), &entry_artifact(cfg, &m, i, layout::SPECTROGRAM_DIR, "pgm"))?;
            let mel = mel_spectrogram(&clip, &cfg.mfcc).map_err(|source| Error::Mfcc { path: src.clone(), source })?;
            save_pgm(&gray_to_raster(&mel_image(&mel.values, mel.n_frames, mel.n_mels)), &entry_artifact(cfg, &m, i, layout::MEL_DIR, "pgm"))?;
            let reference = pixel_row(&load_image(&src)?, cfg.encode.rows, cfg.encode.cols).map_err(|source| Error::Raster { path: src, source })?;
            Ok((wav, Some(pearson(reference.data(), decoded.data()))))
        })
        .collect::<Result<_>>()?;
    let timing = write_timing(cfg, "encode", start.elapsed().as_secs_f64())?;
    let (wavs, fid): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(EncodeSummary { wavs, fidelity: fid.into_iter().flatten().collect(), timing })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturizeSummary {
    pub train_shape: (usize, usize),
    pub val_shape: (usize, usize),
    pub timing: TimingRecord,
}

impl FeaturizeSummary {
    pub fn render(&self) -> String {
        format!(
            "train.camf {}x{}\nval.camf {}x{}\n",
            self.train_shape.0, self.train_shape.1, self.val_shape.0, self.val_shape.1
        )
    }
}

pub fn cmd_featurize(cfg: &PipelineConfig) -> Result<FeaturizeSummary> {
    let start = Instant::now();
    let m = load_manifest(&cfg.paths.manifest)?;
    let (train, val) = build_features(&m, &cfg.paths.manifest, &cfg.encode, &cfg.mfcc, cfg.seed)?;
    save_features(&train, &out(cfg, layout::TRAIN_FEATURES))?;
    save_features(&val, &out(cfg, layout::VAL_FEATURES))?;
    Ok(FeaturizeSummary {
        train_shape: (train.n_samples(), train.dim()),
        val_shape: (val.n_samples(), val.dim()),
        timing: write_timing(cfg, "featurize", start.elapsed().as_secs_f64())?,
    })
}

fn n_classes(train: &FeatureMatrix, val: &FeatureMatrix) -> usize {
    train.n_classes().max(val.n_classes())
}

fn fit(tc: &TrainConfig, train: &FeatureMatrix, val: &FeatureMatrix) -> Result<(DenseNet, TrainHistory)> {
    let net = init_network(tc, train.dim(), n_classes(train, val))?;
    let clock = Instant::now();
    Ok(train_with_clock(net, tc, train, val, || clock.elapsed().as_secs_f64())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub config: TrainConfig,
    pub history: TrainHistory,
    pub grid: Option<GridResult>,
    pub timing: TimingRecord,
}

/// Trains on `features/train.camf`, or grid-searches when the config carries
/// grid axes; writes the model and its history.
pub fn cmd_train(cfg: &PipelineConfig) -> Result<TrainSummary> {
    if cfg.grid.is_some() {
        return cmd_grid(cfg);
    }
    let (train, val) = (load_features(&out(cfg, layout::TRAIN_FEATURES))?, load_features(&out(cfg, layout::VAL_FEATURES))?);
    let tc = cfg.train_config();
    let start = Instant::now();
    let (net, history) = fit(&tc, &train, &val)?;
    let timing = write_timing(cfg, "train", start.elapsed().as_secs_f64())?;
    save_model(&net, &out(cfg, layout::MODEL))?;
    write_bytes(&out(cfg, layout::HISTORY), history.to_csv().as_bytes())?;
    Ok(TrainSummary { config: tc, history, grid: None, timing })
}

/// One row per configuration, in enumeration order.
pub fn grid_table_csv(result: &GridResult) -> String {
    let mut s = String::from(
        "index,batch_size,epochs,optimizer,learn_rate,momentum,init_mode,activation,dropout_rate,weight_constraint,neurons,val_acc,val_loss\n",
    );
    for r in &result.rows {
        let c = &r.config;
        let wc = c.weight_constraint.map_or_else(String::new, |v| v.to_string());
        let neurons = c.neurons.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.index,
            c.batch_size,
            c.epochs,
            c.optimizer.name(),
            c.learn_rate,
            c.momentum,
            c.init_mode.name(),
            c.activation.name(),
            c.dropout_rate,
            wc,
            neurons,
            r.val_acc,
            r.val_loss
        );
    }
    s
}

/// Exhaustive search over the config's grid (configurations train in
/// parallel), then refits the winner and saves it like [`cmd_train`].
pub fn cmd_grid(cfg: &PipelineConfig) -> Result<TrainSummary> {
    let axes = cfg.grid_axes().ok_or_else(|| Error::Invalid("config has no `grid` section".into()))?;
    let (train, val) = (load_features(&out(cfg, layout::TRAIN_FEATURES))?, load_features(&out(cfg, layout::VAL_FEATURES))?);
    let start = Instant::now();
    let rows = axes
        .configs()?
        .par_iter()
        .enumerate()
        .map(|(i, c)| evaluate_config(i, c, &train, &val))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let result = select_best(rows)?;
    let best = result.best_config().clone();
    let (net, history) = fit(&best, &train, &val)?;
    let timing = write_timing(cfg, "train", start.elapsed().as_secs_f64())?;
    save_model(&net, &out(cfg, layout::MODEL))?;
    write_bytes(&out(cfg, layout::HISTORY), history.to_csv().as_bytes())?;
    write_bytes(&out(cfg, layout::GRID_TABLE), grid_table_csv(&result).as_bytes())?;
    Ok(TrainSummary { config: best, history, grid: Some(result), timing })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub confusion: ConfusionMatrix,
    pub report: ClassReport,
    pub rendered: String,
    pub curves: Vec<ClassCurves>,
    pub files: Vec<PathBuf>,
}

/// `class,roc_auc,average_precision`; undefined areas are left empty.
pub fn auc_table_csv(curves: &[ClassCurves], names: &[String]) -> String {
    let mut s = String::from("class,roc_auc,average_precision\n");
    for c in curves {
        let area = |d: &Option<camocodec_core::metrics::CurveData>| d.as_ref().map_or_else(String::new, |d| d.area.to_string());
        let _ = writeln!(s, "{},{},{}", names[c.class_id], area(&c.roc), area(&c.pr));
    }
    s
}

/// `index,label,pc1..pck` rows of PCA scores.
pub fn pca_csv(x: &FeatureMatrix, k: usize) -> Result<String> {
    let model = pca_fit(x, k)?;
    let scores = pca_transform(&model, x)?;
    let mut s = String::from("index,label");
    for j in 1..=k {
        let _ = write!(s, ",pc{j}");
    }
    s.push('\n');
    for (i, row) in scores.chunks_exact(k).enumerate() {
        let _ = write!(s, "{},{}", i, x.class_names()[x.labels()[i] as usize]);
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    Ok(s)
}

/// Report, confusion matrix, per-class curves and AUC table for `net` on
/// `val`, written under `dir`. With `with_pca`, also the k = 2 and k = 3
/// PCA scores of the validation features (when the sample count allows).
pub fn evaluate_into(net: &DenseNet, val: &FeatureMatrix, dir: &Path, title: &str, with_pca: bool) -> Result<EvalSummary> {
    let (pred, probs) = predict(net, val)?;
    let truth = val.label_ids();
    let k = net.n_classes();
    let names: Vec<String> = (0..k).map(|c| val.class_names().get(c).cloned().unwrap_or_else(|| format!("class_{c}"))).collect();
    let confusion = confusion_matrix(&truth, &pred, k)?;
    let report = class_report(&confusion)?;
    let rendered = format!("{title}\n\n{}", render_report(&report, &names)?);
    let curves = one_vs_rest_curves(&probs, k, &truth)?;
    let mut files = Vec::new();
    let mut emit = |name: String, body: &str| -> Result<()> {
        let p = dir.join(name);
        write_bytes(&p, body.as_bytes())?;
        files.push(p);
        Ok(())
    };
    emit("report.txt".into(), &rendered)?;
    emit("confusion.csv".into(), &confusion.to_csv(&names))?;
    emit("auc.csv".into(), &auc_table_csv(&curves, &names))?;
    for c in &curves {
        if let Some(roc) = &c.roc {
            emit(format!("roc_{}.csv", names[c.class_id]), &roc.to_csv())?;
        }
        if let Some(pr) = &c.pr {
            emit(format!("pr_{}.csv", names[c.class_id]), &pr.to_csv())?;
        }
    }
    if with_pca {
        for kk in [2usize, 3] {
            if val.n_samples() >= 2 && kk <= val.n_samples().min(val.dim()) {
                emit(format!("pca{kk}.csv"), &pca_csv(val, kk)?)?;
            }
        }
    }
    Ok(EvalSummary { confusion, report, rendered, curves, files })
}

pub fn cmd_eval(cfg: &PipelineConfig) -> Result<EvalSummary> {
    let net = load_model(&out(cfg, layout::MODEL))?;
    let val = load_features(&out(cfg, layout::VAL_FEATURES))?;
    evaluate_into(&net, &val, &out(cfg, layout::EVAL_DIR), "audio model (MFCC features)", true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSummary {
    pub history: TrainHistory,
    pub eval: EvalSummary,
    pub timing: TimingRecord,
}

/// Dense classifier on downscaled raw pixels, the before-encoding reference.
pub fn cmd_baseline(cfg: &PipelineConfig) -> Result<BaselineSummary> {
    let m = load_manifest(&cfg.paths.manifest)?;
    let (train, val) = build_pixel_features(&m, &cfg.paths.manifest, cfg.baseline.height, cfg.baseline.width)?;
    save_features(&train, &out(cfg, layout::BASELINE_TRAIN))?;
    save_features(&val, &out(cfg, layout::BASELINE_VAL))?;
    let tc = cfg.baseline_train_config();
    let start = Instant::now();
    let (net, history) = fit(&tc, &train, &val)?;
    let timing = write_timing(cfg, "baseline", start.elapsed().as_secs_f64())?;
    save_model(&net, &out(cfg, layout::BASELINE_MODEL))?;
    write_bytes(&out(cfg, layout::BASELINE_HISTORY), history.to_csv().as_bytes())?;
    let eval = evaluate_into(&net, &val, &out(cfg, layout::BASELINE_DIR), "baseline model (raw pixels)", false)?;
    Ok(BaselineSummary { history, eval, timing })
}

/// Baseline wall time over audio-model wall time.
pub fn speed_ratio(baseline_seconds: f64, audio_seconds: f64) -> Result<f64> {
    if !(baseline_seconds > 0.0 && audio_seconds > 0.0) {
        return Err(Error::Invalid(format!("speed ratio needs positive times, got {baseline_seconds} and {audio_seconds}")));
    }
    Ok(baseline_seconds / audio_seconds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub audio: EvalSummary,
    pub baseline: EvalSummary,
    pub audio_timing: TimingRecord,
    pub baseline_timing: TimingRecord,
    pub ratio: f64,
    pub text: String,
}

/// Two-row timing table: model, training time, validation accuracy.
pub fn timing_table(rows: &[(&str, &TimingRecord, f64)]) -> String {
    let mut s = format!("{:<28} {:<22} {}\n", "Model", "Training time", "Val accuracy");
    for (name, t, acc) in rows {
        let _ = writeln!(s, "{:<28} {:<22} {}", name, t.formatted, round2(*acc));
    }
    s
}

/// Side-by-side reports, the timing table and the speed ratio.
pub fn cmd_compare(cfg: &PipelineConfig) -> Result<CompareSummary> {
    let dir = out(cfg, "compare");
    let audio_net = load_model(&out(cfg, layout::MODEL))?;
    let audio_val = load_features(&out(cfg, layout::VAL_FEATURES))?;
    let base_net = load_model(&out(cfg, layout::BASELINE_MODEL))?;
    let base_val = load_features(&out(cfg, layout::BASELINE_VAL))?;
    let audio = evaluate_into(&audio_net, &audio_val, &dir.join("audio"), "audio model (MFCC features)", false)?;
    let baseline = evaluate_into(&base_net, &base_val, &dir.join("baseline"), "baseline model (raw pixels)", false)?;
    let audio_timing = read_timing(cfg, "train")?;
    let baseline_timing = read_timing(cfg, "baseline")?;
    let ratio = speed_ratio(baseline_timing.seconds, audio_timing.seconds)?;
    let mut text = timing_table(&[
        ("baseline (raw pixels)", &baseline_timing, baseline.report.accuracy),
        ("audio (MFCC features)", &audio_timing, audio.report.accuracy),
    ]);
    let _ = writeln!(text, "\nspeed ratio (baseline / audio): {}\n", round2(ratio));
    text.push_str(&baseline.rendered);
    text.push('\n');
    text.push_str(&audio.rendered);
    let mut csv = String::from("model,seconds,formatted,val_accuracy\n");
    for (name, t, acc) in [("baseline", &baseline_timing, baseline.report.accuracy), ("audio", &audio_timing, audio.report.accuracy)] {
        let _ = writeln!(csv, "{name},{},{},{acc}", t.seconds, t.formatted);
    }
    let _ = writeln!(csv, "speed_ratio,{ratio},,");
    write_bytes(&out(cfg, layout::COMPARE_TEXT), text.as_bytes())?;
    write_bytes(&out(cfg, layout::COMPARE_CSV), csv.as_bytes())?;
    Ok(CompareSummary { audio, baseline, audio_timing, baseline_timing, ratio, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_table_values() {
        let r = speed_ratio(844.589522, 77.319555).unwrap();
        assert_eq!(round2(r), "10.92");
        assert!(speed_ratio(0.0, 1.0).is_err());
    }

    #[test]
    fn timing_table_uses_hms_strings() {
        let a = timing_report("baseline", 844.589522).unwrap();
        let b = timing_report("audio", 77.319555).unwrap();
        let t = timing_table(&[("baseline", &a, 0.92), ("audio", &b, 0.87)]);
        assert!(t.contains("0 : 14 : 04.589522"));
        assert!(t.contains("0 : 01 : 17.319555"));
    }

    #[test]
    fn mel_image_puts_high_bands_on_top() {
        // 2 frames x 3 bands, band 2 loudest
        let img = mel_image(&[0.0, 1.0, 2.0, 0.0, 1.0, 2.0], 2, 3);
        assert_eq!(img.get(0, 0), 1.0);
        assert_eq!(img.get(2, 1), 0.0);
    }
}
