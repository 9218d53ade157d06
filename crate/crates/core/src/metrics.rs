//! Classification evaluation: confusion matrix, precision/recall/F1 report,
//! one-vs-rest ROC and precision-recall curves, and timing strings.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("class id {id} out of range for {n_classes} classes")]
    ClassOutOfRange { id: usize, n_classes: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("curve needs both positive and negative samples")]
    SingleClass,
    #[error("curve needs at least one positive sample")]
    NoPositives,
    #[error("elapsed time {0} must be finite and non-negative")]
    NegativeElapsed(f64),
    #[error("expected {expected} class names, got {found}")]
    ClassNames { expected: usize, found: usize },
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.n_classes + predicted]
    }

    pub fn row(&self, truth: usize) -> &[u64] {
        &self.counts[truth * self.n_classes..(truth + 1) * self.n_classes]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes).map(|c| self.get(c, c)).sum()
    }

    /// Misclassified samples of class `truth`.
    pub fn off_diagonal(&self, truth: usize) -> u64 {
        self.row(truth).iter().sum::<u64>() - self.get(truth, truth)
    }

    /// CSV with a header row of predicted class names.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("true\\pred");
        for n in names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, name) in names.iter().enumerate().take(self.n_classes) {
            out.push_str(name);
            for v in self.row(t) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<ConfusionMatrix, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    let mut counts = vec![0u64; n_classes * n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for id in [t, p] {
            if id >= n_classes {
                return Err(MetricsError::ClassOutOfRange { id, n_classes });
            }
        }
        counts[t * n_classes + p] += 1;
    }
    Ok(ConfusionMatrix { n_classes, counts })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub classes: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_avg: ClassMetrics,
    pub weighted_avg: ClassMetrics,
    pub total: u64,
    /// Set when some precision, recall or F1 hit a zero denominator and was
    /// reported as 0.
    pub zero_division: bool,
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Unweighted mean of per-class metrics; support is the total.
pub fn macro_average(classes: &[ClassMetrics]) -> ClassMetrics {
    let k = classes.len().max(1) as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| classes.iter().map(f).sum::<f64>() / k;
    ClassMetrics {
        precision: mean(|m| m.precision),
        recall: mean(|m| m.recall),
        f1: mean(|m| m.f1),
        support: classes.iter().map(|m| m.support).sum(),
    }
}

/// Support-weighted mean of per-class metrics. Equal supports reduce exactly
/// to [`macro_average`].
pub fn weighted_average(classes: &[ClassMetrics]) -> ClassMetrics {
    let total: u64 = classes.iter().map(|m| m.support).sum();
    if total == 0 || classes.windows(2).all(|w| w[0].support == w[1].support) {
        return macro_average(classes);
    }
    let mean = |f: fn(&ClassMetrics) -> f64| classes.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64;
    ClassMetrics { precision: mean(|m| m.precision), recall: mean(|m| m.recall), f1: mean(|m| m.f1), support: total }
}

pub fn class_report(cm: &ConfusionMatrix) -> Result<ClassReport, MetricsError> {
    let total = cm.total();
    if total == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let k = cm.n_classes;
    let mut zero_division = false;
    let classes: Vec<ClassMetrics> = (0..k)
        .map(|c| {
            let tp = cm.get(c, c);
            let predicted: u64 = (0..k).map(|t| cm.get(t, c)).sum();
            let support: u64 = cm.row(c).iter().sum();
            let precision = ratio(tp, predicted, &mut zero_division);
            let recall = ratio(tp, support, &mut zero_division);
            if precision + recall == 0.0 {
                zero_division = true;
            }
            ClassMetrics { precision, recall, f1: f1_score(precision, recall), support }
        })
        .collect();
    let macro_avg = macro_average(&classes);
    let weighted_avg = weighted_average(&classes);
    Ok(ClassReport {
        classes,
        accuracy: cm.trace() as f64 / total as f64,
        macro_avg,
        weighted_avg,
        total,
        zero_division,
    })
}

/// Two-decimal string with ties rounded away from zero.
pub fn round2(x: f64) -> String {
    let hundredths = libm::round(x * 100.0) as i64;
    let sign = if hundredths < 0 { "-" } else { "" };
    let a = hundredths.unsigned_abs();
    format!("{}{}.{:02}", sign, a / 100, a % 100)
}

/// Fixed-width text in the familiar precision / recall / f1-score / support
/// layout, with accuracy, macro and weighted averages.
pub fn render_report(report: &ClassReport, names: &[String]) -> Result<String, MetricsError> {
    if names.len() != report.classes.len() {
        return Err(MetricsError::ClassNames { expected: report.classes.len(), found: names.len() });
    }
    let width = names.iter().map(|n| n.len()).chain([12]).max().unwrap_or(12);
    let mut out = String::new();
    let _ = writeln!(out, "{:>w$} {:>9} {:>9} {:>9} {:>9}", "", "precision", "recall", "f1-score", "support", w = width);
    out.push('\n');
    let row = |out: &mut String, name: &str, m: &ClassMetrics| {
        let _ = writeln!(
            out,
            "{:>w$} {:>9} {:>9} {:>9} {:>9}",
            name,
            round2(m.precision),
            round2(m.recall),
            round2(m.f1),
            m.support,
            w = width
        );
    };
    for (name, m) in names.iter().zip(&report.classes) {
        row(&mut out, name, m);
    }
    out.push('\n');
    let _ = writeln!(out, "{:>w$} {:>9} {:>9} {:>9} {:>9}", "accuracy", "", "", round2(report.accuracy), report.total, w = width);
    row(&mut out, "macro avg", &report.macro_avg);
    row(&mut out, "weighted avg", &report.weighted_avg);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Roc,
    PrecisionRecall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub threshold: f64,
    pub x: f64,
    pub y: f64,
}

/// ROC points are (FPR, TPR); PR points are (recall, precision). `area` is
/// the trapezoid AUC for ROC and the step-sum average precision for PR.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub kind: CurveKind,
    pub class_id: usize,
    pub points: Vec<CurvePoint>,
    pub area: f64,
}

impl CurveData {
    /// `threshold,x,y` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,x,y\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.x, p.y);
        }
        out
    }
}

/// Cumulative (tp, fp) after each distinct score, highest score first.
fn cumulative_counts(scores: &[f64], positives: &[bool]) -> Vec<(f64, u64, u64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut steps = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if positives[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        steps.push((s, tp, fp));
    }
    steps
}

pub fn roc_curve(scores: &[f64], positives: &[bool]) -> Result<CurveData, MetricsError> {
    if scores.len() != positives.len() {
        return Err(MetricsError::LengthMismatch(scores.len(), positives.len()));
    }
    let p = positives.iter().filter(|&&b| b).count() as u64;
    let n = positives.len() as u64 - p;
    if p == 0 || n == 0 {
        return Err(MetricsError::SingleClass);
    }
    let mut points = vec![CurvePoint { threshold: f64::INFINITY, x: 0.0, y: 0.0 }];
    // trapezoids in count units: exact for integer steps, ties become diagonal segments
    let mut twice_area = 0u128;
    let (mut prev_tp, mut prev_fp) = (0u64, 0u64);
    for (s, tp, fp) in cumulative_counts(scores, positives) {
        twice_area += u128::from(fp - prev_fp) * u128::from(tp + prev_tp);
        (prev_tp, prev_fp) = (tp, fp);
        points.push(CurvePoint { threshold: s, x: fp as f64 / n as f64, y: tp as f64 / p as f64 });
    }
    if (prev_tp, prev_fp) != (p, n) {
        points.push(CurvePoint { threshold: f64::NEG_INFINITY, x: 1.0, y: 1.0 });
    }
    let area = twice_area as f64 / (2.0 * p as f64 * n as f64);
    Ok(CurveData { kind: CurveKind::Roc, class_id: 0, points, area })
}

pub fn pr_curve(scores: &[f64], positives: &[bool]) -> Result<CurveData, MetricsError> {
    if scores.len() != positives.len() {
        return Err(MetricsError::LengthMismatch(scores.len(), positives.len()));
    }
    let p = positives.iter().filter(|&&b| b).count() as u64;
    if p == 0 {
        return Err(MetricsError::NoPositives);
    }
    let mut points = Vec::new();
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    for (s, tp, fp) in cumulative_counts(scores, positives) {
        let recall = tp as f64 / p as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        points.push(CurvePoint { threshold: s, x: recall, y: precision });
    }
    Ok(CurveData { kind: CurveKind::PrecisionRecall, class_id: 0, points, area })
}

/// Per-class curves; `None` marks a curve that is undefined for the data
/// (class absent from the labels, or no negatives for ROC).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCurves {
    pub class_id: usize,
    pub roc: Option<CurveData>,
    pub pr: Option<CurveData>,
}

impl ClassCurves {
    /// A class is defined when it appears among the labels.
    pub fn is_defined(&self) -> bool {
        self.pr.is_some()
    }
}

/// Binarizes a `k`-class problem: class `c` scores are column `c` of the
/// row-major `n x k` probability matrix, positives are `label == c`.
pub fn one_vs_rest_curves(probs: &[f64], n_classes: usize, labels: &[usize]) -> Result<Vec<ClassCurves>, MetricsError> {
    if probs.len() != labels.len() * n_classes {
        return Err(MetricsError::LengthMismatch(probs.len(), labels.len() * n_classes));
    }
    if let Some(&id) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(MetricsError::ClassOutOfRange { id, n_classes });
    }
    Ok((0..n_classes)
        .map(|c| {
            let scores: Vec<f64> = probs.chunks_exact(n_classes).map(|row| row[c]).collect();
            let positives: Vec<bool> = labels.iter().map(|&l| l == c).collect();
            let tag = |mut d: CurveData| {
                d.class_id = c;
                d
            };
            ClassCurves {
                class_id: c,
                roc: roc_curve(&scores, &positives).ok().map(tag),
                pr: pr_curve(&scores, &positives).ok().map(tag),
            }
        })
        .collect())
}

/// `"H : MM : SS.ffffff"` with unpadded hours and microsecond fraction.
pub fn format_hms(elapsed: f64) -> Result<String, MetricsError> {
    if !(elapsed >= 0.0) || !elapsed.is_finite() {
        return Err(MetricsError::NegativeElapsed(elapsed));
    }
    let micros = libm::round(elapsed * 1e6) as u64;
    let (secs, frac) = (micros / 1_000_000, micros % 1_000_000);
    Ok(format!("{} : {:02} : {:02}.{:06}", secs / 3600, (secs / 60) % 60, secs % 60, frac))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub stage: String,
    pub seconds: f64,
    pub formatted: String,
}

pub fn timing_report(stage: &str, elapsed: f64) -> Result<TimingRecord, MetricsError> {
    Ok(TimingRecord { stage: String::from(stage), seconds: elapsed, formatted: format_hms(elapsed)? })
}
