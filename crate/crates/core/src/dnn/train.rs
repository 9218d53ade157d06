use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{apply_max_norm, cross_entropy, forward, loss_and_grad_with, DenseNet, DnnError, Mode, OptimizerState, TrainConfig};
use crate::dataset::FeatureMatrix;

/// Metrics after one epoch. Training loss and accuracy are averaged over the
/// epoch's mini-batches as seen during the update (dropout active);
/// validation metrics come from a full eval-mode pass after the epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }

    pub fn total_seconds(&self) -> f64 {
        self.epochs.iter().map(|e| e.seconds).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc,seconds\n");
        for e in &self.epochs {
            let _ = writeln!(out, "{},{},{},{},{},{}", e.epoch, e.train_loss, e.train_acc, e.val_loss, e.val_acc, e.seconds);
        }
        out
    }
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in row.iter().enumerate().skip(1) {
        if p > row[best] {
            best = i;
        }
    }
    best
}

/// Eval-mode class ids and probabilities for `n` row-major samples. Ties go
/// to the lowest class id.
pub fn predict_rows(net: &DenseNet, data: &[f64], n: usize) -> Result<(Vec<usize>, Vec<f64>), DnnError> {
    let (probs, _) = forward(net, data, n, Mode::Eval)?;
    let ids = probs.chunks_exact(net.n_classes()).map(argmax).collect();
    Ok((ids, probs))
}

pub fn predict(net: &DenseNet, x: &FeatureMatrix) -> Result<(Vec<usize>, Vec<f64>), DnnError> {
    check_dim(net, x)?;
    predict_rows(net, x.data(), x.n_samples())
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return f64::NAN;
    }
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn check_dim(net: &DenseNet, x: &FeatureMatrix) -> Result<(), DnnError> {
    if x.dim() != net.input_dim() {
        return Err(DnnError::WidthMismatch { expected: net.input_dim(), found: x.dim() });
    }
    Ok(())
}

fn check_labels(net: &DenseNet, x: &FeatureMatrix) -> Result<Vec<usize>, DnnError> {
    let labels = x.label_ids();
    if let Some(&label) = labels.iter().find(|&&y| y >= net.n_classes()) {
        return Err(DnnError::InvalidLabel { label, n_classes: net.n_classes() });
    }
    Ok(labels)
}

/// [`train_with_clock`] with a clock that always reads zero.
pub fn train(net: DenseNet, cfg: &TrainConfig, train_set: &FeatureMatrix, val: &FeatureMatrix) -> Result<(DenseNet, TrainHistory), DnnError> {
    train_with_clock(net, cfg, train_set, val, || 0.0)
}

/// Mini-batch training. `clock` returns monotonic seconds and is sampled at
/// the start and end of every epoch; it has no influence on the result.
///
/// Shuffles and dropout masks come from a ChaCha8 stream seeded by
/// `cfg.seed` (stream 1, so it never overlaps the initialization draws).
/// An empty validation set is allowed and records NaN validation metrics.
pub fn train_with_clock<C: FnMut() -> f64>(
    mut net: DenseNet,
    cfg: &TrainConfig,
    train_set: &FeatureMatrix,
    val: &FeatureMatrix,
    mut clock: C,
) -> Result<(DenseNet, TrainHistory), DnnError> {
    cfg.validate()?;
    check_dim(&net, train_set)?;
    check_dim(&net, val)?;
    let labels = check_labels(&net, train_set)?;
    let val_labels = check_labels(&net, val)?;
    let mut history = TrainHistory::default();
    if cfg.epochs == 0 {
        return Ok((net, history));
    }
    let n = train_set.n_samples();
    if n == 0 {
        return Err(DnnError::EmptyTrainingSet);
    }
    let dim = train_set.dim();
    let k = net.n_classes();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut opt = OptimizerState::new(&net, cfg);
    let mut order: Vec<usize> = (0..n).collect();
    let mut batch = Vec::with_capacity(cfg.batch_size * dim);
    let mut batch_labels = Vec::with_capacity(cfg.batch_size);

    for epoch in 1..=cfg.epochs {
        let start = clock();
        order.shuffle(&mut rng);
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch_labels.clear();
            for &i in chunk {
                batch.extend_from_slice(train_set.row(i));
                batch_labels.push(labels[i]);
            }
            let mode = Mode::Train { dropout_rate: cfg.dropout_rate, seed: rng.next_u64() };
            let (loss, grads, probs) = loss_and_grad_with(&net, &batch, &batch_labels, mode)?;
            loss_sum += loss * chunk.len() as f64;
            correct += probs.chunks_exact(k).zip(&batch_labels).filter(|(row, &y)| argmax(row) == y).count();
            opt.step(&mut net, &grads)?;
            if let Some(c) = cfg.weight_constraint {
                apply_max_norm(&mut net, c);
            }
        }
        let (val_loss, val_acc) = if val.n_samples() == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let (ids, probs) = predict_rows(&net, val.data(), val.n_samples())?;
            (cross_entropy(&probs, &val_labels, k)?, accuracy(&ids, &val_labels))
        };
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / n as f64,
            train_acc: correct as f64 / n as f64,
            val_loss,
            val_acc,
            seconds: (clock() - start).max(0.0),
        });
    }
    Ok((net, history))
}
