use alloc::vec;
use alloc::vec::Vec;

use super::{init_network, train, Activation, DnnError, InitMode, OptimizerKind, TrainConfig, TrainHistory};
use crate::dataset::FeatureMatrix;

/// Candidate values per hyperparameter. Enumeration is lexicographic in the
/// field order below (the last axis varies fastest).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct GridAxes {
    pub batch_size: Vec<usize>,
    pub epochs: Vec<usize>,
    pub optimizer: Vec<OptimizerKind>,
    pub learn_rate: Vec<f64>,
    pub momentum: Vec<f64>,
    pub init_mode: Vec<InitMode>,
    pub activation: Vec<Activation>,
    pub dropout_rate: Vec<f64>,
    pub weight_constraint: Vec<Option<f64>>,
    pub neurons: Vec<Vec<usize>>,
    /// Shared by every configuration.
    pub seed: u64,
}

impl Default for GridAxes {
    fn default() -> Self {
        GridAxes::singleton(&TrainConfig::default())
    }
}

impl GridAxes {
    /// Grid containing exactly `cfg`.
    pub fn singleton(cfg: &TrainConfig) -> Self {
        GridAxes {
            batch_size: vec![cfg.batch_size],
            epochs: vec![cfg.epochs],
            optimizer: vec![cfg.optimizer],
            learn_rate: vec![cfg.learn_rate],
            momentum: vec![cfg.momentum],
            init_mode: vec![cfg.init_mode],
            activation: vec![cfg.activation],
            dropout_rate: vec![cfg.dropout_rate],
            weight_constraint: vec![cfg.weight_constraint],
            neurons: vec![cfg.neurons.clone()],
            seed: cfg.seed,
        }
    }

    fn lengths(&self) -> [(&'static str, usize); 10] {
        [
            ("batch_size", self.batch_size.len()),
            ("epochs", self.epochs.len()),
            ("optimizer", self.optimizer.len()),
            ("learn_rate", self.learn_rate.len()),
            ("momentum", self.momentum.len()),
            ("init_mode", self.init_mode.len()),
            ("activation", self.activation.len()),
            ("dropout_rate", self.dropout_rate.len()),
            ("weight_constraint", self.weight_constraint.len()),
            ("neurons", self.neurons.len()),
        ]
    }

    pub fn len(&self) -> usize {
        self.lengths().iter().map(|(_, n)| n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every configuration in enumeration order.
    pub fn configs(&self) -> Result<Vec<TrainConfig>, DnnError> {
        let lens = self.lengths();
        if let Some((name, _)) = lens.iter().find(|(_, n)| *n == 0) {
            return Err(DnnError::EmptyAxis(name));
        }
        let total = self.len();
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut pick = [0usize; 10];
            for a in (0..10).rev() {
                pick[a] = idx % lens[a].1;
                idx /= lens[a].1;
            }
            let cfg = TrainConfig {
                batch_size: self.batch_size[pick[0]],
                epochs: self.epochs[pick[1]],
                optimizer: self.optimizer[pick[2]],
                learn_rate: self.learn_rate[pick[3]],
                momentum: self.momentum[pick[4]],
                init_mode: self.init_mode[pick[5]],
                activation: self.activation[pick[6]],
                dropout_rate: self.dropout_rate[pick[7]],
                weight_constraint: self.weight_constraint[pick[8]],
                neurons: self.neurons[pick[9]].clone(),
                seed: self.seed,
            };
            cfg.validate()?;
            out.push(cfg);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub index: usize,
    pub config: TrainConfig,
    pub val_acc: f64,
    pub val_loss: f64,
    pub history: TrainHistory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: usize,
    pub rows: Vec<GridRow>,
}

impl GridResult {
    pub fn best_config(&self) -> &TrainConfig {
        &self.rows[self.best].config
    }

    pub fn best_row(&self) -> &GridRow {
        &self.rows[self.best]
    }
}

/// Trains one configuration from a fresh initialization; scored by the final
/// epoch's validation accuracy (0 when no epoch ran).
pub fn evaluate_config(index: usize, cfg: &TrainConfig, train_set: &FeatureMatrix, val: &FeatureMatrix) -> Result<GridRow, DnnError> {
    if val.n_samples() == 0 {
        return Err(DnnError::EmptyValidation);
    }
    let n_classes = train_set.n_classes().max(val.n_classes());
    let net = init_network(cfg, train_set.dim(), n_classes)?;
    let (_, history) = train(net, cfg, train_set, val)?;
    let (val_acc, val_loss) = history.last().map_or((0.0, f64::NAN), |e| (e.val_acc, e.val_loss));
    Ok(GridRow { index, config: cfg.clone(), val_acc, val_loss, history })
}

/// Index of the highest validation accuracy; the first one wins ties.
/// Rows may arrive in any order; they are sorted by enumeration index.
pub fn select_best(mut rows: Vec<GridRow>) -> Result<GridResult, DnnError> {
    if rows.is_empty() {
        return Err(DnnError::EmptyAxis("grid"));
    }
    rows.sort_by_key(|r| r.index);
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.val_acc > rows[best].val_acc {
            best = i;
        }
    }
    Ok(GridResult { best, rows })
}

/// Sequential exhaustive search.
pub fn grid_search(axes: &GridAxes, train_set: &FeatureMatrix, val: &FeatureMatrix) -> Result<GridResult, DnnError> {
    let rows = axes
        .configs()?
        .iter()
        .enumerate()
        .map(|(i, cfg)| evaluate_config(i, cfg, train_set, val))
        .collect::<Result<Vec<_>, _>>()?;
    select_best(rows)
}
