//! Dense feedforward softmax classifier trained with mini-batch SGD or Adam.
//!
//! Hidden layers share one activation; the output layer is always softmax and
//! the objective is mean categorical cross-entropy. Dropout is inverted
//! (survivors are scaled by `1 / keep`), so evaluation needs no correction.
//! Every random draw (initialization, shuffling, dropout masks) comes from a
//! ChaCha8 stream seeded by [`TrainConfig::seed`], which makes a training run
//! a pure function of configuration and data.

mod camn;
mod grid;
mod net;
mod optim;
mod train;

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

pub use camn::{decode_model, encode_model, CAMN_MAGIC, CAMN_VERSION};
pub use grid::{evaluate_config, grid_search, select_best, GridAxes, GridResult, GridRow};
pub use net::{
    cross_entropy, forward, init_network, loss_and_grad, loss_and_grad_with, softmax_rows, DenseNet, ForwardCache,
    Gradients, Mode, PROB_FLOOR,
};
pub use optim::{apply_max_norm, OptimizerState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use train::{accuracy, predict, predict_rows, train, train_with_clock, EpochRecord, TrainHistory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DnnError {
    #[error("invalid training configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("layer widths must be positive: {0:?}")]
    ZeroWidth(Vec<usize>),
    #[error("input width {found} does not match network input {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("label {label} out of range for {n_classes} classes")]
    InvalidLabel { label: usize, n_classes: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("validation set is empty")]
    EmptyValidation,
    #[error("grid axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("parameter shapes do not chain for layer sizes {0:?}")]
    ShapeMismatch(Vec<usize>),
    #[error("bad magic number (expected CAMN)")]
    BadMagic,
    #[error("unsupported CAMN version {0}")]
    BadVersion(u32),
    #[error("truncated model file: {0}")]
    Truncated(&'static str),
    #[error("unknown activation tag {0}")]
    BadActivationTag(u8),
    #[error("non-finite parameter in model")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Linear,
}

impl Activation {
    pub const ALL: [Activation; 4] = [Activation::Relu, Activation::Tanh, Activation::Sigmoid, Activation::Linear];

    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => libm::tanh(z),
            Activation::Sigmoid => 1.0 / (1.0 + libm::exp(-z)),
            Activation::Linear => z,
        }
    }

    /// Derivative at pre-activation `z`, given `a = apply(z)`.
    #[inline]
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Sigmoid => 2,
            Activation::Linear => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Activation> {
        Activation::ALL.get(usize::from(tag)).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum InitMode {
    /// `U(-0.05, 0.05)`
    UniformSmall,
    /// `U(-b, b)` with `b = sqrt(6 / (fan_in + fan_out))`
    GlorotUniform,
    /// `N(0, 0.05^2)`
    NormalSmall,
}

impl InitMode {
    pub fn name(self) -> &'static str {
        match self {
            InitMode::UniformSmall => "uniform_small",
            InitMode::GlorotUniform => "glorot_uniform",
            InitMode::NormalSmall => "normal_small",
        }
    }
}

/// Hyperparameters, one field per searchable grid axis plus the seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub optimizer: OptimizerKind,
    pub learn_rate: f64,
    /// SGD momentum; ignored by Adam.
    pub momentum: f64,
    pub init_mode: InitMode,
    pub activation: Activation,
    pub dropout_rate: f64,
    /// Max-norm bound on every weight column, if any.
    pub weight_constraint: Option<f64>,
    /// Hidden layer widths.
    pub neurons: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            epochs: 50,
            optimizer: OptimizerKind::Adam,
            learn_rate: 1e-3,
            momentum: 0.0,
            init_mode: InitMode::GlorotUniform,
            activation: Activation::Relu,
            dropout_rate: 0.2,
            weight_constraint: None,
            neurons: vec![512, 128],
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), DnnError> {
        if self.batch_size == 0 {
            return Err(DnnError::InvalidConfig("batch_size must be at least 1"));
        }
        if !(self.learn_rate >= 0.0 && self.learn_rate.is_finite()) {
            return Err(DnnError::InvalidConfig("learn_rate must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(DnnError::InvalidConfig("momentum must be in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(DnnError::InvalidConfig("dropout_rate must be in [0, 1)"));
        }
        if let Some(c) = self.weight_constraint {
            if !(c > 0.0) {
                return Err(DnnError::InvalidConfig("weight_constraint must be positive"));
            }
        }
        if self.neurons.contains(&0) {
            return Err(DnnError::ZeroWidth(self.neurons.clone()));
        }
        Ok(())
    }

    /// `[input_dim, neurons..., n_classes]`.
    pub fn layer_sizes(&self, input_dim: usize, n_classes: usize) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.neurons.len() + 2);
        sizes.push(input_dim);
        sizes.extend_from_slice(&self.neurons);
        sizes.push(n_classes);
        sizes
    }
}
