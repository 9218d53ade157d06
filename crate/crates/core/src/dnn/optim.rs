use alloc::vec;
use alloc::vec::Vec;

use super::{DenseNet, DnnError, Gradients, OptimizerKind, TrainConfig};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Per-parameter optimizer memory, laid out like [`DenseNet::tensors`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    kind: OptimizerKind,
    learn_rate: f64,
    momentum: f64,
    step: u64,
    /// SGD velocity, or Adam first moment.
    first: Vec<Vec<f64>>,
    /// Adam second moment; empty for SGD.
    second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn new(net: &DenseNet, cfg: &TrainConfig) -> Self {
        let zeros: Vec<Vec<f64>> = net.tensors().iter().map(|t| vec![0.0; t.len()]).collect();
        let second = match cfg.optimizer {
            OptimizerKind::Adam => zeros.clone(),
            OptimizerKind::Sgd => Vec::new(),
        };
        OptimizerState {
            kind: cfg.optimizer,
            learn_rate: cfg.learn_rate,
            momentum: cfg.momentum,
            step: 0,
            first: zeros,
            second,
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, net: &mut DenseNet, grads: &Gradients) -> Result<(), DnnError> {
        let g = grads.tensors();
        let mut params = net.tensors_mut();
        if g.len() != params.len() || g.iter().zip(&params).any(|(a, b)| a.len() != b.len()) {
            return Err(DnnError::ShapeMismatch(net.layer_sizes().to_vec()));
        }
        self.step += 1;
        let lr = self.learn_rate;
        match self.kind {
            OptimizerKind::Sgd => {
                let mu = self.momentum;
                for ((p, g), v) in params.iter_mut().zip(&g).zip(&mut self.first) {
                    for ((p, &g), v) in p.iter_mut().zip(g.iter()).zip(v.iter_mut()) {
                        *v = mu * *v - lr * g;
                        *p += *v;
                    }
                }
            }
            OptimizerKind::Adam => {
                let t = self.step as f64;
                let c1 = 1.0 - libm::pow(ADAM_BETA1, t);
                let c2 = 1.0 - libm::pow(ADAM_BETA2, t);
                for (((p, g), m), v) in params.iter_mut().zip(&g).zip(&mut self.first).zip(&mut self.second) {
                    for (((p, &g), m), v) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
                        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                        let m_hat = *m / c1;
                        let v_hat = *v / c2;
                        *p -= lr * m_hat / (libm::sqrt(v_hat) + ADAM_EPSILON);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Rescales every weight column (the incoming weights of one unit) whose L2
/// norm exceeds `c` to norm `c`. Columns within a relative `1e-12` of the
/// bound are left alone so a second application is a no-op.
pub fn apply_max_norm(net: &mut DenseNet, c: f64) {
    for l in 0..net.n_layers() {
        let d_out = net.layer_sizes()[l + 1];
        let w = net.weights_mut(l);
        let d_in = w.len() / d_out;
        for j in 0..d_out {
            let norm = libm::sqrt((0..d_in).map(|i| w[i * d_out + j] * w[i * d_out + j]).sum::<f64>());
            if norm > c * (1.0 + 1e-12) {
                let s = c / norm;
                for i in 0..d_in {
                    w[i * d_out + j] *= s;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnn::Activation;

    fn single(w: f64) -> DenseNet {
        DenseNet::from_parts(vec![1, 1], Activation::Linear, vec![vec![w]], vec![vec![0.0]]).unwrap()
    }

    fn grad(g: f64) -> Gradients {
        Gradients { weights: vec![vec![g]], biases: vec![vec![g]] }
    }

    fn cfg(kind: OptimizerKind, lr: f64, momentum: f64) -> TrainConfig {
        TrainConfig { optimizer: kind, learn_rate: lr, momentum, ..Default::default() }
    }

    #[test]
    fn sgd_single_step() {
        let mut net = single(1.0);
        let mut st = OptimizerState::new(&net, &cfg(OptimizerKind::Sgd, 0.1, 0.0));
        st.step(&mut net, &grad(0.5)).unwrap();
        assert!((net.weights(0)[0] - 0.95).abs() < 1e-15);
    }

    #[test]
    fn sgd_momentum_accumulates() {
        let mut net = single(0.0);
        let mut st = OptimizerState::new(&net, &cfg(OptimizerKind::Sgd, 0.1, 0.5));
        st.step(&mut net, &grad(1.0)).unwrap();
        st.step(&mut net, &grad(1.0)).unwrap();
        // v1 = -0.1, v2 = 0.5 * -0.1 - 0.1 = -0.15
        assert!((net.weights(0)[0] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_learning_rate_is_null_step() {
        for kind in [OptimizerKind::Sgd, OptimizerKind::Adam] {
            let mut net = single(0.7);
            let before = net.clone();
            let mut st = OptimizerState::new(&net, &cfg(kind, 0.0, 0.9));
            for _ in 0..3 {
                st.step(&mut net, &grad(2.0)).unwrap();
            }
            assert_eq!(net, before);
        }
    }

    #[test]
    fn adam_first_step_matches_hand_trace() {
        let lr = 1e-3;
        let mut net = single(0.0);
        let mut st = OptimizerState::new(&net, &cfg(OptimizerKind::Adam, lr, 0.0));
        st.step(&mut net, &grad(1.0)).unwrap();
        // m = 0.1, v = 0.001; m_hat = 1, v_hat = 1
        let m_hat: f64 = 0.1 / (1.0 - 0.9);
        let v_hat: f64 = 0.001 / (1.0 - 0.999);
        let expected = -lr * m_hat / (v_hat.sqrt() + 1e-8);
        assert!((net.weights(0)[0] - expected).abs() < 1e-12);
        assert!((net.weights(0)[0] + lr / (1.0 + 1e-8)).abs() < 1e-12);
        assert!((net.biases(0)[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut net = single(0.0);
        let mut st = OptimizerState::new(&net, &cfg(OptimizerKind::Sgd, 0.1, 0.0));
        let bad = Gradients { weights: vec![vec![1.0, 2.0]], biases: vec![vec![1.0]] };
        assert!(st.step(&mut net, &bad).is_err());
    }

    fn two_col() -> DenseNet {
        // 2 x 2, column 0 = (0, 2) has norm 2, column 1 = (0.3, 0.4) has norm 0.5
        DenseNet::from_parts(vec![2, 2], Activation::Relu, vec![vec![0.0, 0.3, 2.0, 0.4]], vec![vec![5.0, -5.0]]).unwrap()
    }

    #[test]
    fn max_norm_scales_long_columns() {
        let mut net = two_col();
        apply_max_norm(&mut net, 1.0);
        assert_eq!(net.weights(0), &[0.0, 0.3, 1.0, 0.4]);
        assert_eq!(net.biases(0), &[5.0, -5.0]);
    }

    #[test]
    fn max_norm_no_op_and_zero_column() {
        let mut net = two_col();
        let before = net.clone();
        apply_max_norm(&mut net, 3.0);
        assert_eq!(net, before);
        let mut z = DenseNet::zeros(vec![3, 2], Activation::Relu).unwrap();
        apply_max_norm(&mut z, 1e-3);
        assert!(z.weights(0).iter().all(|&w| w == 0.0));
    }

    #[test]
    fn max_norm_is_idempotent() {
        let w: Vec<f64> = (0..12).map(|i| (i as f64 * 0.77).sin() * 3.0).collect();
        let mut net = DenseNet::from_parts(vec![4, 3], Activation::Tanh, vec![w], vec![vec![0.0; 3]]).unwrap();
        apply_max_norm(&mut net, 1.3);
        let once = net.clone();
        apply_max_norm(&mut net, 1.3);
        assert_eq!(net, once);
    }
}
