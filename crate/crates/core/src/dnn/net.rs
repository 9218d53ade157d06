use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use super::{Activation, DnnError, InitMode, TrainConfig};

/// Probabilities are clamped below at this value inside the loss.
pub const PROB_FLOOR: f64 = 1e-12;

/// Weights of layer `l` are stored row-major as `sizes[l] x sizes[l + 1]`, so
/// column `j` holds the incoming weights of unit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    layer_sizes: Vec<usize>,
    pub(crate) weights: Vec<Vec<f64>>,
    pub(crate) biases: Vec<Vec<f64>>,
    activation: Activation,
}

impl DenseNet {
    /// Network with all parameters zero.
    pub fn zeros(layer_sizes: Vec<usize>, activation: Activation) -> Result<Self, DnnError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(DnnError::ZeroWidth(layer_sizes));
        }
        let weights = layer_sizes.windows(2).map(|w| vec![0.0; w[0] * w[1]]).collect();
        let biases = layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(DenseNet { layer_sizes, weights, biases, activation })
    }

    pub fn from_parts(
        layer_sizes: Vec<usize>,
        activation: Activation,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self, DnnError> {
        let net = Self::zeros(layer_sizes, activation)?;
        let chains = weights.len() == net.weights.len()
            && biases.len() == net.biases.len()
            && weights.iter().zip(&net.weights).all(|(a, b)| a.len() == b.len())
            && biases.iter().zip(&net.biases).all(|(a, b)| a.len() == b.len());
        if !chains {
            return Err(DnnError::ShapeMismatch(net.layer_sizes));
        }
        if weights.iter().chain(&biases).flatten().any(|v| !v.is_finite()) {
            return Err(DnnError::NonFinite);
        }
        Ok(DenseNet { weights, biases, ..net })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_classes(&self) -> usize {
        self.layer_sizes[self.layer_sizes.len() - 1]
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.weights[layer]
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.biases[layer]
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// All parameter tensors: weights of every layer, then biases.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.weights.iter_mut().chain(self.biases.iter_mut()).map(|v| v.as_mut_slice()).collect()
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        self.weights.iter().chain(self.biases.iter()).map(|v| v.as_slice()).collect()
    }
}

/// Draws initial weights per `cfg.init_mode` from a ChaCha8 stream seeded
/// with `cfg.seed`; biases start at zero.
pub fn init_network(cfg: &TrainConfig, input_dim: usize, n_classes: usize) -> Result<DenseNet, DnnError> {
    cfg.validate()?;
    let mut net = DenseNet::zeros(cfg.layer_sizes(input_dim, n_classes), cfg.activation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for l in 0..net.n_layers() {
        let (fan_in, fan_out) = (net.layer_sizes[l], net.layer_sizes[l + 1]);
        let w = &mut net.weights[l];
        match cfg.init_mode {
            InitMode::GlorotUniform => {
                let bound = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
                fill(w, &mut rng, Uniform::new_inclusive(-bound, bound).expect("finite bound"));
            }
            InitMode::UniformSmall => fill(w, &mut rng, Uniform::new_inclusive(-0.05, 0.05).expect("finite bound")),
            InitMode::NormalSmall => fill(w, &mut rng, Normal::new(0.0, 0.05).expect("positive sigma")),
        }
    }
    Ok(net)
}

fn fill<D: Distribution<f64>>(w: &mut [f64], rng: &mut ChaCha8Rng, dist: D) {
    for v in w.iter_mut() {
        *v = dist.sample(rng);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Eval,
    /// Inverted dropout on hidden activations, masks drawn from `seed`.
    Train { dropout_rate: f64, seed: u64 },
}

/// Intermediate values of one forward pass, consumed by backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub n: usize,
    /// Pre-activations of every layer.
    pub pre: Vec<Vec<f64>>,
    /// Hidden activations before dropout.
    pub act: Vec<Vec<f64>>,
    /// Hidden activations after dropout (what the next layer sees).
    pub post: Vec<Vec<f64>>,
    /// Scaled keep masks per hidden layer (`0` or `1 / keep`).
    pub masks: Vec<Option<Vec<f64>>>,
}

/// `out = x * w + b` for row-major `x: n x d_in`, `w: d_in x d_out`.
fn affine(x: &[f64], n: usize, w: &[f64], b: &[f64], out: &mut Vec<f64>) {
    let (d_in, d_out) = (w.len() / b.len(), b.len());
    out.clear();
    out.reserve(n * d_out);
    for i in 0..n {
        let start = out.len();
        out.extend_from_slice(b);
        let row = &mut out[start..];
        for (k, &a) in x[i * d_in..(i + 1) * d_in].iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, &wv) in row.iter_mut().zip(&w[k * d_out..(k + 1) * d_out]) {
                *o += a * wv;
            }
        }
    }
}

/// Numerically stable row-wise softmax of an `n x k` logit matrix.
pub fn softmax_rows(logits: &[f64], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for row in logits.chunks_exact(k) {
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let start = out.len();
        out.extend(row.iter().map(|&z| libm::exp(z - m)));
        let s: f64 = out[start..].iter().sum();
        out[start..].iter_mut().for_each(|p| *p /= s);
    }
    out
}

pub fn forward(net: &DenseNet, batch: &[f64], n: usize, mode: Mode) -> Result<(Vec<f64>, ForwardCache), DnnError> {
    let d = net.input_dim();
    if batch.len() != n * d {
        return Err(DnnError::WidthMismatch { expected: d, found: batch.len().checked_div(n).unwrap_or(batch.len()) });
    }
    let hidden = net.n_layers() - 1;
    let mut cache = ForwardCache {
        n,
        pre: Vec::with_capacity(net.n_layers()),
        act: Vec::with_capacity(hidden),
        post: Vec::with_capacity(hidden),
        masks: Vec::with_capacity(hidden),
    };
    let (rate, mut rng) = match mode {
        Mode::Train { dropout_rate, seed } if dropout_rate > 0.0 => (dropout_rate, Some(ChaCha8Rng::seed_from_u64(seed))),
        _ => (0.0, None),
    };
    let keep = 1.0 - rate;
    for l in 0..net.n_layers() {
        let input = if l == 0 { batch } else { cache.post[l - 1].as_slice() };
        let mut z = Vec::new();
        affine(input, n, &net.weights[l], &net.biases[l], &mut z);
        if l < hidden {
            let a: Vec<f64> = z.iter().map(|&v| net.activation.apply(v)).collect();
            let (post, mask) = match rng.as_mut() {
                Some(r) => {
                    let mask: Vec<f64> = (0..a.len()).map(|_| if r.random::<f64>() < rate { 0.0 } else { 1.0 / keep }).collect();
                    (a.iter().zip(&mask).map(|(x, m)| x * m).collect(), Some(mask))
                }
                None => (a.clone(), None),
            };
            cache.act.push(a);
            cache.post.push(post);
            cache.masks.push(mask);
        }
        cache.pre.push(z);
    }
    let probs = softmax_rows(&cache.pre[hidden], net.n_classes());
    Ok((probs, cache))
}

/// Mean `-ln p[label]` with probabilities floored at [`PROB_FLOOR`].
pub fn cross_entropy(probs: &[f64], labels: &[usize], k: usize) -> Result<f64, DnnError> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (row, &y) in probs.chunks_exact(k).zip(labels) {
        if y >= k {
            return Err(DnnError::InvalidLabel { label: y, n_classes: k });
        }
        total -= libm::log(row[y].max(PROB_FLOOR));
    }
    Ok(total / labels.len() as f64)
}

/// Parameter gradients, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.weights.iter().chain(self.biases.iter()).map(|v| v.as_slice()).collect()
    }
}

/// Loss and gradients with dropout disabled.
pub fn loss_and_grad(net: &DenseNet, batch: &[f64], labels: &[usize]) -> Result<(f64, Gradients), DnnError> {
    let (loss, grads, _) = loss_and_grad_with(net, batch, labels, Mode::Eval)?;
    Ok((loss, grads))
}

/// Loss, gradients and the forward-pass probabilities under `mode`.
pub fn loss_and_grad_with(
    net: &DenseNet,
    batch: &[f64],
    labels: &[usize],
    mode: Mode,
) -> Result<(f64, Gradients, Vec<f64>), DnnError> {
    let n = labels.len();
    let k = net.n_classes();
    if let Some(&label) = labels.iter().find(|&&y| y >= k) {
        return Err(DnnError::InvalidLabel { label, n_classes: k });
    }
    let (probs, cache) = forward(net, batch, n, mode)?;
    let loss = cross_entropy(&probs, labels, k)?;

    let layers = net.n_layers();
    let mut gw: Vec<Vec<f64>> = net.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut gb: Vec<Vec<f64>> = net.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    if n == 0 {
        return Ok((loss, Gradients { weights: gw, biases: gb }, probs));
    }
    // dL/dz at the softmax output
    let inv_n = 1.0 / n as f64;
    let mut delta: Vec<f64> = probs.clone();
    for (i, &y) in labels.iter().enumerate() {
        delta[i * k + y] -= 1.0;
    }
    delta.iter_mut().for_each(|d| *d *= inv_n);

    for l in (0..layers).rev() {
        let (d_in, d_out) = (net.layer_sizes[l], net.layer_sizes[l + 1]);
        let input = if l == 0 { batch } else { cache.post[l - 1].as_slice() };
        let (w_grad, b_grad) = (&mut gw[l], &mut gb[l]);
        for i in 0..n {
            let drow = &delta[i * d_out..(i + 1) * d_out];
            for (bg, &d) in b_grad.iter_mut().zip(drow) {
                *bg += d;
            }
            for (kk, &a) in input[i * d_in..(i + 1) * d_in].iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (g, &d) in w_grad[kk * d_out..(kk + 1) * d_out].iter_mut().zip(drow) {
                    *g += a * d;
                }
            }
        }
        if l == 0 {
            break;
        }
        let w = &net.weights[l];
        let mut next = vec![0.0; n * d_in];
        for i in 0..n {
            let drow = &delta[i * d_out..(i + 1) * d_out];
            for kk in 0..d_in {
                let s: f64 = w[kk * d_out..(kk + 1) * d_out].iter().zip(drow).map(|(a, b)| a * b).sum();
                next[i * d_in + kk] = s;
            }
        }
        if let Some(mask) = &cache.masks[l - 1] {
            next.iter_mut().zip(mask).for_each(|(g, m)| *g *= m);
        }
        let (z, a) = (&cache.pre[l - 1], &cache.act[l - 1]);
        for ((g, &zv), &av) in next.iter_mut().zip(z).zip(a) {
            *g *= net.activation.derivative(zv, av);
        }
        delta = next;
    }
    Ok((loss, Gradients { weights: gw, biases: gb }, probs))
}
