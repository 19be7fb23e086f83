//! A small feed-forward evidence network: hidden layers with relu or
//! tanh, a softplus head producing strictly positive evidence, analytic
//! backpropagation through the closed-form loss, Adam updates, and the
//! per-epoch training loop.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Sample;
use crate::error::{Error, Result};
use crate::gdd::GddParams;
use crate::hyperdomain::{LabelKind, LabelVector, Partition};
use crate::loss::{self, LossBreakdown, RegMode};
use crate::opinion::{self, FocalFamily, HyperOpinion};
use crate::util::stream_rng;

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Domain(format!(
                "unknown activation {other:?}; expected relu or tanh"
            ))),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        })
    }
}

/// Dense-layer weights and biases. `dims` runs input, hidden sizes,
/// output (evidence width). Weight matrices are row-major `out x in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub dims: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpParams {
    /// Seeded uniform init in +-sqrt(6 / (fan_in + fan_out)) per layer,
    /// zero biases.
    pub fn init(dims: Vec<usize>, activation: Activation, seed: u64) -> Result<Self> {
        Self::check_dims(&dims)?;
        let mut rng = stream_rng(seed, 0);
        let mut weights = Vec::with_capacity(dims.len() - 1);
        let mut biases = Vec::with_capacity(dims.len() - 1);
        for layer in 0..dims.len() - 1 {
            let (fan_in, fan_out) = (dims[layer], dims[layer + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.random_range(-bound..bound))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self { dims, activation, weights, biases })
    }

    /// All weights and biases zero; useful as a fixed point in tests.
    pub fn zeros(dims: Vec<usize>, activation: Activation) -> Result<Self> {
        Self::check_dims(&dims)?;
        let weights = (0..dims.len() - 1)
            .map(|l| vec![0.0; dims[l] * dims[l + 1]])
            .collect();
        let biases = (0..dims.len() - 1).map(|l| vec![0.0; dims[l + 1]]).collect();
        Ok(Self { dims, activation, weights, biases })
    }

    fn check_dims(dims: &[usize]) -> Result<()> {
        if dims.len() < 2 {
            return Err(Error::Shape("network needs at least input and output dims".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape("layer dims must be positive".into()));
        }
        Ok(())
    }

    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    fn check_finite(&self) -> bool {
        self.weights.iter().flatten().all(|w| w.is_finite())
            && self.biases.iter().flatten().all(|b| b.is_finite())
    }
}

/// Per-parameter gradients with the same shapes as `MlpParams`.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub d_weights: Vec<Vec<f64>>,
    pub d_biases: Vec<Vec<f64>>,
}

impl MlpGrads {
    pub fn zeros_like(params: &MlpParams) -> Self {
        Self {
            d_weights: params.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            d_biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn add_scaled(&mut self, other: &MlpGrads, scale: f64) {
        for (acc, g) in self.d_weights.iter_mut().zip(&other.d_weights) {
            for (a, &v) in acc.iter_mut().zip(g) {
                *a += scale * v;
            }
        }
        for (acc, g) in self.d_biases.iter_mut().zip(&other.d_biases) {
            for (a, &v) in acc.iter_mut().zip(g) {
                *a += scale * v;
            }
        }
    }
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First and second moment accumulators plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_weights: Vec<Vec<f64>>,
    v_weights: Vec<Vec<f64>>,
    m_biases: Vec<Vec<f64>>,
    v_biases: Vec<Vec<f64>>,
    step: u64,
}

impl AdamState {
    pub fn new(params: &MlpParams) -> Self {
        Self {
            m_weights: params.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            v_weights: params.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            m_biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            v_biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub reg_mode: RegMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-2,
            lambda: 0.1,
            epochs: 100,
            batch_size: 64,
            seed: 7,
            hidden: vec![32, 32],
            activation: Activation::Relu,
            reg_mode: RegMode::Kl,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Domain("learning rate must be positive".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Domain("lambda must be non-negative".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Domain("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        Ok(())
    }

    /// Full layer dims for a network over the given data shape.
    pub fn dims(&self, input_dim: usize, partition: &Partition) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(&self.hidden);
        dims.push(partition.evidence_width());
        dims
    }
}

/// Floor keeping evidence strictly positive even where softplus
/// underflows.
const EVIDENCE_FLOOR: f64 = 1e-300;

fn softplus(z: f64) -> f64 {
    (z.max(0.0) + (-z.abs()).exp().ln_1p()).max(EVIDENCE_FLOOR)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let t = z.exp();
        t / (1.0 + t)
    }
}

struct ForwardTrace {
    /// Activations per layer, starting with the input itself.
    acts: Vec<Vec<f64>>,
    /// Pre-activations per layer.
    pre: Vec<Vec<f64>>,
}

fn forward_trace(params: &MlpParams, x: &[f64]) -> Result<ForwardTrace> {
    if x.len() != params.input_dim() {
        return Err(Error::Shape(format!(
            "input has {} features but the network expects {}",
            x.len(),
            params.input_dim()
        )));
    }
    let layers = params.num_layers();
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(layers + 1);
    let mut pre: Vec<Vec<f64>> = Vec::with_capacity(layers);
    acts.push(x.to_vec());
    for l in 0..layers {
        let (n_in, n_out) = (params.dims[l], params.dims[l + 1]);
        let w = &params.weights[l];
        let b = &params.biases[l];
        let input = &acts[l];
        let mut z = vec![0.0; n_out];
        for o in 0..n_out {
            let row = &w[o * n_in..(o + 1) * n_in];
            let mut s = b[o];
            for (wi, xi) in row.iter().zip(input) {
                s += wi * xi;
            }
            z[o] = s;
        }
        let a: Vec<f64> = if l + 1 == layers {
            z.iter().map(|&v| softplus(v)).collect()
        } else {
            match params.activation {
                Activation::Relu => z.iter().map(|&v| v.max(0.0)).collect(),
                Activation::Tanh => z.iter().map(|&v| v.tanh()).collect(),
            }
        };
        pre.push(z);
        acts.push(a);
    }
    Ok(ForwardTrace { acts, pre })
}

/// Evidence vector for one input: hidden layers under the configured
/// activation, softplus head, strictly positive output.
pub fn forward(params: &MlpParams, x: &[f64]) -> Result<Vec<f64>> {
    Ok(forward_trace(params, x)?.acts.last().unwrap().clone())
}

/// Loss and parameter gradients for one example. The loss gradient with
/// respect to the concentrations chains through alpha = e + 1 and c = e,
/// then through the softplus head and the hidden layers.
pub fn backward(
    params: &MlpParams,
    partition: &Arc<Partition>,
    x: &[f64],
    y: &LabelVector,
    lambda: f64,
    reg_mode: RegMode,
) -> Result<(MlpGrads, LossBreakdown)> {
    if params.output_dim() != partition.evidence_width() {
        return Err(Error::Shape(format!(
            "network emits {} outputs but the domain needs {}",
            params.output_dim(),
            partition.evidence_width()
        )));
    }
    let trace = forward_trace(params, x)?;
    let evidence = trace.acts.last().unwrap();
    let gdd = GddParams::from_evidence(evidence, Arc::clone(partition))?;
    let breakdown = loss::total_loss(&gdd, y, lambda, reg_mode)?;
    let lg = loss::grad_total(&gdd, y, lambda, reg_mode)?;

    // d(loss)/d(evidence): singleton slots pick up d_alpha, composite
    // slots pick up their group's d_c.
    let k = partition.k();
    let mut d_evidence = vec![0.0; params.output_dim()];
    d_evidence[..k].copy_from_slice(&lg.d_alpha[..k]);
    for (slot, &j) in partition.multiclass_groups().iter().enumerate() {
        d_evidence[k + slot] = lg.d_c[j];
    }

    let layers = params.num_layers();
    let mut grads = MlpGrads::zeros_like(params);
    // head: evidence = softplus(z)
    let mut delta: Vec<f64> = d_evidence
        .iter()
        .zip(&trace.pre[layers - 1])
        .map(|(&de, &z)| de * sigmoid(z))
        .collect();

    for l in (0..layers).rev() {
        let (n_in, n_out) = (params.dims[l], params.dims[l + 1]);
        let input = &trace.acts[l];
        for o in 0..n_out {
            let row = &mut grads.d_weights[l][o * n_in..(o + 1) * n_in];
            for (slot, &xi) in row.iter_mut().zip(input) {
                *slot = delta[o] * xi;
            }
            grads.d_biases[l][o] = delta[o];
        }
        if l == 0 {
            break;
        }
        let w = &params.weights[l];
        let mut prev = vec![0.0; n_in];
        for o in 0..n_out {
            let row = &w[o * n_in..(o + 1) * n_in];
            for (p, &wi) in prev.iter_mut().zip(row) {
                *p += delta[o] * wi;
            }
        }
        let z_prev = &trace.pre[l - 1];
        delta = prev
            .iter()
            .zip(z_prev)
            .map(|(&g, &z)| match params.activation {
                Activation::Relu => {
                    if z > 0.0 {
                        g
                    } else {
                        0.0
                    }
                }
                Activation::Tanh => {
                    let t = z.tanh();
                    g * (1.0 - t * t)
                }
            })
            .collect();
    }
    Ok((grads, breakdown))
}

/// One bias-corrected Adam update in place.
pub fn adam_step(
    params: &mut MlpParams,
    grads: &MlpGrads,
    state: &mut AdamState,
    learning_rate: f64,
) -> Result<()> {
    if grads.d_weights.len() != params.weights.len()
        || grads
            .d_weights
            .iter()
            .zip(&params.weights)
            .any(|(g, w)| g.len() != w.len())
        || grads
            .d_biases
            .iter()
            .zip(&params.biases)
            .any(|(g, b)| g.len() != b.len())
    {
        return Err(Error::Shape("gradient shapes do not match the network".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - ADAM_BETA1.powi(t);
    let bc2 = 1.0 - ADAM_BETA2.powi(t);
    let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
        for i in 0..p.len() {
            m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g[i];
            v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            p[i] -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    };
    for l in 0..params.weights.len() {
        update(
            &mut params.weights[l],
            &grads.d_weights[l],
            &mut state.m_weights[l],
            &mut state.v_weights[l],
        );
        update(
            &mut params.biases[l],
            &grads.d_biases[l],
            &mut state.m_biases[l],
            &mut state.v_biases[l],
        );
    }
    Ok(())
}

/// One pass over the dataset: seeded shuffle, mini-batches, batch-mean
/// gradients, one Adam step per batch. Returns the epoch-mean loss.
/// Examples are accumulated in a fixed order inside each batch, so the
/// result is deterministic for a given seed and epoch index.
pub fn train_epoch(
    params: &mut MlpParams,
    state: &mut AdamState,
    dataset: &[Sample],
    partition: &Arc<Partition>,
    cfg: &TrainConfig,
    epoch: usize,
) -> Result<LossBreakdown> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::Domain("training dataset is empty".into()));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    // stream ids 1.. are reserved for epoch shuffles; stream 0 is init
    let mut rng = stream_rng(cfg.seed, 1 + epoch as u64);
    order.shuffle(&mut rng);

    let mut sum_upce = 0.0;
    let mut sum_reg = 0.0;
    let mut sum_total = 0.0;
    for batch in order.chunks(cfg.batch_size) {
        let mut batch_grads = MlpGrads::zeros_like(params);
        let scale = 1.0 / batch.len() as f64;
        for &idx in batch {
            let sample = &dataset[idx];
            let (grads, breakdown) = backward(
                params,
                partition,
                &sample.features,
                &sample.label,
                cfg.lambda,
                cfg.reg_mode,
            )?;
            batch_grads.add_scaled(&grads, scale);
            sum_upce += breakdown.upce;
            sum_reg += breakdown.reg;
            sum_total += breakdown.total;
        }
        adam_step(params, &mut batch_grads, state, cfg.learning_rate)?;
    }
    if !params.check_finite() {
        return Err(Error::Domain(
            "network parameters became non-finite during training".into(),
        ));
    }
    let n = dataset.len() as f64;
    Ok(LossBreakdown {
        upce: sum_upce / n,
        reg: sum_reg / n,
        total: sum_total / n,
        lambda: cfg.lambda,
    })
}

/// Everything the model says about one input.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub evidence: Vec<f64>,
    pub gdd: GddParams,
    pub set_pred: LabelKind,
    pub singleton_pred: usize,
    pub vacuity: f64,
    pub vagueness: f64,
    pub dissonance: f64,
}

/// Full prediction record: evidence, the induced distribution, the
/// hyper-domain argmax, the projected singleton, and the uncertainty
/// measures over the partition-restricted focal family.
pub fn predict(
    params: &MlpParams,
    partition: &Arc<Partition>,
    x: &[f64],
) -> Result<Prediction> {
    if params.output_dim() != partition.evidence_width() {
        return Err(Error::Shape(format!(
            "network emits {} outputs but the domain needs {}",
            params.output_dim(),
            partition.evidence_width()
        )));
    }
    let evidence = forward(params, x)?;
    let family = FocalFamily::from_partition(partition);
    let op = HyperOpinion::from_evidence(&evidence, partition.k())?;
    let set_pred = opinion::argmax_evidence(&evidence, partition)?;
    let gdd = GddParams::from_evidence(&evidence, Arc::clone(partition))?;
    Ok(Prediction {
        singleton_pred: gdd.projected_prediction(),
        set_pred,
        vacuity: opinion::vacuity(&op),
        vagueness: opinion::vagueness(&op, &family)?,
        dissonance: opinion::dissonance(&op, &family)?,
        evidence,
        gdd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperdomain::Partition;

    fn part(k: usize, groups: &[&[usize]]) -> Arc<Partition> {
        Arc::new(Partition::new(k, groups.iter().map(|g| g.to_vec()).collect()).unwrap())
    }

    fn label(bits: &[u8]) -> LabelVector {
        LabelVector::new(bits.iter().map(|&b| b != 0).collect()).unwrap()
    }

    #[test]
    fn zero_network_emits_ln_two() {
        let p = part(3, &[&[0], &[1, 2]]);
        let params = MlpParams::zeros(vec![2, 4, 4], Activation::Relu).unwrap();
        let e = forward(&params, &[0.3, -0.7]).unwrap();
        for v in e {
            assert!((v - 2.0f64.ln()).abs() < 1e-12);
        }
        drop(p);
    }

    #[test]
    fn softplus_is_stable_and_positive() {
        assert!((softplus(50.0) - 50.0).abs() < 1e-9);
        let tiny = softplus(-50.0);
        assert!(tiny > 0.0 && (tiny - (-50.0f64).exp()).abs() < 1e-24);
        assert!(softplus(-1e4) > 0.0);
        assert!(softplus(f64::MIN) > 0.0);
    }

    #[test]
    fn forward_checks_input_dim() {
        let params = MlpParams::zeros(vec![2, 3], Activation::Relu).unwrap();
        assert!(forward(&params, &[1.0]).is_err());
    }

    #[test]
    fn backward_matches_finite_differences() {
        let p = part(3, &[&[0], &[1, 2]]);
        let x = [0.4, -1.2];
        let labels = [label(&[1, 0, 0]), label(&[0, 1, 1])];
        for seed in 0..20u64 {
            let params = MlpParams::init(vec![2, 4, 4], Activation::Tanh, seed).unwrap();
            for y in &labels {
                let (grads, _) =
                    backward(&params, &p, &x, y, 0.1, RegMode::Kl).unwrap();
                for l in 0..params.num_layers() {
                    for i in 0..params.weights[l].len() {
                        let fd = weight_fd(&params, &p, &x, y, l, i, true);
                        let got = grads.d_weights[l][i];
                        let err = (got - fd).abs() / fd.abs().max(1.0);
                        assert!(err < 1e-4, "seed {seed} layer {l} w[{i}]: {got} vs {fd}");
                    }
                    for i in 0..params.biases[l].len() {
                        let fd = weight_fd(&params, &p, &x, y, l, i, false);
                        let got = grads.d_biases[l][i];
                        let err = (got - fd).abs() / fd.abs().max(1.0);
                        assert!(err < 1e-4, "seed {seed} layer {l} b[{i}]: {got} vs {fd}");
                    }
                }
            }
        }
    }

    fn weight_fd(
        params: &MlpParams,
        partition: &Arc<Partition>,
        x: &[f64],
        y: &LabelVector,
        layer: usize,
        idx: usize,
        weight: bool,
    ) -> f64 {
        let eval = |params: &MlpParams| -> f64 {
            let e = forward(params, x).unwrap();
            let gdd = GddParams::from_evidence(&e, Arc::clone(partition)).unwrap();
            loss::total_loss(&gdd, y, 0.1, RegMode::Kl).unwrap().total
        };
        let at = if weight {
            params.weights[layer][idx]
        } else {
            params.biases[layer][idx]
        };
        let h = 1e-5 * at.abs().max(1.0);
        let mut plus = params.clone();
        let mut minus = params.clone();
        if weight {
            plus.weights[layer][idx] = at + h;
            minus.weights[layer][idx] = at - h;
        } else {
            plus.biases[layer][idx] = at + h;
            minus.biases[layer][idx] = at - h;
        }
        (eval(&plus) - eval(&minus)) / (2.0 * h)
    }

    #[test]
    fn adam_zero_gradient_leaves_params() {
        let mut params = MlpParams::init(vec![2, 3, 4], Activation::Relu, 3).unwrap();
        let before = params.clone();
        let grads = MlpGrads::zeros_like(&params);
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state, 0.1).unwrap();
        assert_eq!(params, before);
    }

    #[test]
    fn adam_first_step_is_sign_scaled() {
        let mut params = MlpParams::zeros(vec![1, 2], Activation::Relu).unwrap();
        let mut grads = MlpGrads::zeros_like(&params);
        grads.d_weights[0] = vec![0.3, -2.0];
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state, 0.05).unwrap();
        // with fresh state, m_hat = g and v_hat = g^2, so the step is
        // -lr * g / (|g| + eps), almost exactly -lr * sign(g)
        assert!((params.weights[0][0] + 0.05).abs() < 1e-6);
        assert!((params.weights[0][1] - 0.05).abs() < 1e-6);
    }

    #[test]
    fn adam_shape_mismatch_rejected() {
        let mut params = MlpParams::zeros(vec![2, 3], Activation::Relu).unwrap();
        let other = MlpParams::zeros(vec![2, 4], Activation::Relu).unwrap();
        let grads = MlpGrads::zeros_like(&other);
        let mut state = AdamState::new(&params);
        assert!(adam_step(&mut params, &grads, &mut state, 0.1).is_err());
    }

    #[test]
    fn single_sample_training_descends() {
        let p = part(3, &[&[0], &[1, 2]]);
        let sample = Sample {
            features: vec![1.0, -0.5],
            label: label(&[0, 1, 1]),
        };
        let cfg = TrainConfig {
            epochs: 10,
            batch_size: 1,
            lambda: 0.0,
            learning_rate: 5e-2,
            hidden: vec![8],
            ..TrainConfig::default()
        };
        let mut params =
            MlpParams::init(cfg.dims(2, &p), cfg.activation, cfg.seed).unwrap();
        let mut state = AdamState::new(&params);
        let data = vec![sample];
        let mut losses = Vec::new();
        for epoch in 0..10 {
            let mean = train_epoch(&mut params, &mut state, &data, &p, &cfg, epoch).unwrap();
            losses.push(mean.total);
        }
        for w in losses.windows(2) {
            assert!(w[1] < w[0], "loss must strictly decrease: {losses:?}");
        }
    }

    #[test]
    fn training_is_deterministic() {
        let p = part(3, &[&[0], &[1, 2]]);
        let mut rng = stream_rng(99, 0);
        let data: Vec<Sample> = (0..40)
            .map(|i| Sample {
                features: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                label: if i % 3 == 0 { label(&[0, 1, 1]) } else { label(&[1, 0, 0]) },
            })
            .collect();
        let cfg = TrainConfig { epochs: 3, ..TrainConfig::default() };
        let run = || {
            let mut params =
                MlpParams::init(cfg.dims(2, &p), cfg.activation, cfg.seed).unwrap();
            let mut state = AdamState::new(&params);
            for epoch in 0..cfg.epochs {
                train_epoch(&mut params, &mut state, &data, &p, &cfg, epoch).unwrap();
            }
            params
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_dataset_rejected() {
        let p = part(2, &[&[0], &[1]]);
        let cfg = TrainConfig::default();
        let mut params = MlpParams::init(cfg.dims(2, &p), cfg.activation, 0).unwrap();
        let mut state = AdamState::new(&params);
        assert!(train_epoch(&mut params, &mut state, &[], &p, &cfg, 0).is_err());
    }

    #[test]
    fn predict_golden_evidence() {
        // wire a network that outputs the wanted evidence exactly:
        // zero weights, biases = softplus-inverse of the target
        let p = part(3, &[&[0], &[1, 2]]);
        let target = [3.0f64, 0.0, 0.0, 24.0];
        let mut params = MlpParams::zeros(vec![2, 4], Activation::Relu).unwrap();
        for (b, &t) in params.biases[0].iter_mut().zip(&target) {
            // softplus^{-1}(t) = ln(e^t - 1); for t = 0 push far negative
            *b = if t > 0.0 { (t.exp() - 1.0).ln() } else { -60.0 };
        }
        let pred = predict(&params, &p, &[0.0, 0.0]).unwrap();
        assert_eq!(pred.set_pred, LabelKind::Composite(1));
        assert!((pred.vagueness - 0.8).abs() < 1e-6);
        assert!((pred.vacuity - 0.1).abs() < 1e-6);

        let target2 = [3.0f64, 12.0, 12.0, 0.0];
        for (b, &t) in params.biases[0].iter_mut().zip(&target2) {
            *b = if t > 0.0 { (t.exp() - 1.0).ln() } else { -60.0 };
        }
        let pred2 = predict(&params, &p, &[0.0, 0.0]).unwrap();
        assert_eq!(pred2.singleton_pred, 1);
        assert!((pred2.dissonance - 0.744).abs() < 1e-5);

        // all-zero evidence: total vacuity, tie-break to class 0
        for b in params.biases[0].iter_mut() {
            *b = -60.0;
        }
        let pred3 = predict(&params, &p, &[0.0, 0.0]).unwrap();
        assert!((pred3.vacuity - 1.0).abs() < 1e-9);
        assert_eq!(pred3.set_pred, LabelKind::Singleton(0));
    }
}
