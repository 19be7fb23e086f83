//! Brute-force verification of the analytic formulas: Monte-Carlo
//! expectations under the grouped Dirichlet sampler, central finite
//! differences, low-dimensional simplex quadrature, and a runnable
//! check suite covering all of it.
//!
//! Everything here deliberately takes the dumb route (sampling, grids,
//! difference quotients) so it stays independent of the closed forms it
//! is checking.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gdd::GddParams;
use crate::hyperdomain::{LabelVector, Partition};
use crate::loss::{self, RegMode};
use crate::net::{self, Activation, MlpParams};
use crate::opinion::{self, FocalFamily, HyperOpinion};
use crate::special_fn::{digamma_pos, lgamma_pos, trigamma_pos};
use crate::util::stream_rng;

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// How many standard errors the estimate sits from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.std_error > 0.0 {
            (value - self.mean).abs() / self.std_error
        } else if (value - self.mean).abs() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Which statistic to average over samples of the distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum McStatistic {
    /// One coordinate of the sampled probability vector.
    MeanComponent(usize),
    /// Log of one coordinate.
    LogSingleton(usize),
    /// Log of one group's probability mass.
    LogGroup(usize),
    /// Partial cross-entropy against a fixed label.
    Pce(LabelVector),
    /// Negative log density at the sample (estimates the entropy).
    NegLogPdf,
    /// Log density ratio against the flat distribution (estimates the KL).
    LogRatioToFlat,
}

const MC_CHUNK: usize = 10_000;

/// Sample mean and standard error of a statistic under the distribution.
/// Draws are chunked; each chunk runs on its own stream derived from the
/// seed and chunks merge in index order, so the result is deterministic
/// for a given `(seed, n)`.
pub fn mc_expectation(
    params: &GddParams,
    stat: &McStatistic,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n < 1000 {
        return Err(Error::Domain(format!(
            "monte-carlo estimate needs at least 1000 samples, got {n}"
        )));
    }
    let flat = GddParams::flat(Arc::clone(params.partition()));
    if let McStatistic::Pce(y) = stat {
        y.kind(params.partition())?;
    }
    match stat {
        McStatistic::MeanComponent(k) | McStatistic::LogSingleton(k) if *k >= params.k() => {
            return Err(Error::Domain(format!("class index {k} out of range")));
        }
        McStatistic::LogGroup(j) if *j >= params.num_groups() => {
            return Err(Error::Domain(format!("group index {j} out of range")));
        }
        _ => {}
    }

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut remaining = n;
    let mut chunk_idx = 0u64;
    while remaining > 0 {
        let take = remaining.min(MC_CHUNK);
        let mut rng = stream_rng(seed, chunk_idx);
        for _ in 0..take {
            let mut x = params.sample(&mut rng);
            // guard against gamma underflow at the simplex boundary
            for v in &mut x {
                if *v < 1e-300 {
                    *v = 1e-300;
                }
            }
            let value = match stat {
                McStatistic::MeanComponent(k) => x[*k],
                McStatistic::LogSingleton(k) => x[*k].ln(),
                McStatistic::LogGroup(j) => params
                    .partition()
                    .group(*j)
                    .iter()
                    .map(|&l| x[l])
                    .sum::<f64>()
                    .ln(),
                McStatistic::Pce(y) => loss::pce(&x, y)?.value,
                McStatistic::NegLogPdf => -params.log_pdf(&x)?,
                McStatistic::LogRatioToFlat => params.log_pdf(&x)? - flat.log_pdf(&x)?,
            };
            sum += value;
            sum_sq += value * value;
        }
        remaining -= take;
        chunk_idx += 1;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(McEstimate { mean, std_error: (var / nf).sqrt(), n })
}

/// Central-difference gradient with per-coordinate step
/// `1e-5 * max(1, |x_i|)`. The function is probed at `2 * len` points;
/// a non-finite value names the offending coordinate.
pub fn finite_diff<F: Fn(&[f64]) -> f64>(f: F, at: &[f64]) -> Result<Vec<f64>> {
    let mut grad = Vec::with_capacity(at.len());
    let mut probe = at.to_vec();
    for i in 0..at.len() {
        let h = 1e-5 * at[i].abs().max(1.0);
        probe[i] = at[i] + h;
        let up = f(&probe);
        probe[i] = at[i] - h;
        let down = f(&probe);
        probe[i] = at[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::Domain(format!(
                "function not finite near coordinate {i}"
            )));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Grid integral of the density over the simplex; supports two or three
/// classes. Should come out at 1.
pub fn simplex_quadrature(params: &GddParams) -> Result<f64> {
    match params.k() {
        2 => {
            let n = 20_000usize;
            let h = 1.0 / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let x0 = (i as f64 + 0.5) * h;
                acc += params.log_pdf(&[x0, 1.0 - x0])?.exp();
            }
            Ok(acc * h)
        }
        3 => {
            let n = 1200usize;
            let h = 1.0 / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let x0 = (i as f64 + 0.5) * h;
                for j in 0..n {
                    let x1 = (j as f64 + 0.5) * h;
                    let x2 = 1.0 - x0 - x1;
                    if x2 > 0.0 {
                        acc += params.log_pdf(&[x0, x1, x2])?.exp();
                    }
                }
            }
            Ok(acc * h * h)
        }
        k => Err(Error::Domain(format!(
            "quadrature supports 2 or 3 classes, got {k}"
        ))),
    }
}

/// A random partition with `k` classes in `3..=max_k` and 2 to
/// `min(max_eta, k - 1)` groups; fewer groups than classes guarantees at
/// least one multi-class group.
pub fn random_partition<R: Rng + ?Sized>(
    rng: &mut R,
    max_k: usize,
    max_eta: usize,
) -> Arc<Partition> {
    assert!(max_k >= 3 && max_eta >= 2);
    let k = rng.random_range(3..=max_k);
    let eta = rng.random_range(2..=max_eta.min(k - 1));
    let mut classes: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        classes.swap(i, j);
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); eta];
    for (i, class) in classes.into_iter().enumerate() {
        if i < eta {
            groups[i].push(class);
        } else {
            groups[rng.random_range(0..eta)].push(class);
        }
    }
    Arc::new(Partition::new(k, groups).expect("constructed to satisfy invariants"))
}

/// Random concentrations over a partition: alpha uniform in
/// `[alpha_lo, alpha_hi]`, c uniform in `[0, c_hi]` on multi-class groups.
pub fn random_params<R: Rng + ?Sized>(
    rng: &mut R,
    partition: &Arc<Partition>,
    alpha_lo: f64,
    alpha_hi: f64,
    c_hi: f64,
) -> GddParams {
    let alpha: Vec<f64> = (0..partition.k())
        .map(|_| rng.random_range(alpha_lo..alpha_hi))
        .collect();
    let c: Vec<f64> = (0..partition.num_groups())
        .map(|j| {
            if partition.is_multiclass(j) {
                rng.random_range(0.0..c_hi)
            } else {
                0.0
            }
        })
        .collect();
    GddParams::new(alpha, c, Arc::clone(partition)).expect("ranges keep params valid")
}

/// A random valid label: singleton or the indicator of a multi-class
/// group, evenly.
pub fn random_label<R: Rng + ?Sized>(rng: &mut R, partition: &Arc<Partition>) -> LabelVector {
    if !partition.multiclass_groups().is_empty() && rng.random_bool(0.5) {
        let pick = rng.random_range(0..partition.multiclass_groups().len());
        let j = partition.multiclass_groups()[pick];
        LabelVector::group_indicator(partition, j).expect("group in range")
    } else {
        let class = rng.random_range(0..partition.k());
        LabelVector::singleton(class, partition.k()).expect("class in range")
    }
}

/// One row of the verification report.
#[derive(Debug, Clone)]
pub struct VerifyCheck {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
}

impl VerifyCheck {
    fn new(name: &str, tolerance: f64, measured: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance,
            measured,
            pass: measured.is_finite() && measured <= tolerance,
        }
    }
}

/// Max relative error of `psi(x+1) - psi(x) = 1/x` over a log-spaced
/// grid, for any digamma implementation. Exposed so the suite's
/// sensitivity to a wrong implementation can itself be tested.
pub(crate) fn digamma_recurrence_max_err(digamma: impl Fn(f64) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for x in log_grid(1e-3, 1e5, 120) {
        let lhs = digamma(x + 1.0) - digamma(x);
        let rhs = 1.0 / x;
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    worst
}

fn trigamma_recurrence_max_err() -> f64 {
    let mut worst: f64 = 0.0;
    for x in log_grid(1e-3, 1e5, 120) {
        let lhs = trigamma_pos(x) - trigamma_pos(x + 1.0);
        let rhs = 1.0 / (x * x);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    worst
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Number of samples per Monte-Carlo estimate in the suite.
pub const MC_SAMPLES: usize = 200_000;

/// Runs the whole battery of checks. Deterministic for a given seed.
pub fn run_verify_suite(seed: u64) -> Vec<VerifyCheck> {
    let mut checks = Vec::new();

    checks.push(VerifyCheck::new(
        "digamma recurrence psi(x+1)-psi(x)=1/x",
        1e-12,
        digamma_recurrence_max_err(digamma_pos),
    ));
    checks.push(VerifyCheck::new(
        "trigamma recurrence psi1(x)-psi1(x+1)=1/x^2",
        1e-12,
        trigamma_recurrence_max_err(),
    ));
    checks.push(VerifyCheck::new(
        "log-gamma known values",
        1e-12,
        lgamma_known_values_err(),
    ));
    checks.push(VerifyCheck::new(
        "digamma = d/dx log-gamma (finite diff)",
        1e-6,
        derivative_pair_err(lgamma_pos, digamma_pos),
    ));
    checks.push(VerifyCheck::new(
        "trigamma = d/dx digamma (finite diff)",
        1e-6,
        derivative_pair_err(digamma_pos, trigamma_pos),
    ));

    let (row1, row2) = golden_opinion_errs();
    checks.push(VerifyCheck::new("golden opinion row 1 (vague)", 1e-6, row1));
    checks.push(VerifyCheck::new("golden opinion row 2 (dissonant)", 1e-6, row2));

    checks.extend(quadrature_checks());
    checks.extend(mc_agreement_checks(seed));
    checks.push(VerifyCheck::new(
        "loss gradients vs finite differences",
        1e-5,
        loss_gradient_err(seed),
    ));
    checks.push(VerifyCheck::new(
        "network gradients vs finite differences",
        1e-4,
        net_gradient_err(seed),
    ));
    checks.push(VerifyCheck::new(
        "expected partial cross-entropy lower bound",
        1e-10,
        lower_bound_violation(seed),
    ));
    checks.push(VerifyCheck::new(
        "derivative sign structure (6 facts x 100 draws)",
        0.0,
        sign_structure_violations(seed),
    ));
    checks.push(VerifyCheck::new(
        "uce reduction is exact for c = 0",
        0.0,
        uce_reduction_err(seed),
    ));
    checks.push(VerifyCheck::new(
        "dirichlet reduction closed forms",
        1e-10,
        dirichlet_reduction_err(seed),
    ));
    checks
}

fn lgamma_known_values_err() -> f64 {
    let mut worst: f64 = lgamma_pos(1.0).abs().max(lgamma_pos(2.0).abs());
    worst = worst.max((lgamma_pos(5.0) - 24.0f64.ln()).abs());
    worst = worst.max((lgamma_pos(0.5) - 0.5 * std::f64::consts::PI.ln()).abs());
    worst
}

fn derivative_pair_err(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    // below 0.5 the difference quotient's own truncation error dominates
    for x in log_grid(0.5, 1e4, 40) {
        let h = 1e-5 * x.max(1.0);
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        worst = worst.max((df(x) - fd).abs());
    }
    worst
}

fn golden_opinion_errs() -> (f64, f64) {
    let family = FocalFamily::new(
        3,
        vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]],
    )
    .expect("valid family");
    let eval = |evidence: &[f64], u: f64, vag: f64, diss: f64| -> f64 {
        let op = HyperOpinion::from_evidence(evidence, 3).expect("valid evidence");
        let mut err = (opinion::vacuity(&op) - u).abs();
        err = err.max((opinion::vagueness(&op, &family).expect("aligned") - vag).abs());
        err.max((opinion::dissonance(&op, &family).expect("aligned") - diss).abs())
    };
    (
        eval(&[3.0, 0.0, 0.0, 0.0, 0.0, 24.0], 0.1, 0.8, 0.2),
        eval(&[3.0, 12.0, 12.0, 0.0, 0.0, 0.0], 0.1, 0.0, 0.744),
    )
}

fn quadrature_checks() -> Vec<VerifyCheck> {
    let p2 = Arc::new(Partition::new(2, vec![vec![0], vec![1]]).unwrap());
    let p3 = Arc::new(Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap());

    let flat2 = GddParams::flat(Arc::clone(&p2));
    let dir21 = GddParams::new(vec![2.0, 1.0], vec![0.0, 0.0], Arc::clone(&p2)).unwrap();
    let grouped = GddParams::new(vec![4.0, 1.0, 1.0], vec![0.0, 24.0], p3).unwrap();

    vec![
        VerifyCheck::new(
            "quadrature: flat density integrates to 1 (K=2)",
            1e-4,
            (simplex_quadrature(&flat2).expect("supported") - 1.0).abs(),
        ),
        VerifyCheck::new(
            "quadrature: Dir(2,1) integrates to 1",
            1e-6,
            (simplex_quadrature(&dir21).expect("supported") - 1.0).abs(),
        ),
        VerifyCheck::new(
            "quadrature: grouped density integrates to 1 (K=3)",
            1e-2,
            (simplex_quadrature(&grouped).expect("supported") - 1.0).abs(),
        ),
    ]
}

fn mc_agreement_checks(seed: u64) -> Vec<VerifyCheck> {
    let mut rng = stream_rng(seed, 100);
    let mut worst = [0.0f64; 6];
    for set_idx in 0..5u64 {
        let partition = random_partition(&mut rng, 5, 3);
        let params = random_params(&mut rng, &partition, 1.0, 6.0, 6.0);
        let class = rng.random_range(0..partition.k());
        let group = rng.random_range(0..partition.num_groups());
        let label = random_label(&mut rng, &partition);
        let mc_seed = seed ^ (set_idx + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);

        let stats = [
            (McStatistic::MeanComponent(class), params.mean()[class]),
            (McStatistic::LogSingleton(class), params.expected_log_singleton(class)),
            (McStatistic::LogGroup(group), params.expected_log_group(group)),
            (McStatistic::NegLogPdf, params.entropy()),
            (McStatistic::LogRatioToFlat, params.kl_to_flat()),
            (
                McStatistic::Pce(label.clone()),
                loss::upce(&params, &label).expect("valid label"),
            ),
        ];
        for (i, (stat, analytic)) in stats.iter().enumerate() {
            let est = mc_expectation(&params, stat, MC_SAMPLES, mc_seed).expect("valid stat");
            worst[i] = worst[i].max(est.z_score(*analytic));
        }
    }
    let names = [
        "mc agreement: mean",
        "mc agreement: expected log singleton",
        "mc agreement: expected log group",
        "mc agreement: entropy",
        "mc agreement: kl to flat",
        "mc agreement: expected partial cross-entropy",
    ];
    names
        .iter()
        .zip(worst)
        .map(|(name, z)| VerifyCheck::new(name, 3.0, z))
        .collect()
}

/// Max relative error between analytic loss gradients and finite
/// differences over random parameter draws.
fn loss_gradient_err(seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 200);
    let mut worst: f64 = 0.0;
    for case in 0..10 {
        let partition = random_partition(&mut rng, 5, 3);
        let params = random_params(&mut rng, &partition, 1.0, 6.0, 6.0);
        let label = random_label(&mut rng, &partition);
        let lambda = rng.random_range(0.0..1.0);
        let mode = if case % 2 == 0 { RegMode::Kl } else { RegMode::Entropy };
        worst = worst.max(loss_grad_vs_fd(&params, &label, lambda, mode));
    }
    worst
}

/// Compares `grad_total` against `finite_diff` of the scalar loss over
/// the stacked `(alpha, c)` vector; returns the max relative error.
pub fn loss_grad_vs_fd(
    params: &GddParams,
    label: &LabelVector,
    lambda: f64,
    mode: RegMode,
) -> f64 {
    let partition = Arc::clone(params.partition());
    let k = partition.k();
    let multiclass: Vec<usize> = partition.multiclass_groups().to_vec();
    let mut stacked: Vec<f64> = params.alpha().to_vec();
    stacked.extend(multiclass.iter().map(|&j| params.c()[j]));

    let rebuild = |v: &[f64]| -> GddParams {
        let alpha = v[..k].to_vec();
        let mut c = vec![0.0; partition.num_groups()];
        for (slot, &j) in multiclass.iter().enumerate() {
            c[j] = v[k + slot];
        }
        GddParams::new(alpha, c, Arc::clone(&partition)).expect("probe stays valid")
    };
    let scalar = |v: &[f64]| -> f64 {
        loss::total_loss(&rebuild(v), label, lambda, mode)
            .map(|b| b.total)
            .unwrap_or(f64::NAN)
    };
    let fd = finite_diff(scalar, &stacked).expect("loss finite near params");
    let grad = loss::grad_total(params, label, lambda, mode).expect("valid inputs");

    let mut worst: f64 = 0.0;
    for i in 0..k {
        let denom = fd[i].abs().max(1.0);
        worst = worst.max((grad.d_alpha[i] - fd[i]).abs() / denom);
    }
    for (slot, &j) in multiclass.iter().enumerate() {
        let denom = fd[k + slot].abs().max(1.0);
        worst = worst.max((grad.d_c[j] - fd[k + slot]).abs() / denom);
    }
    worst
}

fn net_gradient_err(seed: u64) -> f64 {
    let partition = Arc::new(Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap());
    let mut worst: f64 = 0.0;
    for s in 0..3u64 {
        worst = worst.max(net_grad_vs_fd(&partition, seed.wrapping_add(s)));
    }
    worst
}

/// End-to-end gradient check of `net::backward` against finite
/// differences over every weight and bias of a small network.
pub fn net_grad_vs_fd(partition: &Arc<Partition>, seed: u64) -> f64 {
    let dims = vec![2, 4, partition.evidence_width()];
    let params = MlpParams::init(dims, Activation::Tanh, seed).expect("valid dims");
    let mut rng = stream_rng(seed, 300);
    let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let label = random_label(&mut rng, partition);
    let lambda = 0.1;

    let (grads, _) = net::backward(&params, partition, &x, &label, lambda, RegMode::Kl)
        .expect("valid shapes");
    let scalar = |p: &MlpParams| -> f64 {
        let e = net::forward(p, &x).expect("valid shapes");
        let gdd = GddParams::from_evidence(&e, Arc::clone(partition)).expect("valid evidence");
        loss::total_loss(&gdd, &label, lambda, RegMode::Kl)
            .expect("valid label")
            .total
    };

    let mut worst: f64 = 0.0;
    for l in 0..params.num_layers() {
        for i in 0..params.weights[l].len() {
            let at = params.weights[l][i];
            let h = 1e-5 * at.abs().max(1.0);
            let mut plus = params.clone();
            plus.weights[l][i] = at + h;
            let mut minus = params.clone();
            minus.weights[l][i] = at - h;
            let fd = (scalar(&plus) - scalar(&minus)) / (2.0 * h);
            worst = worst.max((grads.d_weights[l][i] - fd).abs() / fd.abs().max(1.0));
        }
        for i in 0..params.biases[l].len() {
            let at = params.biases[l][i];
            let h = 1e-5 * at.abs().max(1.0);
            let mut plus = params.clone();
            plus.biases[l][i] = at + h;
            let mut minus = params.clone();
            minus.biases[l][i] = at - h;
            let fd = (scalar(&plus) - scalar(&minus)) / (2.0 * h);
            worst = worst.max((grads.d_biases[l][i] - fd).abs() / fd.abs().max(1.0));
        }
    }
    worst
}

/// Worst violation of `upce >= pce(mean)` over random draws; zero when
/// the bound holds everywhere.
fn lower_bound_violation(seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 400);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let partition = random_partition(&mut rng, 5, 3);
        let params = random_params(&mut rng, &partition, 0.5, 8.0, 8.0);
        let label = random_label(&mut rng, &partition);
        let upce = loss::upce(&params, &label).expect("valid label");
        let bound = loss::pce(&params.mean(), &label).expect("aligned").value;
        worst = worst.max(bound - upce);
    }
    worst
}

/// Counts violations of the six derivative-sign facts over 100 random
/// draws each: for a singleton truth the own alpha derivative is
/// negative, the containing group's c derivative is negative, everything
/// else is positive; for a composite truth its own c and its members'
/// alphas are negative, everything else positive.
fn sign_structure_violations(seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 500);
    let mut violations = 0usize;
    for _ in 0..100 {
        let partition = random_partition(&mut rng, 5, 3);
        let params = random_params(&mut rng, &partition, 0.5, 8.0, 8.0);

        // singleton truth drawn from a multi-class group so the
        // "containing" fact is exercised every time
        let j = partition.multiclass_groups()
            [rng.random_range(0..partition.multiclass_groups().len())];
        let class = partition.group(j)[rng.random_range(0..partition.group(j).len())];
        let y = LabelVector::singleton(class, partition.k()).expect("class in range");
        let grad = loss::grad_total(&params, &y, 0.0, RegMode::None).expect("valid");
        if grad.d_alpha[class] >= 0.0 {
            violations += 1;
        }
        if grad.d_c[j] >= 0.0 {
            violations += 1;
        }
        for other in 0..partition.k() {
            let g = partition.containing_group(other).expect("in range");
            if other != class && g != j && grad.d_alpha[other] <= 0.0 {
                violations += 1;
            }
        }
        for other in 0..partition.num_groups() {
            if other != j && partition.is_multiclass(other) && grad.d_c[other] <= 0.0 {
                violations += 1;
            }
        }

        // composite truth
        let y = LabelVector::group_indicator(&partition, j).expect("group in range");
        let grad = loss::grad_total(&params, &y, 0.0, RegMode::None).expect("valid");
        if grad.d_c[j] >= 0.0 {
            violations += 1;
        }
        for &member in partition.group(j) {
            if grad.d_alpha[member] >= 0.0 {
                violations += 1;
            }
        }
        for other in 0..partition.k() {
            if partition.containing_group(other).expect("in range") != j
                && grad.d_alpha[other] <= 0.0
            {
                violations += 1;
            }
        }
        for other in 0..partition.num_groups() {
            if other != j && partition.is_multiclass(other) && grad.d_c[other] <= 0.0 {
                violations += 1;
            }
        }
    }
    violations as f64
}

fn uce_reduction_err(seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 600);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let partition = random_partition(&mut rng, 5, 3);
        let alpha: Vec<f64> = (0..partition.k())
            .map(|_| rng.random_range(0.5..8.0))
            .collect();
        let params = GddParams::new(
            alpha.clone(),
            vec![0.0; partition.num_groups()],
            Arc::clone(&partition),
        )
        .expect("valid");
        let class = rng.random_range(0..partition.k());
        let y = LabelVector::singleton(class, partition.k()).expect("in range");
        let upce = loss::upce(&params, &y).expect("valid");
        let uce = digamma_pos(params.beta0()) - digamma_pos(alpha[class]);
        worst = worst.max((upce - uce).abs());
    }
    worst
}

fn dirichlet_reduction_err(seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 700);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let partition = random_partition(&mut rng, 4, 3);
        let alpha: Vec<f64> = (0..partition.k())
            .map(|_| rng.random_range(0.5..6.0))
            .collect();
        let params = GddParams::new(
            alpha.clone(),
            vec![0.0; partition.num_groups()],
            Arc::clone(&partition),
        )
        .expect("valid");
        let a0: f64 = alpha.iter().sum();
        let k = alpha.len();

        let dir_log_beta =
            alpha.iter().map(|&a| lgamma_pos(a)).sum::<f64>() - lgamma_pos(a0);
        worst = worst.max((params.log_normalizer() - dir_log_beta).abs());

        let dir_entropy = dir_log_beta + (a0 - k as f64) * digamma_pos(a0)
            - alpha
                .iter()
                .map(|&a| (a - 1.0) * digamma_pos(a))
                .sum::<f64>();
        worst = worst.max((params.entropy() - dir_entropy).abs());

        let flat_log_beta = -lgamma_pos(k as f64);
        let dir_kl = flat_log_beta - dir_log_beta
            + alpha
                .iter()
                .map(|&a| (a - 1.0) * (digamma_pos(a) - digamma_pos(a0)))
                .sum::<f64>();
        worst = worst.max((params.kl_to_flat() - dir_kl).abs());

        for (i, &a) in alpha.iter().enumerate() {
            worst = worst.max((params.mean()[i] - a / a0).abs());
            let want = digamma_pos(a) - digamma_pos(a0);
            worst = worst.max((params.expected_log_singleton(i) - want).abs());
        }

        // trigamma shows up in the gradients; cross-check the own-class
        // UPCE derivative against the Dirichlet form psi1(b0) - psi1(a_y)
        // only when the class sits alone in its group
        for (j, group) in partition.groups().iter().enumerate() {
            if group.len() == 1 {
                let y = LabelVector::singleton(group[0], k).expect("in range");
                let grad =
                    loss::grad_total(&params, &y, 0.0, RegMode::None).expect("valid");
                let want = trigamma_pos(a0) - trigamma_pos(alpha[group[0]]);
                worst = worst.max((grad.d_alpha[group[0]] - want).abs());
                let _ = j;
            }
        }
    }
    worst
}
