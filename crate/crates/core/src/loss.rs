//! The training objective: partial cross-entropy, its expectation under
//! the predicted grouped Dirichlet distribution (UPCE), the masked KL
//! regularizer, alternative regularizer modes, and analytic gradients
//! with respect to the concentration parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gdd::GddParams;
use crate::hyperdomain::{LabelKind, LabelVector};
use crate::special_fn::{digamma_pos, trigamma_pos};

/// Which regularizer the total loss uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RegMode {
    /// KL divergence from the label-masked params to the flat distribution.
    #[default]
    Kl,
    /// Negative entropy of the (unmasked) predicted distribution.
    Entropy,
    /// KL divergence of the masked singleton part only, as a Dirichlet.
    DirichletKl,
    /// No regularization.
    None,
}

impl std::fmt::Display for RegMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegMode::Kl => "kl",
            RegMode::Entropy => "entropy",
            RegMode::DirichletKl => "dirichlet-kl",
            RegMode::None => "none",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RegMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kl" => Ok(RegMode::Kl),
            "entropy" => Ok(RegMode::Entropy),
            "dirichlet-kl" => Ok(RegMode::DirichletKl),
            "none" => Ok(RegMode::None),
            other => Err(Error::Domain(format!(
                "unknown regularizer mode {other:?}; expected kl, entropy, dirichlet-kl, or none"
            ))),
        }
    }
}

/// The pieces of the objective for one example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub upce: f64,
    pub reg: f64,
    pub total: f64,
    pub lambda: f64,
}

/// Gradient of the total loss with respect to the concentration
/// parameters: one entry per class and one per group.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub d_alpha: Vec<f64>,
    pub d_c: Vec<f64>,
}

/// Partial cross-entropy of a probability vector against a label.
/// `clamped` is set when the labeled mass was at or below the floor and
/// the log had to be taken at the floor instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PceLoss {
    pub value: f64,
    pub clamped: bool,
}

const PCE_FLOOR: f64 = 1e-300;

/// Negative log of the probability mass on the labeled classes.
pub fn pce(p: &[f64], y: &LabelVector) -> Result<PceLoss> {
    if p.len() != y.len() {
        return Err(Error::Shape(format!(
            "probability vector has {} entries but the label has {}",
            p.len(),
            y.len()
        )));
    }
    let mass: f64 = p
        .iter()
        .zip(y.bits())
        .filter(|(_, &b)| b)
        .map(|(&pk, _)| pk)
        .sum();
    let clamped = !(mass > PCE_FLOOR);
    Ok(PceLoss { value: -mass.max(PCE_FLOOR).ln(), clamped })
}

/// Expected partial cross-entropy under the predicted distribution, in
/// closed form. For a composite label this is `psi(beta0) - psi(beta_IC)`;
/// for a singleton label `psi(beta0) - psi(alpha_IS)` minus the
/// containing group's `psi(beta_j) - psi(alpha-sum_j)`. Always positive.
pub fn upce(params: &GddParams, y: &LabelVector) -> Result<f64> {
    match y.kind(params.partition())? {
        LabelKind::Composite(j) => {
            Ok(digamma_pos(params.beta0()) - digamma_pos(params.beta(j)))
        }
        LabelKind::Singleton(class) => {
            let j = params.partition().containing_group(class)?;
            Ok(digamma_pos(params.beta0()) - digamma_pos(params.alpha()[class])
                - (digamma_pos(params.beta(j)) - digamma_pos(params.group_alpha_sum(j))))
        }
    }
}

/// Removes the ground-truth parameter from the params: a singleton label
/// resets its own alpha to one, a composite label zeroes its group's c.
/// Everything else is untouched.
pub fn masked_params(params: &GddParams, y: &LabelVector) -> Result<GddParams> {
    let mut alpha = params.alpha().to_vec();
    let mut c = params.c().to_vec();
    match y.kind(params.partition())? {
        LabelKind::Singleton(class) => alpha[class] = 1.0,
        LabelKind::Composite(j) => c[j] = 0.0,
    }
    Ok(params.with_params(alpha, c))
}

/// The default (KL) regularizer: divergence of the masked params from
/// the flat distribution.
pub fn reg(params: &GddParams, y: &LabelVector) -> Result<f64> {
    regularizer(params, y, RegMode::Kl)
}

/// Regularizer value under the chosen mode.
pub fn regularizer(params: &GddParams, y: &LabelVector, mode: RegMode) -> Result<f64> {
    match mode {
        RegMode::Kl => Ok(masked_params(params, y)?.kl_to_flat()),
        RegMode::Entropy => Ok(-params.entropy()),
        RegMode::DirichletKl => Ok(dirichlet_masked(params, y)?.kl_to_flat()),
        RegMode::None => Ok(0.0),
    }
}

/// Masking for the Dirichlet-only variant: every labeled class's alpha is
/// reset to one and all group concentrations are dropped, leaving a plain
/// Dirichlet over the singletons.
fn dirichlet_masked(params: &GddParams, y: &LabelVector) -> Result<GddParams> {
    y.kind(params.partition())?;
    let alpha: Vec<f64> = params
        .alpha()
        .iter()
        .zip(y.bits())
        .map(|(&a, &bit)| if bit { 1.0 } else { a })
        .collect();
    let c = vec![0.0; params.num_groups()];
    Ok(params.with_params(alpha, c))
}

/// UPCE plus `lambda` times the regularizer.
pub fn total_loss(
    params: &GddParams,
    y: &LabelVector,
    lambda: f64,
    mode: RegMode,
) -> Result<LossBreakdown> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    let upce = upce(params, y)?;
    let reg = regularizer(params, y, mode)?;
    Ok(LossBreakdown { upce, reg, total: upce + lambda * reg, lambda })
}

/// Analytic gradient of `total_loss` with respect to alpha and c.
pub fn grad_total(
    params: &GddParams,
    y: &LabelVector,
    lambda: f64,
    mode: RegMode,
) -> Result<LossGrad> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    let kind = y.kind(params.partition())?;
    let mut grad = upce_grad(params, kind);
    if lambda > 0.0 {
        let (ra, rc) = reg_grad(params, y, kind, mode)?;
        for (g, r) in grad.d_alpha.iter_mut().zip(ra) {
            *g += lambda * r;
        }
        for (g, r) in grad.d_c.iter_mut().zip(rc) {
            *g += lambda * r;
        }
    }
    Ok(grad)
}

/// Trigamma-based partial derivatives of the UPCE closed form.
fn upce_grad(params: &GddParams, kind: LabelKind) -> LossGrad {
    let partition = params.partition();
    let k = params.k();
    let eta = params.num_groups();
    let t_beta0 = trigamma_pos(params.beta0());
    let mut d_alpha = vec![t_beta0; k];
    let mut d_c = vec![t_beta0; eta];
    match kind {
        LabelKind::Singleton(class) => {
            let g = partition.containing_group(class).expect("class in range");
            let t_beta_g = trigamma_pos(params.beta(g));
            let t_group = trigamma_pos(params.group_alpha_sum(g));
            for &member in partition.group(g) {
                d_alpha[member] += t_group - t_beta_g;
            }
            d_alpha[class] -= trigamma_pos(params.alpha()[class]);
            d_c[g] -= t_beta_g;
        }
        LabelKind::Composite(j) => {
            let t_beta_j = trigamma_pos(params.beta(j));
            for &member in partition.group(j) {
                d_alpha[member] -= t_beta_j;
            }
            d_c[j] -= t_beta_j;
        }
    }
    LossGrad { d_alpha, d_c }
}

/// Gradient of the regularizer with respect to the *unmasked* params:
/// the contraction below is evaluated at the masked (or raw) params and
/// the masked slots, being constants, get zero.
fn reg_grad(
    params: &GddParams,
    y: &LabelVector,
    kind: LabelKind,
    mode: RegMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    match mode {
        RegMode::None => Ok((vec![0.0; params.k()], vec![0.0; params.num_groups()])),
        RegMode::Entropy => {
            // Reg = -H = A(theta) - theta . grad A, so grad Reg is the
            // Fisher contraction at the raw params with nothing masked.
            Ok(fisher_theta_product(params))
        }
        RegMode::Kl => {
            let masked = masked_params(params, y)?;
            let (mut da, mut dc) = fisher_theta_product(&masked);
            match kind {
                LabelKind::Singleton(class) => da[class] = 0.0,
                LabelKind::Composite(j) => dc[j] = 0.0,
            }
            Ok((da, dc))
        }
        RegMode::DirichletKl => {
            let masked = dirichlet_masked(params, y)?;
            let (mut da, _) = fisher_theta_product(&masked);
            for (slot, &bit) in da.iter_mut().zip(y.bits()) {
                if bit {
                    *slot = 0.0;
                }
            }
            // the Dirichlet variant ignores the group concentrations
            Ok((da, vec![0.0; params.num_groups()]))
        }
    }
}

/// The product of the log-normalizer Hessian with the natural parameters
/// (alpha - 1, c). Because the flat distribution's natural parameters are
/// zero, this single contraction is both the gradient of the KL to flat
/// and the gradient of the negative entropy.
fn fisher_theta_product(params: &GddParams) -> (Vec<f64>, Vec<f64>) {
    let partition = params.partition();
    let eta = params.num_groups();
    let rho: Vec<f64> = params.alpha().iter().map(|&a| a - 1.0).collect();
    let group_rho: Vec<f64> = partition
        .groups()
        .iter()
        .map(|g| g.iter().map(|&l| rho[l]).sum())
        .collect();
    let total: f64 = group_rho.iter().sum::<f64>() + params.c().iter().sum::<f64>();
    let t_beta0 = trigamma_pos(params.beta0());

    let d_c: Vec<f64> = (0..eta)
        .map(|j| {
            (group_rho[j] + params.c()[j]) * trigamma_pos(params.beta(j)) - total * t_beta0
        })
        .collect();

    let d_alpha: Vec<f64> = (0..params.k())
        .map(|class| {
            let j = partition.containing_group(class).expect("class in range");
            rho[class] * trigamma_pos(params.alpha()[class])
                - group_rho[j] * trigamma_pos(params.group_alpha_sum(j))
                + (group_rho[j] + params.c()[j]) * trigamma_pos(params.beta(j))
                - total * t_beta0
        })
        .collect();

    (d_alpha, d_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperdomain::Partition;
    use std::sync::Arc;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn part(k: usize, groups: &[&[usize]]) -> Arc<Partition> {
        Arc::new(Partition::new(k, groups.iter().map(|g| g.to_vec()).collect()).unwrap())
    }

    fn gdd(alpha: &[f64], c: &[f64], partition: &Arc<Partition>) -> GddParams {
        GddParams::new(alpha.to_vec(), c.to_vec(), Arc::clone(partition)).unwrap()
    }

    fn label(bits: &[u8]) -> LabelVector {
        LabelVector::new(bits.iter().map(|&b| b != 0).collect()).unwrap()
    }

    #[test]
    fn pce_examples() {
        let out = pce(&[0.5, 0.25, 0.25], &label(&[1, 0, 0])).unwrap();
        assert!((out.value - LN_2).abs() < 1e-12);
        assert!(!out.clamped);

        let full = pce(&[0.0, 0.5, 0.5], &label(&[0, 1, 1])).unwrap();
        assert!(full.value.abs() < 1e-12);

        // singleton label reduces to ordinary cross-entropy
        let p = [0.2f64, 0.5, 0.3];
        let ce = -p[1].ln();
        assert!((pce(&p, &label(&[0, 1, 0])).unwrap().value - ce).abs() < 1e-12);

        let clamped = pce(&[0.0, 1.0], &label(&[1, 0])).unwrap();
        assert!(clamped.clamped);
        assert!(clamped.value.is_finite());
    }

    #[test]
    fn upce_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        // composite branch: psi(6) - psi(5) = 1/5
        let g = gdd(&[1.0, 1.0, 1.0], &[0.0, 3.0], &p);
        assert!((upce(&g, &label(&[0, 1, 1])).unwrap() - 0.2).abs() < 1e-12);

        // UCE reduction: psi(4) - psi(2) = 5/6
        let d = gdd(&[2.0, 1.0, 1.0], &[0.0, 0.0], &p);
        assert!((upce(&d, &label(&[1, 0, 0])).unwrap() - 5.0 / 6.0).abs() < 1e-12);

        // singleton label whose own group carries c: psi(5) - psi(3) = 7/12
        let q = part(3, &[&[0, 1], &[2]]);
        let h = gdd(&[2.0, 1.0, 1.0], &[1.0, 0.0], &q);
        assert!((upce(&h, &label(&[1, 0, 0])).unwrap() - 7.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn uce_reduction_is_exact() {
        // c = 0 and a singleton label: the group terms cancel bit-exactly
        let p = part(4, &[&[0, 1], &[2, 3]]);
        let alpha = [2.7, 1.3, 4.1, 0.9];
        let g = gdd(&alpha, &[0.0, 0.0], &p);
        let a0: f64 = g.beta0();
        for class in 0..4 {
            let y = LabelVector::singleton(class, 4).unwrap();
            let want = digamma_pos(a0) - digamma_pos(alpha[class]);
            assert_eq!(upce(&g, &y).unwrap(), want);
        }
    }

    #[test]
    fn masked_params_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let g = gdd(&[4.0, 1.0, 1.0], &[0.0, 24.0], &p);

        let comp = masked_params(&g, &label(&[0, 1, 1])).unwrap();
        assert_eq!(comp.alpha(), &[4.0, 1.0, 1.0]);
        assert_eq!(comp.c(), &[0.0, 0.0]);

        let single = masked_params(&g, &label(&[1, 0, 0])).unwrap();
        assert_eq!(single.alpha(), &[1.0, 1.0, 1.0]);
        assert_eq!(single.c(), &[0.0, 24.0]);

        let flat = GddParams::flat(Arc::clone(&p));
        let still_flat = masked_params(&flat, &label(&[0, 1, 1])).unwrap();
        assert_eq!(still_flat.alpha(), &[1.0, 1.0, 1.0]);
        assert_eq!(still_flat.c(), &[0.0, 0.0]);
    }

    #[test]
    fn reg_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::flat(Arc::clone(&p));
        assert!(reg(&flat, &label(&[0, 1, 1])).unwrap().abs() < 1e-12);

        // evidence concentrated entirely on the ground truth is not penalized
        let g = gdd(&[50.0, 1.0, 1.0], &[0.0, 0.0], &p);
        assert!(reg(&g, &label(&[1, 0, 0])).unwrap().abs() < 1e-12);

        // KL(Dir(1,2,1) || Dir(1,1,1)) = ln 3 - 5/6
        let q = part(3, &[&[0], &[1], &[2]]);
        let h = gdd(&[1.0, 2.0, 1.0], &[0.0; 3], &q);
        let want = 3.0f64.ln() - 5.0 / 6.0;
        assert!((reg(&h, &label(&[1, 0, 0])).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn regularizer_modes() {
        let p = part(3, &[&[0], &[1, 2]]);
        let g = gdd(&[3.0, 1.5, 1.0], &[0.0, 2.0], &p);
        let y = label(&[0, 1, 1]);
        assert_eq!(
            regularizer(&g, &y, RegMode::None).unwrap(),
            0.0
        );
        let ent = regularizer(&g, &y, RegMode::Entropy).unwrap();
        assert!((ent + g.entropy()).abs() < 1e-12);
        // Dirichlet variant masks the labeled classes and drops c
        let dir = regularizer(&g, &y, RegMode::DirichletKl).unwrap();
        let masked = gdd(&[3.0, 1.0, 1.0], &[0.0, 0.0], &p);
        assert!((dir - masked.kl_to_flat()).abs() < 1e-12);
    }

    #[test]
    fn total_loss_examples() {
        let p = part(2, &[&[0], &[1]]);
        let flat = GddParams::flat(Arc::clone(&p));
        let y = label(&[1, 0]);

        let no_reg = total_loss(&flat, &y, 0.0, RegMode::Kl).unwrap();
        assert_eq!(no_reg.total, no_reg.upce);

        let b = total_loss(&flat, &y, 0.5, RegMode::Kl).unwrap();
        assert!((b.upce - 1.0).abs() < 1e-12);
        assert!(b.reg.abs() < 1e-12);
        assert!((b.total - 1.0).abs() < 1e-12);

        let g = gdd(&[3.0, 2.0], &[0.0, 0.0], &p);
        let t = total_loss(&g, &y, 0.3, RegMode::Kl).unwrap();
        assert!((t.total - (t.upce + 0.3 * t.reg)).abs() < 1e-12);

        assert!(total_loss(&flat, &y, -1.0, RegMode::Kl).is_err());
    }

    #[test]
    fn upce_grad_example_values() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::flat(Arc::clone(&p));
        let y = label(&[1, 0, 0]);
        let grad = grad_total(&flat, &y, 0.0, RegMode::Kl).unwrap();
        // the label is outside group 1, so d/dc_1 = trigamma(beta0) = trigamma(3)
        let t3 = trigamma_pos(3.0);
        assert!((grad.d_c[1] - t3).abs() < 1e-12);
        assert!((t3 - 0.394_934_066_848_226_4).abs() < 1e-9);
        assert!(grad.d_c[1] > 0.0);
    }

    #[test]
    fn grad_matches_finite_differences_all_modes() {
        let p = part(5, &[&[0, 1], &[2, 3], &[4]]);
        let alpha = [2.0, 1.3, 0.8, 3.5, 1.1];
        let c = [1.7, 0.4, 0.0];
        let labels = [
            label(&[0, 1, 0, 0, 0]),
            label(&[1, 1, 0, 0, 0]),
            label(&[0, 0, 1, 1, 0]),
            label(&[0, 0, 0, 0, 1]),
        ];
        for mode in [RegMode::Kl, RegMode::Entropy, RegMode::DirichletKl, RegMode::None] {
            for y in &labels {
                let g = gdd(&alpha, &c, &p);
                let lambda = 0.25;
                let grad = grad_total(&g, y, lambda, mode).unwrap();
                for class in 0..5 {
                    let fd = central_diff(|v| {
                        let mut a = alpha.to_vec();
                        a[class] = v;
                        total_loss(&gdd(&a, &c, &p), y, lambda, mode).unwrap().total
                    }, alpha[class]);
                    let err = (grad.d_alpha[class] - fd).abs() / fd.abs().max(1.0);
                    assert!(err < 1e-5, "mode {mode:?} d_alpha[{class}]: {} vs {fd}", grad.d_alpha[class]);
                }
                for j in 0..2 {
                    let fd = central_diff(|v| {
                        let mut cc = c.to_vec();
                        cc[j] = v;
                        total_loss(&gdd(&alpha, &cc, &p), y, lambda, mode).unwrap().total
                    }, c[j]);
                    let err = (grad.d_c[j] - fd).abs() / fd.abs().max(1.0);
                    assert!(err < 1e-5, "mode {mode:?} d_c[{j}]: {} vs {fd}", grad.d_c[j]);
                }
            }
        }
    }

    fn central_diff(f: impl Fn(f64) -> f64, at: f64) -> f64 {
        let h = 1e-5 * at.abs().max(1.0);
        (f(at + h) - f(at - h)) / (2.0 * h)
    }
}
