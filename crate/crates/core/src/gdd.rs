//! The grouped Dirichlet distribution: density, normalizer, moments,
//! expected-log statistics, entropy, KL divergence to the flat
//! distribution, and sampling.
//!
//! The distribution lives on the probability simplex over the class
//! domain. On top of per-class concentrations `alpha` it carries one
//! concentration `c` per group of the partition; with all `c` zero it
//! reduces to an ordinary Dirichlet. The normalizer factorizes into
//! within-group beta functions times a group-level beta, which is what
//! makes every formula here closed-form.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::hyperdomain::Partition;
use crate::special_fn::{digamma_pos, log_beta_pos};

/// Tolerance on `|sum - 1|` for points claimed to lie on the simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Concentration parameters of a grouped Dirichlet distribution over a
/// fixed partition. `alpha` has one entry per class (strictly positive);
/// `c` has one entry per group (non-negative). The evidence mapping only
/// ever puts c on multi-class groups, but the distribution itself is
/// well-defined for any non-negative c. Group sums are precomputed at
/// construction.
#[derive(Debug, Clone)]
pub struct GddParams {
    alpha: Vec<f64>,
    c: Vec<f64>,
    partition: Arc<Partition>,
    group_alpha: Vec<f64>,
    beta: Vec<f64>,
    beta0: f64,
}

impl GddParams {
    pub fn new(alpha: Vec<f64>, c: Vec<f64>, partition: Arc<Partition>) -> Result<Self> {
        if alpha.len() != partition.k() {
            return Err(Error::Shape(format!(
                "alpha has {} entries but the domain has {} classes",
                alpha.len(),
                partition.k()
            )));
        }
        if c.len() != partition.num_groups() {
            return Err(Error::Shape(format!(
                "c has {} entries but the partition has {} groups",
                c.len(),
                partition.num_groups()
            )));
        }
        if let Some(&a) = alpha.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::Domain(format!(
                "alpha entries must be finite and positive, got {a}"
            )));
        }
        if let Some(&cj) = c.iter().find(|&&cj| !(cj >= 0.0) || !cj.is_finite()) {
            return Err(Error::Domain(format!(
                "c entries must be finite and non-negative, got {cj}"
            )));
        }
        Ok(Self::assemble(alpha, c, partition))
    }

    /// The flat distribution: all alpha one, all c zero (uniform on the
    /// simplex).
    pub fn flat(partition: Arc<Partition>) -> Self {
        let alpha = vec![1.0; partition.k()];
        let c = vec![0.0; partition.num_groups()];
        Self::assemble(alpha, c, partition)
    }

    /// Maps an evidence vector (singleton entries followed by one entry
    /// per multi-class group) to concentration parameters: each class
    /// gets evidence plus one, each multi-class group gets its evidence
    /// as-is, singleton groups stay at zero.
    pub fn from_evidence(evidence: &[f64], partition: Arc<Partition>) -> Result<Self> {
        if evidence.len() != partition.evidence_width() {
            return Err(Error::Shape(format!(
                "evidence has {} entries but the domain needs {}",
                evidence.len(),
                partition.evidence_width()
            )));
        }
        if let Some(&e) = evidence.iter().find(|&&e| !(e >= 0.0) || !e.is_finite()) {
            return Err(Error::Domain(format!(
                "evidence must be finite and non-negative, got {e}"
            )));
        }
        let k = partition.k();
        let alpha: Vec<f64> = evidence[..k].iter().map(|&e| e + 1.0).collect();
        let mut c = vec![0.0; partition.num_groups()];
        for (slot, &j) in partition.multiclass_groups().iter().enumerate() {
            c[j] = evidence[k + slot];
        }
        Ok(Self::assemble(alpha, c, partition))
    }

    fn assemble(alpha: Vec<f64>, c: Vec<f64>, partition: Arc<Partition>) -> Self {
        let group_alpha: Vec<f64> = partition
            .groups()
            .iter()
            .map(|g| g.iter().map(|&l| alpha[l]).sum())
            .collect();
        let beta: Vec<f64> = group_alpha.iter().zip(&c).map(|(&a, &cj)| a + cj).collect();
        let beta0 = beta.iter().sum();
        Self { alpha, c, partition, group_alpha, beta, beta0 }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn partition(&self) -> &Arc<Partition> {
        &self.partition
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    pub fn num_groups(&self) -> usize {
        self.partition.num_groups()
    }

    /// Sum of alpha over the members of group `j`.
    pub fn group_alpha_sum(&self, j: usize) -> f64 {
        self.group_alpha[j]
    }

    /// Group concentration total: alpha sum of group `j` plus its c.
    pub fn beta(&self, j: usize) -> f64 {
        self.beta[j]
    }

    /// Sum of all betas, the total concentration.
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// Returns params identical to `self` except for the given slots.
    /// Used by the loss masking; inputs come from an already-valid set of
    /// params so no re-validation is needed.
    pub(crate) fn with_params(&self, alpha: Vec<f64>, c: Vec<f64>) -> Self {
        Self::assemble(alpha, c, Arc::clone(&self.partition))
    }

    /// Log of the normalization constant: within-group log-betas plus the
    /// group-level log-beta.
    pub fn log_normalizer(&self) -> f64 {
        let mut acc = 0.0;
        let mut buf: Vec<f64> = Vec::new();
        for group in self.partition.groups() {
            buf.clear();
            buf.extend(group.iter().map(|&l| self.alpha[l]));
            acc += log_beta_pos(&buf);
        }
        acc + log_beta_pos(&self.beta)
    }

    /// Log density at a point of the open simplex.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.k() {
            return Err(Error::Shape(format!(
                "point has {} coordinates but the domain has {} classes",
                x.len(),
                self.k()
            )));
        }
        if let Some(&v) = x.iter().find(|&&v| !(v > 0.0)) {
            return Err(Error::Domain(format!(
                "point must have strictly positive coordinates, got {v}"
            )));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Domain(format!(
                "point coordinates sum to {sum}, not 1"
            )));
        }
        let mut acc = -self.log_normalizer();
        for (xk, &ak) in x.iter().zip(&self.alpha) {
            acc += (ak - 1.0) * xk.ln();
        }
        for (j, group) in self.partition.groups().iter().enumerate() {
            if self.c[j] != 0.0 {
                let w: f64 = group.iter().map(|&l| x[l]).sum();
                acc += self.c[j] * w.ln();
            }
        }
        Ok(acc)
    }

    /// Expected class-probability vector. Each coordinate is
    /// `alpha_k / beta0` scaled by its group's `beta / alpha-sum`.
    pub fn mean(&self) -> Vec<f64> {
        (0..self.k())
            .map(|k| {
                let j = self.partition.containing_group(k).expect("class in range");
                (self.alpha[k] / self.beta0) * (self.beta[j] / self.group_alpha[j])
            })
            .collect()
    }

    /// Expectation of the log of one class probability.
    pub fn expected_log_singleton(&self, class: usize) -> f64 {
        assert!(class < self.k(), "class index out of range");
        let j = self.partition.containing_group(class).expect("class in range");
        digamma_pos(self.alpha[class]) - digamma_pos(self.beta0)
            + (digamma_pos(self.beta[j]) - digamma_pos(self.group_alpha[j]))
    }

    /// Expectation of the log of one group's total probability.
    pub fn expected_log_group(&self, j: usize) -> f64 {
        assert!(j < self.num_groups(), "group index out of range");
        digamma_pos(self.beta[j]) - digamma_pos(self.beta0)
    }

    /// Differential entropy.
    pub fn entropy(&self) -> f64 {
        let mut acc = self.log_normalizer();
        for (k, &ak) in self.alpha.iter().enumerate() {
            if ak != 1.0 {
                acc -= (ak - 1.0) * self.expected_log_singleton(k);
            }
        }
        for (j, &cj) in self.c.iter().enumerate() {
            if cj != 0.0 {
                acc -= cj * self.expected_log_group(j);
            }
        }
        acc
    }

    /// KL divergence from `self` to the flat distribution on the same
    /// partition. Zero exactly when the params are flat.
    pub fn kl_to_flat(&self) -> f64 {
        let flat = Self::flat(Arc::clone(&self.partition));
        let mut acc = flat.log_normalizer() - self.log_normalizer();
        for (k, &ak) in self.alpha.iter().enumerate() {
            if ak != 1.0 {
                acc += (ak - 1.0) * self.expected_log_singleton(k);
            }
        }
        for (j, &cj) in self.c.iter().enumerate() {
            if cj != 0.0 {
                acc += cj * self.expected_log_group(j);
            }
        }
        acc
    }

    /// Draws one point from the distribution: group weights from a
    /// Dirichlet over the betas, within-group coordinates from a
    /// Dirichlet over that group's alphas, multiplied together. The
    /// factorized normalizer makes this construction exact.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let weights = dirichlet_draw(&self.beta, rng);
        let mut x = vec![0.0; self.k()];
        let mut buf: Vec<f64> = Vec::new();
        for (j, group) in self.partition.groups().iter().enumerate() {
            if group.len() == 1 {
                x[group[0]] = weights[j];
            } else {
                buf.clear();
                buf.extend(group.iter().map(|&l| self.alpha[l]));
                let q = dirichlet_draw(&buf, rng);
                for (&l, &ql) in group.iter().zip(&q) {
                    x[l] = weights[j] * ql;
                }
            }
        }
        x
    }

    /// Class with the largest projected (mean) probability; ties go to
    /// the lowest index.
    pub fn projected_prediction(&self) -> usize {
        let mean = self.mean();
        let mut best = 0usize;
        for (k, &p) in mean.iter().enumerate() {
            if p > mean[best] {
                best = k;
            }
        }
        best
    }
}

/// One Dirichlet draw via normalized gamma variates.
fn dirichlet_draw<R: Rng + ?Sized>(shapes: &[f64], rng: &mut R) -> Vec<f64> {
    let mut draws: Vec<f64> = shapes
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng))
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        for d in &mut draws {
            *d /= total;
        }
    } else {
        // all gamma draws underflowed to zero; fall back to uniform mass
        let u = 1.0 / draws.len() as f64;
        draws.iter_mut().for_each(|d| *d = u);
    }
    draws
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperdomain::Partition;
    use crate::util::stream_rng;
    use proptest::prelude::*;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn part(k: usize, groups: &[&[usize]]) -> Arc<Partition> {
        Arc::new(Partition::new(k, groups.iter().map(|g| g.to_vec()).collect()).unwrap())
    }

    fn gdd(alpha: &[f64], c: &[f64], partition: &Arc<Partition>) -> GddParams {
        GddParams::new(alpha.to_vec(), c.to_vec(), Arc::clone(partition)).unwrap()
    }

    /// Closed-form Dirichlet quantities used as the independent route for
    /// the reduction checks.
    mod dirichlet {
        use crate::special_fn::{digamma_pos, lgamma_pos};

        pub fn log_beta(alpha: &[f64]) -> f64 {
            let a0: f64 = alpha.iter().sum();
            alpha.iter().map(|&a| lgamma_pos(a)).sum::<f64>() - lgamma_pos(a0)
        }

        pub fn log_pdf(alpha: &[f64], x: &[f64]) -> f64 {
            let mut acc = -log_beta(alpha);
            for (&a, &v) in alpha.iter().zip(x) {
                acc += (a - 1.0) * v.ln();
            }
            acc
        }

        pub fn entropy(alpha: &[f64]) -> f64 {
            let a0: f64 = alpha.iter().sum();
            let k = alpha.len() as f64;
            log_beta(alpha) + (a0 - k) * digamma_pos(a0)
                - alpha
                    .iter()
                    .map(|&a| (a - 1.0) * digamma_pos(a))
                    .sum::<f64>()
        }

        pub fn kl_to_flat(alpha: &[f64]) -> f64 {
            let a0: f64 = alpha.iter().sum();
            let k = alpha.len();
            log_beta(&vec![1.0; k]) - log_beta(alpha)
                + alpha
                    .iter()
                    .map(|&a| (a - 1.0) * (digamma_pos(a) - digamma_pos(a0)))
                    .sum::<f64>()
        }
    }

    #[test]
    fn from_evidence_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::from_evidence(&[0.0; 4], Arc::clone(&p)).unwrap();
        assert_eq!(flat.alpha(), &[1.0, 1.0, 1.0]);
        assert_eq!(flat.c(), &[0.0, 0.0]);

        let g = GddParams::from_evidence(&[3.0, 0.0, 0.0, 24.0], Arc::clone(&p)).unwrap();
        assert_eq!(g.alpha(), &[4.0, 1.0, 1.0]);
        assert_eq!(g.c(), &[0.0, 24.0]);
        assert_eq!(g.beta(1), 26.0);
        assert_eq!(g.beta0(), 30.0);

        let q = part(3, &[&[0], &[1], &[2]]);
        let d = GddParams::from_evidence(&[1.0, 2.0, 3.0], Arc::clone(&q)).unwrap();
        assert_eq!(d.alpha(), &[2.0, 3.0, 4.0]);
        assert_eq!(d.c(), &[0.0, 0.0, 0.0]);

        assert!(GddParams::from_evidence(&[-1.0, 0.0, 0.0, 0.0], p).is_err());
    }

    #[test]
    fn params_validation() {
        let p = part(3, &[&[0], &[1, 2]]);
        assert!(GddParams::new(vec![1.0, 0.0, 1.0], vec![0.0, 0.0], Arc::clone(&p)).is_err());
        assert!(GddParams::new(vec![1.0, 1.0, 1.0], vec![0.0, -1.0], Arc::clone(&p)).is_err());
        assert!(GddParams::new(vec![1.0, 1.0], vec![0.0, 0.0], p).is_err());
    }

    #[test]
    fn log_normalizer_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::flat(Arc::clone(&p));
        assert!((flat.log_normalizer() + LN_2).abs() < 1e-12);

        // c = 0 reduces to the Dirichlet log-beta
        let g = gdd(&[2.0, 1.5, 0.5], &[0.0, 0.0], &p);
        assert!((g.log_normalizer() - dirichlet::log_beta(&[2.0, 1.5, 0.5])).abs() < 1e-12);

        let q = part(2, &[&[0], &[1]]);
        let d = gdd(&[2.0, 1.0], &[0.0, 0.0], &q);
        assert!((d.log_normalizer() + LN_2).abs() < 1e-12);
    }

    #[test]
    fn log_pdf_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::flat(Arc::clone(&p));
        let third = 1.0 / 3.0;
        assert!((flat.log_pdf(&[third, third, third]).unwrap() - LN_2).abs() < 1e-12);

        let d = gdd(&[2.0, 1.0, 1.0], &[0.0, 0.0], &p);
        let lp = d.log_pdf(&[0.5, 0.25, 0.25]).unwrap();
        assert!((lp - 3.0f64.ln()).abs() < 1e-12);

        assert!(flat.log_pdf(&[0.5, 0.5, 0.5]).is_err());
        assert!(flat.log_pdf(&[1.0, 0.0, 0.0]).is_err());
        assert!(flat.log_pdf(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn mean_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::flat(Arc::clone(&p));
        for m in flat.mean() {
            assert!((m - 1.0 / 3.0).abs() < 1e-12);
        }

        let d = gdd(&[2.0, 1.0, 1.0], &[0.0, 0.0], &p);
        let m = d.mean();
        assert!((m[0] - 0.5).abs() < 1e-12);
        assert!((m[1] - 0.25).abs() < 1e-12);

        let g = gdd(&[1.0, 1.0, 1.0], &[0.0, 3.0], &p);
        let m = g.mean();
        assert!((m[0] - 1.0 / 6.0).abs() < 1e-12);
        assert!((m[1] - 5.0 / 12.0).abs() < 1e-12);
        assert!((m[2] - 5.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn expected_log_examples() {
        let p3 = part(3, &[&[0], &[1], &[2]]);
        let d = gdd(&[2.0, 1.0, 1.0], &[0.0, 0.0, 0.0], &p3);
        assert!((d.expected_log_singleton(0) + 5.0 / 6.0).abs() < 1e-12);

        let p2 = part(2, &[&[0], &[1]]);
        let flat2 = GddParams::flat(Arc::clone(&p2));
        assert!((flat2.expected_log_singleton(0) + 1.0).abs() < 1e-12);

        let p = part(3, &[&[0], &[1, 2]]);
        let flat3 = GddParams::flat(Arc::clone(&p));
        assert!((flat3.expected_log_group(1) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let p2 = part(2, &[&[0], &[1]]);
        let flat = GddParams::flat(Arc::clone(&p2));
        assert!(flat.entropy().abs() < 1e-12);

        let d = gdd(&[2.0, 1.0], &[0.0, 0.0], &p2);
        assert!((d.entropy() - (-LN_2 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn kl_to_flat_examples() {
        let p = part(3, &[&[0], &[1, 2]]);
        let flat = GddParams::flat(Arc::clone(&p));
        assert!(flat.kl_to_flat().abs() < 1e-15);

        let p2 = part(2, &[&[0], &[1]]);
        let d = gdd(&[2.0, 1.0], &[0.0, 0.0], &p2);
        assert!((d.kl_to_flat() - (LN_2 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_reduction_closed_forms() {
        // with c = 0 every quantity must match the Dirichlet closed forms
        let p = part(4, &[&[0, 1], &[2, 3]]);
        let alpha = [2.5, 1.0, 0.7, 3.2];
        let g = gdd(&alpha, &[0.0, 0.0], &p);
        assert!((g.log_normalizer() - dirichlet::log_beta(&alpha)).abs() < 1e-10);
        let x = [0.3, 0.2, 0.1, 0.4];
        assert!((g.log_pdf(&x).unwrap() - dirichlet::log_pdf(&alpha, &x)).abs() < 1e-10);
        let a0: f64 = alpha.iter().sum();
        for (k, &ak) in alpha.iter().enumerate() {
            assert!((g.mean()[k] - ak / a0).abs() < 1e-10);
            let want = digamma_pos(ak) - digamma_pos(a0);
            assert!((g.expected_log_singleton(k) - want).abs() < 1e-10);
        }
        assert!((g.entropy() - dirichlet::entropy(&alpha)).abs() < 1e-10);
        assert!((g.kl_to_flat() - dirichlet::kl_to_flat(&alpha)).abs() < 1e-10);
    }

    #[test]
    fn expected_log_singleton_is_negative() {
        let p = part(3, &[&[0], &[1, 2]]);
        let g = gdd(&[4.0, 1.0, 2.5], &[0.0, 7.0], &p);
        for k in 0..3 {
            assert!(g.expected_log_singleton(k) < 0.0);
        }
    }

    #[test]
    fn sample_stays_on_simplex() {
        let p = part(3, &[&[0], &[1, 2]]);
        let g = gdd(&[4.0, 1.0, 1.0], &[0.0, 24.0], &p);
        let mut rng = stream_rng(17, 0);
        for _ in 0..10_000 {
            let x = g.sample(&mut rng);
            let sum: f64 = x.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(x.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn sample_mean_matches_analytic_mean() {
        let p = part(3, &[&[0], &[1, 2]]);
        let g = gdd(&[1.0, 1.0, 1.0], &[0.0, 3.0], &p);
        let mut rng = stream_rng(5, 0);
        let n = 200_000;
        let mut acc = vec![0.0; 3];
        for _ in 0..n {
            let x = g.sample(&mut rng);
            for (a, v) in acc.iter_mut().zip(x) {
                *a += v;
            }
        }
        for (a, m) in acc.iter().zip(g.mean()) {
            assert!((a / n as f64 - m).abs() < 1e-2);
        }
    }

    #[test]
    fn sample_with_zero_c_matches_direct_dirichlet() {
        let p = part(3, &[&[0], &[1, 2]]);
        let alpha = [2.0, 3.0, 1.0];
        let g = gdd(&alpha, &[0.0, 0.0], &p);
        let n = 200_000;

        let mut rng = stream_rng(11, 0);
        let mut mean_g = vec![0.0; 3];
        let mut second_g = vec![0.0; 3];
        for _ in 0..n {
            let x = g.sample(&mut rng);
            for i in 0..3 {
                mean_g[i] += x[i];
                second_g[i] += x[i] * x[i];
            }
        }

        let mut rng = stream_rng(11, 1);
        let mut mean_d = vec![0.0; 3];
        let mut second_d = vec![0.0; 3];
        for _ in 0..n {
            let x = super::dirichlet_draw(&alpha, &mut rng);
            for i in 0..3 {
                mean_d[i] += x[i];
                second_d[i] += x[i] * x[i];
            }
        }

        for i in 0..3 {
            assert!((mean_g[i] / n as f64 - mean_d[i] / n as f64).abs() < 1e-2);
            assert!((second_g[i] / n as f64 - second_d[i] / n as f64).abs() < 1e-2);
        }
    }

    #[test]
    fn projected_prediction_examples() {
        let p3 = part(3, &[&[0], &[1], &[2]]);
        let d = gdd(&[2.0, 1.0, 1.0], &[0.0, 0.0, 0.0], &p3);
        assert_eq!(d.projected_prediction(), 0);

        let p = part(3, &[&[0], &[1, 2]]);
        let g = gdd(&[1.0, 1.0, 1.0], &[0.0, 3.0], &p);
        assert_eq!(g.projected_prediction(), 1);

        let flat = GddParams::flat(p);
        assert_eq!(flat.projected_prediction(), 0);
    }

    proptest! {
        #[test]
        fn mean_is_probability_vector(
            alpha in proptest::collection::vec(0.05f64..10.0, 5),
            c1 in 0.0f64..10.0,
            c2 in 0.0f64..10.0,
        ) {
            let p = part(5, &[&[0, 1], &[2, 3], &[4]]);
            let g = gdd(&alpha, &[c1, c2, 0.0], &p);
            let mean = g.mean();
            prop_assert!(mean.iter().all(|&m| m >= 0.0));
            let sum: f64 = mean.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn kl_to_flat_non_negative(
            alpha in proptest::collection::vec(0.1f64..8.0, 3),
            c in 0.0f64..8.0,
        ) {
            let p = part(3, &[&[0], &[1, 2]]);
            let g = gdd(&alpha, &[0.0, c], &p);
            prop_assert!(g.kl_to_flat() >= -1e-10);
        }
    }
}
