//! Flow training: forward-KL from samples (maximum likelihood) and reverse
//! KL against an unnormalized target, with Adam updates.
//!
//! Gradients come from per-sample tapes ([`crate::autodiff`]); batch members
//! are independent given the parameters, so the batch fans out to worker
//! threads and gradients are then summed in sample-index order, keeping the
//! result bit-identical regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::autodiff::Tape;
use crate::flow::{std_normal_logpdf, FlowModel};
use crate::gaussian::norm_quantile;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::targets::TargetDensity;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training divergence: {0}")]
    Divergence(String),
    #[error("training divergence at step {step}: {detail}")]
    DivergenceAtStep { step: usize, detail: String },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("objective/task mismatch: {0}")]
    TaskMismatch(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Maximize likelihood of provided target samples.
    ForwardKl,
    /// Minimize `E_z[-log_det T(z) - log pi(T(z))]` over base samples.
    ReverseKl,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub objective: Objective,
    pub batch_size: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(objective: Objective, steps: usize) -> Self {
        TrainConfig {
            objective,
            batch_size: 256,
            steps,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 || self.steps == 0 {
            return Err(TrainError::InvalidConfig(
                "batch size and step count must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(TrainError::InvalidConfig("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// What the objective trains against.
pub enum TrainTask<'a> {
    /// Exact samples from the target (forward KL).
    Samples(&'a Matrix),
    /// Unnormalized target density (reverse KL).
    Target(&'a TargetDensity),
}

/// Adam optimizer state.
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
}

impl Adam {
    pub fn new(dim: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Adam {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
            beta1,
            beta2,
            epsilon,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        assert_eq!(params.len(), grads.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Negative log-likelihood of one sample plus its parameter gradient.
fn nll_grad_one(
    flow: &FlowModel,
    layout: &[(std::ops::Range<usize>, std::ops::Range<usize>)],
    flat: &[f64],
    x: &[f64],
) -> (f64, Vec<f64>) {
    let tape = Tape::with_capacity(flat.len() * 4);
    let pvars: Vec<_> = flat.iter().map(|&p| tape.var(p)).collect();
    let xvars: Vec<_> = x.iter().map(|&v| tape.var(v)).collect();
    let (z, log_det_inv) = flow.inverse_flat(&pvars, layout, &xvars);
    let loss = -(std_normal_logpdf(&z) + log_det_inv);
    if !loss.val().is_finite() {
        return (loss.val(), Vec::new());
    }
    let adj = tape.gradient(loss);
    (loss.val(), adj[..flat.len()].to_vec())
}

/// Reverse-KL term of one base sample: `-log_det_forward(z) - log
/// pi(T(z))`. Returns `None` when the target log-density is non-finite at
/// the pushed point (the sample is masked).
fn rkl_grad_one(
    flow: &FlowModel,
    target: &TargetDensity,
    layout: &[(std::ops::Range<usize>, std::ops::Range<usize>)],
    flat: &[f64],
    z: &[f64],
) -> Option<(f64, Vec<f64>)> {
    let tape = Tape::with_capacity(flat.len() * 4);
    let pvars: Vec<_> = flat.iter().map(|&p| tape.var(p)).collect();
    let zvars: Vec<_> = z.iter().map(|&v| tape.var(v)).collect();
    let (x, log_det) = flow.forward_flat(&pvars, layout, &zvars);
    if !x.iter().all(|v| v.val().is_finite()) {
        return None;
    }
    let log_pi = target.log_unnorm_density_s(&x);
    let loss = -(log_det + log_pi);
    if !loss.val().is_finite() {
        return None;
    }
    let adj = tape.gradient(loss);
    Some((loss.val(), adj[..flat.len()].to_vec()))
}

fn mean_in_order(batch: Vec<(f64, Vec<f64>)>, dim: usize) -> (f64, Vec<f64>) {
    let count = batch.len() as f64;
    let mut loss = 0.0;
    let mut grads = vec![0.0; dim];
    for (l, g) in &batch {
        loss += l;
        for (acc, gi) in grads.iter_mut().zip(g) {
            *acc += gi;
        }
    }
    loss /= count;
    for g in &mut grads {
        *g /= count;
    }
    (loss, grads)
}

/// Forward-KL (maximum likelihood) loss over a set of target samples:
/// `-mean_i log_density(flow, x_i)`, with gradients for every parameter.
pub fn forward_kl_loss(flow: &FlowModel, samples: &Matrix) -> Result<(f64, Vec<f64>), TrainError> {
    if samples.rows() == 0 {
        return Err(TrainError::InvalidConfig("empty sample set".into()));
    }
    let layout = flow.param_layout();
    let flat = flow.params_flat();
    let per: Vec<(f64, Vec<f64>)> = (0..samples.rows())
        .into_par_iter()
        .map(|i| nll_grad_one(flow, &layout, &flat, samples.row(i)))
        .collect();
    if per.iter().any(|(l, _)| !l.is_finite()) {
        return Err(TrainError::Divergence("non-finite log-likelihood".into()));
    }
    Ok(mean_in_order(per, flat.len()))
}

/// Reverse-KL loss over base samples; the pathwise estimator
/// `mean_z[-log_det_forward(z) - log pi_tilde(T(z))]` with the constant
/// base entropy dropped. Samples where the target log-density is
/// non-finite are masked; more than half masked is a divergence.
pub fn reverse_kl_loss(
    flow: &FlowModel,
    target: &TargetDensity,
    base: &Matrix,
) -> Result<(f64, Vec<f64>), TrainError> {
    if base.rows() == 0 {
        return Err(TrainError::InvalidConfig("empty base sample set".into()));
    }
    let layout = flow.param_layout();
    let flat = flow.params_flat();
    let per: Vec<Option<(f64, Vec<f64>)>> = (0..base.rows())
        .into_par_iter()
        .map(|i| rkl_grad_one(flow, target, &layout, &flat, base.row(i)))
        .collect();
    let total = per.len();
    let kept: Vec<(f64, Vec<f64>)> = per.into_iter().flatten().collect();
    let masked = total - kept.len();
    if 2 * masked > total {
        return Err(TrainError::Divergence(format!(
            "{masked} of {total} samples masked (non-finite target log-density)"
        )));
    }
    Ok(mean_in_order(kept, flat.len()))
}

/// Run the configured number of Adam steps. Deterministic given the config
/// seed; returns the per-step loss trace.
pub fn train(
    flow: &mut FlowModel,
    task: &TrainTask<'_>,
    config: &TrainConfig,
) -> Result<Vec<f64>, TrainError> {
    config.validate()?;
    match (config.objective, task) {
        (Objective::ForwardKl, TrainTask::Samples(_)) => {}
        (Objective::ReverseKl, TrainTask::Target(_)) => {}
        (Objective::ForwardKl, _) => {
            return Err(TrainError::TaskMismatch("forward KL trains on samples"))
        }
        (Objective::ReverseKl, _) => {
            return Err(TrainError::TaskMismatch(
                "reverse KL trains against a target density",
            ))
        }
    }

    let d = flow.d();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = flow.params_flat();
    let mut adam = Adam::new(params.len(), config.beta1, config.beta2, config.epsilon);
    let mut trace = Vec::with_capacity(config.steps);

    for step in 0..config.steps {
        let result = match task {
            TrainTask::Samples(samples) => {
                let mut batch = Matrix::zeros(config.batch_size, d);
                for b in 0..config.batch_size {
                    let i = rng.random_range(0..samples.rows());
                    batch.row_mut(b).copy_from_slice(samples.row(i));
                }
                forward_kl_loss(flow, &batch)
            }
            TrainTask::Target(target) => {
                let mut base = Matrix::zeros(config.batch_size, d);
                for b in 0..config.batch_size {
                    for j in 0..d {
                        let u: f64 = rng.random();
                        base.set(
                            b,
                            j,
                            norm_quantile(u.clamp(f64::EPSILON / 2.0, 1.0 - f64::EPSILON / 2.0)),
                        );
                    }
                }
                reverse_kl_loss(flow, target, &base)
            }
        };
        let (loss, grads) = result.map_err(|e| match e {
            TrainError::Divergence(detail) => TrainError::DivergenceAtStep { step, detail },
            other => other,
        })?;
        if !loss.is_finite() {
            return Err(TrainError::DivergenceAtStep {
                step,
                detail: "non-finite loss".into(),
            });
        }
        adam.step(&mut params, &grads, config.learning_rate);
        flow.set_params_flat(&params);
        trace.push(loss);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{Activation, TransformKind, LOG_TWO_PI};
    use crate::targets::standard_normal_target;

    fn small_flow(d: usize) -> FlowModel {
        FlowModel::coupling_stack(d, 2, TransformKind::Affine, &[8], Activation::Tanh).unwrap()
    }

    #[test]
    fn forward_kl_of_identity_flow_is_gaussian_nll() {
        let flow = small_flow(2);
        let target = standard_normal_target(2);
        let samples = target.exact_sample(4096, 3).unwrap();
        let (loss, _) = forward_kl_loss(&flow, &samples).unwrap();
        // E[-log N(x)] = d/2 * ln(2 pi) + d/2 for d = 2
        let want = LOG_TWO_PI + 1.0;
        assert!((loss - want).abs() < 0.1, "loss={loss} want~{want}");
    }

    #[test]
    fn forward_kl_batch_duplication_keeps_loss() {
        let mut flow = small_flow(2);
        flow.randomize_params(1);
        let target = standard_normal_target(2);
        let samples = target.exact_sample(128, 5).unwrap();
        let doubled = {
            let mut rows: Vec<Vec<f64>> = samples.iter_rows().map(|r| r.to_vec()).collect();
            rows.extend(samples.iter_rows().map(|r| r.to_vec()));
            Matrix::from_rows(&rows)
        };
        let (a, ga) = forward_kl_loss(&flow, &samples).unwrap();
        let (b, gb) = forward_kl_loss(&flow, &doubled).unwrap();
        assert!((a - b).abs() < 1e-12);
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn reverse_kl_at_optimum_has_small_gradient() {
        // identity flow, standard normal target: the expected gradient is
        // zero at the optimum. A scrambled-Sobol base batch integrates the
        // smooth per-sample gradients accurately enough to see it.
        let flow = small_flow(2);
        let target = standard_normal_target(2);
        let points = crate::qmc::sobol_points(12, 2, Some(0)).unwrap();
        let base = crate::gaussian::inv_cdf_map(&points).values().clone();
        let (loss, grads) = reverse_kl_loss(&flow, &target, &base).unwrap();
        let want = LOG_TWO_PI + 1.0; // E[-log N(z)] at d=2
        assert!((loss - want).abs() < 0.1, "loss={loss}");
        let norm: f64 = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(norm < 1e-3, "gradient norm {norm}");
    }

    #[test]
    fn reverse_kl_invariant_under_target_rescaling() {
        // scaling the unnormalized density by exp(c) shifts the loss by -c
        // and leaves every gradient untouched
        let mut flow = small_flow(2);
        flow.randomize_params(4);
        let mut p = flow.params_flat();
        for (i, v) in p.iter_mut().enumerate() {
            *v += ((i * 13 % 7) as f64 - 3.0) * 0.02;
        }
        flow.set_params_flat(&p);
        let target = standard_normal_target(2);
        let scaled = standard_normal_target(2).with_log_offset(3.7);
        let base = target.exact_sample(512, 11).unwrap();
        let (l1, g1) = reverse_kl_loss(&flow, &target, &base).unwrap();
        let (l2, g2) = reverse_kl_loss(&flow, &scaled, &base).unwrap();
        assert!((l2 - (l1 - 3.7)).abs() < 1e-10, "{l2} vs {}", l1 - 3.7);
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn adam_zero_gradient_keeps_parameters() {
        let mut params = vec![1.0, -2.0, 3.0];
        let before = params.clone();
        let mut adam = Adam::new(3, 0.9, 0.999, 1e-8);
        adam.step(&mut params, &[0.0, 0.0, 0.0], 0.1);
        assert_eq!(params, before);
    }

    #[test]
    fn train_decreases_forward_kl_loss() {
        let mut flow = small_flow(2);
        let target = standard_normal_target(2);
        // data shifted away from the base so there is something to learn
        let mut samples = target.exact_sample(2048, 21).unwrap();
        for i in 0..samples.rows() {
            samples.row_mut(i)[0] += 1.5;
            samples.row_mut(i)[1] -= 0.5;
        }
        let mut config = TrainConfig::new(Objective::ForwardKl, 500);
        config.batch_size = 64;
        config.learning_rate = 5e-3;
        config.seed = 2;
        let trace = train(&mut flow, &TrainTask::Samples(&samples), &config).unwrap();
        assert_eq!(trace.len(), 500);
        assert!(trace[499] < trace[0], "{} !< {}", trace[499], trace[0]);
    }

    #[test]
    fn train_is_deterministic_given_seed() {
        let target = standard_normal_target(2);
        let samples = target.exact_sample(256, 8).unwrap();
        let mut config = TrainConfig::new(Objective::ForwardKl, 20);
        config.batch_size = 32;
        config.seed = 77;
        let mut f1 = small_flow(2);
        let t1 = train(&mut f1, &TrainTask::Samples(&samples), &config).unwrap();
        let mut f2 = small_flow(2);
        let t2 = train(&mut f2, &TrainTask::Samples(&samples), &config).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(f1.params_flat(), f2.params_flat());
    }

    #[test]
    fn objective_task_mismatch_is_rejected() {
        let mut flow = small_flow(2);
        let target = standard_normal_target(2);
        let config = TrainConfig::new(Objective::ForwardKl, 10);
        match train(&mut flow, &TrainTask::Target(&target), &config) {
            Err(TrainError::TaskMismatch(_)) => {}
            other => panic!("expected TaskMismatch, got {other:?}"),
        }
    }
}
