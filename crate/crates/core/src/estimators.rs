//! Importance sampling, self-normalized importance sampling, the
//! independent MRTH chain, the independent importance Markov chain,
//! effective sample size, and the MC/RQMC ratio diagnostic.
//!
//! All weight arithmetic stays in log space with a single max shift per
//! batch; dualmoon log-weights can span hundreds of nats.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::flow::{std_normal_logpdf, FlowError, FlowModel};
use crate::gaussian::{gaussian_map, GaussianError, MapKind};
use crate::matrix::Matrix;
use crate::qmc::{PointSet, SequenceKind};
use crate::targets::{TargetDensity, TestFunction};

/// Hard cap on the total replication count an iIMC chain may produce.
const IIMC_STATE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error("dimension mismatch: flow/target d={expected}, points d={got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite log-weight at sample {index}")]
    NonFiniteWeight { index: usize },
    #[error("weights are unnormalized; use snis_estimate for targets without a known constant")]
    UnnormalizedWeights,
    #[error("degenerate weighted sample: {0}")]
    DegenerateSample(String),
    #[error("chain needs at least {need} proposals, got {got}")]
    TooFewProposals { got: usize, need: usize },
    #[error("kappa must be positive and finite")]
    InvalidKappa,
    #[error("empty replication chain: every replication count was zero")]
    DegenerateChain,
    #[error("iIMC replication total exceeded the cap {limit} states")]
    ReplicationOverflow { limit: u64 },
    #[error("effective sample size needs at least {need} values, got {got}")]
    TooShortForEss { got: usize, need: usize },
    #[error("effective sample size undefined for a zero-variance sequence")]
    UndefinedEss,
    #[error("ratio undefined: RQMC standard deviation is zero")]
    DegenerateRatio,
    #[error("ratio needs at least 2 replications per side, got {got}")]
    TooFewReplications { got: usize },
}

/// Where a weighted sample's points came from.
#[derive(Debug, Clone)]
pub struct SampleProvenance {
    pub seq: SequenceKind,
    pub map: MapKind,
    pub seed: Option<u64>,
}

/// Points in `R^d` with unnormalized log-weights
/// `log w~ = log pi~ - log nu`.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    points: Matrix,
    log_weights: Vec<f64>,
    /// True when the target's known normalizing constant was subtracted,
    /// making the weights exact `pi / nu` ratios.
    pub normalized: bool,
    pub provenance: SampleProvenance,
}

impl WeightedSample {
    pub fn n(&self) -> usize {
        self.points.rows()
    }

    pub fn d(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }
}

/// Push a uniform point set through the Gaussian map and the flow, and
/// attach importance log-weights against `target`.
pub fn make_weighted_sample(
    flow: &FlowModel,
    target: &TargetDensity,
    points: &PointSet,
    map_kind: MapKind,
) -> Result<WeightedSample, EstimatorError> {
    if points.d() != flow.d() || target.d() != flow.d() {
        return Err(EstimatorError::DimensionMismatch {
            expected: flow.d(),
            got: points.d(),
        });
    }
    let gaussian = gaussian_map(points, map_kind)?;
    let n = points.n();
    let normalized = target.log_norm_const().is_some();
    let log_c = target.log_norm_const().unwrap_or(0.0);

    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<(Vec<f64>, f64), EstimatorError> {
            let z = gaussian.row(i);
            let (x, log_det) = flow.forward(z)?;
            // pushforward density straight from the forward pass
            let log_nu = std_normal_logpdf(z) - log_det;
            let mut lw = target.log_unnorm_density(&x) - log_nu;
            if normalized {
                lw -= log_c;
            }
            if !lw.is_finite() {
                return Err(EstimatorError::NonFiniteWeight { index: i });
            }
            Ok((x, lw))
        })
        .collect::<Result<_, _>>()?;

    let mut pts = Matrix::zeros(n, flow.d());
    let mut log_weights = Vec::with_capacity(n);
    for (i, (x, lw)) in rows.into_iter().enumerate() {
        pts.row_mut(i).copy_from_slice(&x);
        log_weights.push(lw);
    }
    Ok(WeightedSample {
        points: pts,
        log_weights,
        normalized,
        provenance: SampleProvenance {
            seq: points.kind,
            map: map_kind,
            seed: points.seed,
        },
    })
}

/// Plain importance-sampling estimator `(1/n) sum f(x_i) w(x_i)`. Needs
/// normalized weights.
pub fn is_estimate(ws: &WeightedSample, f: &TestFunction) -> Result<f64, EstimatorError> {
    if !ws.normalized {
        return Err(EstimatorError::UnnormalizedWeights);
    }
    let n = ws.n() as f64;
    let mut acc = 0.0;
    for i in 0..ws.n() {
        acc += f.call(ws.point(i)) * ws.log_weights[i].exp();
    }
    Ok(acc / n)
}

/// Self-normalized estimator `sum w~ f / sum w~`, stabilized by a max
/// shift in log space.
pub fn snis_estimate(ws: &WeightedSample, f: &TestFunction) -> Result<f64, EstimatorError> {
    if ws.n() == 0 {
        return Err(EstimatorError::DegenerateSample("empty sample".into()));
    }
    let max_lw = ws
        .log_weights
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if !max_lw.is_finite() {
        return Err(EstimatorError::DegenerateSample(
            "all log-weights are -inf".into(),
        ));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..ws.n() {
        let w = (ws.log_weights[i] - max_lw).exp();
        num += w * f.call(ws.point(i));
        den += w;
    }
    if !(den.is_finite() && den > 0.0) {
        return Err(EstimatorError::DegenerateSample(
            "weight normalizer is not positive".into(),
        ));
    }
    Ok(num / den)
}

/// MRTH acceptance probability from two log-weights:
/// `min(1, w(y) / w(x))`.
pub fn accept_prob(log_w_current: f64, log_w_proposal: f64) -> f64 {
    (log_w_proposal - log_w_current).exp().min(1.0)
}

/// How a chain was assembled.
#[derive(Debug, Clone)]
pub enum ChainRecord {
    /// Per-step accept flags of an independent MRTH chain (entry 0 is the
    /// initial state and always true).
    Acceptance(Vec<bool>),
    /// Per-proposal replication counts of an iIMC chain.
    Replication(Vec<u64>),
}

/// A Markov chain built from a weighted proposal stream.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    states: Matrix,
    pub record: ChainRecord,
    pub provenance: SampleProvenance,
}

impl ChainOutput {
    pub fn len(&self) -> usize {
        self.states.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn states(&self) -> &Matrix {
        &self.states
    }

    /// The test function evaluated along the chain.
    pub fn values_of(&self, f: &TestFunction) -> Vec<f64> {
        self.states.iter_rows().map(|row| f.call(row)).collect()
    }

    pub fn mean_of(&self, f: &TestFunction) -> f64 {
        let vals = self.values_of(f);
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    /// Fraction of accepted proposals (iMRTH chains only).
    pub fn acceptance_rate(&self) -> Option<f64> {
        match &self.record {
            ChainRecord::Acceptance(flags) => {
                let accepted = flags.iter().skip(1).filter(|&&a| a).count();
                Some(accepted as f64 / (flags.len() - 1).max(1) as f64)
            }
            ChainRecord::Replication(_) => None,
        }
    }
}

/// Independent MRTH chain driven by the proposal stream in sequence order.
///
/// State 0 is the first proposal; afterwards proposal `t` is accepted with
/// probability `min(1, w_t / w_current)`. Acceptance randomness comes from
/// a dedicated generator seeded with `seed`, independent of the proposal
/// sequence. Proposals are consumed strictly in order and there is no
/// burn-in.
pub fn imrth_chain(ws: &WeightedSample, seed: u64) -> Result<ChainOutput, EstimatorError> {
    let n = ws.n();
    if n < 2 {
        return Err(EstimatorError::TooFewProposals { got: n, need: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Matrix::zeros(n, ws.d());
    let mut accepted = Vec::with_capacity(n);
    let mut current = 0usize;
    states.row_mut(0).copy_from_slice(ws.point(0));
    accepted.push(true);
    for t in 1..n {
        let log_alpha = (ws.log_weights[t] - ws.log_weights[current]).min(0.0);
        let u: f64 = rng.random();
        let accept = u < log_alpha.exp();
        if accept {
            current = t;
        }
        accepted.push(accept);
        let row = ws.point(current).to_vec();
        states.row_mut(t).copy_from_slice(&row);
    }
    Ok(ChainOutput {
        states,
        record: ChainRecord::Acceptance(accepted),
        provenance: ws.provenance.clone(),
    })
}

/// Replication factor for the independent importance Markov chain.
#[derive(Debug, Clone, Copy)]
pub enum Kappa {
    /// `kappa = n / sum w~`, so the mean replication count is about 1.
    /// Computed from the same sample, which introduces an O(1/n) bias.
    Auto,
    Fixed(f64),
}

/// Independent importance Markov chain: proposal `i` is replicated
/// `N_i = floor(kappa w~_i) + Bernoulli(frac(kappa w~_i))` times and the
/// replicated states are concatenated in proposal order.
pub fn iimc_chain(
    ws: &WeightedSample,
    kappa: Kappa,
    seed: u64,
) -> Result<ChainOutput, EstimatorError> {
    let n = ws.n();
    if n == 0 {
        return Err(EstimatorError::TooFewProposals { got: 0, need: 1 });
    }
    let max_lw = ws
        .log_weights
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let shifted_sum: f64 = ws.log_weights.iter().map(|&lw| (lw - max_lw).exp()).sum();

    // expected replication count per proposal
    let rep_mean = |lw: f64| -> f64 {
        match kappa {
            Kappa::Auto => n as f64 * (lw - max_lw).exp() / shifted_sum,
            Kappa::Fixed(k) => k * lw.exp(),
        }
    };
    if let Kappa::Fixed(k) = kappa {
        if !(k > 0.0 && k.is_finite()) {
            return Err(EstimatorError::InvalidKappa);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(n);
    let mut total: u64 = 0;
    for i in 0..n {
        let r = rep_mean(ws.log_weights[i]);
        if !r.is_finite() || r as u64 > IIMC_STATE_LIMIT {
            return Err(EstimatorError::ReplicationOverflow {
                limit: IIMC_STATE_LIMIT,
            });
        }
        let base = r.floor();
        let frac = r - base;
        let u: f64 = rng.random();
        let count = base as u64 + u64::from(u < frac);
        total += count;
        if total > IIMC_STATE_LIMIT {
            return Err(EstimatorError::ReplicationOverflow {
                limit: IIMC_STATE_LIMIT,
            });
        }
        counts.push(count);
    }
    if total == 0 {
        return Err(EstimatorError::DegenerateChain);
    }

    let mut states = Matrix::zeros(total as usize, ws.d());
    let mut row = 0usize;
    for (i, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let src = ws.point(i).to_vec();
            states.row_mut(row).copy_from_slice(&src);
            row += 1;
        }
    }
    Ok(ChainOutput {
        states,
        record: ChainRecord::Replication(counts),
        provenance: ws.provenance.clone(),
    })
}

/// Effective sample size `n / (1 + 2 sum_k rho_k)` with Geyer's
/// initial-positive-sequence truncation on paired autocorrelations,
/// clamped to `(0, n]`.
pub fn ess(values: &[f64]) -> Result<f64, EstimatorError> {
    let n = values.len();
    if n < 10 {
        return Err(EstimatorError::TooShortForEss { got: n, need: 10 });
    }
    let n_f = n as f64;
    let mean = values.iter().sum::<f64>() / n_f;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let gamma = |lag: usize| -> f64 {
        let mut acc = 0.0;
        for t in 0..n - lag {
            acc += centered[t] * centered[t + lag];
        }
        acc / n_f
    };
    let g0 = gamma(0);
    let zero_threshold = (f64::EPSILON * mean.abs()).powi(2) * n_f;
    if g0 <= zero_threshold.max(f64::MIN_POSITIVE) {
        return Err(EstimatorError::UndefinedEss);
    }

    // tau = -1 + 2 * sum of positive leading Gamma_m = rho_{2m} + rho_{2m+1}
    let mut tau = -1.0;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = (gamma(2 * m) + gamma(2 * m + 1)) / g0;
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        m += 1;
    }
    let ess = if tau <= 0.0 { n_f } else { (n_f / tau).min(n_f) };
    Ok(ess)
}

/// Per-replication summary of one estimator.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub name: String,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    /// Absolute errors against the ground truth, when one is known.
    pub abs_errors: Option<Vec<f64>>,
    pub ess: Option<f64>,
}

impl EstimateReport {
    pub fn from_values(name: impl Into<String>, values: Vec<f64>, ground_truth: Option<f64>) -> Self {
        assert!(!values.is_empty(), "a report needs at least one replication");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let abs_errors =
            ground_truth.map(|g| values.iter().map(|v| (v - g).abs()).collect::<Vec<f64>>());
        EstimateReport {
            name: name.into(),
            values,
            mean,
            std_dev,
            abs_errors,
            ess: None,
        }
    }

    pub fn with_ess(mut self, ess: f64) -> Self {
        self.ess = Some(ess);
        self
    }

    pub fn mean_abs_error(&self) -> Option<f64> {
        self.abs_errors
            .as_ref()
            .map(|errs| errs.iter().sum::<f64>() / errs.len() as f64)
    }

    /// Standard error of the replication mean.
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.values.len() as f64).sqrt()
    }
}

/// Ratio of empirical standard deviations, MC over RQMC.
pub fn ratio_report(mc: &EstimateReport, rqmc: &EstimateReport) -> Result<f64, EstimatorError> {
    let got = mc.values.len().min(rqmc.values.len());
    if got < 2 {
        return Err(EstimatorError::TooFewReplications { got });
    }
    if rqmc.std_dev == 0.0 {
        return Err(EstimatorError::DegenerateRatio);
    }
    Ok(mc.std_dev / rqmc.std_dev)
}
