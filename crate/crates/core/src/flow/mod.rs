//! Coupling normalizing flows: exact forward map, inverse map,
//! log-determinant, and pushforward log-density.
//!
//! A [`FlowModel`] is an ordered stack of coupling layers over a standard
//! normal base. Each layer passes the masked coordinate block through
//! unchanged and transforms the rest elementwise, with parameters produced
//! by a small MLP (the conditioner) reading the pass-through block. The
//! Jacobian is triangular, so the log-determinant is the sum of the
//! elementwise slopes.
//!
//! All transform math is generic over [`Scalar`], so the same code runs on
//! `f64` for sampling and on tape variables for training.

pub mod persist;
mod spline;

pub use persist::{flow_load, flow_save, PersistError, SCHEMA_VERSION};
pub use spline::raw_param_count;

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Scalar;
use spline::{knots_from_raw, spline_forward, spline_inverse, SplineKnots};

/// Affine scales are bounded to `exp(+-AFFINE_SCALE_CAP)` by a soft clamp
/// `s = CAP * tanh(raw / CAP)` on the conditioner output.
pub const AFFINE_SCALE_CAP: f64 = 5.0;

pub const LOG_TWO_PI: f64 = 1.8378770664093453; // ln(2*pi)

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("non-finite value produced in layer {layer}")]
    NonFinite { layer: usize },
    #[error("dimension mismatch: flow has d={expected}, input has d={got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid flow model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
}

/// Elementwise transform applied to the non-masked coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformKind {
    /// `x * exp(s) + t` with `(s_raw, t)` from the conditioner.
    Affine,
    /// Monotone rational quadratic spline with `bins` bins on
    /// `[-bound, bound]` and identity tails.
    RqSpline { bins: usize, bound: f64 },
}

impl TransformKind {
    /// Conditioner outputs per transformed coordinate.
    pub fn params_per_coord(&self) -> usize {
        match *self {
            TransformKind::Affine => 2,
            TransformKind::RqSpline { bins, .. } => raw_param_count(bins),
        }
    }
}

/// Fully connected conditioner network. `sizes` runs from the input width
/// (the pass-through block) to the output width (parameters for all
/// transformed coordinates); hidden layers use `activation`, the output is
/// linear. Weights are stored row-major per linear layer, all layers
/// concatenated; biases likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionerMlp {
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl ConditionerMlp {
    pub fn zeros(sizes: Vec<usize>, activation: Activation) -> Self {
        let n_weights: usize = sizes.windows(2).map(|w| w[0] * w[1]).sum();
        let n_biases: usize = sizes[1..].iter().sum();
        ConditionerMlp {
            sizes,
            activation,
            weights: vec![0.0; n_weights],
            biases: vec![0.0; n_biases],
        }
    }

    fn validate(&self) -> Result<(), FlowError> {
        if self.sizes.len() < 2 {
            return Err(FlowError::InvalidModel(
                "conditioner needs at least input and output sizes".into(),
            ));
        }
        if self.sizes.iter().any(|&s| s == 0) {
            return Err(FlowError::InvalidModel("conditioner layer of width 0".into()));
        }
        let n_weights: usize = self.sizes.windows(2).map(|w| w[0] * w[1]).sum();
        let n_biases: usize = self.sizes[1..].iter().sum();
        if self.weights.len() != n_weights || self.biases.len() != n_biases {
            return Err(FlowError::InvalidModel(format!(
                "conditioner parameter count mismatch: {} weights (expected {}), {} biases (expected {})",
                self.weights.len(),
                n_weights,
                self.biases.len(),
                n_biases
            )));
        }
        if !self.weights.iter().chain(&self.biases).all(|v| v.is_finite()) {
            return Err(FlowError::InvalidModel("non-finite conditioner parameter".into()));
        }
        Ok(())
    }
}

/// One coupling layer: `mask[i] == true` marks pass-through coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingLayer {
    pub mask: Vec<bool>,
    pub transform: TransformKind,
    pub conditioner: ConditionerMlp,
}

impl CouplingLayer {
    pub fn n_pass(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn n_trans(&self) -> usize {
        self.mask.len() - self.n_pass()
    }

    fn validate(&self) -> Result<(), FlowError> {
        let n_pass = self.n_pass();
        let n_trans = self.n_trans();
        if n_pass == 0 || n_trans == 0 {
            return Err(FlowError::InvalidModel(
                "mask must keep at least one coordinate and transform at least one".into(),
            ));
        }
        if let TransformKind::RqSpline { bins, bound } = self.transform {
            if bins < 1 {
                return Err(FlowError::InvalidModel("spline needs at least one bin".into()));
            }
            if !(bound > 0.0 && bound.is_finite()) {
                return Err(FlowError::InvalidModel("spline tail bound must be positive".into()));
            }
        }
        self.conditioner.validate()?;
        if self.conditioner.sizes[0] != n_pass {
            return Err(FlowError::InvalidModel(format!(
                "conditioner input width {} does not match {} pass-through coordinates",
                self.conditioner.sizes[0], n_pass
            )));
        }
        let want_out = self.transform.params_per_coord() * n_trans;
        let got_out = *self.conditioner.sizes.last().unwrap();
        if got_out != want_out {
            return Err(FlowError::InvalidModel(format!(
                "conditioner output width {got_out} does not match {want_out} transform parameters"
            )));
        }
        Ok(())
    }
}

/// Coupling flow over a standard normal base on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowModel {
    d: usize,
    layers: Vec<CouplingLayer>,
}

impl FlowModel {
    pub fn new(d: usize, layers: Vec<CouplingLayer>) -> Result<Self, FlowError> {
        if d < 2 {
            return Err(FlowError::InvalidModel(
                "coupling flows need d >= 2 (one kept and one transformed coordinate)".into(),
            ));
        }
        if layers.is_empty() {
            return Err(FlowError::InvalidModel("flow needs at least one layer".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.mask.len() != d {
                return Err(FlowError::InvalidModel(format!(
                    "layer {i} mask length {} differs from d={d}",
                    layer.mask.len()
                )));
            }
            layer.validate().map_err(|e| match e {
                FlowError::InvalidModel(msg) => FlowError::InvalidModel(format!("layer {i}: {msg}")),
                other => other,
            })?;
        }
        for i in 1..layers.len() {
            let alternates = layers[i]
                .mask
                .iter()
                .zip(&layers[i - 1].mask)
                .all(|(a, b)| *a != *b);
            if !alternates {
                return Err(FlowError::InvalidModel(format!(
                    "layers {} and {i} must alternate masks",
                    i - 1
                )));
            }
        }
        Ok(FlowModel { d, layers })
    }

    /// Stack of `n_layers` coupling layers with alternating even/odd masks
    /// (layer 0 passes even coordinates through) and zero-initialized
    /// conditioners, which makes the flow the identity map.
    pub fn coupling_stack(
        d: usize,
        n_layers: usize,
        transform: TransformKind,
        hidden: &[usize],
        activation: Activation,
    ) -> Result<Self, FlowError> {
        let mut layers = Vec::with_capacity(n_layers);
        for l in 0..n_layers {
            let mask: Vec<bool> = (0..d).map(|i| (i % 2 == 0) == (l % 2 == 0)).collect();
            let n_pass = mask.iter().filter(|&&m| m).count();
            let n_trans = d - n_pass;
            let mut sizes = Vec::with_capacity(hidden.len() + 2);
            sizes.push(n_pass);
            sizes.extend_from_slice(hidden);
            sizes.push(transform.params_per_coord() * n_trans);
            layers.push(CouplingLayer {
                mask,
                transform,
                conditioner: ConditionerMlp::zeros(sizes, activation),
            });
        }
        FlowModel::new(d, layers)
    }

    /// Xavier-uniform init for the hidden linear layers; the final linear
    /// layer of every conditioner stays zero so the flow starts at the
    /// identity.
    pub fn randomize_params(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut self.layers {
            let mlp = &mut layer.conditioner;
            let mut w_off = 0;
            let n_linear = mlp.sizes.len() - 1;
            for l in 0..n_linear {
                let (nin, nout) = (mlp.sizes[l], mlp.sizes[l + 1]);
                if l + 1 < n_linear {
                    let a = (6.0 / (nin + nout) as f64).sqrt();
                    for w in &mut mlp.weights[w_off..w_off + nin * nout] {
                        *w = rng.random::<f64>() * 2.0 * a - a;
                    }
                }
                w_off += nin * nout;
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn layers(&self) -> &[CouplingLayer] {
        &self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.conditioner.weights.len() + l.conditioner.biases.len())
            .sum()
    }

    /// Per-layer (weights, biases) ranges into the flat parameter vector.
    /// The flat order is: layer 0 weights, layer 0 biases, layer 1 weights,
    /// and so on. This is also the order used by the persistence format.
    pub fn param_layout(&self) -> Vec<(Range<usize>, Range<usize>)> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for layer in &self.layers {
            let nw = layer.conditioner.weights.len();
            let nb = layer.conditioner.biases.len();
            out.push((off..off + nw, off + nw..off + nw + nb));
            off += nw + nb;
        }
        out
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            flat.extend_from_slice(&layer.conditioner.weights);
            flat.extend_from_slice(&layer.conditioner.biases);
        }
        flat
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count());
        let mut off = 0;
        for layer in &mut self.layers {
            let nw = layer.conditioner.weights.len();
            layer.conditioner.weights.copy_from_slice(&flat[off..off + nw]);
            off += nw;
            let nb = layer.conditioner.biases.len();
            layer.conditioner.biases.copy_from_slice(&flat[off..off + nb]);
            off += nb;
        }
    }

    /// Apply the flow to a base point: `x = T(z)` and
    /// `log |det J_T(z)|`.
    pub fn forward(&self, z: &[f64]) -> Result<(Vec<f64>, f64), FlowError> {
        self.check_input(z)?;
        let mut x = z.to_vec();
        let mut log_det = 0.0;
        for (i, layer) in self.layers.iter().enumerate() {
            let (next, ld) = layer_forward(
                layer,
                &layer.conditioner.weights,
                &layer.conditioner.biases,
                &x,
            );
            if !(ld.is_finite() && next.iter().all(|v| v.is_finite())) {
                return Err(FlowError::NonFinite { layer: i });
            }
            x = next;
            log_det += ld;
        }
        Ok((x, log_det))
    }

    /// Invert the flow: `z = T^{-1}(x)` and `log |det J_{T^{-1}}(x)|`.
    pub fn inverse(&self, x: &[f64]) -> Result<(Vec<f64>, f64), FlowError> {
        self.check_input(x)?;
        let mut z = x.to_vec();
        let mut log_det = 0.0;
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let (prev, ld) = layer_inverse(
                layer,
                &layer.conditioner.weights,
                &layer.conditioner.biases,
                &z,
            );
            if !(ld.is_finite() && prev.iter().all(|v| v.is_finite())) {
                return Err(FlowError::NonFinite { layer: i });
            }
            z = prev;
            log_det += ld;
        }
        Ok((z, log_det))
    }

    /// Log-density of the pushforward measure at `x`:
    /// `log mu(T^{-1}(x)) + log |det J_{T^{-1}}(x)|` with `mu` standard
    /// normal.
    pub fn log_density(&self, x: &[f64]) -> Result<f64, FlowError> {
        let (z, log_det) = self.inverse(x)?;
        Ok(std_normal_logpdf(&z) + log_det)
    }

    fn check_input(&self, v: &[f64]) -> Result<(), FlowError> {
        if v.len() != self.d {
            return Err(FlowError::DimensionMismatch {
                expected: self.d,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Generic forward pass over externally supplied flat parameters (used
    /// by the trainer with tape variables). `layout` must come from
    /// [`FlowModel::param_layout`].
    pub(crate) fn forward_flat<S: Scalar>(
        &self,
        flat: &[S],
        layout: &[(Range<usize>, Range<usize>)],
        z: &[S],
    ) -> (Vec<S>, S) {
        let mut x = z.to_vec();
        let mut log_det = z[0] * 0.0;
        for (layer, (wr, br)) in self.layers.iter().zip(layout) {
            let (next, ld) = layer_forward(layer, &flat[wr.clone()], &flat[br.clone()], &x);
            x = next;
            log_det = log_det + ld;
        }
        (x, log_det)
    }

    /// Generic inverse pass over externally supplied flat parameters.
    pub(crate) fn inverse_flat<S: Scalar>(
        &self,
        flat: &[S],
        layout: &[(Range<usize>, Range<usize>)],
        x: &[S],
    ) -> (Vec<S>, S) {
        let mut z = x.to_vec();
        let mut log_det = x[0] * 0.0;
        for (layer, (wr, br)) in self.layers.iter().zip(layout).rev() {
            let (prev, ld) = layer_inverse(layer, &flat[wr.clone()], &flat[br.clone()], &z);
            z = prev;
            log_det = log_det + ld;
        }
        (z, log_det)
    }
}

/// `log N(z; 0, I)`.
pub fn std_normal_logpdf<S: Scalar>(z: &[S]) -> S {
    let mut sq = z[0] * z[0];
    for &zi in &z[1..] {
        sq = zi.mul_add(zi, sq);
    }
    sq * (-0.5) - 0.5 * LOG_TWO_PI * z.len() as f64
}

/// Evaluate the conditioner on the pass-through block.
fn conditioner_out<S: Scalar>(layer: &CouplingLayer, weights: &[S], biases: &[S], x: &[S]) -> Vec<S> {
    let input: Vec<S> = layer
        .mask
        .iter()
        .zip(x)
        .filter_map(|(&keep, &v)| keep.then_some(v))
        .collect();
    mlp_eval(
        &layer.conditioner.sizes,
        layer.conditioner.activation,
        weights,
        biases,
        &input,
    )
}

fn layer_forward<S: Scalar>(layer: &CouplingLayer, weights: &[S], biases: &[S], x: &[S]) -> (Vec<S>, S) {
    let params = conditioner_out(layer, weights, biases, x);
    let mut y = x.to_vec();
    let mut log_det = x[0] * 0.0;
    let mut t_idx = 0;
    match layer.transform {
        TransformKind::Affine => {
            for (i, _) in layer.mask.iter().enumerate().filter(|(_, &keep)| !keep) {
                let s = (params[2 * t_idx] * (1.0 / AFFINE_SCALE_CAP)).tanh() * AFFINE_SCALE_CAP;
                let t = params[2 * t_idx + 1];
                y[i] = x[i].mul_add(s.exp(), t);
                log_det = log_det + s;
                t_idx += 1;
            }
        }
        TransformKind::RqSpline { bins, bound } => {
            let ppc = raw_param_count(bins);
            for (i, _) in layer.mask.iter().enumerate().filter(|(_, &keep)| !keep) {
                let kn: SplineKnots<S> =
                    knots_from_raw(&params[t_idx * ppc..(t_idx + 1) * ppc], bins, bound);
                let (v, dv) = spline_forward(&kn, x[i]);
                y[i] = v;
                log_det = log_det + dv.ln();
                t_idx += 1;
            }
        }
    }
    (y, log_det)
}

fn layer_inverse<S: Scalar>(layer: &CouplingLayer, weights: &[S], biases: &[S], y: &[S]) -> (Vec<S>, S) {
    // pass-through coordinates are unchanged, so the conditioner sees the
    // same block in both directions
    let params = conditioner_out(layer, weights, biases, y);
    let mut x = y.to_vec();
    let mut log_det = y[0] * 0.0;
    let mut t_idx = 0;
    match layer.transform {
        TransformKind::Affine => {
            for (i, _) in layer.mask.iter().enumerate().filter(|(_, &keep)| !keep) {
                let s = (params[2 * t_idx] * (1.0 / AFFINE_SCALE_CAP)).tanh() * AFFINE_SCALE_CAP;
                let t = params[2 * t_idx + 1];
                x[i] = (y[i] - t) * (-s).exp();
                log_det = log_det - s;
                t_idx += 1;
            }
        }
        TransformKind::RqSpline { bins, bound } => {
            let ppc = raw_param_count(bins);
            for (i, _) in layer.mask.iter().enumerate().filter(|(_, &keep)| !keep) {
                let kn: SplineKnots<S> =
                    knots_from_raw(&params[t_idx * ppc..(t_idx + 1) * ppc], bins, bound);
                let (u, dv) = spline_inverse(&kn, y[i]);
                x[i] = u;
                log_det = log_det - dv.ln();
                t_idx += 1;
            }
        }
    }
    (x, log_det)
}

/// Run the MLP on `input`; hidden layers use the activation, the output
/// layer is linear.
pub(crate) fn mlp_eval<S: Scalar>(
    sizes: &[usize],
    activation: Activation,
    weights: &[S],
    biases: &[S],
    input: &[S],
) -> Vec<S> {
    debug_assert_eq!(input.len(), sizes[0]);
    let n_linear = sizes.len() - 1;
    let mut cur = input.to_vec();
    let mut w_off = 0;
    let mut b_off = 0;
    for l in 0..n_linear {
        let (nin, nout) = (sizes[l], sizes[l + 1]);
        let mut next = Vec::with_capacity(nout);
        for o in 0..nout {
            let mut acc = biases[b_off + o];
            let row = &weights[w_off + o * nin..w_off + (o + 1) * nin];
            for (w, v) in row.iter().zip(&cur) {
                acc = w.mul_add(*v, acc);
            }
            if l + 1 < n_linear {
                acc = match activation {
                    Activation::Tanh => acc.tanh(),
                    Activation::Relu => acc.max_val(acc * 0.0),
                };
            }
            next.push(acc);
        }
        w_off += nin * nout;
        b_off += nout;
        cur = next;
    }
    cur
}

/// Convenience wrapper for evaluating a stand-alone spline, mostly for
/// inspection and tests.
#[derive(Debug, Clone)]
pub struct SplineParams {
    knots: SplineKnots<f64>,
    bins: usize,
}

impl SplineParams {
    /// Derive a valid spline from `3K - 1` raw values.
    pub fn from_raw(raw: &[f64], bins: usize, bound: f64) -> Result<Self, FlowError> {
        if bins < 1 || !(bound > 0.0) {
            return Err(FlowError::InvalidModel("need bins >= 1 and bound > 0".into()));
        }
        if raw.len() != raw_param_count(bins) {
            return Err(FlowError::InvalidModel(format!(
                "expected {} raw spline parameters, got {}",
                raw_param_count(bins),
                raw.len()
            )));
        }
        Ok(SplineParams {
            knots: knots_from_raw(raw, bins, bound),
            bins,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn bound(&self) -> f64 {
        self.knots.bound
    }

    pub fn bin_widths(&self) -> Vec<f64> {
        self.knots.xs.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn bin_heights(&self) -> Vec<f64> {
        self.knots.ys.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn knot_derivatives(&self) -> &[f64] {
        &self.knots.ds
    }
}

/// Evaluate a spline and its derivative at `u`.
pub fn rq_spline_eval(params: &SplineParams, u: f64) -> (f64, f64) {
    spline_forward(&params.knots, u)
}

/// Invert a spline at `y`; returns the preimage and the forward derivative
/// there.
pub fn rq_spline_invert(params: &SplineParams, y: f64) -> (f64, f64) {
    spline_inverse(&params.knots, y)
}
