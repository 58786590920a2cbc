//! Monotone rational quadratic splines with identity tails.
//!
//! The interpolant follows Gregory & Delbourgo: on each bin the map is a
//! ratio of quadratics fixed by the knot values, the knot derivatives, and
//! monotonicity. Outside `[-B, B]` the map is the identity with unit slope,
//! so the transform is a C1 bijection of the real line whenever all bin
//! widths, heights, and knot derivatives are positive.
//!
//! Raw conditioner outputs parametrize a valid spline by construction:
//! widths and heights go through a normalized exponential scaled to `2B`
//! with a floor of `1e-3 * 2B / K` per bin, and interior derivatives go
//! through a shifted softplus that maps 0 to exactly 1, so an all-zeros
//! conditioner yields the identity spline.

use crate::scalar::{softplus, Scalar};

/// `softplus(SOFTPLUS_UNIT_SHIFT) == 1`.
const SOFTPLUS_UNIT_SHIFT: f64 = 0.5413248546129181; // ln(e - 1)
const MIN_BIN_FRACTION: f64 = 1e-3;

/// Knot representation of one spline: `K + 1` x-positions, y-positions, and
/// derivatives (boundary derivatives pinned to 1).
#[derive(Debug, Clone)]
pub(crate) struct SplineKnots<S> {
    pub xs: Vec<S>,
    pub ys: Vec<S>,
    pub ds: Vec<S>,
    pub bound: f64,
}

/// Number of raw parameters per transformed coordinate: `K` widths, `K`
/// heights, `K - 1` interior derivatives.
pub fn raw_param_count(bins: usize) -> usize {
    3 * bins - 1
}

fn constant_like<S: Scalar>(template: S, value: f64) -> S {
    template * 0.0 + value
}

/// Map `K` raw values to bin fractions: a max-shifted softmax mixed with a
/// floor so every fraction is at least `MIN_BIN_FRACTION / K`.
fn bin_fractions<S: Scalar>(raw: &[S]) -> Vec<S> {
    let k = raw.len();
    let mut m = raw[0];
    for &r in &raw[1..] {
        m = m.max_val(r);
    }
    let exps: Vec<S> = raw.iter().map(|&r| (r - m).exp()).collect();
    let mut total = exps[0];
    for &e in &exps[1..] {
        total = total + e;
    }
    let eps = MIN_BIN_FRACTION / k as f64;
    let scale = 1.0 - k as f64 * eps;
    exps.iter().map(|&e| e / total * scale + eps).collect()
}

pub(crate) fn knots_from_raw<S: Scalar>(raw: &[S], bins: usize, bound: f64) -> SplineKnots<S> {
    debug_assert_eq!(raw.len(), raw_param_count(bins));
    let (w_raw, rest) = raw.split_at(bins);
    let (h_raw, d_raw) = rest.split_at(bins);

    let span = 2.0 * bound;
    let make_knots = |fracs: &[S]| -> Vec<S> {
        let mut knots = Vec::with_capacity(bins + 1);
        let mut acc = constant_like(fracs[0], -bound);
        knots.push(acc);
        for &f in fracs {
            acc = acc + f * span;
            knots.push(acc);
        }
        // pin the last knot to the bound exactly
        knots[bins] = constant_like(fracs[0], bound);
        knots
    };
    let xs = make_knots(&bin_fractions(w_raw));
    let ys = make_knots(&bin_fractions(h_raw));

    let mut ds = Vec::with_capacity(bins + 1);
    ds.push(constant_like(raw[0], 1.0));
    for &r in d_raw {
        ds.push(softplus(r + SOFTPLUS_UNIT_SHIFT));
    }
    ds.push(constant_like(raw[0], 1.0));

    SplineKnots {
        xs,
        ys,
        ds,
        bound,
    }
}

/// Largest bin index `k` with `knots[k] <= v`, clamped to a valid bin.
fn find_bin<S: Scalar>(knots: &[S], v: f64) -> usize {
    let bins = knots.len() - 1;
    let mut k = 0;
    while k + 1 < bins && knots[k + 1].val() <= v {
        k += 1;
    }
    k
}

/// Evaluate the spline and its derivative at `u`.
pub(crate) fn spline_forward<S: Scalar>(kn: &SplineKnots<S>, u: S) -> (S, S) {
    let uv = u.val();
    if uv < -kn.bound || uv > kn.bound {
        return (u, constant_like(u, 1.0));
    }
    let k = find_bin(&kn.xs, uv);
    let w = kn.xs[k + 1] - kn.xs[k];
    let h = kn.ys[k + 1] - kn.ys[k];
    let s = h / w;
    let (d0, d1) = (kn.ds[k], kn.ds[k + 1]);
    let xi = (u - kn.xs[k]) / w;
    let xi1 = -xi + 1.0;
    let cross = xi * xi1;
    let m = d1 + d0 - s * 2.0;
    let denom = s + m * cross;
    let value = kn.ys[k] + h * (s * xi * xi + d0 * cross) / denom;
    let deriv = s * s * (d1 * xi * xi + s * 2.0 * cross + d0 * xi1 * xi1) / (denom * denom);
    (value, deriv)
}

/// Invert the spline at `y`. Returns the preimage `u` and the forward
/// derivative `dy/du` evaluated at `u` (the inverse has slope `1/dy`).
pub(crate) fn spline_inverse<S: Scalar>(kn: &SplineKnots<S>, y: S) -> (S, S) {
    let yv = y.val();
    if yv < -kn.bound || yv > kn.bound {
        return (y, constant_like(y, 1.0));
    }
    let k = find_bin(&kn.ys, yv);
    let w = kn.xs[k + 1] - kn.xs[k];
    let h = kn.ys[k + 1] - kn.ys[k];
    let s = h / w;
    let (d0, d1) = (kn.ds[k], kn.ds[k + 1]);
    let m = d1 + d0 - s * 2.0;
    let rel = y - kn.ys[k];

    // Solve a*xi^2 + b*xi + c = 0 for xi in [0, 1]; the 2c/(-b - sqrt(..))
    // root is exact even when a vanishes (linear bin).
    let a = h * (s - d0) + rel * m;
    let b = h * d0 - rel * m;
    let c = -s * rel;
    let mut disc = b * b - a * c * 4.0;
    if disc.val() < 0.0 {
        // only reachable through rounding at bin edges
        disc = disc * 0.0;
    }
    let xi = c * 2.0 / (-b - disc.sqrt());
    let u = kn.xs[k] + w * xi;

    let xi1 = -xi + 1.0;
    let cross = xi * xi1;
    let denom = s + m * cross;
    let deriv = s * s * (d1 * xi * xi + s * 2.0 * cross + d0 * xi1 * xi1) / (denom * denom);
    (u, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_knots(seed: u64, bins: usize, bound: f64) -> SplineKnots<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..raw_param_count(bins))
            .map(|_| rng.random::<f64>() * 4.0 - 2.0)
            .collect();
        knots_from_raw(&raw, bins, bound)
    }

    #[test]
    fn zero_raw_params_give_identity() {
        let kn = knots_from_raw(&[0.0; 23], 8, 4.0);
        for u in [-4.0, -3.3, -0.1, 0.0, 1.7, 4.0] {
            let (y, dy) = spline_forward(&kn, u);
            assert!((y - u).abs() < 1e-12, "u={u} y={y}");
            assert!((dy - 1.0).abs() < 1e-12, "u={u} dy={dy}");
        }
    }

    #[test]
    fn endpoints_map_to_endpoints() {
        let kn = random_knots(1, 8, 4.0);
        let (lo, _) = spline_forward(&kn, -4.0);
        let (hi, _) = spline_forward(&kn, 4.0);
        assert!((lo + 4.0).abs() < 1e-12);
        assert!((hi - 4.0).abs() < 1e-12);
    }

    #[test]
    fn strictly_increasing_and_positive_derivative() {
        let kn = random_knots(2, 8, 4.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=800 {
            let u = -4.0 + 8.0 * i as f64 / 800.0;
            let (y, dy) = spline_forward(&kn, u);
            assert!(dy > 0.0);
            assert!(y > prev);
            prev = y;
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let kn = random_knots(3, 8, 4.0);
        let h = 1e-5;
        for i in 0..1000 {
            let u = -3.99 + 7.98 * (i as f64 + 0.5) / 1000.0;
            let (_, dy) = spline_forward(&kn, u);
            let (yp, _) = spline_forward(&kn, u + h);
            let (ym, _) = spline_forward(&kn, u - h);
            let fd = (yp - ym) / (2.0 * h);
            assert!((dy - fd).abs() < 1e-6, "u={u} dy={dy} fd={fd}");
        }
    }

    #[test]
    fn inverse_round_trips() {
        for seed in 0..20 {
            let kn = random_knots(seed, 8, 4.0);
            for i in 0..200 {
                let u = -4.5 + 9.0 * i as f64 / 200.0;
                let (y, dy) = spline_forward(&kn, u);
                let (u_back, dy_back) = spline_inverse(&kn, y);
                assert!((u_back - u).abs() < 1e-9, "seed={seed} u={u}");
                assert!((dy_back - dy).abs() < 1e-7 * dy.max(1.0));
            }
        }
    }

    #[test]
    fn raw_params_always_yield_valid_knots() {
        // positivity comes from the construction, not from clamping
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<f64> = (0..raw_param_count(4))
                .map(|_| rng.random::<f64>() * 60.0 - 30.0)
                .collect();
            let kn = knots_from_raw(&raw, 4, 4.0);
            for w in kn.xs.windows(2) {
                assert!(w[1] > w[0]);
            }
            for w in kn.ys.windows(2) {
                assert!(w[1] > w[0]);
            }
            assert!(kn.ds.iter().all(|&d| d > 0.0));
            let span: f64 = kn.xs[kn.xs.len() - 1] - kn.xs[0];
            assert!((span - 8.0).abs() < 1e-12);
        }
    }
}
