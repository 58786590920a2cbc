//! Uniform point sets on `[0,1)^d`.
//!
//! Four generators: i.i.d. Monte Carlo, Sobol' (optionally scrambled with a
//! linear matrix scramble plus digital shift), Halton (optionally randomized
//! with per-digit permutations), and shifted rank-1 lattices. Generation is
//! pure given the configuration and seed, so distinct replications can run
//! concurrently with distinct seeds; a [`PointSet`] is immutable once built.

mod halton;
mod sobol;
mod sobol_data;

pub use halton::halton_points;
pub use sobol::{sobol_points, sobol_points_n, SOBOL_MAX_DIM};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::Matrix;

/// Number of candidate corners `star_discrepancy` will enumerate before
/// refusing the instance.
pub const STAR_DISCREPANCY_CORNER_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum QmcError {
    #[error("dimension {d} exceeds the packaged Sobol' direction-number table (max {max})")]
    DimensionUnsupported { d: usize, max: usize },
    #[error("star-discrepancy instance too large: {corners} candidate corners exceed the limit {limit}")]
    SizeLimit { corners: u64, limit: u64 },
    #[error("lattice generation requires an explicit point count and generating vector")]
    LatticeSpecMissing,
    #[error("invalid generator argument: {0}")]
    InvalidArgument(String),
}

/// Which generator produced a point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Mc,
    Sobol,
    Halton,
    Lattice,
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SequenceKind::Mc => "mc",
            SequenceKind::Sobol => "sobol",
            SequenceKind::Halton => "halton",
            SequenceKind::Lattice => "lattice",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = QmcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mc" => Ok(SequenceKind::Mc),
            "sobol" => Ok(SequenceKind::Sobol),
            "halton" => Ok(SequenceKind::Halton),
            "lattice" => Ok(SequenceKind::Lattice),
            other => Err(QmcError::InvalidArgument(format!(
                "unknown sequence kind `{other}` (expected mc|sobol|halton|lattice)"
            ))),
        }
    }
}

/// An `n x d` block of points in `[0,1)^d` tagged with its provenance.
#[derive(Debug, Clone)]
pub struct PointSet {
    pub kind: SequenceKind,
    /// Randomization seed; `None` for the deterministic (unrandomized)
    /// sequence.
    pub seed: Option<u64>,
    values: Matrix,
}

impl PointSet {
    pub(crate) fn new(kind: SequenceKind, seed: Option<u64>, values: Matrix) -> Self {
        debug_assert!(values.rows() >= 1 && values.cols() >= 1);
        debug_assert!(values.data().iter().all(|&v| (0.0..1.0).contains(&v)));
        PointSet { kind, seed, values }
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn d(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }
}

/// Full generator description, used by callers that pick the generator at
/// runtime.
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub kind: SequenceKind,
    pub d: usize,
    /// Apply the kind-specific randomization (scramble / digit permutation /
    /// shift). Plain MC ignores this flag: it is always seeded.
    pub randomize: bool,
    pub seed: u64,
    /// Required for `Lattice`: fixed point count and generating vector.
    pub lattice: Option<LatticeSpec>,
}

#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub n: usize,
    pub z: Vec<u64>,
}

/// Generate `n` points according to `config`.
///
/// For lattices the spec's own `n` wins and `n` must match it; sequences and
/// MC accept any `n >= 1`.
pub fn generate(config: &GeneratorConfig, n: usize) -> Result<PointSet, QmcError> {
    if n == 0 {
        return Err(QmcError::InvalidArgument("n must be >= 1".into()));
    }
    if config.d == 0 {
        return Err(QmcError::InvalidArgument("d must be >= 1".into()));
    }
    let seed = config.randomize.then_some(config.seed);
    match config.kind {
        SequenceKind::Mc => Ok(mc_points(n, config.d, config.seed)),
        SequenceKind::Sobol => sobol_points_n(n, config.d, seed),
        SequenceKind::Halton => halton_points(n, config.d, seed),
        SequenceKind::Lattice => {
            let spec = config.lattice.as_ref().ok_or(QmcError::LatticeSpecMissing)?;
            if spec.n != n {
                return Err(QmcError::InvalidArgument(format!(
                    "lattice has fixed n={}, requested {n}",
                    spec.n
                )));
            }
            if spec.z.len() != config.d {
                return Err(QmcError::InvalidArgument(format!(
                    "generating vector has {} components, expected d={}",
                    spec.z.len(),
                    config.d
                )));
            }
            Ok(lattice_points(spec.n, &spec.z, seed))
        }
    }
}

/// `n` i.i.d. uniform points from a counter-style PRNG (ChaCha8),
/// reproducible from the seed.
pub fn mc_points(n: usize, d: usize, seed: u64) -> PointSet {
    assert!(n >= 1 && d >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
    PointSet::new(SequenceKind::Mc, Some(seed), Matrix::from_flat(n, d, data))
}

/// Rank-1 lattice `x_i = (i-1) z / n mod 1` for `i = 1..=n`, with an
/// optional Cranley-Patterson shift drawn from the seed.
pub fn lattice_points(n: usize, z: &[u64], seed: Option<u64>) -> PointSet {
    assert!(n >= 1 && !z.is_empty());
    let d = z.len();
    let shift: Vec<f64> = match seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..d).map(|_| rng.random::<f64>()).collect()
        }
        None => vec![0.0; d],
    };
    let mut values = Matrix::zeros(n, d);
    for i in 0..n {
        for (j, &zj) in z.iter().enumerate() {
            // (i * z_j / n) mod 1, kept exact in integers before dividing.
            let frac = (i as u128 * zj as u128 % n as u128) as f64 / n as f64;
            let mut v = frac + shift[j];
            if v >= 1.0 {
                v -= 1.0;
            }
            values.set(i, j, v);
        }
    }
    PointSet::new(SequenceKind::Lattice, seed, values)
}

/// Exact star-discrepancy `D*_n` by exhaustive enumeration of candidate
/// corners.
///
/// The supremum over anchored boxes `[0, a)` is attained in the limit at
/// corners whose coordinates are point coordinates or 1; both one-sided
/// limits are covered by counting once with strict and once with closed
/// comparisons. Only small instances are accepted (the candidate-corner
/// count is capped at [`STAR_DISCREPANCY_CORNER_LIMIT`]).
pub fn star_discrepancy(points: &PointSet) -> Result<f64, QmcError> {
    let n = points.n();
    let d = points.d();

    // Per-dimension candidate coordinates: the distinct point coordinates
    // plus 1 (the closed upper face).
    let mut grids: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut corners: u64 = 1;
    for j in 0..d {
        let mut coords: Vec<f64> = (0..n).map(|i| points.values.get(i, j)).collect();
        coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
        coords.dedup();
        coords.push(1.0);
        corners = corners.saturating_mul(coords.len() as u64);
        if corners > STAR_DISCREPANCY_CORNER_LIMIT {
            return Err(QmcError::SizeLimit {
                corners,
                limit: STAR_DISCREPANCY_CORNER_LIMIT,
            });
        }
        grids.push(coords);
    }

    let mut best: f64 = 0.0;
    let mut index = vec![0usize; d];
    loop {
        let corner: Vec<f64> = (0..d).map(|j| grids[j][index[j]]).collect();
        let volume: f64 = corner.iter().product();
        let mut strict = 0usize;
        let mut closed = 0usize;
        for i in 0..n {
            let row = points.values.row(i);
            let mut inside_strict = true;
            let mut inside_closed = true;
            for j in 0..d {
                let x = row[j];
                if x >= corner[j] {
                    inside_strict = false;
                }
                if x > corner[j] {
                    inside_closed = false;
                    break;
                }
            }
            if inside_strict {
                strict += 1;
            }
            if inside_closed {
                closed += 1;
            }
        }
        let under = volume - strict as f64 / n as f64;
        let over = closed as f64 / n as f64 - volume;
        best = best.max(under).max(over);

        // odometer over the candidate grid
        let mut j = 0;
        loop {
            if j == d {
                return Ok(best);
            }
            index[j] += 1;
            if index[j] < grids[j].len() {
                break;
            }
            index[j] = 0;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_set_1d(values: &[f64]) -> PointSet {
        PointSet::new(
            SequenceKind::Mc,
            None,
            Matrix::from_flat(values.len(), 1, values.to_vec()),
        )
    }

    #[test]
    fn mc_points_deterministic_from_seed() {
        let a = mc_points(3, 2, 0);
        let b = mc_points(3, 2, 0);
        assert_eq!(a.values(), b.values());
        let c = mc_points(3, 2, 1);
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn mc_points_shape_and_range() {
        let p = mc_points(1, 5, 9);
        assert_eq!(p.n(), 1);
        assert_eq!(p.d(), 5);
        assert!(p.row(0).iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn mc_mean_within_clt_bound() {
        let n = 1 << 14;
        let p = mc_points(n, 1, 12345);
        let mean: f64 = p.values().data().iter().sum::<f64>() / n as f64;
        let bound = 3.0 / (12.0 * n as f64).sqrt();
        assert!((mean - 0.5).abs() < bound, "mean={mean}");
    }

    #[test]
    fn lattice_matches_direct_formula() {
        let p = lattice_points(4, &[1, 1], None);
        let expect = [
            [0.0, 0.0],
            [0.25, 0.25],
            [0.5, 0.5],
            [0.75, 0.75],
        ];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(p.row(i), e);
        }
    }

    #[test]
    fn lattice_single_point_is_origin() {
        let p = lattice_points(1, &[7, 3], None);
        assert_eq!(p.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn lattice_shift_is_common_modulo_one() {
        let base = lattice_points(4, &[1, 1], None);
        let shifted = lattice_points(4, &[1, 1], Some(11));
        // Recover the shift from the first point and check it is common.
        let u: Vec<f64> = shifted.row(0).to_vec();
        for i in 0..4 {
            for j in 0..2 {
                let mut want = base.values().get(i, j) + u[j];
                if want >= 1.0 {
                    want -= 1.0;
                }
                assert!((shifted.values().get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn star_discrepancy_single_midpoint() {
        let v = star_discrepancy(&point_set_1d(&[0.5])).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn star_discrepancy_two_quartiles() {
        let v = star_discrepancy(&point_set_1d(&[0.25, 0.75])).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn star_discrepancy_point_at_origin() {
        // The closed count at a -> 0+ carries the whole mass: D* = 1.
        let v = star_discrepancy(&point_set_1d(&[0.0])).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn star_discrepancy_rejects_large_instances() {
        let p = mc_points(200, 4, 0);
        match star_discrepancy(&p) {
            Err(QmcError::SizeLimit { .. }) => {}
            other => panic!("expected SizeLimit, got {other:?}"),
        }
    }
}
