//! Sobol' sequence with Gray-code generation and linear matrix scrambling.
//!
//! Direction numbers come from the Joe-Kuo `new-joe-kuo-6` table (see
//! `sobol_data.rs`); the first dimension is van der Corput in base 2.
//! Points are generated in Gray-code order, which visits a permutation of
//! the same `2^m`-point net as natural order, starting at the origin.
//! Randomization applies an independent lower-triangular linear matrix
//! scramble per dimension followed by a digital shift, so every point is
//! marginally uniform while the net structure is preserved.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sobol_data::JOE_KUO;
use super::{PointSet, QmcError, SequenceKind};
use crate::matrix::Matrix;

/// Highest dimension covered by the packaged direction-number table.
pub const SOBOL_MAX_DIM: usize = JOE_KUO.len() + 1;

const BITS: usize = 32;
const SCALE: f64 = 1.0 / 4294967296.0; // 2^-32

/// Direction vectors for one dimension, MSB-aligned in a `u32`.
fn direction_vectors(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        // van der Corput: identity matrix
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (31 - k);
        }
        return v;
    }
    let entry = &JOE_KUO[dim - 1];
    let s = entry.degree as usize;
    for k in 0..s.min(BITS) {
        v[k] = entry.m[k] << (31 - k);
    }
    for k in s..BITS {
        let mut vk = v[k - s] ^ (v[k - s] >> s);
        for i in 1..s {
            if (entry.a >> (s - 1 - i)) & 1 == 1 {
                vk ^= v[k - i];
            }
        }
        v[k] = vk;
    }
    v
}

/// Apply a lower-triangular scramble matrix (given as per-digit row masks)
/// to one MSB-aligned integer.
fn apply_rows(rows: &[u32; BITS], x: u32) -> u32 {
    let mut y = 0u32;
    for (i, &row) in rows.iter().enumerate() {
        let bit = (row & x).count_ones() & 1;
        y |= bit << (31 - i);
    }
    y
}

/// Random lower-triangular matrix with unit diagonal, as row masks. Row `i`
/// (digit `i`, most significant first) may depend on digits `0..=i`.
fn random_lower_triangular(rng: &mut ChaCha8Rng) -> [u32; BITS] {
    let mut rows = [0u32; BITS];
    for (i, row) in rows.iter_mut().enumerate() {
        let above = if i == 0 { 0 } else { rng.next_u32() & (!0u32 << (32 - i)) };
        *row = above | (1 << (31 - i));
    }
    rows
}

/// First `2^m` points of the (optionally scrambled) Sobol' sequence.
///
/// Without a seed this is the raw digital net including the origin; with a
/// seed, a linear matrix scramble plus digital shift is applied per
/// dimension and every point is marginally uniform on the `2^-32` grid.
pub fn sobol_points(m: u32, d: usize, seed: Option<u64>) -> Result<PointSet, QmcError> {
    if m >= 32 {
        return Err(QmcError::InvalidArgument(format!(
            "2^{m} points exceed the 32-bit point index"
        )));
    }
    sobol_points_n(1usize << m, d, seed)
}

/// First `n` points of the sequence, for callers that cannot use a power
/// of 2. The net balance properties only hold at `n = 2^m`.
pub fn sobol_points_n(n: usize, d: usize, seed: Option<u64>) -> Result<PointSet, QmcError> {
    if d == 0 {
        return Err(QmcError::InvalidArgument("d must be >= 1".into()));
    }
    if d > SOBOL_MAX_DIM {
        return Err(QmcError::DimensionUnsupported {
            d,
            max: SOBOL_MAX_DIM,
        });
    }
    if n == 0 {
        return Err(QmcError::InvalidArgument("n must be >= 1".into()));
    }
    if n as u64 >= 1u64 << 32 {
        return Err(QmcError::InvalidArgument("n exceeds the 32-bit point index".into()));
    }

    let mut dirs: Vec<[u32; BITS]> = (0..d).map(direction_vectors).collect();
    let mut shift = vec![0u32; d];
    if let Some(s) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        for j in 0..d {
            let rows = random_lower_triangular(&mut rng);
            // The net is linear in GF(2), so scrambling the direction
            // vectors scrambles every point.
            for v in dirs[j].iter_mut() {
                *v = apply_rows(&rows, *v);
            }
            shift[j] = rng.next_u32();
        }
    }

    let mut values = Matrix::zeros(n, d);
    let mut state = vec![0u32; d];
    for i in 0..n {
        if i > 0 {
            let c = (i as u32).trailing_zeros() as usize;
            for j in 0..d {
                state[j] ^= dirs[j][c];
            }
        }
        for j in 0..d {
            values.set(i, j, f64::from(state[j] ^ shift[j]) * SCALE);
        }
    }
    Ok(PointSet::new(SequenceKind::Sobol, seed, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_net_is_origin() {
        let p = sobol_points(0, 1, None).unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.row(0), &[0.0]);
    }

    #[test]
    fn van_der_corput_gray_code_order() {
        let p = sobol_points(2, 1, None).unwrap();
        let got: Vec<f64> = (0..4).map(|i| p.row(i)[0]).collect();
        assert_eq!(got, vec![0.0, 0.5, 0.75, 0.25]);
    }

    #[test]
    fn matches_reference_first_eight_points_d6() {
        // Frozen from scipy.stats.qmc.Sobol(d=6, scramble=False), which uses
        // the same Joe-Kuo table and Gray-code order.
        let expect: [[f64; 6]; 8] = [
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
            [0.75, 0.25, 0.25, 0.25, 0.75, 0.75],
            [0.25, 0.75, 0.75, 0.75, 0.25, 0.25],
            [0.375, 0.375, 0.625, 0.875, 0.375, 0.125],
            [0.875, 0.875, 0.125, 0.375, 0.875, 0.625],
            [0.625, 0.125, 0.875, 0.625, 0.625, 0.875],
            [0.125, 0.625, 0.375, 0.125, 0.125, 0.375],
        ];
        let p = sobol_points(3, 6, None).unwrap();
        for (i, row) in expect.iter().enumerate() {
            assert_eq!(p.row(i), row, "point {i}");
        }
    }

    #[test]
    fn scrambled_points_stay_in_unit_cube_and_differ() {
        let plain = sobol_points(6, 4, None).unwrap();
        let scrambled = sobol_points(6, 4, Some(3)).unwrap();
        assert_ne!(plain.values(), scrambled.values());
        assert!(scrambled
            .values()
            .data()
            .iter()
            .all(|&v| (0.0..1.0).contains(&v)));
        // Same seed reproduces bit-identically.
        let again = sobol_points(6, 4, Some(3)).unwrap();
        assert_eq!(scrambled.values(), again.values());
    }

    #[test]
    fn dimension_beyond_table_is_rejected() {
        match sobol_points(1, SOBOL_MAX_DIM + 1, None) {
            Err(QmcError::DimensionUnsupported { .. }) => {}
            other => panic!("expected DimensionUnsupported, got {other:?}"),
        }
    }

    #[test]
    fn scrambling_preserves_dyadic_balance_per_coordinate() {
        // LMS + digital shift keeps each coordinate a (0, m, 1)-net: every
        // dyadic interval of length 2^-k holds exactly 2^(m-k) points.
        let m = 6;
        let p = sobol_points(m, 8, Some(17)).unwrap();
        for j in 0..8 {
            for k in 1..=m {
                let bins = 1usize << k;
                let mut counts = vec![0usize; bins];
                for i in 0..p.n() {
                    let v = p.row(i)[j];
                    counts[(v * bins as f64) as usize] += 1;
                }
                let want = 1usize << (m - k);
                assert!(
                    counts.iter().all(|&c| c == want),
                    "dim {j} level {k}: {counts:?}"
                );
            }
        }
    }
}
