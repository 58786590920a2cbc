//! Halton sequence with per-digit random permutations.
//!
//! Dimension `j` uses the `j`-th prime as base. The unrandomized sequence
//! starts at index 0 (the all-zeros point). Randomization draws an
//! independent uniform permutation of `{0, .., b-1}` for every
//! (dimension, digit position) pair and applies it consistently to all
//! points; trailing zero digits are permuted too, which is what makes every
//! point marginally uniform and breaks the all-zeros first point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointSet, QmcError, SequenceKind};
use crate::matrix::Matrix;

/// Digit positions randomized per dimension. With the smallest base 2 this
/// already exhausts double precision.
const MAX_DIGITS: usize = 64;

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate: u64 = 2;
    while primes.len() < count {
        if primes.iter().all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn random_permutation(rng: &mut ChaCha8Rng, len: usize) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..len as u32).collect();
    for i in (1..len).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// First `n` points of the (optionally randomized) Halton sequence in
/// dimension `d`.
pub fn halton_points(n: usize, d: usize, seed: Option<u64>) -> Result<PointSet, QmcError> {
    if n == 0 || d == 0 {
        return Err(QmcError::InvalidArgument("n and d must be >= 1".into()));
    }
    let bases = first_primes(d);

    // perms[j][pos] is the permutation for digit position `pos` of
    // dimension `j`; identity when unrandomized.
    let perms: Option<Vec<Vec<Vec<u32>>>> = seed.map(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        bases
            .iter()
            .map(|&b| {
                (0..MAX_DIGITS)
                    .map(|_| random_permutation(&mut rng, b as usize))
                    .collect()
            })
            .collect()
    });

    let mut values = Matrix::zeros(n, d);
    let mut digits = [0u32; MAX_DIGITS];
    for i in 0..n {
        for (j, &b) in bases.iter().enumerate() {
            let mut rem = i as u64;
            for digit in digits.iter_mut() {
                *digit = (rem % b) as u32;
                rem /= b;
            }
            let v = match &perms {
                Some(p) => radical_inverse_permuted(&digits, b, &p[j]),
                None => radical_inverse_plain(&digits, b),
            };
            values.set(i, j, v);
        }
    }
    Ok(PointSet::new(SequenceKind::Halton, seed, values))
}

/// Sum digits from the least significant position so small terms accumulate
/// first.
fn radical_inverse_plain(digits: &[u32; MAX_DIGITS], base: u64) -> f64 {
    let b = base as f64;
    let mut v = 0.0;
    for &digit in digits.iter().rev() {
        v = (v + f64::from(digit)) / b;
    }
    v
}

fn radical_inverse_permuted(digits: &[u32; MAX_DIGITS], base: u64, perms: &[Vec<u32>]) -> f64 {
    let b = base as f64;
    let mut v = 0.0;
    for (pos, &digit) in digits.iter().enumerate().rev() {
        v = (v + f64::from(perms[pos][digit as usize])) / b;
    }
    // The exact value is < 1 but can round up to 1.0 when every permuted
    // digit is maximal; keep the half-open range.
    v.min(1.0 - f64::EPSILON / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unrandomized_first_points_by_hand() {
        // Radical inverses in bases 2 and 3: index 0 -> (0, 0),
        // index 1 -> (1/2, 1/3), index 3 -> (3/4, 1/9).
        let p = halton_points(4, 2, None).unwrap();
        assert_eq!(p.row(0), &[0.0, 0.0]);
        assert!((p.row(1)[0] - 0.5).abs() < 1e-15);
        assert!((p.row(1)[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.row(3)[0] - 0.75).abs() < 1e-15);
        assert!((p.row(3)[1] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn first_primes_are_correct() {
        assert_eq!(first_primes(8), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn randomized_points_in_range_and_reproducible() {
        let a = halton_points(256, 3, Some(5)).unwrap();
        let b = halton_points(256, 3, Some(5)).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().data().iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn randomization_usually_moves_the_origin() {
        // With a nonidentity permutation in any digit position the first
        // point leaves 0 exactly; identity in all 64 positions has
        // probability well below 2^-64 for base 2 and is not observed.
        for seed in 0..20 {
            let p = halton_points(1, 2, Some(seed)).unwrap();
            assert!(p.row(0)[0] > 0.0, "seed {seed}");
            assert!(p.row(0)[1] > 0.0, "seed {seed}");
        }
    }
}
