//! Distributional properties of the point-set generators: marginal
//! uniformity under randomization, digital-net balance, discrepancy of the
//! van der Corput prefix, and determinism.

use flowqmc::qmc::{
    generate, halton_points, mc_points, sobol_points, star_discrepancy, GeneratorConfig,
    LatticeSpec, SequenceKind,
};
use proptest::prelude::*;

#[test]
fn scrambled_sobol_marginal_means_over_100_seeds() {
    let n = 1 << 10;
    let d = 4;
    let bound = 3.0 / (12.0 * n as f64).sqrt();
    for seed in 0..100 {
        let p = sobol_points(10, d, Some(seed)).unwrap();
        for j in 0..d {
            let mean: f64 = (0..p.n()).map(|i| p.row(i)[j]).sum::<f64>() / n as f64;
            assert!(
                (mean - 0.5).abs() < bound,
                "seed {seed} dim {j}: mean {mean}"
            );
        }
    }
}

#[test]
fn randomized_halton_marginal_means_and_no_exact_zero() {
    let n = 1 << 12;
    let bound = 3.0 / (12.0 * n as f64).sqrt();
    for seed in 0..100 {
        let p = halton_points(n, 2, Some(seed)).unwrap();
        for j in 0..2 {
            let col: Vec<f64> = (0..n).map(|i| p.row(i)[j]).collect();
            assert!(col.iter().all(|&v| v > 0.0), "seed {seed} dim {j} hit 0");
            let mean: f64 = col.iter().sum::<f64>() / n as f64;
            assert!(
                (mean - 0.5).abs() < bound,
                "seed {seed} dim {j}: mean {mean}"
            );
        }
    }
}

#[test]
fn sobol_dyadic_balance_all_coordinates() {
    // every coordinate of a 2^m-point net puts exactly 2^(m-k) points into
    // each dyadic interval of length 2^-k, scrambled or not
    let m = 8;
    let n = 1usize << m;
    for seed in [None, Some(42)] {
        let p = sobol_points(m as u32, 16, seed).unwrap();
        for j in 0..16 {
            for k in 1..=m {
                let bins = 1usize << k;
                let mut counts = vec![0usize; bins];
                for i in 0..n {
                    counts[(p.row(i)[j] * bins as f64) as usize] += 1;
                }
                let want = n >> k;
                assert!(
                    counts.iter().all(|&c| c == want),
                    "seed {seed:?} dim {j} level {k}"
                );
            }
        }
    }
}

#[test]
fn van_der_corput_star_discrepancy_is_two_to_minus_m() {
    for m in 0..=8u32 {
        let p = sobol_points(m, 1, None).unwrap();
        let d_star = star_discrepancy(&p).unwrap();
        let want = 0.5f64.powi(m as i32);
        assert!(
            (d_star - want).abs() < 1e-12,
            "m={m}: {d_star} vs {want}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_are_deterministic_and_in_range(
        kind_idx in 0usize..4,
        n in 1usize..200,
        d in 1usize..8,
        seed in any::<u64>(),
        randomize in any::<bool>(),
    ) {
        let kind = [SequenceKind::Mc, SequenceKind::Sobol, SequenceKind::Halton, SequenceKind::Lattice][kind_idx];
        let lattice = (kind == SequenceKind::Lattice).then(|| LatticeSpec {
            n,
            z: (0..d as u64).map(|j| 2 * j + 1).collect(),
        });
        let config = GeneratorConfig { kind, d, randomize, seed, lattice };
        let a = generate(&config, n).unwrap();
        let b = generate(&config, n).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert_eq!(a.n(), n);
        prop_assert_eq!(a.d(), d);
        prop_assert!(a.values().data().iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn mc_points_differ_across_seeds(seed in 0u64..10_000) {
        let a = mc_points(16, 2, seed);
        let b = mc_points(16, 2, seed.wrapping_add(1));
        prop_assert_ne!(a.values(), b.values());
    }
}
