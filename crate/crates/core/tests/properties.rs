use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lu_moments::haar_mc::haar_local;
use lu_moments::invariants::{kempe, makhlin, MakhlinRecord};
use lu_moments::io::{parse_observable, parse_state, observable_to_value, state_to_value};
use lu_moments::linalg::{kron_all, ComplexMatrix, C64};
use lu_moments::observables::{random_hermitian, random_rank_r, schmidt_decompose, ProductSum, RANK_TOLERANCE};
use lu_moments::states::{random_state_with, three_qubit_bloch, two_qubit_bloch, DensityMatrix, StateKind};
use lu_moments::symgroup::{enumerate_group, Permutation};
use lu_moments::twirl::orbit_coefficients;

fn kind(pure: bool) -> StateKind {
    if pure {
        StateKind::Pure
    } else {
        StateKind::Mixed
    }
}

fn rotated(rho: &DensityMatrix, g: &mut ChaCha8Rng) -> DensityMatrix {
    let u = haar_local(g, rho.qubits());
    rho.conjugate_by(&kron_all(&u)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_qubit_invariants_ignore_local_unitaries(seed in any::<u64>(), pure in any::<bool>()) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state_with(kind(pure), 2, &mut g).unwrap();
        let moved = rotated(&rho, &mut g);
        let (a, b) = (makhlin(&two_qubit_bloch(rho.matrix()).unwrap()), makhlin(&two_qubit_bloch(moved.matrix()).unwrap()));
        for name in MakhlinRecord::CONTINUOUS {
            let (x, y) = (a.continuous(name).unwrap(), b.continuous(name).unwrap());
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{name}: {x} vs {y}");
        }
    }

    #[test]
    fn kempe_ignores_local_unitaries(seed in any::<u64>()) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state_with(StateKind::Mixed, 3, &mut g).unwrap();
        let moved = rotated(&rho, &mut g);
        let (a, b) = (kempe(&three_qubit_bloch(rho.matrix()).unwrap()), kempe(&three_qubit_bloch(moved.matrix()).unwrap()));
        prop_assert!((a.kempe - b.kempe).abs() <= 1e-10);
    }

    #[test]
    fn moments_ignore_local_unitaries(seed in any::<u64>(), t in 1usize..=4, rank in 1usize..=4) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let o = random_rank_r(&mut g, rank).unwrap().to_product_sum().unwrap();
        let rho = random_state_with(StateKind::Mixed, 2, &mut g).unwrap();
        let moved = rotated(&rho, &mut g);
        let c = orbit_coefficients(&o, t).unwrap();
        let (x, y) = (c.moment(rho.matrix()).unwrap(), c.moment(moved.matrix()).unwrap());
        prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
    }

    #[test]
    fn first_moment_is_normalized_trace(seed in any::<u64>(), parties in 2usize..=3) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let factors: Vec<_> = (0..parties).map(|_| random_hermitian(&mut g)).collect();
        let expected: f64 = factors.iter().map(|f| f.trace().re / 2.0).product();
        let o = ProductSum::product(factors).unwrap();
        let rho = random_state_with(StateKind::Mixed, parties, &mut g).unwrap();
        let got = orbit_coefficients(&o, 1).unwrap().moment(rho.matrix()).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn schmidt_decomposition_reconstructs(seed in any::<u64>(), rank in 1usize..=4) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let m = random_rank_r(&mut g, rank).unwrap().reconstruct();
        let s = schmidt_decompose(&m, RANK_TOLERANCE).unwrap();
        prop_assert_eq!(s.rank(), rank);
        prop_assert!(s.reconstruct().max_abs_diff(&m) <= 1e-12 * m.frobenius_norm().max(1.0));
        prop_assert!(s.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), qubits in 2usize..=3, party in 1usize..=3) {
        prop_assume!(party <= qubits);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state_with(StateKind::Mixed, qubits, &mut g).unwrap();
        let twice = rho.partial_transpose(party).unwrap().partial_transpose(party).unwrap();
        prop_assert!(twice.matrix().max_abs_diff(rho.matrix()) == 0.0);
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), qubits in 2usize..=3, rank in 1usize..=4) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state_with(StateKind::Mixed, qubits, &mut g).unwrap();
        let back = parse_state(&state_to_value(&rho).unwrap().to_string()).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
        let o = random_rank_r(&mut g, rank).unwrap().to_product_sum().unwrap();
        let back = parse_observable(&observable_to_value(&o).unwrap().to_string()).unwrap();
        prop_assert!(back.to_matrix().max_abs_diff(&o.to_matrix()) <= 1e-14 * o.to_matrix().frobenius_norm().max(1.0));
    }

    #[test]
    fn permutations_parse_what_they_print(t in 1usize..=6, k in any::<prop::sample::Index>()) {
        let all = enumerate_group(t).unwrap();
        let p = &all[k.index(all.len())];
        let q = Permutation::parse(t, &p.to_string()).unwrap();
        prop_assert_eq!(&q, p);
        prop_assert!(p.compose(&p.inverse()).is_identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs_rank_deficient(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=8, rank in 0usize..=8) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(rows, cols);
        for _ in 0..rank.min(rows).min(cols) {
            let x = ComplexMatrix::from_fn(rows, 1, |_, _| C64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)));
            let y = ComplexMatrix::from_fn(1, cols, |_, _| C64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)));
            m = &m + &x.matmul(&y);
        }
        let svd = m.svd();
        prop_assert!(svd.reconstruct().max_abs_diff(&m) <= 1e-13 * m.frobenius_norm().max(1.0));
        prop_assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let small = svd.singular_values.iter().filter(|&&s| s <= 1e-12 * m.frobenius_norm().max(1.0)).count();
        prop_assert_eq!(svd.singular_values.len() - small, rank.min(rows).min(cols));
    }

    #[test]
    fn hermitian_eigen_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let x = ComplexMatrix::from_fn(n, n, |_, _| C64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)));
        let h = &x + &x.adjoint();
        let (values, vectors) = h.hermitian_eigen().unwrap();
        let d = ComplexMatrix::diagonal(&values.iter().map(|&l| C64::new(l, 0.0)).collect::<Vec<_>>());
        prop_assert!(vectors.matmul(&d).matmul(&vectors.adjoint()).max_abs_diff(&h) <= 1e-12 * h.frobenius_norm().max(1.0));
    }
}
