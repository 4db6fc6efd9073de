use super::closed_forms::*;
use super::*;
use crate::haar_mc::{design_moment, haar_su2, mc_moment};
use crate::linalg::{kron, pauli, paulis};
use crate::observables::{det_prefactor, o_det, random_hermitian, random_rank_r, schmidt_decompose, symmetric_pauli_family, random_symmetric_rank4, ProductTerm, RANK_TOLERANCE};
use crate::states::{bell_phi_plus, two_qubit_bloch, ThreeQubitState};
use crate::symgroup::v_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random orthonormal basis of 2×2 Hermitian matrices.
fn orthonormal_basis(g: &mut ChaCha8Rng) -> Vec<ComplexMatrix> {
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    while basis.len() < 4 {
        let mut m = random_hermitian(g);
        for b in &basis {
            let c = m.trace_product(b).re;
            m = &m - &b.scale_real(c);
        }
        let n = m.frobenius_norm();
        if n > 1e-6 {
            basis.push(m.scale_real(1.0 / n));
        }
    }
    basis
}

fn idx(t: usize, cycle: &str) -> usize {
    group(t).unwrap().index_of_str(cycle)
}

#[test]
fn solutions_resubstitute() {
    let mut g = rng(1);
    for t in 1..=5 {
        let gram = gram_matrix(t, 2).unwrap();
        for _ in 0..5 {
            let f: Vec<ComplexMatrix> = (0..t).map(|_| random_hermitian(&mut g)).collect();
            let refs: Vec<&ComplexMatrix> = f.iter().collect();
            let sol = solve_factor_coefficients(&refs).unwrap();
            let rhs = factor_traces(&refs, group(t).unwrap()).unwrap();
            for j in 0..rhs.len() {
                let lhs: C64 = (0..rhs.len()).map(|i| sol.x[i] * gram.entries[i][j] as f64).sum();
                assert!((lhs - rhs[j]).norm() < 1e-10 * (1.0 + rhs[j].norm()));
            }
        }
    }
}

#[test]
fn identity_factors_give_identity() {
    for t in 1..=4 {
        let id = pauli(0);
        let refs = vec![&id; t];
        let x = solve_factor_coefficients(&refs).unwrap().x;
        let g = group(t).unwrap();
        let dim = 1 << t;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, p) in g.elements().iter().enumerate() {
            sum = &sum + &v_matrix(p, 2).unwrap().to_dense().scale(x[i]);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-10, "t = {t}");
    }
}

#[test]
fn twirl_matches_haar_average_of_tensor_power() {
    // Σ_π x_π V_π equals E[(U A U†)^{⊗t}]; compare against the defining
    // property tr(Σ x V · V_π') = tr(A^{⊗t} V_π') with dense operators.
    let mut g = rng(2);
    let t = 3;
    let f: Vec<ComplexMatrix> = (0..t).map(|_| random_hermitian(&mut g)).collect();
    let refs: Vec<&ComplexMatrix> = f.iter().collect();
    let x = solve_factor_coefficients(&refs).unwrap().x;
    let gr = group(t).unwrap();
    let mut twirled = ComplexMatrix::zeros(8, 8);
    for (i, p) in gr.elements().iter().enumerate() {
        twirled = &twirled + &v_matrix(p, 2).unwrap().to_dense().scale(x[i]);
    }
    let dense = crate::linalg::kron_all(f.iter());
    for p in gr.elements() {
        let v = v_matrix(p, 2).unwrap();
        assert!((v.trace_against(&twirled) - v.trace_against(&dense)).norm() < 1e-10);
    }
}

#[test]
fn normalized_paulis_min_norm_solution() {
    // unnormalized Paulis: x = (0, 0, 0, 0, ∓i/3, ±i/3)
    let s = paulis();
    let x = solve_factor_coefficients(&[&s[0], &s[1], &s[2]]).unwrap().x;
    let third = 1.0 / 3.0;
    for i in 0..4 {
        assert!(x[i].norm() < 1e-12);
    }
    let (a, b) = (x[idx(3, "(123)")], x[idx(3, "(132)")]);
    assert!(a.re.abs() < 1e-12 && b.re.abs() < 1e-12);
    assert!((a.im.abs() - third).abs() < 1e-12, "{x:?}");
    assert!((a + b).norm() < 1e-12);
}

#[test]
fn reduced_gauge_zeroes_and_still_solves() {
    let mut g = rng(3);
    for t in 3..=4 {
        let gram = gram_matrix(t, 2).unwrap();
        let keep = reduced_support(t).unwrap();
        for _ in 0..10 {
            let f: Vec<ComplexMatrix> = (0..t).map(|_| random_hermitian(&mut g)).collect();
            let refs: Vec<&ComplexMatrix> = f.iter().collect();
            let x = solve_factor_coefficients(&refs).unwrap().x;
            let y = to_reduced_gauge(&x, t).unwrap();
            let rhs = factor_traces(&refs, group(t).unwrap()).unwrap();
            for (i, v) in y.iter().enumerate() {
                if !keep.contains(&i) {
                    assert_eq!(*v, ZERO);
                }
            }
            for j in 0..rhs.len() {
                let lhs: C64 = (0..rhs.len()).map(|i| y[i] * gram.entries[i][j] as f64).sum();
                assert!((lhs - rhs[j]).norm() < 1e-9 * (1.0 + rhs[j].norm()));
            }
        }
    }
}

#[test]
fn o_det_twirl_table() {
    let c = twirl_coefficients(&o_det(), 3, Gauge::MinNorm).unwrap();
    let two_thirds = 2.0 / 3.0;
    let expect = |a: &str, b: &str| -> f64 {
        let sa = match a {
            "(123)" => 1.0,
            "(132)" => -1.0,
            _ => 0.0,
        };
        let sb = match b {
            "(123)" => 1.0,
            "(132)" => -1.0,
            _ => 0.0,
        };
        -two_thirds * sa * sb
    };
    let g = group(3).unwrap();
    for a in g.elements() {
        for b in g.elements() {
            let (sa, sb) = (a.to_string(), b.to_string());
            let v = c.get_by_cycles(&[&sa, &sb]).unwrap();
            assert!((v - C64::new(expect(&sa, &sb), 0.0)).norm() < 1e-12, "{sa},{sb}: {v}");
        }
    }
}

#[test]
fn o_det_third_moment_is_det() {
    let mut g = rng(4);
    let coeffs = orbit_coefficients(&o_det(), 3).unwrap();
    assert!((coeffs.moment(bell_phi_plus().matrix()).unwrap() + 1.0).abs() < 1e-12);
    for _ in 0..20 {
        let s = TwoQubitState::random_record(&mut g);
        let m = coeffs.moment(&s.to_matrix()).unwrap();
        assert!((m - makhlin(&s).i1).abs() < 1e-10);
    }
}

#[test]
fn maximally_mixed_moment() {
    let mut g = rng(5);
    let rho = ComplexMatrix::identity(4).scale_real(0.25);
    for t in 1..=4 {
        let o = random_rank_r(&mut g, 3).unwrap().to_product_sum().unwrap();
        let expected = (o.to_matrix().trace().re / 4.0).powi(t as i32);
        assert!((exact_moment(&o, &rho, t).unwrap() - expected).abs() < 1e-10);
    }
}

#[test]
fn second_moment_of_zz_is_i2() {
    let o = ProductSum::from_paulis(&[(3.0, "ZZ")]).unwrap();
    let mut g = rng(6);
    for _ in 0..100 {
        let s = TwoQubitState::random_record(&mut g);
        assert!((exact_moment(&o, &s.to_matrix(), 2).unwrap() - makhlin(&s).i2).abs() < 1e-10);
    }
}

#[test]
fn permutation_trace_single_party_matches_cycle_formula() {
    let mut g = rng(7);
    let a = random_hermitian(&mut g);
    for p in group(4).unwrap().elements() {
        let direct = permutation_trace(&a, &[p]);
        let cycles = crate::symgroup::trace_with_v(&[&a, &a, &a, &a], p).unwrap();
        assert!((direct - cycles).norm() < 1e-10);
    }
}

#[test]
fn class_traces_match_brute_force() {
    let mut g = rng(8);
    let gr = group(3).unwrap();
    let mut states = vec![two_qubit_bloch(bell_phi_plus().matrix()).unwrap()];
    states.extend((0..10).map(|_| TwoQubitState::random_record(&mut g)));
    for s in &states {
        let rho = s.to_matrix();
        let values = class_traces_t3(s);
        for (k, (a, b)) in T3_CLASSES.iter().enumerate() {
            let (pa, pb) = (gr.element(idx(3, a)), gr.element(idx(3, b)));
            let brute = permutation_trace(&rho, &[pa, pb]);
            assert!((brute - C64::new(values[k], 0.0)).norm() < 1e-10, "{a},{b}");
        }
    }
    let bell = class_traces_t3(&states[0]);
    assert!((bell[9] - 1.0).abs() < 1e-12);
    assert_eq!(bell[0], 1.0);
}

#[test]
fn gauges_give_the_same_moment() {
    let mut g = rng(9);
    for t in 2..=4 {
        let o = random_rank_r(&mut g, 2).unwrap().to_product_sum().unwrap();
        let s = TwoQubitState::random_record(&mut g).to_matrix();
        let a = twirl_coefficients(&o, t, Gauge::MinNorm).unwrap().moment(&s).unwrap();
        let b = twirl_coefficients(&o, t, Gauge::Reduced).unwrap().moment(&s).unwrap();
        let c = exact_moment(&o, &s, t).unwrap();
        assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10, "t = {t}: {a} {b} {c}");
    }
}

#[test]
fn multiset_aggregation_matches_full_table() {
    let mut g = rng(10);
    let o = random_rank_r(&mut g, 3).unwrap().to_product_sum().unwrap();
    for t in 1..=4 {
        let full = twirl_coefficients(&o, t, Gauge::MinNorm).unwrap().orbit_sums().unwrap();
        let fast = orbit_coefficients(&o, t).unwrap();
        for (a, b) in full.coeff.iter().zip(&fast.coeff) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn engine_agrees_with_monte_carlo() {
    let mut g = rng(11);
    for t in 1..=4 {
        let o = random_rank_r(&mut g, 2).unwrap().to_product_sum().unwrap();
        let rho = crate::states::random_state(crate::states::StateKind::Mixed, 2, 100 + t as u64).unwrap();
        let exact = exact_moment(&o, rho.matrix(), t).unwrap();
        let est = mc_moment(&o, rho.matrix(), t as u32, 20000, t as u64).unwrap();
        assert!((exact - est.mean).abs() < 5.0 * est.stderr + 1e-12, "t = {t}: {exact} vs {est:?}");
    }
}

#[test]
fn moments_are_local_unitary_invariant() {
    let mut g = rng(12);
    let o = random_rank_r(&mut g, 4).unwrap().to_product_sum().unwrap();
    let s = TwoQubitState::random_record(&mut g).to_matrix();
    let u = kron(&haar_su2(&mut g), &haar_su2(&mut g));
    for t in 1..=4 {
        let a = exact_moment(&o, &s, t).unwrap();
        let b = exact_moment(&o, &s.conjugate_by(&u), t).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn symmetric_tables_are_symmetric() {
    let mut g = rng(13);
    let o = random_symmetric_rank4(&mut g).to_product_sum().unwrap();
    for t in 2..=4 {
        let c = twirl_coefficients(&o, t, Gauge::MinNorm).unwrap();
        let n = group(t).unwrap().order();
        for a in 0..n {
            for b in 0..n {
                assert!((c.get(&[a, b]) - c.get(&[b, a])).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn product_observables_ignore_partial_transpose() {
    let mut g = rng(14);
    for t in 1..=4 {
        let o = ProductSum::product(vec![random_hermitian(&mut g), random_hermitian(&mut g)]).unwrap();
        let s = TwoQubitState::random_record(&mut g);
        assert!(odd_part(&o, &s, t).unwrap().abs() < 1e-10);
    }
}

#[test]
fn decomposition_examples() {
    let d = decompose(&o_det(), 3, &default_dictionary(3)).unwrap();
    assert_eq!(d.dictionary, ["1", "I2", "I4", "I7", "I1", "I12"]);
    for name in ["1", "I2", "I4", "I7", "I12"] {
        assert!(d.coefficient(name).unwrap().abs() < 1e-10);
    }
    assert!((d.coefficient("I1").unwrap() - 1.0).abs() < 1e-10);
    assert!(d.residual < 1e-10);

    let zz = ProductSum::from_paulis(&[(3.0, "ZZ")]).unwrap();
    let d = decompose(&zz, 2, &default_dictionary(3)).unwrap();
    assert!((d.coefficient("I2").unwrap() - 1.0).abs() < 1e-10);
    for name in ["1", "I4", "I7", "I1", "I12"] {
        assert!(d.coefficient(name).unwrap().abs() < 1e-10);
    }
}

#[test]
fn cubic_dictionary_spans_every_third_moment() {
    let mut g = rng(15);
    for r in 1..=4 {
        let o = random_rank_r(&mut g, r).unwrap();
        let d = decompose(&o.to_product_sum().unwrap(), 3, &default_dictionary(3)).unwrap();
        assert!(d.residual < 1e-9);
        assert!((d.coefficient("I1").unwrap() - det_prefactor(&o)).abs() < 1e-9, "rank {r}");
    }
}

#[test]
fn quartic_dictionary_spans_fourth_moments() {
    let mut g = rng(16);
    let dict = default_dictionary(4);
    assert_eq!(dict.len(), 16);
    let o = random_rank_r(&mut g, 4).unwrap().to_product_sum().unwrap();
    let d = decompose(&o, 4, &dict).unwrap();
    assert!(d.residual < 1e-8, "{}", d.residual);
}

#[test]
fn odd_fits() {
    let mut g = rng(17);
    let fit = odd_fit(&o_det(), 3).unwrap();
    assert!((fit.det - 1.0).abs() < 1e-10 && fit.hodge.abs() < 1e-10);
    for t in 3..=4 {
        let o = random_rank_r(&mut g, 2).unwrap().to_product_sum().unwrap();
        let fit = odd_fit(&o, t).unwrap();
        assert!(fit.det.abs() < 1e-9 && fit.hodge.abs() < 1e-9 && fit.residual < 1e-10);
    }
    // rank 3 at t = 4: I14 enters, but only through I1 + I14/6
    for _ in 0..20 {
        let o = random_rank_r(&mut g, 3).unwrap().to_product_sum().unwrap();
        let fit = odd_fit(&o, 4).unwrap();
        assert!(fit.residual < 1e-9 && fit.hodge.abs() > 1e-6, "{fit:?}");
        assert!((fit.det - 6.0 * fit.hodge).abs() < 1e-8 * fit.det.abs().max(1.0), "{fit:?}");
    }
    let (plus, minus) = crate::observables::hodge_pair();
    let (p, m) = (odd_fit(&plus, 4).unwrap(), odd_fit(&minus, 4).unwrap());
    assert!((p.hodge - m.hodge).abs() > 1e-3, "{p:?} {m:?}");
}

#[test]
fn engine_matches_icosahedral_design() {
    let mut g = rng(23);
    for r in 1..=4 {
        let o = random_rank_r(&mut g, r).unwrap().to_product_sum().unwrap();
        let rho = crate::states::TwoQubitState::random_record(&mut g).to_matrix();
        for t in 1..=5 {
            let e = exact_moment(&o, &rho, t).unwrap();
            let d = design_moment(&o, &rho, t as u32).unwrap();
            assert!((e - d).abs() < 1e-9 * e.abs().max(1.0), "r={r} t={t}: {e} vs {d}");
        }
    }
    let o = ProductSum::new(vec![
        ProductTerm::new(1.0, (0..3).map(|_| random_hermitian(&mut g)).collect()),
        ProductTerm::new(0.5, (0..3).map(|_| random_hermitian(&mut g)).collect()),
    ])
    .unwrap();
    let rho = ThreeQubitState::random_record(&mut g).to_matrix();
    for t in 2..=3 {
        let (e, d) = (exact_moment(&o, &rho, t).unwrap(), design_moment(&o, &rho, t as u32).unwrap());
        assert!((e - d).abs() < 1e-9, "{e} vs {d}");
    }
}

#[test]
fn symmetric_class_coefficients_match_engine() {
    let mut g = rng(18);
    let mut observables = vec![schmidt_decompose(&o_det().to_matrix(), RANK_TOLERANCE).unwrap()];
    observables.push(symmetric_pauli_family([0.5, 1.0, 2.0], &haar_su2(&mut g)));
    for _ in 0..5 {
        observables.push(random_symmetric_rank4(&mut g));
    }
    for o in &observables {
        let table = twirl_coefficients(&o.to_product_sum().unwrap(), 3, Gauge::Reduced).unwrap();
        let engine = class_averages_t3(&table).unwrap();
        let formula = symmetric_coefficients_t3(o).unwrap();
        for k in 0..7 {
            assert!((engine[k] - formula[k]).norm() < 1e-10, "class {k}: {} vs {}", engine[k], formula[k]);
        }
        // class coefficients reproduce the fitted decomposition
        let inv = symmetric_invariant_coefficients(&formula);
        let d = decompose(&o.to_product_sum().unwrap(), 3, &default_dictionary(3)).unwrap();
        assert!((inv[0].re - d.coefficient("1").unwrap()).abs() < 1e-9);
        assert!((inv[1].re - d.coefficient("I4").unwrap()).abs() < 1e-9);
        assert!((inv[1].re - d.coefficient("I7").unwrap()).abs() < 1e-9);
        assert!((inv[2].re - d.coefficient("I2").unwrap()).abs() < 1e-9);
        assert!((inv[3].re - d.coefficient("I12").unwrap()).abs() < 1e-9);
        assert!((inv[4].re - d.coefficient("I1").unwrap()).abs() < 1e-9);
    }
}

#[test]
fn symmetric_family_measures_only_det() {
    let mut g = rng(19);
    let s = [0.7, 1.3, 2.1];
    let o = symmetric_pauli_family(s, &haar_su2(&mut g));
    let d = decompose(&o.to_product_sum().unwrap(), 3, &default_dictionary(3)).unwrap();
    let scaled: f64 = s.iter().map(|x| 2.0 * x).product::<f64>() / 8.0;
    assert!((d.coefficient("I1").unwrap() - scaled).abs() < 1e-9);
    for name in ["1", "I2", "I4", "I7", "I12"] {
        assert!(d.coefficient(name).unwrap().abs() < 1e-9);
    }
}

#[test]
fn kempe_class_vectors() {
    let o2 = ProductSum::from_paulis(&[(1.0, "III"), (1.0, "ZZZ")]).unwrap();
    let c = kempe_class_coefficients(&o2).unwrap();
    let expected = [8.0 / 9.0, 0.0, 0.0, 0.0, 0.0];
    for k in 0..5 {
        assert!((c[k] - C64::new(expected[k], 0.0)).norm() < 1e-12, "{c:?}");
    }
    let one_minus_x = &pauli(0) - &pauli(1);
    let o3 = ProductSum::new(vec![
        ProductTerm::new(1.0, vec![pauli(0), pauli(0), one_minus_x.clone()]),
        ProductTerm::new(1.0, vec![pauli(3), pauli(3), one_minus_x]),
    ])
    .unwrap();
    let c = kempe_class_coefficients(&o3).unwrap();
    let expected = [8.0 / 9.0, 16.0 / 9.0, 0.0, 0.0, 0.0];
    for k in 0..5 {
        assert!((c[k] - C64::new(expected[k], 0.0)).norm() < 1e-12, "{c:?}");
    }
}

#[test]
fn three_party_moment_matches_monte_carlo() {
    let mut g = rng(20);
    let o = ProductSum::new(vec![
        ProductTerm::new(1.0, vec![random_hermitian(&mut g), random_hermitian(&mut g), random_hermitian(&mut g)]),
        ProductTerm::new(0.5, vec![random_hermitian(&mut g), random_hermitian(&mut g), random_hermitian(&mut g)]),
    ])
    .unwrap();
    let rho = crate::states::random_state(crate::states::StateKind::Mixed, 3, 5).unwrap();
    let exact = exact_moment(&o, rho.matrix(), 3).unwrap();
    let est = mc_moment(&o, rho.matrix(), 3, 20000, 3).unwrap();
    assert!((exact - est.mean).abs() < 5.0 * est.stderr, "{exact} vs {est:?}");
    // GHZ-type product observable: maximally mixed gives (tr O/8)^t
    let mixed = ThreeQubitState::default().to_matrix();
    let expected = (o.to_matrix().trace().re / 8.0).powi(3);
    assert!((exact_moment(&o, &mixed, 3).unwrap() - expected).abs() < 1e-10);
}

#[test]
fn t3_reduced_closed_form() {
    let mut g = rng(21);
    for _ in 0..20 {
        let f: Vec<ComplexMatrix> = (0..3).map(|_| random_hermitian(&mut g)).collect();
        let x = to_reduced_gauge(&solve_factor_coefficients(&[&f[0], &f[1], &f[2]]).unwrap().x, 3).unwrap();
        let closed = reduced_solution_t3([&f[0], &f[1], &f[2]]);
        for (k, cycle) in ["()", "(12)", "(13)", "(23)", "(123)"].iter().enumerate() {
            assert!((x[idx(3, cycle)] - closed[k]).norm() < 1e-10, "{cycle}");
        }
        let a = &f[0];
        let x = to_reduced_gauge(&solve_factor_coefficients(&[a, a, a]).unwrap().x, 3).unwrap();
        let swap = equal_factor_swap_coefficient(a);
        for cycle in ["(12)", "(13)", "(23)"] {
            assert!((x[idx(3, cycle)] - swap).norm() < 1e-10);
        }
    }
}

#[test]
fn t4_closed_forms() {
    let mut g = rng(22);
    for _ in 0..10 {
        let basis = orthonormal_basis(&mut g);
        for code in 0..81usize {
            let j = [code % 3, (code / 3) % 3, (code / 9) % 3, code / 27];
            let f = [&basis[j[0]], &basis[j[1]], &basis[j[2]], &basis[j[3]]];
            let x = to_reduced_gauge(&solve_factor_coefficients(&f).unwrap().x, 4).unwrap();
            assert!((x[idx(4, "(123)")] - reduced_x123_t4(f)).norm() < 1e-10);
            let diff = x[idx(4, "(1234)")] - x[idx(4, "(1432)")];
            assert!((diff - reduced_cycle_difference_t4(f)).norm() < 1e-10);
            // rank ≤ 3: the 3-cycle coefficient vanishes
            assert!(x[idx(4, "(123)")].norm() < 1e-10);
        }
    }
}

#[test]
fn rank_two_tuples_are_inverse_symmetric_at_t4() {
    let mut g = rng(23);
    for _ in 0..10 {
        let basis = orthonormal_basis(&mut g);
        for code in 0..16usize {
            let f: Vec<&ComplexMatrix> = (0..4).map(|k| &basis[(code >> k) & 1]).collect();
            let x = to_reduced_gauge(&solve_factor_coefficients(&f).unwrap().x, 4).unwrap();
            for (a, b) in [("(1234)", "(1432)"), ("(1243)", "(1342)"), ("(1324)", "(1423)")] {
                assert!((x[idx(4, a)] - x[idx(4, b)]).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn vanishing_expressions_vanish() {
    let mut g = rng(24);
    for _ in 0..100 {
        let b = orthonormal_basis(&mut g);
        for v in vanishing_expressions(&b[0], &b[1], &b[2]) {
            assert!(v.norm() < 1e-10);
        }
        for v in eigenvalue_identities(&b[0], &b[1]) {
            assert!(v.norm() < 1e-10);
        }
    }
}

#[test]
fn placement_sign_table() {
    let brute = placement_signs().unwrap();
    assert_eq!(brute, PLACEMENT_SIGNS);
    let products = placement_products(&brute);
    let inverse = [5, 3, 4, 1, 2, 0];
    for a in 0..6 {
        for b in 0..6 {
            let expected = if a == b { 4 } else if b == inverse[a] { -4 } else { 0 };
            assert_eq!(products[a][b], expected, "{} {}", FOUR_CYCLES[a], FOUR_CYCLES[b]);
        }
    }
}

#[test]
fn unsupported_requests_fail_cleanly() {
    let o = ProductSum::from_paulis(&[(1.0, "XYZ")]).unwrap();
    assert!(matches!(exact_moment(&o, &ComplexMatrix::identity(8), 5), Err(Error::UnsupportedMoment { .. })));
    assert!(matches!(exact_moment(&o_det(), &ComplexMatrix::identity(8), 3), Err(Error::DimensionMismatch(_))));
}
