//! Monte Carlo estimates of randomized-measurement moments with Haar-random
//! local unitaries.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::observables::ProductSum;
use crate::rng;

/// Haar-random element of SU(2): a uniformly random unit quaternion
/// `(a, b, c, d)` mapped to `[[a+ib, c+id], [-c+id, a-ib]]`.
pub fn haar_su2(rng: &mut impl Rng) -> ComplexMatrix {
    let mut q = [0.0f64; 4];
    let norm = loop {
        for x in q.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            break n;
        }
    };
    quaternion_matrix(q.map(|x| x / norm))
}

/// One Haar-random SU(2) element per party.
pub fn haar_local(rng: &mut impl Rng, parties: usize) -> Vec<ComplexMatrix> {
    (0..parties).map(|_| haar_su2(rng)).collect()
}

fn quaternion_matrix([a, b, c, d]: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![C64::new(a, b), C64::new(c, d), C64::new(-c, d), C64::new(a, -b)])
        .expect("2x2")
}

/// The 120 elements of the binary icosahedral group as SU(2) matrices. The
/// uniform average over them is an exact unitary 5-design.
pub fn icosahedral_design() -> Vec<ComplexMatrix> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut quats: Vec<[f64; 4]> = Vec::with_capacity(120);
    for k in 0..4 {
        for s in [1.0, -1.0] {
            let mut q = [0.0; 4];
            q[k] = s;
            quats.push(q);
        }
    }
    for signs in 0..16u32 {
        quats.push(std::array::from_fn(|k| if signs >> k & 1 == 1 { -0.5 } else { 0.5 }));
    }
    let base = [0.0, 0.5, phi / 2.0, 0.5 / phi];
    let even: [[usize; 4]; 12] = [
        [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2], [1, 0, 3, 2], [1, 2, 0, 3], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 1, 3, 0], [2, 3, 0, 1], [3, 0, 2, 1], [3, 1, 0, 2], [3, 2, 1, 0],
    ];
    for perm in even {
        for signs in 0..8u32 {
            // the zero entry takes no sign
            quats.push(std::array::from_fn(|k| {
                let v = base[perm[k]];
                let bit = perm[k].checked_sub(1).map(|b| signs >> b & 1);
                if bit == Some(1) { -v } else { v }
            }));
        }
    }
    quats.into_iter().map(quaternion_matrix).collect()
}

/// Exact `E_U[tr(U ρ U† O)^t]` for `t ≤ 5`, averaging over the icosahedral
/// design on every party. Cost grows as `120^parties`.
pub fn design_moment(o: &ProductSum, rho: &ComplexMatrix, t: u32) -> Result<f64> {
    if t > 5 {
        return Err(Error::UnsupportedMoment { t: t as usize, reason: "design average is exact only for t <= 5".into() });
    }
    if rho.rows() != o.dim() || rho.cols() != o.dim() {
        return Err(Error::DimensionMismatch(format!("state is {}x{}, observable is {}", rho.rows(), rho.cols(), o.dim())));
    }
    let design = icosahedral_design();
    let parties = o.parties();
    let total = design.len().pow(parties as u32);
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let us: Vec<ComplexMatrix> = (0..parties)
                .map(|_| {
                    let u = design[idx % design.len()].clone();
                    idx /= design.len();
                    u
                })
                .collect();
            rotated_expectation(rho, o, &us).powi(t as i32)
        })
        .collect();
    Ok(pairwise_sum(&values) / total as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `tr(U ρ U† O)` for local `U = U_1⊗…⊗U_n`, evaluated as `tr(ρ U† O U)`.
pub fn rotated_expectation(rho: &ComplexMatrix, o: &ProductSum, unitaries: &[ComplexMatrix]) -> f64 {
    // U† O U with U† acting first on the observable side
    let adj: Vec<ComplexMatrix> = unitaries.iter().map(|u| u.adjoint()).collect();
    rho.trace_product(&o.rotate(&adj).to_matrix()).re
}

/// Estimates `E_U[tr(U ρ U† O)^t]` from `samples` independent draws. Sample
/// `i` uses its own generator, so the result does not depend on the number
/// of worker threads.
pub fn mc_moment(o: &ProductSum, rho: &ComplexMatrix, t: u32, samples: usize, seed: u64) -> Result<MCEstimate> {
    if rho.rows() != o.dim() || rho.cols() != o.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, observable acts on {} qubits",
            rho.rows(),
            rho.cols(),
            o.parties()
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidInput("at least two samples are needed".into()));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng::indexed(seed, "haar_mc", i as u64);
            let us = haar_local(&mut g, o.parties());
            rotated_expectation(rho, o, &us).powi(t as i32)
        })
        .collect();
    let n = samples as f64;
    let mean = pairwise_sum(&values) / n;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    Ok(MCEstimate { mean, stderr: (var / n).sqrt(), samples, seed })
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, pauli};
    use crate::states::bell_phi_plus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn su2_samples_are_special_unitary() {
        let mut g = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let u = haar_su2(&mut g);
            assert!(u.matmul(&u.adjoint()).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn su2_first_moment_vanishes() {
        // E[U A U†] = tr(A)/2 · 1
        let mut g = ChaCha8Rng::seed_from_u64(2);
        let n = 20000;
        let mut acc = ComplexMatrix::zeros(2, 2);
        for _ in 0..n {
            acc = &acc + &pauli(3).conjugate_by(&haar_su2(&mut g));
        }
        assert!(acc.scale_real(1.0 / n as f64).frobenius_norm() < 0.03);
    }

    #[test]
    fn bell_second_moment() {
        // E[tr(UρU† σz⊗σz)^2] = 1/9 · tr(T Tᵀ) = 1/3 for a Bell state
        let o = ProductSum::from_paulis(&[(1.0, "ZZ")]).unwrap();
        let est = mc_moment(&o, bell_phi_plus().matrix(), 2, 40000, 9).unwrap();
        assert!((est.mean - 1.0 / 3.0).abs() < 4.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn identity_observable_is_exact() {
        let o = ProductSum::product(vec![pauli(0), pauli(0)]).unwrap();
        let est = mc_moment(&o, bell_phi_plus().matrix(), 3, 100, 1).unwrap();
        assert!((est.mean - 1.0).abs() < 1e-12 && est.stderr < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let o = ProductSum::product(vec![pauli(1), pauli(3)]).unwrap();
        let rho = bell_phi_plus();
        let a = mc_moment(&o, rho.matrix(), 3, 500, 11).unwrap();
        let b = mc_moment(&o, rho.matrix(), 3, 500, 11).unwrap();
        assert_eq!(a, b);
        assert!(mc_moment(&o, &kron(&rho.matrix().clone(), &pauli(0)), 2, 10, 1).is_err());
    }
}
