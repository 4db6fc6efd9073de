//! Numerical checks of the structural results, bundled into one report.
//!
//! Each check draws its randomness from its own sub-stream of the suite seed,
//! so checks can run in isolation or in parallel with identical results.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{makhlin, MakhlinRecord};
use crate::linalg::{pauli, ComplexMatrix, C64};
use crate::observables::{
    det_prefactor, random_hermitian, random_orthonormal_basis, random_rank_r, random_symmetric_rank4, symmetric_pauli_family,
    ProductSum, ProductTerm,
};
use crate::protocol_sim::{calibration, kempe_calibration, recover_invariant_exact, recover_kempe_exact, PIPELINES};
use crate::rng;
use crate::states::{ghz, partial_transpose_bloch, random_state, two_qubit_bloch, StateKind};
use crate::symgroup::{gram_matrix, group, kernel_basis, listed_relations, v_matrix};
use crate::twirl::closed_forms::{eigenvalue_identities, reduced_x123_t4, vanishing_expressions};
use crate::twirl::{
    decompose, default_dictionary, kempe_class_coefficients, odd_fit, orbit_coefficients, solve_factor_coefficients,
    to_reduced_gauge,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub claim: String,
    pub trials: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Seconds.
    pub wall_time: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Outcome {
    trials: usize,
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
    detail: String,
}

impl Outcome {
    fn bound(trials: usize, max_deviation: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { trials, max_deviation, tolerance, passed: max_deviation <= tolerance, detail: detail.into() }
    }
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<Outcome>;

struct Check {
    id: &'static str,
    claim: &'static str,
    run: CheckFn,
}

const CHECKS: [Check; 13] = [
    Check {
        id: "pt_product_invariance",
        claim: "moments of product observables are unchanged by partial transposition; only I1 and I14 flip sign",
        run: pt_product_invariance,
    },
    Check {
        id: "det_type3_lower",
        claim: "no observable of operator Schmidt rank <= 2 has a det(T) term in its third moment",
        run: det_type3_lower,
    },
    Check {
        id: "det_prefactor_formula",
        claim: "the det(T) coefficient of the third moment is det(M_A M_B^T)/8",
        run: det_prefactor_formula,
    },
    Check {
        id: "det_only_symmetric",
        claim: "among symmetric observables only (U⊗U)†(Σ s_j σ_j⊗σ_j)(U⊗U) measure pure det(T), with coefficient s1 s2 s3/8",
        run: det_only_symmetric,
    },
    Check {
        id: "det_t4_nogo",
        claim: "rank <= 2 observables have no det(T) or I14 term in their fourth moment; x_π = x_{π⁻¹} for 4-cycles",
        run: det_t4_nogo,
    },
    Check {
        id: "hodge_t4_nogo",
        claim: "rank <= 3 observables have no I14 term in their fourth moment",
        run: hodge_t4_nogo,
    },
    Check {
        id: "hodge_recoverable",
        claim: "the difference of the two rank-4 Hodge observables at t = 4 recovers I14",
        run: hodge_recoverable,
    },
    Check {
        id: "x123_vanishing",
        claim: "eigenvalue identities -2tr(A)^3 + 6tr(A) - 4tr(A^3) = 0 and -2tr(A)^2 tr(B) + 2tr(B) - 4tr(A^2 B) = 0 for orthonormal A, B",
        run: x123_vanishing,
    },
    Check {
        id: "kempe_rank1_obstruction",
        claim: "product observables weight the five third-moment Kempe classes in the fixed ratio 3:6:6:6:6",
        run: kempe_rank1_obstruction,
    },
    Check {
        id: "kempe_rank2_recovery",
        claim: "tensor-rank-2 observables plus rank-1 marginal measurements recover the Kempe invariant",
        run: kempe_rank2_recovery,
    },
    Check {
        id: "invariant_types",
        claim: "every continuous two-qubit invariant is recovered by its pipeline with the listed number of settings",
        run: invariant_types,
    },
    Check {
        id: "gram_kernel",
        claim: "ker M^(3) is spanned by (1,-1,-1,-1,1,1); ker M^(4) is ten-dimensional and contains the ten listed relations",
        run: gram_kernel,
    },
    Check {
        id: "gram_values",
        claim: "M^(3) for qubits equals the printed integer matrix",
        run: gram_values,
    },
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// Runs the selected checks (all when `selection` is `None`). Unknown ids are
/// an input error; failing checks are report entries.
pub fn run_suite(selection: Option<&[String]>, seed: u64) -> Result<VerificationReport> {
    let chosen: Vec<&Check> = match selection {
        None => CHECKS.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| {
                CHECKS
                    .iter()
                    .find(|c| c.id == id)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown check {id:?}; known: {}", check_ids().join(", "))))
            })
            .collect::<Result<_>>()?,
    };
    let checks = chosen.par_iter().map(|c| run_check(c, seed)).collect();
    Ok(VerificationReport { seed, checks })
}

fn run_check(c: &Check, seed: u64) -> CheckReport {
    let mut g = rng::substream(seed, c.id);
    let start = Instant::now();
    let outcome = (c.run)(&mut g);
    let wall_time = start.elapsed().as_secs_f64();
    match outcome {
        Ok(o) => CheckReport {
            id: c.id.into(),
            claim: c.claim.into(),
            trials: o.trials,
            max_deviation: o.max_deviation,
            tolerance: o.tolerance,
            passed: o.passed,
            wall_time,
            detail: o.detail,
        },
        Err(e) => CheckReport {
            id: c.id.into(),
            claim: c.claim.into(),
            trials: 0,
            max_deviation: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            wall_time,
            detail: format!("error: {e}"),
        },
    }
}

fn random_product(g: &mut ChaCha8Rng, parties: usize) -> ProductSum {
    ProductSum::product((0..parties).map(|_| random_hermitian(g)).collect()).expect("random product")
}

fn rank_r(g: &mut ChaCha8Rng, r: usize) -> Result<ProductSum> {
    random_rank_r(g, r)?.to_product_sum()
}

fn pt_product_invariance(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 100;
    let mut dev: f64 = 0.0;
    for _ in 0..N {
        let o = random_product(g, 2);
        let rho = random_state(StateKind::Mixed, 2, g.random())?;
        let flipped = rho.partial_transpose(2)?;
        for t in 1..=4 {
            let c = orbit_coefficients(&o, t)?;
            let (a, b) = (c.moment(rho.matrix())?, c.moment(flipped.matrix())?);
            dev = dev.max((a - b).abs() / a.abs().max(1.0));
        }
        let s = two_qubit_bloch(rho.matrix())?;
        let (r, f) = (makhlin(&s), makhlin(&partial_transpose_bloch(&s, 2)?));
        for name in MakhlinRecord::CONTINUOUS {
            let (x, y) = (r.continuous(name).unwrap_or(0.0), f.continuous(name).unwrap_or(0.0));
            let expected = if name == "I1" || name == "I14" { -x } else { x };
            dev = dev.max((y - expected).abs());
        }
    }
    Ok(Outcome::bound(N, dev, 1e-10, "t = 1..4, relative moment difference and invariant signs"))
}

fn det_type3_lower(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 1000;
    let observables: Vec<ProductSum> = (0..N).map(|i| rank_r(g, 1 + i % 2)).collect::<Result<_>>()?;
    let devs: Vec<f64> = observables.par_iter().map(|o| Ok(odd_fit(o, 3)?.det.abs())).collect::<Result<_>>()?;
    let dev = devs.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::bound(N, dev, 1e-9, "max |det coefficient| at t = 3, ranks 1 and 2"))
}

fn det_prefactor_formula(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 200;
    let observables = (0..N).map(|i| random_rank_r(g, 1 + i % 4)).collect::<Result<Vec<_>>>()?;
    let devs: Vec<f64> = observables
        .par_iter()
        .map(|o| Ok((odd_fit(&o.to_product_sum()?, 3)?.det - det_prefactor(o)).abs()))
        .collect::<Result<_>>()?;
    let dev = devs.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::bound(N, dev, 1e-8, "fitted det coefficient vs det(M_A M_B^T)/8, ranks 1-4"))
}

fn det_only_symmetric(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const FAMILY: usize = 20;
    const RANK4: usize = 500;
    let dict = default_dictionary(3);
    let mut dev: f64 = 0.0;
    for _ in 0..FAMILY {
        let s = [g.random_range(0.2..2.0), g.random_range(0.2..2.0), g.random_range(0.2..2.0)];
        let u = crate::haar_mc::haar_su2(g);
        let d = decompose(&symmetric_pauli_family(s, &u).to_product_sum()?, 3, &dict)?;
        for (name, c) in d.dictionary.iter().zip(&d.coefficients) {
            let expected = if name == "I1" { s.iter().product::<f64>() } else { 0.0 };
            dev = dev.max((c - expected).abs());
        }
    }
    let observables: Vec<ProductSum> = (0..RANK4).map(|_| random_symmetric_rank4(g).to_product_sum()).collect::<Result<_>>()?;
    let extra: Vec<f64> = observables
        .par_iter()
        .map(|o| {
            let d = decompose(o, 3, &dict)?;
            Ok(d.dictionary.iter().zip(&d.coefficients).filter(|(n, _)| *n != "I1").map(|(_, c)| c.abs()).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let weakest = extra.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = Outcome::bound(FAMILY + RANK4, dev, 1e-9, format!("smallest non-det coefficient over {RANK4} symmetric rank-4 observables: {weakest:.3e}"));
    out.passed &= weakest > 1e-6;
    Ok(out)
}

fn det_t4_nogo(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 200;
    let observables: Vec<ProductSum> = (0..N).map(|i| rank_r(g, 1 + i % 2)).collect::<Result<_>>()?;
    let devs: Vec<f64> = observables
        .par_iter()
        .map(|o| {
            let f = odd_fit(o, 4)?;
            Ok(f.det.abs().max(f.hodge.abs()))
        })
        .collect::<Result<_>>()?;
    let mut dev = devs.iter().copied().fold(0.0, f64::max);
    let g4 = group(4)?;
    let pairs = [("(1234)", "(1432)"), ("(1243)", "(1342)"), ("(1324)", "(1423)")];
    for _ in 0..10 {
        let basis = random_orthonormal_basis(g);
        for code in 0..16usize {
            let f: Vec<&ComplexMatrix> = (0..4).map(|k| &basis[(code >> k) & 1]).collect();
            let x = to_reduced_gauge(&solve_factor_coefficients(&f)?.x, 4)?;
            for (a, b) in pairs {
                dev = dev.max((x[g4.index_of_str(a)] - x[g4.index_of_str(b)]).norm());
            }
        }
    }
    Ok(Outcome::bound(N + 160, dev, 1e-9, "odd-part coefficients at t = 4 and 4-cycle inverse symmetry on rank-2 tuples"))
}

fn hodge_t4_nogo(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 200;
    let observables: Vec<(usize, ProductSum)> =
        (0..N).map(|i| Ok((1 + i % 3, rank_r(g, 1 + i % 3)?))).collect::<Result<_>>()?;
    let fits: Vec<(usize, f64)> =
        observables.par_iter().map(|(r, o)| Ok((*r, odd_fit(o, 4)?.hodge.abs()))).collect::<Result<_>>()?;
    let by_rank = |r: usize| fits.iter().filter(|f| f.0 == r).map(|f| f.1).fold(0.0, f64::max);
    let mut dev = fits.iter().map(|f| f.1).fold(0.0, f64::max);
    let mut closed: f64 = 0.0;
    let g4 = group(4)?;
    for _ in 0..20 {
        let b = random_orthonormal_basis(g);
        for v in vanishing_expressions(&b[0], &b[1], &b[2]) {
            closed = closed.max(v.norm());
        }
        for code in 0..81usize {
            let j = [code % 3, (code / 3) % 3, (code / 9) % 3, code / 27];
            let f = [&b[j[0]], &b[j[1]], &b[j[2]], &b[j[3]]];
            let x = to_reduced_gauge(&solve_factor_coefficients(&f)?.x, 4)?;
            closed = closed.max((x[g4.index_of_str("(123)")] - reduced_x123_t4(f)).norm());
        }
    }
    dev = dev.max(closed);
    let detail = format!(
        "max |I14 coefficient| by rank: r1 {:.3e}, r2 {:.3e}, r3 {:.3e}; vanishing expressions and 3-cycle closed form {:.3e}",
        by_rank(1),
        by_rank(2),
        by_rank(3),
        closed
    );
    Ok(Outcome::bound(N, dev, 1e-9, detail))
}

fn hodge_recoverable(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 100;
    let cal = calibration("hodge")?;
    let mut dev: f64 = 0.0;
    for _ in 0..N {
        let rho = random_state(StateKind::Mixed, 2, g.random())?;
        let r = recover_invariant_exact("hodge", &rho)?;
        dev = dev.max((r.estimate - r.reference).abs());
    }
    Ok(Outcome::bound(N, dev, 1e-8, format!("calibrated slope a = {:.6}", cal.a)))
}

fn x123_vanishing(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 1000;
    let mut dev: f64 = 0.0;
    for _ in 0..N {
        let b = random_orthonormal_basis(g);
        for v in eigenvalue_identities(&b[0], &b[1]) {
            dev = dev.max(v.norm());
        }
    }
    Ok(Outcome::bound(N, dev, 1e-10, "random orthonormal pairs"))
}

fn kempe_rank1_obstruction(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 200;
    const SIZES: [f64; 5] = [3.0, 6.0, 6.0, 6.0, 6.0];
    let observables: Vec<ProductSum> = (0..N).map(|_| random_product(g, 3)).collect();
    let devs: Vec<f64> = observables
        .par_iter()
        .map(|o| {
            let c = kempe_class_coefficients(o)?;
            let unit: C64 = c[0] / SIZES[0];
            let scale = unit.norm().max(1e-300);
            Ok((1..5).map(|k| (c[k] / SIZES[k] - unit).norm() / scale).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let dev = devs.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::bound(N, dev, 1e-9, "relative deviation of class sums from the 3:6:6:6:6 pattern"))
}

fn kempe_rank2_recovery(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 100;
    let one_minus_x = &pauli(0) - &pauli(1);
    let o2 = ProductSum::from_paulis(&[(1.0, "III"), (1.0, "ZZZ")])?;
    let o3 = ProductSum::new(vec![
        ProductTerm::new(1.0, vec![pauli(0), pauli(0), one_minus_x.clone()]),
        ProductTerm::new(1.0, vec![pauli(3), pauli(3), one_minus_x]),
    ])?;
    let mut class_dev: f64 = 0.0;
    for (o, expected) in [(o2, [8.0 / 9.0, 0.0, 0.0, 0.0, 0.0]), (o3, [8.0 / 9.0, 16.0 / 9.0, 0.0, 0.0, 0.0])] {
        let c = kempe_class_coefficients(&o)?;
        for k in 0..5 {
            class_dev = class_dev.max((c[k] - expected[k]).norm());
        }
    }
    kempe_calibration()?;
    let mut dev: f64 = 0.0;
    let mut settings = 0;
    for _ in 0..N {
        let rho = random_state(StateKind::Mixed, 3, g.random())?;
        let r = recover_kempe_exact(&rho)?;
        settings = settings.max(r.settings_used);
        dev = dev.max((r.estimate - r.reference).abs());
    }
    let ghz_value = recover_kempe_exact(&ghz())?.estimate;
    dev = dev.max((ghz_value - 0.25).abs());
    let mut out = Outcome::bound(N, dev.max(class_dev), 1e-8, format!("class vectors {class_dev:.2e}; GHZ {ghz_value:.12}; settings {settings}"));
    out.passed &= class_dev <= 1e-12 && settings == 2;
    Ok(out)
}

fn invariant_types(g: &mut ChaCha8Rng) -> Result<Outcome> {
    const N: usize = 10;
    const TYPES: [usize; 12] = [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 4];
    let mut dev: f64 = 0.0;
    let mut mismatched = Vec::new();
    for _ in 0..N {
        let rho = random_state(StateKind::Mixed, 2, g.random())?;
        for (name, ty) in PIPELINES.iter().zip(TYPES) {
            let r = recover_invariant_exact(name, &rho)?;
            dev = dev.max((r.estimate - r.reference).abs());
            if r.settings_used != ty && !mismatched.contains(name) {
                mismatched.push(*name);
            }
        }
    }
    let detail = if mismatched.is_empty() { "settings counts match".to_string() } else { format!("settings mismatch: {mismatched:?}") };
    let mut out = Outcome::bound(N * PIPELINES.len(), dev, 1e-8, detail);
    out.passed &= mismatched.is_empty();
    Ok(out)
}

fn gram_kernel(_: &mut ChaCha8Rng) -> Result<Outcome> {
    let k3 = kernel_basis(&gram_matrix(3, 2)?);
    let k4 = kernel_basis(&gram_matrix(4, 2)?);
    let expected = [1.0, -1.0, -1.0, -1.0, 1.0, 1.0];
    let mut dev: f64 = 0.0;
    if let [v] = k3.as_slice() {
        let dot: f64 = v.iter().zip(expected).map(|(a, b)| a * b).sum();
        dev = dev.max((dot.abs() - 6f64.sqrt()).abs());
    }
    let g4 = group(4)?;
    let ops: Vec<ComplexMatrix> = g4.elements().iter().map(|p| Ok(v_matrix(p, 2)?.to_dense())).collect::<Result<_>>()?;
    let relations = listed_relations(4)?;
    for rel in &relations {
        // projection onto the kernel must reproduce the relation
        let norm: f64 = rel.iter().map(|x| x * x).sum::<f64>().sqrt();
        let proj: f64 = k4.iter().map(|b| b.iter().zip(rel).map(|(x, y)| x * y).sum::<f64>().powi(2)).sum::<f64>().sqrt();
        dev = dev.max((norm - proj).abs() / norm);
        let mut sum = ComplexMatrix::zeros(16, 16);
        for (k, op) in rel.iter().zip(&ops) {
            sum = &sum + &op.scale_real(*k);
        }
        dev = dev.max(sum.frobenius_norm());
    }
    let mut out = Outcome::bound(1, dev, 1e-9, format!("dim ker M^(3) = {}, dim ker M^(4) = {}, {} relations", k3.len(), k4.len(), relations.len()));
    out.passed &= k3.len() == 1 && k4.len() == 10 && relations.len() == 10;
    Ok(out)
}

const PRINTED_GRAM_T3: [[u64; 6]; 6] = [
    [8, 4, 4, 4, 2, 2],
    [4, 8, 2, 2, 4, 4],
    [4, 2, 8, 2, 4, 4],
    [4, 2, 2, 8, 4, 4],
    [2, 4, 4, 4, 2, 8],
    [2, 4, 4, 4, 8, 2],
];

fn gram_values(_: &mut ChaCha8Rng) -> Result<Outcome> {
    let m = gram_matrix(3, 2)?;
    let mismatches = (0..6).flat_map(|i| (0..6).map(move |j| (i, j))).filter(|&(i, j)| m.entries[i][j] != PRINTED_GRAM_T3[i][j]).count();
    Ok(Outcome::bound(36, mismatches as f64, 0.0, format!("{mismatches} differing entries")))
}
