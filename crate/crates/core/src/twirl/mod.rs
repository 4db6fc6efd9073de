//! Exact local Haar moments.
//!
//! For a product term the twirl of each party's t-fold factor is
//! `Σ_π x_π V_π` with `x` solving the Gram system
//! `Σ_π x_π tr(V_{π∘π'}) = tr(A_1⊗…⊗A_t V_π')`. Multiplying the per-party
//! solutions and summing over index tuples gives the coefficient table
//! `c_{π_1,…,π_n}`, and the moment is `Σ c · tr(ρ^{⊗t} V_{π_1}⊗…⊗V_{π_n})`.

pub mod closed_forms;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{makhlin, MakhlinRecord};
use crate::linalg::{real_svd, ComplexMatrix, C64, ZERO};
use crate::observables::{ProductSum, SchmidtObservable};
use crate::rng;
use crate::states::TwoQubitState;
use crate::symgroup::{group, gram_matrix, gram_pseudo_inverse, listed_relations, reduced_support, tuple_orbits, Group, Permutation};

/// Residual above which a Gram solve is reported as failed.
pub const SOLVE_TOLERANCE: f64 = 1e-9;
/// Relative size of an imaginary part that is accepted and discarded.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Upper bound on `(#index tuples) × (table size)` for explicit tables.
const TABLE_WORK_CAP: usize = 50_000_000;

/// Choice among the solutions of a singular Gram system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Minimum-norm solution (pseudo-inverse).
    MinNorm,
    /// Kernel shift that zeroes `(132)` at t = 3 and the ten dependent
    /// permutations at t = 4.
    Reduced,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorSolution {
    pub x: Vec<C64>,
    pub residual: f64,
}

/// `(tr(A_1⊗…⊗A_t V_π))_π` in canonical group order.
pub fn factor_traces(factors: &[&ComplexMatrix], g: &Group) -> Result<Vec<C64>> {
    g.elements().iter().map(|p| crate::symgroup::trace_with_v(factors, p)).collect()
}

/// Minimum-norm solution of the Gram system for one t-tuple of factors.
pub fn solve_factor_coefficients(factors: &[&ComplexMatrix]) -> Result<FactorSolution> {
    let t = factors.len();
    let d = factors.first().map(|f| f.rows()).ok_or_else(|| Error::InvalidInput("no factors".into()))?;
    let g = group(t)?;
    let rhs = factor_traces(factors, g)?;
    let x = gram_pseudo_inverse(t, d)?.matvec(&rhs);
    let gram = gram_matrix(t, d)?;
    let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    let mut residual = 0.0f64;
    for (j, b) in rhs.iter().enumerate() {
        let lhs: C64 = (0..g.order()).map(|i| x[i] * gram.entries[i][j] as f64).sum();
        residual = residual.max((lhs - b).norm() / scale);
    }
    if residual > SOLVE_TOLERANCE {
        return Err(Error::Residual { residual, tolerance: SOLVE_TOLERANCE });
    }
    Ok(FactorSolution { x, residual })
}

/// Shifts `x` by kernel vectors of the qubit Gram matrix so that the
/// eliminated coefficients vanish. Identity for t ≤ 2.
pub fn to_reduced_gauge(x: &[C64], t: usize) -> Result<Vec<C64>> {
    if t <= 2 {
        return Ok(x.to_vec());
    }
    let keep = reduced_support(t)?;
    let relations = listed_relations(t)?;
    let eliminated: Vec<usize> = (0..x.len()).filter(|i| !keep.contains(i)).collect();
    let k = eliminated.len();
    // z solves Σ_r z_r K_r[e] = -x[e] for each eliminated e
    let m = DMatrix::from_fn(k, k, |e, r| relations[r][eliminated[e]]);
    let lu = m.lu();
    let mut out = x.to_vec();
    for part in 0..2 {
        let rhs = nalgebra::DVector::from_fn(k, |e, _| {
            let v = x[eliminated[e]];
            -(if part == 0 { v.re } else { v.im })
        });
        let z = lu.solve(&rhs).ok_or_else(|| Error::Singular("gauge relations are dependent".into()))?;
        for (r, rel) in relations.iter().enumerate() {
            for (i, c) in rel.iter().enumerate() {
                let shift = z[r] * c;
                if part == 0 {
                    out[i].re += shift;
                } else {
                    out[i].im += shift;
                }
            }
        }
    }
    for &e in &eliminated {
        out[e] = ZERO;
    }
    Ok(out)
}

fn solve_in_gauge(factors: &[&ComplexMatrix], gauge: Gauge) -> Result<Vec<C64>> {
    let x = solve_factor_coefficients(factors)?.x;
    match gauge {
        Gauge::MinNorm => Ok(x),
        Gauge::Reduced => to_reduced_gauge(&x, factors.len()),
    }
}

/// Full coefficient table `c_{π_1,…,π_n}`, indexed by
/// `Σ_p idx_p · (t!)^{n-1-p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwirlCoefficients {
    pub t: usize,
    pub parties: usize,
    pub gauge: Gauge,
    pub table: Vec<C64>,
}

impl TwirlCoefficients {
    fn order(&self) -> usize {
        group(self.t).map(|g| g.order()).expect("table built for a supported t")
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        let n = self.order();
        self.table[idx.iter().fold(0, |acc, &i| acc * n + i)]
    }

    /// Entry addressed by cycle notation, e.g. `["(123)", "(12)"]`.
    pub fn get_by_cycles(&self, cycles: &[&str]) -> Result<C64> {
        let g = group(self.t)?;
        let idx: Vec<usize> = cycles.iter().map(|c| Permutation::parse(self.t, c).map(|p| g.index_of(&p))).collect::<Result<_>>()?;
        Ok(self.get(&idx))
    }

    /// Sums of the table over simultaneous-conjugation orbits.
    pub fn orbit_sums(&self) -> Result<OrbitCoefficients> {
        let orbits = tuple_orbits(self.t, self.parties)?;
        let mut coeff = vec![ZERO; orbits.orbit_count()];
        for (i, c) in self.table.iter().enumerate() {
            coeff[orbits.orbit_of[i] as usize] += c;
        }
        Ok(OrbitCoefficients { t: self.t, parties: self.parties, coeff })
    }

    pub fn moment(&self, rho: &ComplexMatrix) -> Result<f64> {
        self.orbit_sums()?.moment(rho)
    }
}

fn check_support(o: &ProductSum, t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::UnsupportedMoment { t, reason: "moments start at t = 1".into() });
    }
    let limit = if o.parties() <= 2 { 6 } else if o.parties() == 3 { 4 } else { 0 };
    if t > limit {
        return Err(Error::UnsupportedMoment { t, reason: format!("{}-party moments are supported up to t = {limit}", o.parties()) });
    }
    Ok(())
}

fn index_tuples(r: usize, t: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..r.pow(t as u32)).map(move |mut c| {
        let mut v = vec![0; t];
        for k in (0..t).rev() {
            v[k] = c % r;
            c /= r;
        }
        v
    })
}

/// Explicit coefficient table of `Φ^{(t)}(O)`.
pub fn twirl_coefficients(o: &ProductSum, t: usize, gauge: Gauge) -> Result<TwirlCoefficients> {
    check_support(o, t)?;
    let g = group(t)?;
    let n = g.order();
    let size = n.pow(o.parties() as u32);
    let r = o.settings();
    let tuples = r.pow(t as u32);
    if tuples.saturating_mul(size) > TABLE_WORK_CAP {
        return Err(Error::UnsupportedMoment {
            t,
            reason: format!("explicit table for {r} terms would need {tuples} x {size} products; use exact_moment"),
        });
    }
    let terms = o.terms();
    let solved: Vec<(f64, Vec<Vec<C64>>)> = index_tuples(r, t)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|j| -> Result<(f64, Vec<Vec<C64>>)> {
            let weight: f64 = j.iter().map(|&k| terms[k].weight).product();
            let xs = (0..o.parties())
                .map(|p| {
                    let f: Vec<&ComplexMatrix> = j.iter().map(|&k| &terms[k].factors[p]).collect();
                    solve_in_gauge(&f, gauge)
                })
                .collect::<Result<_>>()?;
            Ok((weight, xs))
        })
        .collect::<Result<_>>()?;
    let mut table = vec![ZERO; size];
    for (weight, xs) in &solved {
        for (acc, v) in table.iter_mut().zip(outer_product(xs, *weight)) {
            *acc += v;
        }
    }
    Ok(TwirlCoefficients { t, parties: o.parties(), gauge, table })
}

fn outer_product(xs: &[Vec<C64>], weight: f64) -> Vec<C64> {
    let mut out = vec![C64::new(weight, 0.0)];
    for x in xs {
        let mut next = Vec::with_capacity(out.len() * x.len());
        for a in &out {
            for b in x {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

/// Coefficients summed over conjugation orbits; enough to evaluate moments.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitCoefficients {
    pub t: usize,
    pub parties: usize,
    pub coeff: Vec<C64>,
}

impl OrbitCoefficients {
    pub fn moment(&self, rho: &ComplexMatrix) -> Result<f64> {
        let dim = 1usize << self.parties;
        if rho.rows() != dim || rho.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, observable acts on {} qubits",
                rho.rows(),
                rho.cols(),
                self.parties
            )));
        }
        let orbits = tuple_orbits(self.t, self.parties)?;
        let g = group(self.t)?;
        let scale = self.coeff.iter().map(|c| c.norm()).sum::<f64>().max(1.0);
        let mut total = ZERO;
        for (c, rep) in self.coeff.iter().zip(&orbits.representatives) {
            if c.norm() <= 1e-15 * scale {
                continue;
            }
            let perms: Vec<&Permutation> = rep.iter().map(|&i| g.element(i)).collect();
            total += c * permutation_trace(rho, &perms);
        }
        if total.im.abs() > IMAGINARY_TOLERANCE * scale.max(total.re.abs()) {
            return Err(Error::ImaginaryResidue(total.im));
        }
        Ok(total.re)
    }
}

/// Groups the index tuples of an `r`-term sum into multisets with their
/// multiplicities `t!/Π m_i!`.
fn multisets(r: usize, t: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..r {
            cur.push(k);
            rec(k, r, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    rec(0, r, t, &mut Vec::new(), &mut all);
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    all.into_iter()
        .map(|m| {
            let mut denom = 1.0;
            let mut i = 0;
            while i < m.len() {
                let j = m[i..].iter().take_while(|&&v| v == m[i]).count();
                denom *= fact(j);
                i += j;
            }
            (m, fact(t) / denom)
        })
        .collect()
}

/// Orbit-summed coefficients of the minimum-norm twirl. Index tuples that
/// are rearrangements of each other contribute equally to every orbit sum,
/// so one Gram solve per multiset suffices.
pub fn orbit_coefficients(o: &ProductSum, t: usize) -> Result<OrbitCoefficients> {
    check_support(o, t)?;
    let g = group(t)?;
    let n = g.order();
    let orbits = tuple_orbits(t, o.parties())?;
    let size = n.pow(o.parties() as u32);
    let sets = multisets(o.settings(), t);
    if sets.len().saturating_mul(size) > 40 * TABLE_WORK_CAP {
        return Err(Error::UnsupportedMoment { t, reason: format!("{} terms at t = {t} exceed the work cap", o.settings()) });
    }
    let terms = o.terms();
    let partial: Vec<Vec<C64>> = sets
        .par_iter()
        .map(|(m, mult)| -> Result<Vec<C64>> {
            let weight: f64 = mult * m.iter().map(|&k| terms[k].weight).product::<f64>();
            let xs: Vec<Vec<C64>> = (0..o.parties())
                .map(|p| {
                    let f: Vec<&ComplexMatrix> = m.iter().map(|&k| &terms[k].factors[p]).collect();
                    solve_factor_coefficients(&f).map(|s| s.x)
                })
                .collect::<Result<_>>()?;
            let mut acc = vec![ZERO; orbits.orbit_count()];
            accumulate_orbits(&xs, weight, &orbits.orbit_of, n, &mut acc);
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut coeff = vec![ZERO; orbits.orbit_count()];
    for part in &partial {
        for (acc, v) in coeff.iter_mut().zip(part) {
            *acc += v;
        }
    }
    Ok(OrbitCoefficients { t, parties: o.parties(), coeff })
}

fn accumulate_orbits(xs: &[Vec<C64>], weight: f64, orbit_of: &[u32], n: usize, acc: &mut [C64]) {
    match xs.len() {
        1 => {
            for (i, x) in xs[0].iter().enumerate() {
                acc[orbit_of[i] as usize] += x * weight;
            }
        }
        2 => {
            for (i, a) in xs[0].iter().enumerate() {
                let a = a * weight;
                let row = &orbit_of[i * n..(i + 1) * n];
                for (b, &o) in xs[1].iter().zip(row) {
                    acc[o as usize] += a * b;
                }
            }
        }
        _ => {
            for (idx, v) in outer_product(xs, weight).into_iter().enumerate() {
                acc[orbit_of[idx] as usize] += v;
            }
        }
    }
}

/// `tr(ρ^{⊗t} V_{π_1} ⊗ … ⊗ V_{π_n})` where `V_{π_p}` permutes the t copies of
/// party `p`. Sums `Π_k ρ[I_k, J_k]` over index tuples, with the party-`p`
/// bit of `J_k` equal to that of `I_{π_p(k)}`; `ρ^{⊗t}` is never formed.
pub fn permutation_trace(rho: &ComplexMatrix, perms: &[&Permutation]) -> C64 {
    let n = perms.len();
    let t = perms[0].degree();
    let dim = 1usize << n;
    let total = dim.pow(t as u32);
    let mut idx = vec![0usize; t];
    let mut jdx = vec![0usize; t];
    let mut sum = ZERO;
    for c in 0..total {
        let mut rem = c;
        for k in (0..t).rev() {
            idx[k] = rem % dim;
            rem /= dim;
        }
        for k in 0..t {
            let mut j = 0;
            for (p, pi) in perms.iter().enumerate() {
                let bit = n - 1 - p;
                j |= idx[pi.apply(k)] & (1 << bit);
            }
            jdx[k] = j;
        }
        let mut prod = C64::new(1.0, 0.0);
        for k in 0..t {
            prod *= rho[(idx[k], jdx[k])];
            if prod == ZERO {
                break;
            }
        }
        sum += prod;
    }
    sum
}

/// `R^{(t)}_O(ρ) = E_U[tr(UρU† O)^t]` over local Haar unitaries, exactly.
pub fn exact_moment(o: &ProductSum, rho: &ComplexMatrix, t: usize) -> Result<f64> {
    orbit_coefficients(o, t)?.moment(rho)
}

/// `(1, |α|², |β|², tr(TᵀT), ⟨α,Tβ⟩, det T)`.
pub fn trace_invariant_vector_t3(s: &TwoQubitState) -> [f64; 6] {
    let m = makhlin(s);
    [1.0, m.i4, m.i7, m.i2, m.i12, m.i1]
}

/// Permutation pairs `(π_A, π_B)` representing the ten classes of
/// `tr(ρ^{⊗3} V_{π_A}⊗V_{π_B})`.
pub const T3_CLASSES: [(&str, &str); 10] = [
    ("()", "()"),
    ("()", "(12)"),
    ("(12)", "()"),
    ("()", "(123)"),
    ("(123)", "()"),
    ("(12)", "(12)"),
    ("(12)", "(13)"),
    ("(12)", "(123)"),
    ("(123)", "(12)"),
    ("(123)", "(123)"),
];

/// Rows (×16) expressing the ten class traces in the invariant vector.
const T3_TRACE_MATRIX: [[f64; 6]; 10] = [
    [16.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [8.0, 0.0, 8.0, 0.0, 0.0, 0.0],
    [8.0, 8.0, 0.0, 0.0, 0.0, 0.0],
    [4.0, 0.0, 12.0, 0.0, 0.0, 0.0],
    [4.0, 12.0, 0.0, 0.0, 0.0, 0.0],
    [4.0, 4.0, 4.0, 4.0, 0.0, 0.0],
    [4.0, 4.0, 4.0, 0.0, 4.0, 0.0],
    [2.0, 2.0, 6.0, 2.0, 4.0, 0.0],
    [2.0, 6.0, 2.0, 2.0, 4.0, 0.0],
    [1.0, 3.0, 3.0, 3.0, 6.0, -6.0],
];

/// The ten class values of `tr(ρ^{⊗3} V_{π_A}⊗V_{π_B})`, in [`T3_CLASSES`]
/// order, from the invariant vector.
pub fn class_traces_t3(s: &TwoQubitState) -> [f64; 10] {
    let v = trace_invariant_vector_t3(s);
    T3_TRACE_MATRIX.map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / 16.0)
}

/// A product of continuous Makhlin invariants, e.g. `["I2", "I4"]`; the
/// empty product is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial(pub Vec<String>);

impl Monomial {
    pub fn name(&self) -> String {
        if self.0.is_empty() {
            "1".into()
        } else {
            self.0.join("*")
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|n| invariant_degree(n).unwrap_or(0)).sum()
    }

    pub fn evaluate(&self, r: &MakhlinRecord) -> f64 {
        self.0.iter().map(|n| r.continuous(n).unwrap_or(f64::NAN)).product()
    }
}

/// Polynomial degree of a continuous invariant in the Bloch components.
pub fn invariant_degree(name: &str) -> Option<u32> {
    Some(match name {
        "I2" | "I4" | "I7" => 2,
        "I1" | "I12" => 3,
        "I3" | "I5" | "I8" | "I14" => 4,
        "I13" => 5,
        "I6" | "I9" => 6,
        _ => return None,
    })
}

/// All monomials in the given invariants of total degree ≤ `max_degree`,
/// starting with the constant.
pub fn monomials_up_to(names: &[&str], max_degree: u32) -> Vec<Monomial> {
    fn rec(names: &[&str], start: usize, left: u32, cur: &mut Vec<String>, out: &mut Vec<Monomial>) {
        for i in start..names.len() {
            let d = invariant_degree(names[i]).unwrap_or(u32::MAX);
            if d <= left {
                cur.push(names[i].to_string());
                out.push(Monomial(cur.clone()));
                rec(names, i, left - d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = vec![Monomial(Vec::new())];
    rec(names, 0, max_degree, &mut Vec::new(), &mut out);
    out.sort_by_key(|m| m.degree());
    out
}

/// Default dictionary: every monomial in the continuous invariants of degree
/// at most `t`.
pub fn default_dictionary(t: usize) -> Vec<Monomial> {
    monomials_up_to(&MakhlinRecord::CONTINUOUS, t as u32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentDecomposition {
    pub dictionary: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Largest absolute misfit over the sample records.
    pub residual: f64,
}

impl MomentDecomposition {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.dictionary.iter().position(|d| d == name).map(|i| self.coefficients[i])
    }
}

const FIT_SEED: u64 = 0x5eed_f17;

/// Least-squares solve; returns coefficients and the largest absolute misfit.
pub fn least_squares(design: &DMatrix<f64>, target: &[f64]) -> Result<(Vec<f64>, f64)> {
    if design.nrows() != target.len() {
        return Err(Error::DimensionMismatch(format!("{} rows against {} targets", design.nrows(), target.len())));
    }
    let b = nalgebra::DVector::from_column_slice(target);
    let svd = real_svd(design);
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = 1e-12 * smax.max(1.0);
    let utb = svd.u.transpose() * &b;
    let scaled = nalgebra::DVector::from_fn(utb.len(), |k, _| {
        let s = svd.singular_values[k];
        if s > cutoff {
            utb[k] / s
        } else {
            0.0
        }
    });
    let x = &svd.v * scaled;
    let misfit = (design * &x - b).amax();
    Ok((x.iter().copied().collect(), misfit))
}

/// Random Bloch records (entries uniform in [-1, 1]) used for fitting.
pub fn fitting_records(count: usize, label: &str) -> Vec<TwoQubitState> {
    let mut g = rng::substream(FIT_SEED, label);
    (0..count).map(|_| TwoQubitState::random_record(&mut g)).collect()
}

/// Fits `R^{(t)}_O` as a linear combination of the dictionary over random
/// Bloch records.
pub fn decompose(o: &ProductSum, t: usize, dictionary: &[Monomial]) -> Result<MomentDecomposition> {
    if o.parties() != 2 {
        return Err(Error::DimensionMismatch("decompose expects a two-qubit observable".into()));
    }
    let coeffs = orbit_coefficients(o, t)?;
    let records = fitting_records(3 * dictionary.len().max(4), "decompose");
    let moments: Vec<f64> = records.par_iter().map(|s| coeffs.moment(&s.to_matrix())).collect::<Result<_>>()?;
    let design = DMatrix::from_fn(records.len(), dictionary.len(), |i, j| dictionary[j].evaluate(&makhlin(&records[i])));
    let (coefficients, residual) = least_squares(&design, &moments)?;
    Ok(MomentDecomposition { dictionary: dictionary.iter().map(|m| m.name()).collect(), coefficients, residual })
}

/// `(R(ρ) − R(ρ^{T_2}))/2`.
pub fn odd_part(o: &ProductSum, rho: &TwoQubitState, t: usize) -> Result<f64> {
    let coeffs = orbit_coefficients(o, t)?;
    odd_part_with(&coeffs, rho)
}

fn odd_part_with(coeffs: &OrbitCoefficients, rho: &TwoQubitState) -> Result<f64> {
    let plain = coeffs.moment(&rho.to_matrix())?;
    let flipped = coeffs.moment(&rho.partial_transpose(2)?.to_matrix())?;
    Ok((plain - flipped) / 2.0)
}

/// Coefficients `(a, b)` of `odd_part = a·I1 + b·I14`, with the fit misfit.
/// Up to t = 4 these are the only odd invariants that can occur.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OddFit {
    pub det: f64,
    pub hodge: f64,
    pub residual: f64,
}

pub fn odd_fit(o: &ProductSum, t: usize) -> Result<OddFit> {
    let coeffs = orbit_coefficients(o, t)?;
    let records = fitting_records(12, "odd_fit");
    let odd: Vec<f64> = records.iter().map(|s| odd_part_with(&coeffs, s)).collect::<Result<_>>()?;
    let design = DMatrix::from_fn(records.len(), 2, |i, j| {
        let m = makhlin(&records[i]);
        if j == 0 {
            m.i1
        } else {
            m.i14
        }
    });
    let (c, residual) = least_squares(&design, &odd)?;
    Ok(OddFit { det: c[0], hodge: c[1], residual })
}

/// Members of the seven symmetric classes of `(π_A, π_B)` at t = 3 in the
/// reduced gauge: `(),()`; `(),(ij)`; `(),(123)`; `(ij),(ij)`; `(ij),(ik)`;
/// `(ij),(123)`; `(123),(123)` (each with its mirror image).
pub fn symmetric_classes_t3() -> [Vec<(&'static str, &'static str)>; 7] {
    let tr = ["(12)", "(13)", "(23)"];
    let mut c1 = Vec::new();
    let mut c3 = Vec::new();
    let mut c4 = Vec::new();
    let mut c5 = Vec::new();
    for a in tr {
        c1.push(("()", a));
        c1.push((a, "()"));
        c3.push((a, a));
        c5.push((a, "(123)"));
        c5.push(("(123)", a));
        for b in tr {
            if a != b {
                c4.push((a, b));
            }
        }
    }
    [vec![("()", "()")], c1, vec![("()", "(123)"), ("(123)", "()")], c3, c4, c5, vec![("(123)", "(123)")]]
}

/// Class averages of the reduced-gauge table at t = 3.
pub fn class_averages_t3(c: &TwirlCoefficients) -> Result<[C64; 7]> {
    if c.t != 3 || c.parties != 2 || c.gauge != Gauge::Reduced {
        return Err(Error::InvalidInput("class averages need a reduced-gauge two-party t = 3 table".into()));
    }
    let classes = symmetric_classes_t3();
    let mut out = [ZERO; 7];
    for (k, members) in classes.iter().enumerate() {
        let mut s = ZERO;
        for (a, b) in members {
            s += c.get_by_cycles(&[a, b])?;
        }
        out[k] = s / members.len() as f64;
    }
    Ok(out)
}

const SYMMETRIC_B: [[f64; 7]; 7] = [
    [4.0, 0.0, -8.0, 0.0, 0.0, 0.0, 4.0],
    [0.0, -2.0, 4.0, 0.0, 0.0, 2.0, -4.0],
    [-4.0, 12.0, -4.0, 0.0, 0.0, -12.0, 8.0],
    [0.0, 0.0, 0.0, 3.0, -2.0, -4.0, 4.0],
    [0.0, 0.0, 0.0, -1.0, 2.0, -4.0, 4.0],
    [0.0, 2.0, -4.0, -2.0, -4.0, 16.0, -8.0],
    [4.0, -24.0, 16.0, 12.0, 24.0, -48.0, 16.0],
];

/// Moment vector `ṽ(O)` of a symmetric decomposition `Σ s_j A_j⊗A_j`.
pub fn symmetric_moment_vector(o: &SchmidtObservable) -> [C64; 7] {
    let r = o.rank();
    let s = &o.s;
    let a = &o.a;
    let tau: Vec<f64> = a.iter().map(|m| m.trace().re).collect();
    let s_tau2: f64 = (0..r).map(|j| s[j] * tau[j] * tau[j]).sum();
    let s2_tau2: f64 = (0..r).map(|j| s[j] * s[j] * tau[j] * tau[j]).sum();
    let s3_tau2: f64 = (0..r).map(|j| s[j].powi(3) * tau[j] * tau[j]).sum();
    let s_norm2: f64 = s.iter().map(|x| x * x).sum();
    let mut v3 = ZERO;
    let mut v7 = ZERO;
    for j1 in 0..r {
        for j2 in 0..r {
            let p = a[j1].matmul(&a[j2]);
            for j3 in 0..r {
                let tr = p.trace_product(&a[j3]);
                v3 += tr * (s[j1] * tau[j1] * s[j2] * tau[j2] * s[j3] * tau[j3]);
                v7 += tr * tr * (s[j1] * s[j2] * s[j3]);
            }
        }
    }
    let mut v6 = ZERO;
    for j in 0..r {
        let sq = a[j].matmul(&a[j]);
        for k in 0..r {
            v6 += sq.trace_product(&a[k]) * (s[j] * s[j] * tau[k] * s[k]);
        }
    }
    [
        C64::new(s_tau2.powi(3), 0.0),
        C64::new(s2_tau2 * s_tau2, 0.0),
        v3,
        C64::new(s_norm2 * s_tau2, 0.0),
        C64::new(s3_tau2, 0.0),
        v6,
        v7,
    ]
}

/// Class coefficients `c̃(O) = B ṽ(O) / 144` for a symmetric decomposition.
pub fn symmetric_coefficients_t3(o: &SchmidtObservable) -> Result<[C64; 7]> {
    if !o.is_symmetric(1e-10) {
        return Err(Error::InvalidInput("observable has no symmetric Schmidt decomposition".into()));
    }
    let v = symmetric_moment_vector(o);
    Ok(SYMMETRIC_B.map(|row| row.iter().zip(&v).map(|(b, x)| x * *b).sum::<C64>() / 144.0))
}

/// Rows (×16) giving each class's summed trace in
/// `(1, |α|²+|β|², tr(TᵀT), ⟨α,Tβ⟩, det T)`.
pub const SYMMETRIC_D: [[f64; 5]; 7] = [
    [16.0, 0.0, 0.0, 0.0, 0.0],
    [48.0, 24.0, 0.0, 0.0, 0.0],
    [8.0, 12.0, 0.0, 0.0, 0.0],
    [12.0, 12.0, 12.0, 0.0, 0.0],
    [24.0, 24.0, 0.0, 24.0, 0.0],
    [12.0, 24.0, 12.0, 24.0, 0.0],
    [1.0, 3.0, 3.0, 6.0, -6.0],
];

/// Coefficients on `(1, |α|²+|β|², tr(TᵀT), ⟨α,Tβ⟩, det T)` implied by
/// class coefficients `c̃`.
pub fn symmetric_invariant_coefficients(c: &[C64; 7]) -> [C64; 5] {
    let mut out = [ZERO; 5];
    for (k, row) in SYMMETRIC_D.iter().enumerate() {
        for l in 0..5 {
            out[l] += c[k] * row[l] / 16.0;
        }
    }
    out
}

/// The five transposition classes `(π_A, π_B, π_C)` at t = 3 for three
/// parties: all equal; A = B ≠ C; A = C ≠ B; B = C ≠ A; all distinct.
pub fn kempe_classes() -> [Vec<[&'static str; 3]>; 5] {
    let tr = ["(12)", "(13)", "(23)"];
    let mut out: [Vec<[&str; 3]>; 5] = Default::default();
    for a in tr {
        for b in tr {
            for c in tr {
                let k = match (a == b, a == c, b == c) {
                    (true, true, _) => 0,
                    (true, false, _) => 1,
                    (false, true, _) => 2,
                    (false, false, true) => 3,
                    (false, false, false) => 4,
                };
                out[k].push([a, b, c]);
            }
        }
    }
    out
}

/// `ĉ`: reduced-gauge coefficient sums over the five transposition classes.
pub fn kempe_class_coefficients(o: &ProductSum) -> Result<[C64; 5]> {
    if o.parties() != 3 {
        return Err(Error::DimensionMismatch("Kempe classes need a three-qubit observable".into()));
    }
    let c = twirl_coefficients(o, 3, Gauge::Reduced)?;
    let mut out = [ZERO; 5];
    for (k, members) in kempe_classes().iter().enumerate() {
        for m in members {
            out[k] += c.get_by_cycles(m)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
