//! Finite-shot simulation of the randomized-measurement protocols and the
//! invariant-recovery pipelines built on them.
//!
//! A protocol run draws `K` local unitary tuples; for each one every product
//! term ("setting") of the observable is measured `M` times in its rotated
//! eigenbasis. The term means are summed and raised to the power `t`, and the
//! `K` values are averaged.
//!
//! Recovery pipelines turn measured moments into invariants through an affine
//! calibration `R = a·I + b(known invariants)`. The calibration is fitted
//! against the exact engine over random Bloch records, and the known
//! invariants are recovered by their own pipelines first.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar_mc::{haar_local, pairwise_sum, MCEstimate};
use crate::invariants::{kempe, makhlin, MakhlinRecord};
use crate::linalg::{kron_all, pauli, ComplexMatrix, C64};
use crate::observables::{hodge_pair, o_det, ProductSum, ProductTerm};
use crate::rng;
use crate::states::{three_qubit_bloch, two_qubit_bloch, DensityMatrix, ThreeQubitState, TwoQubitState};
use crate::twirl::{fitting_records, invariant_degree, least_squares, orbit_coefficients, OrbitCoefficients};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// `K`, the number of random local unitary tuples.
    pub unitary_count: usize,
    /// `M`, projective measurements per setting and unitary.
    pub shots_per_setting: usize,
    pub t: u32,
    /// Radians per shot of the reference-frame drift; 0 disables it.
    pub drift_rate: f64,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.unitary_count == 0 || self.shots_per_setting == 0 {
            return Err(Error::InvalidInput("unitary_count and shots_per_setting must be at least 1".into()));
        }
        if !self.drift_rate.is_finite() {
            return Err(Error::InvalidInput("drift_rate must be finite".into()));
        }
        Ok(())
    }

    fn with(&self, t: u32, seed: u64) -> Self {
        Self { t, seed, ..self.clone() }
    }
}

/// One per-setting estimate `⟨U†O^{(j)}U⟩` from `M` shots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub observable: String,
    pub unitary: usize,
    pub setting: usize,
    pub estimate: f64,
}

/// Drift axis of each party: z, x, y, repeating.
fn drift_axis(party: usize) -> usize {
    [3, 1, 2][party % 3]
}

/// `exp(−iθσ/2)` on every party.
fn drift_unitaries(theta: f64, parties: usize) -> Vec<ComplexMatrix> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    (0..parties)
        .map(|p| &ComplexMatrix::identity(2).scale_real(c) - &pauli(drift_axis(p)).scale(C64::new(0.0, s)))
        .collect()
}

/// Rotated eigenbasis of one setting: joint basis vectors as columns and
/// the outcome value attached to each.
struct Setting {
    basis: ComplexMatrix,
    values: Vec<f64>,
}

fn rotated_setting(term: &ProductTerm, us: &[ComplexMatrix]) -> Result<Setting> {
    let mut vectors = Vec::with_capacity(us.len());
    let mut values = vec![term.weight];
    for (f, u) in term.factors.iter().zip(us) {
        // U†fU has the spectrum of f and eigenvectors U†v
        let (ev, vecs) = f.hermitian_eigen()?;
        values = values.iter().flat_map(|v| ev.iter().map(move |e| v * e)).collect();
        vectors.push(u.adjoint().matmul(&vecs));
    }
    Ok(Setting { basis: kron_all(&vectors), values })
}

/// Born-rule probabilities of the columns of `basis` in state `rho`.
fn outcome_probabilities(rho: &ComplexMatrix, basis: &ComplexMatrix) -> Vec<f64> {
    let rotated = basis.adjoint().matmul(rho).matmul(basis);
    (0..basis.cols()).map(|i| rotated[(i, i)].re.max(0.0)).collect()
}

fn sample_index(probs: &[f64], g: &mut impl Rng) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = g.random::<f64>() * total;
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

/// Mean outcome of `shots` measurements of one setting. `first_shot` is the
/// global shot counter used by the drift model.
fn measure_setting(rho: &ComplexMatrix, setting: &Setting, shots: usize, first_shot: u64, drift: f64, g: &mut impl Rng) -> f64 {
    let parties = rho.rows().trailing_zeros() as usize;
    let mut sum = 0.0;
    // one uniform draw per shot on both paths, so runs with and without
    // drift stay paired
    if drift == 0.0 {
        let probs = outcome_probabilities(rho, &setting.basis);
        for _ in 0..shots {
            sum += setting.values[sample_index(&probs, g)];
        }
    } else {
        for m in 0..shots {
            let theta = drift * (first_shot + m as u64) as f64;
            let d = kron_all(&drift_unitaries(theta, parties));
            let drifted = d.matmul(rho).matmul(&d.adjoint());
            sum += setting.values[sample_index(&outcome_probabilities(&drifted, &setting.basis), g)];
        }
    }
    sum / shots as f64
}

fn check_dims(o: &ProductSum, rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != o.dim() || rho.cols() != o.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, observable acts on {} qubits",
            rho.rows(),
            rho.cols(),
            o.parties()
        )));
    }
    Ok(())
}

/// Simulates the protocol for `o` on `rho`; see the module docs.
pub fn simulate_moment(o: &ProductSum, rho: &ComplexMatrix, cfg: &ProtocolConfig) -> Result<MCEstimate> {
    Ok(simulate_moment_traced(o, rho, cfg, "")?.0)
}

/// [`simulate_moment`] that also returns every per-setting estimate.
pub fn simulate_moment_traced(o: &ProductSum, rho: &ComplexMatrix, cfg: &ProtocolConfig, label: &str) -> Result<(MCEstimate, Vec<TraceRow>)> {
    cfg.validate()?;
    check_dims(o, rho)?;
    let settings = o.terms().len();
    let shots = cfg.shots_per_setting;
    let per_draw: Vec<Vec<f64>> = (0..cfg.unitary_count)
        .into_par_iter()
        .map(|k| {
            let mut g = rng::indexed(cfg.seed, "protocol", k as u64);
            let us = haar_local(&mut g, o.parties());
            o.terms()
                .iter()
                .enumerate()
                .map(|(j, term)| {
                    let first = ((k * settings + j) * shots) as u64;
                    Ok(measure_setting(rho, &rotated_setting(term, &us)?, shots, first, cfg.drift_rate, &mut g))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = per_draw.iter().map(|e| e.iter().sum::<f64>().powi(cfg.t as i32)).collect();
    let n = values.len() as f64;
    let mean = pairwise_sum(&values) / n;
    let stderr = if values.len() > 1 {
        let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        (pairwise_sum(&dev) / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let trace = per_draw
        .iter()
        .enumerate()
        .flat_map(|(k, e)| {
            e.iter()
                .enumerate()
                .map(move |(j, v)| TraceRow { observable: label.to_string(), unitary: k, setting: j, estimate: *v })
        })
        .collect();
    Ok((MCEstimate { mean, stderr, samples: cfg.unitary_count, seed: cfg.seed }, trace))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub invariant: String,
    pub estimate: f64,
    pub stderr: f64,
    /// Exact value from the invariants module.
    pub reference: f64,
    /// Largest number of product settings of any observable measured.
    pub settings_used: usize,
}

/// Pipelines of the continuous two-qubit invariants, in recovery order.
pub const PIPELINES: [&str; 12] = ["I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9", "I12", "I13", "det", "hodge"];

/// `I1²` from `σ_z⊗σ_z` at t = 6; a type-1 prerequisite of I6 and I9.
pub const DET_SQ: &str = "det_sq";

struct Row {
    t: usize,
    /// Measured quantity `Σ w_i R^{(t)}_{O_i}`.
    observables: Vec<(f64, ProductSum)>,
    knowns: &'static [&'static str],
}

fn z_plus_one() -> ComplexMatrix {
    &pauli(0) + &pauli(3)
}

fn product2(a: ComplexMatrix, b: ComplexMatrix) -> ProductSum {
    ProductSum::product(vec![a, b]).expect("2x2 Hermitian factors")
}

fn row(name: &str) -> Result<Row> {
    let z = pauli(3);
    let id = pauli(0);
    let s3 = 3f64.sqrt();
    let single = |o: ProductSum| vec![(1.0, o)];
    let (t, observables, knowns): (usize, _, &'static [&'static str]) = match name {
        "I2" => (2, single(product2(z.scale_real(3.0), z.clone())), &[]),
        "I3" => (4, single(product2(z.clone(), z.clone())), &["I2"]),
        "I4" => (2, single(product2(z.scale_real(s3), id.clone())), &[]),
        "I5" => (4, single(product2(z.clone(), z_plus_one())), &["I2", "I3", "I4"]),
        "I6" => (6, single(product2(z.clone(), z_plus_one())), &["I2", "I3", "I4", "I5", DET_SQ]),
        "I7" => (2, single(product2(id.clone(), z.scale_real(s3))), &[]),
        "I8" => (4, single(product2(z_plus_one(), z.clone())), &["I2", "I3", "I7"]),
        "I9" => (6, single(product2(z_plus_one(), z.clone())), &["I2", "I3", "I7", "I8", DET_SQ]),
        "I12" => (3, single(product2(z_plus_one(), z_plus_one())), &["I2", "I4", "I7"]),
        "I13" => (5, single(product2(z_plus_one(), z_plus_one())), &["I2", "I3", "I4", "I5", "I7", "I8", "I12"]),
        "det" => (3, single(o_det()), &[]),
        "hodge" => {
            let (plus, minus) = hodge_pair();
            (4, vec![(1.0, plus), (-1.0, minus)], &["det"])
        }
        DET_SQ => (6, single(product2(z.clone(), z)), &["I2", "I3"]),
        other => return Err(Error::InvalidInput(format!("unknown invariant pipeline {other:?}"))),
    };
    Ok(Row { t, observables, knowns })
}

/// Exact value of a pipeline's target on a Bloch record.
pub fn pipeline_value(name: &str, r: &MakhlinRecord) -> Option<f64> {
    match name {
        "det" => Some(r.i1),
        "hodge" => Some(r.i14),
        DET_SQ => Some(r.i1 * r.i1),
        other => r.continuous(other),
    }
}

fn pipeline_degree(name: &str) -> u32 {
    match name {
        "det" => 3,
        "hodge" => 4,
        DET_SQ => 6,
        other => invariant_degree(other).unwrap_or(u32::MAX),
    }
}

/// Monomials (as lists of pipeline names) of total degree ≤ `max`,
/// starting with the constant.
fn monomials(names: &[&'static str], max: u32) -> Vec<Vec<&'static str>> {
    fn rec(names: &[&'static str], start: usize, left: u32, cur: &mut Vec<&'static str>, out: &mut Vec<Vec<&'static str>>) {
        for i in start..names.len() {
            let d = pipeline_degree(names[i]);
            if d <= left {
                cur.push(names[i]);
                out.push(cur.clone());
                rec(names, i, left - d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = vec![Vec::new()];
    rec(names, 0, max, &mut Vec::new(), &mut out);
    out
}

/// `R = a·target + Σ b_m·m(knowns)`, fitted against the exact engine.
#[derive(Clone, Debug)]
pub struct Calibration {
    pub a: f64,
    pub monomials: Vec<Vec<&'static str>>,
    pub b: Vec<f64>,
    pub residual: f64,
    engines: Vec<(f64, OrbitCoefficients)>,
}

/// Largest fit misfit accepted, relative to the largest fitted moment.
pub const CALIBRATION_TOLERANCE: f64 = 1e-9;

fn fit_calibration(name: &str) -> Result<Calibration> {
    let row = row(name)?;
    let engines: Vec<(f64, OrbitCoefficients)> =
        row.observables.iter().map(|(w, o)| Ok((*w, orbit_coefficients(o, row.t)?))).collect::<Result<_>>()?;
    let monomials = monomials(row.knowns, row.t as u32);
    let cols = monomials.len() + 1;
    let records = fitting_records(3 * cols, &format!("calibration/{name}"));
    let targets: Vec<f64> = records
        .par_iter()
        .map(|s| measured_exact(&engines, &s.to_matrix()))
        .collect::<Result<_>>()?;
    let design = DMatrix::from_fn(records.len(), cols, |i, j| {
        let r = makhlin(&records[i]);
        if j == 0 {
            pipeline_value(name, &r).unwrap_or(f64::NAN)
        } else {
            monomials[j - 1].iter().map(|n| pipeline_value(n, &r).unwrap_or(f64::NAN)).product()
        }
    });
    let (coef, residual) = least_squares(&design, &targets)?;
    let scale = targets.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if residual > CALIBRATION_TOLERANCE * scale {
        return Err(Error::Residual { residual: residual / scale, tolerance: CALIBRATION_TOLERANCE });
    }
    if coef[0].abs() < 1e-9 {
        return Err(Error::Singular(format!("the {name} observable does not depend on its target")));
    }
    Ok(Calibration { a: coef[0], monomials, b: coef[1..].to_vec(), residual, engines })
}

fn measured_exact(engines: &[(f64, OrbitCoefficients)], rho: &ComplexMatrix) -> Result<f64> {
    engines.iter().map(|(w, c)| Ok(w * c.moment(rho)?)).sum()
}

/// Cached calibration of a pipeline.
pub fn calibration(name: &str) -> Result<Arc<Calibration>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Calibration>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("calibration cache").get(name) {
        return Ok(c.clone());
    }
    let c = Arc::new(fit_calibration(name)?);
    cache.lock().expect("calibration cache").insert(name.to_string(), c.clone());
    Ok(c)
}

/// Prerequisites of a pipeline, direct and indirect.
pub fn prerequisites(name: &str) -> Result<Vec<&'static str>> {
    let mut out: Vec<&'static str> = Vec::new();
    for k in row(name)?.knowns {
        for p in prerequisites(k)? {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        if !out.contains(k) {
            out.push(k);
        }
    }
    Ok(out)
}

/// Where moments come from: the exact engine or a finite-shot simulation.
#[derive(Clone, Copy, Debug)]
enum Source<'a> {
    Exact,
    Shots(&'a ProtocolConfig),
}

#[derive(Clone, Copy, Debug)]
struct Measured {
    value: f64,
    stderr: f64,
    settings: usize,
}

struct Pipeline<'a> {
    source: Source<'a>,
    /// Label prefix for seeds and trace rows.
    scope: String,
    trace: Option<&'a Mutex<Vec<TraceRow>>>,
}

impl Pipeline<'_> {
    fn moment(&self, label: &str, o: &ProductSum, engine: &OrbitCoefficients, t: usize, rho: &ComplexMatrix) -> Result<(f64, f64)> {
        match self.source {
            Source::Exact => Ok((engine.moment(rho)?, 0.0)),
            Source::Shots(cfg) => {
                let full = format!("{}{label}", self.scope);
                let cfg = cfg.with(t as u32, rng::child_seed(cfg.seed, &full));
                let (est, rows) = simulate_moment_traced(o, rho, &cfg, &full)?;
                if let Some(sink) = self.trace {
                    sink.lock().expect("trace sink").extend(rows);
                }
                Ok((est.mean, est.stderr))
            }
        }
    }

    fn recover(&self, name: &str, rho: &ComplexMatrix, memo: &mut HashMap<String, Measured>) -> Result<Measured> {
        if let Some(m) = memo.get(name) {
            return Ok(*m);
        }
        let row = row(name)?;
        let cal = calibration(name)?;
        let mut settings = 0;
        let mut known = HashMap::new();
        for k in row.knowns {
            let m = self.recover(k, rho, memo)?;
            settings = settings.max(m.settings);
            known.insert(*k, m);
        }
        let (mut q, mut var) = (0.0, 0.0);
        for (i, ((w, o), (_, engine))) in row.observables.iter().zip(&cal.engines).enumerate() {
            let (v, se) = self.moment(&format!("{name}/{i}"), o, engine, row.t, rho)?;
            q += w * v;
            var += (w * se).powi(2);
            settings = settings.max(o.settings());
        }
        let offset: f64 = cal.monomials.iter().zip(&cal.b).map(|(m, b)| b * m.iter().map(|n| known[n].value).product::<f64>()).sum();
        // first-order propagation of the known invariants' errors
        for (k, m) in &known {
            let grad: f64 = cal
                .monomials
                .iter()
                .zip(&cal.b)
                .map(|(mono, b)| {
                    let mut d = 0.0;
                    for (i, n) in mono.iter().enumerate() {
                        if n == k {
                            let rest: f64 = mono.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, n)| known[n].value).product();
                            d += rest;
                        }
                    }
                    b * d
                })
                .sum();
            var += (grad * m.stderr).powi(2);
        }
        let out = Measured { value: (q - offset) / cal.a, stderr: var.sqrt() / cal.a.abs(), settings };
        memo.insert(name.to_string(), out);
        Ok(out)
    }
}

fn two_qubit_input(rho: &DensityMatrix) -> Result<TwoQubitState> {
    if rho.qubits() != 2 {
        return Err(Error::DimensionMismatch(format!("expected a two-qubit state, got {} qubits", rho.qubits())));
    }
    two_qubit_bloch(rho.matrix())
}

fn recover_with(name: &str, rho: &DensityMatrix, source: Source, trace: Option<&Mutex<Vec<TraceRow>>>) -> Result<RecoveryReport> {
    let bloch = two_qubit_input(rho)?;
    let pipeline = Pipeline { source, scope: String::new(), trace };
    let m = pipeline.recover(name, rho.matrix(), &mut HashMap::new())?;
    Ok(RecoveryReport {
        invariant: name.to_string(),
        estimate: m.value,
        stderr: m.stderr,
        reference: pipeline_value(name, &makhlin(&bloch)).unwrap_or(f64::NAN),
        settings_used: m.settings,
    })
}

/// Runs the pipeline for `name` (a [`PIPELINES`] entry or [`DET_SQ`]) with
/// finite shots. The moment order comes from the pipeline, not `cfg.t`.
pub fn recover_invariant(name: &str, rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<RecoveryReport> {
    cfg.validate()?;
    recover_with(name, rho, Source::Shots(cfg), None)
}

/// [`recover_invariant`] returning the per-setting trace as well.
pub fn recover_invariant_traced(name: &str, rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<(RecoveryReport, Vec<TraceRow>)> {
    cfg.validate()?;
    let sink = Mutex::new(Vec::new());
    let report = recover_with(name, rho, Source::Shots(cfg), Some(&sink))?;
    Ok((report, sink.into_inner().expect("trace sink")))
}

/// The same pipeline with every moment taken from the exact engine.
pub fn recover_invariant_exact(name: &str, rho: &DensityMatrix) -> Result<RecoveryReport> {
    recover_with(name, rho, Source::Exact, None)
}

/// `O_1 … O_4` of the Kempe protocol followed by `(1+σ_z)^{⊗3}`.
pub fn kempe_observables() -> [ProductSum; 5] {
    let id = pauli(0);
    let z = pauli(3);
    let m = &id - &pauli(1);
    let two = |a: [&ComplexMatrix; 3], b: [&ComplexMatrix; 3]| {
        ProductSum::new(vec![
            ProductTerm::new(1.0, a.map(|x| x.clone()).to_vec()),
            ProductTerm::new(1.0, b.map(|x| x.clone()).to_vec()),
        ])
        .expect("valid tripartite observable")
    };
    let zp = z_plus_one();
    [
        two([&id, &id, &id], [&z, &z, &z]),
        two([&id, &id, &m], [&z, &z, &m]),
        two([&id, &m, &id], [&z, &m, &z]),
        two([&m, &id, &id], [&m, &z, &z]),
        ProductSum::product(vec![zp.clone(), zp.clone(), zp]).expect("valid product"),
    ]
}

/// Ordered pairs whose two-qubit marginals feed the Kempe protocol.
pub const KEMPE_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Two-qubit marginal `(p, q)` of a three-qubit Bloch record, with `p` as
/// the first party.
pub fn marginal(s: &ThreeQubitState, (p, q): (usize, usize)) -> TwoQubitState {
    let local = [s.alpha, s.beta, s.gamma];
    let t = match (p, q) {
        (0, 1) => s.tab,
        (1, 2) => s.tbc,
        (2, 0) => s.tca,
        (1, 0) => crate::invariants::transpose(&s.tab),
        (2, 1) => crate::invariants::transpose(&s.tbc),
        (0, 2) => crate::invariants::transpose(&s.tca),
        _ => panic!("marginal of parties {p}, {q}"),
    };
    TwoQubitState { alpha: local[p], beta: local[q], t }
}

/// Marginal invariants used as features, per pair: I4, I2, I12.
const KEMPE_MARGINAL: [&str; 3] = ["I4", "I2", "I12"];

fn kempe_features_exact(s: &ThreeQubitState, engines: &[OrbitCoefficients]) -> Result<Vec<f64>> {
    let rho = s.to_matrix();
    let mut f = vec![1.0];
    for e in engines {
        f.push(e.moment(&rho)?);
    }
    for pair in KEMPE_PAIRS {
        let r = makhlin(&marginal(s, pair));
        f.extend(KEMPE_MARGINAL.iter().map(|n| r.continuous(n).expect("continuous")));
    }
    Ok(f)
}

/// `I_Kempe = λ·features`, fitted against the exact engine.
pub struct KempeCalibration {
    pub lambda: Vec<f64>,
    pub residual: f64,
    engines: Vec<OrbitCoefficients>,
}

const KEMPE_T: usize = 3;

pub fn kempe_calibration() -> Result<&'static KempeCalibration> {
    static CAL: OnceLock<KempeCalibration> = OnceLock::new();
    if let Some(c) = CAL.get() {
        return Ok(c);
    }
    let engines: Vec<OrbitCoefficients> = kempe_observables().iter().map(|o| orbit_coefficients(o, KEMPE_T)).collect::<Result<_>>()?;
    let cols = 1 + engines.len() + KEMPE_PAIRS.len() * KEMPE_MARGINAL.len();
    let mut g = rng::substream(0x5eed_f17, "calibration/kempe");
    let records: Vec<ThreeQubitState> = (0..3 * cols).map(|_| ThreeQubitState::random_record(&mut g)).collect();
    let rows: Vec<Vec<f64>> = records.par_iter().map(|s| kempe_features_exact(s, &engines)).collect::<Result<_>>()?;
    let design = DMatrix::from_fn(records.len(), cols, |i, j| rows[i][j]);
    let target: Vec<f64> = records.iter().map(|s| kempe(s).kempe).collect();
    let (lambda, residual) = least_squares(&design, &target)?;
    if residual > CALIBRATION_TOLERANCE {
        return Err(Error::Residual { residual, tolerance: CALIBRATION_TOLERANCE });
    }
    Ok(CAL.get_or_init(|| KempeCalibration { lambda, residual, engines }))
}

fn three_qubit_input(rho: &DensityMatrix) -> Result<ThreeQubitState> {
    if rho.qubits() != 3 {
        return Err(Error::DimensionMismatch(format!("expected a three-qubit state, got {} qubits", rho.qubits())));
    }
    three_qubit_bloch(rho.matrix())
}

fn kempe_with(rho: &DensityMatrix, source: Source, trace: Option<&Mutex<Vec<TraceRow>>>) -> Result<RecoveryReport> {
    let s = three_qubit_input(rho)?;
    let cal = kempe_calibration()?;
    let observables = kempe_observables();
    let mut features = vec![(1.0, 0.0)];
    let mut settings = 0;
    let pipeline = Pipeline { source, scope: "kempe/".into(), trace };
    for (i, (o, e)) in observables.iter().zip(&cal.engines).enumerate() {
        features.push(pipeline.moment(&format!("O{}", i + 1), o, e, KEMPE_T, rho.matrix())?);
        settings = settings.max(o.settings());
    }
    for pair in KEMPE_PAIRS {
        // measuring O⊗1 on the full state is measuring O on the marginal
        let m = marginal(&s, pair).to_matrix();
        let sub = Pipeline { source, scope: format!("kempe/{}{}/", pair.0, pair.1), trace };
        let mut memo = HashMap::new();
        for n in KEMPE_MARGINAL {
            let r = sub.recover(n, &m, &mut memo)?;
            settings = settings.max(r.settings);
            features.push((r.value, r.stderr));
        }
    }
    let estimate = features.iter().zip(&cal.lambda).map(|((v, _), l)| v * l).sum();
    let stderr = features.iter().zip(&cal.lambda).map(|((_, se), l)| (se * l).powi(2)).sum::<f64>().sqrt();
    Ok(RecoveryReport { invariant: "kempe".into(), estimate, stderr, reference: kempe(&s).kempe, settings_used: settings })
}

/// Kempe invariant of a three-qubit state from finite shots.
pub fn recover_kempe(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<RecoveryReport> {
    cfg.validate()?;
    kempe_with(rho, Source::Shots(cfg), None)
}

pub fn recover_kempe_traced(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<(RecoveryReport, Vec<TraceRow>)> {
    cfg.validate()?;
    let sink = Mutex::new(Vec::new());
    let report = kempe_with(rho, Source::Shots(cfg), Some(&sink))?;
    Ok((report, sink.into_inner().expect("trace sink")))
}

pub fn recover_kempe_exact(rho: &DensityMatrix) -> Result<RecoveryReport> {
    kempe_with(rho, Source::Exact, None)
}
