//! JSON formats for states and observables.
//!
//! States are accepted in Bloch form,
//! `{"qubits":2, "alpha":[..], "beta":[..], "T":[[..]]}` (three qubits:
//! `alpha, beta, gamma, TAB, TBC, TCA, W`), or as a density matrix,
//! `{"matrix":[[[re,im], ...], ...]}`.
//!
//! Observables are a list of product terms. A term is
//! `{"weight":w, "factors":[m_1, ..., m_n]}` with each `m_k` a 2×2 complex
//! matrix, or `{"weight":w, "pauli":"XZ"}` in Pauli shorthand (`I, X, Y, Z`);
//! the weight defaults to 1. A two-qubit observable may also be given whole as
//! `{"matrix":[[[re,im], ...], ...]}` and is split by operator Schmidt
//! decomposition.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::observables::{schmidt_decompose, ProductSum, ProductTerm, RANK_TOLERANCE};
use crate::states::{bloch_from_density, density_from_bloch, BlochState, DensityMatrix, Mat3, Tensor3, ThreeQubitState, TwoQubitState, Vec3};

/// Matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows.iter().map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)).collect()).collect::<Vec<_>>())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoQubitJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qubits: Option<usize>,
    alpha: Vec3,
    beta: Vec3,
    #[serde(rename = "T")]
    t: Mat3,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThreeQubitJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qubits: Option<usize>,
    alpha: Vec3,
    beta: Vec3,
    gamma: Vec3,
    #[serde(rename = "TAB")]
    tab: Mat3,
    #[serde(rename = "TBC")]
    tbc: Mat3,
    #[serde(rename = "TCA")]
    tca: Mat3,
    #[serde(rename = "W")]
    w: Tensor3,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixStateJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qubits: Option<usize>,
    matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum StateJson {
    Matrix(MatrixStateJson),
    Three(ThreeQubitJson),
    Two(TwoQubitJson),
}

fn check_qubits(declared: Option<usize>, actual: usize) -> Result<()> {
    match declared {
        Some(q) if q != actual => Err(Error::InvalidInput(format!("\"qubits\" is {q} but the data describe {actual} qubits"))),
        _ => Ok(()),
    }
}

pub fn state_from_value(v: Value) -> Result<DensityMatrix> {
    let parsed: StateJson = serde_json::from_value(v)?;
    match parsed {
        StateJson::Matrix(m) => {
            let rho = DensityMatrix::new(matrix_from_json(&m.matrix)?)?;
            check_qubits(m.qubits, rho.qubits())?;
            Ok(rho)
        }
        StateJson::Two(s) => {
            check_qubits(s.qubits, 2)?;
            Ok(density_from_bloch(&BlochState::Two(TwoQubitState { alpha: s.alpha, beta: s.beta, t: s.t })))
        }
        StateJson::Three(s) => {
            check_qubits(s.qubits, 3)?;
            Ok(density_from_bloch(&BlochState::Three(ThreeQubitState {
                alpha: s.alpha,
                beta: s.beta,
                gamma: s.gamma,
                tab: s.tab,
                tbc: s.tbc,
                tca: s.tca,
                w: s.w,
            })))
        }
    }
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    state_from_value(serde_json::from_str(text)?)
}

/// Bloch form for two and three qubits, matrix form otherwise.
pub fn state_to_value(rho: &DensityMatrix) -> Result<Value> {
    let doc = match bloch_from_density(rho) {
        Ok(BlochState::Two(s)) => StateJson::Two(TwoQubitJson { qubits: Some(2), alpha: s.alpha, beta: s.beta, t: s.t }),
        Ok(BlochState::Three(s)) => StateJson::Three(ThreeQubitJson {
            qubits: Some(3),
            alpha: s.alpha,
            beta: s.beta,
            gamma: s.gamma,
            tab: s.tab,
            tbc: s.tbc,
            tca: s.tca,
            w: s.w,
        }),
        Err(_) => StateJson::Matrix(MatrixStateJson { qubits: Some(rho.qubits()), matrix: matrix_to_json(rho.matrix()) }),
    };
    Ok(serde_json::to_value(doc)?)
}

pub fn state_to_matrix_value(rho: &DensityMatrix) -> Result<Value> {
    Ok(serde_json::to_value(StateJson::Matrix(MatrixStateJson { qubits: Some(rho.qubits()), matrix: matrix_to_json(rho.matrix()) }))?)
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum TermJson {
    Factors {
        #[serde(default = "default_weight")]
        weight: f64,
        factors: Vec<MatrixJson>,
    },
    Pauli {
        #[serde(default = "default_weight")]
        weight: f64,
        pauli: String,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ObservableJson {
    Terms(Vec<TermJson>),
    Wrapped { terms: Vec<TermJson> },
    Matrix { matrix: MatrixJson },
}

fn terms_to_observable(terms: Vec<TermJson>) -> Result<ProductSum> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        match t {
            TermJson::Factors { weight, factors } => {
                out.push(ProductTerm::new(weight, factors.iter().map(matrix_from_json).collect::<Result<_>>()?))
            }
            TermJson::Pauli { weight, pauli } => {
                out.extend(ProductSum::from_paulis(&[(weight, pauli.as_str())])?.terms().iter().cloned())
            }
        }
    }
    ProductSum::new(out)
}

pub fn observable_from_value(v: Value) -> Result<ProductSum> {
    match serde_json::from_value(v)? {
        ObservableJson::Terms(t) | ObservableJson::Wrapped { terms: t } => terms_to_observable(t),
        ObservableJson::Matrix { matrix } => {
            let m = matrix_from_json(&matrix)?;
            if m.rows() != 4 || m.cols() != 4 {
                return Err(Error::DimensionMismatch(format!(
                    "a whole-matrix observable must be 4x4 (two qubits), got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            schmidt_decompose(&m, RANK_TOLERANCE)?.to_product_sum()
        }
    }
}

pub fn parse_observable(text: &str) -> Result<ProductSum> {
    observable_from_value(serde_json::from_str(text)?)
}

pub fn observable_to_value(o: &ProductSum) -> Result<Value> {
    let terms: Vec<TermJson> = o
        .terms()
        .iter()
        .map(|t| TermJson::Factors { weight: t.weight, factors: t.factors.iter().map(matrix_to_json).collect() })
        .collect();
    Ok(serde_json::to_value(terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::o_det;
    use crate::states::{bell_phi_plus, ghz, random_state, StateKind};

    #[test]
    fn state_round_trips() {
        for rho in [bell_phi_plus(), ghz(), random_state(StateKind::Mixed, 2, 3).unwrap(), random_state(StateKind::Pure, 3, 4).unwrap()] {
            let back = state_from_value(state_to_value(&rho).unwrap()).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
            let back = state_from_value(state_to_matrix_value(&rho).unwrap()).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn bloch_input() {
        let rho = parse_state(r#"{"qubits":2,"alpha":[0,0,0],"beta":[0,0,0],"T":[[1,0,0],[0,-1,0],[0,0,1]]}"#).unwrap();
        assert!(rho.matrix().max_abs_diff(bell_phi_plus().matrix()) < 1e-15);
        assert!(parse_state(r#"{"qubits":3,"alpha":[0,0,0],"beta":[0,0,0],"T":[[1,0,0],[0,-1,0],[0,0,1]]}"#).is_err());
        assert!(matches!(parse_state("{not json"), Err(Error::Json(_))));
    }

    #[test]
    fn observable_forms_agree() {
        let det = o_det().to_matrix();
        let shorthand = parse_observable(r#"[{"pauli":"XX"},{"pauli":"YY"},{"weight":1.0,"pauli":"ZZ"}]"#).unwrap();
        assert!(shorthand.to_matrix().max_abs_diff(&det) < 1e-15);
        let explicit = observable_from_value(observable_to_value(&o_det()).unwrap()).unwrap();
        assert!(explicit.to_matrix().max_abs_diff(&det) < 1e-15);
        let whole = observable_from_value(serde_json::json!({ "matrix": matrix_to_json(&det) })).unwrap();
        assert_eq!(whole.settings(), 3);
        assert!(whole.to_matrix().max_abs_diff(&det) < 1e-12);
        assert!(parse_observable(r#"[{"pauli":"XX"},{"pauli":"XYZ"}]"#).is_err());
    }
}
