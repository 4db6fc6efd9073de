//! Two- and three-qubit states in density-matrix and Bloch form.
//!
//! Two qubits: `ρ = ¼[1⊗1 + α·σ⊗1 + 1⊗β·σ + Σ T_jk σ_j⊗σ_k]`.
//! Three qubits follow the same pattern with local vectors `α, β, γ`, pair
//! correlations `T^AB, T^BC, T^CA` and the three-body tensor `W`. Note that
//! `T^CA_jk` multiplies `σ_k ⊗ 1 ⊗ σ_j`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, pauli, ComplexMatrix, C64, HERMITIAN_TOL};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub alpha: Vec3,
    pub beta: Vec3,
    #[serde(rename = "T")]
    pub t: Mat3,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThreeQubitState {
    pub alpha: Vec3,
    pub beta: Vec3,
    pub gamma: Vec3,
    #[serde(rename = "TAB")]
    pub tab: Mat3,
    #[serde(rename = "TBC")]
    pub tbc: Mat3,
    #[serde(rename = "TCA")]
    pub tca: Mat3,
    #[serde(rename = "W")]
    pub w: Tensor3,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlochState {
    Two(TwoQubitState),
    Three(ThreeQubitState),
}

/// Hermitian, unit-trace matrix on two or three qubits. Positivity is not
/// enforced: partially transposed states and arbitrary Bloch records are
/// legitimate arguments of the moment functions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    qubits: usize,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    /// Validates Hermiticity and unit trace to `tol`.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} density matrix", matrix.rows(), matrix.cols())));
        }
        let qubits = match matrix.rows() {
            4 => 2,
            8 => 3,
            n => return Err(Error::DimensionMismatch(format!("expected a 4x4 or 8x8 density matrix, got {n}x{n}"))),
        };
        let dev = matrix.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.max(1e-12) {
            return Err(Error::InvalidInput(format!("density matrix has trace {tr}")));
        }
        Ok(Self { matrix, qubits })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues().map(|v| v[0]).unwrap_or(f64::NAN)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Partial transpose on `party` (1-based, as in `ρ^{T_2}`).
    pub fn partial_transpose(&self, party: usize) -> Result<Self> {
        if party == 0 || party > self.qubits {
            return Err(Error::InvalidInput(format!("party {party} of a {}-qubit state (parties are 1-based)", self.qubits)));
        }
        Ok(Self { matrix: self.matrix.partial_transpose(party - 1)?, qubits: self.qubits })
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.matrix.rows() {
            return Err(Error::DimensionMismatch("unitary and state dimensions differ".into()));
        }
        Ok(Self { matrix: self.matrix.conjugate_by(u), qubits: self.qubits })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        let n = match qubits {
            2 => 4,
            3 => 8,
            q => return Err(Error::InvalidInput(format!("{q} qubits not supported"))),
        };
        Ok(Self { matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64), qubits })
    }

    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(C64::norm_sqr).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidInput("zero ket".into()));
        }
        let n = ket.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| ket[i] * ket[j].conj() / norm);
        Self::new(m)
    }
}

/// `|Φ+⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    DensityMatrix::from_ket(&[C64::new(h, 0.0), z, z, C64::new(h, 0.0)]).expect("normalized ket")
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut ket = vec![C64::new(0.0, 0.0); 8];
    ket[0] = C64::new(h, 0.0);
    ket[7] = C64::new(h, 0.0);
    DensityMatrix::from_ket(&ket).expect("normalized ket")
}

fn pauli_string(indices: &[usize]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = indices.iter().map(|&k| pauli(k)).collect();
    kron_all(factors.iter())
}

fn expectation(rho: &ComplexMatrix, indices: &[usize]) -> f64 {
    rho.trace_product(&pauli_string(indices)).re
}

pub fn two_qubit_bloch(rho: &ComplexMatrix) -> Result<TwoQubitState> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit Bloch form needs 4x4, got {}x{}", rho.rows(), rho.cols())));
    }
    let mut s = TwoQubitState::default();
    for j in 0..3 {
        s.alpha[j] = expectation(rho, &[j + 1, 0]);
        s.beta[j] = expectation(rho, &[0, j + 1]);
        for k in 0..3 {
            s.t[j][k] = expectation(rho, &[j + 1, k + 1]);
        }
    }
    Ok(s)
}

pub fn three_qubit_bloch(rho: &ComplexMatrix) -> Result<ThreeQubitState> {
    if rho.rows() != 8 || rho.cols() != 8 {
        return Err(Error::DimensionMismatch(format!("three-qubit Bloch form needs 8x8, got {}x{}", rho.rows(), rho.cols())));
    }
    let mut s = ThreeQubitState::default();
    for j in 0..3 {
        s.alpha[j] = expectation(rho, &[j + 1, 0, 0]);
        s.beta[j] = expectation(rho, &[0, j + 1, 0]);
        s.gamma[j] = expectation(rho, &[0, 0, j + 1]);
        for k in 0..3 {
            s.tab[j][k] = expectation(rho, &[j + 1, k + 1, 0]);
            s.tbc[j][k] = expectation(rho, &[0, j + 1, k + 1]);
            s.tca[j][k] = expectation(rho, &[k + 1, 0, j + 1]);
            for l in 0..3 {
                s.w[j][k][l] = expectation(rho, &[j + 1, k + 1, l + 1]);
            }
        }
    }
    Ok(s)
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochState> {
    match rho.qubits() {
        2 => Ok(BlochState::Two(two_qubit_bloch(rho.matrix())?)),
        3 => Ok(BlochState::Three(three_qubit_bloch(rho.matrix())?)),
        q => Err(Error::DimensionMismatch(format!("{q} qubits"))),
    }
}

impl TwoQubitState {
    /// Reconstructed matrix; Hermitian with unit trace by construction.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = pauli_string(&[0, 0]);
        for j in 0..3 {
            m = &m + &pauli_string(&[j + 1, 0]).scale_real(self.alpha[j]);
            m = &m + &pauli_string(&[0, j + 1]).scale_real(self.beta[j]);
            for k in 0..3 {
                m = &m + &pauli_string(&[j + 1, k + 1]).scale_real(self.t[j][k]);
            }
        }
        m.scale_real(0.25)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { matrix: self.to_matrix(), qubits: 2 }
    }

    /// Transposition of party 1 or 2 (1-based, as in `ρ^{T_2}`). Since
    /// `σ_y^T = −σ_y`, this flips the y component of that party.
    pub fn partial_transpose(&self, party: usize) -> Result<Self> {
        let mut s = self.clone();
        match party {
            1 => {
                s.alpha[1] = -s.alpha[1];
                for k in 0..3 {
                    s.t[1][k] = -s.t[1][k];
                }
            }
            2 => {
                s.beta[1] = -s.beta[1];
                for row in s.t.iter_mut() {
                    row[1] = -row[1];
                }
            }
            p => return Err(Error::InvalidInput(format!("party {p} (expected 1 or 2)"))),
        }
        Ok(s)
    }

    /// Entries drawn uniformly from `[-1, 1]`; usually not a physical state.
    pub fn random_record(rng: &mut impl Rng) -> Self {
        let mut s = Self::default();
        for j in 0..3 {
            s.alpha[j] = rng.random_range(-1.0..1.0);
            s.beta[j] = rng.random_range(-1.0..1.0);
            for k in 0..3 {
                s.t[j][k] = rng.random_range(-1.0..1.0);
            }
        }
        s
    }
}

impl ThreeQubitState {
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = pauli_string(&[0, 0, 0]);
        for j in 0..3 {
            m = &m + &pauli_string(&[j + 1, 0, 0]).scale_real(self.alpha[j]);
            m = &m + &pauli_string(&[0, j + 1, 0]).scale_real(self.beta[j]);
            m = &m + &pauli_string(&[0, 0, j + 1]).scale_real(self.gamma[j]);
            for k in 0..3 {
                m = &m + &pauli_string(&[j + 1, k + 1, 0]).scale_real(self.tab[j][k]);
                m = &m + &pauli_string(&[0, j + 1, k + 1]).scale_real(self.tbc[j][k]);
                m = &m + &pauli_string(&[k + 1, 0, j + 1]).scale_real(self.tca[j][k]);
                for l in 0..3 {
                    m = &m + &pauli_string(&[j + 1, k + 1, l + 1]).scale_real(self.w[j][k][l]);
                }
            }
        }
        m.scale_real(0.125)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { matrix: self.to_matrix(), qubits: 3 }
    }

    /// Transposition of party 1, 2 or 3: flips every y component carried by
    /// that party.
    pub fn partial_transpose(&self, party: usize) -> Result<Self> {
        if !(1..=3).contains(&party) {
            return Err(Error::InvalidInput(format!("party {party} (expected 1, 2 or 3)")));
        }
        let mut s = self.clone();
        let flip = |k: usize, p: usize| if k == 1 && p == party { -1.0 } else { 1.0 };
        for j in 0..3 {
            s.alpha[j] *= flip(j, 1);
            s.beta[j] *= flip(j, 2);
            s.gamma[j] *= flip(j, 3);
            for k in 0..3 {
                s.tab[j][k] *= flip(j, 1) * flip(k, 2);
                s.tbc[j][k] *= flip(j, 2) * flip(k, 3);
                s.tca[j][k] *= flip(j, 3) * flip(k, 1);
                for l in 0..3 {
                    s.w[j][k][l] *= flip(j, 1) * flip(k, 2) * flip(l, 3);
                }
            }
        }
        Ok(s)
    }

    pub fn random_record(rng: &mut impl Rng) -> Self {
        let mut s = Self::default();
        let mut u = || rng.random_range(-1.0..1.0);
        for j in 0..3 {
            s.alpha[j] = u();
            s.beta[j] = u();
            s.gamma[j] = u();
            for k in 0..3 {
                s.tab[j][k] = u();
                s.tbc[j][k] = u();
                s.tca[j][k] = u();
                for l in 0..3 {
                    s.w[j][k][l] = u();
                }
            }
        }
        s
    }
}

pub fn density_from_bloch(s: &BlochState) -> DensityMatrix {
    match s {
        BlochState::Two(s) => s.to_density(),
        BlochState::Three(s) => s.to_density(),
    }
}

/// Transposition of one party of a two-qubit Bloch record.
pub fn partial_transpose_bloch(s: &TwoQubitState, party: usize) -> Result<TwoQubitState> {
    s.partial_transpose(party)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Pure states are Haar-random kets; mixed states are `GG†/tr(GG†)` with a
/// square Ginibre matrix `G` (Hilbert–Schmidt measure).
pub fn random_state_with(kind: StateKind, qubits: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let n = match qubits {
        2 => 4,
        3 => 8,
        q => return Err(Error::InvalidInput(format!("{q} qubits not supported"))),
    };
    let m = match kind {
        StateKind::Pure => {
            let ket: Vec<C64> = (0..n).map(|_| gaussian_c64(rng)).collect();
            let norm: f64 = ket.iter().map(C64::norm_sqr).sum();
            ComplexMatrix::from_fn(n, n, |i, j| ket[i] * ket[j].conj() / norm)
        }
        StateKind::Mixed => {
            let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_c64(rng));
            let ggd = g.matmul(&g.adjoint());
            let tr = ggd.trace().re;
            ggd.scale_real(1.0 / tr)
        }
    };
    // symmetrize away rounding so the Hermiticity check is exact
    let m = (&m + &m.adjoint()).scale_real(0.5);
    Ok(DensityMatrix { matrix: m, qubits })
}

pub fn random_state(kind: StateKind, qubits: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = crate::rng::substream(seed, "states");
    random_state_with(kind, qubits, &mut rng)
}

/// `(tr|ρ^{T_2}| − 1)/2` from the spectrum of the partial transpose.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    if rho.qubits() != 2 {
        return Err(Error::DimensionMismatch("negativity is defined here for two qubits".into()));
    }
    let ev = rho.matrix().partial_transpose(1)?.hermitian_eigenvalues()?;
    let trace_norm: f64 = ev.iter().map(|x| x.abs()).sum();
    Ok(((trace_norm - 1.0) / 2.0).max(0.0))
}
