//! Observables as sums of product terms, operator Schmidt decomposition and
//! the determinant prefactor.

use nalgebra::{DMatrix, Matrix3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, pauli, real_svd, ComplexMatrix, C64, HERMITIAN_TOL};

/// Default threshold at or below which a Schmidt coefficient counts as zero.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub factors: Vec<ComplexMatrix>,
}

impl ProductTerm {
    pub fn new(weight: f64, factors: Vec<ComplexMatrix>) -> Self {
        Self { weight, factors }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        kron_all(self.factors.iter()).scale_real(self.weight)
    }
}

/// `O = Σ_j w_j A_j^{(1)} ⊗ … ⊗ A_j^{(n)}` with Hermitian qubit factors. The
/// number of terms is the number of measurement settings per random frame.
/// Factors need not be orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSum {
    parties: usize,
    terms: Vec<ProductTerm>,
}

/// Three-party observables are plain product sums.
pub type TripartiteObservable = ProductSum;

impl ProductSum {
    pub fn new(terms: Vec<ProductTerm>) -> Result<Self> {
        let parties = terms.first().map(|t| t.factors.len()).ok_or_else(|| Error::InvalidInput("observable without terms".into()))?;
        if parties == 0 {
            return Err(Error::InvalidInput("product term without factors".into()));
        }
        for term in &terms {
            if term.factors.len() != parties {
                return Err(Error::DimensionMismatch(format!(
                    "terms act on {} and {} parties",
                    parties,
                    term.factors.len()
                )));
            }
            if !term.weight.is_finite() {
                return Err(Error::InvalidInput("non-finite weight".into()));
            }
            for f in &term.factors {
                if f.rows() != 2 || f.cols() != 2 {
                    return Err(Error::DimensionMismatch(format!("factor of size {}x{}, expected 2x2", f.rows(), f.cols())));
                }
                let dev = f.hermitian_deviation();
                if dev > HERMITIAN_TOL {
                    return Err(Error::NotHermitian(dev));
                }
            }
        }
        Ok(Self { parties, terms })
    }

    /// Single product term with unit weight.
    pub fn product(factors: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(vec![ProductTerm::new(1.0, factors)])
    }

    /// Parses Pauli strings such as `"XZ"` or `"IZZ"` with weights.
    pub fn from_paulis(terms: &[(f64, &str)]) -> Result<Self> {
        let mut out = Vec::new();
        for &(w, s) in terms {
            let factors = s
                .chars()
                .map(|c| match c.to_ascii_uppercase() {
                    'I' | '1' => Ok(pauli(0)),
                    'X' => Ok(pauli(1)),
                    'Y' => Ok(pauli(2)),
                    'Z' => Ok(pauli(3)),
                    other => Err(Error::InvalidInput(format!("unknown Pauli label {other:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(ProductTerm::new(w, factors));
        }
        Self::new(out)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn settings(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.parties
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        self.terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, t| &acc + &t.to_matrix())
    }

    /// Transposes every factor on `party` (0-based).
    pub fn transpose_party(&self, party: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.factors[party] = t.factors[party].transpose();
                t
            })
            .collect();
        Self { parties: self.parties, terms }
    }

    /// `(U_1⊗…⊗U_n)† O (U_1⊗…⊗U_n)` applied factorwise.
    pub fn rotate(&self, unitaries: &[ComplexMatrix]) -> Self {
        assert_eq!(unitaries.len(), self.parties);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let factors = t
                    .factors
                    .iter()
                    .zip(unitaries)
                    .map(|(f, u)| u.adjoint().matmul(f).matmul(u))
                    .collect();
                ProductTerm::new(t.weight, factors)
            })
            .collect();
        Self { parties: self.parties, terms }
    }
}

/// `O = Σ_j s_j A_j ⊗ B_j` with `tr(A_j A_k) = tr(B_j B_k) = δ_jk`, `s`
/// descending and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtObservable {
    pub s: Vec<f64>,
    pub a: Vec<ComplexMatrix>,
    pub b: Vec<ComplexMatrix>,
}

impl SchmidtObservable {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.to_product_sum().map(|p| p.to_matrix()).unwrap_or_else(|_| ComplexMatrix::zeros(4, 4))
    }

    pub fn to_product_sum(&self) -> Result<ProductSum> {
        ProductSum::new(
            (0..self.rank())
                .map(|j| ProductTerm::new(self.s[j], vec![self.a[j].clone(), self.b[j].clone()]))
                .collect(),
        )
    }

    /// True when `A_j = B_j` for every `j` (to `tol`).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.a.iter().zip(&self.b).all(|(a, b)| a.max_abs_diff(b) <= tol)
    }
}

fn basis_element(mu: usize) -> ComplexMatrix {
    pauli(mu).scale_real(std::f64::consts::FRAC_1_SQRT_2)
}

fn from_coords(c: &[f64]) -> ComplexMatrix {
    (0..4).fold(ComplexMatrix::zeros(2, 2), |acc, mu| &acc + &basis_element(mu).scale_real(c[mu]))
}

/// Coordinates `(tr(A)/√2, P̃(A))` of a Hermitian 2×2 matrix in the basis
/// `{1, σ_x, σ_y, σ_z}/√2`.
pub fn hermitian_coords(a: &ComplexMatrix) -> [f64; 4] {
    let mut c = [0.0; 4];
    for (mu, slot) in c.iter_mut().enumerate() {
        *slot = a.trace_product(&basis_element(mu)).re;
    }
    c
}

/// `P̃(A) = (tr(A σ_j/√2))_j`; discards the identity part.
pub fn traceless_projection(a: &ComplexMatrix) -> [f64; 3] {
    let c = hermitian_coords(a);
    [c[1], c[2], c[3]]
}

/// Operator Schmidt decomposition of a Hermitian 4×4 observable, from the
/// SVD of its realignment over the orthonormal Pauli basis. Coefficients
/// at or below `rank_tolerance` are dropped.
pub fn schmidt_decompose(o: &ComplexMatrix, rank_tolerance: f64) -> Result<SchmidtObservable> {
    if o.rows() != 4 || o.cols() != 4 {
        return Err(Error::DimensionMismatch(format!("bipartite qubit observable must be 4x4, got {}x{}", o.rows(), o.cols())));
    }
    let dev = o.hermitian_deviation();
    if dev > HERMITIAN_TOL * o.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let r = DMatrix::from_fn(4, 4, |mu, nu| {
        let basis = kron_all([&basis_element(mu), &basis_element(nu)]);
        o.trace_product(&basis).re
    });
    let svd = real_svd(&r);
    let mut out = SchmidtObservable { s: Vec::new(), a: Vec::new(), b: Vec::new() };
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= rank_tolerance {
            continue;
        }
        let mut ua: Vec<f64> = svd.u.column(k).iter().copied().collect();
        let mut vb: Vec<f64> = svd.v.column(k).iter().copied().collect();
        // gauge: largest-magnitude coordinate of the A factor positive
        let lead = ua.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            ua.iter_mut().for_each(|x| *x = -*x);
            vb.iter_mut().for_each(|x| *x = -*x);
        }
        out.s.push(s);
        out.a.push(from_coords(&ua));
        out.b.push(from_coords(&vb));
    }
    Ok(out)
}

/// `det(M_A M_Bᵀ)/8` with `M_A = (√s_j P̃(A_j))_j ∈ R^{3×r}`: the coefficient of
/// `det T` in the third moment.
pub fn det_prefactor(o: &SchmidtObservable) -> f64 {
    let mut m = Matrix3::<f64>::zeros();
    for j in 0..o.rank() {
        let pa = traceless_projection(&o.a[j]);
        let pb = traceless_projection(&o.b[j]);
        for x in 0..3 {
            for y in 0..3 {
                m[(x, y)] += o.s[j] * pa[x] * pb[y];
            }
        }
    }
    m.determinant() / 8.0
}

/// `Σ_j σ_j ⊗ σ_j`, whose third moment is exactly `det T`.
pub fn o_det() -> ProductSum {
    ProductSum::from_paulis(&[(1.0, "XX"), (1.0, "YY"), (1.0, "ZZ")]).expect("static observable")
}

/// `1⊗σ_x + σ_x⊗1 + σ_y⊗σ_z ± σ_z⊗σ_y`; the difference of their fourth
/// moments isolates `I14`.
pub fn hodge_pair() -> (ProductSum, ProductSum) {
    let plus = ProductSum::from_paulis(&[(1.0, "IX"), (1.0, "XI"), (1.0, "YZ"), (1.0, "ZY")]).expect("static");
    let minus = ProductSum::from_paulis(&[(1.0, "IX"), (1.0, "XI"), (1.0, "YZ"), (-1.0, "ZY")]).expect("static");
    (plus, minus)
}

pub fn random_hermitian(rng: &mut impl Rng) -> ComplexMatrix {
    let a: f64 = rng.sample(StandardNormal);
    let d: f64 = rng.sample(StandardNormal);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ComplexMatrix::from_vec(2, 2, vec![C64::new(a, 0.0), C64::new(re, im), C64::new(re, -im), C64::new(d, 0.0)])
        .expect("2x2")
}

/// Sum of `r` Gaussian product terms, re-decomposed; generically of rank `r`.
pub fn random_rank_r(rng: &mut impl Rng, r: usize) -> Result<SchmidtObservable> {
    let mut m = ComplexMatrix::zeros(4, 4);
    for _ in 0..r {
        m = &m + &kron_all([&random_hermitian(rng), &random_hermitian(rng)]);
    }
    let o = schmidt_decompose(&m, RANK_TOLERANCE)?;
    if o.rank() != r {
        return Err(Error::Singular(format!("sampled observable has rank {} instead of {r}", o.rank())));
    }
    Ok(o)
}

/// Random orthogonal 4×4 matrix (QR of a Gaussian matrix with sign fix).
fn random_orthogonal4(rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(4, 4, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..4 {
        if r[(k, k)] < 0.0 {
            let mut col = q.column_mut(k);
            col *= -1.0;
        }
    }
    q
}

/// Random orthonormal basis (`tr(A_j A_k) = δ_jk`) of 2×2 Hermitian matrices.
pub fn random_orthonormal_basis(rng: &mut impl Rng) -> Vec<ComplexMatrix> {
    let q = random_orthogonal4(rng);
    (0..4).map(|j| from_coords(&q.column(j).iter().copied().collect::<Vec<_>>())).collect()
}

/// `Σ_{j=1}^4 s_j A_j ⊗ A_j` with a random orthonormal Hermitian basis `A_j`
/// and random positive `s_j`.
pub fn random_symmetric_rank4(rng: &mut impl Rng) -> SchmidtObservable {
    let q = random_orthogonal4(rng);
    let mut s: Vec<f64> = (0..4).map(|_| rng.random_range(0.2..2.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let a: Vec<ComplexMatrix> = (0..4).map(|j| from_coords(&q.column(j).iter().copied().collect::<Vec<_>>())).collect();
    SchmidtObservable { s, b: a.clone(), a }
}

/// `(U⊗U)† (Σ_j s_j σ_j⊗σ_j) (U⊗U)` with the given `U`.
pub fn symmetric_pauli_family(s: [f64; 3], u: &ComplexMatrix) -> SchmidtObservable {
    let a: Vec<ComplexMatrix> = (1..=3).map(|j| u.adjoint().matmul(&basis_element(j)).matmul(u)).collect();
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    SchmidtObservable {
        s: idx.iter().map(|&i| 2.0 * s[i]).collect(),
        a: idx.iter().map(|&i| a[i].clone()).collect(),
        b: idx.iter().map(|&i| a[i].clone()).collect(),
    }
}
