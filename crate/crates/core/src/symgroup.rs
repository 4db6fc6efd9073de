//! Symmetric groups `S_t` (t ≤ 6), permutation operators `V_π`, their Gram
//! matrices and the linear relations among them.
//!
//! `V_π |j_1 … j_t⟩ = |j_{π(1)} … j_{π(t)}⟩`. Composition is
//! `(π∘π')(i) = π(π'(i))`; with this convention `V_π V_π' = V_{π'∘π}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE};

pub const MAX_T: usize = 6;
/// Largest Hilbert-space dimension `d^t` for which `V_π` is materialized.
pub const MAX_OPERATOR_DIM: usize = 4096;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(t: usize) -> Self {
        Self { images: (0..t).collect() }
    }

    /// Zero-based one-line notation.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let t = images.len();
        let mut seen = vec![false; t];
        for &i in &images {
            if i >= t || seen[i] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation of `{1..t}` from one-based cycles.
    pub fn from_cycles(t: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..t).collect();
        let mut used = vec![false; t];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a == 0 || a > t || used[a - 1] {
                    return Err(Error::InvalidInput(format!("bad cycle {cycle:?} for t = {t}")));
                }
                used[a - 1] = true;
                let b = cycle[(k + 1) % cycle.len()];
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    /// Parses cycle notation such as `"()"`, `"(12)"` or `"(13)(24)"`.
    pub fn parse(t: usize, s: &str) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut current: Option<Vec<usize>> = None;
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '(' if current.is_none() => current = Some(Vec::new()),
                ')' => cycles.push(current.take().ok_or_else(|| Error::InvalidInput(s.into()))?),
                c if c.is_ascii_digit() && current.is_some() => {
                    current.as_mut().unwrap().push(c.to_digit(10).unwrap() as usize)
                }
                _ => return Err(Error::InvalidInput(format!("cannot parse permutation {s:?}"))),
            }
        }
        if current.is_some() {
            return Err(Error::InvalidInput(format!("unclosed cycle in {s:?}")));
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Self::from_cycles(t, &refs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree());
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p] = i;
        }
        Self { images }
    }

    /// All cycles including fixed points, each starting at its smallest
    /// element, ordered by that element. Zero-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let t = self.degree();
        let mut seen = vec![false; t];
        let mut out = Vec::new();
        for start in 0..t {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.images[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.images[next];
            }
            out.push(cycle);
        }
        out
    }

    pub fn nontrivial_cycles(&self) -> Vec<Vec<usize>> {
        self.cycles().into_iter().filter(|c| c.len() > 1).collect()
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycle lengths in descending order, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.images[i] == i).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    fn sort_key(&self) -> (usize, Vec<usize>, Vec<Vec<usize>>) {
        (self.degree() - self.cycle_count(), self.cycle_type(), self.nontrivial_cycles())
    }

    fn lehmer_rank(&self) -> usize {
        let t = self.degree();
        let mut rank = 0;
        for i in 0..t {
            let smaller = (i + 1..t).filter(|&j| self.images[j] < self.images[i]).count();
            rank = rank * (t - i) + smaller;
        }
        rank
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.nontrivial_cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for a in c {
                write!(f, "{}", a + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `S_t` in canonical order with precomputed multiplication data.
///
/// The order sorts by `t − #cycles`, then by cycle type (ascending
/// lexicographic on the descending partition), then lexicographically on
/// the cycle lists. For `t = 3` this is `(), (12), (13), (23), (123), (132)`.
pub struct Group {
    t: usize,
    elements: Vec<Permutation>,
    by_lehmer: Vec<usize>,
    compose: Vec<usize>,
    inverse: Vec<usize>,
    cycle_counts: Vec<usize>,
}

impl Group {
    fn build(t: usize) -> Self {
        let mut elements = Vec::new();
        let mut images: Vec<usize> = (0..t).collect();
        heap_permutations(&mut images, t, &mut elements);
        elements.sort_by_cached_key(Permutation::sort_key);
        let n = elements.len();
        let mut by_lehmer = vec![0; n];
        for (i, p) in elements.iter().enumerate() {
            by_lehmer[p.lehmer_rank()] = i;
        }
        let index = |p: &Permutation| by_lehmer[p.lehmer_rank()];
        let mut compose = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                compose[i * n + j] = index(&elements[i].compose(&elements[j]));
            }
        }
        let inverse = elements.iter().map(|p| index(&p.inverse())).collect();
        let cycle_counts = elements.iter().map(Permutation::cycle_count).collect();
        Self { t, elements, by_lehmer, compose, inverse, cycle_counts }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> usize {
        assert_eq!(p.degree(), self.t);
        self.by_lehmer[p.lehmer_rank()]
    }

    /// Index of `π_i ∘ π_j`.
    pub fn compose_index(&self, i: usize, j: usize) -> usize {
        self.compose[i * self.order() + j]
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn cycle_count(&self, i: usize) -> usize {
        self.cycle_counts[i]
    }

    /// Index of `π` given in cycle notation; panics on malformed input.
    pub fn index_of_str(&self, s: &str) -> usize {
        self.index_of(&Permutation::parse(self.t, s).expect("valid permutation literal"))
    }
}

fn heap_permutations(a: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
    if k <= 1 {
        out.push(Permutation { images: a.clone() });
        return;
    }
    heap_permutations(a, k - 1, out);
    for i in 0..k - 1 {
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
        heap_permutations(a, k - 1, out);
    }
}

/// Cached group table for `1 ≤ t ≤ 6`.
pub fn group(t: usize) -> Result<&'static Group> {
    static GROUPS: [OnceLock<Group>; MAX_T] = [const { OnceLock::new() }; MAX_T];
    if t == 0 || t > MAX_T {
        return Err(Error::UnsupportedMoment { t, reason: format!("symmetric groups are tabulated for 1 ≤ t ≤ {MAX_T}") });
    }
    Ok(GROUPS[t - 1].get_or_init(|| Group::build(t)))
}

/// `S_t` in canonical order.
pub fn enumerate_group(t: usize) -> Result<Vec<Permutation>> {
    Ok(group(t)?.elements().to_vec())
}

/// `tr(A_1 ⊗ … ⊗ A_t · V_π)`, evaluated as a product over the cycles of `π`
/// of traces of the matrices along each cycle.
pub fn trace_with_v(matrices: &[&ComplexMatrix], pi: &Permutation) -> Result<C64> {
    if matrices.len() != pi.degree() {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for a permutation of degree {}",
            matrices.len(),
            pi.degree()
        )));
    }
    let d = matrices.first().map_or(0, |m| m.rows());
    if matrices.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::DimensionMismatch("trace_with_v needs equal square factors".into()));
    }
    let mut total = ONE;
    for cycle in pi.cycles() {
        if cycle.len() == 1 {
            total *= matrices[cycle[0]].trace();
            continue;
        }
        let mut prod = matrices[cycle[0]].clone();
        for &k in &cycle[1..cycle.len() - 1] {
            prod = prod.matmul(matrices[k]);
        }
        total *= prod.trace_product(matrices[*cycle.last().unwrap()]);
    }
    Ok(total)
}

/// `V_π` stored as the image of each computational basis state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationOperator {
    dim: usize,
    /// `V_π |c⟩ = |image[c]⟩`.
    image: Vec<usize>,
}

impl PermutationOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image_of(&self, basis_index: usize) -> usize {
        self.image[basis_index]
    }

    pub fn trace(&self) -> usize {
        self.image.iter().enumerate().filter(|(c, &r)| *c == r).count()
    }

    /// Operator product `self · other`.
    pub fn then_after(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, image: other.image.iter().map(|&c| self.image[c]).collect() }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (c, &r) in self.image.iter().enumerate() {
            m[(r, c)] = ONE;
        }
        m
    }

    /// `tr(M · V)` for a dense `M`.
    pub fn trace_against(&self, m: &ComplexMatrix) -> C64 {
        assert_eq!(m.rows(), self.dim);
        // tr(M V) = Σ_c ⟨c|M V|c⟩ = Σ_c M[c, image[c]]
        self.image.iter().enumerate().map(|(c, &r)| m[(c, r)]).sum()
    }
}

/// Materializes `V_π` on `(C^d)^{⊗t}`.
pub fn v_matrix(pi: &Permutation, d: usize) -> Result<PermutationOperator> {
    let t = pi.degree();
    let dim = d.checked_pow(t as u32).filter(|&n| n <= MAX_OPERATOR_DIM).ok_or_else(|| {
        Error::InvalidInput(format!("d^t = {d}^{t} exceeds the operator size cap {MAX_OPERATOR_DIM}"))
    })?;
    let mut image = vec![0; dim];
    let mut digits = vec![0usize; t];
    for (c, slot) in image.iter_mut().enumerate() {
        let mut rem = c;
        for k in (0..t).rev() {
            digits[k] = rem % d;
            rem /= d;
        }
        // output digit k is input digit π(k)
        let mut r = 0;
        for k in 0..t {
            r = r * d + digits[pi.apply(k)];
        }
        *slot = r;
    }
    Ok(PermutationOperator { dim, image })
}

/// `M_d^{(t)}` with entries `tr(V_{π∘π'}) = d^{#cycles(π∘π')}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub t: usize,
    pub d: usize,
    pub entries: Vec<Vec<u64>>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        let n = self.size();
        ComplexMatrix::from_fn(n, n, |i, j| C64::new(self.entries[i][j] as f64, 0.0))
    }

    fn to_real(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j] as f64)
    }
}

pub fn gram_matrix(t: usize, d: usize) -> Result<GramMatrix> {
    let g = group(t)?;
    let n = g.order();
    let d64 = d as u64;
    let entries = (0..n)
        .map(|i| (0..n).map(|j| d64.pow(g.cycle_count(g.compose_index(i, j)) as u32)).collect())
        .collect();
    Ok(GramMatrix { t, d, entries })
}

/// Orthonormal basis of the null space of a Gram matrix (eigenvalues below
/// `1e-9 · λ_max`).
pub fn kernel_basis(g: &GramMatrix) -> Vec<Vec<f64>> {
    let eig = g.to_real().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..g.size())
        .filter(|&k| eig.eigenvalues[k].abs() <= 1e-9 * scale)
        .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect()
}

/// Moore–Penrose pseudo-inverse of `M_d^{(t)}`, cached per `(t, d)`.
pub fn gram_pseudo_inverse(t: usize, d: usize) -> Result<&'static ComplexMatrix> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), &'static ComplexMatrix>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&(t, d)) {
        return Ok(m);
    }
    let gram = gram_matrix(t, d)?;
    let eig = gram.to_real().symmetric_eigen();
    let n = gram.size();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut pinv = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        if lambda.abs() <= 1e-9 * scale {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        pinv += (v * v.transpose()) / lambda;
    }
    let pinv = ComplexMatrix::from_fn(n, n, |i, j| C64::new(pinv[(i, j)], 0.0));
    let leaked: &'static ComplexMatrix = Box::leak(Box::new(pinv));
    cache.lock().unwrap().insert((t, d), leaked);
    Ok(leaked)
}

/// Linear relations `Σ_π k_π V_π = 0` among qubit permutation operators,
/// written out explicitly: one for `t = 3` and ten for `t = 4`. Returned as
/// coefficient vectors in canonical group order.
pub fn listed_relations(t: usize) -> Result<Vec<Vec<f64>>> {
    let rows: &[&[(f64, &str)]] = match t {
        3 => &[&[(1.0, "()"), (-1.0, "(12)"), (-1.0, "(13)"), (-1.0, "(23)"), (1.0, "(123)"), (1.0, "(132)")]],
        4 => &[
            &[
                (3.0, "()"), (-1.0, "(12)"), (-2.0, "(13)"), (-1.0, "(14)"), (-1.0, "(23)"), (-2.0, "(24)"),
                (-1.0, "(34)"), (-1.0, "(12)(34)"), (1.0, "(13)(24)"), (-1.0, "(14)(23)"), (1.0, "(123)"),
                (1.0, "(124)"), (1.0, "(134)"), (1.0, "(234)"), (2.0, "(1432)"),
            ],
            &[
                (1.0, "()"), (-1.0, "(12)"), (-1.0, "(14)"), (1.0, "(23)"), (-1.0, "(34)"), (1.0, "(12)(34)"),
                (-1.0, "(13)(24)"), (-1.0, "(14)(23)"), (-1.0, "(123)"), (1.0, "(124)"), (1.0, "(134)"),
                (-1.0, "(234)"), (2.0, "(1423)"),
            ],
            &[
                (1.0, "()"), (-1.0, "(12)"), (-1.0, "(14)"), (-1.0, "(23)"), (1.0, "(34)"), (-1.0, "(12)(34)"),
                (-1.0, "(13)(24)"), (1.0, "(14)(23)"), (1.0, "(123)"), (1.0, "(124)"), (-1.0, "(134)"),
                (-1.0, "(234)"), (2.0, "(1342)"),
            ],
            &[
                (1.0, "()"), (-1.0, "(12)"), (1.0, "(14)"), (-1.0, "(23)"), (-1.0, "(34)"), (1.0, "(12)(34)"),
                (-1.0, "(13)(24)"), (-1.0, "(14)(23)"), (1.0, "(123)"), (-1.0, "(124)"), (-1.0, "(134)"),
                (1.0, "(234)"), (2.0, "(1324)"),
            ],
            &[
                (1.0, "()"), (1.0, "(12)"), (-1.0, "(14)"), (-1.0, "(23)"), (-1.0, "(34)"), (-1.0, "(12)(34)"),
                (-1.0, "(13)(24)"), (1.0, "(14)(23)"), (-1.0, "(123)"), (-1.0, "(124)"), (1.0, "(134)"),
                (1.0, "(234)"), (2.0, "(1243)"),
            ],
            &[
                (-1.0, "()"), (1.0, "(12)"), (1.0, "(14)"), (1.0, "(23)"), (1.0, "(34)"), (-1.0, "(12)(34)"),
                (1.0, "(13)(24)"), (-1.0, "(14)(23)"), (-1.0, "(123)"), (-1.0, "(124)"), (-1.0, "(134)"),
                (-1.0, "(234)"), (2.0, "(1234)"),
            ],
            &[(1.0, "()"), (-1.0, "(23)"), (-1.0, "(24)"), (-1.0, "(34)"), (1.0, "(234)"), (1.0, "(243)")],
            &[(1.0, "()"), (-1.0, "(13)"), (-1.0, "(14)"), (-1.0, "(34)"), (1.0, "(134)"), (1.0, "(143)")],
            &[(1.0, "()"), (-1.0, "(12)"), (-1.0, "(14)"), (-1.0, "(24)"), (1.0, "(124)"), (1.0, "(142)")],
            &[(1.0, "()"), (-1.0, "(12)"), (-1.0, "(13)"), (-1.0, "(23)"), (1.0, "(123)"), (1.0, "(132)")],
        ],
        _ => return Err(Error::UnsupportedMoment { t, reason: "relations are listed for t = 3, 4".into() }),
    };
    let g = group(t)?;
    Ok(rows
        .iter()
        .map(|row| {
            let mut v = vec![0.0; g.order()];
            for &(c, p) in row.iter() {
                v[g.index_of_str(p)] += c;
            }
            v
        })
        .collect())
}

/// Permutations whose coefficients survive gauge fixing at `d = 2`: the
/// complement of the ones a listed relation can eliminate.
pub fn reduced_support(t: usize) -> Result<Vec<usize>> {
    let g = group(t)?;
    let eliminated: &[&str] = match t {
        1 | 2 => &[],
        3 => &["(132)"],
        4 => &["(132)", "(124)", "(142)", "(134)", "(143)", "(234)", "(243)", "(12)(34)", "(13)(24)", "(14)(23)"],
        _ => return Err(Error::UnsupportedMoment { t, reason: "gauge fixing is defined for t ≤ 4".into() }),
    };
    let drop: Vec<usize> = eliminated.iter().map(|s| g.index_of_str(s)).collect();
    Ok((0..g.order()).filter(|i| !drop.contains(i)).collect())
}

/// Orbits of `S_t^n` (tuples of permutations, one per party) under
/// simultaneous conjugation `π_p ↦ σ π_p σ⁻¹`. `tr(ρ^{⊗t} V_{π_1}⊗…⊗V_{π_n})`
/// is constant on each orbit.
pub struct TupleOrbits {
    pub t: usize,
    pub parties: usize,
    /// Orbit id of each tuple; the tuple index is `Σ_p idx_p · (t!)^{n-1-p}`.
    pub orbit_of: Vec<u32>,
    /// One representative tuple (group indices) per orbit.
    pub representatives: Vec<Vec<usize>>,
}

impl TupleOrbits {
    pub fn orbit_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn tuple_index(&self, idx: &[usize]) -> usize {
        let n = group(self.t).expect("cached").order();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }
}

fn build_orbits(t: usize, parties: usize) -> Result<TupleOrbits> {
    let g = group(t)?;
    let n = g.order();
    let total = n.pow(parties as u32);
    // conjugation by the adjacent transpositions (k k+1) generates all of S_t
    let conj: Vec<Vec<usize>> = (0..t.saturating_sub(1))
        .map(|k| {
            let mut im: Vec<usize> = (0..t).collect();
            im.swap(k, k + 1);
            let s = Permutation { images: im };
            g.elements().iter().map(|p| g.index_of(&s.compose(p).compose(&s))).collect()
        })
        .collect();
    let mut parent: Vec<u32> = (0..total as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut digits = vec![0usize; parties];
    for idx in 0..total {
        let mut rem = idx;
        for p in (0..parties).rev() {
            digits[p] = rem % n;
            rem /= n;
        }
        for table in &conj {
            let image = digits.iter().fold(0, |acc, &i| acc * n + table[i]);
            let (a, b) = (find(&mut parent, idx as u32), find(&mut parent, image as u32));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut orbit_of = vec![0u32; total];
    let mut root_to_orbit: HashMap<u32, u32> = HashMap::new();
    let mut representatives = Vec::new();
    for idx in 0..total {
        let root = find(&mut parent, idx as u32);
        let next = root_to_orbit.len() as u32;
        let id = *root_to_orbit.entry(root).or_insert_with(|| {
            let mut rem = idx;
            let mut rep = vec![0; parties];
            for p in (0..parties).rev() {
                rep[p] = rem % n;
                rem /= n;
            }
            representatives.push(rep);
            next
        });
        orbit_of[idx] = id;
    }
    Ok(TupleOrbits { t, parties, orbit_of, representatives })
}

/// Cached conjugation orbits. Supported for two parties up to `t = 6` and
/// three parties up to `t = 4`.
pub fn tuple_orbits(t: usize, parties: usize) -> Result<&'static TupleOrbits> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), &'static TupleOrbits>>> = OnceLock::new();
    let limit = match parties {
        1 | 2 => MAX_T,
        3 => 4,
        _ => 0,
    };
    if t == 0 || t > limit {
        return Err(Error::UnsupportedMoment { t, reason: format!("{parties}-party permutation tuples are tabulated up to t = {limit}") });
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(o) = cache.lock().unwrap().get(&(t, parties)) {
        return Ok(o);
    }
    let built: &'static TupleOrbits = Box::leak(Box::new(build_orbits(t, parties)?));
    Ok(*cache.lock().unwrap().entry((t, parties)).or_insert(built))
}
