//! Closed-form Gram-system solutions for qubit factors, used to cross-check
//! the numerical solver.

use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64};
use crate::symgroup::{group, trace_with_v, Permutation};

fn tr(m: &ComplexMatrix) -> C64 {
    m.trace()
}

fn tr2(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.trace_product(b)
}

fn tr3(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> C64 {
    a.matmul(b).trace_product(c)
}

fn tr4(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix) -> C64 {
    a.matmul(b).matmul(c).trace_product(d)
}

/// Reduced-gauge t = 3 coefficients `(x_(), x_(12), x_(13), x_(23), x_(123))`
/// for factors `A1, A2, A3`, from
/// `(t1t2t3, tr(A1A2)t3, tr(A1A3)t2, tr(A2A3)t1, tr(A1A2A3))`.
pub fn reduced_solution_t3(a: [&ComplexMatrix; 3]) -> [C64; 5] {
    const M: [[f64; 5]; 5] = [
        [2.0, 0.0, 0.0, 0.0, -2.0],
        [0.0, 1.0, -1.0, -1.0, 2.0],
        [0.0, -1.0, 1.0, -1.0, 2.0],
        [0.0, -1.0, -1.0, 1.0, 2.0],
        [-2.0, 2.0, 2.0, 2.0, -4.0],
    ];
    let (t1, t2, t3) = (tr(a[0]), tr(a[1]), tr(a[2]));
    let v = [t1 * t2 * t3, tr2(a[0], a[1]) * t3, tr2(a[0], a[2]) * t2, tr2(a[1], a[2]) * t1, tr3(a[0], a[1], a[2])];
    M.map(|row| row.iter().zip(&v).map(|(m, x)| x * *m).sum::<C64>() / 12.0)
}

/// `x_(12)` for three equal factors: `(2 tr(A³) − tr(A²) tr(A)) / 12`.
pub fn equal_factor_swap_coefficient(a: &ComplexMatrix) -> C64 {
    let a2 = a.matmul(a);
    (tr2(&a2, a) * 2.0 - tr(&a2) * tr(a)) / 12.0
}

/// Reduced-gauge `x_(123)` at t = 4 for factors drawn from an orthonormal set
/// (`tr(A_i A_j) = δ_ij` whenever the two factors are distinct elements).
pub fn reduced_x123_t4(a: [&ComplexMatrix; 4]) -> C64 {
    let t: Vec<C64> = a.iter().map(|m| tr(m)).collect();
    let delta = |i: usize, j: usize| tr2(a[i], a[j]);
    let comm = |x: &ComplexMatrix, y: &ComplexMatrix| &x.matmul(y) - &y.matmul(x);
    let six_x = t[0] * t[1] * t[2] * t[3] * -2.0
        + (t[2] * t[3] * delta(0, 1) + t[1] * t[3] * delta(0, 2) + t[0] * t[3] * delta(1, 2)) * 2.0
        - tr3(a[0], a[1], a[2]) * t[3] * 4.0
        + tr3(a[0], &comm(a[1], a[2]), a[3])
        + tr3(a[2], &comm(a[0], a[1]), a[3])
        + tr3(a[1], &comm(a[2], a[0]), a[3]);
    six_x / 6.0
}

/// Reduced-gauge `x_(1234) − x_(1432)` at t = 4 for orthonormal factors.
pub fn reduced_cycle_difference_t4(a: [&ComplexMatrix; 4]) -> C64 {
    let t: Vec<C64> = a.iter().map(|m| tr(m)).collect();
    let delta = |i: usize, j: usize| tr2(a[i], a[j]);
    let [a1, a2, a3, a4] = a;
    let twelve = t[0] * t[1] * t[2] * t[3] * 2.0
        - (t[2] * t[3] * delta(0, 1) + t[1] * t[3] * delta(0, 2) + t[0] * t[3] * delta(1, 2)) * 2.0
        + tr3(a1, a2, a3) * t[3] * 4.0
        - tr4(a1, a2, a3, a4) * 2.0
        - tr4(a1, a2, a4, a3)
        + tr4(a1, a3, a2, a4)
        + tr4(a1, a3, a4, a2)
        - tr4(a1, a4, a2, a3)
        + tr4(a1, a4, a3, a2) * 2.0;
    twelve / 12.0
}

/// Six expressions in an orthonormal triple `A, B, C` that vanish
/// identically; together they force `x_(123) = 0` at t = 4 for rank ≤ 3.
pub fn vanishing_expressions(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> [C64; 6] {
    let (ta, tb, tc) = (tr(a), tr(b), tr(c));
    let a2 = a.matmul(a);
    let a3 = tr2(&a2, a);
    let a2b = tr2(&a2, b);
    let abc = tr3(a, b, c);
    let a2_bc = tr2(&a2, &(&b.matmul(c) - &c.matmul(b)));
    [
        ta.powi(4) * -2.0 + ta * ta * 6.0 - a3 * ta * 4.0,
        ta.powi(3) * tb * -2.0 + ta * tb * 6.0 - a3 * tb * 4.0,
        ta.powi(3) * tb * -2.0 + ta * tb * 2.0 - a2b * ta * 4.0,
        ta * ta * tb * tb * -2.0 + tb * tb * 2.0 - a2b * tb * 4.0,
        ta * ta * tb * tc * -2.0 - abc * ta * 4.0 + a2_bc * 2.0,
        ta * ta * tb * tc * -2.0 + tb * tc * 2.0 - a2b * tc * 4.0,
    ]
}

/// `(−2tr(A)³ + 6tr(A) − 4tr(A³), −2tr(A)²tr(B) + 2tr(B) − 4tr(A²B))`, both
/// zero for orthonormal Hermitian `A, B`.
pub fn eigenvalue_identities(a: &ComplexMatrix, b: &ComplexMatrix) -> [C64; 2] {
    let ta = tr(a);
    let a2 = a.matmul(a);
    [
        ta.powi(3) * -2.0 + ta * 6.0 - tr2(&a2, a) * 4.0,
        ta * ta * tr(b) * -2.0 + tr(b) * 2.0 - tr2(&a2, b) * 4.0,
    ]
}

/// The six 4-cycles of S_4 in table order.
pub const FOUR_CYCLES: [&str; 6] = ["(1234)", "(1243)", "(1324)", "(1342)", "(1423)", "(1432)"];

/// Sign of `−4·3!·det T` contributed by each identity placement (rows: the
/// identity in position 1…4) and 4-cycle (columns, [`FOUR_CYCLES`] order).
pub const PLACEMENT_SIGNS: [[i8; 6]; 4] = [
    [1, -1, -1, 1, 1, -1],
    [1, -1, 1, 1, -1, -1],
    [1, 1, 1, -1, -1, -1],
    [1, 1, -1, -1, 1, -1],
];

/// Brute-force placement signs: `tr(X V_π)/(2i)` with the identity at
/// position `p` and `σ_x, σ_y, σ_z` in the remaining positions in order.
pub fn placement_signs() -> Result<[[i8; 6]; 4]> {
    let g = group(4)?;
    let id = crate::linalg::pauli(0);
    let paulis = crate::linalg::paulis();
    let mut out = [[0i8; 6]; 4];
    for (p, row) in out.iter_mut().enumerate() {
        let mut factors: Vec<&ComplexMatrix> = Vec::with_capacity(4);
        let mut next = 0;
        for k in 0..4 {
            if k == p {
                factors.push(&id);
            } else {
                factors.push(&paulis[next]);
                next += 1;
            }
        }
        for (c, cycle) in FOUR_CYCLES.iter().enumerate() {
            let pi = g.element(g.index_of(&Permutation::parse(4, cycle)?)).clone();
            let v = trace_with_v(&factors, &pi)? / C64::new(0.0, 2.0);
            row[c] = if v.re > 0.5 { 1 } else if v.re < -0.5 { -1 } else { 0 };
        }
    }
    Ok(out)
}

/// `Σ_rows sign(π_A)·sign(π_B)` for every pair of 4-cycles.
pub fn placement_products(signs: &[[i8; 6]; 4]) -> [[i32; 6]; 6] {
    let mut out = [[0i32; 6]; 6];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = signs.iter().map(|r| i32::from(r[a]) * i32::from(r[b])).sum();
        }
    }
    out
}
