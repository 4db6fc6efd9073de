//! Local-unitary invariants evaluated directly from Bloch data.

use serde::{Deserialize, Serialize};

use crate::linalg::det3;
use crate::states::{Mat3, ThreeQubitState, TwoQubitState, Vec3};

/// Determinants with magnitude below this report sign 0.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// Makhlin's generators: twelve continuous invariants and six signs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct MakhlinRecord {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i6: f64,
    pub i7: f64,
    pub i8: f64,
    pub i9: f64,
    pub i10: i8,
    pub i11: i8,
    pub i12: f64,
    pub i13: f64,
    pub i14: f64,
    pub i15: i8,
    pub i16: i8,
    pub i17: i8,
    pub i18: i8,
}

impl MakhlinRecord {
    /// Continuous invariant by name (`"I1"`…`"I14"`, excluding the signs).
    pub fn continuous(&self, name: &str) -> Option<f64> {
        Some(match name {
            "I1" => self.i1,
            "I2" => self.i2,
            "I3" => self.i3,
            "I4" => self.i4,
            "I5" => self.i5,
            "I6" => self.i6,
            "I7" => self.i7,
            "I8" => self.i8,
            "I9" => self.i9,
            "I12" => self.i12,
            "I13" => self.i13,
            "I14" => self.i14,
            _ => return None,
        })
    }

    pub const CONTINUOUS: [&'static str; 12] = ["I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9", "I12", "I13", "I14"];
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = dot(&m[j], v);
    }
    out
}

pub(crate) fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            out[j][k] = m[k][j];
        }
    }
    out
}

pub(crate) fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            out[j][k] = (0..3).map(|l| a[j][l] * b[l][k]).sum();
        }
    }
    out
}

pub(crate) fn trace3(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

/// Adjugate by cofactors, so singular `T` needs no special handling.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let mut adj = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            let (r0, r1) = ((k + 1) % 3, (k + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            adj[j][k] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        }
    }
    adj
}

fn sign_of_columns(a: &Vec3, b: &Vec3, c: &Vec3) -> i8 {
    let d = det3(&[[a[0], b[0], c[0]], [a[1], b[1], c[1]], [a[2], b[2], c[2]]]);
    if d.abs() < SIGN_THRESHOLD {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

pub fn makhlin(s: &TwoQubitState) -> MakhlinRecord {
    let t = &s.t;
    let tt = transpose(t);
    let ttt = mat_mul(&tt, t); // TᵀT
    let ttr = mat_mul(t, &tt); // TTᵀ
    let (a, b) = (&s.alpha, &s.beta);
    let t_a = mat_vec(&tt, a); // Tᵀα
    let ttr_a = mat_vec(&ttr, a);
    let ttr2_a = mat_vec(&ttr, &ttr_a);
    let t_b = mat_vec(t, b);
    let ttt_b = mat_vec(&ttt, b);
    let ttt2_b = mat_vec(&ttt, &ttt_b);
    MakhlinRecord {
        i1: det3(t),
        i2: trace3(&ttt),
        i3: trace3(&mat_mul(&ttt, &ttt)),
        i4: dot(a, a),
        i5: dot(&t_a, &t_a),
        i6: dot(&ttr_a, &ttr_a),
        i7: dot(b, b),
        i8: dot(&t_b, &t_b),
        i9: dot(&ttt_b, &ttt_b),
        i10: sign_of_columns(a, &ttr_a, &ttr2_a),
        i11: sign_of_columns(b, &ttt_b, &ttt2_b),
        i12: dot(a, &t_b),
        i13: dot(a, &mat_vec(&ttr, &t_b)),
        // rows of T belong to party A, so the invariant pairing uses adj(T)ᵀ
        i14: 2.0 * dot(a, &mat_vec(&transpose(&adjugate(t)), b)),
        i15: sign_of_columns(a, &ttr_a, &t_b),
        i16: sign_of_columns(&t_a, b, &ttt_b),
        i17: sign_of_columns(&t_a, &mat_vec(&tt, &ttr_a), b),
        i18: sign_of_columns(a, &t_b, &mat_vec(&ttr, &t_b)),
    }
}

/// `(*v)` with `(*v) w = v × w`.
fn hodge_star(v: &Vec3) -> Mat3 {
    [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
}

/// `tr((*α) T (*β)ᵀ Tᵀ)`; an independent route to `I14`.
pub fn hodge_via_star(s: &TwoQubitState) -> f64 {
    let m = mat_mul(&mat_mul(&mat_mul(&hodge_star(&s.alpha), &s.t), &transpose(&hodge_star(&s.beta))), &transpose(&s.t));
    trace3(&m)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KempeRecord {
    pub kempe: f64,
    /// `tr(T^AB T^BC T^CA)`
    pub tr_ttt: f64,
    /// `||W||²₂`
    pub w_norm_sq: f64,
    /// `Σ W_jkl T^AB_jk γ_l`
    pub w_tab_gamma: f64,
    /// `Σ W_jkl T^CA_lj β_k`
    pub w_tca_beta: f64,
    /// `Σ W_jkl α_j T^BC_kl`
    pub w_alpha_tbc: f64,
}

impl KempeRecord {
    /// `(||W||², ΣW T^AB γ, ΣW T^CA β, ΣW α T^BC, tr TTT) / 8`, the values of
    /// the five permutation classes that survive the third-moment twirl.
    pub fn class_values(&self) -> [f64; 5] {
        [self.w_norm_sq, self.w_tab_gamma, self.w_tca_beta, self.w_alpha_tbc, self.tr_ttt].map(|x| x / 8.0)
    }
}

pub fn kempe(s: &ThreeQubitState) -> KempeRecord {
    let tr_ttt = trace3(&mat_mul(&mat_mul(&s.tab, &s.tbc), &s.tca));
    let mut rec = KempeRecord { tr_ttt, ..Default::default() };
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let w = s.w[j][k][l];
                rec.w_norm_sq += w * w;
                rec.w_tab_gamma += w * s.tab[j][k] * s.gamma[l];
                rec.w_tca_beta += w * s.tca[l][j] * s.beta[k];
                rec.w_alpha_tbc += w * s.alpha[j] * s.tbc[k][l];
            }
        }
    }
    let (a, b, g) = (&s.alpha, &s.beta, &s.gamma);
    rec.kempe = (1.0
        + dot(a, a)
        + dot(b, b)
        + dot(g, g)
        + dot(a, &mat_vec(&s.tab, b))
        + dot(b, &mat_vec(&s.tbc, g))
        + dot(g, &mat_vec(&s.tca, a))
        + tr_ttt)
        / 8.0;
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar_mc::haar_su2;
    use crate::linalg::kron_all;
    use crate::states::{bell_phi_plus, ghz, three_qubit_bloch, two_qubit_bloch, DensityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn continuous(r: &MakhlinRecord) -> Vec<f64> {
        MakhlinRecord::CONTINUOUS.iter().map(|n| r.continuous(n).unwrap()).collect()
    }

    #[test]
    fn bell_values() {
        let s = two_qubit_bloch(bell_phi_plus().matrix()).unwrap();
        let r = makhlin(&s);
        assert!((r.i1 + 1.0).abs() < 1e-12);
        assert!((r.i2 - 3.0).abs() < 1e-12 && (r.i3 - 3.0).abs() < 1e-12);
        for v in [r.i4, r.i5, r.i6, r.i7, r.i8, r.i9, r.i12, r.i13, r.i14] {
            assert!(v.abs() < 1e-12);
        }
        assert_eq!(r.i10, 0);
    }

    #[test]
    fn maximally_mixed_is_zero() {
        let r = makhlin(&TwoQubitState::default());
        assert!(continuous(&r).iter().all(|v| *v == 0.0));
        let k = kempe(&ThreeQubitState::default());
        assert_eq!(k.kempe, 0.125);
    }

    #[test]
    fn hodge_formulas_agree() {
        let mut s = TwoQubitState { alpha: [1.0, 0.0, 0.0], beta: [1.0, 0.0, 0.0], ..Default::default() };
        s.t = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!((makhlin(&s).i14 - 2.0).abs() < 1e-15);
        assert!((hodge_via_star(&s) - 2.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let s = TwoQubitState::random_record(&mut rng);
            assert!((makhlin(&s).i14 - hodge_via_star(&s)).abs() < 1e-10);
        }
    }

    #[test]
    fn adjugate_matches_inverse() {
        let m = [[2.0, 1.0, 0.5], [0.3, -1.0, 2.0], [1.0, 0.0, 1.5]];
        let adj = adjugate(&m);
        let p = mat_mul(&m, &adj);
        let d = det3(&m);
        for j in 0..3 {
            for k in 0..3 {
                assert!((p[j][k] - if j == k { d } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lu_invariance_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let s = TwoQubitState::random_record(&mut rng);
            let r = makhlin(&s);
            assert!(r.i2 >= 0.0 && r.i3 >= 0.0 && r.i4 >= 0.0 && r.i7 >= 0.0);
            assert!(r.i3 <= r.i2 * r.i2 + 1e-12);
            let rho = s.to_matrix();
            for _ in 0..10 {
                let u = kron_all([&haar_su2(&mut rng), &haar_su2(&mut rng)]);
                let r2 = makhlin(&two_qubit_bloch(&rho.conjugate_by(&u)).unwrap());
                for (a, b) in continuous(&r).iter().zip(continuous(&r2)) {
                    assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
                }
                for (a, b) in [(r.i10, r2.i10), (r.i11, r2.i11), (r.i15, r2.i15), (r.i16, r2.i16), (r.i17, r2.i17), (r.i18, r2.i18)] {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn partial_transpose_flips_only_odd_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let s = TwoQubitState::random_record(&mut rng);
            let (r, p) = (makhlin(&s), makhlin(&s.partial_transpose(2).unwrap()));
            for name in MakhlinRecord::CONTINUOUS {
                let (a, b) = (r.continuous(name).unwrap(), p.continuous(name).unwrap());
                let expected = if name == "I1" || name == "I14" { -a } else { a };
                assert!((b - expected).abs() < 1e-10, "{name}");
            }
        }
    }

    #[test]
    fn ghz_kempe() {
        let s = three_qubit_bloch(ghz().matrix()).unwrap();
        let k = kempe(&s);
        assert!((k.kempe - 0.25).abs() < 1e-12);
        assert!((k.tr_ttt - 1.0).abs() < 1e-12);
        assert!((k.w_norm_sq - 4.0).abs() < 1e-12);
    }

    #[test]
    fn kempe_lu_and_pt_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = ThreeQubitState::random_record(&mut rng);
            let k = kempe(&s);
            let rho = DensityMatrix::with_tolerance(s.to_matrix(), 1e-9).unwrap();
            let u = kron_all([&haar_su2(&mut rng), &haar_su2(&mut rng), &haar_su2(&mut rng)]);
            let k2 = kempe(&three_qubit_bloch(&rho.matrix().conjugate_by(&u)).unwrap());
            assert!((k.kempe - k2.kempe).abs() < 1e-9);
            assert!((k.tr_ttt - k2.tr_ttt).abs() < 1e-9);
            assert!((k.w_norm_sq - k2.w_norm_sq).abs() < 1e-9);
            for party in 1..=3 {
                let kp = kempe(&s.partial_transpose(party).unwrap());
                let (a, b) = (k.class_values(), kp.class_values());
                assert!((k.kempe - kp.kempe).abs() < 1e-12);
                for i in 0..5 {
                    assert!((a[i] - b[i]).abs() < 1e-12);
                }
            }
        }
    }
}
