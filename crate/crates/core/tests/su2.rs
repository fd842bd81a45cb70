use proptest::prelude::*;
use vaes_core::linops::{eig, CMatrix};
use vaes_core::su2::*;
use vaes_core::verify::su2_relations_error;
use vaes_core::{c64, C64};

fn cplx() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c64(a, b))
}

fn rep() -> impl Strategy<Value = Su2Rep> {
    (0u32..=6).prop_map(Su2Rep::new)
}

/// Canonical-family draw: |β₊| = |β₋|, β₃ phase (θ₊+θ₋)/2 mod π.
fn canonical() -> impl Strategy<Value = BetaParams> {
    (0.05f64..1.0, -3.0f64..3.0, -3.0f64..3.0, -1.0f64..1.0).prop_map(|(r, tp, tm, r3)| {
        BetaParams::new(
            c64(0.0, 0.0),
            C64::from_polar(r, tp),
            C64::from_polar(r, tm),
            C64::from_polar(r3, 0.5 * (tp + tm)),
        )
    })
}

#[test]
fn generator_relations_up_to_j3() {
    for two_j in 0..=6 {
        let g = generators(Su2Rep::new(two_j));
        assert!(su2_relations_error(&g.jp, &g.jm, &g.j3) < 1e-12);
        let j = two_j as f64 / 2.0;
        let cas = g.casimir();
        assert!(cas.max_abs_diff(&CMatrix::identity(two_j as usize + 1).scale(c64(j * (j + 1.0), 0.0))) < 1e-12);
    }
}

#[test]
fn generator_examples() {
    let g = generators(Su2Rep::new(1));
    assert!(g.jp.max_abs_diff(&CMatrix::from_rows(&[vec![c64(0.0, 0.0); 2], vec![c64(1.0, 0.0), c64(0.0, 0.0)]])) == 0.0);
    let g1 = generators(Su2Rep::new(2));
    assert_eq!(g1.j3.diagonal(), vec![c64(-1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
    let g32 = generators(Su2Rep::new(3));
    // ⟨3/2, −1/2|J₊|3/2, −3/2⟩
    assert!((g32.jp[(1, 0)] - c64(3f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn classify_examples() {
    let z = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    assert_eq!(classify(&BetaParams::new(z, z, z, one), 1e-12), CaseTag::BNonzeroNormal);
    assert_eq!(classify(&BetaParams::new(z, one, z, z), 1e-12), CaseTag::BZeroLowerTriangular);
    assert_eq!(classify(&BetaParams::new(z, z, one, z), 1e-12), CaseTag::BZeroUpperTriangular);
    let theta = BetaParams::new(z, one, one, c64(0.0, 2.0));
    assert_eq!(classify(&theta, 1e-12), CaseTag::BZeroFull);
    assert!((theta.theta_param() - c64(0.0, 1.0)).norm() < 1e-15);
    assert_eq!(classify(&BetaParams::new(one, z, z, z), 1e-12), CaseTag::AllZero);
}

#[test]
fn beta_operator_and_m_matrix_examples() {
    let p = BetaParams::new(c64(0.3, 0.1), c64(0.2, -0.4), c64(0.5, 0.3), c64(-0.7, 0.2));
    let b = beta_operator(Su2Rep::new(1), &p);
    let want = CMatrix::from_rows(&[
        vec![-p.beta_3 / 2.0, p.beta_plus],
        vec![p.beta_minus, p.beta_3 / 2.0],
    ]);
    assert!(b.max_abs_diff(&want) < 1e-15);
    let m = m_matrix(Su2Rep::new(1), &p, MConvention::Su2);
    let want = CMatrix::from_rows(&[
        vec![p.beta - p.beta_3 / 2.0, -p.beta_plus],
        vec![-p.beta_minus, p.beta + p.beta_3 / 2.0],
    ]);
    assert!(m.max_abs_diff(&want) < 1e-15);
    let only3 = BetaParams::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0));
    let d = beta_operator(Su2Rep::new(4), &only3);
    assert_eq!(d.diagonal(), [-2.0, -1.0, 0.0, 1.0, 2.0].map(|x| c64(x, 0.0)).to_vec());
    let scalar = BetaParams::new(c64(0.4, -0.2), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
    for conv in [MConvention::Su2, MConvention::Ode] {
        let m = m_matrix(Su2Rep::new(3), &scalar, conv);
        assert!(m.max_abs_diff(&CMatrix::identity(4).scale(scalar.beta)) == 0.0);
    }
}

#[test]
fn t_matrix_spin_half_closed_form() {
    let p = BetaParams::new(c64(0.0, 0.0), c64(0.3, 0.2), c64(-0.1, 0.5), c64(0.4, -0.3));
    let t = t_matrix_jacobi(Su2Rep::new(1), &p).unwrap();
    let (b, b3) = (t.b, p.beta_3);
    let s = (2.0 * b * (b + b3)).sqrt();
    let d = ((b + b3) / (2.0 * b)).sqrt();
    let want = CMatrix::from_rows(&[
        vec![d, 2.0 * p.beta_plus / s],
        vec![-2.0 * p.beta_minus / s, d],
    ]);
    assert!(t.matrix.max_abs_diff(&want) < 1e-14, "{:?}", t.matrix);
}

#[test]
fn t_is_identity_for_pure_j3() {
    let p = BetaParams::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.6, 0.8));
    for two_j in 1..=6 {
        let t = t_matrix_jacobi(Su2Rep::new(two_j), &p).unwrap();
        assert!(t.matrix.max_abs_diff(&CMatrix::identity(two_j as usize + 1)) < 1e-14);
    }
}

#[test]
fn t_exp_quarter_turn() {
    let p = BetaParams::new(c64(0.0, 0.0), c64(0.5, 0.0), c64(0.5, 0.0), c64(0.0, 0.0));
    let t = t_matrix_exp(Su2Rep::new(1), &p).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let want = CMatrix::from_rows(&[vec![c64(s, 0.0), c64(s, 0.0)], vec![c64(-s, 0.0), c64(s, 0.0)]]);
    assert!(t.matrix.max_abs_diff(&want) < 1e-12, "{:?}", t.matrix);
}

#[test]
fn passing_matrix_rows() {
    let z = c64(0.0, 0.0);
    let upper = BetaParams::new(z, c64(0.3, 0.1), z, c64(0.5, -0.2));
    let p = passing_matrix(Su2Rep::new(1), &upper).unwrap();
    let want = CMatrix::from_rows(&[vec![c64(1.0, 0.0), upper.beta_plus / upper.beta_3], vec![z, c64(1.0, 0.0)]]);
    assert!(p.matrix.max_abs_diff(&want) < 1e-14, "{:?}", p.matrix);
    let lower = BetaParams::new(z, z, c64(0.2, 0.3), c64(-0.4, 0.1));
    let p = passing_matrix(Su2Rep::new(4), &lower).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            // β₊ = 0: columns spread only towards higher m
            if i < j {
                assert!(p.matrix[(i, j)].norm() < 1e-14);
            }
        }
    }
    assert!(passing_matrix(Su2Rep::new(2), &BetaParams::new(z, c64(1.0, 0.0), z, z)).is_err());
}

#[test]
fn jacobi_base_cases() {
    for x in [c64(0.3, 0.2), c64(-1.5, 0.0), c64(0.0, 2.0)] {
        for (a, b) in [(0, 0), (2, -2), (3, -1)] {
            {
                assert_eq!(jacobi(0, a, b, x).unwrap(), c64(1.0, 0.0));
            }
        }
        // P₁^{(α,β)}(x) = (α+1) + (α+β+2)(x−1)/2
        let (a, b) = (2, 1);
        let want = (a as f64 + 1.0) + (a + b + 2) as f64 * (x - 1.0) / 2.0;
        assert!((jacobi(1, a, b, x).unwrap() - want).norm() < 1e-14);
    }
}

fn eigvec_error(rep: Su2Rep, p: &BetaParams, t: &TMatrix) -> f64 {
    let op = beta_operator(rep, p);
    let scale = p.spin_scale() * (1.0 + rep.j());
    (0..rep.dim())
        .map(|l| {
            let v = t.matrix.column(l);
            let ov = op.matvec(&v);
            let n = vaes_core::linops::vnorm(&v);
            ov.iter()
                .zip(&v)
                .map(|(a, b)| (a - t.b * rep.m(l) * b).norm())
                .fold(0.0, f64::max)
                / (n * scale)
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn jacobi_matches_exponential(rep in rep(), bp in cplx(), bm in cplx(), b3 in cplx()) {
        let p = BetaParams::new(c64(0.0, 0.0), bp, bm, b3);
        prop_assume!(p.b().norm() > 1e-3 && bp.norm() > 1e-3 && bm.norm() > 1e-3);
        let tj = t_matrix_jacobi(rep, &p).unwrap();
        let te = t_matrix_exp(rep, &p).unwrap();
        prop_assert!(tj.matrix.max_abs_diff(&te.matrix) <= 1e-9 * (1.0 + tj.matrix.max_abs()),
            "diff {}", tj.matrix.max_abs_diff(&te.matrix));
        prop_assert!(eigvec_error(rep, &p, &tj) < 1e-9);
    }

    #[test]
    fn canonical_t_is_unitary_and_diagonalizes(rep in rep(), p in canonical()) {
        prop_assume!(p.b().norm() > 1e-3);
        let t = t_matrix_jacobi(rep, &p).unwrap();
        prop_assert!(t.matrix.adjoint().matmul(&t.matrix).max_abs_diff(&CMatrix::identity(rep.dim())) < 1e-10);
        let g = generators(rep);
        let d = t.matrix.adjoint().matmul(&beta_operator(rep, &p)).matmul(&t.matrix);
        prop_assert!(d.max_abs_diff(&g.j3.scale(t.b)) < 1e-9 * (1.0 + p.spin_scale()));
    }

    #[test]
    fn m_matrix_eigenvalues(rep in (0u32..=4).prop_map(Su2Rep::new), beta in cplx(), bp in cplx(), bm in cplx(), b3 in cplx()) {
        let p = BetaParams::new(beta, bp, bm, b3);
        prop_assume!(p.b().norm() > 0.05);
        for conv in [MConvention::Su2, MConvention::Ode] {
            let d = eig(&m_matrix(rep, &p, conv)).unwrap().diagonalization().unwrap();
            for m in rep.m_values() {
                let want = p.beta + m * p.b();
                let best = d.diagonal.iter().map(|z| (z - want).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-8);
            }
        }
    }

    #[test]
    fn triangular_passing_columns(rep in rep(), bm in cplx(), b3 in cplx()) {
        prop_assume!(b3.norm() > 0.05);
        let p = BetaParams::new(c64(0.0, 0.0), c64(0.0, 0.0), bm, b3);
        let t = passing_matrix(rep, &p).unwrap();
        prop_assert!(eigvec_error(rep, &p, &t) < 1e-9);
    }
}

