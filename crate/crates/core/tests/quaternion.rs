use approx::assert_relative_eq;
use std::f64::consts::PI;

use proptest::prelude::*;
use vaes_core::aes::IntegrationConstants;
use vaes_core::algebra::build_A;
use vaes_core::fock::FockSpace;
use vaes_core::linops::{matrix_function, CMatrix};
use vaes_core::quaternion::*;
use vaes_core::su2::{m_matrix, BetaParams, MConvention, Su2Rep};
use vaes_core::vaes::{norm_constant_series, vcs_displacement_factored, vcs_displacement_form, Classification, VectorState};
use vaes_core::verify::{eigen_residual, Tolerances};
use vaes_core::{c64, C64};

fn q(r: f64, t: f64, f: f64, p: f64) -> QuaternionPolar {
    QuaternionPolar::new(r, t, f, p).unwrap()
}

#[test]
fn matrix_examples() {
    let m = quat_matrix(&q(1.0, PI / 2.0, 0.0, 0.0));
    let want = CMatrix::from_diag(&[c64(0.0, 1.0), c64(0.0, -1.0)]);
    assert!(m.max_abs_diff(&want) < 1e-15);
    let real = quat_matrix(&q(2.5, 0.0, 1.0, 2.0));
    assert!(real.max_abs_diff(&CMatrix::identity(2).scale(c64(2.5, 0.0))) < 1e-15);
    let e = quat_to_matrix(&q(1.0, PI / 2.0, PI / 3.0, 0.0)).unwrap();
    assert_eq!(e.classification(), Classification::Normal);
}

#[test]
fn beta_parameters() {
    let p = beta_from_quat(&q(1.0, PI / 2.0, PI / 2.0, 0.0)).unwrap();
    assert!(p.beta.norm() < 1e-15 && p.beta_3.norm() < 1e-15);
    assert!((p.beta_plus - c64(0.0, -1.0)).norm() < 1e-15);
    assert!((p.beta_minus - c64(0.0, -1.0)).norm() < 1e-15);
    assert!(beta_from_quat(&q(0.0, 0.3, 0.2, 0.1)).is_err());
}

#[test]
fn arctan_of_quaternion_product() {
    let m = quat_matrix(&q(0.8, 0.7, 1.1, 0.3));
    let mm = m.matmul(&m.adjoint());
    let f = matrix_function(&mm, |z| z.atan()).unwrap();
    let want = CMatrix::identity(2).scale(c64(0.64f64.atan(), 0.0));
    assert!(f.max_abs_diff(&want) < 1e-13);
}

#[test]
fn rotation_form_residual_and_mixture() {
    let f = FockSpace::new(64, 8).unwrap();
    let qq = q(1.0, 0.7, 1.1, 0.3);
    let psi = canonical_quaternionic_vcs(&qq, f).unwrap();
    let m = quat_matrix(&qq);
    let a = build_A(f, Su2Rep::new(1), &BetaParams::zero());
    let r = eigen_residual(&a, &m, &psi, &Tolerances::default()).unwrap();
    assert!(r.passed, "{r}");
    let mix = quaternionic_mixture(&qq, f).unwrap();
    assert!(psi.max_abs_diff_aligned(&mix).unwrap() < 1e-12);
}

#[test]
fn no_mixing_when_phi_is_zero() {
    let f = FockSpace::new(40, 8).unwrap();
    let psi = canonical_quaternionic_vcs(&q(0.9, 0.4, 0.0, 0.0), f).unwrap();
    // component 1 lives on m = −½ only, component 2 on m = +½ only
    for n in 0..f.dim() {
        assert!(psi.components()[0].amp(n, 1).norm() < 1e-15);
        assert!(psi.components()[1].amp(n, 0).norm() < 1e-15);
    }
}

#[test]
fn series_with_matched_ground() {
    let f = FockSpace::new(64, 8).unwrap();
    let qq = q(1.2, 2.1, 0.8, 4.0);
    let rot = canonical_quaternionic_vcs(&qq, f).unwrap();
    let ser = quaternionic_series(&qq, f, &matched_ground(&qq)).unwrap();
    assert!(rot.fidelity(&ser).unwrap() >= 1.0 - 1e-9);
    // 𝒩 = 2e^{r²} from the ground sandwich
    let ground = VectorState::new(
        matched_ground(&qq)
            .iter()
            .map(|g| {
                let mut amps = vec![c64(0.0, 0.0); f.dim() * 2];
                amps[0] = g[0];
                amps[1] = g[1];
                vaes_core::aes::ComponentState::new(f, Su2Rep::new(1), amps).unwrap()
            })
            .collect(),
        1.0,
    )
    .unwrap();
    let n = norm_constant_series(&quat_to_matrix(&qq).unwrap(), &ground).unwrap();
    let want = 2.0 * 1.44f64.exp();
    assert_relative_eq!(n, want, max_relative = 1e-10);
    assert_relative_eq!(ser.norm_constant, want, max_relative = 1e-9);
}

#[test]
fn k2_passing_for_quaternions() {
    let qq = q(1.3, 0.9, 0.6, 1.7);
    let k = k2_passing(&quat_to_matrix(&qq).unwrap()).unwrap();
    let (lp, lm) = qq.eigenvalues();
    assert!((k.b_tilde - c64(0.0, 2.0 * 1.3 * 0.9f64.sin())).norm() < 1e-12);
    assert!((k.lambda_plus - lp).norm() < 1e-12 && (k.lambda_minus - lm).norm() < 1e-12);
    // normal M̃: P is unitary once its columns are normalized
    let mut p = k.p.clone();
    for j in 0..2 {
        let col = p.column(j);
        let n = vaes_core::linops::vnorm(&col);
        p.set_column(j, &col.iter().map(|z| z / n).collect::<Vec<_>>());
    }
    assert!(p.adjoint().matmul(&p).max_abs_diff(&CMatrix::identity(2)) < 1e-12);
    // the printed inverse is not an inverse here
    let disp = k2_displayed_inverse(&quat_matrix(&qq));
    assert!(disp.matmul(&k.p).max_abs_diff(&CMatrix::identity(2)) > 1e-3);
}

#[test]
fn generalized_quaternionic_family() {
    let f = FockSpace::new(48, 8).unwrap();
    let rep = Su2Rep::new(1);
    let qq = q(0.8, 0.6, 1.0, 0.4);
    let p = BetaParams::new(
        c64(0.0, 0.0),
        C64::from_polar(0.3, 0.5),
        C64::from_polar(0.3, -0.1),
        C64::from_polar(0.4, 0.2),
    );
    let m = quat_matrix(&qq);
    let a = build_A(f, rep, &p);
    let c1 = IntegrationConstants::new(vec![c64(1.0, 0.0), c64(0.3, -0.2)]).unwrap();
    let c2 = IntegrationConstants::new(vec![c64(-0.4, 0.1), c64(1.0, 0.0)]).unwrap();
    let psi = generalized_quaternionic_vcs(&qq, f, &p, [&c1, &c2]).unwrap();
    assert!(eigen_residual(&a, &m, &psi, &Tolerances::default()).unwrap().passed);

    let e = quat_to_matrix(&qq).unwrap();
    let full = vcs_displacement_form(&e, f, rep, &p, &[-0.5, 0.5]).unwrap();
    let fact = vcs_displacement_factored(&e, f, rep, &p, &[-0.5, 0.5]).unwrap();
    assert!(full.fidelity(&fact).unwrap() > 1.0 - 1e-8);
    // displayed ground equals the (b, T) ground
    let g = quaternionic_ground(&p, f).unwrap();
    let g2 = vaes_core::vaes::canonical_ground(f, rep, &p, &[-0.5, 0.5]).unwrap();
    assert!(g.fidelity(&g2).unwrap() > 1.0 - 1e-12);
    assert!(eigen_residual(&a, &CMatrix::zeros(2, 2), &g, &Tolerances::default()).unwrap().passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quaternion_matrix_invariants(r in 0.0f64..3.0, t in -7.0f64..7.0, f in -7.0f64..7.0, p in -7.0f64..7.0) {
        let qq = q(r, t, f, p);
        let m = quat_matrix(&qq);
        let mm = m.matmul(&m.adjoint());
        prop_assert!(mm.max_abs_diff(&CMatrix::identity(2).scale(c64(r * r, 0.0))) < 1e-12 * (1.0 + r * r));
        let e = quat_to_matrix(&qq).unwrap();
        let mut got: Vec<C64> = e.eigenvalues().unwrap().to_vec();
        let (lp, lm) = qq.eigenvalues();
        got.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        let mut want = vec![lp, lm];
        want.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).norm() < 1e-12 * (1.0 + r));
        }
    }

    #[test]
    fn beta_round_trip(r in 0.1f64..3.0, t in 0.0f64..PI, f in 0.0f64..PI, p in 0.0f64..6.2) {
        let qq = q(r, t, f, p);
        let b = beta_from_quat(&qq).unwrap();
        let m = m_matrix(Su2Rep::new(1), &b, MConvention::Ode);
        prop_assert!(m.max_abs_diff(&quat_matrix(&qq)) < 1e-12 * (1.0 + r));
        prop_assert!((b.b() - c64(0.0, 2.0 * r * t.sin())).norm() < 1e-12 * (1.0 + r)
            || (b.b() + c64(0.0, 2.0 * r * t.sin())).norm() < 1e-12 * (1.0 + r));
    }

    #[test]
    fn k2_product_test(re in prop::collection::vec(-1.0f64..1.0, 8)) {
        let m = CMatrix::from_rows(&[
            vec![c64(re[0], re[1]), c64(re[2], re[3])],
            vec![c64(re[4], re[5]), c64(re[6], re[7])],
        ]);
        let e = vaes_core::vaes::EigenvalueMatrix::new(m.clone()).unwrap();
        if let Ok(k) = k2_passing(&e) {
            let d = k.p_inv.matmul(&m).matmul(&k.p);
            let want = CMatrix::from_diag(&[k.lambda_plus, k.lambda_minus]);
            prop_assert!(d.max_abs_diff(&want) < 1e-9 * (1.0 + m.max_abs()));
        }
    }
}

#[test]
fn literal_series_is_spin_rotated_copy() {
    let f = FockSpace::new(56, 8).unwrap();
    let qq = q(0.9, 1.1, 0.7, 2.2);
    let one = c64(1.0, 0.0);
    let zero = c64(0.0, 0.0);
    let literal = quaternionic_series(&qq, f, &[vec![one, zero], vec![zero, one]]).unwrap();
    let rot = canonical_quaternionic_vcs(&qq, f).unwrap();
    let uc = rotation_matrix(&qq).conj();
    let moved = VectorState::from_unnormalized(rot.components().iter().map(|c| c.apply_spin(&uc)).collect()).unwrap();
    assert!(literal.fidelity(&moved).unwrap() > 1.0 - 1e-10, "{}", literal.fidelity(&moved).unwrap());
    assert!(literal.fidelity(&rot).unwrap() < 1.0 - 1e-3);
}

#[test]
fn su2_convention_reflects_phi() {
    let qq = q(1.1, 0.8, 0.5, 1.9);
    let b = beta_from_quat(&qq).unwrap();
    let m = m_matrix(Su2Rep::new(1), &b, MConvention::Su2);
    assert!(m.max_abs_diff(&quat_matrix(&q(1.1, 0.8, PI - 0.5, 1.9))) < 1e-12);
}
