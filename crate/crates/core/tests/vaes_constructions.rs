use vaes_core::aes::IntegrationConstants;
use vaes_core::algebra::{build_A, Family};
use vaes_core::fock::FockSpace;
use vaes_core::su2::{BetaParams, Su2Rep};
use vaes_core::vaes::*;
use vaes_core::verify::{eigen_residual, Tolerances};
use vaes_core::{c64, CMatrix, C64};

fn canonical(r: f64, tp: f64, tm: f64, r3: f64) -> BetaParams {
    BetaParams::new(
        c64(0.0, 0.0),
        C64::from_polar(r, tp),
        C64::from_polar(r, tm),
        C64::from_polar(r3, 0.5 * (tp + tm)),
    )
}

fn normal_k2() -> EigenvalueMatrix {
    // U diag(λ) U†
    let u = CMatrix::from_rows(&[
        vec![c64(0.6, 0.0), c64(0.0, -0.8)],
        vec![c64(0.0, -0.8), c64(0.6, 0.0)],
    ]);
    let d = CMatrix::from_diag(&[c64(0.7, 0.2), c64(-0.3, 0.5)]);
    EigenvalueMatrix::new(u.matmul(&d).matmul(&u.adjoint())).unwrap()
}

fn normal_k3() -> EigenvalueMatrix {
    let h = CMatrix::from_rows(&[
        vec![c64(0.3, 0.0), c64(0.1, 0.2), c64(-0.2, 0.1)],
        vec![c64(0.1, -0.2), c64(-0.4, 0.0), c64(0.3, 0.0)],
        vec![c64(-0.2, -0.1), c64(0.3, 0.0), c64(0.1, 0.0)],
    ]);
    // a Hermitian plus i·(function of it) stays normal
    let m = &h + &h.matmul(&h).scale(c64(0.0, 0.7));
    EigenvalueMatrix::new(m).unwrap()
}

fn nonnormal_k2() -> EigenvalueMatrix {
    EigenvalueMatrix::new(CMatrix::from_rows(&[
        vec![c64(0.5, 0.1), c64(0.4, -0.2)],
        vec![c64(0.0, 0.0), c64(-0.3, 0.2)],
    ]))
    .unwrap()
}

fn residual(psi: &VectorState, m: &EigenvalueMatrix, f: FockSpace, rep: Su2Rep, p: &BetaParams) -> f64 {
    let r = eigen_residual(&build_A(f, rep, p), m.matrix(), psi, &Tolerances::default()).unwrap();
    assert!(r.tail_mass < 1e-10, "tail {}", r.tail_mass);
    r.relative_residual
}

#[test]
fn annihilator_normal_and_non_normal() {
    let f = FockSpace::new(48, 8).unwrap();
    let z = BetaParams::zero();
    for (m, rep) in [(normal_k2(), Su2Rep::new(1)), (normal_k3(), Su2Rep::new(2)), (nonnormal_k2(), Su2Rep::new(2))] {
        let psi = solve_annihilator(&m, f, rep, None).unwrap();
        let r = residual(&psi, &m, f, rep, &z);
        assert!(r < 1e-8, "residual {r}");
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }
    assert_eq!(normal_k2().classification(), Classification::Normal);
    assert_eq!(nonnormal_k2().classification(), Classification::Diagonalizable);
}

#[test]
fn orthonormal_ground_norm_constant() {
    let f = FockSpace::new(60, 8).unwrap();
    let m = normal_k3();
    let psi = solve_annihilator(&m, f, Su2Rep::new(2), None).unwrap();
    let expected: f64 = m.eigenvalues().unwrap().iter().map(|l| l.norm_sqr().exp()).sum();
    assert!((psi.norm_constant - expected).abs() < 1e-10 * expected);
}

#[test]
fn series_form_matches_diagonal_route() {
    let f = FockSpace::new(48, 8).unwrap();
    let rep = Su2Rep::new(1);
    let m = normal_k2();
    let series = solve_annihilator_series(&m, f, rep, &[-0.5, 0.5]).unwrap();
    assert!(residual(&series, &m, f, rep, &BetaParams::zero()) < 1e-8);
    // the diagonal route with constants c_s = Σ_r U†_sr e_r is the same state
    let d = m.diagonalization().unwrap();
    let cs: Vec<IntegrationConstants> = (0..2)
        .map(|s| IntegrationConstants::new(vec![d.passing_inverse[(s, 0)], d.passing_inverse[(s, 1)]]).unwrap())
        .collect();
    let diag = solve_annihilator(&m, f, rep, Some(&cs)).unwrap();
    assert!(series.max_abs_diff_aligned(&diag).unwrap() < 1e-9);
    // 𝒩 = ⟨Ψ(0)| e^{M̃M̃†} |Ψ(0)⟩
    let ground = solve_annihilator_series(&EigenvalueMatrix::new(CMatrix::zeros(2, 2)).unwrap(), f, rep, &[-0.5, 0.5]).unwrap();
    let n = norm_constant_series(&m, &ground).unwrap() * ground.norm_constant;
    assert!((n - series.norm_constant).abs() < 1e-10 * n);
}

#[test]
fn supercoherent_route() {
    let f = FockSpace::new(64, 8).unwrap();
    let rep = Su2Rep::new(1);
    let m = EigenvalueMatrix::new(CMatrix::from_rows(&[
        vec![c64(0.5, 0.0), c64(-1.0, 0.0)],
        vec![c64(0.0, 0.0), c64(0.5, 0.0)],
    ]))
    .unwrap();
    assert_eq!(m.classification(), Classification::Defective);
    let psi = solve_annihilator(&m, f, rep, None).unwrap();
    assert!(residual(&psi, &m, f, rep, &BetaParams::zero()) < 1e-8);
    let jordan3 = EigenvalueMatrix::new(CMatrix::from_rows(&[
        vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
        vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        vec![c64(0.0, 0.0); 3],
    ]))
    .unwrap();
    assert!(solve_annihilator(&jordan3, f, rep, None).is_err());
}

#[test]
fn general_solution_for_beta_families() {
    let f = FockSpace::new(56, 8).unwrap();
    let rep = Su2Rep::new(2);
    let families = [
        canonical(0.3, 0.4, -0.2, 0.5),
        Family::XPositiveHyperbolic { x: 0.2, alpha: 0.6, theta_plus: 0.3, theta_minus: -0.5 }.params().unwrap(),
        Family::RhoGeneric { r: 0.3, theta_plus: 0.1, theta_minus: 0.7, r3: 0.4, theta3: 1.3 }.params().unwrap(),
        Family::FullGeneric { r_plus: 0.3, r_minus: 0.2, theta_plus: 0.4, theta_minus: -0.9, r3: 0.35, theta3: 0.2 }.params().unwrap(),
    ];
    for p in &families {
        for m in [normal_k2(), nonnormal_k2()] {
            let psi = solve_general(&m, f, rep, p, None).unwrap();
            let r = residual(&psi, &m, f, rep, p);
            assert!(r < 1e-8, "{p:?}: residual {r}");
        }
        let m = normal_k3();
        let psi = solve_general(&m, f, rep, p, None).unwrap();
        assert!(residual(&psi, &m, f, rep, p) < 1e-8);
    }
}

#[test]
fn displacement_form_matches_factored() {
    let f = FockSpace::new(40, 8).unwrap();
    let rep = Su2Rep::new(1);
    let p = canonical(0.25, 0.3, -0.4, 0.3);
    let m = normal_k2();
    let full = vcs_displacement_form(&m, f, rep, &p, &[-0.5, 0.5]).unwrap();
    let fact = vcs_displacement_factored(&m, f, rep, &p, &[-0.5, 0.5]).unwrap();
    assert!(residual(&full, &m, f, rep, &p) < 1e-8);
    assert!(residual(&fact, &m, f, rep, &p) < 1e-8);
    assert!(full.fidelity(&fact).unwrap() > 1.0 - 1e-8, "{}", full.fidelity(&fact).unwrap());
}

#[test]
fn displacement_of_zero_matrix_is_ground() {
    let f = FockSpace::new(32, 6).unwrap();
    let rep = Su2Rep::new(1);
    let p = canonical(0.25, 0.3, -0.4, 0.3);
    let m = EigenvalueMatrix::new(CMatrix::zeros(2, 2)).unwrap();
    let psi = vcs_displacement_form(&m, f, rep, &p, &[-0.5, 0.5]).unwrap();
    let g = canonical_ground(f, rep, &p, &[-0.5, 0.5]).unwrap();
    assert!(psi.fidelity(&g).unwrap() > 1.0 - 1e-12);
}

#[test]
fn bneq0_family_matches_factored() {
    let f = FockSpace::new(48, 8).unwrap();
    let rep = Su2Rep::new(2);
    let fams = [
        Family::XPositiveHyperbolic { x: 0.2, alpha: 0.6, theta_plus: 0.3, theta_minus: -0.5 },
        Family::RhoGeneric { r: 0.3, theta_plus: 0.1, theta_minus: 0.7, r3: 0.4, theta3: 1.3 },
        Family::FullMinusOnly { r_minus: 0.3, theta_minus: 0.4, r3: 0.5, theta3: -0.3 },
    ];
    let m = normal_k2();
    for fam in fams {
        let p = fam.params().unwrap();
        let a = bneq0_family(&m, f, rep, &p, &[-1.0, 0.0]).unwrap();
        let b = bneq0_family_factored(&m, f, rep, &p, &[-1.0, 0.0]).unwrap();
        let r = residual(&a, &m, f, rep, &p);
        assert!(r < 1e-8, "{fam:?} residual {r}");
        assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-8, "{fam:?} fidelity {}", a.fidelity(&b).unwrap());
    }
}

#[test]
fn intelligent_families() {
    let f = FockSpace::new(48, 8).unwrap();
    let rep = Su2Rep::new(2);
    let m = normal_k2();
    let lower = BetaParams::new(c64(0.0, 0.0), c64(0.3, 0.2), c64(0.0, 0.0), c64(0.0, 0.0));
    let upper = BetaParams::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(-0.2, 0.3), c64(0.0, 0.0));
    for p in [lower, upper] {
        let psi = intelligent_family(&m, f, rep, &p, &[0.0, 1.0]).unwrap();
        let r = residual(&psi, &m, f, rep, &p);
        assert!(r < 1e-8, "residual {r}");
    }
    let sym = intelligent_symmetric(&m, f, rep, &lower).unwrap();
    assert!(residual(&sym, &m, f, rep, &lower) < 1e-8);
    // same state as the all-m = j construction with ground weights (I + X)^{-j}(1, 1)
    let x = m.matrix().matmul(&m.matrix().adjoint()).scale(c64(lower.beta_plus.norm_sqr(), 0.0));
    let w = vaes_core::linops::matrix_function(&x, |z| (1.0 + z).powf(-1.0)).unwrap();
    let top = rep.dim() - 1;
    let chi: Vec<Vec<C64>> = (0..2)
        .map(|r| {
            let mut v = vec![c64(0.0, 0.0); rep.dim()];
            v[top] = w[(r, 0)] + w[(r, 1)];
            v
        })
        .collect();
    let weighted = intelligent_family_from(&m, f, rep, &lower, &chi).unwrap();
    assert!(weighted.fidelity(&sym).unwrap() > 1.0 - 1e-10, "{}", weighted.fidelity(&sym).unwrap());
    let equal = intelligent_family(&m, f, rep, &lower, &[1.0, 1.0]).unwrap();
    assert!(equal.fidelity(&sym).unwrap() < 1.0 - 1e-6);
}

#[test]
fn isospectral_ladder() {
    let f = FockSpace::new(48, 8).unwrap();
    let rep = Su2Rep::new(1);
    let p = canonical(0.25, 0.3, -0.4, 0.3);
    let g = canonical_ground(f, rep, &p, &[-0.5, 0.5]).unwrap();
    let lad = energy_ladder(&g, &build_A(f, rep, &p), 5).unwrap();
    for (n, e) in lad.energies.iter().enumerate() {
        assert!((e - n as f64).abs() < 1e-6, "n = {n}: {e}");
        assert!((lad.states[n].norm_sqr() - 1.0).abs() < 1e-12);
    }
}
