//! Quaternions as 2×2 complex matrices and the quaternionic vector coherent
//! states built on them.

use std::f64::consts::{PI, TAU};

use crate::aes::{aes_general, ComponentState, IntegrationConstants};
use crate::error::{Result, VaesError};
use crate::fock::{coherent, FockSpace};
use crate::linops::{eig, CMatrix, C64};
use crate::su2::{BetaParams, Su2Rep};
use crate::vaes::{exp_creation_series, EigenvalueMatrix, VectorState};

/// q = r(cos θ + sin θ (cos φ k̂ + sin φ (…))) in polar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuaternionPolar {
    r: f64,
    theta: f64,
    phi: f64,
    psi: f64,
}

impl QuaternionPolar {
    /// Reduces the angles to θ ∈ [0, π], φ ∈ [0, π], ψ ∈ [0, 2π) without
    /// changing the encoded matrix.
    pub fn new(r: f64, theta: f64, phi: f64, psi: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(VaesError::InvalidParams(format!("quaternion modulus r = {r} must be ≥ 0")));
        }
        if ![theta, phi, psi].iter().all(|a| a.is_finite()) {
            return Err(VaesError::InvalidParams("non-finite quaternion angle".into()));
        }
        let (mut theta, mut phi, mut psi) = (theta.rem_euclid(TAU), phi.rem_euclid(TAU), psi);
        // sin θ → −sin θ is absorbed by the unit vector n → −n
        if theta > PI {
            theta = TAU - theta;
            phi = PI - phi;
            psi += PI;
        }
        phi = phi.rem_euclid(TAU);
        if phi > PI {
            phi = TAU - phi;
            psi += PI;
        }
        Ok(Self {
            r,
            theta,
            phi,
            psi: psi.rem_euclid(TAU),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn psi(&self) -> f64 {
        self.psi
    }
    /// re^{iθ}, re^{−iθ}
    pub fn eigenvalues(&self) -> (C64, C64) {
        (C64::from_polar(self.r, self.theta), C64::from_polar(self.r, -self.theta))
    }
}

pub fn quat_matrix(q: &QuaternionPolar) -> CMatrix {
    let (r, t, f, p) = (q.r, q.theta, q.phi, q.psi);
    let i = C64::i();
    let rs = r * t.sin();
    CMatrix::from_rows(&[
        vec![
            C64::new(r * t.cos(), rs * f.cos()),
            i * rs * f.sin() * C64::from_polar(1.0, p),
        ],
        vec![
            i * rs * f.sin() * C64::from_polar(1.0, -p),
            C64::new(r * t.cos(), -rs * f.cos()),
        ],
    ])
}

pub fn quat_to_matrix(q: &QuaternionPolar) -> Result<EigenvalueMatrix> {
    EigenvalueMatrix::new(quat_matrix(q))
}

/// β = r cos θ, β₃ = 2ir sin θ cos φ, β± = −ir sin θ sin φ e^{±iψ};
/// b = 2ir sin θ.
pub fn beta_from_quat(q: &QuaternionPolar) -> Result<BetaParams> {
    if q.r == 0.0 {
        return Err(VaesError::InvalidParams("r = 0 gives no spin coupling".into()));
    }
    let rs = q.r * q.theta.sin();
    if rs.abs() < 1e-14 * q.r {
        log::warn!("sin θ = 0: β₃ and β± vanish, the spin sector decouples");
    }
    let i = C64::i();
    Ok(BetaParams::new(
        C64::new(q.r * q.theta.cos(), 0.0),
        -i * rs * q.phi.sin() * C64::from_polar(1.0, q.psi),
        -i * rs * q.phi.sin() * C64::from_polar(1.0, -q.psi),
        2.0 * i * rs * q.phi.cos(),
    ))
}

/// Columns are the eigenvectors of the quaternion matrix for re^{iθ} and
/// re^{−iθ}: [[cos φ/2, −sin φ/2 e^{iψ}], [sin φ/2 e^{−iψ}, cos φ/2]].
pub fn rotation_matrix(q: &QuaternionPolar) -> CMatrix {
    let (c, s) = ((q.phi / 2.0).cos(), (q.phi / 2.0).sin());
    CMatrix::from_rows(&[
        vec![C64::new(c, 0.0), -C64::from_polar(s, q.psi)],
        vec![C64::from_polar(s, -q.psi), C64::new(c, 0.0)],
    ])
}

fn spin_half() -> Su2Rep {
    Su2Rep::new(1)
}

/// U_rot · (e^{−r²/2}/√2) diag(e^{re^{iθ}a†}, e^{re^{−iθ}a†}) (|0;½,−½⟩, |0;½,+½⟩)ᵀ
pub fn canonical_quaternionic_vcs(q: &QuaternionPolar, f: FockSpace) -> Result<VectorState> {
    let rep = spin_half();
    let (lp, lm) = q.eigenvalues();
    let u = rotation_matrix(q);
    let phi = [
        ComponentState::product(f, rep, &coherent(lp, f).amplitudes, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?,
        ComponentState::product(f, rep, &coherent(lm, f).amplitudes, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])?,
    ];
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let comps = (0..2)
        .map(|row| phi[0].scaled(u[(row, 0)] * w).axpy(u[(row, 1)] * w, &phi[1]))
        .collect::<Result<Vec<_>>>()?;
    let mut psi = VectorState::from_unnormalized(comps)?;
    psi.norm_constant = 2.0 * q.r.powi(2).exp();
    Ok(psi)
}

/// The ground stack g_s = Σ_r U_sr |½, m_r⟩ for which the series
/// Σ M̃ⁿ/√n! (|n⟩⊗g_s)_s coincides with [`canonical_quaternionic_vcs`].
pub fn matched_ground(q: &QuaternionPolar) -> Vec<Vec<C64>> {
    let u = rotation_matrix(q);
    (0..2).map(|s| vec![u[(s, 0)], u[(s, 1)]]).collect()
}

/// Σ M̃ⁿ/√n! applied to (|n⟩⊗χ_s)_s for a given spin ground χ.
pub fn quaternionic_series(q: &QuaternionPolar, f: FockSpace, ground: &[Vec<C64>]) -> Result<VectorState> {
    exp_creation_series(&quat_matrix(q), f, spin_half(), ground)
}

/// The same state written out as a superposition of normalized coherent
/// states, component by component.
pub fn quaternionic_mixture(q: &QuaternionPolar, f: FockSpace) -> Result<VectorState> {
    let rep = spin_half();
    let (lp, lm) = q.eigenvalues();
    let (c, s) = ((q.phi / 2.0).cos(), (q.phi / 2.0).sin());
    let down = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let up = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let kp = ComponentState::product(f, rep, &coherent(lp, f).amplitudes, &down)?;
    let km = ComponentState::product(f, rep, &coherent(lm, f).amplitudes, &up)?;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let first = kp.scaled(C64::new(w * c, 0.0)).axpy(-C64::from_polar(w * s, q.psi), &km)?;
    let second = kp.scaled(C64::from_polar(w * s, -q.psi)).axpy(C64::new(w * c, 0.0), &km)?;
    VectorState::from_unnormalized(vec![first, second])
}

/// Eigenstates of 𝔸 with quaternionic M̃ for a canonical spin-½ 𝔸:
/// Ũ (ψ̃₁, ψ̃₂)ᵀ with Ũ = [[cos φ/2 e^{iψ}, −sin φ/2], [sin φ/2, cos φ/2 e^{−iψ}]]
/// and ψ̃_s the scalar solution with β → re^{±iθ}.
pub fn generalized_quaternionic_vcs(
    q: &QuaternionPolar,
    f: FockSpace,
    p: &BetaParams,
    c: [&IntegrationConstants; 2],
) -> Result<VectorState> {
    let rep = spin_half();
    let (lp, lm) = q.eigenvalues();
    let inner = [aes_general(f, rep, &p.with_beta(lp), c[0])?, aes_general(f, rep, &p.with_beta(lm), c[1])?];
    let (co, si) = ((q.phi / 2.0).cos(), (q.phi / 2.0).sin());
    let ut = CMatrix::from_rows(&[
        vec![C64::from_polar(co, q.psi), C64::new(-si, 0.0)],
        vec![C64::new(si, 0.0), C64::from_polar(co, -q.psi)],
    ]);
    let comps = (0..2)
        .map(|row| inner[0].scaled(ut[(row, 0)]).axpy(ut[(row, 1)], &inner[1]))
        .collect::<Result<Vec<_>>>()?;
    VectorState::from_unnormalized(comps)
}

/// Ground of the canonical spin-½ 𝔸 written in terms of β₊ = Re^{iθ₊},
/// β₋ = Re^{iθ₋}, β₃ = R₃e^{i(θ₊+θ₋)/2}:
/// (|b/2⟩⊗(|−½⟩ − c̄|+½⟩), |−b/2⟩⊗(c|−½⟩ + |+½⟩)) with
/// c = 2Re^{i(θ₊−θ₋)/2}/(R₃ + √(4R² + R₃²)).
pub fn quaternionic_ground(p: &BetaParams, f: FockSpace) -> Result<VectorState> {
    let r = p.beta_plus.norm();
    if (p.beta_minus.norm() - r).abs() > 1e-12 * (1.0 + r) {
        return Err(VaesError::InvalidParams("needs |β₊| = |β₋|".into()));
    }
    let (tp, tm) = (p.beta_plus.arg(), p.beta_minus.arg());
    let sigma = 0.5 * (tp + tm);
    // β₃ = R₃ e^{iσ} with R₃ real (possibly negative)
    let r3c = p.beta_3 * C64::from_polar(1.0, -sigma);
    if r3c.im.abs() > 1e-12 * (1.0 + p.beta_3.norm()) {
        return Err(VaesError::InvalidParams("β₃ phase must be (θ₊+θ₋)/2 mod π".into()));
    }
    let r3 = r3c.re;
    let s = (4.0 * r * r + r3 * r3).sqrt();
    let b = C64::from_polar(s, sigma);
    if s == 0.0 || r3 + s == 0.0 {
        return Err(VaesError::InvalidParams("degenerate spin sector".into()));
    }
    let cc = C64::from_polar(2.0 * r / (r3 + s), 0.5 * (tp - tm));
    let pref = C64::new(((r3 + s) / (4.0 * s)).sqrt(), 0.0);
    let rep = spin_half();
    let g1 = ComponentState::product(f, rep, &coherent(b / 2.0, f).amplitudes, &[pref, -cc.conj() * pref])?;
    let g2 = ComponentState::product(f, rep, &coherent(-b / 2.0, f).amplitudes, &[cc * pref, pref])?;
    VectorState::from_unnormalized(vec![g1, g2])
}

#[derive(Clone, Debug)]
pub struct K2Passing {
    pub p: CMatrix,
    pub p_inv: CMatrix,
    pub b_tilde: C64,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    /// True when the closed-form P failed P⁻¹M̃P = diag and the
    /// eigen-solver result was used instead.
    pub fallback: bool,
}

/// b̃ = √(4m₁₂m₂₁ + (m₁₁ − m₂₂)²) (principal root).
pub fn b_tilde(m: &CMatrix) -> C64 {
    let d = m[(0, 0)] - m[(1, 1)];
    (4.0 * m[(0, 1)] * m[(1, 0)] + d * d).sqrt()
}

/// P = [[2m₁₂, m₁₁ − m₂₂ − b̃], [m₂₂ − m₁₁ + b̃, 2m₂₁]] with
/// P⁻¹M̃P = diag(λ₊, λ₋), λ± = ½(m₁₁ + m₂₂) ± ½b̃. P⁻¹ is the direct inverse.
pub fn k2_passing(mtilde: &EigenvalueMatrix) -> Result<K2Passing> {
    let m = mtilde.matrix();
    if mtilde.k() != 2 {
        return Err(VaesError::Dimension(format!("K = {} (expected 2)", mtilde.k())));
    }
    let bt = b_tilde(m);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    if bt.norm() <= 1e-12 * scale {
        return Err(VaesError::InvalidParams("b̃ = 0: scalar or defective matrix".into()));
    }
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let (lp, lm) = (half_tr + 0.5 * bt, half_tr - 0.5 * bt);
    let two = C64::new(2.0, 0.0);
    let p = CMatrix::from_rows(&[
        vec![two * m[(0, 1)], m[(0, 0)] - m[(1, 1)] - bt],
        vec![m[(1, 1)] - m[(0, 0)] + bt, two * m[(1, 0)]],
    ]);
    let closed = p.inverse().ok().and_then(|pi| {
        let d = pi.matmul(m).matmul(&p);
        let target = CMatrix::from_diag(&[lp, lm]);
        (d.max_abs_diff(&target) <= 1e-10 * scale).then_some(pi)
    });
    match closed {
        Some(p_inv) => Ok(K2Passing {
            p,
            p_inv,
            b_tilde: bt,
            lambda_plus: lp,
            lambda_minus: lm,
            fallback: false,
        }),
        None => {
            // a zero column (m₁₂ = 0 or m₂₁ = 0): fall back to the eigen-solver,
            // ordering columns to match (λ₊, λ₋)
            let d = eig(m)?.diagonalization()?;
            let first = if (d.diagonal[0] - lp).norm() <= (d.diagonal[1] - lp).norm() { 0 } else { 1 };
            let order = [first, 1 - first];
            let p = CMatrix::from_fn(2, 2, |i, j| d.passing[(i, order[j])]);
            let p_inv = p.inverse()?;
            Ok(K2Passing {
                p,
                p_inv,
                b_tilde: bt,
                lambda_plus: lp,
                lambda_minus: lm,
                fallback: true,
            })
        }
    }
}

/// The adjugate of P over 2b̃(1 + m₂₂ − m₁₁) as printed; kept only to
/// document that it is not an inverse in general (det P = 2b̃(b̃ − m₁₁ + m₂₂)).
pub fn k2_displayed_inverse(m: &CMatrix) -> CMatrix {
    let bt = b_tilde(m);
    let two = C64::new(2.0, 0.0);
    let adj = CMatrix::from_rows(&[
        vec![two * m[(1, 0)], m[(1, 1)] - m[(0, 0)] + bt],
        vec![m[(0, 0)] - m[(1, 1)] - bt, two * m[(0, 1)]],
    ]);
    adj.scale(1.0 / (2.0 * bt * (1.0 + m[(1, 1)] - m[(0, 0)])))
}
