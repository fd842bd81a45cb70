//! Residual metrics and invariant checks shared by every construction.

use crate::algebra::TensorOperator;
use crate::error::{Result, VaesError};
use crate::linops::{commutator, CMatrix, C64};
use crate::vaes::VectorState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub residual: f64,
    pub tail: f64,
    pub sr_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-8,
            tail: 1e-10,
            sr_gap: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub relative_residual: f64,
    pub tail_mass: f64,
    pub guarded_dim: usize,
    pub passed: bool,
    pub context: String,
}

impl ResidualReport {
    pub fn new(
        relative_residual: f64,
        tail_mass: f64,
        guarded_dim: usize,
        tol: &Tolerances,
        context: impl Into<String>,
    ) -> Self {
        let passed = relative_residual.is_finite()
            && relative_residual <= tol.residual
            && tail_mass <= tol.tail;
        Self {
            relative_residual,
            tail_mass,
            guarded_dim,
            passed,
            context: context.into(),
        }
    }
}

impl std::fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: residual {:.3e}, tail {:.3e} over {} guarded levels -> {}",
            self.context,
            self.relative_residual,
            self.tail_mass,
            self.guarded_dim,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// ‖(I_K⊗op)Ψ − (M̃⊗I)Ψ‖ over the guarded levels, divided by ‖Ψ‖.
pub fn eigen_residual(
    op: &TensorOperator,
    mtilde: &CMatrix,
    psi: &VectorState,
    tol: &Tolerances,
) -> Result<ResidualReport> {
    let k = psi.k();
    if mtilde.rows() != k || mtilde.cols() != k {
        return Err(VaesError::Dimension(format!(
            "{}x{} eigenvalue matrix for a {k}-component state",
            mtilde.rows(),
            mtilde.cols()
        )));
    }
    let f = op.fock();
    let d = op.rep().dim();
    let comps = psi.components();
    if comps[0].fock() != f || comps[0].rep() != op.rep() {
        return Err(VaesError::Dimension("operator and state spaces differ".into()));
    }
    let guarded = f.checked_dim() * d;
    let applied: Vec<Vec<C64>> = comps
        .iter()
        .map(|c| op.matrix().matvec(c.amplitudes()))
        .collect();
    let mut res2 = 0.0;
    for u in 0..k {
        for idx in 0..guarded {
            let mut r = applied[u][idx];
            for (s, c) in comps.iter().enumerate() {
                r -= mtilde[(u, s)] * c.amplitudes()[idx];
            }
            res2 += r.norm_sqr();
        }
    }
    let total = psi.norm_sqr();
    Ok(ResidualReport::new(
        (res2 / total).sqrt(),
        psi.tail_mass(),
        f.checked_dim(),
        tol,
        format!("eigenvalue equation, K = {k}"),
    ))
}

/// Both sides of (ΔX)²(ΔP)² ≥ ¼(⟨C⟩² + ⟨F⟩²), with X = (𝔸+𝔸†)/√2,
/// P = (𝔸−𝔸†)/(√2 i), C = −i[X,P], F = ⟨{X,P}⟩ − 2⟨X⟩⟨P⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct SrReport {
    pub lhs: f64,
    pub rhs: f64,
    /// (lhs − rhs)/rhs
    pub gap: f64,
    pub mean_c: f64,
    pub covariance_f: f64,
    pub saturated: bool,
}

pub fn sr_check(psi: &VectorState, a: &TensorOperator, tol: &Tolerances) -> Result<SrReport> {
    let am = a.matrix();
    let ad = am.adjoint();
    let s2 = std::f64::consts::SQRT_2;
    let x = (am + &ad).scale(C64::new(1.0 / s2, 0.0));
    let p = (am - &ad).scale(C64::new(0.0, -1.0 / s2));
    let xp = x.matmul(&p);
    let px = p.matmul(&x);
    let c = commutator(&x, &p).scale(C64::new(0.0, -1.0));
    let anti = &xp + &px;
    let xx = x.matmul(&x);
    let pp = p.matmul(&p);

    let n2 = psi.norm_sqr();
    let expect = |m: &CMatrix| -> f64 {
        let tot: C64 = psi
            .components()
            .iter()
            .map(|s| crate::linops::vdot(s.amplitudes(), &m.matvec(s.amplitudes())))
            .sum();
        tot.re / n2
    };
    let (mx, mp) = (expect(&x), expect(&p));
    let var_x = expect(&xx) - mx * mx;
    let var_p = expect(&pp) - mp * mp;
    let mean_c = expect(&c);
    let f = expect(&anti) - 2.0 * mx * mp;
    let lhs = var_x * var_p;
    let rhs = 0.25 * (mean_c * mean_c + f * f);
    let gap = (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(SrReport {
        lhs,
        rhs,
        gap,
        mean_c,
        covariance_f: f,
        saturated: gap.abs() <= tol.sr_gap,
    })
}

/// Largest of ‖[J₊,J₋] − 2J₃‖ and ‖[J₃,J±] ∓ J±‖ (max-abs entries).
pub fn su2_relations_error(jp: &CMatrix, jm: &CMatrix, j3: &CMatrix) -> f64 {
    let two = C64::new(2.0, 0.0);
    let e1 = (&commutator(jp, jm) - &j3.scale(two)).max_abs();
    let e2 = (&commutator(j3, jp) - jp).max_abs();
    let e3 = (&commutator(j3, jm) + jm).max_abs();
    e1.max(e2).max(e3)
}

pub fn su2_relations_check(jp: &CMatrix, jm: &CMatrix, j3: &CMatrix, tol: f64) -> bool {
    su2_relations_error(jp, jm, j3) <= tol
}
