//! The generalized annihilator 𝔸 = a + β₊J₋ + β₋J₊ + β₃J₃, its commutator
//! with 𝔸†, and the transformed su(2) generators of the b = 0 families.

use std::f64::consts::PI;

use crate::error::{Result, VaesError};
use crate::fock::{annihilator, FockSpace};
use crate::linops::{commutator, expm, kron, CMatrix, C64};
use crate::su2::{beta_operator, generators, BetaParams, Su2Rep};
use crate::verify::{ResidualReport, Tolerances};

/// An operator on the truncated |n⟩⊗|j,m⟩ space (index n·(2j+1) + i).
#[derive(Clone, Debug)]
pub struct TensorOperator {
    matrix: CMatrix,
    fock: FockSpace,
    rep: Su2Rep,
}

impl TensorOperator {
    pub fn new(matrix: CMatrix, fock: FockSpace, rep: Su2Rep) -> Result<Self> {
        let n = fock.dim() * rep.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(VaesError::Dimension(format!(
                "tensor operator must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix, fock, rep })
    }
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
    pub fn fock(&self) -> FockSpace {
        self.fock
    }
    pub fn rep(&self) -> Su2Rep {
        self.rep
    }
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            ..*self
        }
    }
}

/// 𝔸 = a⊗I + I⊗(β₊J₋ + β₋J₊ + β₃J₃). The scalar β is not part of 𝔸.
#[allow(non_snake_case)]
pub fn build_A(f: FockSpace, rep: Su2Rep, p: &BetaParams) -> TensorOperator {
    let a = kron(&annihilator(f), &CMatrix::identity(rep.dim()));
    let spin = kron(&CMatrix::identity(f.dim()), &beta_operator(rep, p));
    TensorOperator {
        matrix: &a + &spin,
        fock: f,
        rep,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    /// [𝔸,𝔸†] = I
    Canonical,
    /// I + 2xJ₃
    ExtendedX { x: f64 },
    /// I + ρe^{iν}J₊ + ρe^{−iν}J₋
    NonCanonicalRho { rho: f64, nu: f64 },
    /// all coefficients present
    FullNonCanonical { x: f64, rho: f64, nu: f64 },
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::Canonical => "Canonical",
            Scenario::ExtendedX { .. } => "ExtendedX",
            Scenario::NonCanonicalRho { .. } => "NonCanonicalRho",
            Scenario::FullNonCanonical { .. } => "FullNonCanonical",
        }
    }
}

/// [𝔸,𝔸†] = c_I·I + c_3·2J₃ + c_plus·J₊ + c_minus·J₋.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    pub c_i: C64,
    pub c_3: C64,
    pub c_plus: C64,
    pub c_minus: C64,
    pub scenario: Scenario,
    pub x: f64,
    pub rho: f64,
    pub nu: f64,
}

impl CommutatorReport {
    /// The predicted commutator on the spin factor (without the identity).
    pub fn spin_part(&self, rep: Su2Rep) -> CMatrix {
        let g = generators(rep);
        let s = &g.j3.scale(2.0 * self.c_3) + &g.jp.scale(self.c_plus);
        &s + &g.jm.scale(self.c_minus)
    }
}

pub const SCENARIO_TOL: f64 = 1e-10;
pub const SCENARIO_WARN: f64 = 1e-6;

/// Commutator coefficients from β alone:
/// x = |β₋|² − |β₊|², ρe^{iν} = β₃β₊* − β₃*β₋.
pub fn commutator_report(p: &BetaParams) -> CommutatorReport {
    let x = p.beta_minus.norm_sqr() - p.beta_plus.norm_sqr();
    let c_plus = p.beta_3 * p.beta_plus.conj() - p.beta_3.conj() * p.beta_minus;
    let rho = c_plus.norm();
    let nu = if rho == 0.0 {
        0.0
    } else {
        c_plus.arg().rem_euclid(2.0 * PI)
    };
    let scale = p.spin_scale().powi(2).max(f64::MIN_POSITIVE);
    let x_rel = x.abs() / scale;
    let rho_rel = rho / scale;
    for (name, v) in [("x", x_rel), ("ρ", rho_rel)] {
        if v > SCENARIO_TOL && v < SCENARIO_WARN {
            log::warn!(
                "commutator coefficient {name} = {v:.2e} (relative) is within {SCENARIO_WARN:e} of zero; \
                 scenario is ambiguous between the {name} = 0 and {name} ≠ 0 branches"
            );
        }
    }
    let x_zero = x_rel <= SCENARIO_TOL;
    let rho_zero = rho_rel <= SCENARIO_TOL;
    let scenario = match (x_zero, rho_zero) {
        (true, true) => Scenario::Canonical,
        (false, true) => Scenario::ExtendedX { x },
        (true, false) => Scenario::NonCanonicalRho { rho, nu },
        (false, false) => Scenario::FullNonCanonical { x, rho, nu },
    };
    CommutatorReport {
        c_i: C64::new(1.0, 0.0),
        c_3: C64::new(x, 0.0),
        c_plus,
        c_minus: c_plus.conj(),
        scenario,
        x,
        rho,
        nu,
    }
}

/// Compares the matrix commutator [𝔸,𝔸†] with the symbolic prediction on
/// the levels n < N − guard (the top level breaks [a,a†] = I). Needs
/// guard ≥ 1.
pub fn verify_commutator(f: FockSpace, rep: Su2Rep, p: &BetaParams, tol: &Tolerances) -> Result<ResidualReport> {
    if f.guard() == 0 {
        return Err(VaesError::InvalidParams(
            "commutator check needs at least one guard level".into(),
        ));
    }
    let a = build_A(f, rep, p);
    let direct = commutator(a.matrix(), &a.matrix().adjoint());
    let report = commutator_report(p);
    let predicted = &CMatrix::identity(f.dim() * rep.dim())
        + &kron(&CMatrix::identity(f.dim()), &report.spin_part(rep));
    let keep = f.checked_dim() * rep.dim();
    let mut diff2 = 0.0;
    let mut ref2 = 0.0;
    for r in 0..keep {
        for c in 0..keep {
            diff2 += (direct[(r, c)] - predicted[(r, c)]).norm_sqr();
            ref2 += predicted[(r, c)].norm_sqr();
        }
    }
    Ok(ResidualReport::new(
        (diff2 / ref2).sqrt(),
        0.0,
        f.checked_dim(),
        tol,
        format!("[A, A†] vs {}", report.scenario.label()),
    ))
}

/// Named parameter families for each commutator scenario, together with the
/// commutator they are stated to produce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// x > 0: β₊ = √x sinh α e^{iθ₊}, β₋ = √x cosh α e^{iθ₋}, β₃ = 0
    XPositiveHyperbolic { x: f64, alpha: f64, theta_plus: f64, theta_minus: f64 },
    /// x > 0: β₊ = 0, β₋ = √x e^{iθ₋}
    XPositiveUpper { x: f64, theta_minus: f64 },
    /// x < 0: β₊ = √−x cosh α e^{iθ₊}, β₋ = √−x sinh α e^{iθ₋}
    XNegativeHyperbolic { x: f64, alpha: f64, theta_plus: f64, theta_minus: f64 },
    /// x < 0: β₊ = √−x e^{iθ₊}, β₋ = 0
    XNegativeLower { x: f64, theta_plus: f64 },
    /// |β₊| = |β₋| = R, β₃ = R₃e^{iθ₃} off the b = 0 line
    RhoGeneric { r: f64, theta_plus: f64, theta_minus: f64, r3: f64, theta3: f64 },
    /// |β₊| = |β₋| = R, β₃ = 2R e^{i(σ + (k+½)π)}  (b = 0)
    RhoBZero { r: f64, theta_plus: f64, theta_minus: f64, k: u8 },
    /// β₊ ≠ 0, β₋ = 0, β₃ ≠ 0
    FullPlusOnly { r_plus: f64, theta_plus: f64, r3: f64, theta3: f64 },
    /// β₊ = 0, β₋ ≠ 0, β₃ ≠ 0
    FullMinusOnly { r_minus: f64, theta_minus: f64, r3: f64, theta3: f64 },
    /// R₊ ≠ R₋, b ≠ 0
    FullGeneric { r_plus: f64, r_minus: f64, theta_plus: f64, theta_minus: f64, r3: f64, theta3: f64 },
    /// R₊ ≠ R₋, β₃ = 2√(R₊R₋) e^{i(σ + (k+½)π)}  (b = 0)
    FullBZero { r_plus: f64, r_minus: f64, theta_plus: f64, theta_minus: f64, k: u8 },
}

fn polar(r: f64, t: f64) -> C64 {
    C64::from_polar(r, t)
}

fn k_phase(k: u8) -> C64 {
    C64::from_polar(1.0, (k as f64 + 0.5) * PI)
}

/// Stated commutator of a family: x and ρe^{iν}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatedCommutator {
    pub x: f64,
    pub c_plus: C64,
    pub b_zero: bool,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::XPositiveHyperbolic { .. } => "x>0, sinh/cosh",
            Family::XPositiveUpper { .. } => "x>0, beta+=0",
            Family::XNegativeHyperbolic { .. } => "x<0, cosh/sinh",
            Family::XNegativeLower { .. } => "x<0, beta-=0",
            Family::RhoGeneric { .. } => "rho, b!=0",
            Family::RhoBZero { .. } => "rho, b=0",
            Family::FullPlusOnly { .. } => "full, beta-=0",
            Family::FullMinusOnly { .. } => "full, beta+=0",
            Family::FullGeneric { .. } => "full, b!=0",
            Family::FullBZero { .. } => "full, b=0",
        }
    }

    pub fn params(&self) -> Result<BetaParams> {
        let z = C64::new(0.0, 0.0);
        let bp = |bp, bm, b3| BetaParams::new(z, bp, bm, b3);
        let p = match *self {
            Family::XPositiveHyperbolic { x, alpha, theta_plus, theta_minus } => {
                positive(x, "x")?;
                let s = x.sqrt();
                bp(polar(s * alpha.sinh(), theta_plus), polar(s * alpha.cosh(), theta_minus), z)
            }
            Family::XPositiveUpper { x, theta_minus } => {
                positive(x, "x")?;
                bp(z, polar(x.sqrt(), theta_minus), z)
            }
            Family::XNegativeHyperbolic { x, alpha, theta_plus, theta_minus } => {
                positive(-x, "−x")?;
                let s = (-x).sqrt();
                bp(polar(s * alpha.cosh(), theta_plus), polar(s * alpha.sinh(), theta_minus), z)
            }
            Family::XNegativeLower { x, theta_plus } => {
                positive(-x, "−x")?;
                bp(polar((-x).sqrt(), theta_plus), z, z)
            }
            Family::RhoGeneric { r, theta_plus, theta_minus, r3, theta3 } => {
                positive(r, "R")?;
                bp(polar(r, theta_plus), polar(r, theta_minus), polar(r3, theta3))
            }
            Family::RhoBZero { r, theta_plus, theta_minus, k } => {
                positive(r, "R")?;
                check_k(k)?;
                let sigma = 0.5 * (theta_plus + theta_minus);
                bp(polar(r, theta_plus), polar(r, theta_minus), 2.0 * r * polar(1.0, sigma) * k_phase(k))
            }
            Family::FullPlusOnly { r_plus, theta_plus, r3, theta3 } => {
                positive(r_plus, "R₊")?;
                positive(r3, "R₃")?;
                bp(polar(r_plus, theta_plus), z, polar(r3, theta3))
            }
            Family::FullMinusOnly { r_minus, theta_minus, r3, theta3 } => {
                positive(r_minus, "R₋")?;
                positive(r3, "R₃")?;
                bp(z, polar(r_minus, theta_minus), polar(r3, theta3))
            }
            Family::FullGeneric { r_plus, r_minus, theta_plus, theta_minus, r3, theta3 } => {
                positive(r_plus, "R₊")?;
                positive(r_minus, "R₋")?;
                positive(r3, "R₃")?;
                bp(polar(r_plus, theta_plus), polar(r_minus, theta_minus), polar(r3, theta3))
            }
            Family::FullBZero { r_plus, r_minus, theta_plus, theta_minus, k } => {
                positive(r_plus, "R₊")?;
                positive(r_minus, "R₋")?;
                check_k(k)?;
                let sigma = 0.5 * (theta_plus + theta_minus);
                let r3 = 2.0 * (r_plus * r_minus).sqrt();
                bp(polar(r_plus, theta_plus), polar(r_minus, theta_minus), r3 * polar(1.0, sigma) * k_phase(k))
            }
        };
        Ok(p)
    }

    /// The commutator each family is stated to give, written out from the
    /// family's own parameters (not from β).
    pub fn stated(&self) -> StatedCommutator {
        let z = C64::new(0.0, 0.0);
        match *self {
            Family::XPositiveHyperbolic { x, alpha, .. } => StatedCommutator { x, c_plus: z, b_zero: alpha == 0.0 },
            Family::XPositiveUpper { x, .. } => StatedCommutator { x, c_plus: z, b_zero: true },
            Family::XNegativeHyperbolic { x, alpha, .. } => StatedCommutator { x, c_plus: z, b_zero: alpha == 0.0 },
            Family::XNegativeLower { x, .. } => StatedCommutator { x, c_plus: z, b_zero: true },
            Family::RhoGeneric { r, theta_plus, theta_minus, r3, theta3 } => {
                let sigma = 0.5 * (theta_plus + theta_minus);
                let delta = 0.5 * (theta_plus - theta_minus);
                StatedCommutator {
                    x: 0.0,
                    c_plus: C64::new(0.0, 2.0 * r * r3 * (theta3 - sigma).sin()) * polar(1.0, -delta),
                    b_zero: false,
                }
            }
            Family::RhoBZero { r, theta_plus, theta_minus, k } => {
                let delta = 0.5 * (theta_plus - theta_minus);
                StatedCommutator {
                    x: 0.0,
                    c_plus: 4.0 * r * r * polar(1.0, -delta) * k_phase(k),
                    b_zero: true,
                }
            }
            Family::FullPlusOnly { r_plus, theta_plus, r3, theta3 } => StatedCommutator {
                x: -r_plus * r_plus,
                c_plus: polar(r3 * r_plus, theta3 - theta_plus),
                b_zero: false,
            },
            Family::FullMinusOnly { r_minus, theta_minus, r3, theta3 } => StatedCommutator {
                x: r_minus * r_minus,
                c_plus: -polar(r3 * r_minus, theta_minus - theta3),
                b_zero: false,
            },
            Family::FullGeneric { r_plus, r_minus, theta_plus, theta_minus, r3, theta3 } => {
                let sigma = 0.5 * (theta_plus + theta_minus);
                let delta = 0.5 * (theta_plus - theta_minus);
                let phi = theta3 - sigma;
                StatedCommutator {
                    x: r_minus * r_minus - r_plus * r_plus,
                    c_plus: r3 * polar(1.0, -delta) * (polar(r_plus, phi) - polar(r_minus, -phi)),
                    b_zero: false,
                }
            }
            Family::FullBZero { r_plus, r_minus, theta_plus, theta_minus, k } => {
                let delta = 0.5 * (theta_plus - theta_minus);
                let r3 = 2.0 * (r_plus * r_minus).sqrt();
                StatedCommutator {
                    x: r_minus * r_minus - r_plus * r_plus,
                    c_plus: r3 * (r_plus + r_minus) * polar(1.0, -delta) * k_phase(k),
                    b_zero: true,
                }
            }
        }
    }

    /// Scenario label the family belongs to.
    pub fn scenario_label(&self) -> &'static str {
        match self {
            Family::XPositiveHyperbolic { .. }
            | Family::XPositiveUpper { .. }
            | Family::XNegativeHyperbolic { .. }
            | Family::XNegativeLower { .. } => "ExtendedX",
            Family::RhoGeneric { .. } | Family::RhoBZero { .. } => "NonCanonicalRho",
            _ => "FullNonCanonical",
        }
    }
}

fn positive(v: f64, name: &str) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(VaesError::InvalidParams(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_k(k: u8) -> Result<()> {
    if k > 1 {
        return Err(VaesError::InvalidParams(format!("k must be 0 or 1, got {k}")));
    }
    Ok(())
}

/// Generators 𝕁± , 𝕁₃ with 𝔸 = a + ℬ₊𝕁₋, for the b = 0 families with
/// β₃ = 2√(R₊R₋) e^{i(σ + (k+½)π)}, σ = (θ₊+θ₋)/2 on principal arguments.
#[derive(Clone, Debug)]
pub struct TransformedGenerators {
    pub jp: CMatrix,
    pub jm: CMatrix,
    pub j3: CMatrix,
    pub b_plus: C64,
    /// b computed from the J₊, J₋, J₃ coefficients of 𝕁₃ (equals 1).
    pub b_transformed: C64,
    /// Unitary with 𝕁₃ T = T J₃.
    pub t: CMatrix,
}

pub fn transformed_generators(rep: Su2Rep, p: &BetaParams, k: u8) -> Result<TransformedGenerators> {
    check_k(k)?;
    let (rp, rm) = (p.beta_plus.norm(), p.beta_minus.norm());
    if rp == 0.0 || rm == 0.0 {
        return Err(VaesError::InvalidParams(
            "transformed generators need β₊ ≠ 0 and β₋ ≠ 0".into(),
        ));
    }
    let (tp, tm) = (p.beta_plus.arg(), p.beta_minus.arg());
    let sigma = 0.5 * (tp + tm);
    let delta = 0.5 * (tp - tm);
    let root = (rp * rm).sqrt();
    let kp = k_phase(k);
    let expected_b3 = 2.0 * root * polar(1.0, sigma) * kp;
    if (p.beta_3 - expected_b3).norm() > SCENARIO_TOL * p.spin_scale() {
        return Err(VaesError::InvalidParams(format!(
            "β₃ = {} is not 2√(R₊R₋)e^{{i(σ+(k+½)π)}} = {} for k = {k}",
            p.beta_3, expected_b3
        )));
    }
    let s = rp + rm;
    let g = generators(rep);
    let ed = polar(1.0, delta);
    let jm_t = {
        let t = &g.jm.scale(rp * ed) + &g.jp.scale(rm * ed.conj());
        (&t + &g.j3.scale(2.0 * root * kp)).scale(C64::new(1.0 / s, 0.0))
    };
    let jp_t = jm_t.adjoint();
    let alpha3 = C64::new((rp - rm) / s, 0.0);
    let alpha_on_jp = -(root / s) * ed.conj() * kp;
    let alpha_on_jm = -(root / s) * ed * kp.conj();
    let j3_t = {
        let t = &g.jp.scale(alpha_on_jp) + &g.jm.scale(alpha_on_jm);
        &g.j3.scale(alpha3) + &t
    };
    let b_transformed = crate::su2::principal_sqrt(4.0 * alpha_on_jp * alpha_on_jm + alpha3 * alpha3);
    let angle = (rm / rp).sqrt().atan() * if k == 0 { 1.0 } else { -1.0 };
    let gen = (&g.jp.scale(ed.conj()) + &g.jm.scale(ed)).scale(C64::new(0.0, angle));
    Ok(TransformedGenerators {
        jp: jp_t,
        jm: jm_t,
        j3: j3_t,
        b_plus: s * polar(1.0, sigma),
        b_transformed,
        t: expm(&gen)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn build_a_trivial() {
        let f = FockSpace::new(4, 1).unwrap();
        let rep = Su2Rep::new(1);
        let a = build_A(f, rep, &BetaParams::zero());
        let want = kron(&annihilator(f), &CMatrix::identity(2));
        assert_eq!(a.matrix().max_abs_diff(&want), 0.0);
    }

    #[test]
    fn lower_only_is_extended_negative() {
        let z = c64(0.0, 0.0);
        let r = commutator_report(&BetaParams::new(z, c64(1.0, 0.0), z, z));
        assert_eq!(r.scenario, Scenario::ExtendedX { x: -1.0 });
    }

    #[test]
    fn k_is_validated() {
        let fam = Family::RhoBZero { r: 1.0, theta_plus: 0.1, theta_minus: 0.2, k: 2 };
        assert!(fam.params().is_err());
    }
}
