//! Scalar algebra eigenstates: solutions of
//! (a + β₊J₋ + β₋J₊ + β₃J₃)ψ = βψ on the truncated |n⟩⊗|j,m⟩ space.

use crate::combin::{binomial, fact_ratio, iu};
use crate::error::{Result, VaesError};
use crate::fock::{coherent, creator, FockSpace};
use crate::linops::{vdot, CMatrix, C64};
use crate::su2::{classify, generators, t_matrix_jacobi, BetaParams, CaseTag, Su2Rep};
use crate::vaes::VectorState;

/// Default bound on the probability allowed on the guard levels.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-10;
/// Relative tolerance used when dispatching on the β zero pattern.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Amplitudes C[n, m] on |n⟩⊗|j,m⟩, stored n-major (index n·(2j+1) + m + j).
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentState {
    amps: Vec<C64>,
    fock: FockSpace,
    rep: Su2Rep,
    tail_mass: f64,
}

impl ComponentState {
    pub fn new(fock: FockSpace, rep: Su2Rep, amps: Vec<C64>) -> Result<Self> {
        let len = fock.dim() * rep.dim();
        if amps.len() != len {
            return Err(VaesError::Dimension(format!(
                "component needs {len} amplitudes, got {}",
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VaesError::InvalidParams("non-finite amplitude".into()));
        }
        Ok(Self::from_parts(fock, rep, amps))
    }

    fn from_parts(fock: FockSpace, rep: Su2Rep, amps: Vec<C64>) -> Self {
        let d = rep.dim();
        let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let tail: f64 = amps[fock.checked_dim() * d..].iter().map(|z| z.norm_sqr()).sum();
        let tail_mass = if total > 0.0 { tail / total } else { 0.0 };
        Self {
            amps,
            fock,
            rep,
            tail_mass,
        }
    }

    pub fn zeros(fock: FockSpace, rep: Su2Rep) -> Self {
        Self::from_parts(fock, rep, vec![C64::new(0.0, 0.0); fock.dim() * rep.dim()])
    }

    /// |f⟩ ⊗ |s⟩
    pub fn product(fock: FockSpace, rep: Su2Rep, fock_amps: &[C64], spin: &[C64]) -> Result<Self> {
        if fock_amps.len() != fock.dim() || spin.len() != rep.dim() {
            return Err(VaesError::Dimension("product state factor lengths".into()));
        }
        let mut amps = Vec::with_capacity(fock.dim() * rep.dim());
        for &f in fock_amps {
            amps.extend(spin.iter().map(|&s| f * s));
        }
        Self::new(fock, rep, amps)
    }

    #[inline]
    pub fn fock(&self) -> FockSpace {
        self.fock
    }
    #[inline]
    pub fn rep(&self) -> Su2Rep {
        self.rep
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
    /// C[n, i] with i the ascending-m spin index.
    pub fn amp(&self, n: usize, i: usize) -> C64 {
        self.amps[n * self.rep.dim() + i]
    }
    /// Fraction of ⟨ψ|ψ⟩ carried by the guard levels.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.fock != other.fock || self.rep != other.rep {
            return Err(VaesError::Dimension("components live on different spaces".into()));
        }
        Ok(())
    }

    /// Full operator on the N(2j+1)-dimensional tensor space.
    pub fn apply(&self, op: &CMatrix) -> Result<Self> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(VaesError::Dimension(format!(
                "operator {}x{} on state of length {}",
                op.rows(),
                op.cols(),
                self.dim()
            )));
        }
        Ok(Self::from_parts(self.fock, self.rep, op.matvec(&self.amps)))
    }

    /// op ⊗ I with op acting on the Fock factor.
    pub fn apply_fock(&self, op: &CMatrix) -> Self {
        let (n, d) = (self.fock.dim(), self.rep.dim());
        assert_eq!((op.rows(), op.cols()), (n, n), "Fock operator dimension");
        let mut out = vec![C64::new(0.0, 0.0); n * d];
        for r in 0..n {
            for k in 0..n {
                let c = op[(r, k)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d {
                    out[r * d + i] += c * self.amps[k * d + i];
                }
            }
        }
        Self::from_parts(self.fock, self.rep, out)
    }

    /// I ⊗ op with op acting on the spin factor.
    pub fn apply_spin(&self, op: &CMatrix) -> Self {
        let (n, d) = (self.fock.dim(), self.rep.dim());
        assert_eq!((op.rows(), op.cols()), (d, d), "spin operator dimension");
        let mut out = vec![C64::new(0.0, 0.0); n * d];
        for r in 0..n {
            let block = &self.amps[r * d..(r + 1) * d];
            for i in 0..d {
                out[r * d + i] = (0..d).map(|l| op[(i, l)] * block[l]).sum();
            }
        }
        Self::from_parts(self.fock, self.rep, out)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_space(other)?;
        Ok(vdot(&self.amps, &other.amps))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self::from_parts(self.fock, self.rep, self.amps.iter().map(|&z| z * c).collect())
    }

    /// self + c·other
    pub fn axpy(&self, c: C64, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(&x, &y)| x + c * y).collect();
        Ok(Self::from_parts(self.fock, self.rep, amps))
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(VaesError::InvalidParams("cannot normalize a zero state".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// Index of the largest-magnitude amplitude (first one on ties).
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        for (k, z) in self.amps.iter().enumerate() {
            if z.norm() > self.amps[best].norm() * (1.0 + 1e-12) {
                best = k;
            }
        }
        best
    }

    /// Multiplies by the phase that makes the largest amplitude positive real.
    pub fn phase_aligned(&self) -> Self {
        let z = self.amps[self.peak_index()];
        if z.norm() == 0.0 {
            return self.clone();
        }
        self.scaled(z.conj() / z.norm())
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }
}

/// φ̃_m(0), m = −j..j, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationConstants {
    phi0: Vec<C64>,
}

impl IntegrationConstants {
    pub fn new(phi0: Vec<C64>) -> Result<Self> {
        if phi0.is_empty() || phi0.iter().all(|z| z.norm() == 0.0) {
            return Err(VaesError::InvalidParams(
                "integration constants must not all vanish".into(),
            ));
        }
        if phi0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VaesError::InvalidParams("non-finite integration constant".into()));
        }
        Ok(Self { phi0 })
    }

    /// Single non-zero constant selecting basis state `index`.
    pub fn unit(rep: Su2Rep, index: usize) -> Self {
        let mut phi0 = vec![C64::new(0.0, 0.0); rep.dim()];
        phi0[index] = C64::new(1.0, 0.0);
        Self { phi0 }
    }

    pub fn values(&self) -> &[C64] {
        &self.phi0
    }

    fn check(&self, rep: Su2Rep) -> Result<()> {
        if self.phi0.len() != rep.dim() {
            return Err(VaesError::Dimension(format!(
                "{} integration constants for 2j+1 = {}",
                self.phi0.len(),
                rep.dim()
            )));
        }
        Ok(())
    }
}

fn basis_vector(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[i] = C64::new(1.0, 0.0);
    v
}

/// exp(c·a†⊗X)ψ for nilpotent X, summed until X kills the state.
fn exp_nilpotent(c: C64, x: &CMatrix, psi: ComponentState) -> ComponentState {
    let ad = creator(psi.fock());
    let mut total = psi.clone();
    let mut term = psi;
    for k in 1..=x.rows() {
        term = term.apply_spin(x).apply_fock(&ad).scaled(c / k as f64);
        if term.norm_sqr() == 0.0 {
            break;
        }
        total = total.axpy(C64::new(1.0, 0.0), &term).expect("same space");
    }
    total
}

/// The defining (un-normalized) basis states, one per m = −j..j:
///
/// * b ≠ 0: |β − mb⟩ ⊗ T|j,m⟩
/// * β₋ = β₃ = 0: exp(−β₊a†J₋)|β⟩|j,m⟩
/// * β₊ = β₃ = 0: exp(−β₋a†J₊)|β⟩|j,m⟩
/// * ϑ-case: exp(ϑJ₊) exp(−β₊a†J₋)|β⟩|j,m⟩, ϑ = β₃/(2β₊)
/// * all zero: |β⟩|j,m⟩
///
/// Coherent factors are normalized, so the b = 0 norms match the
/// closed-form constants below.
pub fn aes_basis_raw(f: FockSpace, rep: Su2Rep, p: &BetaParams) -> Result<Vec<ComponentState>> {
    let d = rep.dim();
    let g = generators(rep);
    let tag = classify(p, CLASSIFY_TOL);
    let ground = |i: usize| {
        ComponentState::product(f, rep, &coherent(p.beta, f).amplitudes, &basis_vector(d, i))
    };
    match tag {
        CaseTag::BNonzeroNormal | CaseTag::BNonzeroDiagonalizable => {
            let t = t_matrix_jacobi(rep, p)?;
            (0..d)
                .map(|i| {
                    let z = p.beta - t.b * rep.m(i);
                    ComponentState::product(f, rep, &coherent(z, f).amplitudes, &t.matrix.column(i))
                })
                .collect()
        }
        CaseTag::BZeroLowerTriangular => (0..d)
            .map(|i| Ok(exp_nilpotent(-p.beta_plus, &g.jm, ground(i)?)))
            .collect(),
        CaseTag::BZeroUpperTriangular => (0..d)
            .map(|i| Ok(exp_nilpotent(-p.beta_minus, &g.jp, ground(i)?)))
            .collect(),
        CaseTag::BZeroFull => {
            let theta = p.theta_param();
            let rot = crate::linops::expm(&g.jp.scale(theta))?;
            (0..d)
                .map(|i| Ok(exp_nilpotent(-p.beta_plus, &g.jm, ground(i)?).apply_spin(&rot)))
                .collect()
        }
        CaseTag::AllZero => (0..d).map(ground).collect(),
    }
}

pub(crate) fn check_tail(state: &ComponentState, bound: f64, context: &str) -> Result<()> {
    if state.tail_mass() > bound {
        return Err(VaesError::Tail {
            tail: state.tail_mass(),
            bound,
            context: context.to_string(),
        });
    }
    Ok(())
}

/// The 2j+1 normalized, linearly independent eigenstates of
/// a + β₊J₋ + β₋J₊ + β₃J₃ with eigenvalue β, ordered by m. Each is phased
/// so its largest amplitude is positive real.
pub fn aes_basis(f: FockSpace, rep: Su2Rep, p: &BetaParams) -> Result<Vec<ComponentState>> {
    aes_basis_with_bound(f, rep, p, DEFAULT_TAIL_BOUND)
}

pub fn aes_basis_with_bound(
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    tail_bound: f64,
) -> Result<Vec<ComponentState>> {
    aes_basis_raw(f, rep, p)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let s = s.normalized()?.phase_aligned();
            check_tail(&s, tail_bound, &format!("basis state m = {}", rep.m(i)))?;
            Ok(s)
        })
        .collect()
}

fn superpose(basis: &[ComponentState], c: &IntegrationConstants) -> Result<ComponentState> {
    let mut acc = ComponentState::zeros(basis[0].fock(), basis[0].rep());
    for (s, &w) in basis.iter().zip(c.values()) {
        if w != C64::new(0.0, 0.0) {
            acc = acc.axpy(w, s)?;
        }
    }
    Ok(acc)
}

/// Normalized Σ_m φ̃_m(0)|ψ⟩_m over the normalized basis.
pub fn aes_general(
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    c: &IntegrationConstants,
) -> Result<ComponentState> {
    c.check(rep)?;
    let s = superpose(&aes_basis(f, rep, p)?, c)?;
    let s = s.normalized()?;
    check_tail(&s, DEFAULT_TAIL_BOUND, "general solution")?;
    Ok(s)
}

/// Σ_m φ̃_m(0)ψ_m over the defining (un-normalized) basis; not normalized.
pub fn aes_general_raw(
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    c: &IntegrationConstants,
) -> Result<ComponentState> {
    c.check(rep)?;
    superpose(&aes_basis_raw(f, rep, p)?, c)
}

fn require_case(p: &BetaParams, want: CaseTag) -> Result<()> {
    let got = classify(p, CLASSIFY_TOL);
    if got != want {
        return Err(VaesError::InvalidParams(format!(
            "closed form needs {want}, parameters are {got}"
        )));
    }
    Ok(())
}

/// Norm bracket of the β₋ = β₃ = 0 states,
/// Σ_n (j+n−m)!/(j+m−n)! |β₊|²ⁿ/n! Σ_k C(n,k)|β|²ᵏ/k!.
pub fn lower_norm_bracket(rep: Su2Rep, p: &BetaParams, m_index: usize) -> f64 {
    let j = rep.j();
    let m = rep.m(m_index);
    let (bp2, b2) = (p.beta_plus.norm_sqr(), p.beta.norm_sqr());
    (0..=iu(j + m))
        .map(|n| {
            let inner: f64 = (0..=n)
                .map(|k| binomial(n, k) * b2.powi(k as i32) / fact_ratio(&[k], &[]))
                .sum();
            fact_ratio(&[iu(j - m) + n], &[iu(j + m) - n, n]) * bp2.powi(n as i32) * inner
        })
        .sum()
}

/// Closed-form overlap ⟨ψ_ℓ|ψ_m⟩ of the normalized β₋ = β₃ = 0 states.
pub fn lower_overlap(rep: Su2Rep, p: &BetaParams, l_index: usize, m_index: usize) -> Result<C64> {
    require_case(p, CaseTag::BZeroLowerTriangular)?;
    if l_index > m_index {
        return Ok(lower_overlap(rep, p, m_index, l_index)?.conj());
    }
    let j = rep.j();
    let m = rep.m(m_index);
    let gap = (m_index - l_index) as u64;
    let (bp2, b2) = (p.beta_plus.norm_sqr(), p.beta.norm_sqr());
    let mut num = 0.0;
    for n in gap..=iu(j + m) {
        let q = n - gap; // n + ℓ − m
        let inner: f64 = (0..=q)
            .map(|k| binomial(q, k) * b2.powi(k as i32) / fact_ratio(&[gap + k], &[]))
            .sum();
        num += fact_ratio(&[iu(j - m) + n], &[iu(j + m) - n, q]) * bp2.powi(q as i32) * inner;
    }
    let pref = (-p.beta.conj() * p.beta_plus).powi(gap as i32);
    Ok(pref * num
        / (lower_norm_bracket(rep, p, l_index) * lower_norm_bracket(rep, p, m_index)).sqrt())
}

/// Closed-form ⟨ψ|ψ⟩ of the un-normalized ϑ-case state
/// exp(ϑJ₊) exp(−β₊a†J₋)|β⟩|j,m⟩ (|β⟩ normalized), for every m.
pub fn normalization_b0_full(rep: Su2Rep, p: &BetaParams, beta: C64) -> Result<Vec<f64>> {
    require_case(p, CaseTag::BZeroFull)?;
    let j = rep.j();
    let th = p.theta_param();
    let th2 = th.norm_sqr();
    let bp = p.beta_plus;
    let out = (0..rep.dim())
        .map(|im| {
            let m = rep.m(im);
            let top = iu(j + m);
            let jm = iu(j - m);
            let mut tot = C64::new(0.0, 0.0);
            for n in 0..=top {
                for nt in 0..=top {
                    let sign = if (nt + n) % 2 == 0 { 1.0 } else { -1.0 };
                    let pre = sign
                        * fact_ratio(&[jm + n, jm + nt], &[top - n, top - nt, nt, n])
                        * bp.conj().powi(nt as i32)
                        * bp.powi(n as i32);
                    let mut s1 = C64::new(0.0, 0.0);
                    for l in 0..=(jm + n) {
                        // ℓ + ñ − n must be non-negative
                        let Some(shift) = (l + nt).checked_sub(n) else { continue };
                        let f = fact_ratio(&[top - n + l], &[jm + n - l, shift, l]);
                        s1 += th.conj().powi(nt as i32 - n as i32) * (f * th2.powi(l as i32));
                    }
                    let s2: C64 = (0..=nt.min(n))
                        .map(|k| {
                            binomial(nt, k)
                                * binomial(n, k)
                                * fact_ratio(&[k], &[])
                                * beta.powi((nt - k) as i32)
                                * beta.conj().powi((n - k) as i32)
                        })
                        .sum();
                    tot += pre * s1 * s2;
                }
            }
            tot.re * fact_ratio(&[top], &[jm])
        })
        .collect();
    Ok(out)
}

/// The K = 2 eigenstate of a with the defective matrix eigenvalue
/// [[β, −β₊], [0, β]]:
///
/// ψ₁ = e^{βa†}[φ¹ − β₊a† φ²]|0⟩,  ψ₂ = e^{βa†}φ²|0⟩
///
/// with φ¹, φ² spin vectors given by integration constants. The returned
/// stack is normalized; `norm_constant` is the squared norm of the
/// un-normalized display.
pub fn supercoherent_pair(
    f: FockSpace,
    rep: Su2Rep,
    beta: C64,
    beta_plus: C64,
    c1: &IntegrationConstants,
    c2: &IntegrationConstants,
) -> Result<VectorState> {
    if beta_plus.norm() == 0.0 {
        return Err(VaesError::InvalidParams("supercoherent pair needs β₊ ≠ 0".into()));
    }
    c1.check(rep)?;
    c2.check(rep)?;
    let coh = coherent(beta, f);
    // exp(βa†)|0⟩ = e^{|β|²/2}|β⟩; the truncated |β⟩ is renormalized.
    let scale = (0.5 * beta.norm_sqr()).exp() * (1.0 - coh.lost_mass).sqrt();
    let base1 = ComponentState::product(f, rep, &coh.amplitudes, c1.values())?;
    let base2 = ComponentState::product(f, rep, &coh.amplitudes, c2.values())?;
    let shifted = base2.apply_fock(&creator(f)).scaled(-beta_plus);
    let psi1 = base1.axpy(C64::new(1.0, 0.0), &shifted)?.scaled(C64::new(scale, 0.0));
    let psi2 = base2.scaled(C64::new(scale, 0.0));
    VectorState::from_unnormalized(vec![psi1, psi2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn apply_fock_and_spin_commute() {
        let f = FockSpace::new(6, 1).unwrap();
        let rep = Su2Rep::new(2);
        let amps = (0..18).map(|k| c64(k as f64 * 0.1, -(k as f64) * 0.05)).collect();
        let s = ComponentState::new(f, rep, amps).unwrap();
        let a = crate::fock::annihilator(f);
        let g = generators(rep);
        let x = s.apply_fock(&a).apply_spin(&g.jp);
        let y = s.apply_spin(&g.jp).apply_fock(&a);
        let full = s.apply(&crate::linops::kron(&a, &g.jp)).unwrap();
        for k in 0..18 {
            assert!((x.amplitudes()[k] - y.amplitudes()[k]).norm() < 1e-14);
            assert!((x.amplitudes()[k] - full.amplitudes()[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn constants_validation() {
        assert!(IntegrationConstants::new(vec![c64(0.0, 0.0); 3]).is_err());
        assert!(IntegrationConstants::new(vec![]).is_err());
        assert!(IntegrationConstants::new(vec![c64(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn lowest_weight_lower_case_is_product() {
        let f = FockSpace::default();
        let rep = Su2Rep::new(2);
        let z = c64(0.0, 0.0);
        let p = BetaParams::new(c64(0.4, 0.2), c64(0.8, 0.0), z, z);
        let raw = aes_basis_raw(f, rep, &p).unwrap();
        let coh = coherent(p.beta, f);
        for n in 0..f.dim() {
            assert!((raw[0].amp(n, 0) - coh.amplitudes[n]).norm() < 1e-15);
            assert_eq!(raw[0].amp(n, 1), z);
        }
    }
}
