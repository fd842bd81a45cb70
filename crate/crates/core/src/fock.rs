//! Truncated Fock space for the h(1) sector.
//!
//! The top `guard` levels of every truncation are treated as a buffer: they
//! are excluded from residual checks, and the probability that lands there is
//! reported as the tail mass.

use crate::aes::ComponentState;
use crate::error::{Result, VaesError};
use crate::linops::{expm, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
    guard: usize,
}

impl FockSpace {
    pub fn new(dim: usize, guard: usize) -> Result<Self> {
        if dim < 2 {
            return Err(VaesError::InvalidParams(format!(
                "Fock dimension must be at least 2, got {dim}"
            )));
        }
        if guard >= dim {
            return Err(VaesError::InvalidParams(format!(
                "guard {guard} must be below the Fock dimension {dim}"
            )));
        }
        Ok(Self { dim, guard })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn guard(&self) -> usize {
        self.guard
    }
    /// Number of levels that take part in residual checks.
    #[inline]
    pub fn checked_dim(&self) -> usize {
        self.dim - self.guard
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self { dim: 64, guard: 8 }
    }
}

/// a with a[n−1, n] = √n.
pub fn annihilator(f: FockSpace) -> CMatrix {
    let n = f.dim;
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn creator(f: FockSpace) -> CMatrix {
    annihilator(f).adjoint()
}

#[derive(Clone, Debug)]
pub struct CoherentState {
    pub amplitudes: Vec<C64>,
    /// Probability on the guard levels after renormalization.
    pub tail_mass: f64,
    /// Exact probability of the untruncated state beyond level N−1.
    pub lost_mass: f64,
}

/// |z⟩ truncated to N levels and renormalized.
pub fn coherent(z: C64, f: FockSpace) -> CoherentState {
    let mut amps = Vec::with_capacity(f.dim);
    let mut c = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..f.dim {
        c = c * z / (n as f64).sqrt();
        amps.push(c);
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let nrm = kept.sqrt();
    amps.iter_mut().for_each(|a| *a /= nrm);
    let tail_mass = amps[f.checked_dim()..].iter().map(|a| a.norm_sqr()).sum();
    CoherentState {
        amplitudes: amps,
        tail_mass,
        lost_mass: (1.0 - kept).max(0.0),
    }
}

/// D(z) = exp(z a† − z* a) on the truncated space.
pub fn displacement(z: C64, f: FockSpace) -> Result<CMatrix> {
    let a = annihilator(f);
    let gen = &a.adjoint().scale(z) - &a.scale(z.conj());
    expm(&gen)
}

/// S(ξ) = exp(−½(ξ a†² − ξ* a²)), used only to cross-check the lift.
pub fn squeeze_unitary(xi: C64, f: FockSpace) -> Result<CMatrix> {
    let a = annihilator(f);
    let a2 = a.matmul(&a);
    let gen = (&a2.adjoint().scale(xi) - &a2.scale(xi.conj())).scale(C64::new(-0.5, 0.0));
    expm(&gen)
}

/// Above this ‖α₊‖ the lift is accepted but truncation error grows quickly.
pub const SQUEEZE_WARN: f64 = 0.5;

/// Maps a solution of (a + β·J)ψ = βψ to a solution of
/// (a + α₊a† + β·J)Φ = βΦ through Φ = exp(−½α₊a†²)ψ (not normalized).
pub fn squeeze_lift(alpha_plus: C64, psi: &ComponentState) -> Result<ComponentState> {
    let r = alpha_plus.norm();
    if r >= 1.0 {
        return Err(VaesError::InvalidParams(format!(
            "squeeze lift needs |α₊| < 1, got {r}"
        )));
    }
    if r > SQUEEZE_WARN {
        log::warn!("squeeze lift with |α₊| = {r:.3}: truncation error grows above {SQUEEZE_WARN}");
    }
    let f = psi.fock();
    if alpha_plus == C64::new(0.0, 0.0) {
        return Ok(psi.clone());
    }
    let ad = creator(f);
    let gen = ad.matmul(&ad).scale(-0.5 * alpha_plus);
    let s = expm(&gen)?;
    Ok(psi.apply_fock(&s))
}
