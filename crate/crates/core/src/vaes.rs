//! Vector algebra eigenstates: K-component stacks Ψ with
//! 𝔸ψ_u = Σ_s M̃_us ψ_s for a K×K eigenvalue matrix M̃.
//!
//! Stacked vectors use the index s·N(2j+1) + n(2j+1) + i, so operators on
//! the stack are kron(K-matrix, tensor-operator).

use rayon::prelude::*;

use crate::aes::{
    aes_general, aes_general_raw, supercoherent_pair, ComponentState, IntegrationConstants,
    CLASSIFY_TOL,
};
use crate::algebra::{build_A, commutator_report, Scenario, TensorOperator};
use crate::error::{Result, VaesError};
use crate::fock::{annihilator, coherent, creator, FockSpace};
use crate::linops::{
    eig, expm, is_normal, kron, matrix_function, vdot, CMatrix, DefectReport, Diagonalization,
    EigOutcome, C64, NORMAL_TOL,
};
use crate::su2::{classify, generators, t_matrix_jacobi, BetaParams, CaseTag, Su2Rep};
use crate::verify::{eigen_residual, Tolerances};

/// Largest K·N(2j+1) for which the full displacement exponential is built.
pub const MAX_DISPLACEMENT_DIM: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Normal,
    Diagonalizable,
    Defective,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Normal => "Normal",
            Classification::Diagonalizable => "Diagonalizable",
            Classification::Defective => "Defective",
        }
    }
}

/// M̃ with its classification and, when it exists, its diagonalization
/// (eigenvalues λ_s in ascending real, then imaginary, order).
#[derive(Clone, Debug)]
pub struct EigenvalueMatrix {
    m: CMatrix,
    classification: Classification,
    diag: Option<Diagonalization>,
    defect: Option<DefectReport>,
}

impl EigenvalueMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(VaesError::NotSquare(m.rows(), m.cols()));
        }
        if !m.is_finite() {
            return Err(VaesError::InvalidParams("non-finite eigenvalue matrix".into()));
        }
        let normal = is_normal(&m, NORMAL_TOL)?;
        let (classification, diag, defect) = match eig(&m)? {
            EigOutcome::Diagonalizable(d) => {
                let c = if normal && d.is_unitary {
                    Classification::Normal
                } else {
                    Classification::Diagonalizable
                };
                (c, Some(d), None)
            }
            EigOutcome::Defective(r) => (Classification::Defective, None, Some(r)),
        };
        Ok(Self {
            m,
            classification,
            diag,
            defect,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
    pub fn k(&self) -> usize {
        self.m.rows()
    }
    pub fn classification(&self) -> Classification {
        self.classification
    }
    pub fn defect(&self) -> Option<&DefectReport> {
        self.defect.as_ref()
    }

    pub fn diagonalization(&self) -> Result<&Diagonalization> {
        match (&self.diag, &self.defect) {
            (Some(d), _) => Ok(d),
            (None, Some(r)) => Err(VaesError::Defective {
                eigenvalue: format!("{}", r.eigenvalue),
                algebraic: r.algebraic,
                geometric: r.geometric,
            }),
            (None, None) => unreachable!("classification always stores one outcome"),
        }
    }

    pub fn eigenvalues(&self) -> Result<&[C64]> {
        Ok(&self.diagonalization()?.diagonal)
    }

    fn require_normal(&self, what: &str) -> Result<&Diagonalization> {
        if self.classification != Classification::Normal {
            log::debug!("{what} rejected a non-normal eigenvalue matrix");
            return Err(VaesError::NotNormal(crate::linops::normality_defect(&self.m)?));
        }
        self.diagonalization()
    }
}

/// K components sharing (N, j); normalized over the whole stack.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorState {
    components: Vec<ComponentState>,
    /// Squared norm of the un-normalized construction.
    pub norm_constant: f64,
}

impl VectorState {
    pub fn new(components: Vec<ComponentState>, norm_constant: f64) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| VaesError::InvalidParams("a vector state needs K ≥ 1".into()))?;
        if components
            .iter()
            .any(|c| c.fock() != first.fock() || c.rep() != first.rep())
        {
            return Err(VaesError::Dimension("components live on different spaces".into()));
        }
        Ok(Self {
            components,
            norm_constant,
        })
    }

    /// Normalizes over the stack and records the squared norm.
    pub fn from_unnormalized(components: Vec<ComponentState>) -> Result<Self> {
        let raw = Self::new(components, 1.0)?;
        let n2 = raw.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(VaesError::InvalidParams("cannot normalize a zero vector state".into()));
        }
        let s = C64::new(1.0 / n2.sqrt(), 0.0);
        Self::new(raw.components.iter().map(|c| c.scaled(s)).collect(), n2)
    }

    pub fn from_stacked(f: FockSpace, rep: Su2Rep, k: usize, v: &[C64], norm_constant: f64) -> Result<Self> {
        let len = f.dim() * rep.dim();
        if v.len() != k * len {
            return Err(VaesError::Dimension(format!(
                "stacked vector of length {} for K = {k}",
                v.len()
            )));
        }
        let comps = v
            .chunks(len)
            .map(|c| ComponentState::new(f, rep, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps, norm_constant)
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }
    pub fn components(&self) -> &[ComponentState] {
        &self.components
    }
    pub fn fock(&self) -> FockSpace {
        self.components[0].fock()
    }
    pub fn rep(&self) -> Su2Rep {
        self.components[0].rep()
    }
    pub fn stacked(&self) -> Vec<C64> {
        self.components
            .iter()
            .flat_map(|c| c.amplitudes().iter().copied())
            .collect()
    }
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }
    /// Fraction of the stack norm on the guard levels.
    pub fn tail_mass(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| c.tail_mass() * c.norm_sqr())
            .sum::<f64>()
            / total
    }
    /// ⟨self|other⟩ summed over components.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.k() != other.k() {
            return Err(VaesError::Dimension("different K".into()));
        }
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }
    /// |⟨a|b⟩| / (‖a‖‖b‖)
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm() / (self.norm_sqr() * other.norm_sqr()).sqrt())
    }
    /// Global phase making the largest amplitude of component 1 positive real.
    pub fn phase_aligned(&self) -> Self {
        let c0 = &self.components[0];
        let z = c0.amplitudes()[c0.peak_index()];
        if z.norm() == 0.0 {
            return self.clone();
        }
        let ph = z.conj() / z.norm();
        Self {
            components: self.components.iter().map(|c| c.scaled(ph)).collect(),
            norm_constant: self.norm_constant,
        }
    }
    /// Largest |Δ amplitude| after phase alignment of both states.
    pub fn max_abs_diff_aligned(&self, other: &Self) -> Result<f64> {
        if self.k() != other.k() {
            return Err(VaesError::Dimension("different K".into()));
        }
        let (a, b) = (self.phase_aligned().stacked(), other.phase_aligned().stacked());
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    }
}

// ---------------------------------------------------------------------------
// Stack helpers

struct Dims {
    k: usize,
    n: usize,
    d: usize,
}

impl Dims {
    fn of(k: usize, f: FockSpace, rep: Su2Rep) -> Self {
        Self {
            k,
            n: f.dim(),
            d: rep.dim(),
        }
    }
    fn idx(&self, s: usize, n: usize, i: usize) -> usize {
        (s * self.n + n) * self.d + i
    }
}

/// (op ⊗ I_d) v with op on the (s, n) index pair, size KN×KN.
fn apply_kn(op: &CMatrix, v: &[C64], dm: &Dims) -> Vec<C64> {
    let kn = dm.k * dm.n;
    let d = dm.d;
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    out.par_chunks_mut(d).enumerate().for_each(|(row, chunk)| {
        for col in 0..kn {
            let c = op[(row, col)];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..d {
                chunk[i] += c * v[col * d + i];
            }
        }
    });
    out
}

/// Operator on the (s, i) pair, size Kd×Kd (index s·d + i), identity on n.
fn apply_kd(op: &CMatrix, v: &[C64], dm: &Dims) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for s in 0..dm.k {
        for i in 0..dm.d {
            let row = s * dm.d + i;
            for s2 in 0..dm.k {
                for i2 in 0..dm.d {
                    let c = op[(row, s2 * dm.d + i2)];
                    if c == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for n in 0..dm.n {
                        out[dm.idx(s, n, i)] += c * v[dm.idx(s2, n, i2)];
                    }
                }
            }
        }
    }
    out
}

/// D(M̃) = exp(M̃⊗a† − M̃†⊗a) on the KN space.
pub fn matrix_displacement(m: &CMatrix, f: FockSpace) -> Result<CMatrix> {
    let a = annihilator(f);
    let gen = &kron(m, &a.adjoint()) - &kron(&m.adjoint(), &a);
    expm(&gen)
}

/// e^{λa†}|0⟩ truncated (not normalized).
fn exp_creation_vacuum(lambda: C64, f: FockSpace) -> Vec<C64> {
    let mut out = Vec::with_capacity(f.dim());
    let mut c = C64::new(1.0, 0.0);
    out.push(c);
    for n in 1..f.dim() {
        c = c * lambda / (n as f64).sqrt();
        out.push(c);
    }
    out
}

fn unit(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn constants_or_default(
    rep: Su2Rep,
    k: usize,
    c: Option<&[IntegrationConstants]>,
) -> Result<Vec<IntegrationConstants>> {
    match c {
        Some(c) => {
            if c.len() != k {
                return Err(VaesError::Dimension(format!(
                    "{} constant sets for K = {k}",
                    c.len()
                )));
            }
            Ok(c.to_vec())
        }
        None => Ok((0..k)
            .map(|s| IntegrationConstants::unit(rep, s % rep.dim()))
            .collect()),
    }
}

/// a Ψ = M̃ Ψ via Ψ = P (e^{λ_s a†}|0⟩ ⊗ χ_s)_s.
///
/// χ_s are the spin vectors given by the integration constants (default
/// |j, −j + (s mod 2j+1)⟩). A defective M̃ of the form [[β, −β₊], [0, β]]
/// is routed to the supercoherent pair; other defective matrices are
/// rejected. `norm_constant` is the squared norm of the construction.
pub fn solve_annihilator(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    c: Option<&[IntegrationConstants]>,
) -> Result<VectorState> {
    let k = mtilde.k();
    let consts = constants_or_default(rep, k, c)?;
    for cs in &consts {
        if cs.values().len() != rep.dim() {
            return Err(VaesError::Dimension("integration constants length ≠ 2j+1".into()));
        }
    }
    if mtilde.classification() == Classification::Defective {
        let m = mtilde.matrix();
        let zero = C64::new(0.0, 0.0);
        let scale = m.max_abs();
        if k == 2 && m[(1, 0)] == zero && (m[(0, 0)] - m[(1, 1)]).norm() <= 1e-12 * scale {
            return supercoherent_pair(f, rep, m[(0, 0)], -m[(0, 1)], &consts[0], &consts[1]);
        }
        let d = mtilde.defect().expect("defective matrices carry a report");
        return Err(VaesError::Unsupported(format!(
            "defective eigenvalue matrix (eigenvalue {}, algebraic {}, geometric {}) outside the 2x2 upper-triangular family",
            d.eigenvalue, d.algebraic, d.geometric
        )));
    }
    let diag = mtilde.diagonalization()?;
    let inner: Vec<ComponentState> = (0..k)
        .map(|s| {
            ComponentState::product(f, rep, &exp_creation_vacuum(diag.diagonal[s], f), consts[s].values())
        })
        .collect::<Result<_>>()?;
    mix(&diag.passing, &inner)
}

/// ψ_u = Σ_s P_us φ_s
fn mix(p: &CMatrix, inner: &[ComponentState]) -> Result<VectorState> {
    let comps = (0..p.rows())
        .map(|u| {
            let mut acc = ComponentState::zeros(inner[0].fock(), inner[0].rep());
            for (s, phi) in inner.iter().enumerate() {
                if p[(u, s)] != C64::new(0.0, 0.0) {
                    acc = acc.axpy(p[(u, s)], phi)?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorState::from_unnormalized(comps)
}

/// e^{M a†} applied to the stack (|0⟩⊗χ_s)_s:
/// ψ_u = Σ_n Σ_s (Mⁿ)_us /√n! |n⟩⊗χ_s. Valid for any M (no diagonalization).
pub fn exp_creation_series(m: &CMatrix, f: FockSpace, rep: Su2Rep, chi: &[Vec<C64>]) -> Result<VectorState> {
    let k = m.rows();
    if !m.is_square() || chi.len() != k || chi.iter().any(|c| c.len() != rep.dim()) {
        return Err(VaesError::Dimension("series ground does not match M".into()));
    }
    let d = rep.dim();
    let mut comps = vec![vec![C64::new(0.0, 0.0); f.dim() * d]; k];
    let mut power = CMatrix::identity(k);
    let mut inv_sqrt_fact = 1.0;
    for n in 0..f.dim() {
        if n > 0 {
            power = power.matmul(m);
            inv_sqrt_fact /= (n as f64).sqrt();
        }
        for (u, comp) in comps.iter_mut().enumerate() {
            for (s, ch) in chi.iter().enumerate() {
                let w = power[(u, s)] * inv_sqrt_fact;
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d {
                    comp[n * d + i] += w * ch[i];
                }
            }
        }
    }
    let comps = comps
        .into_iter()
        .map(|a| ComponentState::new(f, rep, a))
        .collect::<Result<Vec<_>>>()?;
    VectorState::from_unnormalized(comps)
}

/// Second ground choice: Σ_n M̃ⁿ/√n! (|n⟩⊗|j, m_s⟩)_s.
pub fn solve_annihilator_series(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    m_list: &[f64],
) -> Result<VectorState> {
    let chi = spin_stack(rep, m_list, mtilde.k())?;
    exp_creation_series(mtilde.matrix(), f, rep, &chi)
}

fn spin_stack(rep: Su2Rep, m_list: &[f64], k: usize) -> Result<Vec<Vec<C64>>> {
    if m_list.len() != k {
        return Err(VaesError::Dimension(format!("{} m values for K = {k}", m_list.len())));
    }
    m_list
        .iter()
        .map(|&m| {
            rep.index_of(m)
                .map(|i| unit(rep.dim(), i))
                .ok_or_else(|| VaesError::InvalidParams(format!("m = {m} not in the j = {} multiplet", rep.j())))
        })
        .collect()
}

/// 𝒩 = ⟨Ψ(0)|exp(M̃M̃†)⊗I|Ψ(0)⟩ for a ground stack Ψ(0).
pub fn norm_constant_series(mtilde: &EigenvalueMatrix, ground: &VectorState) -> Result<f64> {
    mtilde.require_normal("norm_constant_series")?;
    let k = mtilde.k();
    if ground.k() != k {
        return Err(VaesError::Dimension("ground stack size differs from K".into()));
    }
    let m = mtilde.matrix();
    let e = matrix_function(&m.matmul(&m.adjoint()), |z| z.exp())?;
    let comps = ground.components();
    let mut tot = C64::new(0.0, 0.0);
    for u in 0..k {
        for s in 0..k {
            tot += e[(u, s)] * comps[u].inner(&comps[s])?;
        }
    }
    Ok(tot.re)
}

fn check_spin_case(p: &BetaParams) -> Result<CaseTag> {
    Ok(classify(p, CLASSIFY_TOL))
}

/// 𝔸Ψ = M̃Ψ through ψ_u = Σ_s P_us ψ̃_s, where ψ̃_s is the normalized
/// scalar solution with β replaced by λ_s and constants c_s.
pub fn solve_general(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    c: Option<&[IntegrationConstants]>,
) -> Result<VectorState> {
    solve_general_impl(mtilde, f, rep, p, c, false)
}

/// As [`solve_general`] but over the defining (un-normalized) scalar basis,
/// so constants can be matched against closed-form constructions.
pub fn solve_general_raw(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    c: Option<&[IntegrationConstants]>,
) -> Result<VectorState> {
    solve_general_impl(mtilde, f, rep, p, c, true)
}

fn solve_general_impl(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    c: Option<&[IntegrationConstants]>,
    raw: bool,
) -> Result<VectorState> {
    check_spin_case(p)?;
    let diag = mtilde.diagonalization()?;
    let k = mtilde.k();
    let consts = constants_or_default(rep, k, c)?;
    let inner: Vec<ComponentState> = (0..k)
        .into_par_iter()
        .map(|s| {
            let ps = p.with_beta(diag.diagonal[s]);
            if raw {
                aes_general_raw(f, rep, &ps, &consts[s])
            } else {
                aes_general(f, rep, &ps, &consts[s])
            }
        })
        .collect::<Result<_>>()?;
    mix(&diag.passing, &inner)
}

fn require_canonical(p: &BetaParams) -> Result<()> {
    let r = commutator_report(p);
    if r.scenario != Scenario::Canonical {
        return Err(VaesError::InvalidParams(format!(
            "needs [A, A†] = I, parameters give {}",
            r.scenario.label()
        )));
    }
    Ok(())
}

/// T and b for the b ≠ 0 constructions; the all-zero case gives T = I, b = 0.
fn t_and_b(rep: Su2Rep, p: &BetaParams) -> Result<(CMatrix, C64)> {
    if p.spin_scale() == 0.0 {
        return Ok((CMatrix::identity(rep.dim()), C64::new(0.0, 0.0)));
    }
    match classify(p, CLASSIFY_TOL) {
        CaseTag::BNonzeroNormal | CaseTag::BNonzeroDiagonalizable => {
            let t = t_matrix_jacobi(rep, p)?;
            Ok((t.matrix, t.b))
        }
        other => Err(VaesError::InvalidParams(format!("needs b ≠ 0, parameters are {other}"))),
    }
}

/// Ground stack G_r = |−m_r b⟩ ⊗ T|j, m_r⟩, each annihilated by 𝔸.
pub fn canonical_ground(f: FockSpace, rep: Su2Rep, p: &BetaParams, m_list: &[f64]) -> Result<VectorState> {
    let (t, b) = t_and_b(rep, p)?;
    let comps = m_list
        .iter()
        .map(|&m| {
            let i = rep
                .index_of(m)
                .ok_or_else(|| VaesError::InvalidParams(format!("m = {m} not in the multiplet")))?;
            ComponentState::product(f, rep, &coherent(-b * m, f).amplitudes, &t.column(i))
        })
        .collect::<Result<Vec<_>>>()?;
    VectorState::from_unnormalized(comps)
}

/// exp[M̃⊗𝔸† − M̃†⊗𝔸] applied to the ground stack |−m_r b⟩⊗T|j,m_r⟩ for a
/// canonical 𝔸 ([𝔸,𝔸†] = I). Builds the full K·N(2j+1) exponential, so it
/// is limited to [`MAX_DISPLACEMENT_DIM`].
pub fn vcs_displacement_form(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    m_list: &[f64],
) -> Result<VectorState> {
    mtilde.require_normal("vcs_displacement_form")?;
    require_canonical(p)?;
    let k = mtilde.k();
    let dim = k * f.dim() * rep.dim();
    if dim > MAX_DISPLACEMENT_DIM {
        return Err(VaesError::Unsupported(format!(
            "displacement exponential of dimension {dim} exceeds {MAX_DISPLACEMENT_DIM}; use the factored form"
        )));
    }
    spin_stack(rep, m_list, k)?;
    let ground = canonical_ground(f, rep, p, m_list)?;
    let a = build_A(f, rep, p);
    let m = mtilde.matrix();
    let gen = &kron(m, &a.matrix().adjoint()) - &kron(&m.adjoint(), a.matrix());
    let v = expm(&gen)?.matvec(&ground.stacked());
    let raw = VectorState::from_stacked(f, rep, k, &v, 1.0)?;
    VectorState::from_unnormalized(raw.components().to_vec())
}

/// The same state as [`vcs_displacement_form`] built from scalar solutions:
/// U · (Σ_r U†_sr e^{½m_r(λ_s b* − λ_s* b)} |λ_s − m_r b⟩⊗T|j,m_r⟩)_s.
pub fn vcs_displacement_factored(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    m_list: &[f64],
) -> Result<VectorState> {
    let diag = mtilde.require_normal("vcs_displacement_factored")?;
    require_canonical(p)?;
    let (_, b) = t_and_b(rep, p)?;
    let consts = displaced_constants(diag, rep, m_list, |lam, m| {
        (0.5 * m * (lam * b.conj() - lam.conj() * b)).exp()
    })?;
    solve_general_raw(mtilde, f, rep, p, Some(&consts))
}

/// Constants c_s[m_r] = Σ_r U†_sr w(λ_s, m_r).
fn displaced_constants(
    diag: &Diagonalization,
    rep: Su2Rep,
    m_list: &[f64],
    w: impl Fn(C64, f64) -> C64,
) -> Result<Vec<IntegrationConstants>> {
    let k = diag.diagonal.len();
    spin_stack(rep, m_list, k)?;
    let uinv = &diag.passing_inverse;
    (0..k)
        .map(|s| {
            let mut v = vec![C64::new(0.0, 0.0); rep.dim()];
            for (r, &m) in m_list.iter().enumerate() {
                let i = rep.index_of(m).expect("checked above");
                v[i] += uinv[(s, r)] * w(diag.diagonal[s], m);
            }
            IntegrationConstants::new(v)
        })
        .collect()
}

/// D(M̃) T exp[½(M̃b* − M̃†b)m_r] on the stack (|−m_r b⟩⊗|j,m_r⟩)_r, for
/// any b ≠ 0 (T need not be unitary). M̃ must be normal.
pub fn bneq0_family(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    m_list: &[f64],
) -> Result<VectorState> {
    mtilde.require_normal("bneq0_family")?;
    let (t, b) = t_and_b(rep, p)?;
    if b == C64::new(0.0, 0.0) {
        return Err(VaesError::InvalidParams("bneq0_family needs b ≠ 0".into()));
    }
    let k = mtilde.k();
    let chi = spin_stack(rep, m_list, k)?;
    let m = mtilde.matrix();
    let dm = Dims::of(k, f, rep);
    let gen = &m.scale(b.conj()) - &m.adjoint().scale(b);
    let mut v = vec![C64::new(0.0, 0.0); k * f.dim() * rep.dim()];
    for (r, &mr) in m_list.iter().enumerate() {
        // column r of exp[½ m_r (M̃b* − M̃†b)]
        let e = matrix_function(&gen, |z| (0.5 * mr * z).exp())?;
        let coh = coherent(-b * mr, f).amplitudes;
        for s in 0..k {
            let w = e[(s, r)];
            for n in 0..f.dim() {
                for i in 0..rep.dim() {
                    v[dm.idx(s, n, i)] += w * coh[n] * chi[r][i];
                }
            }
        }
    }
    let tk = kron(&CMatrix::identity(k), &t);
    let v = apply_kd(&tk, &v, &dm);
    let v = apply_kn(&matrix_displacement(m, f)?, &v, &dm);
    let raw = VectorState::from_stacked(f, rep, k, &v, 1.0)?;
    VectorState::from_unnormalized(raw.components().to_vec())
}

/// The [`bneq0_family`] state from scalar solutions:
/// U · (Σ_r U†_sr |λ_s − m_r b⟩⊗T|j,m_r⟩)_s.
pub fn bneq0_family_factored(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    m_list: &[f64],
) -> Result<VectorState> {
    let diag = mtilde.require_normal("bneq0_family_factored")?;
    let (_, b) = t_and_b(rep, p)?;
    if b == C64::new(0.0, 0.0) {
        return Err(VaesError::InvalidParams("needs b ≠ 0".into()));
    }
    let consts = displaced_constants(diag, rep, m_list, |_, _| C64::new(1.0, 0.0))?;
    solve_general_raw(mtilde, f, rep, p, Some(&consts))
}

/// Which ladder generator the intelligent construction uses.
fn intelligent_side(p: &BetaParams) -> Result<(C64, bool)> {
    match classify(p, CLASSIFY_TOL) {
        CaseTag::BZeroLowerTriangular => Ok((p.beta_plus, true)),
        CaseTag::BZeroUpperTriangular => Ok((p.beta_minus, false)),
        other => Err(VaesError::InvalidParams(format!(
            "intelligent family needs β₋ = β₃ = 0 or β₊ = β₃ = 0, parameters are {other}"
        ))),
    }
}

/// D(M̃) exp[−β₊(I⊗a† + M̃†⊗I)⊗J₋] (|0⟩⊗|j,m_r⟩)_r: eigenstates of a + β₊J₋
/// with matrix eigenvalue M̃ (mirrored with β₋, J₊ when β₊ = β₃ = 0).
pub fn intelligent_family(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    m_list: &[f64],
) -> Result<VectorState> {
    let chi = spin_stack(rep, m_list, mtilde.k())?;
    intelligent_family_from(mtilde, f, rep, p, &chi)
}

/// [`intelligent_family`] with an arbitrary spin ground χ_r per component.
pub fn intelligent_family_from(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
    chi: &[Vec<C64>],
) -> Result<VectorState> {
    mtilde.require_normal("intelligent_family")?;
    let (coef, lower) = intelligent_side(p)?;
    let k = mtilde.k();
    if chi.len() != k || chi.iter().any(|c| c.len() != rep.dim()) {
        return Err(VaesError::Dimension("spin ground does not match (K, j)".into()));
    }
    let dm = Dims::of(k, f, rep);
    let g = generators(rep);
    let spin = if lower { &g.jm } else { &g.jp };
    let m = mtilde.matrix();
    let y = &kron(&CMatrix::identity(k), &creator(f)) + &kron(&m.adjoint(), &CMatrix::identity(f.dim()));

    let mut v = vec![C64::new(0.0, 0.0); k * f.dim() * rep.dim()];
    for (r, ch) in chi.iter().enumerate() {
        for i in 0..rep.dim() {
            v[dm.idx(r, 0, i)] = ch[i];
        }
    }
    // exp(−c Y⊗J) as a finite series: J is nilpotent.
    let spin_k = kron(&CMatrix::identity(k), spin);
    let mut total = v.clone();
    let mut term = v;
    for n in 1..=rep.dim() {
        term = apply_kn(&y, &apply_kd(&spin_k, &term, &dm), &dm);
        let s = -coef / n as f64;
        term.iter_mut().for_each(|z| *z *= s);
        if term.iter().all(|z| z.norm() == 0.0) {
            break;
        }
        total.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
    }
    let v = apply_kn(&matrix_displacement(m, f)?, &total, &dm);
    let raw = VectorState::from_stacked(f, rep, k, &v, 1.0)?;
    VectorState::from_unnormalized(raw.components().to_vec())
}

/// Symmetric form for the highest weight m = j:
/// D(M̃) exp(−β₊a†J₋) exp[f(X)(M̃β₊*J₊ − M̃†β₊J₋)] (|0⟩⊗|j,j⟩)_r with
/// X = |β₊|²M̃M̃† and f(X) = arctan(√X)/√X.
///
/// Disentangling the spin rotation leaves a factor (I + X)^{−j} on the
/// ground, so this is the all-m = j intelligent state with ground weights
/// (I + X)^{−j}(1, …, 1)ᵀ rather than equal weights.
pub fn intelligent_symmetric(
    mtilde: &EigenvalueMatrix,
    f: FockSpace,
    rep: Su2Rep,
    p: &BetaParams,
) -> Result<VectorState> {
    mtilde.require_normal("intelligent_symmetric")?;
    if classify(p, CLASSIFY_TOL) != CaseTag::BZeroLowerTriangular {
        return Err(VaesError::InvalidParams(
            "symmetric form needs β₋ = β₃ = 0, β₊ ≠ 0".into(),
        ));
    }
    let bp = p.beta_plus;
    let k = mtilde.k();
    let dm = Dims::of(k, f, rep);
    let g = generators(rep);
    let m = mtilde.matrix();
    let x = m.matmul(&m.adjoint()).scale(C64::new(bp.norm_sqr(), 0.0));
    let fx = matrix_function(&x, |z| {
        let r = z.sqrt();
        if r.norm() < 1e-12 {
            C64::new(1.0, 0.0)
        } else {
            r.atan() / r
        }
    })?;
    let gen = &kron(&fx.matmul(m).scale(bp.conj()), &g.jp) - &kron(&fx.matmul(&m.adjoint()).scale(bp), &g.jm);
    let rot = expm(&gen)?;

    let top = rep.dim() - 1;
    let mut v = vec![C64::new(0.0, 0.0); k * f.dim() * rep.dim()];
    for r in 0..k {
        v[dm.idx(r, 0, top)] = C64::new(1.0, 0.0);
    }
    let v = apply_kd(&rot, &v, &dm);
    // exp(−β₊ a†⊗J₋) per component
    let raw = VectorState::from_stacked(f, rep, k, &v, 1.0)?;
    let lowered = raw
        .components()
        .iter()
        .map(|c| {
            let op = expm(&kron(&creator(f), &g.jm).scale(-bp))?;
            c.apply(&op)
        })
        .collect::<Result<Vec<_>>>()?;
    let v = VectorState::new(lowered, 1.0)?.stacked();
    let v = apply_kn(&matrix_displacement(m, f)?, &v, &dm);
    let raw = VectorState::from_stacked(f, rep, k, &v, 1.0)?;
    VectorState::from_unnormalized(raw.components().to_vec())
}

#[derive(Clone, Debug)]
pub struct EnergyLadder {
    /// |ñ⟩ = (𝔸†)ⁿ/√n! |Ψ(0)⟩, normalized.
    pub states: Vec<VectorState>,
    /// ‖(𝔸†)ⁿ/√n! Ψ(0)‖ before normalization.
    pub norms: Vec<f64>,
    /// ⟨ñ|𝔸†𝔸|ñ⟩
    pub energies: Vec<f64>,
}

/// Builds |ñ⟩ for n = 0..=n_max from a ground annihilated by 𝔸 and
/// measures the 𝔸†𝔸 expectation of each.
pub fn energy_ladder(ground: &VectorState, a: &TensorOperator, n_max: usize) -> Result<EnergyLadder> {
    let zero = CMatrix::zeros(ground.k(), ground.k());
    let rep = eigen_residual(a, &zero, ground, &Tolerances::default())?;
    if rep.relative_residual > Tolerances::default().residual {
        return Err(VaesError::InvalidParams(format!(
            "ground is not annihilated by A (residual {:.2e})",
            rep.relative_residual
        )));
    }
    let ad = a.matrix().adjoint();
    let n0 = ground.norm_sqr().sqrt();
    let mut cur: Vec<Vec<C64>> = ground
        .components()
        .iter()
        .map(|c| c.amplitudes().iter().map(|z| z / n0).collect())
        .collect();
    let mut out = EnergyLadder {
        states: Vec::new(),
        norms: Vec::new(),
        energies: Vec::new(),
    };
    for n in 0..=n_max {
        if n > 0 {
            let s = 1.0 / (n as f64).sqrt();
            cur = cur
                .iter()
                .map(|v| ad.matvec(v).into_iter().map(|z| z * s).collect())
                .collect();
        }
        let norm2: f64 = cur.iter().map(|v| vdot(v, v).re).sum();
        let energy: f64 = cur
            .iter()
            .map(|v| {
                let av = a.matrix().matvec(v);
                vdot(&av, &av).re
            })
            .sum::<f64>()
            / norm2;
        let comps = cur
            .iter()
            .map(|v| ComponentState::new(a.fock(), a.rep(), v.clone()))
            .collect::<Result<Vec<_>>>()?;
        out.states.push(VectorState::from_unnormalized(comps)?);
        out.norms.push(norm2.sqrt());
        out.energies.push(energy);
    }
    Ok(out)
}
