//! Spin-j representation of su(2), the β-coefficient matrices, and the T
//! operator that conjugates β₊J₋ + β₋J₊ + β₃J₃ to bJ₃.
//!
//! Basis order is ascending m: index i ↔ m = i − j.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::combin::{fact_ratio, iu};
use crate::error::{Result, VaesError};
use crate::linops::{expm, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Su2Rep {
    two_j: u32,
}

impl Su2Rep {
    /// Representation with j = two_j / 2.
    pub fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn from_j(j: f64) -> Result<Self> {
        let tj = 2.0 * j;
        if !(tj >= 0.0) || (tj - tj.round()).abs() > 1e-12 {
            return Err(VaesError::InvalidParams(format!(
                "j must be a non-negative half-integer, got {j}"
            )));
        }
        Ok(Self::new(tj.round() as u32))
    }

    #[inline]
    pub fn two_j(&self) -> u32 {
        self.two_j
    }
    #[inline]
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }
    /// m value of basis index i.
    #[inline]
    pub fn m(&self, i: usize) -> f64 {
        i as f64 - self.j()
    }
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let i = m + self.j();
        if i < -1e-9 || (i - i.round()).abs() > 1e-9 || i.round() as usize >= self.dim() {
            None
        } else {
            Some(i.round() as usize)
        }
    }
    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Generators {
    pub jp: CMatrix,
    pub jm: CMatrix,
    pub j3: CMatrix,
}

impl Generators {
    /// J₊J₋ + J₃² − J₃
    pub fn casimir(&self) -> CMatrix {
        let jj = &(&self.jp * &self.jm) + &(&self.j3 * &self.j3);
        &jj - &self.j3
    }
}

fn build_generators(rep: Su2Rep) -> Generators {
    let d = rep.dim();
    let j = rep.j();
    let mut jp = CMatrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        let m = rep.m(i);
        // (j−m)(j+m+1) is an integer; take its root once.
        let k = ((j - m) * (j + m + 1.0)).round();
        jp[(i + 1, i)] = C64::new(k.sqrt(), 0.0);
    }
    let jm = jp.transpose();
    let j3 = CMatrix::from_diag(&rep.m_values().iter().map(|&m| C64::new(m, 0.0)).collect::<Vec<_>>());
    Generators { jp, jm, j3 }
}

static GENERATOR_CACHE: OnceLock<RwLock<HashMap<u32, Arc<Generators>>>> = OnceLock::new();

/// J₊, J₋, J₃ in the ascending-m basis (cached per j).
pub fn generators(rep: Su2Rep) -> Arc<Generators> {
    let cache = GENERATOR_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(g) = cache.read().expect("generator cache").get(&rep.two_j) {
        return Arc::clone(g);
    }
    let g = Arc::new(build_generators(rep));
    cache
        .write()
        .expect("generator cache")
        .entry(rep.two_j)
        .or_insert_with(|| Arc::clone(&g));
    g
}

/// Principal square root: non-negative real part, and non-negative
/// imaginary part when the real part vanishes.
pub fn principal_sqrt(z: C64) -> C64 {
    let s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        -s
    } else {
        s
    }
}

/// Coefficients of 𝔸 = a + β₋J₊ + β₊J₋ + β₃J₃ and the scalar eigenvalue β.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaParams {
    pub beta: C64,
    pub beta_plus: C64,
    pub beta_minus: C64,
    pub beta_3: C64,
}

impl BetaParams {
    pub fn new(beta: C64, beta_plus: C64, beta_minus: C64, beta_3: C64) -> Self {
        Self {
            beta,
            beta_plus,
            beta_minus,
            beta_3,
        }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    /// Same su(2) coefficients with a different scalar eigenvalue.
    pub fn with_beta(&self, beta: C64) -> Self {
        Self { beta, ..*self }
    }

    /// b = √(4β₊β₋ + β₃²), principal branch.
    pub fn b(&self) -> C64 {
        principal_sqrt(self.b_squared())
    }

    pub fn b_squared(&self) -> C64 {
        4.0 * self.beta_plus * self.beta_minus + self.beta_3 * self.beta_3
    }

    /// Largest modulus among β₊, β₋, β₃.
    pub fn spin_scale(&self) -> f64 {
        self.beta_plus
            .norm()
            .max(self.beta_minus.norm())
            .max(self.beta_3.norm())
    }

    /// ϑ = β₃/(2β₊), meaningful in the b = 0 family.
    pub fn theta_param(&self) -> C64 {
        self.beta_3 / (2.0 * self.beta_plus)
    }

    /// |β₊| = |β₋| and β₃β₊* = β₃*β₋, which make [𝔸,𝔸†] = I.
    pub fn satisfies_normality(&self, tol: f64) -> bool {
        let s = self.spin_scale().max(f64::MIN_POSITIVE);
        let c1 = (self.beta_plus.norm() - self.beta_minus.norm()).abs() <= tol * s;
        let c2 = (self.beta_3 * self.beta_plus.conj() - self.beta_3.conj() * self.beta_minus).norm()
            <= tol * s * s;
        c1 && c2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    BNonzeroNormal,
    BNonzeroDiagonalizable,
    /// β₋ = β₃ = 0, β₊ ≠ 0
    BZeroLowerTriangular,
    /// β₊ = β₃ = 0, β₋ ≠ 0
    BZeroUpperTriangular,
    /// b = 0 with β₊, β₋, β₃ all non-zero (ϑ-case)
    BZeroFull,
    AllZero,
}

impl CaseTag {
    pub fn label(&self) -> &'static str {
        match self {
            CaseTag::BNonzeroNormal => "BNonzero_Normal",
            CaseTag::BNonzeroDiagonalizable => "BNonzero_Diagonalizable",
            CaseTag::BZeroLowerTriangular => "BZero_LowerTriangular",
            CaseTag::BZeroUpperTriangular => "BZero_UpperTriangular",
            CaseTag::BZeroFull => "BZero_Full",
            CaseTag::AllZero => "AllZero",
        }
    }

    pub fn b_is_zero(&self) -> bool {
        !matches!(self, CaseTag::BNonzeroNormal | CaseTag::BNonzeroDiagonalizable)
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Case split on the zero pattern of (β₊, β₋, β₃, b); `tol` is relative to
/// the largest of |β₊|, |β₋|, |β₃|.
pub fn classify(p: &BetaParams, tol: f64) -> CaseTag {
    let s = p.spin_scale();
    if s == 0.0 {
        return CaseTag::AllZero;
    }
    let small = |z: C64| z.norm() <= tol * s;
    if p.b().norm() > tol.sqrt() * s {
        return if p.satisfies_normality(tol) {
            CaseTag::BNonzeroNormal
        } else {
            CaseTag::BNonzeroDiagonalizable
        };
    }
    if small(p.beta_minus) && small(p.beta_3) {
        CaseTag::BZeroLowerTriangular
    } else if small(p.beta_plus) && small(p.beta_3) {
        CaseTag::BZeroUpperTriangular
    } else {
        CaseTag::BZeroFull
    }
}

/// β₊J₋ + β₋J₊ + β₃J₃
pub fn beta_operator(rep: Su2Rep, p: &BetaParams) -> CMatrix {
    let g = generators(rep);
    let t = &g.jm.scale(p.beta_plus) + &g.jp.scale(p.beta_minus);
    &t + &g.j3.scale(p.beta_3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MConvention {
    /// βI + β₃J₃ − β₊J₋ − β₋J₊: diagonal β + mβ₃ in ascending m.
    Su2,
    /// βI − (β₊J₋ + β₋J₊ + β₃J₃): diagonal β − mβ₃, i.e. β + jβ₃ at the top.
    Ode,
}

/// The (2j+1)×(2j+1) eigenvalue matrix built from β; eigenvalues {β + mb}.
pub fn m_matrix(rep: Su2Rep, p: &BetaParams, convention: MConvention) -> CMatrix {
    let g = generators(rep);
    let d = rep.dim();
    let off = &g.jm.scale(-p.beta_plus) - &g.jp.scale(p.beta_minus);
    let diag_sign = match convention {
        MConvention::Su2 => 1.0,
        MConvention::Ode => -1.0,
    };
    let diag = &CMatrix::identity(d).scale(p.beta) + &g.j3.scale(diag_sign * p.beta_3);
    &diag + &off
}

/// A T matrix together with the branch of b it diagonalizes for.
#[derive(Clone, Debug)]
pub struct TMatrix {
    pub matrix: CMatrix,
    /// Columns satisfy (β·J) T e_ℓ = ℓ·b T e_ℓ with this b.
    pub b: C64,
    /// True when the principal b was replaced by −b to avoid b + β₃ = 0.
    pub pole_flipped: bool,
}

const POLE_TOL: f64 = 1e-12;

fn b_with_pole_rule(p: &BetaParams) -> Result<(C64, bool)> {
    let b = p.b();
    if b.norm() <= 1e-14 * p.spin_scale().max(f64::MIN_POSITIVE) || b.norm() == 0.0 {
        return Err(VaesError::InvalidParams(
            "b = 0: the T operator is undefined".into(),
        ));
    }
    if (b + p.beta_3).norm() < POLE_TOL * b.norm() {
        Ok((-b, true))
    } else {
        Ok((b, false))
    }
}

/// Jacobi polynomial P_n^{(α,β)}(x) for integer parameters with n+α ≥ 0
/// and n+α+β ≥ 0 (α, β may be negative).
pub fn jacobi(n: i64, alpha: i64, beta: i64, x: C64) -> Result<C64> {
    jacobi_split(n, alpha, beta, (x - 1.0) / 2.0, (x + 1.0) / 2.0)
}

/// P_n^{(α,β)} as Σ_k C(n+α, n−k) C(n+β, k) u^k v^{n−k} with u = (x−1)/2,
/// v = (x+1)/2 passed separately, so a small v (x near −1) is not lost to
/// cancellation.
fn jacobi_split(n: i64, alpha: i64, beta: i64, u: C64, v: C64) -> Result<C64> {
    if n < 0 || n + alpha < 0 || n + alpha + beta < 0 {
        return Err(VaesError::InvalidParams(format!(
            "Jacobi parameters out of range: n={n}, α={alpha}, β={beta}"
        )));
    }
    let mut total = C64::new(0.0, 0.0);
    for k in 0..=n {
        let c = binom(n + alpha, n - k) * binom(n + beta, k);
        if c != 0.0 {
            total += u.powi(k as i32) * v.powi((n - k) as i32) * c;
        }
    }
    Ok(total)
}

/// Generalized binomial C(a, k) for integer a and k ≥ 0.
fn binom(a: i64, k: i64) -> f64 {
    if a >= 0 {
        if k > a {
            0.0
        } else {
            fact_ratio(&[a as u64], &[k as u64, (a - k) as u64])
        }
    } else {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * binom(k - a - 1, k)
    }
}

/// T from its closed-form matrix elements (Jacobi-polynomial form).
///
/// Requires b ≠ 0. When b + β₃ vanishes the other branch of b is used and
/// `pole_flipped` is set. β₊ or β₋ may be zero (triangular T).
pub fn t_matrix_jacobi(rep: Su2Rep, p: &BetaParams) -> Result<TMatrix> {
    let (b, pole_flipped) = b_with_pole_rule(p)?;
    let d = rep.dim();
    let j = rep.j();
    let bb3 = b + p.beta_3;
    // (x∓1)/2 with x = β₃/b, formed without cancellation: (b−β₃)(b+β₃) = 4β₊β₋
    let bm3 = if bb3.norm() >= (b - p.beta_3).norm() {
        4.0 * p.beta_plus * p.beta_minus / bb3
    } else {
        b - p.beta_3
    };
    let (u, v) = (-bm3 / (2.0 * b), bb3 / (2.0 * b));
    let log_c = (2.0 * b / bb3).ln();
    let lower_ratio = -2.0 * p.beta_minus / bb3;
    let upper_ratio = p.beta_plus / b;
    let zero = C64::new(0.0, 0.0);

    let mut t = CMatrix::zeros(d, d);
    for im in 0..d {
        let m = rep.m(im);
        for il in 0..d {
            let l = rep.m(il);
            let (jm, jl) = ((j + m).round() as i64, (j + l).round() as i64);
            let entry = if im > il {
                let pref = lower_ratio.powi((im - il) as i32);
                if pref == zero {
                    continue;
                }
                let root = fact_ratio(&[iu(j + l), iu(j - l)], &[iu(j + m), iu(j - m)]).sqrt();
                // P_{j+ℓ}^{(m−ℓ, −ℓ−m)}
                pref * root * jacobi_split(jl, (im - il) as i64, -((m + l).round() as i64), u, v)?
            } else {
                let pref = upper_ratio.powi((il - im) as i32);
                if pref == zero {
                    continue;
                }
                let root = fact_ratio(&[iu(j + m), iu(j - m)], &[iu(j + l), iu(j - l)]).sqrt();
                // P_{j+m}^{(ℓ−m, −m−ℓ)}
                pref * root * jacobi_split(jm, (il - im) as i64, -((m + l).round() as i64), u, v)?
            };
            t[(im, il)] = entry * (l * log_c).exp();
        }
    }
    Ok(TMatrix {
        matrix: t,
        b,
        pole_flipped,
    })
}

/// Parameters of the exponential form of T: (t, e^{iφ̃}) with
/// T = exp(−t(e^{−iφ̃}J₊ − e^{iφ̃}J₋)). Needs β₊β₋ ≠ 0.
pub fn t_exp_parameters(p: &BetaParams) -> Result<(C64, C64, C64)> {
    if p.beta_plus.norm() == 0.0 || p.beta_minus.norm() == 0.0 {
        return Err(VaesError::InvalidParams(
            "exponential form of T needs β₊ ≠ 0 and β₋ ≠ 0".into(),
        ));
    }
    let (b, _) = b_with_pole_rule(p)?;
    let bb3 = b + p.beta_3;
    let e_phi = principal_sqrt(p.beta_plus / p.beta_minus);
    let mut z = principal_sqrt((b - p.beta_3) / bb3);
    // Two square roots leave a sign free; Z e^{iφ̃} must equal 2β₊/(b+β₃).
    let target = 2.0 * p.beta_plus / bb3;
    if (z * e_phi - target).norm() > (z * e_phi + target).norm() {
        z = -z;
    }
    // t = (i/2) ln((1−iZ)/(1+iZ)); the argument is taken with atan2 so the
    // quadrant is right for |Z| > 1 as well.
    let zz = z.norm_sqr();
    let delta = (-2.0 * z.re).atan2(1.0 - zz);
    let modulus = ((1.0 - zz).powi(2) + 4.0 * z.re * z.re).sqrt() / (1.0 - 2.0 * z.im + zz);
    let t = C64::new(-0.5 * delta, 0.5 * modulus.ln());
    Ok((t, e_phi, b))
}

/// T from its exponential form; agrees with [`t_matrix_jacobi`] whenever both
/// are defined.
pub fn t_matrix_exp(rep: Su2Rep, p: &BetaParams) -> Result<TMatrix> {
    let (t, e_phi, b) = t_exp_parameters(p)?;
    let g = generators(rep);
    let gen = (&g.jp.scale(e_phi.inv()) - &g.jm.scale(e_phi)).scale(-t);
    Ok(TMatrix {
        matrix: expm(&gen)?,
        b,
        pole_flipped: b_with_pole_rule(p)?.1,
    })
}

/// Passing matrix P with (β₊J₋ + β₋J₊ + β₃J₃) P = P · diag(m b).
///
/// Covers every b ≠ 0 pattern: all coefficients non-zero, β₊ = 0 or β₋ = 0
/// with β₃ ≠ 0 (the pole rule then picks b = β₃), and β₃ = 0. For b = 0 the
/// operator is nilpotent and there is no passing matrix.
pub fn passing_matrix(rep: Su2Rep, p: &BetaParams) -> Result<TMatrix> {
    if classify(p, 1e-12).b_is_zero() {
        return Err(VaesError::InvalidParams(
            "b = 0: the spin operator is nilpotent and has no passing matrix".into(),
        ));
    }
    t_matrix_jacobi(rep, p)
}

/// Normality conditions |β₊| − |β₋| and β₃β₊* − β₃*β₋ (both zero for a
/// canonical 𝔸).
pub fn normality_conditions(p: &BetaParams) -> (f64, C64) {
    (
        p.beta_plus.norm() - p.beta_minus.norm(),
        p.beta_3 * p.beta_plus.conj() - p.beta_3.conj() * p.beta_minus,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn diag_residual(rep: Su2Rep, p: &BetaParams, t: &TMatrix) -> f64 {
        let b_op = beta_operator(rep, p);
        let d = CMatrix::from_diag(&rep.m_values().iter().map(|&m| t.b * m).collect::<Vec<_>>());
        (&b_op.matmul(&t.matrix) - &t.matrix.matmul(&d)).max_abs()
    }

    #[test]
    fn generators_commute_correctly() {
        for tj in 0..7 {
            let rep = Su2Rep::new(tj);
            let g = generators(rep);
            let c = &(&g.jp * &g.jm) - &(&g.jm * &g.jp);
            assert!((&c - &g.j3.scale(c64(2.0, 0.0))).max_abs() < 1e-13);
            let jj = rep.j() * (rep.j() + 1.0);
            assert!((&g.casimir() - &CMatrix::identity(rep.dim()).scale(c64(jj, 0.0))).max_abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_low_orders() {
        let x = c64(0.3, -0.2);
        assert_eq!(jacobi(0, 2, -1, x).unwrap(), c64(1.0, 0.0));
        // P_1^{(α,β)}(x) = (α+1) + (α+β+2)(x−1)/2
        let p1 = jacobi(1, 2, 1, x).unwrap();
        assert!((p1 - (3.0 + 5.0 * (x - 1.0) / 2.0)).norm() < 1e-14);
        // Legendre P_2
        let p2 = jacobi(2, 0, 0, x).unwrap();
        assert!((p2 - (1.5 * x * x - 0.5)).norm() < 1e-14);
    }

    #[test]
    fn spin_half_t() {
        let rep = Su2Rep::new(1);
        let p = BetaParams::new(c64(0.0, 0.0), c64(0.7, 0.1), c64(-0.3, 0.4), c64(0.2, -0.5));
        let t = t_matrix_jacobi(rep, &p).unwrap();
        assert!(diag_residual(rep, &p, &t) < 1e-13);
        let e = t_matrix_exp(rep, &p).unwrap();
        assert!((&t.matrix - &e.matrix).max_abs() < 1e-12);
    }

    #[test]
    fn triangular_rows_use_beta3() {
        let rep = Su2Rep::new(1);
        let p = BetaParams::new(c64(0.0, 0.0), c64(0.6, 0.0), c64(0.0, 0.0), c64(0.4, 0.0));
        let t = passing_matrix(rep, &p).unwrap();
        assert!((t.b - c64(0.4, 0.0)).norm() < 1e-15);
        assert!((t.matrix[(0, 1)] - c64(1.5, 0.0)).norm() < 1e-14);
        assert_eq!(t.matrix[(1, 0)], c64(0.0, 0.0));
        assert!(diag_residual(rep, &p, &t) < 1e-14);
    }

    #[test]
    fn m_conventions() {
        let rep = Su2Rep::new(1);
        let p = BetaParams::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(2.0, 0.0));
        assert_eq!(m_matrix(rep, &p, MConvention::Su2)[(0, 0)], c64(0.0, 0.0));
        assert_eq!(m_matrix(rep, &p, MConvention::Ode)[(0, 0)], c64(2.0, 0.0));
    }

    #[test]
    fn classify_patterns() {
        let z = c64(0.0, 0.0);
        let one = c64(1.0, 0.0);
        assert_eq!(classify(&BetaParams::zero(), 1e-12), CaseTag::AllZero);
        assert_eq!(classify(&BetaParams::new(z, one, z, z), 1e-12), CaseTag::BZeroLowerTriangular);
        assert_eq!(classify(&BetaParams::new(z, z, one, z), 1e-12), CaseTag::BZeroUpperTriangular);
        // 4β₊β₋ + β₃² = 0 with all three non-zero
        let p = BetaParams::new(z, one, -one, c64(2.0, 0.0));
        assert_eq!(classify(&p, 1e-12), CaseTag::BZeroFull);
        assert_eq!(classify(&BetaParams::new(z, one, one, z), 1e-12), CaseTag::BNonzeroNormal);
        assert_eq!(classify(&BetaParams::new(z, one, c64(2.0, 0.0), z), 1e-12), CaseTag::BNonzeroDiagonalizable);
    }
}
