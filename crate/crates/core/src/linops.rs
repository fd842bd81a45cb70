//! Dense complex linear algebra: a row-major matrix type plus the handful of
//! decompositions the rest of the crate leans on.
//!
//! Schur and SVD come from nalgebra; the matrix exponential (Padé with
//! scaling and squaring) and the eigenvector extraction are local.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, VaesError};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(VaesError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VaesError::InvalidParams("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from nested rows; panics on ragged input (test/preset helper).
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in d.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn data(&self) -> &[C64] {
        &self.data
    }
    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        let row_kernel = |(i, orow): (usize, &mut [C64])| {
            let arow = &self.data[i * k..(i + 1) * k];
            for (l, &a) in arow.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[l * m..(l + 1) * m];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        };
        if n * k * m >= 1 << 21 {
            out.par_chunks_mut(m.max(1)).enumerate().for_each(row_kernel);
        } else {
            out.chunks_mut(m.max(1)).enumerate().for_each(row_kernel);
        }
        Self {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension");
        let k = self.cols;
        let kernel = |i: usize| -> C64 {
            self.data[i * k..(i + 1) * k]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum()
        };
        if self.rows * k >= 1 << 20 {
            (0..self.rows).into_par_iter().map(kernel).collect()
        } else {
            (0..self.rows).map(kernel).collect()
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = acc.matmul(self);
        }
        acc
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// General inverse through LU; fails for (numerically) singular input.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(VaesError::NotSquare(self.rows, self.cols));
        }
        let inv = self
            .to_nalgebra()
            .try_inverse()
            .ok_or_else(|| VaesError::InvalidParams("singular matrix".into()))?;
        let out = Self::from_nalgebra(&inv);
        if !out.is_finite() {
            return Err(VaesError::InvalidParams("singular matrix".into()));
        }
        Ok(out)
    }

    /// Solves self·X = rhs.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let lu = self.to_nalgebra().lu();
        let x = lu
            .solve(&rhs.to_nalgebra())
            .ok_or_else(|| VaesError::InvalidParams("singular system".into()))?;
        Ok(Self::from_nalgebra(&x))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// [a, b] = ab − ba
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) - &(b * a)
}

/// Kronecker product: (a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l].
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// True iff ‖mm†−m†m‖_F ≤ tol·‖m‖_F².
pub fn is_normal(m: &CMatrix, tol: f64) -> Result<bool> {
    Ok(normality_defect(m)? <= tol)
}

/// ‖mm†−m†m‖_F / ‖m‖_F² (zero for the zero matrix).
pub fn normality_defect(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(VaesError::NotSquare(m.rows, m.cols));
    }
    let scale = m.frob_norm().powi(2);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mh = m.adjoint();
    Ok(commutator(m, &mh).frob_norm() / scale)
}

// ---------------------------------------------------------------------------
// Eigendecomposition

#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub passing: CMatrix,
    pub passing_inverse: CMatrix,
    pub diagonal: Vec<C64>,
    pub is_unitary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    pub eigenvalue: C64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Clone, Debug)]
pub enum EigOutcome {
    Diagonalizable(Diagonalization),
    Defective(DefectReport),
}

impl EigOutcome {
    pub fn diagonalization(self) -> Result<Diagonalization> {
        match self {
            EigOutcome::Diagonalizable(d) => Ok(d),
            EigOutcome::Defective(r) => Err(VaesError::Defective {
                eigenvalue: format!("{}", r.eigenvalue),
                algebraic: r.algebraic,
                geometric: r.geometric,
            }),
        }
    }
}

/// Relative tolerance used to decide that a matrix is normal inside `eig`.
pub const NORMAL_TOL: f64 = 1e-10;
const RANK_CUTOFF: f64 = 1e-10;
const CLUSTER_TOL: f64 = 1e-8;

/// Eigendecomposition with a deterministic eigenvalue order (ascending real
/// part, then ascending imaginary part).
///
/// Normal input yields the unitary Schur vectors directly. Otherwise each
/// eigenvalue cluster is inspected: singletons get their eigenvector by back
/// substitution on the triangular factor, repeated eigenvalues get a null
/// space from an SVD, and a rank shortfall is reported as a defect.
pub fn eig(m: &CMatrix) -> Result<EigOutcome> {
    if !m.is_square() {
        return Err(VaesError::NotSquare(m.rows, m.cols));
    }
    let n = m.rows;
    if n == 0 {
        return Err(VaesError::Dimension("empty matrix".into()));
    }
    let scale = m.frob_norm().max(f64::MIN_POSITIVE);
    let (q, t) = nalgebra::Schur::new(m.to_nalgebra()).unpack();

    let lambdas: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let off_diag: f64 = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();

    let mut pairs: Vec<(C64, Vec<C64>)>;
    let is_unitary;
    if off_diag <= NORMAL_TOL * scale {
        // Schur form is diagonal: Q already holds orthonormal eigenvectors.
        pairs = (0..n)
            .map(|k| (lambdas[k], (0..n).map(|i| q[(i, k)]).collect()))
            .collect();
        is_unitary = true;
    } else {
        is_unitary = false;
        pairs = Vec::with_capacity(n);
        let clusters = cluster(&lambdas, CLUSTER_TOL * scale.max(1.0));
        for idx in clusters {
            if idx.len() == 1 {
                let k = idx[0];
                let x = triangular_eigvec(&t, k);
                let mut v: Vec<C64> = (0..n)
                    .map(|i| (0..=k).map(|l| q[(i, l)] * x[l]).sum())
                    .collect();
                normalize(&mut v);
                pairs.push((lambdas[k], v));
            } else {
                let lam = idx.iter().map(|&k| lambdas[k]).sum::<C64>() / idx.len() as f64;
                let shifted = CMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        m[(i, j)] - lam
                    } else {
                        m[(i, j)]
                    }
                });
                let null = null_space(&shifted, scale);
                if null.len() < idx.len() {
                    return Ok(EigOutcome::Defective(DefectReport {
                        eigenvalue: lam,
                        algebraic: idx.len(),
                        geometric: null.len(),
                    }));
                }
                for v in null.into_iter().take(idx.len()) {
                    pairs.push((lam, v));
                }
            }
        }
    }

    pairs.sort_by(|a, b| cmp_eigen(a.0, b.0, 1e-12 * scale.max(1.0)));
    let diagonal: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    let mut passing = CMatrix::zeros(n, n);
    for (k, (_, v)) in pairs.iter().enumerate() {
        passing.set_column(k, v);
    }
    let passing_inverse = if is_unitary {
        passing.adjoint()
    } else {
        passing.inverse()?
    };
    Ok(EigOutcome::Diagonalizable(Diagonalization {
        passing,
        passing_inverse,
        diagonal,
        is_unitary,
    }))
}

fn cmp_eigen(a: C64, b: C64, tol: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() > tol {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

fn cluster(lambdas: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &l) in lambdas.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|&i| (lambdas[i] - l).norm() <= tol))
        {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    groups
}

/// Eigenvector of an upper-triangular matrix for diagonal entry k.
fn triangular_eigvec(t: &DMatrix<C64>, k: usize) -> Vec<C64> {
    let lam = t[(k, k)];
    let mut x = vec![ZERO; k + 1];
    x[k] = ONE;
    for i in (0..k).rev() {
        let s: C64 = (i + 1..=k).map(|l| t[(i, l)] * x[l]).sum();
        let mut den = t[(i, i)] - lam;
        if den.norm() < f64::EPSILON * t[(k, k)].norm().max(1.0) {
            den = C64::new(f64::EPSILON, 0.0);
        }
        x[i] = -s / den;
    }
    x
}

/// Orthonormal basis of the numerical null space (singular values at or
/// below 1e-10·σ_max, σ_max taken from the shifted matrix or ‖M‖ if that
/// vanishes).
fn null_space(a: &CMatrix, scale: f64) -> Vec<Vec<C64>> {
    let n = a.rows;
    let svd = a.to_nalgebra().svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_CUTOFF * if smax > 0.0 { smax } else { scale };
    let mut out = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            out.push((0..n).map(|i| vt[(r, i)].conj()).collect());
        }
    }
    out
}

fn normalize(v: &mut [C64]) {
    let nrm = vnorm(v);
    if nrm > 0.0 {
        v.iter_mut().for_each(|z| *z /= nrm);
    }
}

// ---------------------------------------------------------------------------
// Matrix exponential

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;
const MAX_SQUARINGS: i32 = 64;

/// exp(m) by Padé approximation with scaling and squaring.
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(VaesError::NotSquare(m.rows, m.cols));
    }
    if !m.is_finite() {
        return Err(VaesError::NonConvergence("expm of non-finite matrix".into()));
    }
    let n = m.rows;
    let eye = CMatrix::identity(n);
    let norm = m.norm1();
    if norm == 0.0 {
        return Ok(eye);
    }

    for &(deg, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(m, coeffs);
        }
    }

    let s = ((norm / THETA13).log2().ceil() as i32).max(0);
    if s > MAX_SQUARINGS {
        return Err(VaesError::NonConvergence(format!(
            "expm needs {s} squarings (norm {norm:.3e})"
        )));
    }
    let a = m.scale(C64::new(0.5f64.powi(s), 0.0));
    let mut r = pade13(&a)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    if !r.is_finite() {
        return Err(VaesError::NonConvergence("expm overflowed".into()));
    }
    Ok(r)
}

fn lincomb(terms: &[(f64, &CMatrix)], n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for &(c, m) in terms {
        if c == 0.0 {
            continue;
        }
        for (o, z) in out.data.iter_mut().zip(&m.data) {
            *o += z * c;
        }
    }
    out
}

fn pade_low(a: &CMatrix, b: &[f64]) -> Result<CMatrix> {
    let n = a.rows;
    let eye = CMatrix::identity(n);
    let a2 = a.matmul(a);
    let mut powers = vec![eye, a2.clone()];
    while powers.len() < b.len() / 2 {
        let next = powers.last().unwrap().matmul(&a2);
        powers.push(next);
    }
    let u_inner = lincomb(
        &powers
            .iter()
            .enumerate()
            .map(|(k, p)| (b[2 * k + 1], p))
            .collect::<Vec<_>>(),
        n,
    );
    let u = a.matmul(&u_inner);
    let v = lincomb(
        &powers
            .iter()
            .enumerate()
            .map(|(k, p)| (b[2 * k], p))
            .collect::<Vec<_>>(),
        n,
    );
    (&v - &u).solve(&(&v + &u))
}

fn pade13(a: &CMatrix) -> Result<CMatrix> {
    let b = &PADE13;
    let n = a.rows;
    let eye = CMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let u_hi = a6.matmul(&lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n));
    let u_lo = lincomb(
        &[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &eye)],
        n,
    );
    let u = a.matmul(&(&u_hi + &u_lo));
    let v_hi = a6.matmul(&lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n));
    let v_lo = lincomb(
        &[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &eye)],
        n,
    );
    let v = &v_hi + &v_lo;
    (&v - &u).solve(&(&v + &u))
}

/// f(m) = U f(D) U† for normal m.
pub fn matrix_function(m: &CMatrix, f: impl Fn(C64) -> C64) -> Result<CMatrix> {
    let defect = normality_defect(m)?;
    if defect > NORMAL_TOL {
        return Err(VaesError::NotNormal(defect));
    }
    let d = eig(m)?.diagonalization()?;
    // A normal matrix within tolerance can still come back through the
    // non-normal path if its Schur factor is noisy; re-orthonormalize then.
    let u = if d.is_unitary {
        d.passing
    } else {
        orthonormalize_columns(&d.passing)
    };
    let fd: Vec<C64> = d.diagonal.iter().map(|&z| f(z)).collect();
    let n = m.rows;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| u[(i, k)] * fd[k] * u[(j, k)].conj()).sum()
    }))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    s
}

fn orthonormalize_columns(p: &CMatrix) -> CMatrix {
    let qr = p.to_nalgebra().qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the column phases so that Q spans the same eigenvectors.
    let mut out = CMatrix::from_nalgebra(&q);
    for k in 0..p.cols {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for i in 0..p.rows {
                out[(i, k)] *= ph;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn kron_identity_and_diag() {
        let i6 = kron(&CMatrix::identity(2), &CMatrix::identity(3));
        assert_eq!(i6, CMatrix::identity(6));
        let d = kron(
            &CMatrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 0.0)]),
            &CMatrix::identity(2),
        );
        assert_eq!(d.diagonal(), vec![c64(1., 0.), c64(1., 0.), c64(2., 0.), c64(2., 0.)]);
    }

    #[test]
    fn normality_examples() {
        let h = CMatrix::from_rows(&[
            vec![c64(1.0, 0.0), c64(2.0, -1.0)],
            vec![c64(2.0, 1.0), c64(-3.0, 0.0)],
        ]);
        assert!(is_normal(&h, 1e-12).unwrap());
        let jordan = CMatrix::from_rows(&[
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(0.0, 0.0)],
        ]);
        assert!(!is_normal(&jordan, 1e-12).unwrap());
        assert!(is_normal(&CMatrix::zeros(2, 3), 1e-12).is_err());
    }

    #[test]
    fn eig_diagonal() {
        let m = CMatrix::from_diag(&[c64(1., 0.), c64(2., 0.), c64(3., 0.)]);
        let d = eig(&m).unwrap().diagonalization().unwrap();
        assert!(d.is_unitary);
        assert_eq!(d.diagonal, vec![c64(1., 0.), c64(2., 0.), c64(3., 0.)]);
        for k in 0..3 {
            assert!((d.passing[(k, k)].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_defective_jordan() {
        let beta = c64(0.5, 0.2);
        let bp = c64(1.0, 0.0);
        let m = CMatrix::from_rows(&[vec![beta, -bp], vec![c64(0., 0.), beta]]);
        match eig(&m).unwrap() {
            EigOutcome::Defective(r) => {
                assert!((r.eigenvalue - beta).norm() < 1e-12);
                assert_eq!((r.algebraic, r.geometric), (2, 1));
            }
            other => panic!("expected defect, got {other:?}"),
        }
    }

    #[test]
    fn eig_repeated_but_diagonalizable() {
        // Non-normal with a doubly repeated, non-defective eigenvalue.
        let p = CMatrix::from_rows(&[
            vec![c64(1., 0.), c64(1., 0.), c64(0., 0.)],
            vec![c64(0., 0.), c64(1., 0.), c64(1., 0.)],
            vec![c64(1., 0.), c64(0., 0.), c64(2., 0.)],
        ]);
        let d = CMatrix::from_diag(&[c64(2., 0.), c64(2., 0.), c64(-1., 0.)]);
        let m = &(&p * &d) * &p.inverse().unwrap();
        let dg = eig(&m).unwrap().diagonalization().unwrap();
        assert_eq!(dg.diagonal.len(), 3);
        let back = &(&dg.passing_inverse * &m) * &dg.passing;
        let resid = (&back - &CMatrix::from_diag(&dg.diagonal)).frob_norm();
        assert!(resid <= 1e-10 * m.frob_norm(), "resid {resid}");
    }

    #[test]
    fn expm_basics() {
        let z = expm(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z, CMatrix::identity(3));
        let e = expm(&CMatrix::from_diag(&[c64(1., 0.), c64(2., 0.)])).unwrap();
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - 2f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn matrix_function_rejects_non_normal() {
        let jordan = CMatrix::from_rows(&[
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(0.0, 0.0)],
        ]);
        assert!(matches!(
            matrix_function(&jordan, |z| z.exp()),
            Err(VaesError::NotNormal(_))
        ));
    }
}
