//! Seeded random draws used by random M̃ specs and the randomized suites.

use std::f64::consts::PI;

use rand::Rng;
use vaes_core::linops::{eig, normality_defect, CMatrix};
use vaes_core::C64;

/// Uniform in the disk |z| ≤ radius.
pub fn in_disk<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI))
}

fn gaussian_like<R: Rng>(rng: &mut R, k: usize) -> CMatrix {
    CMatrix::from_fn(k, k, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Eigenvectors of a random Hermitian matrix.
pub fn unitary<R: Rng>(rng: &mut R, k: usize) -> CMatrix {
    let g = gaussian_like(rng, k);
    let h = &g + &g.adjoint();
    eig(&h)
        .and_then(|o| o.diagonalization())
        .map(|d| d.passing)
        .expect("Hermitian matrices diagonalize")
}

/// U diag(λ) U† with λ in the disk.
pub fn normal_matrix<R: Rng>(rng: &mut R, k: usize, radius: f64) -> CMatrix {
    let u = unitary(rng, k);
    let d = CMatrix::from_diag(&(0..k).map(|_| in_disk(rng, radius)).collect::<Vec<_>>());
    u.matmul(&d).matmul(&u.adjoint())
}

/// S diag(λ) S⁻¹ with S = I + G/2, redrawn until clearly non-normal and
/// well conditioned; eigenvalues in the disk.
pub fn diagonalizable_matrix<R: Rng>(rng: &mut R, k: usize, radius: f64) -> CMatrix {
    loop {
        let g = gaussian_like(rng, k).scale(C64::new(0.5 / (k as f64).sqrt(), 0.0));
        let s = &CMatrix::identity(k) + &g;
        let Ok(si) = s.inverse() else { continue };
        if si.max_abs() > 10.0 {
            continue;
        }
        let lam: Vec<C64> = (0..k).map(|_| in_disk(rng, radius)).collect();
        let sep = lam
            .iter()
            .enumerate()
            .flat_map(|(i, a)| lam[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        if sep < 0.05 * radius {
            continue;
        }
        let m = s.matmul(&CMatrix::from_diag(&lam)).matmul(&si);
        if normality_defect(&m).unwrap_or(0.0) > 1e-3 {
            return m;
        }
    }
}
