//! Verification suites: `smoke` solves and verifies every preset, `full`
//! runs the twelve acceptance criteria. Criteria run in parallel on the
//! worker pool; each draws from its own seeded stream so results do not
//! depend on scheduling.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use vaes_core::aes::{aes_basis, aes_basis_raw, normalization_b0_full, supercoherent_pair, ComponentState, IntegrationConstants, CLASSIFY_TOL};
use vaes_core::algebra::{build_A, commutator_report, transformed_generators, verify_commutator, Family};
use vaes_core::fock::{annihilator, creator, squeeze_lift, FockSpace};
use vaes_core::linops::{kron, singular_values, vnorm};
use vaes_core::quaternion::{
    canonical_quaternionic_vcs, matched_ground, quat_matrix, quat_to_matrix, quaternionic_ground, quaternionic_series,
    QuaternionPolar,
};
use vaes_core::su2::{
    beta_operator, classify, generators, t_matrix_exp, t_matrix_jacobi, BetaParams, CaseTag, Su2Rep, TMatrix,
};
use vaes_core::vaes::{energy_ladder, intelligent_family, norm_constant_series, solve_general, EigenvalueMatrix, VectorState};
use vaes_core::verify::{eigen_residual, sr_check, su2_relations_error, Tolerances};
use vaes_core::{c64, CMatrix, C64};

use crate::commands::{cmd_solve, cmd_verify_state};
use crate::config::RunConfig;
use crate::presets::PRESETS;
use crate::sample::{diagonalizable_matrix, in_disk, normal_matrix};
use crate::state::StateFile;
use crate::{worker_pool, CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{}: {tag} — {}", self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Smoke,
    Full,
}

impl Suite {
    pub fn from_name(s: &str) -> CliResult<Self> {
        match s {
            "smoke" => Ok(Suite::Smoke),
            "full" => Ok(Suite::Full),
            _ => Err(CliError::Config(format!("unknown suite {s:?} (smoke | full)"))),
        }
    }
}

pub const CRITERIA: [&str; 12] = [
    "su(2) relations and Casimir",
    "T matrix: Jacobi vs exponential, diagonalization, unitarity",
    "scalar AES for every case family",
    "vector AES for normal and diagonalizable M̃",
    "quaternion M̃: unitarity, eigenvalues, normalization, two routes",
    "commutator scenarios",
    "transformed generators for b = 0",
    "supercoherent pair for defective M̃",
    "Schrödinger–Robertson saturation",
    "squeeze lift",
    "energy ladder on the quaternionic ground",
    "bit-identical reruns",
];

pub fn run_suite(suite: Suite, seed: u64) -> CliResult<Vec<Check>> {
    match suite {
        Suite::Smoke => smoke(seed),
        Suite::Full => acceptance(seed),
    }
}

/// Criteria 1–12 in order.
pub fn acceptance(seed: u64) -> CliResult<Vec<Check>> {
    let pool = worker_pool()?;
    Ok(pool.install(|| (1..=12u8).into_par_iter().map(|id| criterion(id, seed)).collect()))
}

/// Every preset solved and verified, plus the su(2) criterion.
pub fn smoke(seed: u64) -> CliResult<Vec<Check>> {
    let pool = worker_pool()?;
    let mut out: Vec<Check> = pool.install(|| {
        PRESETS
            .par_iter()
            .map(|p| {
                let res = cmd_solve(&p.config(), Some(seed), None).and_then(|s| cmd_verify_state(&s.bytes, None));
                let (passed, detail) = match res {
                    Ok(checks) => {
                        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
                        if failed.is_empty() {
                            (true, format!("{} invariants hold", checks.len()))
                        } else {
                            (false, failed.join("; "))
                        }
                    }
                    Err(e) => (false, e.to_string()),
                };
                Check {
                    name: format!("preset {}", p.name),
                    passed,
                    detail,
                }
            })
            .collect()
    });
    out.push(criterion(1, seed));
    Ok(out)
}

pub fn criterion(id: u8, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ id as u64);
    let out = match id {
        1 => c1(),
        2 => c2(&mut rng),
        3 => c3(&mut rng),
        4 => c4(&mut rng),
        5 => c5(&mut rng),
        6 => c6(&mut rng),
        7 => c7(&mut rng),
        8 => c8(&mut rng),
        9 => c9(&mut rng),
        10 => c10(&mut rng),
        11 => c11(&mut rng),
        12 => c12(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let title = CRITERIA.get(id as usize - 1).copied().unwrap_or("?");
    let (passed, detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check {
        name: format!("criterion {id}"),
        passed,
        detail: format!("{title} ({detail})"),
    }
}

/// Ok(detail) on pass, Err(detail) on failure.
type Outcome = Result<String, String>;

fn ctx<T, E: fmt::Display>(r: Result<T, E>, at: impl FnOnce() -> String) -> Result<T, String> {
    r.map_err(|e| format!("{}: {e}", at()))
}

/// Running maximum of an error metric and where it occurred; NaN counts as ∞.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: String::new(),
        }
    }

    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > self.value || self.at.is_empty() {
            self.value = self.value.max(v);
            self.at = at();
        }
    }

    fn within(&self, name: &str, tol: f64) -> Outcome {
        if self.value <= tol {
            Ok(format!("{name} {:.1e} ≤ {tol:.0e}", self.value))
        } else {
            Err(format!("{name} {:.2e} > {tol:.0e} at {}", self.value, self.at))
        }
    }
}

/// Running minimum, for quantities bounded below.
struct Least {
    value: f64,
    at: String,
}

impl Least {
    fn new() -> Self {
        Self {
            value: f64::INFINITY,
            at: String::new(),
        }
    }

    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        if v < self.value {
            self.value = v;
            self.at = at();
        }
    }

    fn above(&self, name: &str, bound: f64) -> Outcome {
        if self.value >= bound {
            Ok(format!("{name} {:.3e} ≥ {bound:.0e}", self.value))
        } else {
            Err(format!("{name} {:.3e} < {bound:.0e} at {}", self.value, self.at))
        }
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.is_ok());
    let text = parts.into_iter().map(|p| p.unwrap_or_else(|e| e)).collect::<Vec<_>>().join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn z() -> C64 {
    c64(0.0, 0.0)
}

fn fock(n: usize, g: usize) -> FockSpace {
    FockSpace::new(n, g).expect("fixed Fock sizes are valid")
}

fn single(c: ComponentState) -> VectorState {
    VectorState::new(vec![c], 1.0).expect("one component")
}

/// Canonical β: |β₊| = |β₋| = r, β₃ = r₃e^{i(θ₊+θ₋)/2}.
fn canonical_draw<R: Rng>(rng: &mut R, r: Range<f64>, r3: Range<f64>) -> BetaParams {
    let (r, r3) = (rng.gen_range(r), rng.gen_range(r3));
    let (tp, tm) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
    BetaParams::new(z(), C64::from_polar(r, tp), C64::from_polar(r, tm), C64::from_polar(r3, 0.5 * (tp + tm)))
}

fn scaled_spin(p: &BetaParams, s: f64) -> BetaParams {
    let s = c64(s, 0.0);
    BetaParams::new(p.beta, p.beta_plus * s, p.beta_minus * s, p.beta_3 * s)
}

/// su(2) relations and the Casimir for j = ½..3. Floats carry √k entries, so
/// the Casimir is also checked exactly on the integer squares.
fn c1() -> Outcome {
    let mut rel = Worst::new();
    let mut cas = Worst::new();
    let mut exact_fail = None;
    for two_j in 1..=6u32 {
        let rep = Su2Rep::new(two_j);
        let g = generators(rep);
        let j = rep.j();
        rel.see(su2_relations_error(&g.jp, &g.jm, &g.j3), || format!("j={j}"));
        let want = CMatrix::identity(rep.dim()).scale(c64(j * (j + 1.0), 0.0));
        cas.see(g.casimir().max_abs_diff(&want), || format!("j={j}"));

        let tj = two_j as i64;
        for i in 0..rep.dim() {
            let tm = 2 * i as i64 - tj; // 2m
            // 4⟨m|J₊J₋|m⟩ = (2j+2m)(2j−2m+2); 4C = that + (2m)² − 2(2m)
            let c4 = (tj + tm) * (tj - tm + 2) + tm * tm - 2 * tm;
            if c4 != tj * (tj + 2) {
                exact_fail = Some(format!("4C = {c4} at j={j}, 2m={tm}"));
            }
            if i + 1 < rep.dim() {
                let k4 = (tj - tm) * (tj + tm + 2);
                let e = g.jp[(i + 1, i)].re;
                if (4.0 * e * e - k4 as f64).abs() > 8.0 * f64::EPSILON * k4 as f64 {
                    exact_fail = Some(format!("(J₊)² entry {} vs {}/4 at j={j}, 2m={tm}", e * e, k4));
                }
            }
        }
    }
    all(vec![
        rel.within("relation error", 1e-12),
        cas.within("Casimir deviation", 1e-12),
        match exact_fail {
            None => Ok("integer Casimir identity exact".into()),
            Some(e) => Err(e),
        },
    ])
}

/// Columns of T are β·J eigenvectors with eigenvalue b m, relative to |T col|.
fn eigvec_error(rep: Su2Rep, p: &BetaParams, t: &TMatrix) -> f64 {
    let op = beta_operator(rep, p);
    let scale = p.spin_scale() * (1.0 + rep.j());
    (0..rep.dim())
        .map(|l| {
            let v = t.matrix.column(l);
            let ov = op.matvec(&v);
            let d: Vec<C64> = ov.iter().zip(&v).map(|(a, b)| a - t.b * rep.m(l) * b).collect();
            vnorm(&d) / (vnorm(&v) * scale)
        })
        .fold(0.0, f64::max)
}

fn c2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut routes = Worst::new();
    let mut diag = Worst::new();
    let mut unit = Worst::new();
    let mut draws = 0;
    for two_j in 1..=6u32 {
        let rep = Su2Rep::new(two_j);
        for _ in 0..100 {
            let p = BetaParams::new(z(), in_disk(rng, 1.0), in_disk(rng, 1.0), in_disk(rng, 1.0));
            if p.b().norm() < 1e-3 || p.beta_plus.norm() < 1e-3 || p.beta_minus.norm() < 1e-3 {
                continue;
            }
            draws += 1;
            let tj = ctx(t_matrix_jacobi(rep, &p), || format!("Jacobi T at j={}, {p:?}", rep.j()))?;
            let te = ctx(t_matrix_exp(rep, &p), || format!("exponential T at j={}, {p:?}", rep.j()))?;
            routes.see(tj.matrix.max_abs_diff(&te.matrix) / (1.0 + tj.matrix.max_abs()), || {
                format!("j={}, {p:?}", rep.j())
            });
            diag.see(eigvec_error(rep, &p, &tj), || format!("j={}, {p:?}", rep.j()));
        }
        for _ in 0..50 {
            let p = canonical_draw(rng, 0.05..1.0, -1.0..1.0);
            let t = ctx(t_matrix_jacobi(rep, &p), || format!("canonical T at j={}", rep.j()))?;
            unit.see(t.matrix.adjoint().matmul(&t.matrix).max_abs_diff(&CMatrix::identity(rep.dim())), || {
                format!("j={}, {p:?}", rep.j())
            });
        }
    }
    all(vec![
        Ok(format!("{draws} generic draws")),
        routes.within("Jacobi vs exp", 1e-9),
        diag.within("diagonalization residual", 1e-9),
        unit.within("canonical T†T − I", 1e-10),
    ])
}

fn draw_case<R: Rng>(rng: &mut R, tag: CaseTag, rep: Su2Rep) -> BetaParams {
    let j = rep.j();
    let s = 1.0 / j.max(1.0);
    let beta = in_disk(rng, 2.0);
    let coupling = |rng: &mut R| C64::from_polar(s * rng.gen_range(0.05..1.0), rng.gen_range(-PI..PI));
    // rescale so that j|b| is uniform in (0.1, 2)
    let fit_b = |rng: &mut R, p: BetaParams| {
        let target = rng.gen_range(0.1..2.0);
        scaled_spin(&p, target / (j * p.b().norm()))
    };
    let p = match tag {
        CaseTag::BNonzeroNormal => {
            let p = canonical_draw(rng, 0.05..1.0, -1.0..1.0);
            fit_b(rng, p)
        }
        CaseTag::BNonzeroDiagonalizable => loop {
            let p = BetaParams::new(z(), coupling(rng), coupling(rng), coupling(rng));
            if p.b().norm() > 0.05 && classify(&p, CLASSIFY_TOL) == CaseTag::BNonzeroDiagonalizable {
                break fit_b(rng, p);
            }
        },
        CaseTag::BZeroLowerTriangular => BetaParams::new(z(), coupling(rng), z(), z()),
        CaseTag::BZeroUpperTriangular => BetaParams::new(z(), z(), coupling(rng), z()),
        CaseTag::BZeroFull => {
            let (bp, bm) = (coupling(rng), coupling(rng));
            BetaParams::new(z(), bp, bm, (-4.0 * bp * bm).sqrt())
        }
        CaseTag::AllZero => BetaParams::zero(),
    };
    p.with_beta(beta)
}

const CASES: [CaseTag; 6] = [
    CaseTag::BNonzeroNormal,
    CaseTag::BNonzeroDiagonalizable,
    CaseTag::BZeroLowerTriangular,
    CaseTag::BZeroUpperTriangular,
    CaseTag::BZeroFull,
    CaseTag::AllZero,
];

fn c3(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(64, 8);
    let tol = Tolerances::default();
    let mut res = Worst::new();
    let mut tail = Worst::new();
    let mut states = 0;
    for two_j in 1..=6u32 {
        let rep = Su2Rep::new(two_j);
        for tag in CASES {
            for _ in 0..4 {
                let p = draw_case(rng, tag, rep);
                let at = || format!("{tag} j={}, {p:?}", rep.j());
                let got = classify(&p, CLASSIFY_TOL);
                if got != tag {
                    return Err(format!("classified as {got}: {}", at()));
                }
                let basis = ctx(aes_basis(f, rep, &p), at)?;
                if basis.len() != rep.dim() {
                    return Err(format!("{} states, want {}: {}", basis.len(), rep.dim(), at()));
                }
                let a = build_A(f, rep, &p);
                let m = CMatrix::from_diag(&[p.beta]);
                for s in basis {
                    let r = ctx(eigen_residual(&a, &m, &single(s), &tol), at)?;
                    res.see(r.relative_residual, at);
                    tail.see(r.tail_mass, at);
                    states += 1;
                }
            }
        }
    }
    // closed-form ϑ-case norms
    let f72 = fock(72, 8);
    let mut norms = Worst::new();
    for two_j in 1..=4u32 {
        let rep = Su2Rep::new(two_j);
        for _ in 0..3 {
            let p = draw_case(rng, CaseTag::BZeroFull, rep).with_beta(in_disk(rng, 0.8));
            let at = || format!("j={}, {p:?}", rep.j());
            let closed = ctx(normalization_b0_full(rep, &p, p.beta), at)?;
            let raw = ctx(aes_basis_raw(f72, rep, &p), at)?;
            for (i, s) in raw.iter().enumerate() {
                norms.see((closed[i] - s.norm_sqr()).abs() / s.norm_sqr(), at);
            }
        }
    }
    all(vec![
        Ok(format!("{states} states over 6 families × j = ½..3")),
        res.within("residual", 1e-8),
        tail.within("tail", 1e-10),
        norms.within("ϑ-case norm vs closed form", 1e-8),
    ])
}

fn c4(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(64, 8);
    let rep = Su2Rep::new(2);
    let tol = Tolerances::default();
    let mut res = Worst::new();
    let mut tail = Worst::new();
    let mut sigma = Least::new();
    let mut solved = 0;
    for k in 2..=4usize {
        for normal in [true, false] {
            for variant in 0..3 {
                let mt = if normal {
                    normal_matrix(rng, k, 0.8)
                } else {
                    diagonalizable_matrix(rng, k, 0.8)
                };
                let m = EigenvalueMatrix::new(mt.clone()).map_err(|e| e.to_string())?;
                let p = match variant {
                    0 => BetaParams::zero(),
                    1 => scaled_spin(&canonical_draw(rng, 0.05..0.5, -0.5..0.5), 1.0),
                    _ => draw_case(rng, CaseTag::BNonzeroDiagonalizable, rep).with_beta(z()),
                };
                let p = scaled_spin(&p, 0.5);
                let a = build_A(f, rep, &p);
                let kind = if normal { "normal" } else { "diagonalizable" };
                let at = || format!("K={k} {kind} β-variant {variant}, {p:?}");
                let psi = ctx(solve_general(&m, f, rep, &p, None), at)?;
                let r = ctx(eigen_residual(&a, &mt, &psi, &tol), at)?;
                res.see(r.relative_residual, at);
                tail.see(r.tail_mass, at);
                solved += 1;

                // The solution space is ⊕_l span{scalar AES for λ_l}, of dimension
                // K(2j+1): random constant draws up to that size are independent.
                // The (2j+1)^K unit-constant tuples give ⊕_l v_l with one basis
                // vector per block, which span K(2j+1) − (K−1) dimensions.
                let dim = k * rep.dim();
                let stack = |cs: &[IntegrationConstants]| ctx(solve_general(&m, f, rep, &p, Some(cs)), at).map(|s| s.stacked());
                let mut cols = Vec::new();
                for _ in 0..dim.min(10) {
                    let cs: Vec<_> = (0..k).map(|_| random_constants(rng, rep)).collect();
                    cols.push(stack(&cs)?);
                }
                let sv = singular_values(&columns(&cols));
                sigma.see(sv.iter().copied().fold(f64::INFINITY, f64::min), at);

                let mut cols = Vec::new();
                for t in 0..rep.dim().pow(k as u32) {
                    let cs: Vec<_> =
                        (0..k).map(|l| IntegrationConstants::unit(rep, t / rep.dim().pow(l as u32) % rep.dim())).collect();
                    cols.push(stack(&cs)?);
                }
                let sv = singular_values(&columns(&cols));
                let top = sv.iter().copied().fold(0.0, f64::max);
                let rank = sv.iter().filter(|&&x| x > 1e-8 * top).count();
                if rank != dim - (k - 1) {
                    return Err(format!("lattice rank {rank}, want K(2j+1) − (K−1) = {}: {}", dim - (k - 1), at()));
                }
            }
        }
    }
    all(vec![
        Ok(format!("{solved} vector states, K = 2..4; unit-constant lattices have rank K(2j+1) − (K−1)")),
        res.within("residual", 1e-8),
        tail.within("tail", 1e-10),
        sigma.above("σ_min over random constant draws", 1e-6),
    ])
}

fn columns(cols: &[Vec<C64>]) -> CMatrix {
    CMatrix::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r])
}

fn c5(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(64, 8);
    let rep = Su2Rep::new(1);
    let mut unitary = Worst::new();
    let mut eigs = Worst::new();
    let mut norm = Worst::new();
    let mut fid = Least::new();
    for _ in 0..10 {
        let (r, t, ph, ps) =
            (rng.gen_range(0.2..1.5), rng.gen_range(0.0..PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
        let q = QuaternionPolar::new(r, t, ph, ps).map_err(|e| e.to_string())?;
        let at = || format!("r={r}, θ={t}, φ={ph}, ψ={ps}");
        let m = quat_matrix(&q);
        unitary.see(m.matmul(&m.adjoint()).max_abs_diff(&CMatrix::identity(2).scale(c64(r * r, 0.0))), at);
        let em = ctx(quat_to_matrix(&q), at)?;
        let ev = ctx(em.eigenvalues(), at)?.to_vec();
        let (e1, e2) = (C64::from_polar(r, t), C64::from_polar(r, -t));
        let err = ((ev[0] - e1).norm().max((ev[1] - e2).norm())).min((ev[0] - e2).norm().max((ev[1] - e1).norm()));
        eigs.see(err, at);

        let ground = VectorState::new(
            matched_ground(&q)
                .iter()
                .map(|g| {
                    let mut amps = vec![z(); f.dim() * 2];
                    amps[..2].copy_from_slice(&g[..2]);
                    ComponentState::new(f, rep, amps)
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?,
            1.0,
        )
        .map_err(|e| e.to_string())?;
        let n = ctx(norm_constant_series(&em, &ground), at)?;
        let want = 2.0 * (r * r).exp();
        norm.see((n - want).abs() / want, at);

        let rot = ctx(canonical_quaternionic_vcs(&q, f), at)?;
        let ser = ctx(quaternionic_series(&q, f, &matched_ground(&q)), at)?;
        fid.see(ctx(rot.fidelity(&ser), at)?, at);
    }
    all(vec![
        unitary.within("M̃M̃† − r²I", 1e-12),
        eigs.within("eigenvalues vs re^{±iθ}", 1e-12),
        norm.within("𝒩 vs 2e^{r²} (relative)", 1e-10),
        fid.above("fidelity of rotation and series routes", 1.0 - 1e-9),
    ])
}

fn random_families<R: Rng>(rng: &mut R) -> Vec<Family> {
    let ang = |rng: &mut R| rng.gen_range(-PI..PI);
    let pos = |rng: &mut R| rng.gen_range(0.1..0.9);
    let mut v = vec![
        Family::XPositiveHyperbolic { x: pos(rng), alpha: pos(rng), theta_plus: ang(rng), theta_minus: ang(rng) },
        Family::XPositiveUpper { x: pos(rng), theta_minus: ang(rng) },
        Family::XNegativeHyperbolic { x: -pos(rng), alpha: pos(rng), theta_plus: ang(rng), theta_minus: ang(rng) },
        Family::XNegativeLower { x: -pos(rng), theta_plus: ang(rng) },
        Family::RhoGeneric { r: pos(rng), theta_plus: ang(rng), theta_minus: ang(rng), r3: pos(rng), theta3: ang(rng) },
        Family::FullPlusOnly { r_plus: pos(rng), theta_plus: ang(rng), r3: pos(rng), theta3: ang(rng) },
        Family::FullMinusOnly { r_minus: pos(rng), theta_minus: ang(rng), r3: pos(rng), theta3: ang(rng) },
    ];
    let (rp, rm) = (pos(rng), pos(rng));
    v.push(Family::FullGeneric {
        r_plus: rp,
        r_minus: rm + 0.05,
        theta_plus: ang(rng),
        theta_minus: ang(rng),
        r3: pos(rng),
        theta3: ang(rng),
    });
    for k in 0..2 {
        v.push(Family::RhoBZero { r: pos(rng), theta_plus: ang(rng), theta_minus: ang(rng), k });
        v.push(Family::FullBZero { r_plus: rp, r_minus: rm + 0.05, theta_plus: ang(rng), theta_minus: ang(rng), k });
    }
    v
}

fn c6(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(24, 1);
    let tol = Tolerances {
        residual: 1e-12,
        ..Tolerances::default()
    };
    let mut comm = Worst::new();
    for i in 0..200 {
        let rep = Su2Rep::new(1 + i % 4);
        let p = BetaParams::new(z(), in_disk(rng, 1.0), in_disk(rng, 1.0), in_disk(rng, 1.0));
        let at = || format!("j={}, {p:?}", rep.j());
        let r = ctx(verify_commutator(f, rep, &p, &tol), at)?;
        comm.see(r.relative_residual, at);
    }
    let mut stated = Worst::new();
    let mut families = 0;
    for _ in 0..5 {
        for fam in random_families(rng) {
            let at = || format!("{fam:?}");
            let p = ctx(fam.params(), at)?;
            let s = fam.stated();
            let r = commutator_report(&p);
            stated.see((r.x - s.x).abs().max((r.c_plus - s.c_plus).norm()), at);
            if r.scenario.label() != fam.scenario_label() {
                return Err(format!("scenario {} vs stated {}: {}", r.scenario.label(), fam.scenario_label(), at()));
            }
            if classify(&p, CLASSIFY_TOL).b_is_zero() != s.b_zero {
                return Err(format!("b = 0 flag disagrees: {}", at()));
            }
            let r = ctx(verify_commutator(f, Su2Rep::new(2), &p, &tol), at)?;
            comm.see(r.relative_residual, at);
            families += 1;
        }
    }
    all(vec![
        Ok(format!("200 random β, {families} family draws over 12 families")),
        comm.within("commutator residual", 1e-12),
        stated.within("x, c₊ vs stated", 1e-12),
    ])
}

fn c7(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(12, 1);
    let mut rel = Worst::new();
    let mut bt = Worst::new();
    let mut rebuilt = Worst::new();
    for two_j in 1..=6u32 {
        let rep = Su2Rep::new(two_j);
        for k in 0..2u8 {
            for _ in 0..3 {
                let (tp, tm) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
                let fams = [
                    Family::RhoBZero { r: rng.gen_range(0.1..1.0), theta_plus: tp, theta_minus: tm, k },
                    Family::FullBZero {
                        r_plus: rng.gen_range(0.1..1.0),
                        r_minus: rng.gen_range(0.1..1.0),
                        theta_plus: tp,
                        theta_minus: tm,
                        k,
                    },
                ];
                for fam in fams {
                    let at = || format!("j={}, {fam:?}", rep.j());
                    let p = ctx(fam.params(), at)?;
                    let tg = ctx(transformed_generators(rep, &p, k), at)?;
                    rel.see(su2_relations_error(&tg.jp, &tg.jm, &tg.j3), at);
                    bt.see((tg.b_transformed - c64(1.0, 0.0)).norm(), at);
                    let a = &kron(&annihilator(f), &CMatrix::identity(rep.dim()))
                        + &kron(&CMatrix::identity(f.dim()), &tg.jm.scale(tg.b_plus));
                    rebuilt.see(a.max_abs_diff(build_A(f, rep, &p).matrix()), at);
                }
            }
        }
    }
    all(vec![
        rel.within("relations of 𝕁", 1e-12),
        bt.within("|b̃ − 1|", 1e-12),
        rebuilt.within("a + ℬ₊𝕁₋ vs 𝔸", 1e-12),
    ])
}

fn random_constants<R: Rng>(rng: &mut R, rep: Su2Rep) -> IntegrationConstants {
    loop {
        let v: Vec<C64> = (0..rep.dim()).map(|_| in_disk(rng, 1.0)).collect();
        if vnorm(&v) > 0.1 {
            return IntegrationConstants::new(v).expect("non-zero constants");
        }
    }
}

fn c8(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(64, 8);
    let tol = Tolerances::default();
    let mut res = Worst::new();
    let mut count = 0;
    for two_j in 1..=3u32 {
        let rep = Su2Rep::new(two_j);
        let a0 = build_A(f, rep, &BetaParams::zero());
        for _ in 0..5 {
            let beta = in_disk(rng, 1.0);
            let bp = C64::from_polar(rng.gen_range(0.05..1.0), rng.gen_range(-PI..PI));
            let (c1, c2) = (random_constants(rng, rep), random_constants(rng, rep));
            let at = || format!("j={}, β={beta}, β₊={bp}", rep.j());
            let psi = ctx(supercoherent_pair(f, rep, beta, bp, &c1, &c2), at)?;
            let m = CMatrix::from_rows(&[vec![beta, -bp], vec![z(), beta]]);
            let r = ctx(eigen_residual(&a0, &m, &psi, &tol), at)?;
            res.see(r.relative_residual.max(if r.passed { 0.0 } else { f64::INFINITY }), at);
            count += 1;
        }
    }
    all(vec![Ok(format!("{count} pairs")), res.within("residual", 1e-8)])
}

fn c9(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(56, 8);
    let tol = Tolerances::default();
    let mut gap = Worst::new();
    let mut control = Least::new();
    let mut count = 0;
    for two_j in 1..=4u32 {
        let rep = Su2Rep::new(two_j);
        for _ in 0..2 {
            let bp = C64::from_polar(rng.gen_range(0.05..0.4), rng.gen_range(-PI..PI));
            let p = BetaParams::new(z(), bp, z(), z());
            let a = build_A(f, rep, &p);
            let lam = in_disk(rng, 0.6);
            let at = || format!("j={}, β₊={bp}, λ={lam}", rep.j());
            let m1 = ctx(EigenvalueMatrix::new(CMatrix::from_diag(&[lam])), at)?;
            for m in rep.m_values() {
                let psi = ctx(intelligent_family(&m1, f, rep, &p, &[m]), at)?;
                let r = ctx(sr_check(&psi, &a, &tol), at)?;
                gap.see(r.gap.abs(), at);
                count += 1;
            }
            let ml: Vec<f64> = (0..2).map(|_| rep.m(rng.gen_range(0..rep.dim()))).collect();
            let mi = ctx(EigenvalueMatrix::new(CMatrix::identity(2).scale(lam)), at)?;
            let psi = ctx(intelligent_family(&mi, f, rep, &p, &ml), at)?;
            let r = ctx(sr_check(&psi, &a, &tol), at)?;
            gap.see(r.gap.abs(), at);
            count += 1;

            // control: 𝔸† moves the state off the eigenvalue equation
            let low = ctx(intelligent_family(&m1, f, rep, &p, &[rep.m(0)]), at)?;
            let moved = ctx(low.components()[0].apply(&a.matrix().adjoint()).and_then(|c| c.normalized()), at)?;
            let r = ctx(sr_check(&single(moved), &a, &tol), at)?;
            if r.saturated {
                return Err(format!("control saturates (gap {:.2e}): {}", r.gap, at()));
            }
            control.see(r.gap, at);
        }
    }
    all(vec![
        Ok(format!("{count} intelligent states")),
        gap.within("SR gap", 1e-6),
        control.above("control gap", 1e-3),
    ])
}

/// ‖(a + α₊a† + β·J − β)Φ‖/‖Φ‖ over the guarded levels.
fn lifted_residual(alpha: C64, p: &BetaParams, phi: &ComponentState) -> f64 {
    let f = phi.fock();
    let a = build_A(f, phi.rep(), p);
    let ad = kron(&creator(f), &CMatrix::identity(phi.rep().dim()));
    let op = &(a.matrix() + &ad.scale(alpha)) - &CMatrix::identity(a.matrix().rows()).scale(p.beta);
    let r = op.matvec(phi.amplitudes());
    let keep = f.checked_dim() * phi.rep().dim();
    (r[..keep].iter().map(|z| z.norm_sqr()).sum::<f64>() / phi.norm_sqr()).sqrt()
}

fn c10(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(96, 16);
    let mut res = Worst::new();
    let mut count = 0;
    for two_j in 1..=2u32 {
        let rep = Su2Rep::new(two_j);
        for _ in 0..3 {
            let p = BetaParams::new(in_disk(rng, 0.4), in_disk(rng, 0.3), in_disk(rng, 0.3), in_disk(rng, 0.4));
            let at = || format!("j={}, {p:?}", rep.j());
            let basis = ctx(aes_basis_raw(f, rep, &p), at)?;
            for _ in 0..3 {
                let alpha = in_disk(rng, 0.3);
                for psi in &basis {
                    let phi = ctx(squeeze_lift(alpha, psi), at)?;
                    res.see(lifted_residual(alpha, &p, &phi), || format!("α₊={alpha}, {}", at()));
                    count += 1;
                }
            }
        }
    }
    all(vec![Ok(format!("{count} lifted states")), res.within("lifted residual", 1e-7)])
}

fn c11(rng: &mut ChaCha8Rng) -> Outcome {
    let f = fock(64, 8);
    let rep = Su2Rep::new(1);
    let mut err = Worst::new();
    for _ in 0..5 {
        let p = canonical_draw(rng, 0.1..0.5, -0.5..0.5);
        let at = || format!("{p:?}");
        let g = ctx(quaternionic_ground(&p, f), at)?;
        let ladder = ctx(energy_ladder(&g, &build_A(f, rep, &p), 5), at)?;
        for (n, e) in ladder.energies.iter().enumerate() {
            err.see((e - n as f64).abs(), || format!("n={n}, {}", at()));
        }
    }
    all(vec![err.within("|E_n − n|, n ≤ 5", 1e-6)])
}

fn c12(seed: u64) -> Outcome {
    let mut reruns = 0;
    for p in PRESETS {
        let cfg: RunConfig = p.config();
        let a = ctx(cmd_solve(&cfg, Some(seed), None), || p.name.to_string())?;
        let b = ctx(cmd_solve(&cfg, Some(seed), None), || p.name.to_string())?;
        if a.bytes != b.bytes {
            return Err(format!("{}: reruns differ", p.name));
        }
        let back = ctx(StateFile::from_bytes(&a.bytes).and_then(|s| s.to_bytes()), || p.name.to_string())?;
        if back != a.bytes {
            return Err(format!("{}: parse/serialize round trip changes bytes", p.name));
        }
        reruns += 1;
    }
    Ok(format!("{reruns} presets rerun and round-tripped byte for byte"))
}
