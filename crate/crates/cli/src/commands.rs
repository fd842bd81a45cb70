//! The four subcommands as library calls; `main` only parses flags and
//! maps results to exit codes.

use serde::Serialize;
use vaes_core::aes::{IntegrationConstants, CLASSIFY_TOL};
use vaes_core::algebra::{build_A, commutator_report, Scenario};
use vaes_core::su2::{classify, passing_matrix};
use vaes_core::vaes::{
    bneq0_family, intelligent_family, intelligent_symmetric, solve_annihilator, solve_annihilator_series,
    solve_general, vcs_displacement_factored, vcs_displacement_form, Classification, EigenvalueMatrix, VectorState,
    MAX_DISPLACEMENT_DIM,
};
use vaes_core::quaternion::generalized_quaternionic_vcs;
use vaes_core::verify::{eigen_residual, ResidualReport};
use vaes_core::C64;

use crate::config::{matrix_rows, pair, unpair, Pair, Resolved, Route, RunConfig, TolSpec};
use crate::presets::PRESETS;
use crate::state::StateFile;
use crate::suite::Check;
use crate::{json, CliError, CliResult};

pub struct Solved {
    pub state: VectorState,
    pub report: ResidualReport,
}

/// Runs the solver selected by the route and measures the residual of
/// 𝔸Ψ = (M̃ + βI)Ψ on the guarded levels.
pub fn solve_resolved(r: &Resolved) -> CliResult<Solved> {
    let m = EigenvalueMatrix::new(r.effective_mtilde())?;
    let p = r.spin_params();
    let (f, rep, k) = (r.fock, r.rep, r.k());
    let consts = r.constants.as_deref();
    let state = match r.route {
        Route::ExpressionOne => solve_annihilator(&m, f, rep, consts)?,
        Route::ExpressionTwo => solve_annihilator_series(&m, f, rep, &r.m_list)?,
        Route::QuaternionHalf => {
            let q = r.quaternion.as_ref().expect("validated at resolution");
            let default = [IntegrationConstants::unit(rep, 0), IntegrationConstants::unit(rep, 1)];
            let c = consts.unwrap_or(&default);
            generalized_quaternionic_vcs(q, f, &p, [&c[0], &c[1]])?
        }
        Route::Displacement if k * f.dim() * rep.dim() <= MAX_DISPLACEMENT_DIM => {
            vcs_displacement_form(&m, f, rep, &p, &r.m_list)?
        }
        Route::Displacement => vcs_displacement_factored(&m, f, rep, &p, &r.m_list)?,
        Route::IntelligentTwo => intelligent_family(&m, f, rep, &p, &r.m_list)?,
        Route::IntelligentThree => intelligent_symmetric(&m, f, rep, &p)?,
        Route::MasterNonUnitary => bneq0_family(&m, f, rep, &p, &r.m_list)?,
        Route::General => solve_general(&m, f, rep, &p, consts)?,
    };
    let report = residual(r, &state)?;
    Ok(Solved { state, report })
}

pub fn residual(r: &Resolved, psi: &VectorState) -> CliResult<ResidualReport> {
    let a = build_A(r.fock, r.rep, &r.spin_params());
    let ctx = format!("{} ({})", r.label, r.route.label());
    let mut rep = eigen_residual(&a, &r.effective_mtilde(), psi, &r.tol)?;
    rep.context = ctx;
    Ok(rep)
}

fn with_tol(mut r: Resolved, tol: Option<f64>) -> CliResult<Resolved> {
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
        r.tol.residual = t;
        let ts = r.canonical.tolerances.get_or_insert(TolSpec::default());
        ts.residual = Some(t);
    }
    Ok(r)
}

pub struct SolveOutcome {
    pub file: StateFile,
    pub bytes: Vec<u8>,
    pub report: ResidualReport,
}

pub fn cmd_solve(cfg: &RunConfig, seed: Option<u64>, tol: Option<f64>) -> CliResult<SolveOutcome> {
    let r = with_tol(cfg.resolve(seed)?, tol)?;
    let s = solve_resolved(&r)?;
    let file = StateFile::new(&r, &s.state, &s.report);
    let bytes = file.to_bytes()?;
    Ok(SolveOutcome {
        file,
        bytes,
        report: s.report,
    })
}

/// Up to 12 significant digits, trailing zeros dropped.
pub fn short(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let v: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{v}")
}

/// Complex number with parts below 1e−12 of its modulus dropped.
pub fn short_c(z: C64) -> String {
    let tiny = 1e-12 * z.norm();
    let (re, im) = (
        if z.re.abs() <= tiny { 0.0 } else { z.re },
        if z.im.abs() <= tiny { 0.0 } else { z.im },
    );
    match (re == 0.0, im == 0.0) {
        (true, true) => "0".into(),
        (false, true) => short(re),
        (true, false) => format!("{}i", short(im)),
        (false, false) if im < 0.0 => format!("{}-{}i", short(re), short(-im)),
        (false, false) => format!("{}+{}i", short(re), short(im)),
    }
}

/// Classification of a configuration; `text()` is the printed form and the
/// JSON form exports M̃, its eigen-data and the spin passing matrix.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub summary: String,
    pub case: String,
    pub b: Pair,
    pub scenario: String,
    pub x: f64,
    pub rho: f64,
    pub nu: f64,
    pub mtilde_class: String,
    pub family: String,
    pub j: f64,
    #[serde(rename = "K")]
    pub k: usize,
    /// β, β₊, β₋, β₃
    pub beta: [Pair; 4],
    /// M̃ + βI, the matrix the solver uses.
    pub mtilde: Vec<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<Pair>>,
    /// Columns are eigenvectors of M̃.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passing: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<String>,
    /// T with (β·J)T = T·bJ₃, when b ≠ 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_matrix: Option<Vec<Vec<Pair>>>,
}

impl ClassifyReport {
    pub fn text(&self) -> String {
        let mut out = format!("{}\nfamily: {}\nj: {}\nK: {}\n", self.summary, self.family, self.j, self.k);
        if let Some(ev) = &self.eigenvalues {
            let ev: Vec<String> = ev.iter().map(|p| short_c(unpair(p))).collect();
            out += &format!("eigenvalues: {}\n", ev.join(", "));
        }
        if let Some(d) = &self.defect {
            out += &format!("defect: {d}\n");
        }
        out
    }
}

/// Case, b, commutator scenario and M̃ class in one summary line.
pub fn cmd_classify(cfg: &RunConfig, seed: Option<u64>) -> CliResult<ClassifyReport> {
    let r = cfg.resolve(seed)?;
    let p = r.spin_params();
    let tag = classify(&p, CLASSIFY_TOL);
    let b = if tag.b_is_zero() { C64::new(0.0, 0.0) } else { p.b() };
    let com = commutator_report(&p);
    let scenario = match com.scenario {
        Scenario::Canonical => "Canonical".to_string(),
        Scenario::ExtendedX { x } => format!("ExtendedX, x={}", short(x)),
        Scenario::NonCanonicalRho { rho, nu } => format!("NonCanonicalRho, rho={}, nu={}", short(rho), short(nu)),
        Scenario::FullNonCanonical { x, rho, nu } => {
            format!("FullNonCanonical, x={}, rho={}, nu={}", short(x), short(rho), short(nu))
        }
    };
    let m = EigenvalueMatrix::new(r.effective_mtilde())?;
    let (eigenvalues, passing, defect) = match m.classification() {
        Classification::Defective => {
            let d = m.defect().expect("defective matrices carry a report");
            let text = format!(
                "eigenvalue {} with algebraic multiplicity {}, geometric {}",
                short_c(d.eigenvalue),
                d.algebraic,
                d.geometric
            );
            (None, None, Some(text))
        }
        _ => {
            let d = m.diagonalization()?;
            (Some(d.diagonal.iter().map(|&z| pair(z)).collect()), Some(matrix_rows(&d.passing)), None)
        }
    };
    let t_matrix = if tag.b_is_zero() {
        None
    } else {
        Some(matrix_rows(&passing_matrix(r.rep, &p)?.matrix))
    };
    Ok(ClassifyReport {
        summary: format!("{tag}, b={}, {scenario}, {}", short_c(b), m.classification().label()),
        case: tag.label().to_string(),
        b: pair(b),
        scenario: com.scenario.label().to_string(),
        x: com.x,
        rho: com.rho,
        nu: com.nu,
        mtilde_class: m.classification().label().to_string(),
        family: r.route.label().to_string(),
        j: r.rep.j(),
        k: r.k(),
        beta: [pair(r.beta.beta), pair(p.beta_plus), pair(p.beta_minus), pair(p.beta_3)],
        mtilde: matrix_rows(m.matrix()),
        eigenvalues,
        passing,
        defect,
        t_matrix,
    })
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Re-runs every invariant on a state file: metadata consistency, shape,
/// norm, tail, eigen-residual, the recorded report, and reproduction from
/// the embedded config.
pub fn cmd_verify_state(bytes: &[u8], tol: Option<f64>) -> CliResult<Vec<Check>> {
    let file = StateFile::from_bytes(bytes)?;
    let md = &file.metadata;
    let mut out = Vec::new();

    let r = match md.config.resolve(None).and_then(|r| with_tol(r, tol)) {
        Ok(r) => r,
        Err(e) => {
            out.push(check("metadata", false, format!("embedded config does not resolve: {e}")));
            return Ok(out);
        }
    };
    let consistent = md.j == r.rep.j()
        && md.fock_dim == r.fock.dim()
        && md.guard == r.fock.guard()
        && md.k == r.k()
        && md.family == r.route.label();
    out.push(check(
        "metadata",
        consistent,
        if consistent {
            format!("j = {}, N = {}, guard = {}, K = {}, {}", md.j, md.fock_dim, md.guard, md.k, md.family)
        } else {
            "header fields disagree with the embedded config".into()
        },
    ));

    let psi = match file.vector_state() {
        Ok(psi) => psi,
        Err(CliError::Invariant(msg)) => {
            out.push(check("shape", false, msg));
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    out.push(check("shape", true, format!("{} × {} × {}", psi.k(), md.fock_dim, r.rep.dim())));

    let dn = (psi.norm_sqr() - 1.0).abs();
    out.push(check("norm", dn <= 1e-10, format!("|⟨Ψ|Ψ⟩ − 1| = {dn:.2e}")));
    let tail = psi.tail_mass();
    out.push(check("tail", tail <= r.tol.tail, format!("{tail:.2e} (bound {:.0e})", r.tol.tail)));

    let rep = residual(&r, &psi)?;
    out.push(check(
        "eigen-residual",
        rep.relative_residual <= r.tol.residual,
        format!("{:.2e} (bound {:.0e})", rep.relative_residual, r.tol.residual),
    ));
    let recorded = md.residual.passed && md.residual.guarded_dim == rep.guarded_dim;
    out.push(check(
        "recorded-report",
        recorded,
        format!("recorded {:.2e}, passed = {}", md.residual.relative_residual, md.residual.passed),
    ));

    match solve_resolved(&r) {
        Ok(fresh) => {
            let diff = fresh
                .state
                .stacked()
                .iter()
                .zip(psi.stacked())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let dnc = (fresh.state.norm_constant - md.norm_constant).abs() / md.norm_constant.abs().max(1e-300);
            out.push(check(
                "reproduction",
                diff <= 1e-12 && dnc <= 1e-12,
                format!("max |Δ amplitude| = {diff:.2e}, relative Δ𝒩 = {dnc:.2e}"),
            ));
        }
        Err(e) => out.push(check("reproduction", false, format!("re-solve failed: {e}"))),
    }
    Ok(out)
}

/// Solves the config and verifies the resulting file.
pub fn cmd_verify_config(cfg: &RunConfig, seed: Option<u64>, tol: Option<f64>) -> CliResult<Vec<Check>> {
    let s = cmd_solve(cfg, seed, tol)?;
    cmd_verify_state(&s.bytes, tol)
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    summary: &'static str,
    config: RunConfig,
}

/// Table of presets, and the same catalog as JSON.
pub fn cmd_catalog() -> CliResult<(String, Vec<u8>)> {
    let mut table = String::new();
    let mut entries = Vec::new();
    for p in PRESETS {
        let r = RunConfig::preset(p.name).resolve(None)?;
        table += &format!(
            "{:<36} {:<34} j={:<4} K={}  {}\n",
            p.name,
            r.route.label(),
            r.rep.j(),
            r.k(),
            p.summary
        );
        entries.push(CatalogEntry {
            name: p.name,
            summary: p.summary,
            config: p.config(),
        });
    }
    Ok((table, json::to_bytes(&entries)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(short(2.0), "2");
        assert_eq!(short(-1.0000000000000002), "-1");
        assert_eq!(short(0.25), "0.25");
        assert_eq!(short_c(C64::new(1e-17, 2.0)), "2i");
        assert_eq!(short_c(C64::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(short_c(C64::new(0.0, 0.0)), "0");
    }
}
