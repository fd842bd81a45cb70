//! Run configuration: the JSON schema, preset merging and validation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use vaes_core::aes::IntegrationConstants;
use vaes_core::fock::FockSpace;
use vaes_core::quaternion::{beta_from_quat, quat_matrix, QuaternionPolar};
use vaes_core::su2::{BetaParams, Su2Rep};
use vaes_core::verify::Tolerances;
use vaes_core::{CMatrix, C64};

use crate::{presets, sample, CliError, CliResult};

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn unpair(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

/// Largest Fock dimension a config may ask for.
pub const MAX_FOCK_DIM: usize = 2048;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Solver route, keyed by the equation label of the construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<usize>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// β, β₊, β₋, β₃
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<[Pair; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtilde: Option<MtildeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<f64>>,
    /// φ₀ table: one row of 2j+1 values per component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MtildeSpec {
    Entries(Vec<Vec<Pair>>),
    Quaternion { quaternion: QuatSpec },
    Random {
        random: RandomKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuatSpec {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RandomKind {
    Normal,
    Diagonalizable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_gap: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Ũ e^{D̃a†}|Ψ̃(0)⟩ for a Ψ = M̃Ψ; routes the defective 2×2 block to the supercoherent pair.
    ExpressionOne,
    /// Σ M̃ⁿ/√n! on the |n⟩⊗|j, m_s⟩ stack.
    ExpressionTwo,
    /// Generalized quaternionic VCS, K = 2, j = ½.
    QuaternionHalf,
    /// exp[M̃𝔸† − M̃†𝔸] on the displaced, rotated ground stack.
    Displacement,
    /// Intelligent family, eigenstates of a + β₊J₋ (or the mirrored case).
    IntelligentTwo,
    /// Symmetric arctan form of the intelligent family.
    IntelligentThree,
    /// D(M̃) T exp[½(M̃b* − M̃†b)J₃] for b ≠ 0.
    MasterNonUnitary,
    /// P-mixed scalar eigenstates for any diagonalizable M̃.
    General,
}

pub const ROUTES: [Route; 8] = [
    Route::ExpressionOne,
    Route::ExpressionTwo,
    Route::QuaternionHalf,
    Route::Displacement,
    Route::IntelligentTwo,
    Route::IntelligentThree,
    Route::MasterNonUnitary,
    Route::General,
];

impl Route {
    pub fn label(&self) -> &'static str {
        match self {
            Route::ExpressionOne => "VCS-expression-one",
            Route::ExpressionTwo => "VCS-expression-two",
            Route::QuaternionHalf => "VCS-j=1/2",
            Route::Displacement => "general-set-VCS-matrix-form-end",
            Route::IntelligentTwo => "vector-algebra-HW-BG-two",
            Route::IntelligentThree => "vector-algebra-HW-BG-three",
            Route::MasterNonUnitary => "master-vector-states-non-unitary",
            Route::General => "vector-matrix-eigenvalue-total",
        }
    }

    pub fn from_label(s: &str) -> CliResult<Self> {
        ROUTES.iter().copied().find(|r| r.label() == s).ok_or_else(|| {
            let known: Vec<_> = ROUTES.iter().map(|r| r.label()).collect();
            CliError::Config(format!("unknown family {s:?}; known: {}", known.join(", ")))
        })
    }

    fn uses_m_list(&self) -> bool {
        matches!(
            self,
            Route::ExpressionTwo | Route::Displacement | Route::IntelligentTwo | Route::MasterNonUnitary
        )
    }

    fn uses_constants(&self) -> bool {
        matches!(self, Route::ExpressionOne | Route::QuaternionHalf | Route::General)
    }
}

/// A validated configuration, ready for the solvers.
#[derive(Clone, Debug)]
pub struct Resolved {
    /// Preset name, or "custom".
    pub label: String,
    pub route: Route,
    pub rep: Su2Rep,
    pub fock: FockSpace,
    /// β (scalar) and the spin couplings β₊, β₋, β₃.
    pub beta: BetaParams,
    /// M̃ as configured; the equation solved is 𝔸Ψ = (M̃ + βI)Ψ.
    pub mtilde: CMatrix,
    pub quaternion: Option<QuaternionPolar>,
    pub m_list: Vec<f64>,
    pub constants: Option<Vec<IntegrationConstants>>,
    pub tol: Tolerances,
    pub seed: u64,
    /// Self-contained equivalent config (explicit M̃, no preset).
    pub canonical: RunConfig,
}

impl Resolved {
    pub fn k(&self) -> usize {
        self.mtilde.rows()
    }

    /// β₊, β₋, β₃ with the scalar β removed: 𝔸 = a + β₊J₋ + β₋J₊ + β₃J₃.
    pub fn spin_params(&self) -> BetaParams {
        self.beta.with_beta(C64::new(0.0, 0.0))
    }

    /// M̃ + βI
    pub fn effective_mtilde(&self) -> CMatrix {
        &self.mtilde + &CMatrix::identity(self.k()).scale(self.beta.beta)
    }
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn finite(xs: impl IntoIterator<Item = f64>, what: &str) -> CliResult<()> {
    if xs.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(cfg_err(format!("{what} contains a non-finite number")))
    }
}

impl RunConfig {
    pub fn from_json(bytes: &[u8]) -> CliResult<Self> {
        crate::json::from_slice(bytes, "config")
    }

    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    /// Preset defaults overlaid with the fields set here.
    pub fn merged(&self) -> CliResult<RunConfig> {
        let Some(name) = &self.preset else {
            if self.mtilde.is_none() {
                return Err(cfg_err("exactly one of \"mtilde\" and \"preset\" must be supplied (got neither)"));
            }
            return Ok(self.clone());
        };
        if self.mtilde.is_some() {
            return Err(cfg_err("exactly one of \"mtilde\" and \"preset\" must be supplied (got both)"));
        }
        let base = presets::find(name)?.config();
        Ok(RunConfig {
            preset: Some(name.clone()),
            family: self.family.clone().or(base.family),
            j: self.j.or(base.j),
            fock_dim: self.fock_dim.or(base.fock_dim),
            guard: self.guard.or(base.guard),
            k: self.k.or(base.k),
            beta: self.beta.or(base.beta),
            mtilde: base.mtilde,
            m_list: self.m_list.clone().or(base.m_list),
            constants: self.constants.clone().or(base.constants),
            tolerances: self.tolerances.or(base.tolerances),
            seed: self.seed.or(base.seed),
        })
    }

    /// Validates and resolves; `seed` (from the command line) overrides the config seed.
    pub fn resolve(&self, seed: Option<u64>) -> CliResult<Resolved> {
        let cfg = self.merged()?;
        let route = Route::from_label(cfg.family.as_deref().unwrap_or(Route::General.label()))?;
        let j = cfg.j.ok_or_else(|| cfg_err("missing \"j\""))?;
        let rep = Su2Rep::from_j(j)?;
        let n = cfg.fock_dim.ok_or_else(|| cfg_err("missing \"fock_dim\""))?;
        let guard = cfg.guard.ok_or_else(|| cfg_err("missing \"guard\""))?;
        if n > MAX_FOCK_DIM {
            return Err(cfg_err(format!("fock_dim {n} exceeds {MAX_FOCK_DIM}")));
        }
        if guard >= n {
            return Err(cfg_err(format!("guard ({guard}) must be smaller than fock_dim ({n})")));
        }
        let fock = FockSpace::new(n, guard)?;
        let seed = seed.or(cfg.seed).unwrap_or(0);

        let spec = cfg.mtilde.clone().expect("merged configs carry an M̃");
        let (mtilde, quaternion) = match &spec {
            MtildeSpec::Entries(rows) => (entries_matrix(rows)?, None),
            MtildeSpec::Quaternion { quaternion: q } => {
                finite([q.r, q.theta, q.phi, q.psi], "quaternion")?;
                let qp = QuaternionPolar::new(q.r, q.theta, q.phi, q.psi)?;
                (quat_matrix(&qp), Some(qp))
            }
            MtildeSpec::Random { random, radius } => {
                let k = cfg.k.ok_or_else(|| cfg_err("a random M̃ needs \"K\""))?;
                if k == 0 || k > 16 {
                    return Err(cfg_err(format!("K = {k} outside 1..=16")));
                }
                let radius = radius.unwrap_or(0.8);
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(cfg_err("random M̃ radius must be positive"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = match random {
                    RandomKind::Normal => sample::normal_matrix(&mut rng, k, radius),
                    RandomKind::Diagonalizable => sample::diagonalizable_matrix(&mut rng, k, radius),
                };
                (m, None)
            }
        };
        let k = mtilde.rows();
        if let Some(ck) = cfg.k {
            if ck != k {
                return Err(cfg_err(format!("K = {ck} but M̃ is {k}x{k}")));
            }
        }

        let beta = match (&cfg.beta, &quaternion) {
            (Some(b), _) => {
                finite(b.iter().flatten().copied(), "beta")?;
                BetaParams::new(unpair(&b[0]), unpair(&b[1]), unpair(&b[2]), unpair(&b[3]))
            }
            (None, Some(q)) if q.r() > 0.0 => beta_from_quat(q)?.with_beta(C64::new(0.0, 0.0)),
            (None, _) => BetaParams::zero(),
        };

        match route {
            Route::ExpressionOne | Route::ExpressionTwo if beta.spin_scale() != 0.0 => {
                return Err(cfg_err(format!(
                    "{} solves a Ψ = M̃Ψ; beta₊, beta₋, beta₃ must be zero",
                    route.label()
                )));
            }
            Route::QuaternionHalf => {
                if quaternion.is_none() || rep.two_j() != 1 || k != 2 {
                    return Err(cfg_err("VCS-j=1/2 needs a quaternion M̃, j = 1/2 and K = 2"));
                }
                if beta.beta != C64::new(0.0, 0.0) {
                    return Err(cfg_err("VCS-j=1/2 carries the eigenvalue in M̃; the scalar beta must be zero"));
                }
            }
            _ => {}
        }

        let m_list = match (&cfg.m_list, route.uses_m_list()) {
            (Some(_), false) => {
                return Err(cfg_err(format!("\"m_list\" is not used by {}", route.label())));
            }
            (Some(ms), true) => ms.clone(),
            (None, true) if route == Route::Displacement => vec![-rep.j(); k],
            (None, true) => (0..k).map(|s| rep.m(s % rep.dim())).collect(),
            (None, false) => Vec::new(),
        };
        if route.uses_m_list() {
            if m_list.len() != k {
                return Err(cfg_err(format!("m_list has {} entries for K = {k}", m_list.len())));
            }
            if let Some(m) = m_list.iter().find(|&&m| rep.index_of(m).is_none()) {
                return Err(cfg_err(format!("m = {m} is not in the j = {} multiplet", rep.j())));
            }
        }

        let constants = match (&cfg.constants, route.uses_constants()) {
            (Some(_), false) => {
                return Err(cfg_err(format!("\"constants\" are not used by {}", route.label())));
            }
            (Some(rows), true) => {
                if rows.len() != k {
                    return Err(cfg_err(format!("constants table has {} rows for K = {k}", rows.len())));
                }
                let cs = rows
                    .iter()
                    .map(|row| {
                        if row.len() != rep.dim() {
                            return Err(cfg_err(format!("constants rows need 2j+1 = {} entries", rep.dim())));
                        }
                        finite(row.iter().flatten().copied(), "constants")?;
                        Ok(IntegrationConstants::new(row.iter().map(unpair).collect())?)
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Some(cs)
            }
            (None, _) => None,
        };

        let defaults = Tolerances::default();
        let ts = cfg.tolerances.unwrap_or_default();
        let tol = Tolerances {
            residual: ts.residual.unwrap_or(defaults.residual),
            tail: ts.tail.unwrap_or(defaults.tail),
            sr_gap: ts.sr_gap.unwrap_or(defaults.sr_gap),
        };
        if ![tol.residual, tol.tail, tol.sr_gap].iter().all(|t| *t > 0.0 && t.is_finite()) {
            return Err(cfg_err("tolerances must be positive and finite"));
        }

        let canonical = RunConfig {
            preset: None,
            family: Some(route.label().to_string()),
            j: Some(rep.j()),
            fock_dim: Some(n),
            guard: Some(guard),
            k: Some(k),
            beta: Some([pair(beta.beta), pair(beta.beta_plus), pair(beta.beta_minus), pair(beta.beta_3)]),
            mtilde: Some(match spec {
                q @ MtildeSpec::Quaternion { .. } => q,
                _ => matrix_entries(&mtilde),
            }),
            m_list: route.uses_m_list().then(|| m_list.clone()),
            constants: cfg.constants.clone(),
            tolerances: Some(TolSpec {
                residual: Some(tol.residual),
                tail: Some(tol.tail),
                sr_gap: Some(tol.sr_gap),
            }),
            seed: Some(seed),
        };

        Ok(Resolved {
            label: cfg.preset.clone().unwrap_or_else(|| "custom".to_string()),
            route,
            rep,
            fock,
            beta,
            mtilde,
            quaternion,
            m_list,
            constants,
            tol,
            seed,
            canonical,
        })
    }
}

pub fn matrix_entries(m: &CMatrix) -> MtildeSpec {
    MtildeSpec::Entries(matrix_rows(m))
}

/// Rows of [re, im] pairs.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

fn entries_matrix(rows: &[Vec<Pair>]) -> CliResult<CMatrix> {
    let k = rows.len();
    if k == 0 || rows.iter().any(|r| r.len() != k) {
        return Err(cfg_err("\"mtilde\" must be a non-empty square array of [re, im] pairs"));
    }
    finite(rows.iter().flatten().flatten().copied(), "mtilde")?;
    Ok(CMatrix::from_rows(
        &rows.iter().map(|r| r.iter().map(unpair).collect()).collect::<Vec<_>>(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig {
            j: Some(0.5),
            fock_dim: Some(32),
            guard: Some(4),
            mtilde: Some(MtildeSpec::Entries(vec![vec![[0.1, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.2, 0.0]]])),
            ..RunConfig::default()
        }
    }

    #[test]
    fn minimal_config_resolves() {
        let r = base().resolve(None).unwrap();
        assert_eq!(r.k(), 2);
        assert_eq!(r.route, Route::General);
        assert_eq!(r.label, "custom");
        // the canonical form resolves to the same thing
        let again = r.canonical.resolve(None).unwrap();
        assert_eq!(again.canonical, r.canonical);
    }

    #[test]
    fn schema_errors() {
        let mut c = base();
        c.guard = Some(32);
        assert!(matches!(c.resolve(None), Err(CliError::Config(_))));
        let mut c = base();
        c.j = Some(0.3);
        assert!(c.resolve(None).is_err());
        let mut c = base();
        c.k = Some(3);
        assert!(c.resolve(None).is_err());
        let mut c = base();
        c.preset = Some("VCS-j=1/2".into());
        assert!(c.resolve(None).is_err());
        assert!(RunConfig::default().resolve(None).is_err());
        let mut c = base();
        c.family = Some("no-such-family".into());
        assert!(c.resolve(None).is_err());
        let mut c = base();
        c.m_list = Some(vec![0.5, 0.5]);
        assert!(c.resolve(None).is_err(), "m_list is not used by the general route");
        assert!(RunConfig::from_json(br#"{"j": 0.5, "bogus": 1}"#).is_err());
    }

    #[test]
    fn random_mtilde_depends_on_seed_only() {
        let c = RunConfig {
            j: Some(1.0),
            fock_dim: Some(32),
            guard: Some(4),
            k: Some(3),
            mtilde: Some(MtildeSpec::Random { random: RandomKind::Diagonalizable, radius: None }),
            ..RunConfig::default()
        };
        let a = c.resolve(Some(5)).unwrap();
        let b = c.resolve(Some(5)).unwrap();
        let d = c.resolve(Some(6)).unwrap();
        assert_eq!(a.mtilde, b.mtilde);
        assert_ne!(a.mtilde, d.mtilde);
        assert_eq!(a.k(), 3);
    }
}
