//! State files: dense K × N × (2j+1) amplitudes plus a metadata block.

use serde::{Deserialize, Serialize};
use vaes_core::aes::ComponentState;
use vaes_core::fock::FockSpace;
use vaes_core::su2::Su2Rep;
use vaes_core::vaes::VectorState;
use vaes_core::verify::ResidualReport;

use crate::config::{pair, unpair, Pair, Resolved, RunConfig};
use crate::{json, CliError, CliResult, TOOL_VERSION};

pub const FORMAT: &str = "vaes-state/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub format: String,
    pub metadata: Metadata,
    /// amplitudes[s][n][i] = ⟨n; j, m_i| ψ_s⟩, m ascending.
    pub amplitudes: Vec<Vec<Vec<Pair>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub tool_version: String,
    pub label: String,
    pub family: String,
    pub j: f64,
    pub fock_dim: usize,
    pub guard: usize,
    #[serde(rename = "K")]
    pub k: usize,
    /// Squared norm of the construction before normalization.
    pub norm_constant: f64,
    pub residual: ResidualRecord,
    /// Self-contained config that reproduces the amplitudes.
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualRecord {
    pub relative_residual: f64,
    pub tail_mass: f64,
    pub guarded_dim: usize,
    pub passed: bool,
    pub context: String,
}

impl From<&ResidualReport> for ResidualRecord {
    fn from(r: &ResidualReport) -> Self {
        Self {
            relative_residual: r.relative_residual,
            tail_mass: r.tail_mass,
            guarded_dim: r.guarded_dim,
            passed: r.passed,
            context: r.context.clone(),
        }
    }
}

impl StateFile {
    pub fn new(r: &Resolved, psi: &VectorState, report: &ResidualReport) -> Self {
        let (n, d) = (r.fock.dim(), r.rep.dim());
        let amplitudes = psi
            .components()
            .iter()
            .map(|c| (0..n).map(|k| (0..d).map(|i| pair(c.amp(k, i))).collect()).collect())
            .collect();
        Self {
            format: FORMAT.to_string(),
            metadata: Metadata {
                tool_version: TOOL_VERSION.to_string(),
                label: r.label.clone(),
                family: r.route.label().to_string(),
                j: r.rep.j(),
                fock_dim: n,
                guard: r.fock.guard(),
                k: psi.k(),
                norm_constant: psi.norm_constant,
                residual: report.into(),
                config: r.canonical.clone(),
            },
            amplitudes,
        }
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let nums = self.amplitudes.iter().flatten().flatten().flatten();
        if !nums.chain([&self.metadata.norm_constant]).all(|x| x.is_finite()) {
            return Err(CliError::NonConvergence("state contains non-finite numbers".into()));
        }
        json::to_bytes(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> CliResult<Self> {
        let s: Self = json::from_slice(bytes, "state file")?;
        if s.format != FORMAT {
            return Err(CliError::Config(format!("unknown state format {:?}", s.format)));
        }
        Ok(s)
    }

    /// The amplitudes as a vector state on the space named by the metadata.
    pub fn vector_state(&self) -> CliResult<VectorState> {
        let m = &self.metadata;
        let rep = Su2Rep::from_j(m.j)?;
        let f = FockSpace::new(m.fock_dim, m.guard)?;
        let shape_ok = self.amplitudes.len() == m.k
            && m.k > 0
            && self
                .amplitudes
                .iter()
                .all(|c| c.len() == m.fock_dim && c.iter().all(|row| row.len() == rep.dim()));
        if !shape_ok {
            return Err(CliError::Invariant(format!(
                "shape: amplitudes are not K × N × (2j+1) = {} × {} × {}",
                m.k,
                m.fock_dim,
                rep.dim()
            )));
        }
        let comps = self
            .amplitudes
            .iter()
            .map(|c| ComponentState::new(f, rep, c.iter().flatten().map(unpair).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorState::new(comps, m.norm_constant)?)
    }
}
