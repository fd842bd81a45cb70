//! Named configurations, keyed by the equation label of the state they build.

use vaes_core::algebra::Family;
use vaes_core::su2::BetaParams;
use vaes_core::{c64, CMatrix, C64};

use crate::config::{matrix_entries, pair, MtildeSpec, QuatSpec, Route, RunConfig};
use crate::{CliError, CliResult};

#[derive(Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> RunConfig,
}

impl Preset {
    pub fn config(&self) -> RunConfig {
        (self.build)()
    }
}

fn z() -> C64 {
    c64(0.0, 0.0)
}

fn betas(p: &BetaParams) -> Option<[[f64; 2]; 4]> {
    Some([pair(p.beta), pair(p.beta_plus), pair(p.beta_minus), pair(p.beta_3)])
}

/// U diag(0.7+0.2i, −0.3+0.5i) U†
fn normal2() -> MtildeSpec {
    let u = CMatrix::from_rows(&[vec![c64(0.6, 0.0), c64(0.0, -0.8)], vec![c64(0.0, -0.8), c64(0.6, 0.0)]]);
    let d = CMatrix::from_diag(&[c64(0.7, 0.2), c64(-0.3, 0.5)]);
    matrix_entries(&u.matmul(&d).matmul(&u.adjoint()))
}

/// H + 0.7i H² for a fixed Hermitian H.
fn normal3() -> MtildeSpec {
    let h = CMatrix::from_rows(&[
        vec![c64(0.3, 0.0), c64(0.1, 0.2), c64(-0.2, 0.1)],
        vec![c64(0.1, -0.2), c64(-0.4, 0.0), c64(0.3, 0.0)],
        vec![c64(-0.2, -0.1), c64(0.3, 0.0), c64(0.1, 0.0)],
    ]);
    matrix_entries(&(&h + &h.matmul(&h).scale(c64(0.0, 0.7))))
}

fn non_normal2() -> MtildeSpec {
    matrix_entries(&CMatrix::from_rows(&[
        vec![c64(0.5, 0.1), c64(0.4, -0.2)],
        vec![z(), c64(-0.3, 0.2)],
    ]))
}

fn base(route: Route, j: f64, mtilde: MtildeSpec) -> RunConfig {
    RunConfig {
        family: Some(route.label().to_string()),
        j: Some(j),
        fock_dim: Some(64),
        guard: Some(8),
        mtilde: Some(mtilde),
        ..RunConfig::default()
    }
}

fn family_params(f: Family) -> BetaParams {
    f.params().expect("preset family parameters are valid")
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "VCS-expression-one",
        summary: "a Ψ = M̃Ψ via P e^{Da†} on the orthonormal ground, non-normal M̃, j = 1",
        build: || base(Route::ExpressionOne, 1.0, non_normal2()),
    },
    Preset {
        name: "VCS-expression-two",
        summary: "Σ M̃ⁿ/√n! on |n⟩⊗|½, m_s⟩, normal M̃, K = 2",
        build: || RunConfig {
            m_list: Some(vec![-0.5, 0.5]),
            ..base(Route::ExpressionTwo, 0.5, normal2())
        },
    },
    Preset {
        name: "VCS-j=1/2",
        summary: "generalized quaternionic VCS, r = 1, θ = 0.7, φ = 1.1, ψ = 0.3, β from the quaternion",
        build: || {
            base(
                Route::QuaternionHalf,
                0.5,
                MtildeSpec::Quaternion {
                    quaternion: QuatSpec { r: 1.0, theta: 0.7, phi: 1.1, psi: 0.3 },
                },
            )
        },
    },
    Preset {
        name: "standard-VCS+j-j",
        summary: "exp[M̃a† − M̃†a] on |0; j, −j⟩ stacks (β₊ = β₋ = 0, β₃ = 0.4), j = 1",
        build: || RunConfig {
            beta: betas(&BetaParams::new(z(), z(), z(), c64(0.4, 0.0))),
            ..base(Route::Displacement, 1.0, normal2())
        },
    },
    Preset {
        name: "standard-HW",
        summary: "Heisenberg–Weyl VCS, K = 3, j = 0: a stack of displaced grounds",
        build: || RunConfig {
            m_list: Some(vec![0.0; 3]),
            ..base(Route::Displacement, 0.0, normal3())
        },
    },
    Preset {
        name: "vector-algebra-HW-BG-two",
        summary: "intelligent family, eigenstates of a + β₊J₋ with m = (0, 1), j = 1",
        build: || RunConfig {
            beta: betas(&BetaParams::new(z(), c64(0.3, 0.2), z(), z())),
            m_list: Some(vec![0.0, 1.0]),
            ..base(Route::IntelligentTwo, 1.0, normal2())
        },
    },
    Preset {
        name: "vector-algebra-HW-BG-three",
        summary: "intelligent family in the symmetric arctan form, j = 1",
        build: || RunConfig {
            beta: betas(&BetaParams::new(z(), c64(0.3, 0.2), z(), z())),
            ..base(Route::IntelligentThree, 1.0, normal2())
        },
    },
    Preset {
        name: "master-vector-states-non-unitary",
        summary: "D(M̃) T exp[½(M̃b* − M̃†b)J₃] on the ρe^{iν} family, j = 1",
        build: || RunConfig {
            beta: betas(&family_params(Family::RhoGeneric {
                r: 0.3,
                theta_plus: 0.1,
                theta_minus: 0.7,
                r3: 0.4,
                theta3: 1.3,
            })),
            m_list: Some(vec![-1.0, 0.0]),
            ..base(Route::MasterNonUnitary, 1.0, normal2())
        },
    },
    Preset {
        name: "vector-matrix-eigenvalue-total",
        summary: "P-mixed scalar eigenstates, non-normal M̃, fully generic β, j = 1",
        build: || RunConfig {
            beta: betas(&family_params(Family::FullGeneric {
                r_plus: 0.3,
                r_minus: 0.2,
                theta_plus: 0.4,
                theta_minus: -0.9,
                r3: 0.35,
                theta3: 0.2,
            })),
            ..base(Route::General, 1.0, non_normal2())
        },
    },
    Preset {
        name: "AES-j-one-half-no-diagonalizable",
        summary: "supercoherent pair for the defective M̃ = [[β, −β₊], [0, β]], β = 0.5, β₊ = 1",
        build: || {
            base(
                Route::ExpressionOne,
                0.5,
                matrix_entries(&CMatrix::from_rows(&[
                    vec![c64(0.5, 0.0), c64(-1.0, 0.0)],
                    vec![z(), c64(0.5, 0.0)],
                ])),
            )
        },
    },
    Preset {
        name: "algebra-eigenstates-h1-su2",
        summary: "scalar algebra eigenstate (K = 1) with eigenvalue β, canonical couplings, j = 3/2",
        build: || RunConfig {
            beta: betas(&BetaParams::new(
                c64(0.3, -0.4),
                C64::from_polar(0.25, 0.3),
                C64::from_polar(0.25, -0.9),
                C64::from_polar(0.3, -0.3),
            )),
            ..base(Route::General, 1.5, matrix_entries(&CMatrix::zeros(1, 1)))
        },
    },
];

pub fn find(name: &str) -> CliResult<Preset> {
    PRESETS.iter().copied().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!("unknown preset {name:?}; known: {}", known.join(", ")))
    })
}
