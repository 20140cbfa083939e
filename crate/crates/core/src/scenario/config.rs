//! Serialized scenario schema. Every struct rejects unknown fields.

use serde::{Deserialize, Serialize};

use crate::boxes::{NonMemberRule, Semantics};
use crate::preparations::{ProvenanceTag, SpacetimeEvent};
use crate::protocols::EveStrategy;

/// A complex number as `[re, im]`.
pub type ComplexSpec = [f64; 2];
pub type MatrixSpec = Vec<Vec<ComplexSpec>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preparations: Vec<PreparationSpec>,
    pub protocol: ProtocolSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A qubit basis: `computational`, `hadamard`, or two explicit kets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    Named(String),
    Explicit(Vec<Vec<ComplexSpec>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionSpec {
    Strict,
    /// `|+i>` and `|-i>` map to the maximally mixed two-qubit state.
    Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    Named(String),
    Explicit(MatrixSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    IdentityWithAncilla,
    Identity {
        dim: usize,
    },
    Kraus {
        operators: Vec<MatrixSpec>,
    },
    Random {
        dim_in: usize,
        dim_out: usize,
        env: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointSpec {
    pub tolerance: f64,
    pub max_doublings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MembershipSpec {
    NaivePure,
    /// Light cone of `event`, or of the box event when omitted.
    KentLightCone {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        event: Option<SpacetimeEvent>,
    },
    DeterministicExperimenter,
    ExplicitList {
        labels: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxKindName {
    Brun,
    Kent,
    Deutsch,
    Linear,
}

/// Box description. Which optional fields are allowed depends on `kind`:
/// `psi`, `phi`, `completion` for brun/kent; `unitary`, `ctc_dim`,
/// `fixed_point` for deutsch; `channel` for linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub kind: BoxKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<UnitarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ctc_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<SpacetimeEvent>,
    pub semantics: Semantics,
    pub membership: MembershipSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub non_member: Option<NonMemberRule>,
}

/// A named ket (`zero`, `one`, `plus`, `minus`, `plus_i`, `minus_i`, or a
/// box domain state `psi0` .. `phi1`), explicit amplitudes, or a density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Amplitudes(Vec<ComplexSpec>),
    Density { density: MatrixSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub weight: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreparationSpec {
    pub label: String,
    pub ensemble: Vec<MemberSpec>,
    pub provenance: ProvenanceTag,
    pub records: Vec<SpacetimeEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub label: String,
    /// `psi` or `phi` for the box's own bases, or any [`BasisSpec`].
    pub basis: BasisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolSpec {
    Verification {
        #[serde(default = "default_verification_tol")]
        tol: f64,
    },
    Signaling {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        settings: Option<Vec<SettingSpec>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alice_event: Option<SpacetimeEvent>,
    },
    PreparationProblem {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alice_event: Option<SpacetimeEvent>,
    },
    Bb84 {
        n_bits: u64,
        #[serde(default = "default_strategy")]
        strategy: EveStrategy,
    },
    Affinity {
        pair: [String; 2],
    },
    /// Linearity fit of the box's statistics. Without `inputs`, the
    /// matched-density table is used.
    Witness {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inputs: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shots: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
}

fn default_verification_tol() -> f64 {
    1e-9
}

fn default_strategy() -> EveStrategy {
    EveStrategy::Resend
}
