//! Scenario files: a JSON description of a box, optional preparations and
//! one protocol, validated up front and run to a versioned [`Report`].

mod build;
mod config;
mod emit;

pub use config::*;
pub use emit::{emit_table, write_report};

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::Semantics;
use crate::error::Error;
use crate::protocols::{
    box_measurements, default_alice_event, matched_density_table, run_bb84_attack, run_preparation_problem_demo_at,
    run_signaling_test_at, run_verification, AttackReport, ClassSplitReport, SignalingReport, VerificationReport,
};
use crate::witness::{affinity_violation, fit_linear_map, parse_stats, StatsTable};

pub const REPORT_SCHEMA: &str = "nlbox-report/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("validation error{}: {message}", at(location))]
    Validation { location: String, message: String },
    #[error("reference error at {location}: unknown label '{label}'")]
    Reference { location: String, label: String },
    #[error("convergence error: {0}")]
    Convergence(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
}

impl ScenarioError {
    pub(crate) fn from_core(e: Error) -> Self {
        match e {
            Error::Convergence { .. } => ScenarioError::Convergence(e.to_string()),
            Error::Parse { line, message } => ScenarioError::Parse {
                location: format!("line {line}"),
                message,
            },
            Error::Domain(_) | Error::Misuse(_) | Error::UndefinedConditional { .. } => {
                ScenarioError::Protocol(e.to_string())
            }
            other => ScenarioError::Validation {
                location: String::new(),
                message: other.to_string(),
            },
        }
    }

    pub(crate) fn located(self, at: String) -> Self {
        match self {
            ScenarioError::Validation { location, message } if location.is_empty() => {
                ScenarioError::Validation { location: at, message }
            }
            other => other,
        }
    }

    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } => 2,
            ScenarioError::Validation { .. } | ScenarioError::Reference { .. } => 3,
            ScenarioError::Convergence(_) => 4,
            ScenarioError::Io { .. } => 5,
            ScenarioError::Protocol(_) => 6,
        }
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError::from_core(e)
    }
}

fn at(location: &str) -> String {
    if location.is_empty() {
        String::new()
    } else {
        format!(" at {location}")
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityReport {
    pub pair: [String; 2],
    pub semantics: Semantics,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub inputs: Vec<String>,
    pub measurements: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    pub residual: f64,
    pub choi_min_eig: f64,
    pub tolerance: f64,
    pub linear_explainable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", content = "data", rename_all = "snake_case")]
pub enum ProtocolResult {
    Verification(VerificationReport),
    Signaling(SignalingReport),
    PreparationProblem(ClassSplitReport),
    Bb84(AttackReport),
    Affinity(AffinityReport),
    Witness(WitnessSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    pub result: ProtocolResult,
}

/// Command-line overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Verification,
    Signaling,
    PreparationProblem,
    Bb84,
    Affinity,
    Witness,
}

impl ProtocolSpec {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolSpec::Verification { .. } => ProtocolKind::Verification,
            ProtocolSpec::Signaling { .. } => ProtocolKind::Signaling,
            ProtocolSpec::PreparationProblem { .. } => ProtocolKind::PreparationProblem,
            ProtocolSpec::Bb84 { .. } => ProtocolKind::Bb84,
            ProtocolSpec::Affinity { .. } => ProtocolKind::Affinity,
            ProtocolSpec::Witness { .. } => ProtocolKind::Witness,
        }
    }
}

pub fn parse_scenario_str(text: &str) -> ScenarioResult<ScenarioConfig> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: json_message(&e),
    })?;
    validate(&config)?;
    Ok(config)
}

/// serde_json's message without its trailing position, which is reported
/// separately.
fn json_message(e: &serde_json::Error) -> String {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    full.strip_suffix(&suffix).unwrap_or(&full).to_string()
}

pub fn parse_scenario(path: &Path) -> ScenarioResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
    parse_scenario_str(&text)
}

/// Builds every runtime object the config describes, reporting the first
/// violated constraint.
pub fn validate(config: &ScenarioConfig) -> ScenarioResult<()> {
    if config.name.is_empty() {
        return Err(ScenarioError::Validation {
            location: "name".into(),
            message: "scenario name must be nonempty".into(),
        });
    }
    let b = build::build_box(&config.box_spec)?;
    let preps = build::build_preparations(&config.preparations, &b)?;
    match &config.protocol {
        ProtocolSpec::Verification { tol } | ProtocolSpec::Witness { tol: Some(tol), .. }
            if tol.is_nan() || *tol < 0.0 =>
        {
            return Err(ScenarioError::Validation {
                location: "protocol.tol".into(),
                message: format!("tolerance {tol} must be non-negative"),
            });
        }
        ProtocolSpec::Signaling { settings, .. } => {
            build::build_settings(settings.as_ref(), &b)?;
        }
        ProtocolSpec::Affinity { pair } => {
            for (i, label) in pair.iter().enumerate() {
                build::resolve(&preps, label, &format!("protocol.pair[{i}]"))?;
            }
        }
        ProtocolSpec::Witness {
            inputs: Some(labels), ..
        } => {
            for (i, label) in labels.iter().enumerate() {
                build::resolve(&preps, label, &format!("protocol.inputs[{i}]"))?;
            }
        }
        ProtocolSpec::Witness { shots: Some(0), .. } => {
            return Err(ScenarioError::Validation {
                location: "protocol.shots".into(),
                message: "shots must be positive".into(),
            });
        }
        _ => {}
    }
    Ok(())
}

/// Replaces the protocol with `kind` (default parameters) unless the config
/// already selects it.
pub fn with_protocol(mut config: ScenarioConfig, kind: ProtocolKind) -> ScenarioConfig {
    if config.protocol.kind() != kind {
        config.protocol = match kind {
            ProtocolKind::Verification => ProtocolSpec::Verification { tol: 1e-9 },
            ProtocolKind::Signaling => ProtocolSpec::Signaling {
                settings: None,
                alice_event: None,
            },
            ProtocolKind::PreparationProblem => ProtocolSpec::PreparationProblem { alice_event: None },
            ProtocolKind::Bb84 => ProtocolSpec::Bb84 {
                n_bits: 10_000,
                strategy: crate::protocols::EveStrategy::Resend,
            },
            ProtocolKind::Affinity | ProtocolKind::Witness => ProtocolSpec::Witness {
                inputs: None,
                shots: None,
                tol: None,
            },
        };
    }
    config
}

fn summarize(table: &StatsTable, tol: Option<f64>) -> ScenarioResult<WitnessSummary> {
    let fit = fit_linear_map(table)?;
    let tolerance = tol
        .or_else(|| table.sampling_tolerance())
        .unwrap_or(crate::quantum::tolerance::EQUAL);
    Ok(WitnessSummary {
        inputs: table.preparations().iter().map(|(l, _)| l.clone()).collect(),
        measurements: table.measurements().iter().map(|(l, _)| l.clone()).collect(),
        shots: table.sample_counts().map(|c| c[0][0]),
        residual: fit.residual,
        choi_min_eig: fit.choi_min_eig,
        tolerance,
        linear_explainable: fit.within(tolerance),
    })
}

pub fn run_scenario(config: &ScenarioConfig, options: RunOptions) -> ScenarioResult<Report> {
    validate(config)?;
    let b = build::build_box(&config.box_spec)?;
    let preps = build::build_preparations(&config.preparations, &b)?;
    let seed = options.seed.or(config.seed);
    let mut used_seed = None;

    let result = match &config.protocol {
        ProtocolSpec::Verification { tol } => {
            ProtocolResult::Verification(run_verification(&b, options.tol.unwrap_or(*tol))?)
        }
        ProtocolSpec::Signaling { settings, alice_event } => {
            let settings = build::build_settings(settings.as_ref(), &b)?;
            let event = alice_event.unwrap_or_else(default_alice_event);
            ProtocolResult::Signaling(run_signaling_test_at(&b, &settings, &event)?)
        }
        ProtocolSpec::PreparationProblem { alice_event } => {
            let event = alice_event.unwrap_or_else(default_alice_event);
            ProtocolResult::PreparationProblem(run_preparation_problem_demo_at(&b, &event)?)
        }
        ProtocolSpec::Bb84 { n_bits, strategy } => {
            let s = seed.unwrap_or(0);
            used_seed = Some(s);
            ProtocolResult::Bb84(run_bb84_attack(&b, *n_bits, s, *strategy)?)
        }
        ProtocolSpec::Affinity { pair } => {
            let p1 = build::resolve(&preps, &pair[0], "protocol.pair[0]")?;
            let p2 = build::resolve(&preps, &pair[1], "protocol.pair[1]")?;
            ProtocolResult::Affinity(AffinityReport {
                pair: pair.clone(),
                semantics: b.semantics(),
                violation: affinity_violation(&b, (p1, p2))?,
            })
        }
        ProtocolSpec::Witness { inputs, shots, tol } => {
            let exact = match inputs {
                Some(labels) => {
                    let chosen = labels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| build::resolve(&preps, l, &format!("protocol.inputs[{i}]")).cloned())
                        .collect::<ScenarioResult<Vec<_>>>()?;
                    StatsTable::from_box(&b, &chosen, &box_measurements(&b)?)?
                }
                None => matched_density_table(&b)?,
            };
            let table = match shots {
                Some(n) => {
                    let s = seed.unwrap_or(0);
                    used_seed = Some(s);
                    exact.sample(*n, &mut ChaCha8Rng::seed_from_u64(s))?
                }
                None => exact,
            };
            ProtocolResult::Witness(summarize(&table, options.tol.or(*tol))?)
        }
    };
    Ok(Report {
        schema: REPORT_SCHEMA.to_string(),
        name: config.name.clone(),
        seed: used_seed,
        scenario: Some(config.clone()),
        result,
    })
}

/// Fits a stats file in the tabular text format.
pub fn run_witness_file(path: &Path, tol: Option<f64>) -> ScenarioResult<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
    let located = |e: ScenarioError| e.located(path.display().to_string());
    let table = parse_stats(&text).map_err(|e| located(e.into()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stats".into());
    Ok(Report {
        schema: REPORT_SCHEMA.to_string(),
        name,
        seed: None,
        scenario: None,
        result: ProtocolResult::Witness(summarize(&table, tol).map_err(located)?),
    })
}
