//! Config to runtime objects, with located diagnostics.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::*;
use super::ScenarioError;
use crate::boxes::{
    BoxKind, BrunBoxConfig, Completion, DeutschBoxConfig, FixedPointSettings, KrausChannel, NonlinearBox,
};
use crate::error::Error;
use crate::preparations::{MembershipPolicy, Preparation, Provenance, SpacetimeEvent};
use crate::protocols::{default_box_event, witness_completion, AliceSetting};
use crate::quantum::{c, random, tolerance, CMatrix, DensityOperator, Ket, Unitary, C64};

type Built<T> = std::result::Result<T, ScenarioError>;

fn at(location: impl Into<String>) -> impl FnOnce(Error) -> ScenarioError {
    let location = location.into();
    move |e| ScenarioError::from_core(e).located(location)
}

fn validation(location: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        location: location.into(),
        message: message.into(),
    }
}

fn complex(v: &ComplexSpec) -> C64 {
    c(v[0], v[1])
}

fn matrix(m: &MatrixSpec, location: &str) -> Built<CMatrix> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(validation(location, "matrix must be square and nonempty"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| complex(&m[i][j])))
}

fn named_ket(name: &str) -> Option<Ket> {
    Some(match name {
        "zero" => Ket::zero(),
        "one" => Ket::one(),
        "plus" => Ket::plus(),
        "minus" => Ket::minus(),
        "plus_i" => Ket::plus_i(),
        "minus_i" => Ket::minus_i(),
        _ => return None,
    })
}

/// Explicit bases are checked here so the diagnostic names orthonormality
/// rather than a generic normalization failure.
pub(super) fn basis(spec: &BasisSpec, location: &str, own: Option<&BrunBoxConfig>) -> Built<[Ket; 2]> {
    match spec {
        BasisSpec::Named(name) => match name.as_str() {
            "computational" => Ok([Ket::zero(), Ket::one()]),
            "hadamard" => Ok([Ket::plus(), Ket::minus()]),
            "psi" | "phi" => {
                let cfg = own.cloned().unwrap_or_else(BrunBoxConfig::bb84);
                Ok(if name == "psi" {
                    cfg.psi().clone()
                } else {
                    cfg.phi().clone()
                })
            }
            other => Err(validation(location, format!("unknown basis name '{other}'"))),
        },
        BasisSpec::Explicit(vectors) => {
            if vectors.len() != 2 || vectors.iter().any(|v| v.len() != 2) {
                return Err(validation(
                    location,
                    "a qubit basis needs two vectors of two amplitudes",
                ));
            }
            let amps: Vec<Vec<C64>> = vectors.iter().map(|v| v.iter().map(complex).collect()).collect();
            for (i, v) in amps.iter().enumerate() {
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > tolerance::VALID {
                    return Err(validation(
                        location,
                        format!("basis is not orthonormal: vector {i} has norm {norm}"),
                    ));
                }
            }
            let overlap: C64 = amps[0].iter().zip(&amps[1]).map(|(a, b)| a.conj() * b).sum();
            if overlap.norm() > tolerance::VALID {
                return Err(validation(
                    location,
                    format!("basis is not orthonormal: |<v0|v1>| = {}", overlap.norm()),
                ));
            }
            let k0 = Ket::new(amps[0].clone()).map_err(at(location))?;
            let k1 = Ket::new(amps[1].clone()).map_err(at(location))?;
            Ok([k0, k1])
        }
    }
}

fn unitary(spec: &UnitarySpec) -> Built<Unitary> {
    let loc = "box.unitary";
    match spec {
        UnitarySpec::Named(name) => match name.as_str() {
            "identity" => Unitary::identity(4).map_err(at(loc)),
            "swap" => Ok(Unitary::swap()),
            "cnot" => Ok(Unitary::cnot()),
            "cnot_reversed" => Ok(Unitary::cnot_reversed()),
            "swap_cnot" => Unitary::swap().compose(&Unitary::cnot()).map_err(at(loc)),
            other => Err(validation(loc, format!("unknown unitary '{other}'"))),
        },
        UnitarySpec::Explicit(m) => Unitary::new(matrix(m, loc)?).map_err(at(loc)),
    }
}

fn channel(spec: &ChannelSpec) -> Built<KrausChannel> {
    let loc = "box.channel";
    match spec {
        ChannelSpec::IdentityWithAncilla => Ok(KrausChannel::identity_with_ancilla()),
        ChannelSpec::Identity { dim } => KrausChannel::identity(*dim).map_err(at(loc)),
        ChannelSpec::Kraus { operators } => {
            let mut ks = Vec::with_capacity(operators.len());
            for (i, op) in operators.iter().enumerate() {
                let rows = op.len();
                let cols = op.first().map_or(0, Vec::len);
                if rows == 0 || cols == 0 || op.iter().any(|r| r.len() != cols) {
                    return Err(validation(format!("{loc}.operators[{i}]"), "ragged or empty matrix"));
                }
                ks.push(CMatrix::from_fn(rows, cols, |r, col| complex(&op[r][col])));
            }
            KrausChannel::new(ks).map_err(at(loc))
        }
        ChannelSpec::Random {
            dim_in,
            dim_out,
            env,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            random::channel(*dim_in, *dim_out, *env, &mut rng).map_err(at(loc))
        }
    }
}

fn forbid<T>(field: &Option<T>, name: &str, kind: BoxKindName) -> Built<()> {
    if field.is_some() {
        return Err(validation(
            format!("box.{name}"),
            format!("field '{name}' does not apply to a {kind:?} box"),
        ));
    }
    Ok(())
}

pub(super) fn build_box(spec: &BoxSpec) -> Built<NonlinearBox> {
    let event = match spec.event {
        Some(e) => SpacetimeEvent::new(e.t, e.x).map_err(at("box.event"))?,
        None => default_box_event(),
    };
    let kind = match spec.kind {
        BoxKindName::Brun | BoxKindName::Kent => {
            forbid(&spec.unitary, "unitary", spec.kind)?;
            forbid(&spec.ctc_dim, "ctc_dim", spec.kind)?;
            forbid(&spec.fixed_point, "fixed_point", spec.kind)?;
            forbid(&spec.channel, "channel", spec.kind)?;
            let psi = basis(
                spec.psi.as_ref().unwrap_or(&BasisSpec::Named("computational".into())),
                "box.psi",
                None,
            )?;
            let phi = basis(
                spec.phi.as_ref().unwrap_or(&BasisSpec::Named("hadamard".into())),
                "box.phi",
                None,
            )?;
            let completion = match spec.completion.unwrap_or(CompletionSpec::Strict) {
                CompletionSpec::Strict => Completion::Strict,
                CompletionSpec::Witness => witness_completion(),
            };
            let config = BrunBoxConfig::new(psi, phi, completion).map_err(at("box"))?;
            if spec.kind == BoxKindName::Brun {
                BoxKind::Brun(config)
            } else {
                BoxKind::Kent(config)
            }
        }
        BoxKindName::Deutsch => {
            forbid(&spec.psi, "psi", spec.kind)?;
            forbid(&spec.phi, "phi", spec.kind)?;
            forbid(&spec.completion, "completion", spec.kind)?;
            forbid(&spec.channel, "channel", spec.kind)?;
            let u = unitary(
                spec.unitary
                    .as_ref()
                    .ok_or_else(|| validation("box.unitary", "a deutsch box needs a unitary"))?,
            )?;
            let fixed_point = spec
                .fixed_point
                .map(|f| FixedPointSettings {
                    tolerance: f.tolerance,
                    max_doublings: f.max_doublings,
                })
                .unwrap_or_default();
            BoxKind::Deutsch(DeutschBoxConfig::new(u, spec.ctc_dim.unwrap_or(2), fixed_point).map_err(at("box"))?)
        }
        BoxKindName::Linear => {
            forbid(&spec.psi, "psi", spec.kind)?;
            forbid(&spec.phi, "phi", spec.kind)?;
            forbid(&spec.completion, "completion", spec.kind)?;
            forbid(&spec.unitary, "unitary", spec.kind)?;
            forbid(&spec.ctc_dim, "ctc_dim", spec.kind)?;
            forbid(&spec.fixed_point, "fixed_point", spec.kind)?;
            BoxKind::Linear(channel(
                spec.channel
                    .as_ref()
                    .ok_or_else(|| validation("box.channel", "a linear box needs a channel"))?,
            )?)
        }
    };
    let membership = match &spec.membership {
        MembershipSpec::NaivePure => MembershipPolicy::NaivePure,
        MembershipSpec::DeterministicExperimenter => MembershipPolicy::DeterministicExperimenter,
        MembershipSpec::KentLightCone { event: e } => MembershipPolicy::KentLightCone {
            box_event: match e {
                Some(e) => SpacetimeEvent::new(e.t, e.x).map_err(at("box.membership.event"))?,
                None => event,
            },
        },
        MembershipSpec::ExplicitList { labels } => MembershipPolicy::ExplicitList {
            labels: labels.iter().cloned().collect(),
        },
    };
    let mut b = NonlinearBox::new(kind, event, spec.semantics, membership);
    if let Some(rule) = spec.non_member {
        b = b.with_non_member_rule(rule);
    }
    Ok(b)
}

fn state(spec: &StateSpec, location: &str, own: Option<&BrunBoxConfig>) -> Built<DensityOperator> {
    match spec {
        StateSpec::Named(name) => {
            if let Some(k) = named_ket(name) {
                return Ok(k.projector());
            }
            let cfg = own.cloned().unwrap_or_else(BrunBoxConfig::bb84);
            for (which, k) in cfg.domain() {
                if which.name() == name {
                    return Ok(k.projector());
                }
            }
            Err(validation(location, format!("unknown state name '{name}'")))
        }
        StateSpec::Amplitudes(a) => Ket::new(a.iter().map(complex).collect())
            .map(|k| k.projector())
            .map_err(at(location)),
        StateSpec::Density { density } => DensityOperator::new(matrix(density, location)?).map_err(at(location)),
    }
}

pub(super) fn build_preparations(specs: &[PreparationSpec], b: &NonlinearBox) -> Built<Vec<Preparation>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let loc = format!("preparations[{i}] ('{}')", spec.label);
        if spec.label.is_empty() || spec.label.contains(char::is_whitespace) {
            return Err(validation(loc, "labels must be nonempty and contain no whitespace"));
        }
        if !seen.insert(spec.label.clone()) {
            return Err(validation(loc, format!("duplicate label '{}'", spec.label)));
        }
        let mut ensemble = Vec::with_capacity(spec.ensemble.len());
        for (j, m) in spec.ensemble.iter().enumerate() {
            ensemble.push((
                m.weight,
                state(&m.state, &format!("{loc}.ensemble[{j}]"), b.brun_config())?,
            ));
        }
        let records = spec
            .records
            .iter()
            .map(|e| SpacetimeEvent::new(e.t, e.x))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(at(loc.clone()))?;
        let provenance = Provenance::new(spec.provenance, records).map_err(at(loc.clone()))?;
        let mut p = Preparation::new(spec.label.clone(), ensemble, provenance).map_err(at(loc.clone()))?;
        if let Some(r) = spec.realized {
            p = p.with_realized(r).map_err(at(loc.clone()))?;
        }
        if p.dim() != b.input_dim() {
            return Err(validation(
                loc,
                format!(
                    "dimension {} does not match the box input dimension {}",
                    p.dim(),
                    b.input_dim()
                ),
            ));
        }
        out.push(p);
    }
    Ok(out)
}

/// Signaling settings. For Brun and Kent boxes every setting must be one of
/// the box's own bases, so each heralded state lies in the box's domain.
pub(super) fn build_settings(specs: Option<&Vec<SettingSpec>>, b: &NonlinearBox) -> Built<Vec<AliceSetting>> {
    let own = b.brun_config();
    let Some(specs) = specs else {
        let cfg = own.cloned().unwrap_or_else(BrunBoxConfig::bb84);
        return Ok(vec![
            AliceSetting::new("psi", cfg.psi().clone()),
            AliceSetting::new("phi", cfg.phi().clone()),
        ]);
    };
    if specs.is_empty() {
        return Err(validation("protocol.settings", "at least one setting is required"));
    }
    let mut out = Vec::with_capacity(specs.len());
    for (i, s) in specs.iter().enumerate() {
        let loc = format!("protocol.settings[{i}] ('{}')", s.label);
        let kets = basis(&s.basis, &loc, own)?;
        if let Some(cfg) = own {
            let matches = |target: &[Ket; 2]| -> crate::Result<bool> {
                let mut all = true;
                for k in &kets {
                    let best = target[0].fidelity(k)?.max(target[1].fidelity(k)?);
                    all &= best >= 1.0 - tolerance::VALID;
                }
                Ok(all)
            };
            if !(matches(cfg.psi()).map_err(at(loc.clone()))? || matches(cfg.phi()).map_err(at(loc.clone()))?) {
                return Err(validation(loc, "setting is neither the box's psi nor phi basis"));
            }
        }
        out.push(AliceSetting::new(s.label.clone(), kets));
    }
    Ok(out)
}

pub(super) fn resolve<'a>(preps: &'a [Preparation], label: &str, location: &str) -> Built<&'a Preparation> {
    preps
        .iter()
        .find(|p| p.label() == label)
        .ok_or_else(|| ScenarioError::Reference {
            location: location.to_string(),
            label: label.to_string(),
        })
}
