use serde::{Deserialize, Serialize};

use super::default_alice_event;
use crate::boxes::{apply_box, NonlinearBox, Semantics};
use crate::error::{Error, Result};
use crate::preparations::{PolicyKind, Preparation, Provenance, ProvenanceTag, SpacetimeEvent};
use crate::quantum::{born_probabilities, Ket, Povm};
use crate::steering::{singlet, SteeringAssemblage};

/// A projective qubit measurement Alice may choose.
#[derive(Debug, Clone, PartialEq)]
pub struct AliceSetting {
    pub label: String,
    pub basis: [Ket; 2],
}

impl AliceSetting {
    pub fn new(label: impl Into<String>, basis: [Ket; 2]) -> Self {
        AliceSetting {
            label: label.into(),
            basis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingDistribution {
    pub setting: String,
    /// Bob's distribution over the first output qubit.
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingReport {
    pub distributions: Vec<SettingDistribution>,
    pub signaling_metric: f64,
    pub policy: PolicyKind,
    pub semantics: Semantics,
}

/// Signaling test with Alice's record at the default spacelike event.
pub fn run_signaling_test(b: &NonlinearBox, settings: &[AliceSetting]) -> Result<SignalingReport> {
    run_signaling_test_at(b, settings, &default_alice_event())
}

/// Alice measures her half of a singlet in each setting; every outcome
/// heralds a remote preparation for Bob, which passes through `b`.
pub fn run_signaling_test_at(
    b: &NonlinearBox,
    settings: &[AliceSetting],
    alice_event: &SpacetimeEvent,
) -> Result<SignalingReport> {
    if b.input_dim() != 2 {
        return Err(Error::Shape(format!(
            "signaling test needs a qubit box, got dim {}",
            b.input_dim()
        )));
    }
    if settings.is_empty() {
        return Err(Error::invalid("signaling test", "no settings"));
    }
    let bob_measurement = Povm::on_factor(&b.output_dims(), 0)?;
    let provenance = Provenance::new(ProvenanceTag::RemoteSteered, vec![*alice_event])?;
    let pair = singlet().projector();

    let mut distributions = Vec::with_capacity(settings.len());
    for setting in settings {
        let assemblage = SteeringAssemblage::from_measurement(pair.clone(), 2, Povm::from_basis(&setting.basis)?)?;
        let ensemble: Vec<_> = assemblage
            .heralded()
            .iter()
            .filter_map(|(p, rho)| rho.clone().map(|r| (*p, r)))
            .collect();
        let mut q = vec![0.0; bob_measurement.outcomes()];
        for (i, (p, _)) in ensemble.iter().enumerate() {
            let prep = Preparation::new(
                format!("bob_{}_{i}", setting.label),
                ensemble.clone(),
                provenance.clone(),
            )?
            .with_realized(i)?;
            let out = apply_box(b, &prep)?;
            for (qk, pk) in q.iter_mut().zip(born_probabilities(&out, &bob_measurement)?) {
                *qk += p * pk;
            }
        }
        distributions.push(SettingDistribution {
            setting: setting.label.clone(),
            probabilities: q,
        });
    }

    let mut metric = 0.0f64;
    for (i, a) in distributions.iter().enumerate() {
        for c in &distributions[i + 1..] {
            let tv: f64 = a
                .probabilities
                .iter()
                .zip(&c.probabilities)
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>()
                / 2.0;
            metric = metric.max(tv);
        }
    }
    Ok(SignalingReport {
        distributions,
        signaling_metric: metric.clamp(0.0, 1.0),
        policy: b.membership().kind(),
        semantics: b.semantics(),
    })
}
