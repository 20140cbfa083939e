//! End-to-end protocols built from preparations, boxes and steering.

mod bb84;
mod signaling;
mod split;
mod verification;

pub use bb84::{run_bb84_attack, AttackReport, EveStrategy};
pub use signaling::{run_signaling_test, run_signaling_test_at, AliceSetting, SettingDistribution, SignalingReport};
pub use split::{run_preparation_problem_demo, run_preparation_problem_demo_at, ClassSplitReport, SplitEntry};
pub use verification::{run_verification, VerificationReport, VerificationRow};

use crate::boxes::{BrunBoxConfig, Completion, NonlinearBox};
use crate::error::Result;
use crate::preparations::{Preparation, Provenance, ProvenanceTag, SpacetimeEvent};
use crate::quantum::{DensityOperator, Ket, Povm};
use crate::witness::{factor_measurements, pauli_product_measurements, StatsTable};

/// Default event of the distant measurement record, spacelike to the box.
pub fn default_alice_event() -> SpacetimeEvent {
    SpacetimeEvent::new(0.0, 10.0).expect("finite")
}

/// Default box event.
pub fn default_box_event() -> SpacetimeEvent {
    SpacetimeEvent::new(1.0, 0.0).expect("finite")
}

/// Locally deterministic preparation of `ket`, recorded just before `b` acts.
pub fn local_preparation(b: &NonlinearBox, label: &str, ket: &Ket) -> Result<Preparation> {
    let provenance = Provenance::new(ProvenanceTag::LocalDeterministic, vec![b.event().just_before()])?;
    Preparation::pure(label, ket, provenance)
}

/// Equal-weight local mixtures of the psi and of the phi basis. Both have
/// effective density `I/2`.
pub fn basis_mixtures(b: &NonlinearBox, config: &BrunBoxConfig) -> Result<(Preparation, Preparation)> {
    let provenance = Provenance::new(ProvenanceTag::LocalEnsemble, vec![b.event().just_before()])?;
    let mix = |label: &str, basis: &[Ket; 2]| {
        Preparation::new(
            label,
            basis.iter().map(|k| (0.5, k.projector())).collect(),
            provenance.clone(),
        )
    };
    Ok((mix("psi_mixture", config.psi())?, mix("phi_mixture", config.phi())?))
}

/// Completion sending `|+i>` and `|-i>` to `I/4`, so a Brun box accepts a
/// tomographically complete input set.
pub fn witness_completion() -> Completion {
    let quarter = DensityOperator::maximally_mixed(4).expect("dim 4");
    Completion::Custom {
        entries: vec![(Ket::plus_i(), quarter.clone()), (Ket::minus_i(), quarter)],
        fallback: None,
    }
}

/// Exact statistics of a qubit box on the four domain states, `|+i>`, and
/// the two basis mixtures (distinct rows sharing the input `I/2`). Each
/// output factor is measured on its own, and qubit outputs also get the
/// full product-Pauli set so the fitted map is determined.
pub fn matched_density_table(b: &NonlinearBox) -> Result<StatsTable> {
    let config = b.brun_config().cloned().unwrap_or_else(BrunBoxConfig::bb84);
    let mut preps = Vec::new();
    for (which, ket) in config.domain() {
        preps.push(local_preparation(b, which.name(), ket)?);
    }
    preps.push(local_preparation(b, "y_plus", &Ket::plus_i())?);
    let (psi_mix, phi_mix) = basis_mixtures(b, &config)?;
    preps.push(psi_mix);
    preps.push(phi_mix);
    StatsTable::from_box(b, &preps, &box_measurements(b)?)
}

/// Per-factor computational measurements, plus product Paulis when every
/// output factor is a qubit.
pub fn box_measurements(b: &NonlinearBox) -> Result<Vec<(String, Povm)>> {
    let dims = b.output_dims();
    let mut out = factor_measurements(&dims)?;
    if dims.iter().all(|&d| d == 2) {
        out.extend(pauli_product_measurements(dims.len())?);
    }
    Ok(out)
}
