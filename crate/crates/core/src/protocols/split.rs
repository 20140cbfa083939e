use serde::{Deserialize, Serialize};

use super::{default_alice_event, local_preparation};
use crate::boxes::{apply_box, NonlinearBox};
use crate::error::{Error, Result};
use crate::preparations::{
    classify_membership, linearly_equivalent, Preparation, Provenance, ProvenanceTag, SpacetimeEvent,
};
use crate::quantum::{trace_distance, Povm};
use crate::steering::{singlet, SteeringAssemblage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub state: String,
    pub verifying_label: String,
    pub remote_label: String,
    pub linearly_equivalent: bool,
    pub verifying_member: bool,
    pub remote_member: bool,
    pub output_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSplitReport {
    pub entries: Vec<SplitEntry>,
    /// Some remote preparation is treated as a member: the box would signal.
    pub signaling_hazard: bool,
    /// Every pair is linearly equivalent yet separated by the box.
    pub split: bool,
}

pub fn run_preparation_problem_demo(b: &NonlinearBox) -> Result<ClassSplitReport> {
    run_preparation_problem_demo_at(b, &default_alice_event())
}

/// For each domain state `x`, compares the local deterministic preparation
/// of `x` with a singlet-heralded preparation of the same pure state.
pub fn run_preparation_problem_demo_at(b: &NonlinearBox, alice_event: &SpacetimeEvent) -> Result<ClassSplitReport> {
    let config = b
        .brun_config()
        .ok_or_else(|| Error::Misuse("the preparation-problem demo needs a Brun box".into()))?
        .clone();
    let provenance = Provenance::new(ProvenanceTag::RemoteSteered, vec![*alice_event])?;
    let pair = singlet().projector();

    let mut entries = Vec::with_capacity(4);
    for (which, ket) in config.domain() {
        let basis = match which.output_bits().0 {
            0 => config.psi(),
            _ => config.phi(),
        };
        let assemblage = SteeringAssemblage::from_measurement(pair.clone(), 2, Povm::from_basis(basis)?)?;
        let ensemble: Vec<_> = assemblage
            .heralded()
            .iter()
            .filter_map(|(p, rho)| rho.clone().map(|r| (*p, r)))
            .collect();
        let mut heralding = None;
        for (i, (_, rho)) in ensemble.iter().enumerate() {
            if rho.fidelity_with(ket)? >= 1.0 - 1e-9 {
                heralding = Some(i);
            }
        }
        let index = heralding.ok_or_else(|| Error::Domain(format!("no outcome heralds {}", which.name())))?;

        let verifying = local_preparation(b, &format!("verify_{}", which.name()), ket)?;
        let remote =
            Preparation::new(format!("remote_{}", which.name()), ensemble, provenance.clone())?.with_realized(index)?;
        entries.push(SplitEntry {
            state: which.name().to_string(),
            verifying_label: verifying.label().to_string(),
            remote_label: remote.label().to_string(),
            linearly_equivalent: linearly_equivalent(&verifying, &remote)?,
            verifying_member: classify_membership(&verifying, b.membership()),
            remote_member: classify_membership(&remote, b.membership()),
            output_distance: trace_distance(&apply_box(b, &verifying)?, &apply_box(b, &remote)?)?,
        });
    }
    let signaling_hazard = entries.iter().any(|e| e.remote_member);
    let split = !signaling_hazard
        && entries
            .iter()
            .all(|e| e.linearly_equivalent && e.output_distance > 1e-9);
    Ok(ClassSplitReport {
        entries,
        signaling_hazard,
        split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{BoxKind, BrunBoxConfig, Semantics};
    use crate::preparations::MembershipPolicy;
    use crate::protocols::default_box_event;

    fn brun(policy: MembershipPolicy) -> NonlinearBox {
        NonlinearBox::new(
            BoxKind::Brun(BrunBoxConfig::bb84()),
            default_box_event(),
            Semantics::Decomposition,
            policy,
        )
    }

    #[test]
    fn light_cone_split_distances() {
        let r = run_preparation_problem_demo(&brun(MembershipPolicy::KentLightCone {
            box_event: default_box_event(),
        }))
        .unwrap();
        assert!(r.split && !r.signaling_hazard);
        let d: Vec<f64> = r.entries.iter().map(|e| e.output_distance).collect();
        // |00> against I/2 (x) |0><0| is 1/2; |01> is orthogonal to it.
        for (got, want) in d.iter().zip([0.5, 1.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn listing_remote_labels_is_a_hazard() {
        let labels = ["verify_psi0", "remote_psi0"].iter().map(|s| s.to_string()).collect();
        let r = run_preparation_problem_demo(&brun(MembershipPolicy::ExplicitList { labels })).unwrap();
        assert!(r.signaling_hazard && !r.split);
    }
}
