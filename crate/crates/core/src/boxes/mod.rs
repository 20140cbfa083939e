//! Nonlinear boxes: bounded regions where inputs are mapped nonlinearly,
//! with linear quantum mechanics holding outside.
//!
//! Whether a preparation sees the nonlinear action is decided by the box's
//! [`MembershipPolicy`]; how a member's ensemble is fed to the map is
//! decided by its [`Semantics`].

mod brun;
mod channel;
mod deutsch;
mod kent;

pub use brun::{brun_apply_pure, brun_apply_state, BrunBoxConfig, Completion, DomainState};
pub use channel::KrausChannel;
pub use deutsch::{deutsch_apply, deutsch_fixed_point, DeutschBoxConfig, FixedPointSettings};
pub use kent::kent_readout;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preparations::{classify_membership, MembershipPolicy, Preparation, SpacetimeEvent};
use crate::quantum::{CMatrix, DensityOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    /// The box sees only the effective density operator.
    State,
    /// The box acts on each ensemble member (or the heralded one) and the
    /// results are mixed with the ensemble weights.
    Decomposition,
}

/// What the box does to preparations outside the verifying set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonMemberRule {
    /// Identity on the effective density (Brun and Kent keep the ancilla
    /// untouched).
    Identity,
    /// The box map applied to the effective density.
    StateSemantics,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoxKind {
    Brun(BrunBoxConfig),
    Deutsch(DeutschBoxConfig),
    /// Readout box emulating the given Brun map.
    Kent(BrunBoxConfig),
    /// An ordinary linear channel, for controls.
    Linear(KrausChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearBox {
    kind: BoxKind,
    event: SpacetimeEvent,
    semantics: Semantics,
    membership: MembershipPolicy,
    non_member: NonMemberRule,
}

impl NonlinearBox {
    /// Non-members default to the identity for Brun boxes and to state
    /// semantics for the others.
    pub fn new(kind: BoxKind, event: SpacetimeEvent, semantics: Semantics, membership: MembershipPolicy) -> Self {
        let non_member = match kind {
            BoxKind::Brun(_) => NonMemberRule::Identity,
            _ => NonMemberRule::StateSemantics,
        };
        NonlinearBox {
            kind,
            event,
            semantics,
            membership,
            non_member,
        }
    }

    pub fn with_non_member_rule(mut self, rule: NonMemberRule) -> Self {
        self.non_member = rule;
        self
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn with_membership(mut self, membership: MembershipPolicy) -> Self {
        self.membership = membership;
        self
    }

    pub fn kind(&self) -> &BoxKind {
        &self.kind
    }

    pub fn event(&self) -> &SpacetimeEvent {
        &self.event
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn membership(&self) -> &MembershipPolicy {
        &self.membership
    }

    pub fn non_member_rule(&self) -> NonMemberRule {
        self.non_member
    }

    /// Brun map behind a Brun or Kent box.
    pub fn brun_config(&self) -> Option<&BrunBoxConfig> {
        match &self.kind {
            BoxKind::Brun(c) | BoxKind::Kent(c) => Some(c),
            _ => None,
        }
    }

    pub fn input_dim(&self) -> usize {
        match &self.kind {
            BoxKind::Brun(_) | BoxKind::Kent(_) => 2,
            BoxKind::Deutsch(c) => c.system_dim(),
            BoxKind::Linear(ch) => ch.dim_in(),
        }
    }

    /// Tensor factors of the output space.
    pub fn output_dims(&self) -> Vec<usize> {
        match &self.kind {
            BoxKind::Brun(_) | BoxKind::Kent(_) => vec![2, 2],
            BoxKind::Deutsch(c) => vec![c.system_dim()],
            BoxKind::Linear(ch) => {
                let d = ch.dim_out();
                if d > 2 && d.is_power_of_two() {
                    vec![2; d.trailing_zeros() as usize]
                } else {
                    vec![d]
                }
            }
        }
    }

    /// The box's action on a single density operator.
    pub fn box_map(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        match &self.kind {
            BoxKind::Brun(c) => brun_apply_state(c, rho),
            BoxKind::Deutsch(c) => deutsch_apply(c, rho),
            BoxKind::Kent(c) => kent::kent_emulate(c, rho, rho),
            BoxKind::Linear(ch) => ch.apply(rho),
        }
    }

    fn non_member_output(&self, p: &Preparation) -> Result<DensityOperator> {
        let effective = p.effective();
        match (&self.kind, self.non_member) {
            // Under state semantics the readout too sees only the density.
            (BoxKind::Kent(target), _) if self.semantics == Semantics::State => {
                kent::kent_emulate(target, effective, effective)
            }
            (BoxKind::Kent(target), _) => {
                let (readout, _) = kent_readout(p, &self.event);
                kent::kent_emulate(target, &readout, effective)
            }
            (BoxKind::Linear(ch), _) => ch.apply(effective),
            (BoxKind::Brun(_), NonMemberRule::Identity) => brun::passthrough(effective),
            (BoxKind::Deutsch(_), NonMemberRule::Identity) => Ok(effective.clone()),
            (_, NonMemberRule::StateSemantics) => self.box_map(effective),
        }
    }

    pub fn apply(&self, p: &Preparation) -> Result<DensityOperator> {
        if p.dim() != self.input_dim() {
            return Err(Error::Shape(format!(
                "box takes dim {}, preparation '{}' has dim {}",
                self.input_dim(),
                p.label(),
                p.dim()
            )));
        }
        if !classify_membership(p, &self.membership) {
            return self.non_member_output(p);
        }
        match self.semantics {
            Semantics::State => self.box_map(p.effective()),
            Semantics::Decomposition => match p.realized_member() {
                Some(member) => self.box_map(member),
                None => {
                    let mut acc: Option<CMatrix> = None;
                    for (w, member) in p.ensemble() {
                        let out = self.box_map(member)?.matrix() * crate::quantum::c(*w, 0.0);
                        acc = Some(match acc {
                            Some(a) => a + out,
                            None => out,
                        });
                    }
                    DensityOperator::new(acc.expect("ensembles are non-empty"))
                }
            },
        }
    }
}

/// Output of `b` on preparation `p`.
pub fn apply_box(b: &NonlinearBox, p: &Preparation) -> Result<DensityOperator> {
    b.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preparations::{Provenance, ProvenanceTag};
    use crate::quantum::{trace_distance, Ket, Unitary};

    fn ev(t: f64, x: f64) -> SpacetimeEvent {
        SpacetimeEvent::new(t, x).unwrap()
    }

    fn local_ensemble(label: &str, members: &[&Ket]) -> Preparation {
        let w = 1.0 / members.len() as f64;
        Preparation::new(
            label,
            members.iter().map(|k| (w, k.projector())).collect(),
            Provenance::new(ProvenanceTag::LocalEnsemble, vec![ev(0.0, 0.0)]).unwrap(),
        )
        .unwrap()
    }

    fn brun(semantics: Semantics, policy: MembershipPolicy) -> NonlinearBox {
        NonlinearBox::new(BoxKind::Brun(BrunBoxConfig::bb84()), ev(1.0, 0.0), semantics, policy)
    }

    #[test]
    fn decomposition_mixes_outputs() {
        let b = brun(Semantics::Decomposition, MembershipPolicy::NaivePure);
        let p = local_ensemble("mix", &[&Ket::zero(), &Ket::plus()]);
        let out = apply_box(&b, &p).unwrap();
        // oracle: (1/2)|00><00| + (1/2)|10><10|
        let expect = DensityOperator::diagonal(&[0.5, 0.0, 0.5, 0.0]).unwrap();
        assert!(trace_distance(&out, &expect).unwrap() < 1e-14);
    }

    #[test]
    fn non_member_is_identity_with_ancilla() {
        let b = brun(
            Semantics::Decomposition,
            MembershipPolicy::KentLightCone {
                box_event: ev(1.0, 0.0),
            },
        );
        let remote = Preparation::new(
            "r",
            vec![(0.5, Ket::zero().projector()), (0.5, Ket::one().projector())],
            Provenance::new(ProvenanceTag::RemoteSteered, vec![ev(0.0, 10.0)]).unwrap(),
        )
        .unwrap()
        .with_realized(0)
        .unwrap();
        let out = apply_box(&b, &remote).unwrap();
        let expect = remote.effective().tensor(&Ket::zero().projector()).unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn deutsch_identity_member_returns_effective() {
        let cfg = DeutschBoxConfig::new(Unitary::identity(4).unwrap(), 2, FixedPointSettings::default()).unwrap();
        for semantics in [Semantics::State, Semantics::Decomposition] {
            let b = NonlinearBox::new(
                BoxKind::Deutsch(cfg.clone()),
                ev(1.0, 0.0),
                semantics,
                MembershipPolicy::NaivePure,
            );
            let p = local_ensemble("m", &[&Ket::plus(), &Ket::one()]);
            let out = apply_box(&b, &p).unwrap();
            assert!(trace_distance(&out, p.effective()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn state_semantics_depends_only_on_density() {
        let b = brun(Semantics::State, MembershipPolicy::NaivePure);
        let psi = local_ensemble("psi", &[&Ket::zero(), &Ket::one()]);
        let phi = local_ensemble("phi", &[&Ket::plus(), &Ket::minus()]);
        let d = trace_distance(&apply_box(&b, &psi).unwrap(), &apply_box(&b, &phi).unwrap()).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn decomposition_separates_equal_densities() {
        let b = brun(Semantics::Decomposition, MembershipPolicy::NaivePure);
        let psi = local_ensemble("psi", &[&Ket::zero(), &Ket::one()]);
        let phi = local_ensemble("phi", &[&Ket::plus(), &Ket::minus()]);
        let d = trace_distance(&apply_box(&b, &psi).unwrap(), &apply_box(&b, &phi).unwrap()).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_error_propagates() {
        let b = brun(Semantics::Decomposition, MembershipPolicy::NaivePure);
        let p = local_ensemble("y", &[&Ket::plus_i()]);
        assert!(matches!(apply_box(&b, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn dims_are_checked() {
        let b = brun(Semantics::State, MembershipPolicy::NaivePure);
        let p = local_ensemble("q", &[&Ket::basis(3, 0).unwrap()]);
        assert!(matches!(apply_box(&b, &p), Err(Error::Shape(_))));
    }

    #[test]
    fn kent_box_uses_light_cone() {
        let b = NonlinearBox::new(
            BoxKind::Kent(BrunBoxConfig::bb84()),
            ev(1.0, 0.0),
            Semantics::Decomposition,
            MembershipPolicy::KentLightCone {
                box_event: ev(1.0, 0.0),
            },
        );
        let local = Preparation::pure(
            "v",
            &Ket::plus(),
            Provenance::new(ProvenanceTag::LocalDeterministic, vec![ev(0.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let out = apply_box(&b, &local).unwrap();
        assert!((out.matrix()[(2, 2)].re - 1.0).abs() < 1e-14);
    }
}
