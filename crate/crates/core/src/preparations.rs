//! Preparation procedures carrying ensemble structure and provenance.
//!
//! A [`Preparation`] is richer than its density operator: two preparations
//! may be linearly equivalent (identical statistics under every linear
//! transformation and measurement) yet be classified differently by a
//! [`MembershipPolicy`], which decides whether a nonlinear box exhibits its
//! nonlinear action on them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{tolerance, trace_distance, DensityOperator, Ket};

/// Event in 1+1 Minkowski spacetime, `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: f64,
}

impl SpacetimeEvent {
    pub fn new(t: f64, x: f64) -> Result<Self> {
        if !t.is_finite() || !x.is_finite() {
            return Err(Error::invalid(
                "spacetime event",
                format!("non-finite coordinates ({t}, {x})"),
            ));
        }
        Ok(SpacetimeEvent { t, x })
    }

    pub fn translated(&self, dt: f64, dx: f64) -> Self {
        SpacetimeEvent {
            t: self.t + dt,
            x: self.x + dx,
        }
    }

    /// An event one time unit before `self` at the same place.
    pub fn just_before(&self) -> Self {
        self.translated(-1.0, 0.0)
    }
}

/// `box.t - e.t >= |box.x - e.x|`: lightlike boundary counts as inside.
pub fn in_past_light_cone(e: &SpacetimeEvent, box_event: &SpacetimeEvent) -> bool {
    box_event.t - e.t >= (box_event.x - e.x).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceTag {
    /// Deterministic local procedure, e.g. a NOT gate applied to `|0>`.
    LocalDeterministic,
    /// Local procedure involving measurement and post-selection.
    LocalEnsemble,
    /// Heralded by a distant measurement on an entangled partner.
    RemoteSteered,
}

/// Provenance tag plus the events where classical information about the
/// realized ensemble member exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    tag: ProvenanceTag,
    records: Vec<SpacetimeEvent>,
}

impl Provenance {
    pub fn new(tag: ProvenanceTag, records: Vec<SpacetimeEvent>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::invalid(
                "provenance",
                format!("{tag:?} requires at least one record event"),
            ));
        }
        Ok(Provenance { tag, records })
    }

    pub fn tag(&self) -> ProvenanceTag {
        self.tag
    }

    pub fn records(&self) -> &[SpacetimeEvent] {
        &self.records
    }

    pub fn translated(&self, dt: f64, dx: f64) -> Self {
        Provenance {
            tag: self.tag,
            records: self.records.iter().map(|e| e.translated(dt, dx)).collect(),
        }
    }
}

/// An operational preparation procedure.
///
/// `ensemble` is the decomposition as seen by someone without access to the
/// provenance records; its weighted sum is the effective density. When a
/// member has been heralded (`realized`), the preparation's linear statistics
/// are those of that member.
#[derive(Debug, Clone, PartialEq)]
pub struct Preparation {
    label: String,
    ensemble: Vec<(f64, DensityOperator)>,
    realized: Option<usize>,
    provenance: Provenance,
    effective: DensityOperator,
}

impl Preparation {
    pub fn new(
        label: impl Into<String>,
        ensemble: Vec<(f64, DensityOperator)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let label = label.into();
        if ensemble.is_empty() {
            return Err(Error::invalid(
                "preparation",
                format!("'{label}' has an empty ensemble"),
            ));
        }
        let dim = ensemble[0].1.dim();
        let mut total = 0.0;
        for (i, (w, rho)) in ensemble.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::invalid(
                    "preparation",
                    format!("'{label}' member {i} has non-positive weight {w}"),
                ));
            }
            if rho.dim() != dim {
                return Err(Error::Shape(format!("'{label}' mixes dims {dim} and {}", rho.dim())));
            }
            total += w;
        }
        if (total - 1.0).abs() > tolerance::VALID {
            return Err(Error::invalid(
                "preparation",
                format!("'{label}' weights sum to {total}, not 1"),
            ));
        }
        let terms: Vec<(f64, &DensityOperator)> = ensemble.iter().map(|(w, r)| (*w, r)).collect();
        let effective = DensityOperator::mixture(&terms)?;
        Ok(Preparation {
            label,
            ensemble,
            realized: None,
            provenance,
            effective,
        })
    }

    /// Singleton ensemble of a pure state.
    pub fn pure(label: impl Into<String>, ket: &Ket, provenance: Provenance) -> Result<Self> {
        Preparation::new(label, vec![(1.0, ket.projector())], provenance)
    }

    /// Marks member `index` as the heralded one.
    pub fn with_realized(mut self, index: usize) -> Result<Self> {
        if index >= self.ensemble.len() {
            return Err(Error::invalid(
                "preparation",
                format!("'{}' realized index {index} out of range", self.label),
            ));
        }
        self.realized = Some(index);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.effective.dim()
    }

    pub fn ensemble(&self) -> &[(f64, DensityOperator)] {
        &self.ensemble
    }

    pub fn realized(&self) -> Option<usize> {
        self.realized
    }

    pub fn realized_member(&self) -> Option<&DensityOperator> {
        self.realized.map(|i| &self.ensemble[i].1)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn effective(&self) -> &DensityOperator {
        &self.effective
    }

    /// The state that fixes linear statistics: the heralded member if one
    /// exists, otherwise the effective density. A singleton ensemble counts
    /// as heralded.
    pub fn operational_density(&self) -> &DensityOperator {
        match (self.realized, self.ensemble.len()) {
            (Some(i), _) => &self.ensemble[i].1,
            (None, 1) => &self.ensemble[0].1,
            (None, _) => &self.effective,
        }
    }
}

/// Weighted sum of the ensemble members.
pub fn effective_density(p: &Preparation) -> DensityOperator {
    p.effective.clone()
}

/// Equal operational densities within 1e-8 trace distance, i.e. identical
/// statistics under all linear transformations and measurements.
pub fn linearly_equivalent(p1: &Preparation, p2: &Preparation) -> Result<bool> {
    if p1.dim() != p2.dim() {
        return Err(Error::Shape(format!(
            "comparing preparations of dims {} and {}",
            p1.dim(),
            p2.dim()
        )));
    }
    Ok(trace_distance(p1.operational_density(), p2.operational_density())? <= tolerance::EQUAL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    NaivePure,
    KentLightCone,
    DeterministicExperimenter,
    ExplicitList,
}

/// Rule deciding which preparations belong to the verifying set.
#[derive(Debug, Clone, PartialEq)]
pub enum MembershipPolicy {
    /// Every pure-state preparation verifies, regardless of provenance.
    NaivePure,
    /// Members are preparations whose records all lie in the past light cone
    /// of the box event.
    KentLightCone { box_event: SpacetimeEvent },
    /// Only singleton, locally deterministic preparations.
    DeterministicExperimenter,
    /// Members listed by label.
    ExplicitList { labels: BTreeSet<String> },
}

impl MembershipPolicy {
    /// Builds a policy from loosely-typed parts, requiring exactly the
    /// parameters the kind needs.
    pub fn from_parts(
        kind: PolicyKind,
        box_event: Option<SpacetimeEvent>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        match (kind, box_event, labels) {
            (PolicyKind::NaivePure, None, None) => Ok(MembershipPolicy::NaivePure),
            (PolicyKind::DeterministicExperimenter, None, None) => Ok(MembershipPolicy::DeterministicExperimenter),
            (PolicyKind::KentLightCone, Some(box_event), None) => Ok(MembershipPolicy::KentLightCone { box_event }),
            (PolicyKind::ExplicitList, None, Some(labels)) => Ok(MembershipPolicy::ExplicitList {
                labels: labels.into_iter().collect(),
            }),
            (PolicyKind::KentLightCone, None, _) => {
                Err(Error::Config("kent_light_cone policy requires a box event".into()))
            }
            (PolicyKind::ExplicitList, _, None) => {
                Err(Error::Config("explicit_list policy requires a label list".into()))
            }
            (kind, _, _) => Err(Error::Config(format!("unexpected parameters for policy {kind:?}"))),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            MembershipPolicy::NaivePure => PolicyKind::NaivePure,
            MembershipPolicy::KentLightCone { .. } => PolicyKind::KentLightCone,
            MembershipPolicy::DeterministicExperimenter => PolicyKind::DeterministicExperimenter,
            MembershipPolicy::ExplicitList { .. } => PolicyKind::ExplicitList,
        }
    }
}

/// Whether `p` belongs to the verifying set under `policy`.
pub fn classify_membership(p: &Preparation, policy: &MembershipPolicy) -> bool {
    match policy {
        MembershipPolicy::NaivePure => p.ensemble.iter().all(|(_, rho)| rho.is_pure()),
        MembershipPolicy::KentLightCone { box_event } => {
            p.provenance.records.iter().all(|e| in_past_light_cone(e, box_event))
        }
        MembershipPolicy::DeterministicExperimenter => {
            p.provenance.tag == ProvenanceTag::LocalDeterministic && p.ensemble.len() == 1
        }
        MembershipPolicy::ExplicitList { labels } => labels.contains(&p.label),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{c, CMatrix};

    fn ev(t: f64, x: f64) -> SpacetimeEvent {
        SpacetimeEvent::new(t, x).unwrap()
    }

    fn local(tag: ProvenanceTag) -> Provenance {
        Provenance::new(tag, vec![ev(0.0, 0.0)]).unwrap()
    }

    fn mix(label: &str, a: &Ket, b: &Ket, tag: ProvenanceTag) -> Preparation {
        Preparation::new(label, vec![(0.5, a.projector()), (0.5, b.projector())], local(tag)).unwrap()
    }

    #[test]
    fn effective_density_examples() {
        let single = Preparation::pure("z", &Ket::zero(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        assert_eq!(effective_density(&single), Ket::zero().projector());

        let half = DensityOperator::maximally_mixed(2).unwrap();
        let zmix = mix("zmix", &Ket::zero(), &Ket::one(), ProvenanceTag::LocalEnsemble);
        assert!(trace_distance(&effective_density(&zmix), &half).unwrap() < 1e-15);

        // oracle: (|+><+| + |-><-|)/2 entrywise = [[1/2, 0], [0, 1/2]]
        let xmix = mix("xmix", &Ket::plus(), &Ket::minus(), ProvenanceTag::LocalEnsemble);
        let m = effective_density(&xmix).matrix().clone();
        let expect = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!((m - expect).norm() < 1e-15);
    }

    #[test]
    fn equivalence_examples() {
        let d = Preparation::pure("d", &Ket::one(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        let e = Preparation::pure("e", &Ket::one(), local(ProvenanceTag::LocalEnsemble)).unwrap();
        assert!(linearly_equivalent(&d, &e).unwrap());

        let zmix = mix("zmix", &Ket::zero(), &Ket::one(), ProvenanceTag::LocalEnsemble);
        let xmix = mix("xmix", &Ket::plus(), &Ket::minus(), ProvenanceTag::LocalEnsemble);
        assert!(linearly_equivalent(&zmix, &xmix).unwrap());

        let z = Preparation::pure("z", &Ket::zero(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        let p = Preparation::pure("p", &Ket::plus(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        assert!(!linearly_equivalent(&z, &p).unwrap());

        let q = Preparation::pure(
            "q",
            &Ket::basis(3, 0).unwrap(),
            local(ProvenanceTag::LocalDeterministic),
        )
        .unwrap();
        assert!(matches!(linearly_equivalent(&z, &q), Err(Error::Shape(_))));
    }

    #[test]
    fn heralded_member_fixes_statistics() {
        let remote = Preparation::new(
            "r",
            vec![(0.5, Ket::zero().projector()), (0.5, Ket::one().projector())],
            Provenance::new(ProvenanceTag::RemoteSteered, vec![ev(0.0, 10.0)]).unwrap(),
        )
        .unwrap()
        .with_realized(0)
        .unwrap();
        let local0 = Preparation::pure("v", &Ket::zero(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        assert!(linearly_equivalent(&remote, &local0).unwrap());
        assert!(remote.clone().with_realized(2).is_err());
    }

    #[test]
    fn light_cone_examples() {
        assert!(in_past_light_cone(&ev(0.0, 0.0), &ev(1.0, 0.0)));
        assert!(!in_past_light_cone(&ev(0.0, 5.0), &ev(1.0, 0.0)));
        assert!(in_past_light_cone(&ev(0.0, 1.0), &ev(1.0, 0.0)));
    }

    #[test]
    fn invalid_construction() {
        assert!(Provenance::new(ProvenanceTag::RemoteSteered, vec![]).is_err());
        assert!(SpacetimeEvent::new(f64::NAN, 0.0).is_err());
        let bad = Preparation::new(
            "w",
            vec![(0.6, Ket::zero().projector()), (0.6, Ket::one().projector())],
            local(ProvenanceTag::LocalEnsemble),
        );
        assert!(bad.is_err());
        let neg = Preparation::new(
            "n",
            vec![(1.5, Ket::zero().projector()), (-0.5, Ket::one().projector())],
            local(ProvenanceTag::LocalEnsemble),
        );
        assert!(neg.is_err());
    }

    #[test]
    fn membership_examples() {
        let remote = Preparation::pure(
            "r",
            &Ket::zero(),
            Provenance::new(ProvenanceTag::RemoteSteered, vec![ev(0.0, 10.0)]).unwrap(),
        )
        .unwrap();
        assert!(classify_membership(&remote, &MembershipPolicy::NaivePure));
        let kent = MembershipPolicy::KentLightCone {
            box_event: ev(1.0, 0.0),
        };
        assert!(!classify_membership(&remote, &kent));

        let ensemble = mix("e", &Ket::zero(), &Ket::one(), ProvenanceTag::LocalEnsemble);
        assert!(!classify_membership(
            &ensemble,
            &MembershipPolicy::DeterministicExperimenter
        ));
        let det = Preparation::pure("d", &Ket::zero(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        assert!(classify_membership(&det, &MembershipPolicy::DeterministicExperimenter));

        let list = MembershipPolicy::from_parts(PolicyKind::ExplicitList, None, Some(vec!["d".into()])).unwrap();
        assert!(classify_membership(&det, &list));
        assert!(!classify_membership(&remote, &list));

        let mixed = Preparation::new(
            "m",
            vec![(1.0, DensityOperator::maximally_mixed(2).unwrap())],
            local(ProvenanceTag::LocalDeterministic),
        )
        .unwrap();
        assert!(!classify_membership(&mixed, &MembershipPolicy::NaivePure));
    }

    #[test]
    fn policy_parameters_required() {
        assert!(matches!(
            MembershipPolicy::from_parts(PolicyKind::KentLightCone, None, None),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            MembershipPolicy::from_parts(PolicyKind::ExplicitList, None, None),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            MembershipPolicy::from_parts(PolicyKind::NaivePure, Some(ev(0.0, 0.0)), None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn class_split_exists() {
        let local0 = Preparation::pure("v", &Ket::zero(), local(ProvenanceTag::LocalDeterministic)).unwrap();
        let remote0 = Preparation::pure(
            "r",
            &Ket::zero(),
            Provenance::new(ProvenanceTag::RemoteSteered, vec![ev(0.0, 10.0)]).unwrap(),
        )
        .unwrap();
        let kent = MembershipPolicy::KentLightCone {
            box_event: ev(1.0, 0.0),
        };
        assert!(linearly_equivalent(&local0, &remote0).unwrap());
        assert_ne!(
            classify_membership(&local0, &kent),
            classify_membership(&remote0, &kent)
        );
    }
}
