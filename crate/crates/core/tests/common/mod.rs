#![allow(dead_code)]

use nlbox::boxes::{
    BoxKind, BrunBoxConfig, DeutschBoxConfig, FixedPointSettings, KrausChannel, NonlinearBox, Semantics,
};
use nlbox::preparations::{MembershipPolicy, Preparation, Provenance, ProvenanceTag, SpacetimeEvent};
use nlbox::quantum::{eigh, random, CMatrix, DensityOperator, Ket, Unitary, C64};
use rand::Rng;

pub fn ev(t: f64, x: f64) -> SpacetimeEvent {
    SpacetimeEvent::new(t, x).unwrap()
}

pub fn box_event() -> SpacetimeEvent {
    ev(1.0, 0.0)
}

pub fn local(tag: ProvenanceTag) -> Provenance {
    Provenance::new(tag, vec![ev(0.0, 0.0)]).unwrap()
}

/// A decomposition of `sigma` into `n >= rank` members, from the columns of
/// `sqrt(sigma)` rotated by a random unitary.
pub fn random_decomposition<R: Rng>(sigma: &DensityOperator, n: usize, rng: &mut R) -> Vec<(f64, DensityOperator)> {
    let d = sigma.dim();
    let eig = eigh(sigma.matrix());
    let u = random::unitary(n.max(d), rng).unwrap();
    let mut out = Vec::new();
    for i in 0..n.max(d) {
        let mut v = vec![C64::new(0.0, 0.0); d];
        for k in 0..d {
            let lam = eig.values[k].max(0.0).sqrt();
            for (r, vr) in v.iter_mut().enumerate() {
                *vr += u.matrix()[(i, k)] * lam * eig.vectors[(r, k)];
            }
        }
        let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if w > 1e-12 {
            out.push((w, Ket::normalized(v).unwrap().projector()));
        }
    }
    let total: f64 = out.iter().map(|(w, _)| w).sum();
    out.into_iter().map(|(w, r)| (w / total, r)).collect()
}

pub fn mixture(label: &str, members: &[&Ket], tag: ProvenanceTag) -> Preparation {
    let w = 1.0 / members.len() as f64;
    Preparation::new(label, members.iter().map(|k| (w, k.projector())).collect(), local(tag)).unwrap()
}

pub fn brun_box(semantics: Semantics, policy: MembershipPolicy) -> NonlinearBox {
    NonlinearBox::new(BoxKind::Brun(BrunBoxConfig::bb84()), box_event(), semantics, policy)
}

pub fn swap_cnot() -> Unitary {
    Unitary::swap().compose(&Unitary::cnot()).unwrap()
}

/// One of every built-in qubit box kind.
pub fn all_boxes(semantics: Semantics, policy: MembershipPolicy) -> Vec<NonlinearBox> {
    let deutsch = |u: Unitary| BoxKind::Deutsch(DeutschBoxConfig::new(u, 2, FixedPointSettings::default()).unwrap());
    vec![
        BoxKind::Brun(BrunBoxConfig::bb84()),
        BoxKind::Kent(BrunBoxConfig::bb84()),
        deutsch(Unitary::swap()),
        deutsch(Unitary::cnot()),
        deutsch(swap_cnot()),
        deutsch(Unitary::identity(4).unwrap()),
        BoxKind::Linear(KrausChannel::identity_with_ancilla()),
    ]
    .into_iter()
    .map(|k| NonlinearBox::new(k, box_event(), semantics, policy.clone()))
    .collect()
}

pub fn is_valid_density(m: &CMatrix) -> bool {
    let tr: C64 = m.diagonal().iter().sum();
    (tr.re - 1.0).abs() < 1e-9 && tr.im.abs() < 1e-9 && (m - m.adjoint()).norm() < 1e-9 && eigh(m).min_value() > -1e-9
}
