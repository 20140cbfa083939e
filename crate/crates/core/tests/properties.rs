mod common;

use common::*;
use nlbox::boxes::{apply_box, BoxKind, KrausChannel, NonlinearBox, Semantics};
use nlbox::preparations::{
    classify_membership, linearly_equivalent, MembershipPolicy, Preparation, Provenance, ProvenanceTag,
};
use nlbox::protocols::{
    default_alice_event, run_bb84_attack, run_signaling_test, run_signaling_test_at, run_verification, AliceSetting,
    EveStrategy,
};
use nlbox::quantum::{
    born_probabilities, partial_trace, random, trace_distance, CMatrix, DensityOperator, Ket, Povm, C64,
};
use nlbox::steering::{hjw_assemblage, purify, reproduction_error, EnsembleDecomposition};
use nlbox::witness::{affinity_violation, fit_linear_map, pauli_inputs, pauli_measurements, StatsTable};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn brun_settings() -> Vec<AliceSetting> {
    let cfg = nlbox::boxes::BrunBoxConfig::bb84();
    vec![
        AliceSetting::new("psi", cfg.psi().clone()),
        AliceSetting::new("phi", cfg.phi().clone()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn constructors_reject_invalid_densities(seed in any::<u64>(), d in 2usize..4, scale in 1.01f64..3.0) {
        let mut r = rng(seed);
        let rho = random::density(d, d, &mut r).unwrap();
        // wrong trace
        prop_assert!(DensityOperator::new(rho.matrix() * C64::new(scale, 0.0)).is_err());
        // non-Hermitian
        let mut skew = rho.matrix().clone();
        skew[(0, 1)] += C64::new(0.0, 0.1);
        prop_assert!(DensityOperator::new(skew).is_err());
        // negative eigenvalue with unit trace
        let mut neg = CMatrix::zeros(d, d);
        neg[(0, 0)] = C64::new(scale, 0.0);
        neg[(1, 1)] = C64::new(1.0 - scale, 0.0);
        prop_assert!(DensityOperator::new(neg).is_err());
        let amps: Vec<C64> = (0..d).map(|i| C64::new(if i == 0 { scale } else { 0.0 }, 0.0)).collect();
        prop_assert!(Ket::new(amps).is_err());
    }

    #[test]
    fn partial_trace_undoes_tensor(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let a = random::density(da, da, &mut r).unwrap();
        let b = random::density(db, db, &mut r).unwrap();
        let ab = a.tensor(&b).unwrap();
        prop_assert!(trace_distance(&partial_trace(&ab, &[da, db], &[0]).unwrap(), &a).unwrap() < 1e-9);
        prop_assert!(trace_distance(&partial_trace(&ab, &[da, db], &[1]).unwrap(), &b).unwrap() < 1e-9);
    }

    #[test]
    fn born_gives_distributions(seed in any::<u64>(), d in 1usize..5, env in 1usize..4) {
        let mut r = rng(seed);
        let rho = random::density(d, 1 + seed as usize % d, &mut r).unwrap();
        // effects K^dagger K of a random channel form a POVM
        let ch = random::channel(d, d, env, &mut r).unwrap();
        let mut effects = Vec::new();
        for k in ch.kraus() {
            for row in 0..k.nrows() {
                let v = k.row(row).adjoint();
                effects.push(&v * v.adjoint());
            }
        }
        let povm = Povm::new(effects).unwrap();
        let p = born_probabilities(&rho, &povm).unwrap();
        prop_assert!(p.iter().all(|x| *x >= 0.0 && *x <= 1.0 + 1e-12));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_triangle(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let a = random::density(d, 1 + seed as usize % d, &mut r).unwrap();
        let b = random::density(d, d, &mut r).unwrap();
        let c = random::density(d, 1, &mut r).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-8);
        prop_assert!((trace_distance(&b, &a).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn linear_equivalence_is_an_equivalence(seed in any::<u64>(), d in 2usize..4, n in 2usize..5) {
        let mut r = rng(seed);
        let sigma = random::density(d, d, &mut r).unwrap();
        let preps: Vec<Preparation> = (0..3)
            .map(|i| {
                Preparation::new(format!("p{i}"), random_decomposition(&sigma, n, &mut r), local(ProvenanceTag::LocalEnsemble))
                    .unwrap()
            })
            .collect();
        for p in &preps {
            prop_assert!(linearly_equivalent(p, p).unwrap());
        }
        for a in &preps {
            for b in &preps {
                prop_assert_eq!(linearly_equivalent(a, b).unwrap(), linearly_equivalent(b, a).unwrap());
                prop_assert!(linearly_equivalent(a, b).unwrap());
            }
        }
        let other = random::density(d, d, &mut r).unwrap();
        let q = Preparation::new("q", vec![(1.0, other)], local(ProvenanceTag::LocalEnsemble)).unwrap();
        if trace_distance(q.effective(), &sigma).unwrap() > 2e-8 {
            prop_assert!(!linearly_equivalent(&preps[0], &q).unwrap());
        }
    }

    #[test]
    fn membership_is_pure_and_translation_invariant(
        seed in any::<u64>(),
        t in -20.0f64..20.0, x in -20.0f64..20.0,
        bt in -20.0f64..20.0, bx in -20.0f64..20.0,
        dt in -50.0f64..50.0, dx in -50.0f64..50.0,
    ) {
        let mut r = rng(seed);
        let ket = random::ket(2, &mut r).unwrap();
        let tag = [ProvenanceTag::LocalDeterministic, ProvenanceTag::LocalEnsemble, ProvenanceTag::RemoteSteered][seed as usize % 3];
        let p = Preparation::pure("p", &ket, Provenance::new(tag, vec![ev(t, x)]).unwrap()).unwrap();
        let moved = p.clone().with_provenance(p.provenance().translated(dt, dx));
        let policy = MembershipPolicy::KentLightCone { box_event: ev(bt, bx) };
        let shifted = MembershipPolicy::KentLightCone { box_event: ev(bt, bx).translated(dt, dx) };
        let first = classify_membership(&p, &policy);
        prop_assert_eq!(first, classify_membership(&p, &policy));
        prop_assert_eq!(first, classify_membership(&moved, &shifted));
        prop_assert_eq!(first, bt - t >= (bx - x).abs());
        for other in [MembershipPolicy::NaivePure, MembershipPolicy::DeterministicExperimenter] {
            prop_assert_eq!(classify_membership(&p, &other), classify_membership(&p, &other));
        }
    }

    #[test]
    fn equal_ensembles_give_equal_outputs(seed in any::<u64>(), n in 1usize..4, decomposition in any::<bool>()) {
        let mut r = rng(seed);
        let sigma = random::density(2, 2, &mut r).unwrap();
        let ensemble = random_decomposition(&sigma, n, &mut r);
        let semantics = if decomposition { Semantics::Decomposition } else { Semantics::State };
        let p1 = Preparation::new("a", ensemble.clone(), local(ProvenanceTag::LocalEnsemble)).unwrap();
        let p2 = Preparation::new("b", ensemble, Provenance::new(ProvenanceTag::LocalEnsemble, vec![ev(0.5, 0.2)]).unwrap()).unwrap();
        for b in all_boxes(semantics, MembershipPolicy::NaivePure) {
            let b = match b.kind() {
                // a random state is outside the Brun domain
                BoxKind::Brun(_) | BoxKind::Kent(_) => continue,
                _ => b,
            };
            let (o1, o2) = (apply_box(&b, &p1).unwrap(), apply_box(&b, &p2).unwrap());
            prop_assert!(trace_distance(&o1, &o2).unwrap() < 1e-9);
            prop_assert!(is_valid_density(o1.matrix()));
        }
    }

    #[test]
    fn state_semantics_is_density_functional(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let sigma = random::density(2, 2, &mut r).unwrap();
        let p1 = Preparation::new("a", random_decomposition(&sigma, n, &mut r), local(ProvenanceTag::LocalEnsemble)).unwrap();
        let p2 = Preparation::new("b", random_decomposition(&sigma, n, &mut r), local(ProvenanceTag::LocalEnsemble)).unwrap();
        for b in all_boxes(Semantics::State, MembershipPolicy::NaivePure) {
            let o1 = apply_box(&b, &p1).unwrap();
            let o2 = apply_box(&b, &p2).unwrap();
            prop_assert!(trace_distance(&o1, &o2).unwrap() < 1e-9);
            prop_assert!(affinity_violation(&b, (&p1, &p2)).unwrap() < 1e-9);
        }
    }

    #[test]
    fn affinity_is_symmetric(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let sigma = random::density(2, 2, &mut r).unwrap();
        let p1 = Preparation::new("a", random_decomposition(&sigma, n, &mut r), local(ProvenanceTag::LocalEnsemble)).unwrap();
        let p2 = Preparation::new("b", random_decomposition(&sigma, n, &mut r), local(ProvenanceTag::LocalEnsemble)).unwrap();
        for b in all_boxes(Semantics::Decomposition, MembershipPolicy::NaivePure) {
            if matches!(b.kind(), BoxKind::Brun(_) | BoxKind::Kent(_)) {
                continue;
            }
            let ab = affinity_violation(&b, (&p1, &p2)).unwrap();
            let ba = affinity_violation(&b, (&p2, &p1)).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
        }
    }

    #[test]
    fn steering_round_trip(seed in any::<u64>(), d in 2usize..4, n in 1usize..5, mixed in any::<bool>()) {
        let mut r = rng(seed);
        let members: Vec<(f64, DensityOperator)> = (0..n)
            .map(|_| {
                let rank = if mixed { 1 + r.random_range(0..d) } else { 1 };
                (r.random_range(0.1..1.0), random::density(d, rank, &mut r).unwrap())
            })
            .collect();
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        let members: Vec<_> = members.into_iter().map(|(w, m)| (w / total, m)).collect();
        let dec = EnsembleDecomposition::of_members(members).unwrap();
        let a = hjw_assemblage(&dec).unwrap();
        let (dp, dd) = reproduction_error(&a, &dec).unwrap();
        prop_assert!(dp < 1e-8 && dd < 1e-8);
        prop_assert!(trace_distance(&a.marginal_b().unwrap(), dec.sigma()).unwrap() < 1e-8);
        let mut avg = CMatrix::zeros(d, d);
        for (p, rho) in a.heralded() {
            if let Some(rho) = rho {
                avg += rho.matrix() * C64::new(*p, 0.0);
            }
        }
        prop_assert!((avg - dec.sigma().matrix()).norm() < 1e-8);
    }

    #[test]
    fn purify_is_deterministic(seed in any::<u64>(), d in 1usize..4) {
        let sigma = random::density(d, 1 + seed as usize % d, &mut rng(seed)).unwrap();
        let again = random::density(d, 1 + seed as usize % d, &mut rng(seed)).unwrap();
        let (k1, a1) = purify(&sigma);
        let (k2, a2) = purify(&again);
        prop_assert_eq!(a1, a2);
        prop_assert_eq!(k1, k2);
    }

    #[test]
    fn fit_recovers_random_channels(seed in any::<u64>(), dout in 1usize..4, env in 1usize..4) {
        prop_assume!(dout * env >= 2);
        let mut r = rng(seed);
        let ch = random::channel(2, dout, env, &mut r).unwrap();
        let measurements: Vec<_> = (0..3)
            .map(|i| {
                let u = random::unitary(dout, &mut r).unwrap();
                let basis: Vec<Ket> = (0..dout)
                    .map(|k| Ket::new(u.matrix().column(k).iter().copied().collect()).unwrap())
                    .collect();
                (format!("m{i}"), Povm::from_basis(&basis).unwrap())
            })
            .collect();
        let t = StatsTable::from_map(&pauli_inputs(), &measurements, |rho| ch.apply(rho)).unwrap();
        let fit = fit_linear_map(&t).unwrap();
        prop_assert!(fit.residual <= 1e-8);
        for (_, rho) in t.preparations() {
            let want = ch.apply(rho).unwrap();
            let got = fit.apply(rho.matrix());
            // action on the input set, as seen by the measurements
            for (_, m) in &measurements {
                for e in m.effects() {
                    let pw: f64 = (e * want.matrix()).trace().re;
                    let pg: f64 = (e * &got).trace().re;
                    prop_assert!((pw - pg).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn no_signaling_when_remote_preparations_are_excluded(
        seed in any::<u64>(), ax in 3.0f64..100.0, at in -2.0f64..0.5, decomposition in any::<bool>(),
    ) {
        let semantics = if decomposition { Semantics::Decomposition } else { Semantics::State };
        // Alice's record spacelike to the box at (1, 0)
        let alice = ev(at, ax);
        let listed: std::collections::BTreeSet<String> = ["psi0", "psi1", "phi0", "phi1"].iter().map(|s| s.to_string()).collect();
        for policy in [
            MembershipPolicy::KentLightCone { box_event: box_event() },
            MembershipPolicy::DeterministicExperimenter,
            MembershipPolicy::ExplicitList { labels: listed.clone() },
        ] {
            for b in all_boxes(semantics, policy.clone()) {
                let m = run_signaling_test_at(&b, &brun_settings(), &alice).unwrap().signaling_metric;
                prop_assert!(m < 1e-9, "{:?} {:?}: {}", b.kind(), policy.kind(), m);
            }
        }
        let _ = seed;
    }

    #[test]
    fn linear_boxes_never_signal(seed in any::<u64>(), dout in 2usize..5, env in 1usize..3) {
        let ch = random::channel(2, dout, env, &mut rng(seed)).unwrap();
        for policy in [MembershipPolicy::NaivePure, MembershipPolicy::DeterministicExperimenter] {
            let b = NonlinearBox::new(BoxKind::Linear(ch.clone()), box_event(), Semantics::Decomposition, policy);
            prop_assert!(run_signaling_test(&b, &brun_settings()).unwrap().signaling_metric < 1e-9);
        }
    }

    // psi0 passes through as |00>, which is already its target, so leaving it
    // out of the list is invisible to verification.
    #[test]
    fn verification_iff_distinguishing_states_admitted(mask in 0u8..16, decomposition in any::<bool>()) {
        let names = ["psi0", "psi1", "phi0", "phi1"];
        let labels = names.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, s)| s.to_string()).collect();
        let semantics = if decomposition { Semantics::Decomposition } else { Semantics::State };
        let b = brun_box(semantics, MembershipPolicy::ExplicitList { labels });
        prop_assert_eq!(run_verification(&b, 1e-9).unwrap().identified, mask & 0b1110 == 0b1110);
    }

    #[test]
    fn bb84_is_reproducible(seed in any::<u64>(), n in 0u64..300, fixed in any::<bool>()) {
        let strategy = if fixed { EveStrategy::FixedBasis } else { EveStrategy::Resend };
        let b = brun_box(Semantics::Decomposition, MembershipPolicy::DeterministicExperimenter);
        let a = run_bb84_attack(&b, n, seed, strategy).unwrap();
        prop_assert_eq!(&a, &run_bb84_attack(&b, n, seed, strategy).unwrap());
        for v in [a.eve_bit_accuracy, a.eve_basis_accuracy, a.induced_qber, a.sifted_key_fraction] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let t = StatsTable::from_map(&pauli_inputs(), &pauli_measurements(), |r| Ok(r.clone())).unwrap();
        prop_assert_eq!(t.sample(100, &mut rng(seed)).unwrap(), t.sample(100, &mut rng(seed)).unwrap());
    }
}

#[test]
fn built_in_policies_and_verification() {
    let expect = [
        (MembershipPolicy::NaivePure, true),
        (MembershipPolicy::DeterministicExperimenter, true),
        (MembershipPolicy::KentLightCone { box_event: box_event() }, true),
        (
            MembershipPolicy::KentLightCone {
                box_event: ev(-5.0, 0.0),
            },
            false,
        ),
        (
            MembershipPolicy::ExplicitList {
                labels: Default::default(),
            },
            false,
        ),
    ];
    for (policy, identified) in expect {
        let b = brun_box(Semantics::Decomposition, policy.clone());
        assert_eq!(run_verification(&b, 1e-9).unwrap().identified, identified, "{policy:?}");
    }
}

#[test]
fn signaling_completeness() {
    let b = brun_box(Semantics::Decomposition, MembershipPolicy::NaivePure);
    let r = run_signaling_test_at(&b, &brun_settings(), &default_alice_event()).unwrap();
    assert!((r.signaling_metric - 1.0).abs() < 1e-12);
}

#[test]
fn class_split_exists() {
    use nlbox::protocols::run_preparation_problem_demo;
    let b = brun_box(Semantics::Decomposition, MembershipPolicy::DeterministicExperimenter);
    let r = run_preparation_problem_demo(&b).unwrap();
    for e in &r.entries {
        assert!(e.linearly_equivalent);
        assert_ne!(e.verifying_member, e.remote_member);
    }
}

#[test]
fn brun_mixtures_are_separated() {
    let (z0, z1, x0, x1) = (Ket::zero(), Ket::one(), Ket::plus(), Ket::minus());
    let psi = mixture("psi", &[&z0, &z1], ProvenanceTag::LocalEnsemble);
    let phi = mixture("phi", &[&x0, &x1], ProvenanceTag::LocalEnsemble);
    assert!(linearly_equivalent(&psi, &phi).unwrap());
    let b = brun_box(Semantics::Decomposition, MembershipPolicy::NaivePure);
    let d = trace_distance(&apply_box(&b, &psi).unwrap(), &apply_box(&b, &phi).unwrap()).unwrap();
    assert!((d - 1.0).abs() < 1e-12);
}

#[test]
fn deutsch_identity_is_linear() {
    let b = &all_boxes(Semantics::Decomposition, MembershipPolicy::NaivePure)[5];
    let mut r = rng(3);
    for _ in 0..20 {
        let sigma = random::density(2, 2, &mut r).unwrap();
        let p1 = Preparation::new(
            "a",
            random_decomposition(&sigma, 3, &mut r),
            local(ProvenanceTag::LocalEnsemble),
        )
        .unwrap();
        let p2 = Preparation::new(
            "b",
            random_decomposition(&sigma, 2, &mut r),
            local(ProvenanceTag::LocalEnsemble),
        )
        .unwrap();
        assert!(affinity_violation(b, (&p1, &p2)).unwrap() < 1e-9);
        let out = apply_box(b, &p1).unwrap();
        assert!(trace_distance(&out, &sigma).unwrap() < 1e-9);
    }
    let _ = KrausChannel::identity(2);
}
