use bcg_core::gmn::{build_gmn, GroundedNetwork};
use bcg_core::grounder::{full_grounding, ground, ground_with_domain, GrounderParams};
use bcg_core::oracle::{enumerate_hu, forward_closure};
use bcg_core::reasoner::{propagate, ScoreTable, Steps, TNorm};
use bcg_core::synth::{random_instance, RandomShape};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn small(max_constants: usize) -> RandomShape {
    RandomShape {
        max_constants,
        ..RandomShape::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crisp_propagation_is_forward_chaining(seed in any::<u64>()) {
        let inst = random_instance(seed, small(6));
        let store = inst.store();
        let result = ground_with_domain(&inst.theory, &store, GrounderParams::full(), &inst.head_base(), &inst.constants).unwrap();
        let net = build_gmn(&result, &inst.theory);
        let facts: BTreeSet<_> = inst.facts.iter().cloned().collect();
        let closure: BTreeSet<String> = forward_closure(&inst.theory, &facts, &inst.constants)
            .iter()
            .map(|a| a.display(&inst.theory.symbols).to_string())
            .collect();
        for kind in TNorm::ALL {
            let init = ScoreTable::init(&net, |_| 0.0);
            let (out, run) = propagate(&net, &init, kind, Steps::Fixpoint).unwrap();
            prop_assert!(run.converged);
            let derived: BTreeSet<String> = (0..net.nodes.len() as u32)
                .filter(|&n| !net.nodes[n as usize].known && out.score(n) == 1.0)
                .map(|n| net.node_name(n))
                .collect();
            prop_assert_eq!(&derived, &closure, "{}", kind);
            prop_assert!(out.scores().iter().all(|v| *v == 0.0 || *v == 1.0));
        }
    }

    #[test]
    fn propagation_is_monotone_and_bounded(seed in any::<u64>(), prior in 0.0f64..1.0) {
        let inst = random_instance(seed, small(5));
        let result = ground(&inst.theory, &inst.store(), GrounderParams::new(2, 3).uncertain(), &inst.head_base()).unwrap();
        let net = build_gmn(&result, &inst.theory);
        let init = ScoreTable::init(&net, |n| (prior + n as f64 * 0.137).fract());
        for kind in TNorm::ALL {
            for t in 0..4 {
                let (a, _) = propagate(&net, &init, kind, Steps::Fixed(t)).unwrap();
                let (b, _) = propagate(&net, &init, kind, Steps::Fixed(t + 1)).unwrap();
                for n in 0..net.nodes.len() as u32 {
                    prop_assert!(b.score(n) >= a.score(n));
                    prop_assert!((0.0..=1.0).contains(&b.score(n)));
                }
            }
        }
    }

    #[test]
    fn network_grows_with_width_and_depth(seed in any::<u64>()) {
        let inst = random_instance(seed, RandomShape::default());
        let store = inst.store();
        let roots = inst.head_base();
        let size = |w: usize, d: usize| {
            let s = build_gmn(&ground(&inst.theory, &store, GrounderParams::new(w, d), &roots).unwrap(), &inst.theory).stats();
            (s.nodes, s.edges)
        };
        for w in 0..3 {
            for d in 1..3 {
                let (n, e) = size(w, d);
                let (n1, e1) = size(w, d + 1);
                let (n2, e2) = size(w + 1, d);
                prop_assert!(n <= n1 && e <= e1 && n <= n2 && e <= e2);
            }
        }
    }

    #[test]
    fn export_import_round_trip(seed in any::<u64>()) {
        let inst = random_instance(seed, small(5));
        let result = ground(&inst.theory, &inst.store(), GrounderParams::new(1, 2).uncertain(), &inst.head_base()).unwrap();
        let net = build_gmn(&result, &inst.theory);
        let back = GroundedNetwork::import(net.to_text().as_bytes()).unwrap();
        prop_assert_eq!(back.stats(), net.stats());
        prop_assert_eq!(back, net);
    }

    #[test]
    fn full_grounder_is_herbrand_universe(seed in any::<u64>()) {
        let inst = random_instance(seed, small(6));
        let hu: BTreeSet<_> = enumerate_hu(&inst.theory, &inst.constants, u128::MAX)
            .unwrap()
            .into_iter()
            .map(|g| (g.rule_id, g.substitution))
            .collect();
        let bare = full_grounding(&inst.theory, &inst.constants, u128::MAX).unwrap();
        prop_assert_eq!(bare.instance_keys(), hu.clone());
        let with_facts = ground_with_domain(&inst.theory, &inst.store(), GrounderParams::full(), &inst.head_base(), &inst.constants).unwrap();
        prop_assert_eq!(with_facts.instance_keys(), hu);
    }
}
