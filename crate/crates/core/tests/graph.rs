mod common;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use common::*;
use eo_core::{Engine, EventId, Graph, Value};
use proptest::prelude::*;

static CLOCK: AtomicU64 = AtomicU64::new(1);

fn jitter_clock() -> u64 {
    let mut x = CLOCK.load(Ordering::Relaxed);
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    CLOCK.store(x, Ordering::Relaxed);
    x
}

fn snapshot(e: &Engine) -> Vec<(String, String, Value)> {
    let mut out = Vec::new();
    for name in [JOHN, CLEARING] {
        for (p, v) in e.state(name).unwrap() {
            let v = match v {
                Value::Ref(t) => Value::Text(e.graph().individual_name(t).unwrap().to_string()),
                v => v,
            };
            out.push((name.to_string(), p, v));
        }
    }
    out
}

fn run(e: &mut Engine, ops: &[Op]) {
    for op in ops {
        let _ = apply(e, op);
    }
}

proptest! {
    #[test]
    fn timestamps_never_affect_state(seed in 1u64.., ops in script(30)) {
        let mut plain = feast(5);
        run(&mut plain, &ops);
        CLOCK.store(seed, Ordering::Relaxed);
        let mut jittered = Engine::new(5);
        jittered.set_clock(jitter_clock);
        jittered.load(eo_core::scenarios::WINTER_FEAST).unwrap();
        run(&mut jittered, &ops);
        prop_assert_eq!(snapshot(&plain), snapshot(&jittered));
        prop_assert_eq!(plain.value_sequence(), jittered.value_sequence());
    }

    #[test]
    fn causes_precede_effects(ops in script(40)) {
        let mut e = feast(8);
        let mut before: Vec<EventId> = Vec::new();
        for op in &ops {
            let _ = apply(&mut e, op);
            let now: Vec<EventId> = e.graph().events().iter().map(|ev| ev.id).collect();
            prop_assert_eq!(&now[..before.len()], &before[..]);
            before = now;
        }
        let g = e.graph();
        for (i, ev) in g.events().iter().enumerate() {
            for c in &ev.cause {
                prop_assert!(g.position(*c).unwrap() < i);
            }
        }
    }

    #[test]
    fn import_preserves_state_and_reachability(ops in script(25)) {
        let mut e = feast(9);
        run(&mut e, &ops);
        let (copy, remap) = Graph::import(e.graph().events(), 77).unwrap();
        let g = e.graph();
        prop_assert_eq!(copy.len(), g.len());
        for ind in [JOHN, CLEARING] {
            for (p, _) in e.state(ind).unwrap() {
                let original = g.current_value(ind, &p).unwrap();
                let imported = copy.current_value(ind, &p).unwrap();
                let expected = match original {
                    Value::Ref(t) => Value::Ref(remap[&t]),
                    v => v,
                };
                prop_assert_eq!(imported, expected);
                prop_assert_eq!(g.history(ind, &p).unwrap().len(), copy.history(ind, &p).unwrap().len());
            }
        }
        for ev in g.events().iter().rev().take(10) {
            let a: BTreeSet<EventId> = g.causal_trace(ev.id, usize::MAX).unwrap().nodes.iter().map(|n| remap[n]).collect();
            let b: BTreeSet<EventId> = copy.causal_trace(remap[&ev.id], usize::MAX).unwrap().nodes.into_iter().collect();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn branch_then_replay_matches_straight_run() {
    let steps = walkthrough();
    let mut straight = feast(3);
    run(&mut straight, &steps);

    let mut early = feast(3);
    run(&mut early, &steps[..4]);
    let at = early.graph().last().unwrap().id;
    let mut branched = Engine::from_graph(straight.graph().branch(at).unwrap()).unwrap();
    assert_eq!(snapshot(&branched), snapshot(&early));
    run(&mut branched, &steps[4..]);
    assert_eq!(snapshot(&branched), snapshot(&straight));
    assert_eq!(branched.value_sequence(), straight.value_sequence());
}

#[test]
fn branch_at_latest_is_identity() {
    let mut e = feast(3);
    run(&mut e, &walkthrough()[..3]);
    let head = e.graph().last().unwrap().id;
    let b = Engine::from_graph(e.graph().branch(head).unwrap()).unwrap();
    assert_eq!(snapshot(&b), snapshot(&e));
}

#[test]
fn reducing_the_fire_cascade_keeps_state_and_trace_endpoints() {
    let steps = walkthrough();
    let mut e = feast(12);
    run(&mut e, &steps[..4]);
    let fire = apply(&mut e, &steps[4]).unwrap();
    let trigger = fire.trigger.unwrap();
    let g = e.graph();
    let john = g.individual(JOHN).unwrap();
    let warm = g
        .slot_history(john, "warmth")
        .last()
        .map(|ev| ev.id)
        .unwrap();
    assert_eq!(g.value_of(john, "warmth"), Value::Number(70.0));

    let mut chain = vec![warm];
    while *chain.last().unwrap() != trigger {
        let next = g.get(*chain.last().unwrap()).unwrap().cause[0];
        chain.push(next);
    }
    chain.reverse();
    assert!(chain.len() >= 3);

    let reduced = g.transitive_reduce(&chain).unwrap();
    for ind in [JOHN, CLEARING] {
        for (p, v) in e.state(ind).unwrap() {
            assert_eq!(reduced.current_value(ind, &p).unwrap(), v);
        }
    }
    for id in &chain[1..chain.len() - 1] {
        assert!(reduced.is_archived(*id));
    }
    assert!(reduced.effective_causes(warm).contains(&trigger));
    let before = g.causal_trace(warm, usize::MAX).unwrap();
    let after = reduced.causal_trace(warm, usize::MAX).unwrap();
    assert_eq!(before.root, after.root);
    assert!(after.nodes.contains(&trigger));
    assert!(after.nodes.iter().all(|n| !reduced.is_archived(*n)));

    let short = g.transitive_reduce(&chain[chain.len() - 2..]).unwrap();
    assert_eq!(short.len(), g.len());
    assert!(g.transitive_reduce(&[chain[0], warm]).is_err() || chain.len() == 2);
}

#[test]
fn rebuilt_from_import_keeps_values() {
    let mut e = feast(21);
    run(&mut e, &walkthrough());
    let copy = Engine::import(&e.export(), 99).unwrap();
    assert_eq!(snapshot(&copy), snapshot(&e));
}
