mod common;

use std::collections::BTreeSet;

use common::*;
use eo_core::engine::CascadeStatus;
use eo_core::scenarios::SURVIVE_THE_WINTER;
use eo_core::{Engine, Value};
use proptest::prelude::*;

/// Properties whose restrictions an event on `property` can reach: direct
/// subscribers, properties assigned by a `SetDo` on it, and so on.
fn reachable(e: &Engine, property: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![property.to_string()];
    while let Some(p) = stack.pop() {
        let mut next: Vec<String> = e
            .subscription_index()
            .subscribers(&p)
            .iter()
            .map(|s| s.dependent.clone())
            .collect();
        for m in e.registry().models() {
            if let Some(mp) = m.property(&p) {
                for act in &mp.set_do {
                    next.extend(act.assignments.iter().map(|(k, _)| k.clone()));
                }
                if !mp.set_do.is_empty() {
                    next.push(p.clone());
                }
            }
        }
        for n in next {
            if seen.insert(n.clone()) {
                stack.push(n);
            }
        }
    }
    seen
}

#[test]
fn cold_and_hungry_offers_only_gathering() {
    let mut e = feast(1);
    for (p, v) in [("energy", 20.0), ("warmth", 20.0)] {
        e.set_property(JOHN, p, Value::Number(v), "player").unwrap();
    }
    assert_eq!(e.available(JOHN).unwrap(), ["action_gather"]);
}

#[test]
fn fire_cascade_derives_the_warm_up() {
    let steps = walkthrough();
    let mut e = feast(2);
    for op in &steps[..4] {
        apply(&mut e, op).unwrap();
    }
    let r = apply(&mut e, &steps[4]).unwrap();
    assert_eq!(r.status, CascadeStatus::Quiescent);
    assert!(r.evaluations <= 50, "{}", r.evaluations);
    let derived: BTreeSet<(String, String)> = r
        .derived
        .iter()
        .map(|id| {
            let ev = e.graph().get(*id).unwrap();
            (ev.kind.clone(), ev.value.to_string())
        })
        .collect();
    let expected: BTreeSet<(String, String)> = [
        ("hasFire", "1"),
        ("_reaction_warm_up", "1"),
        ("hasWood", "0"),
        ("warmth", "70"),
        ("warmthLow", "0"),
        ("_reaction_warm_up", "0"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    assert!(expected.is_subset(&derived), "{derived:?}");
}

#[test]
fn idle_agents_cost_nothing() {
    let mut cost = Vec::new();
    for agents in [1, 60] {
        let mut e = feast(3);
        for i in 0..agents {
            e.load(&format!(
                "Survivor: Individual: Idle {i}\n: SetModel: Model Survivor\n: energy: 50\n: warmth: 50\n"
            ))
            .unwrap();
        }
        let mut total = 0;
        for k in 0..20 {
            let r = e
                .set_property(JOHN, "energy", Value::Number(f64::from(10 + k * 3)), "player")
                .unwrap();
            assert!(r.evaluated.iter().all(|(ind, _)| e.graph().individual_name(*ind) == Some(JOHN)));
            total += r.evaluations;
        }
        cost.push(total);
    }
    assert_eq!(cost[0], cost[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hunting_is_never_offered_while_cold(ops in script(25)) {
        let mut e = feast(4);
        for op in &ops {
            let _ = apply(&mut e, op);
            let cold = num(&e, JOHN, "warmthLow") == Some(1.0);
            let hunt = e.available(JOHN).unwrap().iter().any(|a| a == "action_hunt");
            prop_assert!(!(cold && hunt));
        }
    }
}

proptest! {
    #[test]
    fn derived_flags_follow_their_inputs(ops in script(30)) {
        let mut e = feast(5);
        for op in &ops {
            let _ = apply(&mut e, op);
            let w = num(&e, JOHN, "warmth").unwrap();
            let en = num(&e, JOHN, "energy").unwrap();
            prop_assert_eq!(num(&e, JOHN, "warmthLow"), Some(if w < 30.0 { 1.0 } else { 0.0 }));
            prop_assert_eq!(num(&e, JOHN, "energyLow"), Some(if en < 30.0 { 1.0 } else { 0.0 }));
            let safe = en >= 30.0 && w >= 30.0;
            prop_assert_eq!(num(&e, JOHN, "isSafe"), Some(if safe { 1.0 } else { 0.0 }));
        }
    }

    #[test]
    fn availability_cache_matches_fresh_evaluation(ops in script(30)) {
        let mut e = feast(6);
        for op in &ops {
            let _ = apply(&mut e, op);
            prop_assert_eq!(e.cached_availability(JOHN).unwrap(), e.available_actions(JOHN).unwrap());
        }
    }

    #[test]
    fn identical_scripts_give_identical_histories(ops in script(30), a in any::<u64>(), b in any::<u64>()) {
        let mut x = feast(a);
        let mut y = feast(b);
        for op in &ops {
            prop_assert_eq!(apply(&mut x, op).is_ok(), apply(&mut y, op).is_ok());
        }
        prop_assert_eq!(x.value_sequence(), y.value_sequence());
    }

    #[test]
    fn cascades_stay_local(ops in script(30)) {
        let mut e = feast(7);
        for op in &ops {
            let Ok(r) = apply(&mut e, op) else { continue };
            let touched = match op {
                Op::Set(_, p, _) => p,
                Op::Click(a) => a,
            };
            let reach = reachable(&e, touched);
            for (_, p) in &r.evaluated {
                prop_assert!(p == touched || reach.contains(p), "{} evaluated after {}", p, touched);
            }
            if reach.is_empty() {
                prop_assert_eq!(r.evaluations, 0);
            }
        }
    }

    #[test]
    fn quest_extension_is_monotone(ops in script(20)) {
        let mut e = feast(8);
        for op in &ops {
            let _ = apply(&mut e, op);
        }
        let before: Vec<_> = [JOHN, CLEARING].iter().map(|i| e.state(i).unwrap()).collect();
        let available = e.available(JOHN).unwrap();
        e.load(SURVIVE_THE_WINTER).unwrap();
        let after: Vec<_> = [JOHN, CLEARING].iter().map(|i| e.state(i).unwrap()).collect();
        prop_assert_eq!(before, after);
        prop_assert_eq!(available, e.available(JOHN).unwrap());

        let quest = "Survive the Winter";
        e.set_property(quest, "hours_passed", Value::Number(24.0), "clock").unwrap();
        let safe = num(&e, JOHN, "isSafe") == Some(1.0);
        prop_assert_eq!(num(&e, quest, "day1_complete") == Some(1.0), safe);
    }
}

#[test]
fn unsubscribed_property_costs_nothing() {
    let mut e = feast(9);
    e.load("Attribute: Individual: mood\n: DataType: String\nSurvivor: Model: Model Moody\n: Attribute: mood\nSurvivor: Individual: Sam\n: SetModel: Model Moody\n")
        .unwrap();
    let r = e.set_property("Sam", "mood", Value::Text("calm".into()), "player").unwrap();
    assert_eq!(r.evaluations, 0);
    assert!(r.derived.is_empty());
}
