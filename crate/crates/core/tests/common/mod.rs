#![allow(dead_code)]

use eo_core::scenarios::WINTER_FEAST;
use eo_core::{CascadeResult, Engine, EngineError, Value};
use proptest::prelude::*;

pub const JOHN: &str = "John Doe";
pub const CLEARING: &str = "Forest Clearing";

pub const ACTIONS: [&str; 5] = [
    "action_gather",
    "action_light_fire",
    "action_hunt",
    "action_cook",
    "action_eat",
];

#[derive(Debug, Clone)]
pub enum Op {
    Set(&'static str, &'static str, f64),
    Click(&'static str),
}

pub fn feast(seed: u64) -> Engine {
    let mut e = Engine::new(seed);
    e.load(WINTER_FEAST).unwrap();
    e
}

pub fn apply(e: &mut Engine, op: &Op) -> Result<CascadeResult, EngineError> {
    match op {
        Op::Set(ind, p, v) => e.set_property(ind, p, Value::Number(*v), "player"),
        Op::Click(a) => e.trigger_action(JOHN, a, Value::Number(1.0), "player"),
    }
}

/// The seven manual steps of the priority walkthrough.
pub fn walkthrough() -> Vec<Op> {
    vec![
        Op::Set(JOHN, "energy", 20.0),
        Op::Click("action_hunt"),
        Op::Set(JOHN, "warmth", 20.0),
        Op::Click("action_gather"),
        Op::Click("action_light_fire"),
        Op::Click("action_cook"),
        Op::Click("action_eat"),
    ]
}

pub fn op() -> impl Strategy<Value = Op> {
    let level = prop_oneof![Just(0.0), Just(20.0), Just(29.0), Just(30.0), Just(31.0), Just(50.0), Just(70.0), 0.0..100.0f64];
    let flag = prop_oneof![Just(0.0), Just(1.0)];
    prop_oneof![
        3 => level.clone().prop_map(|v| Op::Set(JOHN, "energy", v)),
        3 => level.prop_map(|v| Op::Set(JOHN, "warmth", v)),
        1 => flag.clone().prop_map(|v| Op::Set(JOHN, "hasWood", v)),
        1 => flag.clone().prop_map(|v| Op::Set(JOHN, "hasRawMeat", v)),
        1 => flag.clone().prop_map(|v| Op::Set(CLEARING, "hasFire", v)),
        1 => flag.prop_map(|v| Op::Set(CLEARING, "hasDeer", v)),
        6 => prop::sample::select(&ACTIONS[..]).prop_map(Op::Click),
    ]
}

pub fn script(max: usize) -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(op(), 0..max)
}

pub fn num(e: &Engine, ind: &str, p: &str) -> Option<f64> {
    e.current_value(ind, p).unwrap().as_number()
}
