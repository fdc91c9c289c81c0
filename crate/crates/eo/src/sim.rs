//! Autoplay and the idle-agent benchmark.

use std::time::{Duration, Instant};

use eo_core::scenarios::WINTER_FEAST;
use eo_core::{Engine, EngineError, Value};

use crate::view::control_value;

#[derive(Debug, Clone, PartialEq)]
pub struct AutoplayStep {
    pub action: String,
    /// Derived events, rendered.
    pub effects: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutoplayEnd {
    Safe,
    NoAction,
    StepLimit,
}

/// Repeatedly triggers the first available action of `individual` in
/// declaration order, until it is safe, stuck, or `max_steps` is spent.
pub fn autoplay(
    engine: &mut Engine,
    individual: &str,
    max_steps: usize,
) -> Result<(Vec<AutoplayStep>, AutoplayEnd), EngineError> {
    let mut steps = Vec::new();
    loop {
        let safe = engine
            .current_value(individual, "isSafe")?
            .as_number()
            .is_some_and(|n| n == 1.0);
        if safe {
            return Ok((steps, AutoplayEnd::Safe));
        }
        if steps.len() >= max_steps {
            return Ok((steps, AutoplayEnd::StepLimit));
        }
        let Some(action) = engine.available(individual)?.into_iter().next() else {
            return Ok((steps, AutoplayEnd::NoAction));
        };
        let value = control_value(engine, individual, &action).unwrap_or(Value::Number(1.0));
        let result = engine.trigger_action(individual, &action, value, "autoplay")?;
        let effects = result
            .derived
            .iter()
            .filter_map(|id| engine.graph().get(*id))
            .map(|e| engine.describe(e))
            .collect();
        steps.push(AutoplayStep { action, effects });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub agents: usize,
    pub touches: usize,
    pub evaluations: usize,
    pub derived_events: usize,
    pub wall_time: Duration,
}

/// Instantiates `agents` survivors next to the bundled one and changes the
/// energy of the first `touched` of them `touches` times each. Only the
/// touches are measured.
pub fn bench(agents: usize, touches: usize, touched: usize) -> Result<BenchReport, EngineError> {
    let mut engine = Engine::new(0);
    engine.load(WINTER_FEAST)?;
    let mut doc = String::new();
    for i in 0..agents {
        doc.push_str(&format!(
            "Survivor: Individual: Agent {i}\n: SetModel: Model Survivor\n: location: Forest Clearing\n\
             : energy: 50\n: warmth: 50\n: hasWood: 0\n: hasRawMeat: 0\n: hasCookedMeat: 0\n"
        ));
    }
    if agents > 0 {
        engine.load(&doc)?;
    }
    let mut evaluations = 0;
    let mut derived_events = 0;
    let start = Instant::now();
    for t in 0..touches {
        let energy = if t % 2 == 0 { 20.0 } else { 50.0 };
        for i in 0..touched.min(agents) {
            let r = engine.set_property(&format!("Agent {i}"), "energy", Value::Number(energy), "bench")?;
            evaluations += r.evaluations;
            derived_events += r.derived.len();
        }
    }
    Ok(BenchReport {
        agents,
        touches,
        evaluations,
        derived_events,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autoplay_from_cold_and_hungry() {
        let mut e = Engine::new(1);
        e.load(WINTER_FEAST).unwrap();
        for (p, v) in [("energy", 20.0), ("warmth", 20.0)] {
            e.set_property("John Doe", p, Value::Number(v), "player").unwrap();
        }
        let (steps, end) = autoplay(&mut e, "John Doe", 20).unwrap();
        let actions: Vec<_> = steps.iter().map(|s| s.action.as_str()).collect();
        assert_eq!(actions, ["action_gather", "action_light_fire", "action_hunt", "action_cook", "action_eat"]);
        assert!(steps[1].effects.iter().any(|e| e == "John Doe.warmth := 70"));
        assert_eq!(end, AutoplayEnd::Safe);
    }

    #[test]
    fn autoplay_respects_the_limit() {
        let mut e = Engine::new(1);
        e.load(WINTER_FEAST).unwrap();
        e.set_property("John Doe", "warmth", Value::Number(10.0), "player").unwrap();
        let (steps, end) = autoplay(&mut e, "John Doe", 1).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(end, AutoplayEnd::StepLimit);
    }

    #[test]
    fn idle_agents_do_not_add_cost() {
        let one = bench(1, 10, 1).unwrap();
        let many = bench(200, 10, 1).unwrap();
        assert!(one.evaluations > 0);
        assert_eq!(one.evaluations, many.evaluations);
        assert_eq!(bench(0, 10, 1).unwrap().evaluations, 0);
    }

    #[test]
    fn touching_everyone_scales_linearly() {
        let costs: Vec<usize> = [10, 20, 40].iter().map(|&n| bench(n, 1, n).unwrap().evaluations).collect();
        assert_eq!(costs[1], 2 * costs[0]);
        assert_eq!(costs[2], 4 * costs[0]);
    }
}
