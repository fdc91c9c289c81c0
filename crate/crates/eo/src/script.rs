//! Line-oriented scenario scripts.
//!
//! ```text
//! load winter_feast.bsl
//! set John Doe.energy 20
//! click John Doe.action_hunt
//! expect John Doe.hasRawMeat == 1
//! expect-available John Doe [action_cook]
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use eo_core::{CascadeResult, Engine, EngineError, Value};

use crate::view::control_value;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Load(PathBuf),
    Set {
        individual: String,
        property: String,
        value: Value,
    },
    Click {
        individual: String,
        action: String,
    },
    Expect {
        individual: String,
        property: String,
        value: Value,
    },
    ExpectAvailable {
        individual: String,
        actions: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub line: usize,
    pub text: String,
    pub command: Command,
}

#[derive(Debug, thiserror::Error)]
pub enum ScriptError {
    #[error("line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error("line {line}: cannot read {path}: {source}")]
    Load {
        line: usize,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Engine {
        line: usize,
        #[source]
        source: EngineError,
    },
    #[error("line {line}: expectation failed: {detail}")]
    Expectation { line: usize, detail: String },
}

impl ScriptError {
    /// True for failures of the scenario itself rather than of its text.
    pub fn is_expectation(&self) -> bool {
        matches!(self, ScriptError::Expectation { .. } | ScriptError::Engine { .. })
    }
}

/// Numbers become numbers, everything else text.
pub fn parse_value(text: &str) -> Value {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(n) if n.is_finite() => Value::Number(n),
        _ => Value::Text(t.trim_matches('"').to_string()),
    }
}

fn target(rest: &str, line: usize) -> Result<(String, String, String), ScriptError> {
    let syntax = |detail: &str| ScriptError::Syntax {
        line,
        detail: detail.into(),
    };
    let (individual, tail) = rest
        .split_once('.')
        .ok_or_else(|| syntax("expected <Individual>.<property>"))?;
    let tail = tail.trim_start();
    let (property, remainder) = match tail.find(char::is_whitespace) {
        Some(i) => (&tail[..i], tail[i..].trim()),
        None => (tail, ""),
    };
    if individual.trim().is_empty() || property.is_empty() {
        return Err(syntax("expected <Individual>.<property>"));
    }
    Ok((individual.trim().into(), property.into(), remainder.into()))
}

pub fn parse_script(source: &str) -> Result<Vec<Step>, ScriptError> {
    let mut steps = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let syntax = |detail: String| ScriptError::Syntax { line, detail };
        let (keyword, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let command = match keyword {
            "load" if !rest.is_empty() => Command::Load(PathBuf::from(rest)),
            "set" => {
                let (individual, property, value) = target(rest, line)?;
                if value.is_empty() {
                    return Err(syntax("set needs a value".into()));
                }
                Command::Set {
                    individual,
                    property,
                    value: parse_value(&value),
                }
            }
            "click" => {
                let (individual, action, extra) = target(rest, line)?;
                if !extra.is_empty() {
                    return Err(syntax(format!("unexpected `{extra}` after click target")));
                }
                Command::Click { individual, action }
            }
            "expect" => {
                let (individual, property, tail) = target(rest, line)?;
                let value = tail
                    .strip_prefix("==")
                    .ok_or_else(|| syntax("expect needs `== <value>`".into()))?;
                Command::Expect {
                    individual,
                    property,
                    value: parse_value(value),
                }
            }
            "expect-available" => {
                let (individual, list) = rest
                    .split_once('[')
                    .ok_or_else(|| syntax("expect-available needs a [..] list".into()))?;
                let list = list
                    .trim_end()
                    .strip_suffix(']')
                    .ok_or_else(|| syntax("unclosed action list".into()))?;
                let actions = list
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .map(String::from)
                    .collect();
                let individual = individual.trim();
                if individual.is_empty() {
                    return Err(syntax("expect-available needs an individual".into()));
                }
                Command::ExpectAvailable {
                    individual: individual.into(),
                    actions,
                }
            }
            other => return Err(syntax(format!("unknown command `{other}`"))),
        };
        steps.push(Step {
            line,
            text: text.into(),
            command,
        });
    }
    Ok(steps)
}

fn same(expected: &Value, actual: &Value, engine: &Engine) -> bool {
    match (expected, actual) {
        (Value::Number(a), _) => actual.as_number() == Some(*a),
        (Value::Text(name), Value::Ref(id)) => engine.graph().individual_name(*id) == Some(name.as_str()),
        (Value::Text(a), Value::Text(b)) => a == b,
        (a, b) => a == b,
    }
}

/// Runs scripts against an engine and keeps a readable transcript.
pub struct Runner<'e> {
    pub engine: &'e mut Engine,
    base_dir: PathBuf,
    pub transcript: String,
    pub actor: String,
}

impl<'e> Runner<'e> {
    pub fn new(engine: &'e mut Engine, base_dir: impl Into<PathBuf>) -> Self {
        Runner {
            engine,
            base_dir: base_dir.into(),
            transcript: String::new(),
            actor: "player".into(),
        }
    }

    pub fn run_source(&mut self, source: &str) -> Result<(), ScriptError> {
        let steps = parse_script(source)?;
        for step in &steps {
            self.step(step)?;
        }
        Ok(())
    }

    pub fn run_file(&mut self, path: &Path) -> Result<(), ScriptError> {
        let source = std::fs::read_to_string(path).map_err(|source| ScriptError::Load {
            line: 0,
            path: path.into(),
            source,
        })?;
        if let Some(dir) = path.parent() {
            self.base_dir = dir.into();
        }
        self.run_source(&source)
    }

    fn record_cascade(&mut self, result: &CascadeResult, individual: &str) {
        for id in &result.derived {
            let event = self.engine.graph().get(*id).expect("derived events exist");
            let _ = writeln!(self.transcript, "    -> {}", self.engine.describe(event));
        }
        let available = self.engine.available(individual).unwrap_or_default();
        let _ = writeln!(
            self.transcript,
            "    available: [{}] ({} evaluations)",
            available.join(", "),
            result.evaluations
        );
    }

    pub fn step(&mut self, step: &Step) -> Result<(), ScriptError> {
        let line = step.line;
        let engine_err = |source| ScriptError::Engine { line, source };
        let _ = writeln!(self.transcript, "> {}", step.text);
        match &step.command {
            Command::Load(path) => {
                let full = self.base_dir.join(path);
                let source = std::fs::read_to_string(&full).map_err(|source| ScriptError::Load {
                    line,
                    path: full.clone(),
                    source,
                })?;
                let summary = self.engine.load(&source).map_err(engine_err)?;
                let _ = writeln!(
                    self.transcript,
                    "    loaded {} models, {} individuals",
                    summary.registration.models.len(),
                    summary.created.len()
                );
            }
            Command::Set {
                individual,
                property,
                value,
            } => {
                let r = self
                    .engine
                    .set_property(individual, property, value.clone(), &self.actor)
                    .map_err(engine_err)?;
                self.record_cascade(&r, individual);
            }
            Command::Click { individual, action } => {
                let value = control_value(self.engine, individual, action).unwrap_or(Value::Number(1.0));
                let r = self
                    .engine
                    .trigger_action(individual, action, value, &self.actor)
                    .map_err(engine_err)?;
                self.record_cascade(&r, individual);
            }
            Command::Expect {
                individual,
                property,
                value,
            } => {
                let actual = self.engine.current_value(individual, property).map_err(engine_err)?;
                if !same(value, &actual, self.engine) {
                    return Err(ScriptError::Expectation {
                        line,
                        detail: format!("{individual}.{property} is {actual}, expected {value}"),
                    });
                }
                let _ = writeln!(self.transcript, "    ok");
            }
            Command::ExpectAvailable { individual, actions } => {
                let actual = self.engine.available(individual).map_err(engine_err)?;
                let want: BTreeSet<&str> = actions.iter().map(String::as_str).collect();
                let got: BTreeSet<&str> = actual.iter().map(String::as_str).collect();
                if want != got {
                    return Err(ScriptError::Expectation {
                        line,
                        detail: format!(
                            "{individual} offers [{}], expected [{}]",
                            actual.join(", "),
                            actions.join(", ")
                        ),
                    });
                }
                let _ = writeln!(self.transcript, "    ok");
            }
        }
        Ok(())
    }
}
