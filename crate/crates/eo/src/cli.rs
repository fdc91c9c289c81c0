use std::collections::BTreeSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use eo::core::scenarios::WINTER_FEAST;
use eo::core::{Engine, EngineError, EventId, Graph};
use eo::format::{read_jsonl, write_jsonl};
use eo::script::{parse_value, Runner, ScriptError};
use eo::sim::{autoplay, bench, AutoplayEnd};

#[derive(Debug, Parser)]
#[command(name = "eo", version, about = "Executable ontology runtime")]
pub struct Cli {
    /// Seed for event ids. Random when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Register BSL files and print what they added.
    Load { files: Vec<PathBuf> },
    /// Run a scenario script and print its transcript.
    Run {
        script: PathBuf,
        /// Write the resulting graph as JSON lines.
        #[arg(long)]
        graph_export: Option<PathBuf>,
    },
    /// Trigger the first available action until the individual is safe.
    Autoplay {
        individual: String,
        #[arg(long, default_value_t = 50)]
        max_steps: usize,
        #[command(flatten)]
        world: World,
    },
    /// Print the causes of an individual's current value.
    Trace {
        /// `<Individual>.<property>`
        target: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[command(flatten)]
        world: World,
    },
    /// Run the static analyzer over BSL files.
    Analyze {
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Measure evaluation cost with idle agents present.
    Bench {
        #[arg(long, default_value_t = 1000)]
        agents: usize,
        #[arg(long, default_value_t = 100)]
        touches: usize,
        /// Touch every agent instead of only the first.
        #[arg(long)]
        touch_all: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        files: Vec<PathBuf>,
    },
}

/// Where the starting state comes from. Defaults to the bundled survival
/// scenario.
#[derive(Debug, clap::Args)]
struct World {
    /// BSL files to load.
    #[arg(long = "model")]
    models: Vec<PathBuf>,
    /// Exported graph to resume from.
    #[arg(long, conflicts_with = "models")]
    graph: Option<PathBuf>,
    /// Scenario script to run first.
    #[arg(long)]
    script: Option<PathBuf>,
    /// `<Individual>.<property>=<value>` edits applied before starting.
    #[arg(long = "set")]
    sets: Vec<String>,
}

pub enum Failure {
    /// The scenario or ontology is wrong: failed expectation, analysis error.
    Check(anyhow::Error),
    /// Bad invocation or unreadable input.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn wall_clock() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn engine(seed: Option<u64>) -> Engine {
    Engine::with_clock(seed.unwrap_or_else(rand::random), wall_clock)
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_file(engine: &mut Engine, path: &Path) -> Result<(), Failure> {
    let source = read(path)?;
    match engine.load(&source) {
        Ok(summary) => {
            let r = &summary.registration;
            println!(
                "{}: {} concepts, {} properties, {} models, {} individuals",
                path.display(),
                r.concepts.len(),
                r.properties.len(),
                r.models.len(),
                r.individuals.len()
            );
            for w in &r.warnings {
                println!("  warning {w}");
            }
            Ok(())
        }
        Err(EngineError::Analysis(report)) => {
            Err(Failure::Check(anyhow!("{}: registration failed\n{report}", path.display())))
        }
        Err(e) => Err(Failure::Usage(anyhow!("{}: {e}", path.display()))),
    }
}

fn script_failure(e: ScriptError) -> Failure {
    if e.is_expectation() {
        Failure::Check(e.into())
    } else {
        Failure::Usage(e.into())
    }
}

impl World {
    fn build(&self, seed: Option<u64>) -> Result<Engine, Failure> {
        let mut e = if let Some(path) = &self.graph {
            let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let events = read_jsonl(BufReader::new(file)).with_context(|| path.display().to_string())?;
            let (graph, _) = Graph::import(&events, seed.unwrap_or_else(rand::random))
                .with_context(|| path.display().to_string())?;
            let mut e = Engine::from_graph(graph).with_context(|| path.display().to_string())?;
            e.set_clock(wall_clock);
            e
        } else {
            let mut e = engine(seed);
            if self.models.is_empty() && self.script.is_none() {
                e.load(WINTER_FEAST).expect("bundled scenario loads");
            }
            for m in &self.models {
                load_file(&mut e, m)?;
            }
            e
        };
        if let Some(script) = &self.script {
            let mut runner = Runner::new(&mut e, ".");
            runner.run_file(script).map_err(script_failure)?;
        }
        for s in &self.sets {
            let (target, value) = s
                .split_once('=')
                .ok_or_else(|| anyhow!("--set expects <Individual>.<property>=<value>, got `{s}`"))?;
            let (ind, prop) = target
                .rsplit_once('.')
                .ok_or_else(|| anyhow!("--set expects <Individual>.<property>=<value>, got `{s}`"))?;
            e.set_property(ind.trim(), prop.trim(), parse_value(value), "player")
                .map_err(|err| anyhow!("--set {s}: {err}"))?;
        }
        Ok(e)
    }
}

fn render_trace(engine: &Engine, root: EventId, depth: usize) -> anyhow::Result<String> {
    let trace = engine.graph().causal_trace(root, depth)?;
    let mut out = String::new();
    let mut expanded = BTreeSet::new();
    fn walk(
        engine: &Engine,
        trace: &eo::core::CausalTrace,
        id: EventId,
        indent: usize,
        expanded: &mut BTreeSet<EventId>,
        out: &mut String,
    ) {
        let e = engine.graph().get(id).expect("traced events exist");
        let arrow = if indent == 0 { "" } else { "<- " };
        let fresh = expanded.insert(id);
        out.push_str(&format!(
            "{}{arrow}{}  [{} by {}]{}\n",
            "  ".repeat(indent),
            engine.describe(e),
            id.short(),
            e.actor,
            if fresh { "" } else { " (see above)" }
        ));
        if fresh {
            for cause in trace.causes_of(id).collect::<Vec<_>>() {
                walk(engine, trace, cause, indent + 1, expanded, out);
            }
        }
    }
    walk(engine, &trace, root, 0, &mut expanded, &mut out);
    Ok(out)
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Load { files } => {
            let mut e = engine(cli.seed);
            for f in &files {
                load_file(&mut e, f)?;
            }
            println!("{} events", e.graph().len());
        }
        Command::Run { script, graph_export } => {
            let mut e = engine(cli.seed);
            let mut runner = Runner::new(&mut e, ".");
            let outcome = runner.run_file(&script);
            print!("{}", runner.transcript);
            outcome.map_err(script_failure)?;
            if let Some(path) = graph_export {
                let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                write_jsonl(e.graph().events(), std::io::BufWriter::new(file)).context("writing graph")?;
            }
        }
        Command::Autoplay {
            individual,
            max_steps,
            world,
        } => {
            let mut e = world.build(cli.seed)?;
            let (steps, end) = autoplay(&mut e, &individual, max_steps).map_err(|err| anyhow!("{err}"))?;
            for (i, s) in steps.iter().enumerate() {
                println!("{}. {}", i + 1, s.action);
                for effect in &s.effects {
                    println!("     {effect}");
                }
            }
            match end {
                AutoplayEnd::Safe => println!("{individual} is safe"),
                AutoplayEnd::NoAction => println!("no action available"),
                AutoplayEnd::StepLimit => println!("stopped after {max_steps} steps"),
            }
        }
        Command::Trace { target, depth, world } => {
            let (ind, prop) = target
                .rsplit_once('.')
                .ok_or_else(|| anyhow!("expected <Individual>.<property>, got `{target}`"))?;
            let e = world.build(cli.seed)?;
            let id = e
                .graph()
                .individual(ind)
                .ok_or_else(|| anyhow!("unknown individual `{ind}`"))?;
            let head = e
                .graph()
                .head(id, prop)
                .ok_or_else(|| anyhow!("{ind}.{prop} has no value"))?
                .id;
            print!("{}", render_trace(&e, head, depth)?);
        }
        Command::Analyze { files, json } => {
            let mut e = engine(cli.seed);
            let mut failed = false;
            for f in &files {
                let source = read(f)?;
                let report = match e.load(&source) {
                    Ok(summary) => eo::core::AnalysisReport {
                        errors: vec![],
                        warnings: summary.registration.warnings,
                    },
                    Err(EngineError::Analysis(report)) => report,
                    Err(err) => return Err(Failure::Usage(anyhow!("{}: {err}", f.display()))),
                };
                failed |= !report.is_ok();
                if json {
                    println!("{}", eo::documents::report(&report));
                } else {
                    println!("{}: {} errors, {} warnings", f.display(), report.errors.len(), report.warnings.len());
                    print!("{report}");
                }
            }
            if failed {
                return Err(Failure::Check(anyhow!("analysis found errors")));
            }
        }
        Command::Bench {
            agents,
            touches,
            touch_all,
        } => {
            let touched = if touch_all { agents } else { 1 };
            let r = bench(agents, touches, touched).map_err(|e| anyhow!("{e}"))?;
            println!(
                "agents={} touches={} evaluations={} derived_events={} wall_time_ms={:.3}",
                r.agents,
                r.touches,
                r.evaluations,
                r.derived_events,
                r.wall_time.as_secs_f64() * 1000.0
            );
        }
        Command::Serve { addr, files } => {
            let mut e = engine(cli.seed);
            if files.is_empty() {
                e.load(WINTER_FEAST).expect("bundled scenario loads");
            }
            for f in &files {
                load_file(&mut e, f)?;
            }
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            println!("listening on {addr}");
            rt.block_on(eo::service::serve(&addr, e))
                .with_context(|| format!("serving on {addr}"))?;
        }
    }
    Ok(())
}
