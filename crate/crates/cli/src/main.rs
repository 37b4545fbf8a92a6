use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdprop::bench::{self, Format, MODELS};
use fdprop::engine::{Combination, DynEvents, EventLevel, FixpointMode, Granularity, Policy, QueueOrder};
use fdprop::{EngineConfig, Error, Limits};

#[derive(Parser)]
#[command(name = "fdprop", version, about = "Propagation engine benchmarks and self-checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve registry models under a grid of engine configurations.
    Bench(BenchArgs),
    /// Run the oracle and invariant checks.
    Check,
    /// Print every propagation step of the root fixpoint of a small model.
    Trace(TraceArgs),
    /// List the registry.
    List,
}

/// Engine settings. Options taking lists span a grid of configurations.
#[derive(Args)]
struct EngineArgs {
    /// Shorthand for fixpoint/events/dyn-events (input, sfix, dfix, events, mevents, devents).
    #[arg(long, value_delimiter = ',')]
    policy: Vec<Policy>,
    /// Fixpoint reasoning: none, static, dynamic.
    #[arg(long, value_delimiter = ',')]
    fixpoint: Vec<FixpointMode>,
    /// Event kinds: none, fix, fix-bc, fix-lbc-ubc, fix-bc-dmc.
    #[arg(long, value_delimiter = ',')]
    events: Vec<EventLevel>,
    /// Event sets: static, monotonic, full.
    #[arg(long = "dyn-events", value_delimiter = ',')]
    dyn_events: Vec<DynEvents>,
    /// Order within a priority level: fifo, lifo.
    #[arg(long, value_delimiter = ',')]
    queue: Vec<QueueOrder>,
    /// Priority levels: one, small, medium, full.
    #[arg(long, value_delimiter = ',')]
    priorities: Vec<Granularity>,
    /// Run the most expensive level first.
    #[arg(long)]
    inverse_priorities: bool,
    /// Drain a level completely before looking at cheaper levels again.
    #[arg(long)]
    complete_fixpoints: bool,
    /// Move a propagator to a cheaper level once few of its variables are unfixed.
    #[arg(long)]
    dynamic_priorities: bool,
    /// Propagators per constraint: single, immediate, multiple, staged.
    #[arg(long, value_delimiter = ',')]
    combine: Vec<Combination>,
    /// Keep running propagators that report subsumption.
    #[arg(long)]
    keep_subsumed: bool,
    /// Check the loop-head invariant at every step.
    #[arg(long)]
    audit: bool,
}

fn or_default<T: Copy>(v: &[T], d: T) -> Vec<T> {
    if v.is_empty() {
        vec![d]
    } else {
        v.to_vec()
    }
}

impl EngineArgs {
    fn grid(&self) -> Vec<EngineConfig> {
        let d = EngineConfig::default();
        let triples: Vec<(FixpointMode, EventLevel, DynEvents)> = if self.policy.is_empty() {
            let mut t = Vec::new();
            for &f in &or_default(&self.fixpoint, d.fixpoint) {
                for &e in &or_default(&self.events, d.events) {
                    for &y in &or_default(&self.dyn_events, d.dyn_events) {
                        t.push((f, e, y));
                    }
                }
            }
            t
        } else {
            self.policy.iter().map(|p| p.settings()).collect()
        };
        let mut out = Vec::new();
        for &(fixpoint, events, dyn_events) in &triples {
            for &queue in &or_default(&self.queue, d.queue) {
                for &granularity in &or_default(&self.priorities, d.granularity) {
                    for &combination in &or_default(&self.combine, d.combination) {
                        out.push(EngineConfig {
                            fixpoint,
                            events,
                            dyn_events,
                            queue,
                            granularity,
                            inverse_priorities: self.inverse_priorities,
                            complete_fixpoints: self.complete_fixpoints,
                            dynamic_priorities: self.dynamic_priorities,
                            combination,
                            keep_subsumed: self.keep_subsumed,
                            audit: self.audit,
                            trace: false,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Model names, or `all`.
    #[arg(long, value_delimiter = ',', required = true)]
    model: Vec<String>,
    /// Size parameter; each model's default when omitted.
    #[arg(long)]
    size: Option<u32>,
    #[command(flatten)]
    engine: EngineArgs,
    /// table or csv.
    #[arg(long, default_value = "table")]
    format: Format,
    /// Report steps and time relative to this cell label.
    #[arg(long)]
    baseline: Option<String>,
    /// Give up on a run after this many search nodes.
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct TraceArgs {
    /// A registry model or one of the hand-written examples.
    #[arg(long)]
    model: String,
    #[arg(long)]
    size: Option<u32>,
    #[command(flatten)]
    engine: EngineArgs,
}

enum Failure {
    Usage(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn bench_cmd(a: &BenchArgs) -> Result<(), Failure> {
    let names: Vec<String> = if a.model.iter().any(|m| m == "all") {
        MODELS.iter().map(|m| m.name.to_string()).collect()
    } else {
        a.model.clone()
    };
    let mut models = Vec::new();
    for name in &names {
        let n = match a.size {
            Some(n) => n,
            None => bench::model_info(name)?.default,
        };
        models.push(bench::build_model(name, n)?);
    }
    let mut cells = Vec::new();
    for c in a.engine.grid() {
        match c.validate() {
            Ok(()) => cells.push(c),
            Err(e) => eprintln!("skipping {}: {e}", c.label()),
        }
    }
    if cells.is_empty() {
        return Err(Failure::Usage("no valid configuration in the grid".into()));
    }
    let limits = Limits { nodes: a.node_limit.or(bench::default_limits().nodes), ..bench::default_limits() };
    let records = bench::sweep(&models, &cells, limits)?;
    let text = match &a.baseline {
        Some(b) => bench::emit_relative(&records, b, a.format)?,
        None => bench::emit(&records, a.format),
    };
    print!("{text}");
    let violations: u64 = records.iter().map(|r| r.audit_violations).sum();
    if violations > 0 {
        eprintln!("audit: {violations} loop-head violations");
        return Err(Failure::Check);
    }
    Ok(())
}

fn check_cmd() -> Result<(), Failure> {
    let mut failed = 0;
    for c in fdprop::check::run_all()? {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        eprintln!("{failed} checks failed");
        return Err(Failure::Check);
    }
    Ok(())
}

fn trace_cmd(a: &TraceArgs) -> Result<(), Failure> {
    let grid = a.engine.grid();
    let [cfg] = grid[..] else {
        return Err(Failure::Usage("trace takes a single configuration".into()));
    };
    let cfg = EngineConfig { trace: true, ..cfg };
    let mut space = if bench::EXAMPLES.contains(&a.model.as_str()) {
        bench::example_space(&a.model, cfg)?
    } else {
        let n = match a.size {
            Some(n) => n,
            None => bench::model_info(&a.model)?.default,
        };
        bench::build_model(&a.model, n)?.space(cfg)?
    };
    println!("config: {}", cfg.label());
    println!("start: {:?}", space.domain());
    let ok = space.propagate();
    for t in space.trace() {
        println!("#{} {} [{:?}] level {} -> {:?}", t.step, t.name, t.stage, t.level, t.status);
        println!("  events: {:?}", t.events);
        println!("  queue: {:?}", t.queue);
        println!("  domain: {:?}", t.domain);
    }
    let s = space.stats();
    println!("{} after {} steps, {} enqueues", if ok { "fixpoint" } else { "failed" }, s.steps, s.enqueues);
    for v in space.violations() {
        println!("audit violation at step {}: {}", v.step, v.name);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Bench(a) => bench_cmd(a),
        Cmd::Check => check_cmd(),
        Cmd::Trace(a) => trace_cmd(a),
        Cmd::List => {
            for m in MODELS {
                println!("{:16} {:>4}  {}..={}  {}", m.name, m.default, m.min, m.max, m.about);
            }
            for e in bench::EXAMPLES {
                println!("{e:16} (trace only)");
            }
            Ok(())
        }
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
