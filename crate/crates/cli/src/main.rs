//! rulemon: check recorded drives against formalized traffic rules.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rulemon_core::engine::{builtin_rules, instantiate, run, PreparedRule};
use rulemon_core::ltl::{parse, parse_rule_file, Rule};
use rulemon_core::monitor::{
    evaluate_naive, minimize, Alphabet, MonitorAutomaton, MonitorRun, VerdictValue,
};
use rulemon_core::predicates;
use rulemon_core::world::{load_trajectories, MapModel, Trace};

use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "rulemon",
    version,
    about = "Monitor formalized dual-carriageway traffic rules over trajectory recordings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trajectory file against the rule library and report
    /// violations.
    Check(CheckArgs),
    /// Compile a formula (or a built-in rule) to its monitor automaton.
    Compile(CompileArgs),
    /// Evaluate a formula over a CSV of proposition assignments.
    Eval(EvalArgs),
    /// Dump the per-scene proposition labels the rules consume.
    Labels(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Map JSON file.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Trajectory CSV file.
    #[arg(long = "traj")]
    trajectories: Option<PathBuf>,
    /// Trajectory layout: native | interaction.
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated rule names, or `all`.
    #[arg(long, value_delimiter = ',')]
    rules: Option<Vec<String>>,
    /// Additional rule-library file (stanzas of premise/conclusion rules).
    #[arg(long)]
    rule_file: Option<PathBuf>,
    /// Parameter override, e.g. --param delta_rem=55 (repeatable).
    #[arg(long = "param", value_parser = config::parse_param)]
    params: Vec<(String, f64)>,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (also RULEMON_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    /// Suppress the timestamp header so report files are byte-reproducible.
    #[arg(long)]
    deterministic: bool,
    /// Exit with status 2 when any violation is found.
    #[arg(long)]
    fail_on_violation: bool,
    /// Denominator of the once-per-agent metric: all | instantiated.
    #[arg(long)]
    denominator: Option<String>,
    /// JSON config file; flags take precedence over its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Formula in concrete syntax (quote it).
    formula: Option<String>,
    /// Compile a built-in rule instead of a formula.
    #[arg(long, conflicts_with = "formula")]
    rule: Option<String>,
    /// Dump format: text | dot.
    #[arg(long, default_value = "text")]
    dump: String,
    /// Write the dump to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Minimize the automaton before dumping.
    #[arg(long)]
    minimize: bool,
    /// Abort if the construction exceeds this many states.
    #[arg(long, default_value_t = rulemon_core::monitor::DEFAULT_STATE_CAP)]
    state_cap: usize,
}

#[derive(Args)]
struct EvalArgs {
    /// Formula in concrete syntax (quote it).
    formula: String,
    /// CSV whose columns name the formula's atoms (values 0/1).
    #[arg(long = "trace")]
    trace: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Labels(args) => cmd_labels(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn resolve_config(args: CheckArgs) -> Result<RunConfig> {
    config::resolve(
        args.config.as_ref(),
        Overrides {
            map: args.map,
            trajectories: args.trajectories,
            format: args.format,
            rules: args.rules,
            rule_file: args.rule_file,
            params: args.params,
            out: args.out,
            workers: args.workers,
            deterministic: args.deterministic,
            fail_on_violation: args.fail_on_violation,
            denominator: args.denominator,
        },
    )
}

/// The rule library for a run: built-ins plus any rule file, filtered by
/// the selection. Unknown names are rejected before any computation.
fn select_rules(config: &RunConfig) -> Result<Vec<Rule>> {
    let mut library = builtin_rules();
    if let Some(path) = &config.rule_file {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading rule file {}", path.display()))?;
        let extra = parse_rule_file(&text)
            .with_context(|| format!("parsing rule file {}", path.display()))?;
        for rule in extra {
            library.retain(|r| r.name != rule.name);
            library.push(rule);
        }
    }
    if config.rules.iter().any(|r| r == "all") {
        return Ok(library);
    }
    let mut selected = Vec::new();
    for name in &config.rules {
        match library.iter().find(|r| &r.name == name) {
            Some(rule) => selected.push(rule.clone()),
            None => bail!(
                "unknown rule `{name}` (available: {})",
                library
                    .iter()
                    .map(|r| r.name.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
    Ok(selected)
}

fn load_world(config: &RunConfig) -> Result<Trace> {
    let map = Arc::new(
        MapModel::load(&config.map)
            .with_context(|| format!("loading map {}", config.map.display()))?,
    );
    let trace = load_trajectories(&config.trajectories, map, config.format)
        .with_context(|| format!("loading trajectories {}", config.trajectories.display()))?;
    if !trace.dropped.is_empty() {
        eprintln!(
            "warning: {} agent-scenes projected onto no lane and were dropped",
            trace.dropped.len()
        );
    }
    Ok(trace)
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode> {
    let config = resolve_config(args)?;
    let rules = select_rules(&config)?;
    let trace = load_world(&config)?;

    let prepared = rules
        .into_iter()
        .map(|rule| PreparedRule::new(rule, &config.params))
        .collect::<Result<Vec<_>, _>>()?;
    let report = with_pool(config.workers, || {
        let instances = instantiate(&trace, &prepared);
        run(&trace, &prepared, &instances)
    })?;

    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    let json = report.to_json(config.denominator, config.deterministic);
    let mut rendered = serde_json::to_string_pretty(&json)?;
    rendered.push('\n');
    std::fs::write(config.out.join("report.json"), rendered)?;
    std::fs::write(config.out.join("report.csv"), report.to_csv())?;
    std::fs::write(
        config.out.join("metrics.csv"),
        report.metrics_csv(config.denominator),
    )?;

    let once = report.metric_once_per_agent(config.denominator);
    let per_time = report.metric_per_time();
    println!(
        "checked {} scenes, {} agents",
        report.trace_len, report.agent_count
    );
    for rule in &report.rules {
        let pt = &per_time[&rule.rule];
        let premise = pt
            .by_premise_active
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "  {:<20} flagged {:>3}  once/agent {:.4}  per-time {:.4}  premise-active {}",
            rule.rule,
            rule.flagged_agents().len(),
            once[&rule.rule],
            pt.by_total,
            premise
        );
    }
    println!("reports written to {}", config.out.display());

    if config.fail_on_violation && report.total_violations() > 0 {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compile(args: CompileArgs) -> Result<ExitCode> {
    let (name, formula) = match (&args.formula, &args.rule) {
        (Some(text), None) => ("formula".to_string(), parse(text)?),
        (None, Some(rule_name)) => {
            let rule = rulemon_core::engine::builtin_rule(rule_name)
                .with_context(|| format!("unknown rule `{rule_name}`"))?;
            (rule.name.clone(), rule.as_formula())
        }
        _ => bail!("provide a formula or --rule <name>"),
    };
    let mut automaton = MonitorAutomaton::compile_capped(&formula, args.state_cap)?;
    if args.minimize {
        automaton = minimize(&automaton);
    }
    let dump = match args.dump.as_str() {
        "text" => automaton.dump_text(),
        "dot" => automaton.dump_dot(&name),
        other => bail!("unknown dump format `{other}` (text | dot)"),
    };
    match &args.out {
        Some(path) => std::fs::write(path, dump)?,
        None => print!("{dump}"),
    }
    println!("{} states", automaton.state_count());
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode> {
    let formula = parse(&args.formula)?;
    let alphabet = Alphabet::of_formula(&formula)?;

    let mut reader = csv::Reader::from_path(&args.trace)
        .with_context(|| format!("reading {}", args.trace.display()))?;
    let headers = reader.headers()?.clone();
    let mut columns = Vec::with_capacity(alphabet.len());
    for atom in alphabet.names() {
        let idx = headers
            .iter()
            .position(|h| h.trim() == atom)
            .with_context(|| format!("trace file has no column for atom `{atom}`"))?;
        columns.push(idx);
    }
    let mut trace = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let mut letter = rulemon_core::monitor::Letter(0);
        for (bit, &column) in columns.iter().enumerate() {
            let raw = record.get(column).unwrap_or("").trim();
            let value = match raw {
                "1" | "true" => true,
                "0" | "false" | "" => false,
                other => bail!(
                    "row {}: expected 0/1/true/false in column `{}`, got `{other}`",
                    row_idx + 2,
                    alphabet.names()[bit]
                ),
            };
            letter = letter.with(bit, value);
        }
        trace.push(letter);
    }
    if trace.is_empty() {
        bail!("trace file {} has no rows", args.trace.display());
    }

    let satisfied = evaluate_naive(&formula, &alphabet, &trace, 0)?;
    // the monitor pinpoints the earliest position where the verdict became
    // inevitable
    let automaton = MonitorAutomaton::compile(&formula)?;
    let mut monitor = MonitorRun::new(&automaton);
    for &letter in &trace {
        monitor.step(letter).unwrap();
    }
    let verdict = monitor.finalize();
    debug_assert_eq!(verdict.value == VerdictValue::Satisfied, satisfied);
    if satisfied {
        println!("satisfied");
    } else {
        println!(
            "violated at position {}",
            verdict.position.unwrap_or(trace.len() - 1)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_labels(args: CheckArgs) -> Result<ExitCode> {
    let config = resolve_config(args)?;
    let rules = select_rules(&config)?;
    let trace = load_world(&config)?;

    let prepared = rules
        .into_iter()
        .map(|rule| PreparedRule::new(rule, &config.params))
        .collect::<Result<Vec<_>, _>>()?;
    let instances = instantiate(&trace, &prepared);
    let cache = predicates::TraceCache::new(&trace);

    let mut out = String::from("frame,tuple,proposition,value\n");
    for instance in &instances {
        let prep = &prepared[instance.rule_idx];
        let tuple_text = instance
            .tuple
            .iter()
            .map(|a| a.0.to_string())
            .collect::<Vec<_>>()
            .join("-");
        let label_traces = predicates::build_label_traces(
            prep.alphabet.names(),
            &instance.tuple,
            instance.start,
            instance.end,
            &trace,
            &cache,
            &prep.params,
        )?;
        for label_trace in label_traces {
            for (offset, value) in label_trace.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{tuple_text},{},{}\n",
                    label_trace.start + offset,
                    label_trace.proposition,
                    i32::from(*value)
                ));
            }
        }
    }

    std::fs::create_dir_all(&config.out)?;
    let path = config.out.join("labels.csv");
    std::fs::write(&path, out)?;
    println!("labels written to {}", path.display());
    Ok(ExitCode::SUCCESS)
}
