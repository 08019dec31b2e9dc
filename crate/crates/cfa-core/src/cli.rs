//! Command-line front door. Exit codes: 0 success, 1 user error, 2
//! internal error (divergence included), 3 validation failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analyses;
use crate::cfg::{generate_random_cfg, parse_cfg, render_cfg, Cfg, Cyclicity};
use crate::dsl::{parse_program, value_to_json, Program};
use crate::engine::{execute_analysis, EngineError, ExecutionPlan, Strategy};
use crate::harness::{
    build_corpus, emit_report, run_matrix, validate_groundtruth, BenchConfig, Format,
    HarnessError, Metric, StrategyChoice,
};
use crate::props::extract_properties;
use crate::selector::{explain_line, select_program};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Parser)]
#[command(
    name = "cfa",
    about = "Control-flow analyses with per-graph traversal strategy selection",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an analysis on a graph and print per-node outputs and metrics.
    Analyze {
        /// Corpus code (PDOM, DOM, RD, LV, AE, VBE, UDV, COL) or a source file.
        #[arg(long)]
        analysis: String,
        #[arg(long)]
        graph: PathBuf,
        /// Force one strategy for every non-iterative traversal (runs
        /// unoptimized).
        #[arg(long)]
        strategy: Option<String>,
        /// Keep the selected strategies but disable the single-pass
        /// optimization.
        #[arg(long)]
        no_optimize: bool,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Print the selection trace for every traversal of an analysis.
    Explain {
        #[arg(long)]
        analysis: String,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Print the static properties of an analysis.
    Props {
        #[arg(long)]
        analysis: String,
    },
    /// Run the strategy comparison matrix and print the report.
    Bench {
        /// JSON config file; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Total graph count, split by the default class mix.
        #[arg(long)]
        graphs: Option<usize>,
        #[arg(long)]
        size_min: Option<usize>,
        #[arg(long)]
        size_max: Option<usize>,
        /// Comma-separated analysis codes.
        #[arg(long, value_delimiter = ',')]
        analyses: Vec<String>,
        /// Comma-separated strategies (fixed names or HYBRID).
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
        /// visits | time
        #[arg(long)]
        metric: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded random graphs as .cfg files.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// sequential | branch | loop-no-branch | loop-with-branch
        #[arg(long)]
        class: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare selected-plan outputs against the worklist oracle and the
    /// reference solvers; exits 3 on any mismatch.
    Validate {
        /// Directory of .cfg files; a seeded corpus is generated otherwise.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        graphs: Option<usize>,
    },
}

/// Error carrying its intended process exit code.
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn user(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USER,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Diverged { .. } => CliError::internal(format!("divergence: {e}")),
            other => CliError::internal(other.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::UnknownAnalysis(_) | HarnessError::Select(_) => {
                CliError::user(e.to_string())
            }
            HarnessError::Cfg(_) | HarnessError::Dsl(_) => CliError::user(e.to_string()),
            HarnessError::Engine(inner) => inner.into(),
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USER,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Analyze {
            analysis,
            graph,
            strategy,
            no_optimize,
            format,
        } => analyze(&analysis, &graph, strategy.as_deref(), no_optimize, &format),
        Cmd::Explain { analysis, graph } => explain(&analysis, &graph),
        Cmd::Props { analysis } => {
            let (_, program) = load_analysis(&analysis)?;
            print!("{}", extract_properties(&program).lines());
            Ok(EXIT_OK)
        }
        Cmd::Bench {
            config,
            seed,
            graphs,
            size_min,
            size_max,
            analyses,
            strategies,
            metric,
            format,
            out,
        } => bench(
            config, seed, graphs, size_min, size_max, analyses, strategies, metric, &format, out,
        ),
        Cmd::Gen {
            seed,
            count,
            class,
            size,
            out,
        } => gen(seed, count, &class, size, &out),
        Cmd::Validate {
            corpus,
            seed,
            graphs,
        } => validate(corpus, seed, graphs),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))
}

/// Resolves `--analysis` as a corpus code first, then as a source path.
fn load_analysis(spec: &str) -> Result<(String, Program), CliError> {
    if let Some(asset) = analyses::asset(spec) {
        let program = parse_program(asset.source)
            .map_err(|e| CliError::internal(format!("embedded analysis {spec}: {e}")))?;
        return Ok((asset.code.to_string(), program));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::user(format!(
            "`{spec}` is neither a corpus code nor a readable file"
        )));
    }
    let text = read_file(path)?;
    let program = parse_program(&text).map_err(|e| CliError::user(format!("{spec}: {e}")))?;
    Ok((spec.to_string(), program))
}

fn load_graph(path: &Path) -> Result<Cfg, CliError> {
    let text = read_file(path)?;
    parse_cfg(&text).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

struct PlanRow {
    traversal: String,
    plan: ExecutionPlan,
    path: Option<crate::selector::DecisionPath>,
}

fn plan_analysis(
    program: &Program,
    g: &Cfg,
    strategy_override: Option<&str>,
    no_optimize: bool,
) -> Result<Vec<PlanRow>, CliError> {
    if let Some(name) = strategy_override {
        let strategy: Strategy = name
            .parse()
            .map_err(|e: String| CliError::user(e))?;
        return Ok(program
            .invocations
            .iter()
            .map(|inv| PlanRow {
                traversal: inv.traversal.clone(),
                plan: ExecutionPlan {
                    strategy,
                    single_pass: false,
                    direction: inv.direction,
                },
                path: None,
            })
            .collect());
    }
    let report = extract_properties(program);
    let outcomes =
        select_program(&report, g.cyclicity).map_err(|e| CliError::user(e.to_string()))?;
    Ok(program
        .invocations
        .iter()
        .zip(outcomes)
        .map(|(inv, o)| PlanRow {
            traversal: inv.traversal.clone(),
            plan: ExecutionPlan {
                single_pass: o.plan.single_pass && !no_optimize,
                ..o.plan
            },
            path: Some(o.path),
        })
        .collect())
}

fn analyze(
    analysis: &str,
    graph: &Path,
    strategy: Option<&str>,
    no_optimize: bool,
    format: &str,
) -> Result<i32, CliError> {
    let (code, program) = load_analysis(analysis)?;
    let g = load_graph(graph)?;
    let rows = plan_analysis(&program, &g, strategy, no_optimize)?;
    let plans: Vec<ExecutionPlan> = rows.iter().map(|r| r.plan).collect();
    let run = execute_analysis(&program, &g, &plans, None)?;

    match format {
        "json" => {
            let mut outputs = serde_json::Map::new();
            for (traversal, map) in &run.outputs {
                let mut nodes = serde_json::Map::new();
                for (node, value) in map {
                    nodes.insert(node.to_string(), value_to_json(value));
                }
                outputs.insert(traversal.clone(), serde_json::Value::Object(nodes));
            }
            let plans_json: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "traversal": r.traversal,
                        "strategy": r.plan.strategy.to_string(),
                        "single_pass": r.plan.single_pass,
                        "direction": r.plan.direction.to_string(),
                        "path": r.path.map(|p| p.to_string()),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "analysis": code,
                "graph": g.name,
                "cyclicity": g.cyclicity.to_string(),
                "plans": plans_json,
                "outputs": outputs,
                "metrics": {
                    "visits": run.total.node_visits,
                    "passes": run.total.passes,
                    "checks": run.total.fixpoint_checks,
                    "pushes": run.total.worklist_pushes,
                    "time_us": run.total.wall.as_micros() as u64,
                },
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        "csv" => {
            println!("traversal,node,value");
            for (traversal, map) in &run.outputs {
                for (node, value) in map {
                    println!("{traversal},{node},\"{value}\"");
                }
            }
        }
        "text" => {
            println!("analysis={code} graph={} cyclicity={}", g.name, g.cyclicity);
            for r in &rows {
                let path = r
                    .path
                    .map(|p| p.to_string())
                    .unwrap_or_else(|| "-".to_string());
                println!(
                    "plan traversal={} path={} strategy={} single_pass={}",
                    r.traversal, path, r.plan.strategy, r.plan.single_pass as u8
                );
            }
            for (traversal, map) in &run.outputs {
                for (node, value) in map {
                    println!("output {traversal} node={node} value={value}");
                }
            }
            println!(
                "metrics visits={} passes={} checks={} pushes={} time_us={}",
                run.total.node_visits,
                run.total.passes,
                run.total.fixpoint_checks,
                run.total.worklist_pushes,
                run.total.wall.as_micros()
            );
        }
        other => return Err(CliError::user(format!("unknown format `{other}`"))),
    }
    Ok(EXIT_OK)
}

fn explain(analysis: &str, graph: &Path) -> Result<i32, CliError> {
    let (_, program) = load_analysis(analysis)?;
    let g = load_graph(graph)?;
    let report = extract_properties(&program);
    let outcomes =
        select_program(&report, g.cyclicity).map_err(|e| CliError::user(e.to_string()))?;
    for (entry, outcome) in report.entries.iter().zip(&outcomes) {
        println!(
            "{}",
            explain_line(&entry.traversal, &entry.props, g.cyclicity, outcome)
        );
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    config: Option<PathBuf>,
    seed: Option<u64>,
    graphs: Option<usize>,
    size_min: Option<usize>,
    size_max: Option<usize>,
    analyses_arg: Vec<String>,
    strategies: Vec<String>,
    metric: Option<String>,
    format: &str,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let mut cfg = match config {
        Some(path) => serde_json::from_str::<BenchConfig>(&read_file(&path)?)
            .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?,
        None => BenchConfig::with_total(graphs.unwrap_or(400)),
    };
    if let Some(total) = graphs {
        cfg.graphs_per_class = BenchConfig::with_total(total).graphs_per_class;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(lo) = size_min {
        cfg.size_range.0 = lo;
    }
    if let Some(hi) = size_max {
        cfg.size_range.1 = hi;
    }
    if !analyses_arg.is_empty() {
        cfg.analyses = analyses_arg;
    }
    if !strategies.is_empty() {
        cfg.strategies = strategies
            .iter()
            .map(|s| s.parse::<StrategyChoice>().map_err(CliError::user))
            .collect::<Result<_, _>>()?;
    }
    if let Some(m) = metric {
        cfg.metric = match m.as_str() {
            "visits" => Metric::Visits,
            "time" => Metric::Time,
            other => return Err(CliError::user(format!("unknown metric `{other}`"))),
        };
    }
    let format: Format = format.parse().map_err(CliError::user)?;
    let report = run_matrix(&cfg)?;
    let rendered = emit_report(&report, format);
    if let Some(path) = out {
        std::fs::write(&path, &rendered)
            .map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{rendered}");
    Ok(EXIT_OK)
}

fn gen(seed: u64, count: usize, class: &str, size: usize, out: &Path) -> Result<i32, CliError> {
    let class: Cyclicity = class.parse().map_err(|e: String| CliError::user(e))?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::user(format!("cannot create {}: {e}", out.display())))?;
    for i in 0..count {
        let g = generate_random_cfg(seed.wrapping_add(i as u64), size, class)
            .map_err(|e| CliError::user(e.to_string()))?;
        let path = out.join(format!("{}.cfg", g.name));
        std::fs::write(&path, render_cfg(&g))
            .map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(EXIT_OK)
}

fn validate(
    corpus: Option<PathBuf>,
    seed: Option<u64>,
    graphs: Option<usize>,
) -> Result<i32, CliError> {
    let graphs_list: Vec<Cfg> = match corpus {
        Some(dir) => {
            let mut out = Vec::new();
            let entries = std::fs::read_dir(&dir)
                .map_err(|e| CliError::user(format!("cannot read {}: {e}", dir.display())))?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(CliError::user(format!(
                    "no .cfg files in {}",
                    dir.display()
                )));
            }
            for p in paths {
                out.push(load_graph(&p)?);
            }
            out
        }
        None => {
            let mut cfg = BenchConfig::with_total(graphs.unwrap_or(400));
            cfg.seed = seed.unwrap_or(42);
            build_corpus(&cfg)?
        }
    };
    let codes: Vec<String> = analyses::load_corpus()
        .iter()
        .map(|a| a.code.to_string())
        .collect();
    let report = validate_groundtruth(&codes, &graphs_list)?;
    println!(
        "validated pairs={} mismatches={}",
        report.pairs,
        report.mismatches.len()
    );
    for m in report.mismatches.iter().take(50) {
        println!(
            "mismatch analysis={} graph={} traversal={} node={} got={} want={}",
            m.analysis, m.graph, m.traversal, m.node, m.got, m.want
        );
    }
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VALIDATION)
    }
}
