//! Benchmark and validation harness: seeded corpora, the strategy
//! comparison matrix, ground-truth validation and selection-precision
//! measurement.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyses::{self, reference_solution, AnalysisAsset};
use crate::cfg::{generate_random_cfg, min_size, Cfg, CfgError, Cyclicity};
use crate::dsl::{parse_program, DslError, Program, Value};
use crate::engine::{
    execute_analysis, fixed_plans, oracle_plans, EngineError, ExecutionPlan, Strategy,
};
use crate::props::{extract_properties, PropsReport};
use crate::selector::{select_program, SelectError};

mod report;

pub use report::{
    emit_report, BenchReport, CellAgg, Format, Misprediction, PrecisionRow, ReductionRow,
};

/// A column of the comparison matrix: one of the fixed baselines, or the
/// selector-driven configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyChoice {
    Fixed(Strategy),
    Hybrid,
}

impl std::fmt::Display for StrategyChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategyChoice::Fixed(s) => write!(f, "{s}"),
            StrategyChoice::Hybrid => f.write_str("HYBRID"),
        }
    }
}

impl std::str::FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("hybrid") {
            Ok(StrategyChoice::Hybrid)
        } else {
            s.parse::<Strategy>().map(StrategyChoice::Fixed)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Visits,
    Time,
}

/// Matrix configuration. Graph counts are per cyclicity class; the default
/// mix mirrors the distribution reported for real method CFGs (roughly 65%
/// sequential, 25% branch-only, 10% loops with ~7:3 branch/no-branch).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub graphs_per_class: BTreeMap<Cyclicity, usize>,
    pub size_range: (usize, usize),
    pub analyses: Vec<String>,
    pub strategies: Vec<StrategyChoice>,
    pub metric: Metric,
}

impl BenchConfig {
    pub fn with_total(total: usize) -> Self {
        let mut graphs_per_class = BTreeMap::new();
        graphs_per_class.insert(Cyclicity::Sequential, total * 65 / 100);
        graphs_per_class.insert(Cyclicity::BranchOnly, total * 25 / 100);
        graphs_per_class.insert(Cyclicity::LoopWithBranch, total * 7 / 100);
        let assigned: usize = graphs_per_class.values().sum();
        graphs_per_class.insert(Cyclicity::LoopNoBranch, total.saturating_sub(assigned));
        BenchConfig {
            seed: 42,
            graphs_per_class,
            size_range: (6, 40),
            analyses: analyses::load_corpus().iter().map(|a| a.code.to_string()).collect(),
            strategies: default_strategies(),
            metric: Metric::Visits,
        }
    }
}

pub fn default_strategies() -> Vec<StrategyChoice> {
    let mut out: Vec<StrategyChoice> = Strategy::FIXED
        .iter()
        .map(|&s| StrategyChoice::Fixed(s))
        .collect();
    out.push(StrategyChoice::Hybrid);
    out
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown analysis code `{0}`")]
    UnknownAnalysis(String),
    #[error(transparent)]
    Cfg(#[from] CfgError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Deterministic corpus for a config: per-class seeds derive from the base
/// seed, sizes cycle through the configured range.
pub fn build_corpus(cfg: &BenchConfig) -> Result<Vec<Cfg>, HarnessError> {
    let (lo, hi) = cfg.size_range;
    let mut graphs = Vec::new();
    for (&class, &count) in &cfg.graphs_per_class {
        let floor = min_size(class).max(lo);
        let span = hi.saturating_sub(floor) + 1;
        for i in 0..count {
            let size = floor + (i * 7 + class as usize * 3) % span;
            let seed = cfg
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add(class as u64 * 101)
                .wrapping_add(i as u64);
            graphs.push(generate_random_cfg(seed, size, class)?);
        }
    }
    Ok(graphs)
}

struct LoadedAnalysis {
    asset: AnalysisAsset,
    program: Program,
    props: PropsReport,
}

fn load_analyses(codes: &[String]) -> Result<Vec<LoadedAnalysis>, HarnessError> {
    codes
        .iter()
        .map(|code| {
            let asset = analyses::asset(code)
                .ok_or_else(|| HarnessError::UnknownAnalysis(code.clone()))?;
            let program = parse_program(asset.source)?;
            let props = extract_properties(&program);
            Ok(LoadedAnalysis {
                asset,
                program,
                props,
            })
        })
        .collect()
}

fn plans_for(
    la: &LoadedAnalysis,
    g: &Cfg,
    choice: StrategyChoice,
) -> Result<Vec<ExecutionPlan>, HarnessError> {
    match choice {
        StrategyChoice::Fixed(s) => Ok(fixed_plans(&la.program, s)),
        StrategyChoice::Hybrid => Ok(select_program(&la.props, g.cyclicity)?
            .into_iter()
            .map(|o| o.plan)
            .collect()),
    }
}

/// Runs every (analysis, graph, strategy) cell. Fixed strategies run with
/// full fixpoint confirmation; HYBRID runs the selected, optimized plans.
pub fn run_matrix(cfg: &BenchConfig) -> Result<BenchReport, HarnessError> {
    let corpus = build_corpus(cfg)?;
    let loaded = load_analyses(&cfg.analyses)?;
    let started = Instant::now();

    let mut cells: BTreeMap<(String, StrategyChoice), CellAgg> = BTreeMap::new();
    // Per (analysis, graph, strategy): Some(visits/time) or None (diverged).
    let mut samples: BTreeMap<(String, StrategyChoice), Vec<Option<(u64, u64)>>> = BTreeMap::new();

    for la in &loaded {
        for &choice in &cfg.strategies {
            let key = (la.asset.code.to_string(), choice);
            let cell = cells.entry(key.clone()).or_insert_with(|| CellAgg {
                analysis: la.asset.code.to_string(),
                strategy: choice.to_string(),
                graphs: 0,
                total_visits: 0,
                total_passes: 0,
                total_checks: 0,
                total_time_us: 0,
                infeasible_count: 0,
            });
            let sample = samples.entry(key).or_default();
            for g in &corpus {
                cell.graphs += 1;
                let plans = plans_for(la, g, choice)?;
                match execute_analysis(&la.program, g, &plans, None) {
                    Ok(run) => {
                        let time_us = run.total.wall.as_micros() as u64;
                        cell.total_visits += run.total.node_visits;
                        cell.total_passes += run.total.passes;
                        cell.total_checks += run.total.fixpoint_checks;
                        cell.total_time_us += time_us;
                        sample.push(Some((run.total.node_visits, time_us)));
                    }
                    Err(EngineError::Diverged { .. }) => {
                        cell.infeasible_count += 1;
                        sample.push(None);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }

    // Reductions of HYBRID against each fixed strategy, on both metrics.
    let mut reductions = Vec::new();
    for la in &loaded {
        let code = la.asset.code.to_string();
        let hybrid = cells.get(&(code.clone(), StrategyChoice::Hybrid));
        let mut row = ReductionRow {
            analysis: code.clone(),
            vs: Vec::new(),
        };
        for &choice in &cfg.strategies {
            let baseline = match choice {
                StrategyChoice::Fixed(_) => cells.get(&(code.clone(), choice)),
                StrategyChoice::Hybrid => continue,
            };
            let (Some(h), Some(b)) = (hybrid, baseline) else {
                continue;
            };
            let usable = b.infeasible_count == 0 && h.infeasible_count == 0;
            let visits = (usable && b.total_visits > 0).then(|| {
                (b.total_visits as f64 - h.total_visits as f64) / b.total_visits as f64
            });
            let time = (usable && b.total_time_us > 0).then(|| {
                (b.total_time_us as f64 - h.total_time_us as f64) / b.total_time_us as f64
            });
            row.vs.push((choice.to_string(), visits, time));
        }
        reductions.push(row);
    }

    // Selection precision under the configured metric: HYBRID at least as
    // good as every fixed candidate, per (analysis, graph).
    let mut precision = Vec::new();
    let mut mispredictions = Vec::new();
    if cfg.strategies.contains(&StrategyChoice::Hybrid) {
        for la in &loaded {
            let code = la.asset.code.to_string();
            let hybrid = &samples[&(code.clone(), StrategyChoice::Hybrid)];
            let mut correct = 0usize;
            let mut total = 0usize;
            for (ix, g) in corpus.iter().enumerate() {
                let Some((h_visits, h_time)) = hybrid[ix] else {
                    continue;
                };
                let hybrid_cost = match cfg.metric {
                    Metric::Visits => h_visits,
                    Metric::Time => h_time,
                };
                let mut best: Option<u64> = None;
                for &choice in &cfg.strategies {
                    if choice == StrategyChoice::Hybrid {
                        continue;
                    }
                    if let Some(Some((v, t))) = samples[&(code.clone(), choice)].get(ix) {
                        let cost = match cfg.metric {
                            Metric::Visits => *v,
                            Metric::Time => *t,
                        };
                        best = Some(best.map_or(cost, |b| b.min(cost)));
                    }
                }
                let Some(best) = best else { continue };
                total += 1;
                if hybrid_cost <= best {
                    correct += 1;
                } else {
                    mispredictions.push(report::Misprediction {
                        analysis: code.clone(),
                        graph: g.name.clone(),
                        cyclicity: g.cyclicity,
                        hybrid: hybrid_cost,
                        best,
                    });
                }
            }
            precision.push(PrecisionRow {
                analysis: code.clone(),
                total,
                correct,
                precision: if total == 0 {
                    1.0
                } else {
                    correct as f64 / total as f64
                },
            });
        }
    }

    let static_us: BTreeMap<String, u64> = loaded
        .iter()
        .map(|la| (la.asset.code.to_string(), la.props.total_micros))
        .collect();
    let total_static: u64 = static_us.values().sum();
    let total_us = started.elapsed().as_micros() as u64;

    Ok(BenchReport {
        metric: cfg.metric,
        cells: cells.into_values().collect(),
        reductions,
        precision,
        mispredictions,
        static_us,
        total_us,
        overhead_ratio: if total_us == 0 {
            0.0
        } else {
            total_static as f64 / total_us as f64
        },
    })
}

/// Node-level difference between a run and its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchDiff {
    pub analysis: String,
    pub graph: String,
    pub traversal: String,
    pub node: usize,
    pub got: String,
    pub want: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundtruthReport {
    pub pairs: usize,
    pub mismatches: Vec<MismatchDiff>,
}

impl GroundtruthReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares HYBRID outputs for every (analysis, graph) pair against the
/// worklist oracle (every traversal) and the independent reference solver
/// (final traversal). Mismatches are reported, not raised.
pub fn validate_groundtruth(
    codes: &[String],
    corpus: &[Cfg],
) -> Result<GroundtruthReport, HarnessError> {
    let loaded = load_analyses(codes)?;
    let mut report = GroundtruthReport::default();
    for la in &loaded {
        for g in corpus {
            report.pairs += 1;
            let hybrid_plans: Vec<ExecutionPlan> = select_program(&la.props, g.cyclicity)?
                .into_iter()
                .map(|o| o.plan)
                .collect();
            let hybrid = execute_analysis(&la.program, g, &hybrid_plans, None)?;
            let oracle = execute_analysis(&la.program, g, &oracle_plans(&la.program), None)?;
            for (traversal, oracle_map) in &oracle.outputs {
                let hybrid_map = hybrid.outputs.get(traversal);
                diff_maps(
                    &mut report,
                    la.asset.code,
                    &g.name,
                    traversal,
                    hybrid_map,
                    oracle_map,
                );
            }
            let reference = reference_solution(la.asset.code, g);
            let last = la.program.invocations.last().map(|i| i.traversal.clone());
            if let Some(last) = last {
                diff_maps(
                    &mut report,
                    la.asset.code,
                    &g.name,
                    &format!("{last} (reference)"),
                    hybrid.outputs.get(&last),
                    &reference,
                );
            }
        }
    }
    Ok(report)
}

fn diff_maps(
    report: &mut GroundtruthReport,
    analysis: &str,
    graph: &str,
    traversal: &str,
    got: Option<&crate::dsl::OutputMap>,
    want: &crate::dsl::OutputMap,
) {
    let empty = crate::dsl::OutputMap::new();
    let got = got.unwrap_or(&empty);
    let nodes: std::collections::BTreeSet<usize> =
        got.keys().chain(want.keys()).copied().collect();
    for node in nodes {
        let g = got.get(&node).cloned().unwrap_or(Value::Null);
        let w = want.get(&node).cloned().unwrap_or(Value::Null);
        if g != w {
            report.mismatches.push(MismatchDiff {
                analysis: analysis.to_string(),
                graph: graph.to_string(),
                traversal: traversal.to_string(),
                node,
                got: g.to_string(),
                want: w.to_string(),
            });
        }
    }
}

/// Selection precision per analysis under the visits metric, as a
/// convenience wrapper over the full matrix.
pub fn measure_selection_precision(
    codes: &[String],
    cfg: &BenchConfig,
) -> Result<Vec<PrecisionRow>, HarnessError> {
    let mut cfg = cfg.clone();
    cfg.analyses = codes.to_vec();
    cfg.metric = Metric::Visits;
    if !cfg.strategies.contains(&StrategyChoice::Hybrid) {
        cfg.strategies.push(StrategyChoice::Hybrid);
    }
    Ok(run_matrix(&cfg)?.precision)
}

#[cfg(test)]
mod tests;
