//! Report model and serialization. CSV carries the per-cell aggregates;
//! JSON mirrors the whole report; text adds the reduction, precision and
//! overhead sections. Aggregates touched by a diverged run render as `--`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cfg::Cyclicity;

use super::Metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAgg {
    pub analysis: String,
    pub strategy: String,
    pub graphs: usize,
    pub total_visits: u64,
    pub total_passes: u64,
    pub total_checks: u64,
    pub total_time_us: u64,
    pub infeasible_count: usize,
}

/// Reduction R = (T_S - T_H) / T_S of HYBRID against one fixed strategy,
/// on the visits and time metrics. `None` marks an infeasible baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionRow {
    pub analysis: String,
    pub vs: Vec<(String, Option<f64>, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRow {
    pub analysis: String,
    pub total: usize,
    pub correct: usize,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Misprediction {
    pub analysis: String,
    pub graph: String,
    pub cyclicity: Cyclicity,
    pub hybrid: u64,
    pub best: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub metric: Metric,
    pub cells: Vec<CellAgg>,
    pub reductions: Vec<ReductionRow>,
    pub precision: Vec<PrecisionRow>,
    pub mispredictions: Vec<Misprediction>,
    /// Static property-extraction time per analysis, microseconds.
    pub static_us: BTreeMap<String, u64>,
    pub total_us: u64,
    /// Static extraction time over total matrix time.
    pub overhead_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

pub fn emit_report(report: &BenchReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Csv => emit_csv(report),
        Format::Text => emit_text(report),
    }
}

const CSV_HEADER: &str =
    "analysis,strategy,graphs,total_visits,total_passes,total_checks,total_time_us,infeasible_count";

fn emit_csv(report: &BenchReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in &report.cells {
        let (visits, passes, checks, time) = if c.infeasible_count > 0 {
            ("--".into(), "--".into(), "--".into(), "--".into())
        } else {
            (
                c.total_visits.to_string(),
                c.total_passes.to_string(),
                c.total_checks.to_string(),
                c.total_time_us.to_string(),
            )
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.analysis, c.strategy, c.graphs, visits, passes, checks, time, c.infeasible_count
        ));
    }
    out
}

fn pct(v: Option<f64>) -> String {
    match v {
        Some(r) => format!("{:.1}%", r * 100.0),
        None => "--".into(),
    }
}

fn emit_text(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str("== totals per (analysis, strategy) ==\n");
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in &report.cells {
        let (visits, time) = if c.infeasible_count > 0 {
            ("--".into(), "--".into())
        } else {
            (c.total_visits.to_string(), c.total_time_us.to_string())
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.analysis,
            c.strategy,
            c.graphs,
            visits,
            c.total_passes,
            c.total_checks,
            time,
            c.infeasible_count
        ));
    }

    out.push_str("\n== reduction R=(T_S-T_H)/T_S, visits metric ==\n");
    for row in &report.reductions {
        for (strategy, visits, _) in &row.vs {
            out.push_str(&format!(
                "analysis={} vs={} R_visits={}\n",
                row.analysis,
                strategy,
                pct(*visits)
            ));
        }
    }
    out.push_str("\n== reduction R=(T_S-T_H)/T_S, time metric ==\n");
    for row in &report.reductions {
        for (strategy, _, time) in &row.vs {
            out.push_str(&format!(
                "analysis={} vs={} R_time={}\n",
                row.analysis,
                strategy,
                pct(*time)
            ));
        }
    }

    if !report.precision.is_empty() {
        out.push_str("\n== selection precision ==\n");
        for p in &report.precision {
            out.push_str(&format!(
                "analysis={} correct={}/{} precision={:.1}%\n",
                p.analysis,
                p.correct,
                p.total,
                p.precision * 100.0
            ));
        }
    }
    if !report.mispredictions.is_empty() {
        out.push_str("\n== mispredictions ==\n");
        for m in &report.mispredictions {
            out.push_str(&format!(
                "analysis={} graph={} cyclicity={} hybrid={} best={}\n",
                m.analysis, m.graph, m.cyclicity, m.hybrid, m.best
            ));
        }
    }

    out.push_str("\n== overhead ==\n");
    for (analysis, us) in &report.static_us {
        out.push_str(&format!("analysis={analysis} static_us={us}\n"));
    }
    out.push_str(&format!(
        "total_us={} overhead_ratio={:.6}%\n",
        report.total_us,
        report.overhead_ratio * 100.0
    ));
    out
}
