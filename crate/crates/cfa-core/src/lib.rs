//! Control-flow analyses written in a small traversal language, executed
//! with a per-graph choice of traversal strategy.
//!
//! The pipeline: [`dsl`] parses an analysis into traversals and fixpoint
//! functions, [`props`] infers each traversal's static properties, [`cfg`]
//! classifies the input graph, [`selector`] maps the combination to an
//! execution plan, [`engine`] runs it, and [`harness`] compares the chosen
//! plans against fixed strategies over seeded corpora.

pub mod analyses;
pub mod cfg;
pub mod cli;
pub mod dsl;
pub mod engine;
pub mod harness;
pub mod props;
pub mod selector;

pub use cfg::{classify_cyclicity, generate_random_cfg, parse_cfg, Cfg, Cyclicity};
pub use dsl::{parse_program, Direction, Program};
pub use engine::{ExecutionPlan, RunMetrics, Strategy};
pub use props::{extract_properties, AnalysisProperties};
pub use selector::{select, DecisionOutcome, DecisionPath};
