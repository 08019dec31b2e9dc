use super::*;
use crate::engine::RunMetrics;

fn small_config() -> BenchConfig {
    let mut cfg = BenchConfig::with_total(40);
    cfg.seed = 7;
    cfg.size_range = (5, 18);
    cfg
}

#[test]
fn udv_visit_totals_equal_node_counts_for_every_strategy() {
    let mut cfg = small_config();
    cfg.analyses = vec!["UDV".into()];
    let corpus = build_corpus(&cfg).unwrap();
    let total_nodes: u64 = corpus.iter().map(|g| g.len() as u64).sum();
    let report = run_matrix(&cfg).unwrap();
    for cell in &report.cells {
        assert_eq!(cell.total_visits, total_nodes, "strategy {}", cell.strategy);
        assert_eq!(cell.infeasible_count, 0);
    }
}

#[test]
fn pdom_reduction_is_half_on_acyclic_corpus() {
    // HYBRID runs initT (N) + domT optimized (N); fixed PO runs initT (N) +
    // domT with a confirmation pass (2N). Reduction on the domT share is
    // 50%; on whole-analysis visits it is (3N - 2N) / 3N = 1/3.
    let mut cfg = small_config();
    cfg.analyses = vec!["PDOM".into()];
    cfg.strategies = vec![
        StrategyChoice::Fixed(crate::engine::Strategy::Po),
        StrategyChoice::Hybrid,
    ];
    cfg.graphs_per_class = [(Cyclicity::Sequential, 6), (Cyclicity::BranchOnly, 6)]
        .into_iter()
        .collect();
    let report = run_matrix(&cfg).unwrap();
    let find = |s: &str| {
        report
            .cells
            .iter()
            .find(|c| c.strategy == s)
            .unwrap()
            .total_visits
    };
    let po = find("PO");
    let hy = find("HYBRID");
    assert_eq!(po % 3, 0);
    assert_eq!(hy, po / 3 * 2);
    let row = &report.reductions[0];
    let (_, visits, _) = row.vs.iter().find(|(s, _, _)| s == "PO").unwrap();
    assert!((visits.unwrap() - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn empty_strategy_list_gives_empty_report() {
    let mut cfg = small_config();
    cfg.strategies.clear();
    let report = run_matrix(&cfg).unwrap();
    assert!(report.cells.is_empty());
    assert!(report.precision.is_empty());
}

#[test]
fn groundtruth_clean_on_generated_corpus() {
    let cfg = small_config();
    let corpus = build_corpus(&cfg).unwrap();
    let codes: Vec<String> = cfg.analyses.clone();
    let report = validate_groundtruth(&codes, &corpus).unwrap();
    assert!(report.passed(), "mismatches: {:?}", report.mismatches);
    assert_eq!(report.pairs, corpus.len() * codes.len());
}

#[test]
fn groundtruth_empty_corpus_passes_vacuously() {
    let report = validate_groundtruth(&["PDOM".into()], &[]).unwrap();
    assert!(report.passed());
    assert_eq!(report.pairs, 0);
}

#[test]
fn corrupted_plan_is_detected_as_mismatch() {
    // Forward RD forced through a DEC single pass visits uses before defs
    // are propagated; the oracle comparison must notice.
    use crate::dsl::parse_program;
    use crate::engine::{execute_analysis, oracle_plans, ExecutionPlan, Strategy};

    let asset = crate::analyses::asset("RD").unwrap();
    let program = parse_program(asset.source).unwrap();
    let g = crate::cfg::generate_random_cfg(3, 14, Cyclicity::BranchOnly).unwrap();
    let corrupted: Vec<ExecutionPlan> = program
        .invocations
        .iter()
        .map(|inv| ExecutionPlan {
            strategy: Strategy::Dec,
            single_pass: true,
            direction: inv.direction,
        })
        .collect();
    let bad = execute_analysis(&program, &g, &corrupted, None).unwrap();
    let oracle = execute_analysis(&program, &g, &oracle_plans(&program), None).unwrap();
    assert_ne!(
        bad.outputs["rdT"], oracle.outputs["rdT"],
        "negative control should disagree"
    );
}

#[test]
fn precision_is_perfect_for_loop_insensitive_analyses() {
    let mut cfg = small_config();
    cfg.analyses = vec!["PDOM".into(), "DOM".into(), "UDV".into(), "COL".into()];
    let rows = measure_selection_precision(&cfg.analyses.clone(), &cfg).unwrap();
    for row in rows {
        assert_eq!(row.correct, row.total, "{}", row.analysis);
    }
}

#[test]
fn single_candidate_matching_hybrid_gives_full_precision() {
    let mut cfg = small_config();
    cfg.analyses = vec!["UDV".into()];
    cfg.strategies = vec![
        StrategyChoice::Fixed(crate::engine::Strategy::Any),
        StrategyChoice::Hybrid,
    ];
    cfg.graphs_per_class = [(Cyclicity::Sequential, 1)].into_iter().collect();
    let report = run_matrix(&cfg).unwrap();
    assert_eq!(report.precision[0].precision, 1.0);
}

#[test]
fn report_json_roundtrip() {
    let mut cfg = small_config();
    cfg.analyses = vec!["PDOM".into(), "RD".into()];
    let report = run_matrix(&cfg).unwrap();
    let json = emit_report(&report, Format::Json);
    let back: BenchReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report, back);
}

#[test]
fn infeasible_cells_render_as_dashes() {
    let report = BenchReport {
        metric: Metric::Visits,
        cells: vec![CellAgg {
            analysis: "X".into(),
            strategy: "PO".into(),
            graphs: 3,
            total_visits: 10,
            total_passes: 2,
            total_checks: 1,
            total_time_us: 5,
            infeasible_count: 1,
        }],
        reductions: vec![ReductionRow {
            analysis: "X".into(),
            vs: vec![("PO".into(), None, None)],
        }],
        precision: vec![],
        mispredictions: vec![],
        static_us: Default::default(),
        total_us: 10,
        overhead_ratio: 0.0,
    };
    let csv = emit_report(&report, Format::Csv);
    assert!(csv.contains("X,PO,3,--,--,--,--,1"));
    let text = emit_report(&report, Format::Text);
    assert!(text.contains("R_visits=--"));
}

#[test]
fn empty_report_is_headers_only() {
    let report = BenchReport {
        metric: Metric::Visits,
        cells: vec![],
        reductions: vec![],
        precision: vec![],
        mispredictions: vec![],
        static_us: Default::default(),
        total_us: 0,
        overhead_ratio: 0.0,
    };
    let csv = emit_report(&report, Format::Csv);
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("analysis,strategy,"));
}

#[test]
fn matrix_visit_counters_reproducible() {
    let mut cfg = small_config();
    cfg.analyses = vec!["LV".into(), "DOM".into()];
    let a = run_matrix(&cfg).unwrap();
    let b = run_matrix(&cfg).unwrap();
    let strip = |r: &BenchReport| -> Vec<(String, String, u64, u64, u64)> {
        r.cells
            .iter()
            .map(|c| {
                (
                    c.analysis.clone(),
                    c.strategy.clone(),
                    c.total_visits,
                    c.total_passes,
                    c.total_checks,
                )
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn metrics_absorb_sums_counters() {
    let mut m = RunMetrics::default();
    m.absorb(&RunMetrics {
        node_visits: 3,
        passes: 1,
        fixpoint_checks: 2,
        worklist_pushes: 1,
        wall: std::time::Duration::from_micros(5),
    });
    assert_eq!(m.node_visits, 3);
    assert_eq!(m.worklist_pushes, 1);
}
