//! The shipped analysis corpus: eight analyses as embedded sources, with
//! the property rows each one must exhibit, plus independent reference
//! solvers used as ground truth by the harness and the test suites.

use crate::cfg::{parse_cfg, Cfg};
use crate::dsl::Direction;

mod reference;

pub use reference::reference_solution;

/// One corpus entry. `expected_props` lists (data-flow sensitive, loop
/// sensitive, direction) per traversal, in invocation order.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisAsset {
    pub code: &'static str,
    pub source: &'static str,
    pub expected_props: &'static [(bool, bool, Direction)],
}

pub const PDOM_SOURCE: &str = include_str!("assets/pdom.dsl");
pub const DOM_SOURCE: &str = include_str!("assets/dom.dsl");
pub const RD_SOURCE: &str = include_str!("assets/rd.dsl");
pub const LV_SOURCE: &str = include_str!("assets/lv.dsl");
pub const AE_SOURCE: &str = include_str!("assets/ae.dsl");
pub const VBE_SOURCE: &str = include_str!("assets/vbe.dsl");
pub const UDV_SOURCE: &str = include_str!("assets/udv.dsl");
pub const COL_SOURCE: &str = include_str!("assets/col.dsl");

/// Eight-node branch-in-loop demo graph used throughout the docs and tests.
pub const DEMO_GRAPH: &str = include_str!("assets/graphs/loop_branch_demo.cfg");

use Direction::{Backward as BWD, Forward as FWD, Iterative as ITER};

const CORPUS: [AnalysisAsset; 8] = [
    AnalysisAsset {
        code: "PDOM",
        source: PDOM_SOURCE,
        expected_props: &[(false, false, ITER), (true, false, BWD)],
    },
    AnalysisAsset {
        code: "DOM",
        source: DOM_SOURCE,
        expected_props: &[(false, false, ITER), (true, false, FWD)],
    },
    AnalysisAsset {
        code: "RD",
        source: RD_SOURCE,
        expected_props: &[(false, false, ITER), (true, true, FWD)],
    },
    AnalysisAsset {
        code: "LV",
        source: LV_SOURCE,
        expected_props: &[(false, false, ITER), (true, true, BWD)],
    },
    AnalysisAsset {
        code: "AE",
        source: AE_SOURCE,
        expected_props: &[(false, false, ITER), (true, true, FWD)],
    },
    AnalysisAsset {
        code: "VBE",
        source: VBE_SOURCE,
        expected_props: &[(false, false, ITER), (true, true, BWD)],
    },
    AnalysisAsset {
        code: "UDV",
        source: UDV_SOURCE,
        expected_props: &[(false, false, ITER)],
    },
    AnalysisAsset {
        code: "COL",
        source: COL_SOURCE,
        expected_props: &[(false, false, ITER)],
    },
];

pub fn load_corpus() -> Vec<AnalysisAsset> {
    CORPUS.to_vec()
}

pub fn asset(code: &str) -> Option<AnalysisAsset> {
    CORPUS.iter().copied().find(|a| a.code == code)
}

pub fn demo_graph() -> Cfg {
    parse_cfg(DEMO_GRAPH).expect("embedded demo graph is valid")
}
