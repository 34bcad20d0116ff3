/*!
DEA benchmarking toolkit.

For each decision making unit (DMU) in a dataset this crate finds

* the **furthest** Pareto-efficient target (classical additive model, the
  largest total input/output slack), and
* the **closest** Pareto-efficient target (a mixed-binary program that
  minimizes total slack while a supporting hyperplane certifies efficiency),

and then the **maximal closest reference set**: every efficient DMU that can
carry positive weight in some representation of the chosen target. Everything
runs under constant returns to scale on a self-contained dense simplex /
branch-and-bound stack, so results are deterministic bit for bit.

```
use dea_core::{fixtures, pipeline};

let ds = fixtures::classic_nine();
let report = pipeline::analyze_all(&ds, &pipeline::AnalyzeConfig::default());
for record in report.records.iter().flatten() {
    println!("{}: {:?}", ds.name(record.dmu), record.status);
}
```
*/

pub mod dataset;
pub mod fixtures;
pub mod lp;
pub mod milp;
pub mod models;
pub mod oracle;
pub mod pipeline;

pub use dataset::{dmu_column, load_dataset, DatasetError, DmuDataset};
pub use lp::{
    solve_lp, LinearProgram, LpSolution, LpStatus, Relation, Sense, SolveError, ToleranceConfig,
};
pub use milp::{solve_milp, MilpError, MilpProgram, MilpSolution, MilpStatus, DEFAULT_NODE_LIMIT};
pub use models::{
    classify_all, efficient_indices, extreme_efficient_indices, is_pareto_efficient,
    solve_additive, solve_madd, solve_mcrs, support_set, BigM, EfficiencyStatus, Hyperplane,
    ModelError, Projection, ProjectionMode, ReferenceSetResult,
};
pub use oracle::{oracle_closest, oracle_maximal_set, OracleError, OracleProjection};
pub use pipeline::{
    analyze_all, analyze_dmu, AnalysisMode, AnalysisRecord, AnalysisReport, AnalyzeConfig,
    CandidatesPolicy, ClosestRecord, FurthestRecord, RecordError, SolverEcho, Stage,
};
