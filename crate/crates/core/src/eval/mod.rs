//! Scoring and the benchmark harness.

pub mod harness;
pub mod metrics;
pub mod report;
pub mod task;

pub use harness::{load_document, run_benchmark, BenchmarkOptions, DocumentStore, HarnessError, Method};
pub use metrics::{accuracy, reta_correct, rpd, MetricError, RetaLevels};
pub use report::{Comparison, EvalReport, PipelineReport, TaskOutcome};
pub use task::{load_tasks, parse_tasks, Task, TaskError, Truth};
