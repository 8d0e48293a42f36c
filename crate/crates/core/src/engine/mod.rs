//! Test orchestration over a loaded specification.

mod pool;
pub mod report;
mod runner;
mod strategy;
mod verdict;

pub use pool::ObjectPool;
pub use report::{render_api_summary, render_operation, render_report, render_reversal};
pub use runner::{check_invariants, test_specification, Engine, ReversalReport, ReversalRequest, TestOptions, TestRun};
pub use strategy::{reorganize, InvalidStrategy, OrderStrategy, INVALID_STRATEGY_MESSAGE};
pub use verdict::{ApiResult, DataSource, OperationVerdict, Outcome, RequestRecord, Step};
