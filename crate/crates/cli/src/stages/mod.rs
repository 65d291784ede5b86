mod compare;
mod downstream;
mod embed;
mod generate;
mod report;

pub use compare::{run_compare, CompareSummary, MeasureSummary};
pub use downstream::{run_downstream, DownstreamSummary};
pub use embed::run_embed;
pub use generate::run_generate;
pub use report::run_report;
