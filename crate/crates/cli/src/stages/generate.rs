use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::graphs::{generate_point, write_graph};
use crate::layout::Layout;
use crate::manifest::{JobRecord, StageLog};
use crate::CliError;

/// Writes one graph per sweep point. A point that cannot be generated is
/// recorded and the sweep moves on.
pub fn run_generate(cfg: &ExperimentConfig, workers: usize) -> Result<(), CliError> {
    let spec = cfg
        .graph
        .generator
        .as_ref()
        .ok_or_else(|| CliError::Config("generate needs a [graph.generator] section".into()))?;
    let layout = Layout::new(&cfg.out);
    let mut log = StageLog::start("generate");
    for point in spec.points() {
        let t = Instant::now();
        let result = generate_point(spec, &point, cfg.base_seed)
            .and_then(|(g, record, labels)| write_graph(&layout, &g, &record, labels.as_ref()).map(|_| record));
        match result {
            Ok(record) => {
                log::info!(
                    "generated {} ({} nodes, {} edges)",
                    record.name,
                    record.node_count,
                    record.edge_count
                );
                log.graphs.push(record);
                log.record(JobRecord::ok(&point.name, t.elapsed().as_secs_f64()));
            }
            Err(e) => log.record(JobRecord::failed(&point.name, &e, t.elapsed().as_secs_f64())),
        }
    }
    log.finish(cfg, &layout, workers)
}
