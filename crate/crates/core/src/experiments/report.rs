use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::compare::ComparisonReport;
use super::runner::{CellSummary, RunRecord};
use crate::error::{Error, Result};
use crate::planner::format_node_sequence;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn finish<W: Write>(w: csv::Writer<W>) -> Result<()> {
    w.into_inner()
        .map_err(|e| Error::io("<csv>", e.into_error()))?
        .flush()
        .map_err(|e| Error::io("<csv>", e))
}

pub fn write_summary_csv<W: Write>(cells: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "map",
        "provider",
        "repetitions",
        "r",
        "snr_db",
        "seed",
        "mean_est_cost",
        "mean_true_cost",
        "saving_pct_vs_heuristic",
        "depletions",
        "fallbacks",
        "clamps",
        "recoveries",
    ])?;
    for c in cells {
        w.write_record([
            c.map.clone(),
            c.provider.to_string(),
            c.repetitions.to_string(),
            c.regression_no.to_string(),
            c.snr_db.to_string(),
            c.seed.to_string(),
            c.mean_est_cost.to_string(),
            c.mean_true_cost.to_string(),
            c.saving_pct_vs_heuristic.to_string(),
            c.depletions.to_string(),
            c.diagnostics.fallbacks.to_string(),
            c.diagnostics.clamps.to_string(),
            c.diagnostics.recoveries.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "map",
        "provider",
        "repetitions",
        "r",
        "snr_db",
        "seed",
        "call_index",
        "source",
        "dest",
        "node_sequence",
        "total_est_cost",
        "total_true_cost",
        "depleted",
    ])?;
    for r in records {
        w.write_record([
            r.map.clone(),
            r.provider.to_string(),
            r.repetitions.to_string(),
            r.regression_no.to_string(),
            r.snr_db.to_string(),
            r.seed.to_string(),
            r.call_index.to_string(),
            r.source.to_string(),
            r.dest.to_string(),
            format_node_sequence(&r.nodes),
            r.total_est_cost.to_string(),
            r.total_true_cost.to_string(),
            r.depleted.to_string(),
        ])?;
    }
    finish(w)
}

/// `summary.csv` and `records.csv` in `dir`.
pub fn write_experiment(cells: &[CellSummary], records: &[RunRecord], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_summary_csv(cells, create(&dir.join("summary.csv"))?)?;
    write_records_csv(records, create(&dir.join("records.csv"))?)
}

/// One row per provider: path, estimated and true per-edge costs, savings,
/// and edges not shared by all three paths.
pub fn write_comparison_csv<W: Write>(report: &ComparisonReport, out: W) -> Result<()> {
    let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "map",
        "provider",
        "source",
        "dest",
        "node_sequence",
        "est_cost_vector",
        "true_cost_vector",
        "total_est_cost",
        "total_true_cost",
        "saving_pct_vs_heuristic",
        "distinct_edges",
    ])?;
    for p in &report.paths {
        let distinct = report.distinct_edges(p.provider);
        w.write_record([
            report.map.clone(),
            p.provider.to_string(),
            report.source.to_string(),
            report.dest.to_string(),
            format_node_sequence(&p.path.nodes),
            join(&p.path.est_costs),
            join(&p.true_costs),
            p.path.total_est_cost.to_string(),
            p.true_total.to_string(),
            p.saving_pct_vs_heuristic.to_string(),
            distinct.len().to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_comparison(report: &ComparisonReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_comparison_csv(report, create(&dir.join("compare.csv"))?)
}
