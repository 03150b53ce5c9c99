use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "function,strategy,solver,N,trial,seed,l2_error,residual_norm,effective_rank,wall_time_ms";

/// One measurement row. Failed solves leave the numeric fields empty.
///
/// `solver` names the route and the tolerance it ran with: `cod:1e-8`,
/// `svd:auto=2.2737367544323206e-13`, `cod_abs:1e-12`, or `none` for the
/// classical baselines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub function: String,
    pub strategy: String,
    pub solver: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub l2_error: Option<f64>,
    pub residual_norm: Option<f64>,
    pub effective_rank: Option<usize>,
    pub wall_time_ms: Option<f64>,
}

impl SweepRecord {
    pub fn failed(&self) -> bool {
        self.l2_error.is_none()
    }

    /// `solver` without the resolved value of an automatic tolerance, so
    /// trials with different data-dependent tolerances aggregate together.
    pub fn solver_group(&self) -> &str {
        self.solver.split('=').next().unwrap_or(&self.solver)
    }
}

pub fn write_csv<W: std::io::Write>(records: &[SweepRecord], out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    write_csv(records, std::fs::File::create(path)?)
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::invalid(format!("unexpected CSV header '{}'", header.join(","))));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn load_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    read_csv(std::fs::File::open(path)?)
}

/// Aggregate over the trials of one (function, strategy, solver, N) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub function: String,
    pub strategy: String,
    pub solver: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub geometric_mean: Option<f64>,
    pub arithmetic_mean: Option<f64>,
}

pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let s: f64 = values.iter().map(|v| v.ln()).sum();
    Some((s / values.len() as f64).exp())
}

pub fn arithmetic_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

/// Groups records into cells in order of first appearance. Failed trials
/// are counted but excluded from the means.
pub fn summarize(records: &[SweepRecord]) -> Vec<CellSummary> {
    let mut cells: Vec<(CellSummary, Vec<f64>)> = Vec::new();
    for r in records {
        let pos = cells.iter().position(|(c, _)| {
            c.function == r.function && c.strategy == r.strategy && c.solver == r.solver_group() && c.n == r.n
        });
        let idx = pos.unwrap_or_else(|| {
            cells.push((
                CellSummary {
                    function: r.function.clone(),
                    strategy: r.strategy.clone(),
                    solver: r.solver_group().to_owned(),
                    n: r.n,
                    trials: 0,
                    failures: 0,
                    geometric_mean: None,
                    arithmetic_mean: None,
                },
                Vec::new(),
            ));
            cells.len() - 1
        });
        let (cell, errs) = &mut cells[idx];
        cell.trials += 1;
        match r.l2_error {
            Some(e) => errs.push(e),
            None => cell.failures += 1,
        }
    }
    cells
        .into_iter()
        .map(|(mut c, errs)| {
            c.geometric_mean = geometric_mean(&errs);
            c.arithmetic_mean = arithmetic_mean(&errs);
            c
        })
        .collect()
}

pub fn emit_summary_csv(summaries: &[CellSummary], path: &Path) -> Result<()> {
    if summaries.is_empty() {
        return Err(Error::invalid("no summaries to write"));
    }
    let mut w = csv::Writer::from_path(path)?;
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}
