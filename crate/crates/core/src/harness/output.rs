use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::sim::ViolationEstimate;

/// One CSV field. `Empty` is written as an empty field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Empty => Ok(()),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario_id: String,
    pub params: Vec<Cell>,
    pub estimate: Option<ViolationEstimate>,
    pub analytic_value: Option<f64>,
    pub bound_value: Option<f64>,
    pub extras: Vec<Cell>,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn new(scenario_id: impl Into<String>, params: Vec<Cell>) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            params,
            estimate: None,
            analytic_value: None,
            bound_value: None,
            extras: Vec::new(),
            error: None,
        }
    }

    /// A row whose computation failed; values stay empty.
    pub fn failed(scenario_id: impl Into<String>, params: Vec<Cell>, error: impl ToString) -> Self {
        Self {
            error: Some(error.to_string()),
            ..Self::new(scenario_id, params)
        }
    }

    pub fn z_score(&self) -> Option<f64> {
        match (self.estimate, self.analytic_value) {
            (Some(e), Some(a)) => Some(e.z_score(a)),
            _ => None,
        }
    }
}

/// Which of the value columns a table carries and what they are called.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnLabels {
    pub analytic: Option<String>,
    pub bound: Option<String>,
    pub estimate: Option<String>,
}

impl ColumnLabels {
    pub fn new(analytic: Option<&str>, bound: Option<&str>, estimate: Option<&str>) -> Self {
        Self {
            analytic: analytic.map(str::to_owned),
            bound: bound.map(str::to_owned),
            estimate: estimate.map(str::to_owned),
        }
    }
}

/// Rows plus a fixed column layout:
/// `scenario_id, params.., analytic, bound, estimate, std_err, ci95_low,
/// ci95_high, z_score, extras.., error`, where absent value groups are
/// dropped and `z_score` appears only with both estimate and analytic.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub labels: ColumnLabels,
    pub param_names: Vec<String>,
    pub extra_names: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(labels: ColumnLabels, param_names: &[&str], extra_names: &[&str]) -> Self {
        Self {
            labels,
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            extra_names: extra_names.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn has_z(&self) -> bool {
        self.labels.estimate.is_some() && self.labels.analytic.is_some()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["scenario_id".to_owned()];
        h.extend(self.param_names.iter().cloned());
        h.extend(self.labels.analytic.iter().cloned());
        h.extend(self.labels.bound.iter().cloned());
        if let Some(est) = &self.labels.estimate {
            h.push(est.clone());
            h.extend(["std_err", "ci95_low", "ci95_high"].map(str::to_owned));
        }
        if self.has_z() {
            h.push("z_score".to_owned());
        }
        h.extend(self.extra_names.iter().cloned());
        h.push("error".to_owned());
        h
    }

    pub fn cells(&self, row: &ResultRow) -> Vec<Cell> {
        let pad = |v: &[Cell], n: usize| {
            let mut out: Vec<Cell> = v.iter().take(n).cloned().collect();
            out.resize(n, Cell::Empty);
            out
        };
        let mut c = vec![Cell::Text(row.scenario_id.clone())];
        c.extend(pad(&row.params, self.param_names.len()));
        if self.labels.analytic.is_some() {
            c.push(row.analytic_value.into());
        }
        if self.labels.bound.is_some() {
            c.push(row.bound_value.into());
        }
        if self.labels.estimate.is_some() {
            match row.estimate {
                Some(e) => c.extend([e.p_hat, e.std_err, e.ci95.0, e.ci95.1].map(Cell::Num)),
                None => c.extend(std::iter::repeat_n(Cell::Empty, 4)),
            }
        }
        if self.has_z() {
            c.push(row.z_score().into());
        }
        c.extend(pad(&row.extras, self.extra_names.len()));
        c.push(row.error.clone().map_or(Cell::Empty, Cell::Text));
        c
    }

    /// Writes LF-terminated CSV with a header line.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(self.header())?;
        for row in &self.rows {
            out.write_record(self.cells(row).iter().map(|c| c.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Looks up a column value by header name.
    pub fn value(&self, row: usize, column: &str) -> Option<Cell> {
        let idx = self.header().iter().position(|h| h == column)?;
        self.cells(self.rows.get(row)?).into_iter().nth(idx)
    }
}

/// Provenance written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub schema_version: u32,
    pub kind: String,
    pub config_sha256: String,
    pub seed: u64,
    pub trials: u64,
    pub threads: usize,
    pub git_describe: String,
    pub started_unix_secs: u64,
    pub wall_time_secs: f64,
    pub csv_file: String,
    pub rows: usize,
    pub failed_rows: usize,
}
