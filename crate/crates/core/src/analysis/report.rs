use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::Result;

use super::errors::rates;

/// What the study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    /// Parameter is the cell count per axis, `h = 1/N`.
    Spatial,
    /// Parameter is the number of time steps `M`.
    Temporal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// `N` (cells per axis) for spatial studies, `M` for temporal ones.
    pub param: usize,
    /// Cells per axis used by this run.
    pub cells: usize,
    pub steps: usize,
    pub error: f64,
    /// Order relative to the previous row.
    pub rate: Option<f64>,
}

/// Errors and observed orders of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub kind: StudyKind,
    pub label: String,
    pub rows: Vec<ReportRow>,
    /// Free-form `(key, value)` pairs: flux weights, α, γ, δ, k, ...
    pub metadata: Vec<(String, String)>,
}

impl ErrorReport {
    /// Builds rows and fills in rates from `(param, cells, steps, error)`.
    pub fn new(
        kind: StudyKind,
        label: impl Into<String>,
        runs: &[(usize, usize, usize, f64)],
        metadata: Vec<(String, String)>,
    ) -> Result<Self> {
        let errors: Vec<f64> = runs.iter().map(|r| r.3).collect();
        // h = 1/N and τ ~ 1/M both shrink as the parameter grows
        let params: Vec<f64> = runs.iter().map(|r| 1.0 / r.0 as f64).collect();
        let rs = if runs.len() >= 2 {
            rates(&errors, &params)?
        } else {
            Vec::new()
        };
        let rows = runs
            .iter()
            .enumerate()
            .map(|(i, &(param, cells, steps, error))| ReportRow {
                param,
                cells,
                steps,
                error,
                rate: if i == 0 { None } else { Some(rs[i - 1]) },
            })
            .collect();
        Ok(Self {
            kind,
            label: label.into(),
            rows,
            metadata,
        })
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    fn param_label(&self, p: usize) -> String {
        match self.kind {
            StudyKind::Spatial => format!("1/{p}"),
            StudyKind::Temporal => p.to_string(),
        }
    }

    /// CSV with header `param,error,rate`; the first rate is empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("param,error,rate\n");
        for r in &self.rows {
            let rate = r.rate.map(|v| format!("{v:.4}")).unwrap_or_default();
            let _ = writeln!(s, "{},{:.4e},{}", self.param_label(r.param), r.error, rate);
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    /// Aligned plain-text table: one line of errors, one line of rates.
    pub fn to_text(&self) -> String {
        let head = match self.kind {
            StudyKind::Spatial => "h",
            StudyKind::Temporal => "M",
        };
        let first = format!("{} \\ {head}", self.label);
        let w0 = first.len().max(8);
        let mut s = String::new();
        let _ = write!(s, "{first:<w0$}");
        for r in &self.rows {
            let _ = write!(s, "  {:>11}", self.param_label(r.param));
        }
        s.push('\n');
        let _ = write!(s, "{:<w0$}", "");
        for r in &self.rows {
            let _ = write!(s, "  {:>11}", format!("{:.4e}", r.error));
        }
        s.push('\n');
        let _ = write!(s, "{:<w0$}", "Rates");
        for r in &self.rows {
            match r.rate {
                Some(v) => {
                    let _ = write!(s, "  {:>11}", format!("{v:.4}"));
                }
                None => {
                    let _ = write!(s, "  {:>11}", "");
                }
            }
        }
        s.push('\n');
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s
    }
}
