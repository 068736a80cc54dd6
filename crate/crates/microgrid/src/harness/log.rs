use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Fixed-schema table of f64 columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeriesLog {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Columns logged for every DGU, prefixed `dgu<k>_`.
pub const DGU_COLUMNS: [&str; 17] = [
    "vd", "vq", "itd", "itq", "ild", "ilq", "v_rms", "f_hz", "p_w", "q_var", "thd_pct", "imbalance_pct",
    "connected", "v_pol_est", "phi_pol_est", "delta_v_q", "track_err",
];

pub const GLOBAL_COLUMNS: [&str; 7] = ["v_pol", "v_pol_d", "v_pol_q", "v_pol_avg", "phi_pol_avg", "delta_v", "delta_phi"];

pub fn schema(n_dgus: usize) -> Vec<String> {
    let mut c = vec!["t".to_string()];
    for k in 1..=n_dgus {
        for name in DGU_COLUMNS {
            c.push(format!("dgu{k}_{name}"));
        }
    }
    c.extend(GLOBAL_COLUMNS.iter().map(|s| s.to_string()));
    c
}

impl TimeSeriesLog {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * self.columns.len() * 24);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                write!(s, "{}", format_value(*v)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Io("empty csv".into()))?;
        let columns: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.parse::<f64>()).collect();
            let row = row.map_err(|e| Error::Io(format!("row {}: {e}", n + 1)))?;
            if row.len() != columns.len() {
                return Err(Error::Io(format!("row {} has {} fields", n + 1, row.len())));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn emit_csv(log: &TimeSeriesLog, path: &Path) -> Result<()> {
    std::fs::write(path, log.to_csv_string())?;
    Ok(())
}
