//! Time series and convergence tables written as CSV (data) plus JSON (metadata).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares slope of y against x.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// |d log10(value) / d key| over the last three rows is below 0.2.
pub fn is_saturated(keys: &[f64], values: &[f64]) -> bool {
    if keys.len() < 3 {
        return false;
    }
    let n = keys.len();
    let pts: Vec<(f64, f64)> = (n - 3..n).map(|i| (keys[i], values[i].abs().max(1e-300).log10())).collect();
    fit_slope(&pts).abs() < 0.2
}

/// A keyed numeric table: first column is the key (time or order), the rest are values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub units: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(units: impl Into<String>, columns: &[&str]) -> Self {
        Table { units: units.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# {}\n{}\n", self.units, self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let units = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::SchemaMismatch("missing units header".into()))?
            .to_string();
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::SchemaMismatch("missing column header".into()))?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (ln, l) in lines.enumerate() {
            if l.is_empty() {
                continue;
            }
            let r: std::result::Result<Vec<f64>, _> = l.split(',').map(str::parse::<f64>).collect();
            let r = r.map_err(|e| Error::SchemaMismatch(format!("row {}: {e}", ln + 1)))?;
            if r.len() != columns.len() {
                return Err(Error::SchemaMismatch(format!("row {} has {} cells, expected {}", ln + 1, r.len(), columns.len())));
            }
            rows.push(r);
        }
        Ok(Table { units, columns, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub case: String,
    pub strategy: String,
    pub alignment: String,
    pub p: usize,
    pub n_per_face: usize,
    pub h: f64,
    pub dt: f64,
    pub t_final: f64,
    pub dof: usize,
    pub wall_time_s: f64,
    pub time_unit: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub time: f64,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
    pub mass_rel_err: Option<f64>,
    pub energy_rel_err: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub metadata: Metadata,
    pub records: Vec<Record>,
}

const VALUE_COLUMNS: [&str; 4] = ["l2", "linf", "mass_rel_err", "energy_rel_err"];

impl DiagnosticsSeries {
    pub fn new(metadata: Metadata) -> Self {
        DiagnosticsSeries { metadata, records: Vec::new() }
    }

    pub fn push(&mut self, r: Record) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(r.time > last.time) {
                return Err(Error::InvalidInput(format!("record time {} not after {}", r.time, last.time)));
            }
        }
        for v in [r.l2, r.linf, r.mass_rel_err, r.energy_rel_err].into_iter().flatten() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!("invalid error value {v} at t = {}", r.time)));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    fn get(r: &Record, c: usize) -> Option<f64> {
        [r.l2, r.linf, r.mass_rel_err, r.energy_rel_err][c]
    }

    pub fn to_table(&self) -> Table {
        let present: Vec<usize> = (0..4).filter(|&c| self.records.iter().any(|r| Self::get(r, c).is_some())).collect();
        let mut cols = vec!["time"];
        cols.extend(present.iter().map(|&c| VALUE_COLUMNS[c]));
        let unit = if self.metadata.time_unit.is_empty() { "dimensionless" } else { &self.metadata.time_unit };
        let mut t = Table::new(format!("time in {unit}; errors dimensionless"), &cols);
        for r in &self.records {
            let mut row = vec![r.time];
            row.extend(present.iter().map(|&c| Self::get(r, c).unwrap_or(f64::NAN)));
            t.push(row);
        }
        t
    }

    pub fn from_table(t: &Table, metadata: Metadata) -> Result<Self> {
        if t.columns.first().map(String::as_str) != Some("time") {
            return Err(Error::SchemaMismatch("first column must be time".into()));
        }
        let idx: Vec<usize> = t.columns[1..]
            .iter()
            .map(|c| VALUE_COLUMNS.iter().position(|v| v == c).ok_or_else(|| Error::SchemaMismatch(format!("unknown column {c}"))))
            .collect::<Result<_>>()?;
        let mut s = DiagnosticsSeries::new(metadata);
        for row in &t.rows {
            let mut r = Record { time: row[0], ..Default::default() };
            for (k, &c) in idx.iter().enumerate() {
                let v = row[k + 1];
                let v = if v.is_nan() { None } else { Some(v) };
                match c {
                    0 => r.l2 = v,
                    1 => r.linf = v,
                    2 => r.mass_rel_err = v,
                    _ => r.energy_rel_err = v,
                }
            }
            s.push(r)?;
        }
        Ok(s)
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.to_table().write(&dir.join(format!("{stem}.csv")))?;
        let f = std::fs::File::create(dir.join(format!("{stem}.json")))?;
        serde_json::to_writer_pretty(f, &self.metadata)?;
        Ok(())
    }

    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let t = Table::read(&dir.join(format!("{stem}.csv")))?;
        let meta: Metadata = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
        Self::from_table(&t, meta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub column: String,
    pub final_a: f64,
    pub final_b: f64,
    pub ratio: f64,
    pub saturated_a: bool,
    pub saturated_b: bool,
}

/// Final-row ratio a/b for every value column, with saturation flags along the key column.
pub fn compare_tables(a: &Table, b: &Table) -> Result<Vec<ComparisonRow>> {
    if a.columns != b.columns {
        return Err(Error::SchemaMismatch(format!("columns {:?} vs {:?}", a.columns, b.columns)));
    }
    let (ra, rb) = match (a.rows.last(), b.rows.last()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::SchemaMismatch("empty table".into())),
    };
    let ka = a.column(&a.columns[0]).unwrap();
    let kb = b.column(&b.columns[0]).unwrap();
    Ok((1..a.columns.len())
        .map(|c| {
            let ca: Vec<f64> = a.rows.iter().map(|r| r[c]).collect();
            let cb: Vec<f64> = b.rows.iter().map(|r| r[c]).collect();
            ComparisonRow {
                column: a.columns[c].clone(),
                final_a: ra[c],
                final_b: rb[c],
                ratio: if ra[c] == rb[c] { 1.0 } else { ra[c] / rb[c] },
                saturated_a: is_saturated(&ka, &ca),
                saturated_b: is_saturated(&kb, &cb),
            }
        })
        .collect())
}
