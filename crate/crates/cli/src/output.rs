//! Tabular output shared by every command. CSV numbers carry 17 significant
//! digits so files round-trip exactly; JSON mirrors the same records.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }

    fn to_field(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => format_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(n) => Value::from(*n),
            // non-finite thresholds become null
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File stem, e.g. `rate_points`.
    pub name: &'static str,
    pub headers: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, headers: &'static [&'static str]) -> Self {
        Self {
            name,
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        match format {
            Format::Csv => self.write_csv(&dir.join(format!("{}.csv", self.name))),
            Format::Json => self.write_json(&dir.join(format!("{}.json", self.name))),
        }
    }

    fn write_csv(&self, path: &Path) -> Result<PathBuf, CliError> {
        let err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(err)?;
        w.write_record(self.headers).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field)).map_err(err)?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(path.to_path_buf())
    }

    fn write_json(&self, path: &Path) -> Result<PathBuf, CliError> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), c.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&records).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        text.push('\n');
        std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(path.to_path_buf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.537_866_915_540_515, 1e-300, -4.2e17, 0.0] {
            let s = format_num(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x);
            assert_eq!(format_num(back), s);
        }
        assert_eq!(format_num(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn csv_and_json_written() {
        let dir = std::env::temp_dir().join(format!("gbc-tin-out-{}", std::process::id()));
        let mut t = Table::new("demo", &["a", "b", "c"]);
        t.push(vec![Cell::Int(3), Cell::Num(0.25), Cell::Empty]);
        t.push(vec![Cell::text("x"), Cell::Num(f64::INFINITY), Cell::Bool(true)]);
        let p = t.write(&dir, Format::Csv).unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        assert_eq!(text, "a,b,c\n3,2.5000000000000000e-1,\nx,inf,true\n");
        let p = t.write(&dir, Format::Json).unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v[0]["b"], Value::from(0.25));
        assert_eq!(v[1]["b"], Value::Null);
        std::fs::remove_dir_all(dir).ok();
    }
}
