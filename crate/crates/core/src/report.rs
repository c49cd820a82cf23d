//! Tabular run output: `#`-prefixed `key=value` metadata followed by CSV, or
//! the same content as a JSON document.

use std::io::Write;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl Cell {
    /// 17 significant digits, enough to round-trip any `f64`.
    pub fn to_csv_field(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl RunReport {
    pub fn new(columns: Vec<&'static str>) -> Self {
        RunReport {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the column list"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// All values of a column, `None` where the cell is not numeric.
    pub fn numbers(&self, name: &str) -> Vec<Option<f64>> {
        let idx = self
            .column(name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    pub fn texts(&self, name: &str) -> Vec<String> {
        let idx = self
            .column(name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[idx].to_csv_field()).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        json!({
            "metadata": metadata,
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)
            }
        }
    }

    /// CSV body without the metadata block.
    pub fn data_csv(&self) -> String {
        let mut buf = Vec::new();
        RunReport {
            metadata: Vec::new(),
            ..self.clone()
        }
        .write_csv(&mut buf)
        .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = RunReport::new(vec!["x", "regime", "flag", "gap"]);
        r.metadata.push(("tool".into(), "relmachine".into()));
        r.push_row(vec![0.1.into(), "Engine".into(), true.into(), None.into()]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# tool=relmachine\nx,regime,flag,gap\n1.0000000000000001e-1,Engine,true,\n"
        );
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_layout() {
        let mut r = RunReport::new(vec!["x", "y"]);
        r.push_row(vec![2.0.into(), Cell::Missing]);
        let v = r.to_json();
        assert_eq!(v["columns"], json!(["x", "y"]));
        assert_eq!(v["rows"][0], json!([2.0, null]));
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn row_width_checked() {
        RunReport::new(vec!["x"]).push_row(vec![]);
    }
}
