//! Structured results: a JSON document or one CSV table per run.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl Verdict {
    /// Passes iff `value < limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < limit,
            value,
            limit,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: f64::from(u8::from(passed)),
            limit: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub verdicts: Vec<Verdict>,
    pub result: Value,
    pub table: Table,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let doc = json!({
            "command": self.command,
            "passed": self.passed(),
            "verdicts": self.verdicts,
            "result": self.result,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.headers)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_thresholds_are_strict() {
        assert!(Verdict::below("x", 0.5, 1.0).passed);
        assert!(!Verdict::below("x", 1.0, 1.0).passed);
        assert!(!Verdict::below("x", f64::NAN, 1.0).passed);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut table = Table::new(&["a", "b"]);
        table.push(vec!["1".into(), "2".into()]);
        let r = Report {
            command: "t",
            verdicts: vec![],
            result: Value::Null,
            table,
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2\n");
        assert!(r.passed());
    }
}
