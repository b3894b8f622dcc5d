use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "json-lines" | "jsonl" => Ok(Format::Json),
            "table" | "pretty" | "pretty-table" => Ok(Format::Table),
            other => Err(format!("unknown format `{other}` (csv, json, table)")),
        }
    }
}

/// One output row; field order is the column order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(&'static str, Value)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.0.push((key, v.into()));
        self
    }

    pub fn num(self, key: &'static str, x: Option<f64>) -> Self {
        let v = match x {
            Some(x) if x.is_finite() => Value::from(x),
            Some(x) => Value::from(x.to_string()),
            None => Value::Null,
        };
        self.with(key, v)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `records` under the given column list; missing fields are blank.
pub fn write(out: &mut dyn Write, format: Format, columns: &[&str], records: &[Record]) -> io::Result<()> {
    let row = |r: &Record| -> Vec<String> { columns.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect() };
    match format {
        Format::Csv => {
            writeln!(out, "{}", columns.join(","))?;
            for r in records {
                let cells: Vec<String> = row(r).iter().map(|c| csv_quote(c)).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            for r in records {
                let mut m = Map::new();
                for c in columns {
                    m.insert((*c).to_string(), r.get(c).cloned().unwrap_or(Value::Null));
                }
                writeln!(out, "{}", Value::Object(m))?;
            }
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = records.iter().map(row).collect();
            let widths: Vec<usize> = columns
                .iter()
                .enumerate()
                .map(|(j, c)| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0).max(c.len()))
                .collect();
            let line = |cells: Vec<String>| -> String {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
                padded.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(columns.iter().map(|c| c.to_string()).collect()))?;
            writeln!(out, "{}", line(widths.iter().map(|w| "-".repeat(*w)).collect()))?;
            for r in rows {
                writeln!(out, "{}", line(r))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(f: Format) -> String {
        let recs = [Record::new().with("a", "x, y").num("b", Some(0.5)), Record::new().with("a", "z").num("b", None)];
        let mut buf = Vec::new();
        write(&mut buf, f, &["a", "b"], &recs).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn formats() {
        assert_eq!(render(Format::Csv), "a,b\n\"x, y\",0.5\nz,\n");
        assert_eq!(render(Format::Json), "{\"a\":\"x, y\",\"b\":0.5}\n{\"a\":\"z\",\"b\":null}\n");
        assert_eq!(render(Format::Table), "a     b\n----  ---\nx, y  0.5\nz\n");
    }
}
