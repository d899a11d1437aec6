//! CSV and JSON writers.

use std::io::Write;

use serde_json::{json, Map};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Num)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

/// 17 significant digits, enough to round-trip an f64.
fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Num(x) => fmt_num(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::List(xs) => xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(";"),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        let num = |x: f64| serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number);
        match self {
            Value::Num(x) => num(*x),
            Value::Int(n) => json!(n),
            Value::Bool(b) => json!(b),
            Value::Text(s) => json!(s),
            Value::List(xs) => serde_json::Value::Array(xs.iter().map(|&x| num(x)).collect()),
            Value::Missing => serde_json::Value::Null,
        }
    }
}

/// Rows in grid order under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Written as a bare JSON object rather than an array of one.
    pub record: bool,
}

impl Table {
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (name, v) in self.columns.iter().zip(row) {
                    m.insert(name.to_string(), v.json());
                }
                serde_json::Value::Object(m)
            })
            .collect();
        match (self.record, objects.len()) {
            (true, 1) => objects.into_iter().next().unwrap_or_default(),
            _ => serde_json::Value::Array(objects),
        }
    }

    pub fn write_json(&self, w: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, &self.to_json())?;
        writeln!(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let x = 0.1 + 0.2;
        let t = Table {
            columns: vec!["x", "note", "list"],
            rows: vec![vec![Value::Num(x), Value::Missing, Value::List(vec![1.0, -2.5])]],
            record: false,
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cell = text.lines().nth(1).unwrap().split(',').next().unwrap();
        assert_eq!(cell.parse::<f64>().unwrap(), x);
        assert!(text.ends_with(",,1.0000000000000000e0;-2.5000000000000000e0\n"));
    }

    #[test]
    fn json_record_is_an_object() {
        let t = Table {
            columns: vec!["a"],
            rows: vec![vec![Value::Num(f64::NAN)]],
            record: true,
        };
        assert_eq!(t.to_json(), json!({"a": null}));
    }
}
