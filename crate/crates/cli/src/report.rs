use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
    } else {
        Value::String(format!("{x}"))
    }
}

#[derive(Debug, Clone)]
pub struct Record {
    pub name: String,
    pub anchor: &'static str,
    pub status: Status,
    pub values: Map<String, Value>,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: &'static str, status: Status) -> Self {
        Record { name: name.into(), anchor, status, values: Map::new(), residual: None, tolerance: None }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.into(), num(v));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.values.insert(key.into(), Value::String(v.into()));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.values.insert(key.into(), Value::from(v));
        self
    }

    pub fn residual(mut self, r: f64, tol: f64) -> Self {
        self.residual = Some(r);
        self.tolerance = Some(tol);
        self
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("anchor".into(), Value::String(self.anchor.into()));
        m.insert("status".into(), Value::String(self.status.as_str().into()));
        m.insert("values".into(), Value::Object(self.values.clone()));
        m.insert("residual".into(), self.residual.map_or(Value::Null, num));
        m.insert("tolerance".into(), self.tolerance.map_or(Value::Null, num));
        Value::Object(m)
    }
}

/// A plot-ready table emitted as CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

pub struct Report {
    pub command: Value,
    pub records: Vec<Record>,
    pub table: Option<Table>,
    pub elapsed_ms: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut records = self.records.clone();
        records.sort_by(|a, b| a.name.cmp(&b.name));
        let mut m = Map::new();
        m.insert("schema".into(), Value::from(1));
        m.insert("tool".into(), Value::String(format!("rellich {}", env!("CARGO_PKG_VERSION"))));
        m.insert("command".into(), self.command.clone());
        m.insert("passed".into(), Value::Bool(self.passed()));
        m.insert("records".into(), Value::Array(records.iter().map(Record::to_json).collect()));
        if let Some(ms) = self.elapsed_ms {
            let mut t = Map::new();
            t.insert("elapsed_ms".into(), num(ms));
            m.insert("timing".into(), Value::Object(t));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("report serialises");
        s.push('\n');
        s
    }
}
