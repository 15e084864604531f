use std::io::Write;

use serde_json::{json, Map, Value as Json};

/// One output cell: a number, one of the two sentinels, or a label.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    /// `+inf`, e.g. the saturated Zeno decay rate or the stationary limit.
    Inf,
    /// Quantity undefined at this grid point (such as a `jm` pair for n = 3).
    NotApplicable,
    /// Bare label such as a check name; never contains a comma.
    Text(String),
}

impl Value {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Value::Inf
        } else if x.is_finite() {
            Value::Num(x)
        } else {
            Value::NotApplicable
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Num(x) => Some(*x),
            Value::Inf => Some(f64::INFINITY),
            Value::NotApplicable | Value::Text(_) => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Num(x) => ryu::Buffer::new().format_finite(*x).to_owned(),
            Value::Inf => "inf".to_owned(),
            Value::NotApplicable => "na".to_owned(),
            Value::Text(t) => t.clone(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Int(i) => json!(i),
            Value::Num(x) => json!(x),
            Value::Text(t) => json!(t),
            Value::Inf => json!("inf"),
            Value::NotApplicable => json!("na"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of a column, in row order.
    pub fn column_values(&self, name: &str) -> Option<Vec<Value>> {
        let idx = self.column(name)?;
        Some(self.rows.iter().map(|r| r[idx].clone()).collect())
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Value::render).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Array(r.iter().map(|v| v.to_json()).collect()))
            .collect();
        let mut map = Map::new();
        map.insert("columns".into(), json!(self.columns));
        map.insert("rows".into(), Json::Array(rows));
        Json::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(Value::Num(0.5).render(), "0.5");
        assert_eq!(Value::Num(1.0).render(), "1.0");
        assert_eq!(Value::Num(1e-20).render(), "1e-20");
        assert_eq!(Value::Int(12).render(), "12");
        assert_eq!(Value::from_f64(f64::INFINITY).render(), "inf");
        assert_eq!(Value::from_f64(f64::NAN).render(), "na");
        let x = 0.1 + 0.2;
        assert_eq!(Value::Num(x).render().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["tau".into(), "kl".into()]);
        t.rows.push(vec![Value::Num(0.0), Value::Num(1.0)]);
        t.rows.push(vec![Value::Num(0.5), Value::NotApplicable]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tau,kl\n0.0,1.0\n0.5,na\n");
    }
}
