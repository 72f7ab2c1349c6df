use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::CliError;

/// Column names, in output order.
pub const COLUMNS: [&str; 23] = [
    "arch",
    "link",
    "metric",
    "method",
    "swept_var",
    "swept_value",
    "R",
    "lambda",
    "m_b",
    "m_u",
    "gamma",
    "alpha1",
    "alpha2",
    "p_b",
    "p_u",
    "sigma_n2_db",
    "sigma_l2_db",
    "suppression",
    "nearest_bs_mode",
    "value",
    "uncertainty",
    "trials",
    "seed",
];

/// One evaluated point. Everything needed to rerun it is in the row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub arch: String,
    /// `uplink`, `downlink`, or `sum` for sum-rate rows.
    pub link: String,
    pub metric: String,
    pub method: String,
    pub swept_var: Option<String>,
    pub swept_value: Option<f64>,
    pub rate: f64,
    pub lambda: f64,
    pub m_b: u32,
    pub m_u: u32,
    pub gamma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub p_b: f64,
    pub p_u: f64,
    pub sigma_n2_db: f64,
    pub sigma_l2_db: f64,
    pub suppression: String,
    pub nearest_bs_mode: String,
    /// NaN when the evaluation failed.
    pub value: f64,
    pub uncertainty: f64,
    /// Simulation rows only.
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub error: Option<String>,
}

enum Field {
    Text(String),
    Float(f64),
    Int(u64),
    Empty,
}

impl Row {
    fn fields(&self) -> [Field; 23] {
        use Field::*;
        let opt_f = |v: Option<f64>| v.map_or(Empty, Float);
        let opt_i = |v: Option<u64>| v.map_or(Empty, Int);
        [
            Text(self.arch.clone()),
            Text(self.link.clone()),
            Text(self.metric.clone()),
            Text(self.method.clone()),
            self.swept_var.clone().map_or(Empty, Text),
            opt_f(self.swept_value),
            Float(self.rate),
            Float(self.lambda),
            Int(self.m_b.into()),
            Int(self.m_u.into()),
            Float(self.gamma),
            Float(self.alpha1),
            Float(self.alpha2),
            Float(self.p_b),
            Float(self.p_u),
            Float(self.sigma_n2_db),
            Float(self.sigma_l2_db),
            Text(self.suppression.clone()),
            Text(self.nearest_bs_mode.clone()),
            Float(self.value),
            Float(self.uncertainty),
            opt_i(self.trials),
            opt_i(self.seed),
        ]
    }
}

/// Writes the table as CSV. Floats use the shortest decimal that parses back
/// to the same value.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.fields().iter().map(|f| match f {
            Field::Text(s) => s.clone(),
            Field::Float(v) => v.to_string(),
            Field::Int(v) => v.to_string(),
            Field::Empty => String::new(),
        }))?;
    }
    w.flush().map_err(|e| CliError::Io("<output>".into(), e))?;
    Ok(())
}

/// Writes the table as a JSON array of objects keyed by column name.
/// Non-finite floats are written as strings (`"NaN"`, `"-inf"`); failed rows
/// carry an extra `error` field.
pub fn write_json<W: Write>(rows: &[Row], mut out: W) -> Result<(), CliError> {
    let records: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, field) in COLUMNS.iter().zip(row.fields()) {
                let v = match field {
                    Field::Text(s) => Value::String(s),
                    Field::Float(v) => Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number),
                    Field::Int(v) => Value::Number(v.into()),
                    Field::Empty => Value::Null,
                };
                obj.insert((*name).to_owned(), v);
            }
            if let Some(e) = &row.error {
                obj.insert("error".into(), Value::String(e.clone()));
            }
            Value::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &records)?;
    writeln!(out).map_err(|e| CliError::Io("<output>".into(), e))?;
    Ok(())
}
