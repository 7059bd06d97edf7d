use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

/// Normalization tag attached to every JSON object the tool prints. All
/// numeric fields of that object are expressed in the tagged convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Lebesgue `dμ` on `P`, lattice-normalized `dσ` on `∂P` (counting
    /// measure on endpoints for `n = 1`), `(L^n) = n!·vol(P)` and
    /// `(K·L^{n-1}) = -(n-1)!·σ(∂P)`.
    LatticeVolume,
    /// Circle-invariant metrics on `[0, a]`: `∫ω = a`, `s = -π v''`,
    /// `|∂f|² = π v f'²`, momenta are functions of the moment coordinate.
    Cp1Chart,
    /// The Donaldson-type quadratic in `τ` with `M_NA` supplied by the user
    /// and `(L^n)`, `‖·‖²` in the lattice-volume convention.
    DonaldsonQuadratic,
    /// Acceptance results; values are mixed and described by each detail line.
    Acceptance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_f64(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(fmt_f64).collect());
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub struct Report {
    pub convention: Convention,
    pub body: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn new<T: Serialize>(convention: Convention, body: &T) -> Self {
        Report { convention, body: serde_json::to_value(body).expect("serializable output"), table: None }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    pub fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("convention".into(), serde_json::to_value(self.convention).expect("tag"));
        match &self.body {
            Value::Object(o) => m.extend(o.clone()),
            other => {
                m.insert("result".into(), other.clone());
            }
        }
        Value::Object(m)
    }

    /// The explicit table if there is one, otherwise the scalar fields of the
    /// body as a single row.
    fn csv_table(&self) -> Table {
        if let Some(t) = &self.table {
            return Table { header: t.header.clone(), rows: t.rows.clone() };
        }
        let mut t = Table::new(["convention"]);
        let mut row = vec![serde_json::to_value(self.convention).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()];
        if let Value::Object(o) = &self.body {
            for (k, v) in o {
                match v {
                    Value::Number(n) => {
                        t.header.push(k.clone());
                        row.push(n.as_f64().map(fmt_f64).unwrap_or_else(|| n.to_string()));
                    }
                    Value::Bool(b) => {
                        t.header.push(k.clone());
                        row.push(b.to_string());
                    }
                    Value::String(s) => {
                        t.header.push(k.clone());
                        row.push(s.clone());
                    }
                    _ => {}
                }
            }
        }
        t.rows.push(row);
        t
    }

    pub fn emit(&self, format: Format) -> std::io::Result<()> {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.json())?;
                writeln!(out)
            }
            Format::Csv => {
                let t = self.csv_table();
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
        }
    }
}
