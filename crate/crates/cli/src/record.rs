//! One flat record schema for every subcommand, written in grid order.

use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default)]
pub struct Params {
    pub q: Option<f64>,
    pub k: Option<u64>,
    pub t: Option<f64>,
    pub n: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub experiment: String,
    pub params: Params,
    pub extra: Value,
    pub value: f64,
    pub residual: f64,
    pub pass: Option<bool>,
    pub seed: u64,
    pub millis: u128,
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn new(experiment: &str, params: Params, seed: u64) -> Self {
        ResultRecord {
            experiment: experiment.to_string(),
            params,
            extra: Value::Object(Default::default()),
            value: f64::NAN,
            residual: f64::NAN,
            pass: None,
            seed,
            millis: 0,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    #[serde(rename = "Q")]
    q: Option<f64>,
    k: Option<u64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    #[serde(rename = "N")]
    n: Option<f64>,
    extra: String,
    value: f64,
    residual: f64,
    pass: Option<bool>,
    seed: u64,
    millis: u128,
    timestamp: u64,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    experiment: &'a str,
    #[serde(rename = "Q")]
    q: Option<f64>,
    k: Option<u64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    #[serde(rename = "N")]
    n: Option<f64>,
    extra: &'a Value,
    value: Option<f64>,
    residual: Option<f64>,
    pass: Option<bool>,
    seed: u64,
    millis: u128,
    timestamp: u64,
}

pub fn write_records<W: Write>(records: &[ResultRecord], format: Format, w: W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            for r in records {
                out.serialize(CsvRow {
                    experiment: &r.experiment,
                    q: r.params.q,
                    k: r.params.k,
                    t: r.params.t,
                    n: r.params.n,
                    extra: r.extra.to_string(),
                    value: r.value,
                    residual: r.residual,
                    pass: r.pass,
                    seed: r.seed,
                    millis: r.millis,
                    timestamp: r.timestamp,
                })?;
            }
            out.flush()
        }
        Format::Json => {
            let mut w = w;
            let finite = |x: f64| x.is_finite().then_some(x);
            for r in records {
                let row = JsonRow {
                    experiment: &r.experiment,
                    q: r.params.q,
                    k: r.params.k,
                    t: r.params.t,
                    n: r.params.n,
                    extra: &r.extra,
                    value: finite(r.value),
                    residual: finite(r.residual),
                    pass: r.pass,
                    seed: r.seed,
                    millis: r.millis,
                    timestamp: r.timestamp,
                };
                serde_json::to_writer(&mut w, &row)?;
                writeln!(w)?;
            }
            w.flush()
        }
    }
}

/// `x,y` pairs for one figure.
pub fn write_plot<W: Write>(points: &[(f64, f64)], w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y"])?;
    for (x, y) in points {
        out.write_record([x.to_string(), y.to_string()])?;
    }
    out.flush()
}
