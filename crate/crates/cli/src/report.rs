//! Self-describing JSON report envelope.
//!
//! Reports echo their inputs, the α grid, tolerances and seeds so that any
//! table can be regenerated without rerunning the computation. α values
//! are serialized as strings ("0", "0.5", "1", "inf") to avoid float-key
//! ambiguity; infinite divergences appear as the string "inf".

use serde::Serialize;
use serde_json::{json, Value};
use thermocoh::divergences::{Alpha, AlphaGrid, Delta, ExtendedReal};
use thermocoh::thermalops::MonotoneReport;

#[derive(Serialize)]
pub struct Envelope {
    pub command: String,
    pub versions: Versions,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Value,
    pub result: Value,
    pub verdict: String,
}

#[derive(Serialize)]
pub struct Versions {
    pub thermocoh: &'static str,
    pub cli: &'static str,
}

impl Envelope {
    pub fn new(command: &str, tolerance: f64) -> Self {
        Self {
            command: command.to_string(),
            versions: Versions {
                thermocoh: thermocoh_version(),
                cli: env!("CARGO_PKG_VERSION"),
            },
            tolerance,
            alpha_grid: None,
            seed: None,
            inputs: Value::Null,
            result: Value::Null,
            verdict: String::new(),
        }
    }

    pub fn with_grid(mut self, grid: &AlphaGrid) -> Self {
        self.alpha_grid = Some(grid.iter().map(|a| a.to_string()).collect());
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

pub fn thermocoh_version() -> &'static str {
    // The library crate shares the workspace version with this binary.
    env!("CARGO_PKG_VERSION")
}

pub fn extended_real_value(x: &ExtendedReal) -> Value {
    match x {
        ExtendedReal::Finite(v) => json!(v),
        ExtendedReal::Infinity => json!("inf"),
    }
}

pub fn delta_value(d: &Delta) -> Value {
    match d {
        Delta::Finite(v) => json!(v),
        Delta::PlusInfinity => json!("inf"),
        Delta::MinusInfinity => json!("-inf"),
        Delta::Indeterminate => json!("indeterminate"),
    }
}

pub fn alpha_table(entries: &[(Alpha, ExtendedReal)]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|(alpha, value)| {
                json!({
                    "alpha": alpha.to_string(),
                    "value": extended_real_value(value),
                })
            })
            .collect(),
    )
}

pub fn monotone_report_value(report: &MonotoneReport) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "alpha": e.alpha.to_string(),
                "delta_f": delta_value(&e.delta_f),
                "delta_a": delta_value(&e.delta_a),
            })
        })
        .collect();
    let (f_bad, a_bad) = report.violating_alphas();
    json!({
        "entries": entries,
        "tolerance": report.tolerance,
        "verdict": report.verdict.to_string(),
        "violating_alphas": {
            "delta_f": f_bad.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "delta_a": a_bad.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        },
    })
}
