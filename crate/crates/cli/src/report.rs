//! Report files: `report.json` and `report.csv` carry the same number strings.

use std::io::Write;
use std::path::Path;

use majorant_core::majorant::TimeParam;
use majorant_core::MajorantReport;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::Config;
use crate::error::{CliError, CliResult};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `f64` written with [`fmt_f64`]; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(fmt_f64(self.0)).expect("formatted float is valid JSON").serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ParamOut {
    Constant(Num),
    Nodes(Vec<Num>),
}

impl From<&TimeParam<f64>> for ParamOut {
    fn from(p: &TimeParam<f64>) -> Self {
        match p {
            TimeParam::Constant(v) => ParamOut::Constant(Num(*v)),
            TimeParam::Nodes(v) => ParamOut::Nodes(v.iter().copied().map(Num).collect()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub precision: &'static str,
    pub config: Config,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub theorem: &'static str,
    pub optimize: String,
    pub gamma: ParamOut,
    pub rho: ParamOut,
    pub zero_term_variant: &'static str,
    pub zero_term: Num,
    pub abs_coupling: bool,
    pub cg_iterations: usize,
    pub energy_scale: Num,
    pub final_bound: Num,
    pub dominates: Option<bool>,
    pub worst_relative_margin: Option<Num>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub t: Num,
    pub true_n: Option<Num>,
    #[serde(rename = "true_N")]
    pub true_big_n: Option<Num>,
    pub bound_b: Num,
    #[serde(rename = "bound_B")]
    pub bound_big_b: Num,
    pub efficiency: Option<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub metadata: Metadata,
    pub summary: Summary,
    pub rows: Vec<Row>,
}

pub const CSV_HEADER: &str = "t,true_n,true_N,bound_b,bound_B,efficiency";

impl ReportFile {
    pub fn new(config: &Config, optimize: &str, r: &MajorantReport<f64>) -> Self {
        let at = |v: &Option<Vec<f64>>, k: usize| v.as_ref().map(|v| Num(v[k]));
        let rows = (0..r.times.len())
            .map(|k| Row {
                t: Num(r.times[k]),
                true_n: at(&r.true_n, k),
                true_big_n: at(&r.true_big_n, k),
                bound_b: Num(r.bound_b[k]),
                bound_big_b: Num(r.bound_big_b[k]),
                efficiency: r.efficiency.as_ref().and_then(|e| e[k]).map(Num),
            })
            .collect();
        ReportFile {
            metadata: Metadata {
                tool: "majorant",
                version: env!("CARGO_PKG_VERSION"),
                command: "certify",
                precision: "f64",
                config: config.clone(),
            },
            summary: Summary {
                theorem: r.theorem.key(),
                optimize: optimize.to_string(),
                gamma: (&r.params.gamma).into(),
                rho: (&r.params.rho).into(),
                zero_term_variant: r.params.zero_term.key(),
                zero_term: Num(r.zero_term),
                abs_coupling: r.params.abs_coupling,
                cg_iterations: r.cg_iterations,
                energy_scale: Num(r.energy_scale),
                final_bound: Num(r.final_bound()),
                dominates: r.dominates(),
                worst_relative_margin: r.worst_relative_margin().map(Num),
                warnings: r.warnings.clone(),
            },
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: Option<Num>| match v {
            Some(Num(x)) if x.is_finite() => fmt_f64(x),
            Some(Num(x)) => x.to_string(),
            None => String::new(),
        };
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells = [Some(r.t), r.true_n, r.true_big_n, Some(r.bound_b), Some(r.bound_big_b), r.efficiency];
            out.push_str(&cells.map(cell).join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for v in [0.0, -1.5e-300, std::f64::consts::PI, 1.0 / 3.0, f64::MAX, 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(serde_json::to_string(&Num(0.5)).unwrap(), "5.0000000000000000e-1");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
        let parsed: f64 = serde_json::from_str(&serde_json::to_string(&Num(0.1)).unwrap()).unwrap();
        assert_eq!(parsed, 0.1);
    }
}
