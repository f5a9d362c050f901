//! Machine-readable check reports: deterministic JSON and CSV.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        })
    }
}

/// One check: what was compared, against what, and how closely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Parameters of this instance, e.g. `n=1 a=6.28318530718e0`.
    pub parameters: String,
    /// The statement being checked, as a formula.
    pub formula: String,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
}

impl CheckRecord {
    /// Numeric comparison `|actual − expected| ≤ tolerance`.
    pub fn numeric(name: &str, parameters: &str, formula: &str, actual: f64, expected: f64, tolerance: f64) -> Self {
        let ok = (actual - expected).abs() <= tolerance;
        Self {
            name: name.into(),
            parameters: parameters.into(),
            formula: formula.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: fmt_float(expected),
            actual: fmt_float(actual),
            tolerance: fmt_float(tolerance),
        }
    }

    /// A defect that must not exceed `tolerance`.
    pub fn bound(name: &str, parameters: &str, formula: &str, defect: f64, tolerance: f64) -> Self {
        let ok = defect <= tolerance;
        Self {
            name: name.into(),
            parameters: parameters.into(),
            formula: formula.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: format!("<= {}", fmt_float(tolerance)),
            actual: fmt_float(defect),
            tolerance: fmt_float(tolerance),
        }
    }

    /// Exact comparison of two rendered values.
    pub fn exact(name: &str, parameters: &str, formula: &str, actual: &str, expected: &str) -> Self {
        Self {
            name: name.into(),
            parameters: parameters.into(),
            formula: formula.into(),
            status: if actual == expected { Status::Pass } else { Status::Fail },
            expected: expected.into(),
            actual: actual.into(),
            tolerance: "exact".into(),
        }
    }

    pub fn failure(name: &str, parameters: &str, formula: &str, message: &str) -> Self {
        Self {
            name: name.into(),
            parameters: parameters.into(),
            formula: formula.into(),
            status: Status::Fail,
            expected: String::new(),
            actual: message.into(),
            tolerance: String::new(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }
}

/// Report of one command run. Field order is fixed, floats use
/// [`fmt_float`], and the configuration echo is sorted by key, so identical
/// inputs give byte-identical documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub ruleset_hash: String,
    pub checks: Vec<CheckRecord>,
    pub status: Status,
}

impl ReportDocument {
    pub fn new(command: &str, config: BTreeMap<String, String>, ruleset_hash: &str, checks: Vec<CheckRecord>) -> Self {
        let status = overall(&checks);
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            ruleset_hash: ruleset_hash.into(),
            checks,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check-name", "parameter-string", "measured", "expected", "tolerance", "pass"])?;
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                c.parameters.as_str(),
                c.actual.as_str(),
                c.expected.as_str(),
                c.tolerance.as_str(),
                if c.status == Status::Pass { "true" } else { "false" },
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Overall status: FAIL if any check fails, else WARN if any warns.
pub fn overall(checks: &[CheckRecord]) -> Status {
    if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else if checks.iter().any(|c| c.status == Status::Warn) {
        Status::Warn
    } else {
        Status::Pass
    }
}

/// Locale-independent scientific notation with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed() {
        assert_eq!(fmt_float(4.0 * std::f64::consts::PI), "1.25663706144e1");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
        assert_eq!(fmt_float(-1e-9), "-1.00000000000e-9");
    }

    #[test]
    fn overall_status() {
        let pass = CheckRecord::numeric("a", "", "", 1.0, 1.0, 0.0);
        let warn = pass.clone().with_status(Status::Warn);
        let fail = CheckRecord::bound("b", "", "", 2.0, 1.0);
        assert_eq!(overall(std::slice::from_ref(&pass)), Status::Pass);
        assert_eq!(overall(&[pass.clone(), warn.clone()]), Status::Warn);
        assert_eq!(overall(&[warn, fail, pass]), Status::Fail);
    }

    #[test]
    fn json_and_csv_are_deterministic() {
        let mut cfg = BTreeMap::new();
        cfg.insert("n".to_string(), "1".to_string());
        let checks = vec![CheckRecord::exact("x, y", "n=1", "a = b", "1", "1")];
        let a = ReportDocument::new("demo", cfg.clone(), "abc", checks.clone());
        let b = ReportDocument::new("demo", cfg, "abc", checks);
        assert_eq!(a.to_json(), b.to_json());
        let back: ReportDocument = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with("check-name,parameter-string,measured,expected,tolerance,pass\n"));
        assert!(csv.contains("\"x, y\",n=1,1,1,exact,true"));
    }
}
