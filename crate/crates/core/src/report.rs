//! Report rendering: deterministic JSON and human-readable text.

use serde::Serialize;
use serde_json::Value;

use crate::interpret::CheckReport;

/// Wraps a check report with run metadata; serialization is deterministic
/// for a fixed seed and configuration.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub model: String,
    pub presentation: Option<String>,
    pub seed: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckReportOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Equation verdicts without timing, so reports are byte-stable.
#[derive(Debug, Serialize)]
pub struct CheckReportOut {
    pub presentation: String,
    pub equations: Vec<VerdictOut>,
    pub semantic: Vec<VerdictOut>,
}

#[derive(Debug, Serialize)]
pub struct VerdictOut {
    pub label: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

pub fn strip_timing(r: &CheckReport) -> CheckReportOut {
    let conv = |v: &crate::interpret::EquationVerdict| VerdictOut {
        label: v.label.clone(),
        verdict: v.verdict.clone(),
        witness: v.witness.clone(),
    };
    CheckReportOut {
        presentation: r.presentation.clone(),
        equations: r.equations.iter().map(conv).collect(),
        semantic: r.semantic.iter().map(conv).collect(),
    }
}

pub fn render_text(r: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("== {} on {} ==\n", r.command, r.model));
    if let Some(c) = &r.check {
        out.push_str(&format!("presentation: {}\n", c.presentation));
        for v in c.equations.iter().chain(c.semantic.iter()) {
            out.push_str(&format!("  [{}] {}\n", if v.verdict == "pass" { "ok" } else { "FAIL" }, v.label));
            if let Some(w) = &v.witness {
                out.push_str(&format!("        {w}\n"));
            }
        }
    }
    if let Some(d) = &r.derived {
        out.push_str(&format!("derived: {}\n", serde_json::to_string_pretty(d).unwrap()));
    }
    for w in &r.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out.push_str(if r.passed { "RESULT: pass\n" } else { "RESULT: fail\n" });
    out
}

pub fn render_json(r: &RunReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}
