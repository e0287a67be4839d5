use std::io::Write;
use std::path::Path;

use anyhow::Context;
use chrono::{SecondsFormat, Utc};
use fracdirac_core::VerificationReport;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON emitted by every subcommand.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    pub timestamp: String,
    pub reports: Vec<VerificationReport>,
    pub overall_pass: bool,
}

impl ReportDocument {
    pub fn new(command: String, reports: Vec<VerificationReport>) -> Self {
        let overall_pass = reports.iter().all(|r| r.pass);
        Self {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            reports,
            overall_pass,
        }
    }

    pub fn emit(&self, out: Option<&Path>) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        match out {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("cannot write report to {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

/// Folds several reports of one kind into a single report whose cases are
/// the members' maxima.
pub fn combine(
    name: &str,
    params: std::collections::BTreeMap<String, serde_json::Value>,
    tolerance: f64,
    members: Vec<(String, VerificationReport)>,
) -> VerificationReport {
    let cases = members
        .into_iter()
        .map(|(label, r)| {
            fracdirac_core::CaseRecord::new(label, r.max_residual)
                .with_detail(serde_json::to_value(&r.params).unwrap_or_default())
        })
        .collect();
    VerificationReport::from_cases(name, params, tolerance, cases)
}
