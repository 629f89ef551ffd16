//! Machine-readable check reports. Every numeric carries its threshold;
//! a report passes exactly when every check does. Wall times are filled in
//! only on request so that default JSON output is byte-identical across
//! runs with the same seed and flags.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_seconds: Option<f64>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Report {
        Report {
            command: command.into(),
            config,
            checks: Vec::new(),
            pass: true,
            total_seconds: None,
        }
    }

    /// Record a residual-vs-threshold check (pass when residual <= threshold).
    pub fn check(&mut self, name: impl Into<String>, residual: f64, threshold: f64) -> bool {
        let pass = residual <= threshold && residual.is_finite();
        self.checks.push(Check {
            name: name.into(),
            residual,
            threshold,
            pass,
            seconds: None,
        });
        self.pass &= pass;
        pass
    }

    /// Record an exact-count check as |got - expected| against 0.5.
    pub fn check_count(&mut self, name: impl Into<String>, got: usize, expected: usize) -> bool {
        let residual = (got as f64 - expected as f64).abs();
        self.check(name, residual, 0.5)
    }

    pub fn set_last_seconds(&mut self, seconds: f64) {
        if let Some(last) = self.checks.last_mut() {
            last.seconds = Some(seconds);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable table, one line per check.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        out.push_str(&format!("report: {}\n", self.command));
        for c in &self.checks {
            let time = c
                .seconds
                .map(|s| format!("  [{s:7.3}s]"))
                .unwrap_or_default();
            out.push_str(&format!(
                "  {:<width$}  residual {:>12.3e}  threshold {:>9.1e}  {}{}\n",
                c.name,
                c.residual,
                c.threshold,
                if c.pass { "PASS" } else { "FAIL" },
                time,
            ));
        }
        out.push_str(&format!(
            "overall: {} ({}/{} checks)\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        ));
        out
    }
}
