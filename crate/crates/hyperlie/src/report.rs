//! Machine-readable report documents emitted by the command-line interface.
//!
//! Serialization is deterministic: field order is fixed by the struct
//! declarations and floats go through serde_json's shortest-round-trip
//! formatting, so two runs with identical seeds and tolerances produce
//! byte-identical output.

use serde::Serialize;

use crate::verify::{CheckRecord, VerifyConfig};

pub const SCHEMA: &str = "hyperlie.report.v1";

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub fd_step: Option<f64>,
    pub step: f64,
    pub t_total: f64,
}

impl From<&VerifyConfig> for Environment {
    fn from(cfg: &VerifyConfig) -> Self {
        Environment {
            seed: cfg.seed,
            fd_step: cfg.fd_step,
            step: cfg.step,
            t_total: cfg.t_total,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub command: String,
    pub parameters: serde_json::Value,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl ReportDocument {
    pub fn new(
        command: &str,
        parameters: serde_json::Value,
        cfg: &VerifyConfig,
        checks: Vec<CheckRecord>,
    ) -> Self {
        let passed = crate::verify::all_passed(&checks);
        ReportDocument {
            schema: SCHEMA,
            command: command.to_string(),
            parameters,
            environment: Environment::from(cfg),
            checks,
            passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
