//! Check outcomes and the aggregate run report shared by every front-end.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply (e.g. a minor order beyond the matrix size).
    Degenerate,
    /// Skipped because its projected size exceeds the configured budget.
    Guarded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub witness: Value,
    pub wall_ms: f64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, status: Status, witness: Value) -> Self {
        CheckReport {
            name: name.into(),
            status,
            witness,
            wall_ms: 0.0,
        }
    }

    pub fn pass(name: impl Into<String>, witness: Value) -> Self {
        Self::new(name, Status::Pass, witness)
    }

    pub fn fail(name: impl Into<String>, witness: Value) -> Self {
        Self::new(name, Status::Fail, witness)
    }

    pub fn guarded(name: impl Into<String>, size: u64, limit: u64) -> Self {
        Self::new(name, Status::Guarded, json!({"size": size, "limit": limit}))
    }

    /// `pass` when `ok`, `fail` otherwise.
    pub fn from_bool(name: impl Into<String>, ok: bool, witness: Value) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, witness)
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Runs `f` and stamps the elapsed time on its report.
pub fn timed(f: impl FnOnce() -> CheckReport) -> CheckReport {
    let start = Instant::now();
    let mut r = f();
    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    r
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub guarded: usize,
    pub degenerate: usize,
}

impl Summary {
    pub fn of(checks: &[CheckReport]) -> Self {
        let mut s = Summary::default();
        for c in checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Guarded => s.guarded += 1,
                Status::Degenerate => s.degenerate += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    pub command: String,
    pub params: Value,
    /// Computed values for commands that produce more than checks.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl RunReport {
    pub fn new(command: impl Into<String>, params: Value, checks: Vec<CheckReport>) -> Self {
        RunReport {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            params,
            result: Value::Null,
            summary: Summary::of(&checks),
            checks,
        }
    }

    pub fn with_result(mut self, result: Value) -> Self {
        self.result = result;
        self
    }

    pub fn ok(&self) -> bool {
        self.summary.fail == 0
    }

    /// JSON with every `wall_ms` zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.wall_ms = 0.0;
        }
        r
    }

    /// `name,status,wall_ms,witness` with the witness as compact JSON.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,status,wall_ms,witness\n");
        for c in &self.checks {
            let status = serde_json::to_value(c.status).expect("status serializes");
            out.push_str(&format!(
                "{},{},{:.3},{}\n",
                csv_field(&c.name),
                status.as_str().unwrap_or_default(),
                c.wall_ms,
                csv_field(&c.witness.to_string())
            ));
        }
        out
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts() {
        let checks = vec![
            CheckReport::pass("a", Value::Null),
            CheckReport::fail("b", json!({"x": 1})),
            CheckReport::guarded("c", 10, 5),
            CheckReport::new("d", Status::Degenerate, Value::Null),
        ];
        let r = RunReport::new("test", Value::Null, checks);
        assert_eq!(
            r.summary,
            Summary {
                pass: 1,
                fail: 1,
                guarded: 1,
                degenerate: 1
            }
        );
        assert!(!r.ok());
        let csv = r.to_csv();
        assert!(csv.contains("b,fail,0.000,\"{\"\"x\"\":1}\""));
    }
}
