use std::process::ExitCode;

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// A computation that produced a value.
    Ok,
    Pass,
    /// A mathematically meaningful negative answer.
    Fail,
}

impl Status {
    pub fn from_check(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }

    pub fn exit_code(self) -> ExitCode {
        match self {
            Status::Ok | Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(1),
        }
    }
}

pub struct Report {
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub text: String,
    pub status: Status,
}

impl Report {
    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let value = json!({
                "command": self.command,
                "params": self.params,
                "result": self.result,
                "status": self.status.label(),
            });
            serde_json::to_string_pretty(&value).expect("serializable")
        } else {
            self.text.clone()
        }
    }
}

/// Usage problems exit with 2, computational ones with 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Compute(_) => ExitCode::from(3),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => m,
        }
    }
}
