//! Machine-readable outcome of one command.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::io::VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Refused,
}

impl Status {
    /// 0 ok, 1 fail, 2 refused.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Fail => 1,
            Status::Refused => 2,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Refused => "refused",
        })
    }
}

/// The exceeded enumeration bound of a refused run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refusal {
    pub needed: String,
    pub budget: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: Vec<String>,
    pub status: Status,
    pub payload: serde_json::Value,
    pub transcript: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refused: Option<Refusal>,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            version: VERSION.to_string(),
            command,
            status: Status::Ok,
            payload: serde_json::Value::Null,
            transcript: Vec::new(),
            error: None,
            refused: None,
        }
    }

    pub fn check(&mut self, line: impl Into<String>) {
        self.transcript.push(line.into());
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.status = Status::Fail;
        self.error = Some(why.into());
    }

    /// Budget overruns become `refused`, every other error `fail`.
    pub fn absorb(&mut self, err: &Error) {
        match err {
            Error::BudgetExceeded { needed, budget } => {
                self.status = Status::Refused;
                self.error = Some(err.to_string());
                self.refused = Some(Refusal {
                    needed: needed.to_string(),
                    budget: budget.to_string(),
                });
            }
            _ => self.fail(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }
}
