//! Pass/fail/inconclusive outcomes, each tied to the modulus it holds at.

use std::fmt;

use serde::Serialize;

use crate::error::Error;
use crate::series::Modulus;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Inconclusive(String),
}

impl Outcome {
    pub fn from_bool(ok: bool, why: impl Into<String>) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(why.into())
        }
    }

    /// Errors that only reflect missing precision become `Inconclusive`;
    /// anything else is a failure.
    pub fn from_error(err: &Error) -> Self {
        if err.is_precision_limited() {
            Outcome::Inconclusive(err.to_string())
        } else {
            Outcome::Fail(err.to_string())
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail(_) => "fail",
            Outcome::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn detail(&self) -> Option<&str> {
        match self {
            Outcome::Pass => None,
            Outcome::Fail(s) | Outcome::Inconclusive(s) => Some(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    pub modulus: Modulus,
}

impl Check {
    pub fn new(name: impl Into<String>, outcome: Outcome, modulus: Modulus) -> Self {
        Check { name: name.into(), outcome, modulus }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {}", self.name, self.outcome.label(), self.modulus)?;
        if let Some(d) = self.outcome.detail() {
            write!(f, " [{d}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.outcome == Outcome::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| matches!(c.outcome, Outcome::Fail(_)))
    }

    pub fn is_conclusive(&self) -> bool {
        !self.checks.iter().any(|c| matches!(c.outcome, Outcome::Inconclusive(_)))
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| matches!(c.outcome, Outcome::Fail(_)))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn modulus(&self) -> Option<Modulus> {
        self.checks.iter().map(|c| c.modulus.clone()).reduce(|a, b| a.meet(&b))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a str>,
    modulus: String,
}

impl Serialize for Check {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CheckJson {
            name: &self.name,
            outcome: self.outcome.label(),
            detail: self.outcome.detail(),
            modulus: self.modulus.to_string(),
        }
        .serialize(s)
    }
}

impl Serialize for Report {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.checks.serialize(s)
    }
}
