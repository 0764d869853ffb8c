//! Pass/fail reports produced by the validation routines.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Not evaluated here; the string says why.
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// A counterexample for failures, or a short note.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn pass(&mut self, name: impl ToString) {
        self.checks.push(Check { name: name.to_string(), status: Status::Pass, witness: None });
    }

    pub fn fail(&mut self, name: impl ToString, witness: impl ToString) {
        self.checks.push(Check {
            name: name.to_string(),
            status: Status::Fail,
            witness: Some(witness.to_string()),
        });
    }

    pub fn skip(&mut self, name: impl ToString, reason: impl ToString) {
        self.checks.push(Check {
            name: name.to_string(),
            status: Status::Skipped(reason.to_string()),
            witness: None,
        });
    }

    /// Records a pass when `witness` is `None`, a failure otherwise.
    pub fn record(&mut self, name: impl ToString, witness: Option<String>) {
        match witness {
            None => self.pass(name),
            Some(w) => self.fail(name, w),
        }
    }

    pub fn extend(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = alloc::format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match &c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped(_) => "skip",
            };
            write!(f, "{tag} {}", c.name)?;
            if let Status::Skipped(r) = &c.status {
                write!(f, " ({r})")?;
            }
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
