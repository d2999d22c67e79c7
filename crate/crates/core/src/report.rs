//! Verification reports.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::matrix::RatMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Detail {
    Int(i64),
    Matrix(RatMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub identity: String,
    pub holds: bool,
}

/// Outcome of one theorem verifier. `passed` is true iff every recorded
/// check holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: BTreeMap<String, Detail>,
}

impl TheoremReport {
    pub fn new(name: impl Into<String>) -> Self {
        TheoremReport {
            name: name.into(),
            passed: true,
            checks: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, identity: impl Into<String>, holds: bool) -> &mut Self {
        self.passed &= holds;
        self.checks.push(Check {
            identity: identity.into(),
            holds,
        });
        self
    }

    pub fn int(&mut self, key: impl Into<String>, value: impl TryInto<i64>) -> &mut Self {
        let value = value
            .try_into()
            .unwrap_or_else(|_| panic!("report value out of range"));
        self.details.insert(key.into(), Detail::Int(value));
        self
    }

    pub fn matrix(&mut self, key: impl Into<String>, value: RatMatrix) -> &mut Self {
        self.details.insert(key.into(), Detail::Matrix(value));
        self
    }

    pub fn get_int(&self, key: &str) -> Option<i64> {
        match self.details.get(key)? {
            Detail::Int(v) => Some(*v),
            Detail::Matrix(_) => None,
        }
    }

    pub fn get_matrix(&self, key: &str) -> Option<&RatMatrix> {
        match self.details.get(key)? {
            Detail::Matrix(m) => Some(m),
            Detail::Int(_) => None,
        }
    }

    /// Identities that failed, for diagnostics.
    pub fn failures(&self) -> impl Iterator<Item = &str> {
        self.checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.identity.as_str())
    }
}
