//! Machine-readable verification reports.

use serde::Serialize;
use serde_json::Value;

use crate::weyl::FlagSpace;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "CONDITIONAL-PASS")]
    ConditionalPass,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SpaceInfo {
    pub n: usize,
    pub ranks: Vec<usize>,
}

impl From<&FlagSpace> for SpaceInfo {
    fn from(s: &FlagSpace) -> Self {
        SpaceInfo { n: s.n, ranks: s.ranks.clone() }
    }
}

/// Outcome of one verification run. Failed instances are recorded as
/// witnesses; nothing is thrown.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub space: SpaceInfo,
    pub truncation: u32,
    pub status: Status,
    /// True when the numbers rest on an unproven oracle.
    pub conditional: bool,
    /// Number of individual identities compared.
    pub checked: usize,
    pub witnesses: Vec<Value>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    pub config: Value,
}

impl Report {
    pub fn new(check: &str, space: &FlagSpace, truncation: u32) -> Self {
        Report {
            check: check.to_string(),
            space: space.into(),
            truncation,
            status: Status::Pass,
            conditional: false,
            checked: 0,
            witnesses: Vec::new(),
            details: Value::Null,
            config: Value::Null,
        }
    }

    /// Count one comparison; a failure adds its witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.witnesses.push(witness());
        }
    }

    pub fn fail(&mut self, witness: Value) {
        self.checked += 1;
        self.witnesses.push(witness);
    }

    /// Set the status from the witnesses collected so far.
    pub fn finish(mut self, conditional: bool) -> Self {
        self.conditional = conditional;
        self.status = match (self.witnesses.is_empty(), conditional) {
            (false, _) => Status::Fail,
            (true, false) => Status::Pass,
            (true, true) => Status::ConditionalPass,
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
