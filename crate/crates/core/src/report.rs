//! Structured pass/fail evidence for one theorem check on one instance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "verified")]
    Verified,
    #[serde(rename = "hypothesis-not-met")]
    HypothesisNotMet,
    #[serde(rename = "FALSIFIED")]
    Falsified,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::HypothesisNotMet => "hypothesis-not-met",
            Status::Falsified => "FALSIFIED",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hypotheses gate the conclusions: a report is FALSIFIED only when every
/// hypothesis holds and some conclusion fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub instance: BTreeMap<String, Value>,
    pub hypotheses: Vec<Check>,
    pub conclusions: Vec<Check>,
    /// Facts computed for context; they never affect the status.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_descriptor: Option<String>,
    pub status: Status,
}

impl TheoremReport {
    pub fn new(theorem: &str) -> Self {
        TheoremReport {
            theorem: theorem.to_string(),
            instance: BTreeMap::new(),
            hypotheses: Vec::new(),
            conclusions: Vec::new(),
            observations: Vec::new(),
            notes: Vec::new(),
            field_descriptor: None,
            status: Status::Verified,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.instance.insert(key.to_string(), value.into());
    }

    pub fn hypothesis(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.hypotheses.push(Check {
            name: name.into(),
            ok,
            witness: None,
        });
        self.refresh();
        ok
    }

    pub fn conclusion(
        &mut self,
        name: impl Into<String>,
        ok: bool,
        witness: Option<String>,
    ) -> bool {
        self.conclusions.push(Check {
            name: name.into(),
            ok,
            witness,
        });
        self.refresh();
        ok
    }

    pub fn observe(&mut self, name: impl Into<String>, ok: bool, witness: Option<String>) {
        self.observations.push(Check {
            name: name.into(),
            ok,
            witness,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn hypotheses_met(&self) -> bool {
        self.hypotheses.iter().all(|c| c.ok)
    }

    fn refresh(&mut self) {
        self.status = if !self.hypotheses_met() {
            Status::HypothesisNotMet
        } else if self.conclusions.iter().all(|c| c.ok) {
            Status::Verified
        } else {
            Status::Falsified
        };
    }

    /// Plain-text rendering carrying exactly the facts of the JSON form.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "theorem: {}", self.theorem);
        let inst: Vec<String> = self
            .instance
            .iter()
            .map(|(k, v)| format!("{k}={}", render_value(v)))
            .collect();
        let _ = writeln!(out, "instance: {}", inst.join(" "));
        if let Some(fd) = &self.field_descriptor {
            let _ = writeln!(out, "field: {fd}");
        }
        for (label, checks) in [
            ("hypothesis", &self.hypotheses),
            ("conclusion", &self.conclusions),
            ("observation", &self.observations),
        ] {
            for c in checks {
                let mark = if c.ok { "ok" } else { "FAIL" };
                match &c.witness {
                    Some(w) => {
                        let _ = writeln!(out, "{label}: [{mark}] {} :: {w}", c.name);
                    }
                    None => {
                        let _ = writeln!(out, "{label}: [{mark}] {}", c.name);
                    }
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "status: {}", self.status);
        out
    }
}

pub(crate) fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Formats a list of integers as `{a, b, c}`.
pub fn set_string(xs: &[u64]) -> String {
    let parts: Vec<String> = xs.iter().map(u64::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}
