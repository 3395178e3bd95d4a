use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every hypothesis holds; the theorem rules out blow-up.
    NoBlowupExcluded,
    ConditionsViolated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub verdict: Verdict,
    pub failed_conditions: Vec<String>,
    /// Signed slack per condition; negative where a condition fails.
    pub margins: BTreeMap<String, f64>,
    pub notes: String,
}

impl CriterionVerdict {
    pub(crate) fn new() -> Self {
        Self { verdict: Verdict::NoBlowupExcluded, failed_conditions: Vec::new(), margins: BTreeMap::new(), notes: String::new() }
    }

    pub(crate) fn margin(&mut self, name: &str, value: f64) {
        self.margins.insert(name.to_string(), value);
    }

    pub(crate) fn fail(&mut self, name: &str) {
        self.failed_conditions.push(name.to_string());
        if self.verdict == Verdict::NoBlowupExcluded {
            self.verdict = Verdict::ConditionsViolated;
        }
    }

    /// Marks a condition as undecidable; overrides a violation.
    pub(crate) fn undecided(&mut self, name: &str) {
        self.failed_conditions.push(name.to_string());
        self.verdict = Verdict::Inconclusive;
    }

    pub(crate) fn note(&mut self, text: &str) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::NoBlowupExcluded
    }
}
