//! Pass/fail reports emitted by every theorem check.

use serde::Serialize;
use serde_json::Value;

use crate::ratpoly::{serde_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub index: Value,
    #[serde(with = "serde_rat")]
    pub lhs: Rat,
    pub relation: Relation,
    #[serde(with = "serde_rat")]
    pub rhs: Rat,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub theorem: String,
    pub subject: String,
    pub instances: Vec<Instance>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Report {
    pub fn new(theorem: impl Into<String>, subject: impl Into<String>) -> Self {
        Report {
            theorem: theorem.into(),
            subject: subject.into(),
            instances: Vec::new(),
            verdict: Verdict::Pass,
            note: None,
        }
    }

    /// Records `lhs (relation) rhs`; a failing instance turns the verdict to `Fail`.
    pub fn check(&mut self, index: impl Into<Value>, lhs: Rat, relation: Relation, rhs: Rat) -> bool {
        let pass = relation.holds(&lhs, &rhs);
        if !pass {
            self.verdict = Verdict::Fail;
        }
        self.instances.push(Instance {
            index: index.into(),
            lhs,
            relation,
            rhs,
            pass,
        });
        pass
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.verdict = Verdict::Fail;
        self.note = Some(note.into());
    }

    /// Marks the theorem's hypothesis as unverified, unless something already failed.
    pub fn hypothesis_not_met(&mut self, note: impl Into<String>) {
        if self.verdict != Verdict::Fail {
            self.verdict = Verdict::HypothesisNotMet;
        }
        self.note = Some(note.into());
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// `true` unless the verdict is `Fail`.
    pub fn acceptable(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}
