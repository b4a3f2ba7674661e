//! Outcomes of executable theorem checks.

use std::fmt;

use crate::rational::{format_pq, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// An exact comparison with both sides kept verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub label: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
    pub holds: bool,
    /// Unenforced assertions are reported but never fail a check.
    pub enforced: bool,
}

impl Assertion {
    pub fn new(label: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        let holds = relation.holds(&lhs, &rhs);
        Assertion { label: label.into(), lhs, relation, rhs, holds, enforced: true }
    }

    /// A comparison that is reported for information only.
    pub fn flag(label: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        Assertion { enforced: false, ..Self::new(label, lhs, relation, rhs) }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.label,
            format_pq(&self.lhs),
            self.relation.symbol(),
            format_pq(&self.rhs),
            match (self.holds, self.enforced) {
                (true, _) => "holds",
                (false, true) => "FAILS",
                (false, false) => "flagged",
            }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Violated,
    HypothesisUnmet(String),
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub outcome: Outcome,
    pub assertions: Vec<Assertion>,
    pub witness: Option<String>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), outcome: Outcome::Holds, assertions: Vec::new(), witness: None, notes: Vec::new() }
    }

    /// Records an assertion; a failing enforced assertion marks the check violated.
    pub fn record(&mut self, assertion: Assertion) -> bool {
        let holds = assertion.holds;
        if !holds && assertion.enforced && self.outcome == Outcome::Holds {
            self.outcome = Outcome::Violated;
        }
        self.assertions.push(assertion);
        holds
    }

    pub fn hypothesis_unmet(mut self, reason: impl Into<String>) -> Self {
        self.outcome = Outcome::HypothesisUnmet(reason.into());
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn mark_budget_exhausted(&mut self) {
        if self.outcome == Outcome::Holds {
            self.outcome = Outcome::BudgetExhausted;
        }
    }

    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let outcome = match &self.outcome {
            Outcome::Holds => "holds".to_string(),
            Outcome::Violated => "VIOLATED".to_string(),
            Outcome::HypothesisUnmet(r) => format!("hypothesis unmet ({r})"),
            Outcome::BudgetExhausted => "budget exhausted".to_string(),
        };
        writeln!(f, "{}: {}", self.name, outcome)?;
        for a in &self.assertions {
            writeln!(f, "  {a}")?;
        }
        if let Some(w) = &self.witness {
            writeln!(f, "  witness: {w}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
