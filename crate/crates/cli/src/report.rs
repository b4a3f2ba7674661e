//! JSON rendering of results. Every rational is written as `p/q`.

use groupoid_core::rational::format_pq;
use groupoid_core::{Assertion, CheckReport, Outcome, Rational};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::document::GroupoidDocument;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNMET: i32 = 3;

pub fn pq(value: &Rational) -> Value {
    Value::String(format_pq(value))
}

/// SHA-256 of the canonical serialization.
pub fn digest(doc: &GroupoidDocument) -> String {
    hex::encode(Sha256::digest(doc.serialize().as_bytes()))
}

pub fn assertion(a: &Assertion) -> Value {
    json!({
        "label": a.label,
        "lhs": pq(&a.lhs),
        "relation": a.relation.symbol(),
        "rhs": pq(&a.rhs),
        "holds": a.holds,
        "enforced": a.enforced,
    })
}

pub fn outcome_name(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Holds => "holds",
        Outcome::Violated => "violated",
        Outcome::HypothesisUnmet(_) => "hypothesis_unmet",
        Outcome::BudgetExhausted => "budget_exhausted",
    }
}

pub fn exit_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Holds => EXIT_PASS,
        Outcome::Violated => EXIT_VIOLATED,
        Outcome::HypothesisUnmet(_) | Outcome::BudgetExhausted => EXIT_UNMET,
    }
}

/// Violations dominate unmet hypotheses, which dominate passes.
pub fn combine(codes: impl IntoIterator<Item = i32>) -> i32 {
    codes.into_iter().fold(EXIT_PASS, |acc, c| match (acc, c) {
        (EXIT_VIOLATED, _) | (_, EXIT_VIOLATED) => EXIT_VIOLATED,
        (EXIT_INPUT, _) | (_, EXIT_INPUT) => EXIT_INPUT,
        (EXIT_UNMET, _) | (_, EXIT_UNMET) => EXIT_UNMET,
        _ => EXIT_PASS,
    })
}

pub fn check(report: &CheckReport) -> Value {
    let reason = match &report.outcome {
        Outcome::HypothesisUnmet(r) => Value::String(r.clone()),
        _ => Value::Null,
    };
    json!({
        "name": report.name,
        "outcome": outcome_name(&report.outcome),
        "reason": reason,
        "assertions": report.assertions.iter().map(assertion).collect::<Vec<_>>(),
        "witness": report.witness,
        "notes": report.notes,
    })
}
