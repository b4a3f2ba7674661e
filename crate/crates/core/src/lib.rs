//! Exact computation of L²-Betti numbers and costs of finite measured
//! groupoids.
//!
//! All quantities are exact rationals. The main entry points are
//! [`FiniteGroupoid`], [`betti::betti_groupoid`] and [`cost::minimal_cost`].

pub mod betti;
pub mod complex;
pub mod cost;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod hilbert;
pub mod linalg;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use groupoid::{Arrow, ArrowId, ArrowSet, Atom, FiniteGroupoid, GroupTable, InvariantPartition, WeightedUnitSpace};
pub use rational::{ComplexRational, Rational};
pub use report::{Assertion, CheckReport, Outcome, Relation};
