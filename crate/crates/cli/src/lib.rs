//! Command-line front end: the `.gpd` document format, seeded random
//! instances and the `groupoid` commands.

pub mod document;
pub mod random;
pub mod report;
mod run;

pub use document::{DocumentError, GroupoidDocument};
pub use random::{random_groupoid, RandomParams};
pub use run::{run_command, Cli, Command, Invocation, SUITES};
