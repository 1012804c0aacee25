//! Scenario runner for `mmwave-snc`: reads a JSON scenario, evaluates the
//! backlog or delay bound at every sweep point and epsilon, optionally runs
//! the simulator next to it, and writes CSV or JSON.

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;

pub use error::{CliError, Result};
pub use output::{scenario_hash, write, Format};
pub use run::{run_scenario, Row, Table};
pub use scenario::{Axis, Delta, Kind, Scenario};
