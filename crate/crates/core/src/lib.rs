//! Exact solvers for the directed waypoint routing problem: find a
//! minimum-weight closed directed walk that visits every waypoint and uses
//! each arc at most its capacity.
//!
//! Four parameterized solvers share one instance model and are checked
//! against brute-force oracles:
//!
//! * [`colorcoding`]: bounded number of arc occurrences in the solution,
//! * [`fes`]: feedback edge number of the underlying graph,
//! * [`vi`]: vertex integrity, via a block-structured integer program,
//! * [`twdp`]: treewidth, dynamic programming over a nice tree decomposition.
//!
//! [`hardness`] builds the reduction gadgets and instances used as stress
//! inputs.

pub mod colorcoding;
pub mod error;
pub mod fes;
pub mod format;
pub mod hardness;
pub mod instance;
pub mod oracle;
pub mod paths;
pub mod solution;
pub mod structparams;
pub mod vi;
pub mod twdp;
pub mod walk;

pub use error::{Error, Result};
pub use instance::{Arc, ArcId, Capacity, Instance, Vertex};
pub use solution::Solution;
pub use walk::{ArcMultiset, ClosedWalk, ValidationReport, Violation};
