//! File formats and the command line for `anonimos-core`.
//!
//! * [`edge_list`]: `u v w` graph files.
//! * [`lp_format`]: CPLEX-style LP text export and import.
//! * [`report`]: JSON run reports.
//! * [`cli`]: the `anonimos` binary.

pub mod cli;
pub mod edge_list;
pub mod lp_format;
mod numfmt;
pub mod report;

pub use numfmt::{shortest as format_f64, significant as format_significant};
