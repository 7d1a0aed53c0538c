//! Batch front-end for the conversion engine: ansatz files in, reports out.

pub mod commands;
pub mod report;
pub mod spec;

pub use report::{CliError, Format, Outcome};
pub use spec::{Ansatz, AnsatzSpec};
