//! File formats, reports and the command-line front end for `legmcs-core`.

pub mod cli;
pub mod formats;
