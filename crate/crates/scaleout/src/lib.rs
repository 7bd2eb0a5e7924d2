//! File formats, reports, plots and the command-line front end for
//! [`scaleout_core`].

pub mod addcsv;
pub mod cli;
pub mod par;
pub mod reference;
pub mod report;
pub mod specfile;
pub mod svg;
pub mod tracefile;

pub use scaleout_core as core;

pub use par::run_sweep_parallel;
pub use reference::load_reference_data;
pub use tracefile::{parse_trace, write_trace, TraceFileError};
