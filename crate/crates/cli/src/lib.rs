//! Experiment harness around the adaptive influence maximization library:
//! spec parsing, sweep execution with CSV output, dataset statistics and the
//! property verification suite.

pub mod runner;
pub mod spec;
pub mod verify;
