//! File formats, reports and subcommands of the `ssp-kit` tool.

pub mod app;
pub mod format;
pub mod report;
pub mod verify;

pub use app::{run, thread_count, EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN};
