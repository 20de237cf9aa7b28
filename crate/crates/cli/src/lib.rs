//! Command-line front end: spec parsing, subcommands, CSV output and run manifests.

pub mod commands;
pub mod manifest;
pub mod output;
pub mod spec;

pub use commands::{exit_code, run, Cli};
pub use manifest::RunManifest;
pub use spec::{emit_spec, parse_spec, parse_spec_str, ParsedSpec, SpecError, SpecFile};
