//! IO companion to `cslab-core`: file formats with validated loaders,
//! report envelopes with atomic writes, thread fan-out, and the CLI.

pub mod cli;
pub mod formats;
pub mod par;
pub mod report;
