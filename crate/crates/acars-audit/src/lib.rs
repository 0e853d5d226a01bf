//! Batch privacy auditing for captured ACARS air-ground datalink traffic.
//!
//! The pipeline ingests capture logs, parses frames, enriches them from
//! aircraft registries, detects privacy-sensitive content, grades breaches
//! per stakeholder group, and renders summary reports. A cipher module flags
//! weakly "encrypted" traffic and recovers substitution keys from a known
//! plaintext format.
//!
//! Start with the `examples/` directory: each capability has a runnable
//! example (`cargo run --example audit_corpus`, etc.). The `acars-audit`
//! binary wires the same pipeline behind subcommands.

pub mod audit;
pub mod cipher;
pub mod config;
pub mod content;
pub mod defaults;
pub mod ingest;
pub mod parse;
pub mod pipeline;
pub mod registry;
pub mod report;
