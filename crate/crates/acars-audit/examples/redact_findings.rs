//! Audit the demo corpus, apply a redaction policy, and export findings CSV.
//!
//!     cargo run --example redact_findings [keep|mask|pseudonym]

use acars_audit::config::RunConfig;
use acars_audit::pipeline::run_audit;
use acars_audit::report::{export_findings_csv, redact, RedactionPolicy};

fn data(rel: &str) -> String {
    format!("{}/data/demo/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> anyhow::Result<()> {
    let policy_name = std::env::args().nth(1).unwrap_or_else(|| "mask".to_string());
    // the pseudonym policy needs a key; demo with a fixed one
    let key = (policy_name == "pseudonym").then(|| b"demo-key".to_vec());
    let policy = RedactionPolicy::uniform(&policy_name, key)?;

    let mut cfg = RunConfig::default();
    cfg.inputs = vec![data("corpus.jsonl").into()];
    cfg.registry = Some(data("registry.csv").into());
    cfg.blocklist = Some(data("blocklist.csv").into());

    let mut out = run_audit(&cfg)?;
    for msg in &mut out.messages {
        msg.findings = redact(&msg.findings, &policy)?;
    }
    print!("{}", String::from_utf8(export_findings_csv(&out.messages)?)?);
    Ok(())
}
