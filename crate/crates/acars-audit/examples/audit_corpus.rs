//! Full pipeline: ingest, classify, detect, grade, and print the breach
//! matrix for the bundled demo corpus.
//!
//!     cargo run --example audit_corpus [CORPUS.jsonl [REGISTRY.csv [BLOCKLIST.csv]]]

use acars_audit::config::RunConfig;
use acars_audit::pipeline::run_audit;
use acars_audit::report::{render, render_offshore, OutputFormat};

fn data(rel: &str) -> String {
    format!("{}/data/demo/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = RunConfig::default();
    cfg.inputs = vec![args.next().unwrap_or_else(|| data("corpus.jsonl")).into()];
    cfg.registry = Some(args.next().unwrap_or_else(|| data("registry.csv")).into());
    cfg.blocklist = Some(args.next().unwrap_or_else(|| data("blocklist.csv")).into());

    let out = run_audit(&cfg)?;
    print!("{}", String::from_utf8(render(&out.report, OutputFormat::Text)?)?);
    if !out.offshore.is_empty() {
        println!();
        print!("{}", render_offshore(&out.offshore));
    }
    eprintln!(
        "{} records, {} duplicates removed, {} unparseable, {} encrypted-classified",
        out.stats.records_loaded,
        out.stats.dedup_removed,
        out.stats.parse_failures,
        out.encrypted.len()
    );
    Ok(())
}
