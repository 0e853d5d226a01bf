//! Load a capture file, merge, dedupe and partition it by link.
//!
//!     cargo run --example ingest_and_dedupe [CORPUS.jsonl]

use acars_audit::ingest::{dedupe, merge_by_timestamp, partition_by_link, CorpusFormat};

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo/corpus.jsonl").into());

    let (records, summary) =
        acars_audit::ingest::load_corpus(path.as_ref(), CorpusFormat::Jsonl)?;
    println!("loaded {} records, skipped {} lines", summary.loaded, summary.skipped);

    let merged = merge_by_timestamp(vec![records]);
    let before = merged.len();
    let clean = dedupe(merged, 30);
    println!("dedupe removed {} within a 30 s window", before - clean.len());

    for (link, bucket) in partition_by_link(clean) {
        println!("{:<16} {:>5}", link.as_str(), bucket.len());
    }
    Ok(())
}
