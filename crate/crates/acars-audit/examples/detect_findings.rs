//! Run the content detectors over every frame in a capture file.
//!
//!     cargo run --example detect_findings [CORPUS.jsonl]

use acars_audit::cipher::{classify_encrypted, DEFAULT_IOC_THRESHOLD, DEFAULT_MIN_LEN};
use acars_audit::content::Detectors;
use acars_audit::ingest::CorpusFormat;
use acars_audit::parse::parse_frame;

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo/corpus.jsonl").into());

    let (records, _) = acars_audit::ingest::load_corpus(path.as_ref(), CorpusFormat::Jsonl)?;
    let detectors = Detectors::shipped();

    for record in &records {
        let Ok(msg) = parse_frame(&record.raw_frame) else { continue };
        let findings = detectors.run(&msg, &record.record_id);
        if findings.is_empty() {
            let verdict = classify_encrypted(&msg.text, DEFAULT_MIN_LEN, DEFAULT_IOC_THRESHOLD);
            let tag = if verdict.is_encrypted { "ENCRYPTED_WEAK" } else { "EXISTENCE_ONLY" };
            println!("{:<14} {:<18} -", record.record_id, tag);
            continue;
        }
        for f in &findings {
            let entities: Vec<String> = f
                .entities
                .iter()
                .map(|e| format!("{:?}={}", e.kind, e.value))
                .collect();
            println!(
                "{:<14} {:<18} {}",
                record.record_id,
                f.category.as_str(),
                entities.join(", ")
            );
        }
    }
    Ok(())
}
