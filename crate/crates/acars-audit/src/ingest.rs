//! Corpus loading, validation, deduplication and link partitioning.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::hash::{Hash, Hasher};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parse;

/// Physical link a frame was captured on.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Link {
    #[serde(rename = "VHF_POA")]
    VhfPoa,
    #[serde(rename = "VDLM2")]
    Vdlm2,
    #[serde(rename = "SATCOM_UPLINK")]
    SatcomUplink,
    #[serde(rename = "SATCOM_DOWNLINK")]
    SatcomDownlink,
    #[serde(rename = "HF")]
    Hf,
}

impl Link {
    pub fn as_str(&self) -> &'static str {
        match self {
            Link::VhfPoa => "VHF_POA",
            Link::Vdlm2 => "VDLM2",
            Link::SatcomUplink => "SATCOM_UPLINK",
            Link::SatcomDownlink => "SATCOM_DOWNLINK",
            Link::Hf => "HF",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "VHF_POA" => Link::VhfPoa,
            "VDLM2" => Link::Vdlm2,
            "SATCOM_UPLINK" => Link::SatcomUplink,
            "SATCOM_DOWNLINK" => Link::SatcomDownlink,
            "HF" => Link::Hf,
            _ => return None,
        })
    }

    /// HF records are accepted but flagged: the capture chain for them is
    /// out of scope.
    pub fn is_out_of_scope(&self) -> bool {
        matches!(self, Link::Hf)
    }

    /// Direction assumed for records that do not carry one: SATCOM is
    /// uplink-dominant, VHF reception is downlink-dominant.
    pub fn default_direction(&self) -> Direction {
        match self {
            Link::SatcomUplink => Direction::Uplink,
            Link::SatcomDownlink => Direction::Downlink,
            Link::VhfPoa | Link::Vdlm2 => Direction::Downlink,
            Link::Hf => Direction::Unknown,
        }
    }
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Uplink,
    Downlink,
    Unknown,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Uplink => "uplink",
            Direction::Downlink => "downlink",
            Direction::Unknown => "unknown",
        }
    }
}

/// One captured frame with its link metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcarsRecord {
    pub record_id: String,
    /// UTC seconds since epoch, strictly positive.
    pub timestamp: i64,
    pub link: Link,
    pub frequency_mhz: Option<f64>,
    pub direction: Direction,
    pub raw_frame: String,
    pub capture_errors: u32,
}

impl AcarsRecord {
    /// Direction to assume downstream: the record's own when set, otherwise
    /// the link default.
    pub fn effective_direction(&self) -> Direction {
        match self.direction {
            Direction::Unknown => self.link.default_direction(),
            d => d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Rawlog,
}

impl CorpusFormat {
    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "jsonl" => Some(CorpusFormat::Jsonl),
            "rawlog" => Some(CorpusFormat::Rawlog),
            _ => None,
        }
    }
}

/// Per-file load accounting; skipped lines are counted, never silent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadSummary {
    pub loaded: usize,
    pub skipped: usize,
    /// Line number and reason of the first malformed line, if any.
    pub first_bad: Option<(usize, String)>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(
        "corpus rejected: {bad} of {total} lines malformed; first bad line {line}: {reason}"
    )]
    CorpusRejected {
        bad: usize,
        total: usize,
        line: usize,
        reason: String,
    },
}

#[derive(Deserialize)]
struct JsonLine {
    ts: f64,
    link: String,
    #[serde(default)]
    freq: Option<f64>,
    #[serde(default)]
    dir: Option<String>,
    frame: String,
    #[serde(default)]
    err: Option<u32>,
}

fn validate(
    id: String,
    ts: f64,
    link: Link,
    freq: Option<f64>,
    dir: Direction,
    frame: String,
    err: u32,
) -> Result<AcarsRecord, String> {
    if !(ts > 0.0) {
        return Err(format!("timestamp {ts} is not strictly positive"));
    }
    if let Some(f) = freq {
        if !(0.1..=10000.0).contains(&f) {
            return Err(format!("frequency {f} MHz outside [0.1, 10000]"));
        }
    }
    Ok(AcarsRecord {
        record_id: id,
        timestamp: ts as i64,
        link,
        frequency_mhz: freq,
        direction: dir,
        raw_frame: frame,
        capture_errors: err,
    })
}

fn parse_jsonl_line(id: String, line: &str) -> Result<AcarsRecord, String> {
    let row: JsonLine = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let link = Link::from_str(&row.link).ok_or_else(|| format!("unknown link {:?}", row.link))?;
    let dir = match row.dir.as_deref() {
        None => Direction::Unknown,
        Some("uplink") => Direction::Uplink,
        Some("downlink") => Direction::Downlink,
        Some("unknown") => Direction::Unknown,
        Some(other) => return Err(format!("unknown direction {other:?}")),
    };
    validate(id, row.ts, link, row.freq, dir, row.frame, row.err.unwrap_or(0))
}

/// `<epoch-seconds> <freq-mhz> : <frame-text>`. The link is inferred from
/// the frequency band: below 1 GHz is VHF, above is SATCOM uplink.
fn parse_rawlog_line(id: String, line: &str) -> Result<AcarsRecord, String> {
    let (head, frame) = line
        .split_once(" : ")
        .ok_or_else(|| "missing ' : ' separator".to_string())?;
    let mut it = head.split_whitespace();
    let ts: f64 = it
        .next()
        .ok_or_else(|| "missing epoch".to_string())?
        .parse()
        .map_err(|e| format!("bad epoch: {e}"))?;
    let freq: f64 = it
        .next()
        .ok_or_else(|| "missing frequency".to_string())?
        .parse()
        .map_err(|e| format!("bad frequency: {e}"))?;
    if it.next().is_some() {
        return Err("unexpected extra token before ':'".to_string());
    }
    let link = if freq < 1000.0 { Link::VhfPoa } else { Link::SatcomUplink };
    validate(id, ts, link, Some(freq), Direction::Unknown, frame.to_string(), 0)
}

/// Load a corpus file. Malformed lines are skipped and counted; more than
/// 50% malformed rejects the whole corpus.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
) -> Result<(Vec<AcarsRecord>, LoadSummary), IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    load_corpus_str(&text, &stem, format)
}

/// Same as [`load_corpus`] but over in-memory text.
pub fn load_corpus_str(
    text: &str,
    source_tag: &str,
    format: CorpusFormat,
) -> Result<(Vec<AcarsRecord>, LoadSummary), IngestError> {
    let mut records = Vec::new();
    let mut summary = LoadSummary::default();
    let mut considered = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        considered += 1;
        let id = format!("{source_tag}:{lineno}");
        let parsed = match format {
            CorpusFormat::Jsonl => parse_jsonl_line(id, line),
            CorpusFormat::Rawlog => parse_rawlog_line(id, line),
        };
        match parsed {
            Ok(rec) => {
                records.push(rec);
                summary.loaded += 1;
            }
            Err(reason) => {
                summary.skipped += 1;
                if summary.first_bad.is_none() {
                    summary.first_bad = Some((lineno, reason));
                }
            }
        }
    }
    if considered > 0 && summary.skipped * 2 > considered {
        let (line, reason) = summary.first_bad.clone().unwrap();
        return Err(IngestError::CorpusRejected {
            bad: summary.skipped,
            total: considered,
            line,
            reason,
        });
    }
    Ok((records, summary))
}

/// Concatenate several loaded corpora into one timestamp-ordered sequence.
/// The sort is stable, so same-timestamp records keep their load order.
pub fn merge_by_timestamp(mut batches: Vec<Vec<AcarsRecord>>) -> Vec<AcarsRecord> {
    let mut all: Vec<AcarsRecord> = batches.drain(..).flatten().collect();
    all.sort_by_key(|r| r.timestamp);
    all
}

#[derive(PartialEq, Eq, Hash)]
enum DedupeKey {
    Parsed {
        registration: String,
        label: String,
        msg_no: Option<String>,
        text_hash: u64,
    },
    Raw(u64),
}

fn hash_str(s: &str) -> u64 {
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

fn dedupe_key(raw: &str) -> DedupeKey {
    match parse::parse_frame(raw) {
        Ok(msg) => DedupeKey::Parsed {
            registration: msg.registration,
            label: msg.label,
            msg_no: msg.msg_no,
            text_hash: hash_str(&msg.text),
        },
        Err(_) => DedupeKey::Raw(hash_str(raw)),
    }
}

/// Drop records whose (registration, label, message number, text) match an
/// earlier kept record within `window_s` seconds. Multi-channel reception
/// of the same downlink is the usual source of these.
///
/// Stable: survivors keep their order. Idempotent: re-running with the same
/// window removes nothing further.
pub fn dedupe(records: Vec<AcarsRecord>, window_s: i64) -> Vec<AcarsRecord> {
    assert!(window_s >= 0, "window must be non-negative");
    let mut last_kept: HashMap<DedupeKey, i64> = HashMap::new();
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        let key = dedupe_key(&rec.raw_frame);
        let dup = last_kept
            .get(&key)
            .is_some_and(|&ts| (rec.timestamp - ts).abs() <= window_s);
        if !dup {
            last_kept.insert(key, rec.timestamp);
            out.push(rec);
        }
    }
    out
}

/// Partition records by link. Buckets are a set partition of the input.
pub fn partition_by_link(records: Vec<AcarsRecord>) -> BTreeMap<Link, Vec<AcarsRecord>> {
    let mut map: BTreeMap<Link, Vec<AcarsRecord>> = BTreeMap::new();
    for rec in records {
        map.entry(rec.link).or_default().push(rec);
    }
    map
}
