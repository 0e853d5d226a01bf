//! End-to-end wiring: ingest → parse → enrich → detect → audit.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::audit::{
    grade_matrix, offshore_summary, AuditReport, ClassifiedAircraft, MessageContext,
    RequirementMatrix,
};
use crate::cipher::{classify_encrypted, CribError, CribTemplate};
use crate::config::{ConfigError, RunConfig};
use crate::content::{Confidence, Detectors, Finding, FindingCategory, KeywordTables};
use crate::ingest::{
    dedupe, load_corpus, merge_by_timestamp, IngestError, LoadSummary,
};
use crate::parse::{parse_frame, LabelRegistry, LabelTableError};
use crate::registry::{
    classify_stakeholder, detect_registrant_kind, load_blocklist, load_ofc_list, load_registry,
    BlockList, RegistryError, RegistryIndex, RuleTable, RuleTableError, StakeholderClass,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Rules(#[from] RuleTableError),
    #[error(transparent)]
    Labels(#[from] LabelTableError),
    #[error("crib template: {0}")]
    Crib(#[from] CribError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Load accounting across the whole run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PipelineStats {
    pub records_loaded: usize,
    pub lines_skipped: usize,
    pub dedup_removed: usize,
    pub out_of_scope: usize,
    pub parse_failures: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EncryptedMessage {
    pub record_id: String,
    pub text: String,
    pub index_of_coincidence: f64,
}

pub struct PipelineOutput {
    pub messages: Vec<MessageContext>,
    pub report: AuditReport,
    pub offshore: Vec<(String, u64)>,
    pub fleet: Vec<ClassifiedAircraft>,
    pub encrypted: Vec<EncryptedMessage>,
    pub stats: PipelineStats,
}

fn read_path(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// All configuration tables resolved from paths or shipped defaults.
pub struct LoadedTables {
    pub rules: RuleTable,
    pub labels: LabelRegistry,
    pub detectors: Detectors,
    pub ofc: std::collections::HashSet<String>,
    pub registry: RegistryIndex,
    pub blocklist: BlockList,
    pub crib: CribTemplate,
    pub provenance: std::collections::BTreeMap<String, String>,
}

pub fn load_tables(cfg: &RunConfig) -> Result<LoadedTables, PipelineError> {
    let mut provenance = std::collections::BTreeMap::new();
    let mut hashed = |name: &str, text: &str| {
        provenance.insert(name.to_string(), sha256_hex(text));
    };

    let rules_text = match &cfg.rules {
        Some(p) => read_path(p)?,
        None => crate::defaults::RULE_TABLE.to_string(),
    };
    hashed("rules", &rules_text);
    let rules = RuleTable::from_table(&rules_text)?;

    let labels_text = crate::defaults::LABEL_TABLE.to_string();
    hashed("labels", &labels_text);
    let labels = LabelRegistry::from_table(&labels_text)?;

    let ofc_text = match &cfg.ofc_list {
        Some(p) => read_path(p)?,
        None => crate::defaults::OFC_LIST.to_string(),
    };
    hashed("ofc-list", &ofc_text);
    let ofc = load_ofc_list(&ofc_text);

    let gazetteer_text = match &cfg.gazetteer {
        Some(p) => read_path(p)?,
        None => crate::defaults::GAZETTEER.to_string(),
    };
    hashed("gazetteer", &gazetteer_text);
    let gazetteer = crate::content::load_gazetteer(&gazetteer_text);

    let keywords_text = match &cfg.keywords {
        Some(p) => read_path(p)?,
        None => crate::defaults::KEYWORDS.to_string(),
    };
    hashed("keywords", &keywords_text);
    let keywords = KeywordTables::from_text(&keywords_text);

    let crib_text = match &cfg.crib_template {
        Some(p) => read_path(p)?,
        None => crate::defaults::CRIB_TEMPLATE.to_string(),
    };
    hashed("crib-template", &crib_text);
    let crib = CribTemplate::parse(&crib_text)?;

    let registry = match &cfg.registry {
        Some(p) => {
            hashed("registry", &read_path(p)?);
            load_registry(&[p])?
        }
        None => RegistryIndex::default(),
    };
    let blocklist = match &cfg.blocklist {
        Some(p) => {
            hashed("blocklist", &read_path(p)?);
            load_blocklist(p)?
        }
        None => BlockList::default(),
    };

    let detectors = Detectors::new(labels.clone(), gazetteer, keywords);
    Ok(LoadedTables {
        rules,
        labels,
        detectors,
        ofc,
        registry,
        blocklist,
        crib,
        provenance,
    })
}

/// Load, merge and dedupe the configured corpora.
pub fn load_and_dedupe(
    cfg: &RunConfig,
) -> Result<(Vec<crate::ingest::AcarsRecord>, PipelineStats), PipelineError> {
    let mut stats = PipelineStats::default();
    let mut batches = Vec::new();
    for input in &cfg.inputs {
        let (records, summary): (_, LoadSummary) = load_corpus(input, cfg.input_format)?;
        stats.records_loaded += summary.loaded;
        stats.lines_skipped += summary.skipped;
        batches.push(records);
    }
    let merged = merge_by_timestamp(batches);
    let before = merged.len();
    let mut deduped = dedupe(merged, cfg.dedup_window_s);
    stats.dedup_removed = before - deduped.len();
    let in_scope = deduped.len();
    deduped.retain(|r| !r.link.is_out_of_scope());
    stats.out_of_scope = in_scope - deduped.len();
    Ok((deduped, stats))
}

/// Run the complete audit over the configured inputs.
pub fn run_audit(cfg: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    cfg.validate()?;
    let tables = load_tables(cfg)?;
    let (records, mut stats) = load_and_dedupe(cfg)?;

    let mut messages = Vec::new();
    let mut encrypted = Vec::new();
    let mut seen_regs: BTreeSet<String> = BTreeSet::new();
    for record in &records {
        let msg = match parse_frame(&record.raw_frame) {
            Ok(m) => m,
            Err(_) => {
                stats.parse_failures += 1;
                continue;
            }
        };
        seen_regs.insert(msg.registration.clone());
        let stakeholder = match tables.registry.lookup_registration(&msg.registration) {
            Some(rec) => classify_stakeholder(rec, &tables.rules).class,
            None => StakeholderClass::Unknown,
        };
        let blocked = tables
            .blocklist
            .lookup(&msg.registration)
            .map(|entry| entry.level);
        let mut findings = tables.detectors.run(&msg, &record.record_id);
        if findings.is_empty() {
            let verdict = classify_encrypted(&msg.text, cfg.min_cipher_len, cfg.ioc_threshold);
            let category = if verdict.is_encrypted {
                encrypted.push(EncryptedMessage {
                    record_id: record.record_id.clone(),
                    text: msg.text.clone(),
                    index_of_coincidence: verdict.index_of_coincidence,
                });
                FindingCategory::EncryptedWeak
            } else {
                FindingCategory::ExistenceOnly
            };
            findings.push(Finding {
                message_ref: record.record_id.clone(),
                category,
                entities: Vec::new(),
                confidence: Confidence::Medium,
            });
        }
        messages.push(MessageContext {
            record_id: record.record_id.clone(),
            timestamp: record.timestamp,
            link: record.link,
            direction: record.effective_direction(),
            registration: Some(msg.registration),
            stakeholder,
            blocked,
            findings,
        });
    }

    let fleet: Vec<ClassifiedAircraft> = seen_regs
        .iter()
        .filter_map(|reg| {
            let rec = tables.registry.lookup_registration(reg)?;
            Some(ClassifiedAircraft {
                registration: reg.clone(),
                class: classify_stakeholder(rec, &tables.rules).class,
                kind: detect_registrant_kind(rec, &tables.ofc),
                country: (!rec.country.is_empty()).then(|| rec.country.clone()),
            })
        })
        .collect();
    let offshore = offshore_summary(&fleet, cfg.offshore_threshold);

    let mut report = grade_matrix(&messages, &RequirementMatrix::default());
    report.provenance = tables.provenance;

    Ok(PipelineOutput {
        messages,
        report,
        offshore,
        fleet,
        encrypted,
        stats,
    })
}
