//! Report rendering and redaction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::audit::{concept_of, percent, AuditReport, MessageContext, PrivacyConcept};
use crate::content::{Entity, EntityKind, Finding};
use crate::registry::StakeholderClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("unknown output format {0:?} (expected text, csv or json)")]
    UnknownFormat(String),
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("csv write failed: {0}")]
    Csv(#[from] csv::Error),
}

impl OutputFormat {
    pub fn from_str(s: &str) -> Result<Self, RenderError> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(RenderError::UnknownFormat(other.to_string())),
        }
    }
}

const CONCEPT_HEADS: [&str; 4] = ["EXISTENCE", "INTENTION", "STATUS", "PASSENGER_CARGO"];

/// Render a report. Output bytes are deterministic for identical reports.
pub fn render(report: &AuditReport, format: OutputFormat) -> Result<Vec<u8>, RenderError> {
    match format {
        OutputFormat::Text => Ok(render_text(report).into_bytes()),
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        OutputFormat::Csv => render_csv(report),
    }
}

fn render_text(report: &AuditReport) -> String {
    let mut out = String::new();
    out.push_str("PRIVACY BREACH MATRIX\n");
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>8} {:>16}\n",
        "group", CONCEPT_HEADS[0], CONCEPT_HEADS[1], CONCEPT_HEADS[2], CONCEPT_HEADS[3]
    ));
    for class in StakeholderClass::GRADED {
        let cells: Vec<&str> = PrivacyConcept::ALL
            .iter()
            .map(|&c| report.cell(class, c))
            .collect();
        out.push_str(&format!(
            "{:<12} {:>10} {:>10} {:>8} {:>16}\n",
            class.as_str(),
            cells[0],
            cells[1],
            cells[2],
            cells[3]
        ));
    }
    if report.matrix.military_existence_caveat {
        out.push_str("note: MILITARY/EXISTENCE assumes operational flights\n");
    }

    out.push_str("\nUSAGE BY GROUP AND LINK\n");
    out.push_str(&format!(
        "{:<12} {:<16} {:>9} {:>18} {:>9} {:>18}\n",
        "group", "link", "aircraft", "blocked-aircraft", "messages", "blocked-messages"
    ));
    let totals = report.totals();
    for (class, by_link) in &report.counters {
        for (link, row) in by_link {
            out.push_str(&format!(
                "{:<12} {:<16} {:>9} {:>18} {:>9} {:>18}\n",
                class.as_str(),
                link.as_str(),
                row.aircraft.len(),
                format!(
                    "{} ({})",
                    row.blocked_aircraft.len(),
                    percent(row.blocked_aircraft.len() as u64, row.aircraft.len() as u64)
                ),
                row.messages,
                format!("{} ({})", row.blocked_messages, percent(row.blocked_messages, row.messages)),
            ));
        }
        if let Some(total) = totals.get(class) {
            out.push_str(&format!(
                "{:<12} {:<16} {:>9} {:>18} {:>9} {:>18}\n",
                class.as_str(),
                "ALL",
                total.aircraft.len(),
                format!(
                    "{} ({})",
                    total.blocked_aircraft.len(),
                    percent(total.blocked_aircraft.len() as u64, total.aircraft.len() as u64)
                ),
                total.messages,
                format!(
                    "{} ({})",
                    total.blocked_messages,
                    percent(total.blocked_messages, total.messages)
                ),
            ));
        }
    }

    if !report.provenance.is_empty() {
        out.push_str("\nPROVENANCE\n");
        for (name, hash) in &report.provenance {
            out.push_str(&format!("{name}: {hash}\n"));
        }
    }
    out
}

fn render_csv(report: &AuditReport) -> Result<Vec<u8>, RenderError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "group", "key", "value"])?;
    for class in StakeholderClass::GRADED {
        for concept in PrivacyConcept::ALL {
            w.write_record([
                "matrix",
                class.as_str(),
                concept.as_str(),
                report.cell(class, concept),
            ])?;
        }
    }
    for (class, by_link) in &report.counters {
        for (link, row) in by_link {
            for (key, value) in [
                ("aircraft", row.aircraft.len() as u64),
                ("blocked_aircraft", row.blocked_aircraft.len() as u64),
                ("messages", row.messages),
                ("blocked_messages", row.blocked_messages),
            ] {
                w.write_record([
                    "counter",
                    class.as_str(),
                    &format!("{}/{}", link.as_str(), key),
                    &value.to_string(),
                ])?;
            }
        }
    }
    for (name, hash) in &report.provenance {
        w.write_record(["provenance", "", name, hash])?;
    }
    Ok(w.into_inner().expect("vec writer does not fail"))
}

/// Render the off-shore ownership table.
pub fn render_offshore(rows: &[(String, u64)]) -> String {
    let mut out = String::from("OFF-SHORE REGISTRATION TERRITORIES\n");
    if rows.is_empty() {
        return out;
    }
    for (territory, count) in rows {
        out.push_str(&format!("{territory:<20} {count:>5}\n"));
    }
    out
}

/// Export one CSV row per (finding, breached concept).
pub fn export_findings_csv(messages: &[MessageContext]) -> Result<Vec<u8>, RenderError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "record_id",
        "ts",
        "link",
        "registration",
        "stakeholder",
        "blocked",
        "category",
        "concept",
        "grade",
        "entities_json",
    ])?;
    for msg in messages {
        for finding in &msg.findings {
            let entities_json = serde_json::to_string(&finding.entities)?;
            for (concept, grade) in concept_of(finding, msg.direction) {
                w.write_record([
                    msg.record_id.as_str(),
                    &msg.timestamp.to_string(),
                    msg.link.as_str(),
                    msg.registration.as_deref().unwrap_or(""),
                    msg.stakeholder.as_str(),
                    msg.blocked.map(|b| b.as_str()).unwrap_or(""),
                    finding.category.as_str(),
                    concept.as_str(),
                    grade.as_str(),
                    &entities_json,
                ])?;
            }
        }
    }
    Ok(w.into_inner().expect("vec writer does not fail"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RedactAction {
    Keep,
    Mask,
    Pseudonym,
}

#[derive(Debug, Error)]
pub enum RedactError {
    #[error("PSEUDONYM redaction requires a key (set --key-file or ACARS_AUDIT_KEY)")]
    MissingKey,
    #[error("unknown redaction policy {0:?} (expected keep, mask or pseudonym)")]
    UnknownPolicy(String),
}

/// Per-entity-kind redaction rules with a fallback action.
#[derive(Clone, Debug)]
pub struct RedactionPolicy {
    key: Option<Vec<u8>>,
    rules: BTreeMap<EntityKind, RedactAction>,
    default_action: RedactAction,
}

impl RedactionPolicy {
    pub fn keep() -> Self {
        RedactionPolicy {
            key: None,
            rules: BTreeMap::new(),
            default_action: RedactAction::Keep,
        }
    }

    /// Uniform policy named by the CLI `--redact-policy` value.
    pub fn uniform(name: &str, key: Option<Vec<u8>>) -> Result<Self, RedactError> {
        let action = match name.to_ascii_lowercase().as_str() {
            "keep" => RedactAction::Keep,
            "mask" => RedactAction::Mask,
            "pseudonym" => RedactAction::Pseudonym,
            other => return Err(RedactError::UnknownPolicy(other.to_string())),
        };
        let policy = RedactionPolicy {
            key,
            rules: BTreeMap::new(),
            default_action: action,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn with_rule(mut self, kind: EntityKind, action: RedactAction) -> Self {
        self.rules.insert(kind, action);
        self
    }

    pub fn validate(&self) -> Result<(), RedactError> {
        let uses_pseudonym = self.default_action == RedactAction::Pseudonym
            || self.rules.values().any(|&a| a == RedactAction::Pseudonym);
        if uses_pseudonym && self.key.is_none() {
            return Err(RedactError::MissingKey);
        }
        Ok(())
    }

    fn action_for(&self, kind: EntityKind) -> RedactAction {
        self.rules.get(&kind).copied().unwrap_or(self.default_action)
    }

    fn pseudonym(&self, kind: EntityKind, value: &str) -> String {
        let key = self.key.as_deref().expect("validated");
        let mut hasher = Sha256::new();
        hasher.update(key);
        hasher.update(kind.as_str().as_bytes());
        hasher.update(b"\x00");
        hasher.update(value.as_bytes());
        let digest = hasher.finalize();
        digest[..4].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn apply(&self, entity: &mut Entity) {
        if entity.redacted {
            return;
        }
        match self.action_for(entity.kind) {
            RedactAction::Keep => {}
            RedactAction::Mask => {
                let n = entity.value.chars().count();
                entity.value = if entity.kind == EntityKind::Pan && n > 4 {
                    // keep last-4 for PANs only
                    let tail: String = entity.value.chars().skip(n - 4).collect();
                    format!("{}{}", "*".repeat(n - 4), tail)
                } else {
                    "*".repeat(n)
                };
                entity.redacted = true;
            }
            RedactAction::Pseudonym => {
                entity.value = self.pseudonym(entity.kind, &entity.value);
                entity.redacted = true;
            }
        }
    }
}

/// Apply the policy to every entity. Structure and counts are preserved and
/// the operation is idempotent: already-redacted entities pass through.
pub fn redact(findings: &[Finding], policy: &RedactionPolicy) -> Result<Vec<Finding>, RedactError> {
    policy.validate()?;
    let mut out = findings.to_vec();
    for finding in &mut out {
        for entity in &mut finding.entities {
            policy.apply(entity);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{grade_matrix, RequirementMatrix};
    use crate::content::{Confidence, FindingCategory};
    use crate::ingest::{Direction, Link};

    fn sample_report() -> AuditReport {
        let finding = Finding {
            message_ref: "t:1".into(),
            category: FindingCategory::PositionReport,
            entities: vec![],
            confidence: Confidence::High,
        };
        let msg = MessageContext {
            record_id: "t:1".into(),
            timestamp: 1_600_000_000,
            link: Link::VhfPoa,
            direction: Direction::Downlink,
            registration: Some("N123AB".into()),
            stakeholder: StakeholderClass::Business,
            blocked: None,
            findings: vec![finding],
        };
        grade_matrix(&[msg], &RequirementMatrix::default())
    }

    #[test]
    fn render_is_deterministic() {
        let report = sample_report();
        for fmt in [OutputFormat::Text, OutputFormat::Csv, OutputFormat::Json] {
            assert_eq!(render(&report, fmt).unwrap(), render(&report, fmt).unwrap());
        }
    }

    #[test]
    fn empty_report_renders_headers_only_csv() {
        let report = AuditReport::empty(RequirementMatrix::default());
        let bytes = render(&report, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("section,group,key,value"));
        assert!(!text.contains("counter,"));
    }

    #[test]
    fn distinct_reports_render_distinct_bytes() {
        let empty = AuditReport::empty(RequirementMatrix::default());
        let graded = sample_report();
        for fmt in [OutputFormat::Text, OutputFormat::Csv, OutputFormat::Json] {
            assert_ne!(render(&empty, fmt).unwrap(), render(&graded, fmt).unwrap());
        }
    }

    #[test]
    fn unknown_format_is_usage_error() {
        assert!(matches!(
            OutputFormat::from_str("yaml"),
            Err(RenderError::UnknownFormat(_))
        ));
    }

    #[test]
    fn text_matrix_shows_commercial_na() {
        let report = AuditReport::empty(RequirementMatrix::default());
        let text = String::from_utf8(render(&report, OutputFormat::Text).unwrap()).unwrap();
        let commercial = text.lines().find(|l| l.starts_with("COMMERCIAL")).unwrap();
        assert_eq!(commercial.matches("N/A").count(), 3);
    }

    #[test]
    fn findings_export_has_exact_header() {
        let bytes = export_findings_csv(&[]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text.trim_end(),
            "record_id,ts,link,registration,stakeholder,blocked,category,concept,grade,entities_json"
        );
    }

    fn pan_finding() -> Finding {
        Finding {
            message_ref: "t:1".into(),
            category: FindingCategory::CardFull,
            entities: vec![Entity {
                kind: EntityKind::Pan,
                value: "4111111111111111".into(),
                span: (0, 16),
                redacted: false,
            }],
            confidence: Confidence::High,
        }
    }

    #[test]
    fn mask_keeps_last_four_of_pan_only() {
        let policy = RedactionPolicy::uniform("mask", None).unwrap();
        let out = redact(&[pan_finding()], &policy).unwrap();
        assert_eq!(out[0].entities[0].value, "************1111");

        let name = Finding {
            entities: vec![Entity {
                kind: EntityKind::Name,
                value: "SMITH/J".into(),
                span: (0, 7),
                redacted: false,
            }],
            ..pan_finding()
        };
        let out = redact(&[name], &policy).unwrap();
        assert_eq!(out[0].entities[0].value, "*******");
    }

    #[test]
    fn pseudonym_is_deterministic_and_needs_key() {
        assert!(matches!(
            RedactionPolicy::uniform("pseudonym", None),
            Err(RedactError::MissingKey)
        ));
        let policy = RedactionPolicy::uniform("pseudonym", Some(b"secret".to_vec())).unwrap();
        let a = redact(&[pan_finding()], &policy).unwrap();
        let b = redact(&[pan_finding()], &policy).unwrap();
        assert_eq!(a[0].entities[0].value, b[0].entities[0].value);
        assert_eq!(a[0].entities[0].value.len(), 8);
        assert!(a[0].entities[0].value.bytes().all(|c| c.is_ascii_hexdigit()));
        // different key, different token
        let other = RedactionPolicy::uniform("pseudonym", Some(b"other".to_vec())).unwrap();
        let c = redact(&[pan_finding()], &other).unwrap();
        assert_ne!(a[0].entities[0].value, c[0].entities[0].value);
    }

    #[test]
    fn redact_is_idempotent_and_count_preserving() {
        let policy = RedactionPolicy::uniform("mask", None).unwrap();
        let once = redact(&[pan_finding()], &policy).unwrap();
        let twice = redact(&once, &policy).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.len(), 1);
        assert_eq!(once[0].entities.len(), 1);
    }

    #[test]
    fn keep_policy_is_a_no_op() {
        let policy = RedactionPolicy::uniform("keep", None).unwrap();
        let out = redact(&[pan_finding()], &policy).unwrap();
        assert_eq!(out[0], pan_finding());
    }
}
