//! Privacy-framework grading.
//!
//! Findings are mapped to privacy concepts, graded per stakeholder group,
//! and aggregated into a report reproducing the summary-table arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::content::{EntityKind, Finding, FindingCategory};
use crate::ingest::{Direction, Link};
use crate::registry::{BlockLevel, RegistrantKind, StakeholderClass};

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum PrivacyConcept {
    #[serde(rename = "EXISTENCE")]
    Existence,
    #[serde(rename = "INTENTION")]
    Intention,
    #[serde(rename = "STATUS")]
    Status,
    #[serde(rename = "PASSENGER_CARGO")]
    PassengerCargo,
}

impl PrivacyConcept {
    pub const ALL: [PrivacyConcept; 4] = [
        PrivacyConcept::Existence,
        PrivacyConcept::Intention,
        PrivacyConcept::Status,
        PrivacyConcept::PassengerCargo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PrivacyConcept::Existence => "EXISTENCE",
            PrivacyConcept::Intention => "INTENTION",
            PrivacyConcept::Status => "STATUS",
            PrivacyConcept::PassengerCargo => "PASSENGER_CARGO",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "EXISTENCE" => PrivacyConcept::Existence,
            "INTENTION" => PrivacyConcept::Intention,
            "STATUS" => PrivacyConcept::Status,
            "PASSENGER_CARGO" => PrivacyConcept::PassengerCargo,
            _ => return None,
        })
    }
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum RequirementLevel {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "LOW")]
    Low,
    #[serde(rename = "HIGH")]
    High,
}

impl RequirementLevel {
    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "NONE" => RequirementLevel::None,
            "LOW" => RequirementLevel::Low,
            "HIGH" => RequirementLevel::High,
            _ => return None,
        })
    }
}

/// Breach grades; `NO_EVIDENCE < EVIDENCE < EXPLICIT` so max-aggregation
/// keeps the worst observed leak.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum BreachGrade {
    #[serde(rename = "NO_EVIDENCE")]
    NoEvidence,
    #[serde(rename = "EVIDENCE")]
    Evidence,
    #[serde(rename = "EXPLICIT")]
    Explicit,
}

impl BreachGrade {
    /// Single-letter cell rendering.
    pub fn letter(&self) -> &'static str {
        match self {
            BreachGrade::NoEvidence => "N",
            BreachGrade::Evidence => "V",
            BreachGrade::Explicit => "X",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BreachGrade::NoEvidence => "NO_EVIDENCE",
            BreachGrade::Evidence => "EVIDENCE",
            BreachGrade::Explicit => "EXPLICIT",
        }
    }
}

/// Per-group privacy requirements; affects rendering (`N/A` where the
/// requirement is NONE) and severity annotations, never the grade itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequirementMatrix {
    levels: BTreeMap<StakeholderClass, BTreeMap<PrivacyConcept, RequirementLevel>>,
    /// The military EXISTENCE requirement assumes operational flights, not
    /// training or similar.
    pub military_existence_caveat: bool,
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("requirement override line {line}: {detail}")]
    Malformed { line: usize, detail: String },
}

impl Default for RequirementMatrix {
    fn default() -> Self {
        use PrivacyConcept::*;
        use RequirementLevel::*;
        let rows: [(StakeholderClass, [RequirementLevel; 4]); 4] = [
            (StakeholderClass::Business, [Low, High, High, High]),
            (StakeholderClass::Commercial, [None, None, None, High]),
            (StakeholderClass::Military, [High, High, High, High]),
            (StakeholderClass::State, [Low, High, High, High]),
        ];
        let mut levels = BTreeMap::new();
        for (class, lv) in rows {
            let row: BTreeMap<_, _> = [Existence, Intention, Status, PassengerCargo]
                .into_iter()
                .zip(lv)
                .collect();
            levels.insert(class, row);
        }
        RequirementMatrix {
            levels,
            military_existence_caveat: true,
        }
    }
}

impl RequirementMatrix {
    pub fn level(&self, class: StakeholderClass, concept: PrivacyConcept) -> RequirementLevel {
        self.levels
            .get(&class)
            .and_then(|row| row.get(&concept))
            .copied()
            .unwrap_or(RequirementLevel::None)
    }

    /// Apply a CSV override file: `stakeholder,concept,level`, one cell per
    /// line; a header line and `#` comments are allowed.
    pub fn apply_overrides(&mut self, text: &str) -> Result<(), MatrixError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if idx == 0 && line.eq_ignore_ascii_case("stakeholder,concept,level") {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(s), Some(c), Some(l), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(MatrixError::Malformed {
                    line: idx + 1,
                    detail: "expected stakeholder,concept,level".into(),
                });
            };
            let class = StakeholderClass::from_str(s.trim()).ok_or(MatrixError::Malformed {
                line: idx + 1,
                detail: format!("unknown stakeholder {s:?}"),
            })?;
            let concept = PrivacyConcept::from_str(c.trim()).ok_or(MatrixError::Malformed {
                line: idx + 1,
                detail: format!("unknown concept {c:?}"),
            })?;
            let level = RequirementLevel::from_str(l.trim()).ok_or(MatrixError::Malformed {
                line: idx + 1,
                detail: format!("unknown level {l:?}"),
            })?;
            self.levels.entry(class).or_default().insert(concept, level);
        }
        Ok(())
    }
}

/// Map one finding to the privacy concepts it breaches.
///
/// Every message leaks existence explicitly. Positions on the observed
/// downlink leak status explicitly; intention categories are explicit only
/// when endpoints were extracted; passenger categories are explicit when
/// name/PAN entities are on the observed link and evidence-grade when the
/// message merely solicits such data from the unobserved side.
pub fn concept_of(finding: &Finding, direction: Direction) -> Vec<(PrivacyConcept, BreachGrade)> {
    use BreachGrade::*;
    use PrivacyConcept::*;
    let mut out = vec![(Existence, Explicit)];
    match finding.category {
        FindingCategory::PositionReport => {
            let grade = if direction == Direction::Downlink { Explicit } else { Evidence };
            out.push((Status, grade));
        }
        FindingCategory::Clearance
        | FindingCategory::AtisRequest
        | FindingCategory::FlightPlan
        | FindingCategory::WeatherReport => {
            let grade = if finding.has_entity(EntityKind::Aerodrome) { Explicit } else { Evidence };
            out.push((Intention, grade));
        }
        FindingCategory::PassengerManifest
        | FindingCategory::MedicalFull
        | FindingCategory::CardFull => {
            let grade = if finding.has_entity(EntityKind::Name) || finding.has_entity(EntityKind::Pan)
            {
                Explicit
            } else {
                Evidence
            };
            out.push((PassengerCargo, grade));
        }
        FindingCategory::CardPartial
        | FindingCategory::CardContext
        | FindingCategory::MedicalContext
        | FindingCategory::EmailAddress => out.push((PassengerCargo, Evidence)),
        FindingCategory::EncryptedWeak => out.push((Status, Evidence)),
        FindingCategory::ExistenceOnly => {}
    }
    out
}

/// One message with everything grading needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MessageContext {
    pub record_id: String,
    pub timestamp: i64,
    pub link: Link,
    pub direction: Direction,
    pub registration: Option<String>,
    pub stakeholder: StakeholderClass,
    pub blocked: Option<BlockLevel>,
    pub findings: Vec<Finding>,
}

/// Aircraft/message tallies for one (stakeholder, link) row. Aircraft are
/// kept as registration sets so sharded grading merges exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCounter {
    pub aircraft: BTreeSet<String>,
    pub blocked_aircraft: BTreeSet<String>,
    pub messages: u64,
    pub blocked_messages: u64,
}

impl RowCounter {
    pub fn merge(&mut self, other: &RowCounter) {
        self.aircraft.extend(other.aircraft.iter().cloned());
        self.blocked_aircraft.extend(other.blocked_aircraft.iter().cloned());
        self.messages += other.messages;
        self.blocked_messages += other.blocked_messages;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Max breach grade per (stakeholder, concept); all graded groups are
    /// present even when empty.
    pub cells: BTreeMap<StakeholderClass, BTreeMap<PrivacyConcept, BreachGrade>>,
    /// Tallies per stakeholder split by link.
    pub counters: BTreeMap<StakeholderClass, BTreeMap<Link, RowCounter>>,
    pub matrix: RequirementMatrix,
    /// Config identity: name → content hash.
    pub provenance: BTreeMap<String, String>,
}

impl AuditReport {
    pub fn empty(matrix: RequirementMatrix) -> Self {
        let mut cells = BTreeMap::new();
        for class in StakeholderClass::GRADED {
            let row: BTreeMap<_, _> = PrivacyConcept::ALL
                .into_iter()
                .map(|c| (c, BreachGrade::NoEvidence))
                .collect();
            cells.insert(class, row);
        }
        AuditReport {
            cells,
            counters: BTreeMap::new(),
            matrix,
            provenance: BTreeMap::new(),
        }
    }

    pub fn grade(&self, class: StakeholderClass, concept: PrivacyConcept) -> BreachGrade {
        self.cells
            .get(&class)
            .and_then(|row| row.get(&concept))
            .copied()
            .unwrap_or(BreachGrade::NoEvidence)
    }

    /// Rendered cell: `N/A` where the requirement is NONE, else N/V/X.
    pub fn cell(&self, class: StakeholderClass, concept: PrivacyConcept) -> &'static str {
        if self.matrix.level(class, concept) == RequirementLevel::None {
            "N/A"
        } else {
            self.grade(class, concept).letter()
        }
    }

    /// Severity annotation: the (requirement, grade) pair, never folded
    /// into one scalar.
    pub fn severity(
        &self,
        class: StakeholderClass,
        concept: PrivacyConcept,
    ) -> (RequirementLevel, BreachGrade) {
        (self.matrix.level(class, concept), self.grade(class, concept))
    }

    /// Corpus-wide tallies per stakeholder, derived from the per-link rows.
    pub fn totals(&self) -> BTreeMap<StakeholderClass, RowCounter> {
        let mut out = BTreeMap::new();
        for (class, by_link) in &self.counters {
            let total: &mut RowCounter = out.entry(*class).or_default();
            for row in by_link.values() {
                total.merge(row);
            }
        }
        out
    }

    pub fn counter(&self, class: StakeholderClass, link: Link) -> Option<&RowCounter> {
        self.counters.get(&class)?.get(&link)
    }

    /// Cell-wise max + counter union/sum. Associative and commutative, and
    /// `empty` is the unit, so sharded grading merges to the whole-corpus
    /// result.
    pub fn merge(&mut self, other: &AuditReport) {
        for (class, row) in &other.cells {
            let own = self.cells.entry(*class).or_default();
            for (concept, grade) in row {
                let cell = own.entry(*concept).or_insert(BreachGrade::NoEvidence);
                *cell = (*cell).max(*grade);
            }
        }
        for (class, by_link) in &other.counters {
            let own = self.counters.entry(*class).or_default();
            for (link, counter) in by_link {
                own.entry(*link).or_default().merge(counter);
            }
        }
        for (k, v) in &other.provenance {
            self.provenance.insert(k.clone(), v.clone());
        }
    }
}

/// Grade a corpus of message contexts.
pub fn grade_matrix(messages: &[MessageContext], matrix: &RequirementMatrix) -> AuditReport {
    let mut report = AuditReport::empty(matrix.clone());
    for msg in messages {
        let row = report
            .counters
            .entry(msg.stakeholder)
            .or_default()
            .entry(msg.link)
            .or_default();
        let reg = msg
            .registration
            .clone()
            .unwrap_or_else(|| format!("?{}", msg.record_id));
        row.messages += 1;
        row.aircraft.insert(reg.clone());
        if msg.blocked.is_some() {
            row.blocked_messages += 1;
            row.blocked_aircraft.insert(reg);
        }
        if !StakeholderClass::GRADED.contains(&msg.stakeholder) {
            continue;
        }
        let cells = report.cells.entry(msg.stakeholder).or_default();
        for finding in &msg.findings {
            for (concept, grade) in concept_of(finding, msg.direction) {
                let cell = cells.entry(concept).or_insert(BreachGrade::NoEvidence);
                *cell = (*cell).max(grade);
            }
        }
        // a message with no findings still proves existence
        if msg.findings.is_empty() {
            let cell = cells
                .entry(PrivacyConcept::Existence)
                .or_insert(BreachGrade::NoEvidence);
            *cell = (*cell).max(BreachGrade::Explicit);
        }
    }
    report
}

/// Round-half-up percentage with two decimals, `—` on a zero denominator.
pub fn percent(numerator: u64, denominator: u64) -> String {
    if denominator == 0 {
        return "—".to_string();
    }
    let (n, d) = (numerator as u128, denominator as u128);
    let r = (n * 20000 + d) / (2 * d);
    format!("{}.{:02}%", r / 100, r % 100)
}

/// One classified, enriched aircraft for the ownership summaries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifiedAircraft {
    pub registration: String,
    pub class: StakeholderClass,
    pub kind: RegistrantKind,
    pub country: Option<String>,
}

/// Count OFFSHORE_SHELL business aircraft per registration territory.
/// Territories with at most `threshold` occurrences are dropped; rows sort
/// by descending count, then name.
pub fn offshore_summary(aircraft: &[ClassifiedAircraft], threshold: u64) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for ac in aircraft {
        if ac.class == StakeholderClass::Business && ac.kind == RegistrantKind::OffshoreShell {
            if let Some(country) = &ac.country {
                *counts.entry(country).or_insert(0) += 1;
            }
        }
    }
    let mut rows: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|&(_, n)| n > threshold)
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    rows
}

pub const DEFAULT_OFFSHORE_THRESHOLD: u64 = 5;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{Confidence, Entity};

    fn finding(category: FindingCategory, entities: Vec<Entity>) -> Finding {
        Finding {
            message_ref: "t:1".into(),
            category,
            entities,
            confidence: Confidence::High,
        }
    }

    fn entity(kind: EntityKind, value: &str) -> Entity {
        Entity {
            kind,
            value: value.into(),
            span: (0, value.len()),
            redacted: false,
        }
    }

    fn ctx(
        stakeholder: StakeholderClass,
        link: Link,
        direction: Direction,
        findings: Vec<Finding>,
    ) -> MessageContext {
        MessageContext {
            record_id: "t:1".into(),
            timestamp: 1_600_000_000,
            link,
            direction,
            registration: Some("N123AB".into()),
            stakeholder,
            blocked: None,
            findings,
        }
    }

    #[test]
    fn position_downlink_is_explicit_status() {
        let f = finding(FindingCategory::PositionReport, vec![]);
        let got = concept_of(&f, Direction::Downlink);
        assert!(got.contains(&(PrivacyConcept::Existence, BreachGrade::Explicit)));
        assert!(got.contains(&(PrivacyConcept::Status, BreachGrade::Explicit)));
    }

    #[test]
    fn position_uplink_is_only_evidence() {
        let f = finding(FindingCategory::PositionReport, vec![]);
        let got = concept_of(&f, Direction::Uplink);
        assert!(got.contains(&(PrivacyConcept::Status, BreachGrade::Evidence)));
    }

    #[test]
    fn medical_context_uplink_is_passenger_evidence() {
        let f = finding(FindingCategory::MedicalContext, vec![entity(EntityKind::Logistics, "MEDICS")]);
        let got = concept_of(&f, Direction::Uplink);
        assert!(got.contains(&(PrivacyConcept::PassengerCargo, BreachGrade::Evidence)));
        assert!(!got
            .iter()
            .any(|&(c, g)| c == PrivacyConcept::PassengerCargo && g == BreachGrade::Explicit));
    }

    #[test]
    fn existence_only_yields_existence_alone() {
        let f = finding(FindingCategory::ExistenceOnly, vec![]);
        let got = concept_of(&f, Direction::Downlink);
        assert_eq!(got, vec![(PrivacyConcept::Existence, BreachGrade::Explicit)]);
    }

    #[test]
    fn intention_needs_endpoints_for_explicit() {
        let with = finding(
            FindingCategory::AtisRequest,
            vec![entity(EntityKind::Aerodrome, "EGLL")],
        );
        let without = finding(FindingCategory::AtisRequest, vec![]);
        assert!(concept_of(&with, Direction::Uplink)
            .contains(&(PrivacyConcept::Intention, BreachGrade::Explicit)));
        assert!(concept_of(&without, Direction::Uplink)
            .contains(&(PrivacyConcept::Intention, BreachGrade::Evidence)));
    }

    #[test]
    fn empty_corpus_grades_all_no_evidence() {
        let report = grade_matrix(&[], &RequirementMatrix::default());
        for class in StakeholderClass::GRADED {
            for concept in PrivacyConcept::ALL {
                assert_eq!(report.grade(class, concept), BreachGrade::NoEvidence);
            }
        }
    }

    #[test]
    fn single_atis_uplink_traced_by_hand() {
        let f = finding(
            FindingCategory::AtisRequest,
            vec![entity(EntityKind::Aerodrome, "EGLL")],
        );
        let report = grade_matrix(
            &[ctx(StakeholderClass::Business, Link::VhfPoa, Direction::Uplink, vec![f])],
            &RequirementMatrix::default(),
        );
        use PrivacyConcept::*;
        assert_eq!(report.grade(StakeholderClass::Business, Intention), BreachGrade::Explicit);
        assert_eq!(report.grade(StakeholderClass::Business, Existence), BreachGrade::Explicit);
        assert!(report.grade(StakeholderClass::Business, Status) <= BreachGrade::Evidence);
        assert!(report.grade(StakeholderClass::Business, PassengerCargo) <= BreachGrade::Evidence);
    }

    #[test]
    fn requirement_level_never_changes_grade() {
        let f = finding(FindingCategory::PositionReport, vec![]);
        let msgs =
            vec![ctx(StakeholderClass::Commercial, Link::VhfPoa, Direction::Downlink, vec![f])];
        let defaults = grade_matrix(&msgs, &RequirementMatrix::default());
        let mut strict = RequirementMatrix::default();
        strict.apply_overrides("COMMERCIAL,STATUS,HIGH").unwrap();
        let overridden = grade_matrix(&msgs, &strict);
        assert_eq!(
            defaults.grade(StakeholderClass::Commercial, PrivacyConcept::Status),
            overridden.grade(StakeholderClass::Commercial, PrivacyConcept::Status),
        );
        // rendering differs: N/A vs the letter
        assert_eq!(defaults.cell(StakeholderClass::Commercial, PrivacyConcept::Status), "N/A");
        assert_eq!(overridden.cell(StakeholderClass::Commercial, PrivacyConcept::Status), "X");
    }

    #[test]
    fn matrix_defaults_match_reference_table() {
        use PrivacyConcept::*;
        use RequirementLevel::*;
        let m = RequirementMatrix::default();
        assert_eq!(m.level(StakeholderClass::Business, Existence), Low);
        assert_eq!(m.level(StakeholderClass::Business, PassengerCargo), High);
        assert_eq!(m.level(StakeholderClass::Commercial, Existence), None);
        assert_eq!(m.level(StakeholderClass::Commercial, PassengerCargo), High);
        for c in PrivacyConcept::ALL {
            assert_eq!(m.level(StakeholderClass::Military, c), High);
        }
        assert_eq!(m.level(StakeholderClass::State, Existence), Low);
        assert_eq!(m.level(StakeholderClass::State, Status), High);
        assert!(m.military_existence_caveat);
    }

    #[test]
    fn bad_override_line_is_rejected() {
        let mut m = RequirementMatrix::default();
        assert!(m.apply_overrides("BUSINESS,EXISTENCE").is_err());
        assert!(m.apply_overrides("PIRATE,EXISTENCE,LOW").is_err());
    }

    #[test]
    fn counters_track_blocked_and_links() {
        let mut a = ctx(StakeholderClass::Business, Link::VhfPoa, Direction::Downlink, vec![]);
        a.blocked = Some(BlockLevel::Agency);
        let mut b = ctx(StakeholderClass::Business, Link::SatcomUplink, Direction::Uplink, vec![]);
        b.registration = Some("N77XY".into());
        let report = grade_matrix(&[a.clone(), a, b], &RequirementMatrix::default());
        let vhf = report.counter(StakeholderClass::Business, Link::VhfPoa).unwrap();
        assert_eq!(vhf.messages, 2);
        assert_eq!(vhf.blocked_messages, 2);
        assert_eq!(vhf.aircraft.len(), 1);
        let totals = report.totals();
        let b_tot = &totals[&StakeholderClass::Business];
        assert_eq!(b_tot.messages, 3);
        assert_eq!(b_tot.aircraft.len(), 2);
        assert!(b_tot.blocked_messages <= b_tot.messages);
    }

    #[test]
    fn merge_is_commutative_on_small_case() {
        let f = finding(FindingCategory::PositionReport, vec![]);
        let m1 = vec![ctx(StakeholderClass::Business, Link::VhfPoa, Direction::Downlink, vec![f])];
        let m2 = vec![ctx(StakeholderClass::State, Link::SatcomUplink, Direction::Uplink, vec![])];
        let matrix = RequirementMatrix::default();
        let mut ab = grade_matrix(&m1, &matrix);
        ab.merge(&grade_matrix(&m2, &matrix));
        let mut ba = grade_matrix(&m2, &matrix);
        ba.merge(&grade_matrix(&m1, &matrix));
        assert_eq!(ab, ba);
        let whole: Vec<MessageContext> = m1.into_iter().chain(m2).collect();
        assert_eq!(ab, grade_matrix(&whole, &matrix));
    }

    #[test]
    fn percent_reference_values() {
        assert_eq!(percent(1617, 1701), "95.06%");
        assert_eq!(percent(171, 6645), "2.57%");
        assert_eq!(percent(418, 438), "95.43%");
        assert_eq!(percent(81, 143), "56.64%");
        assert_eq!(percent(2287, 8927), "25.62%");
        assert_eq!(percent(0, 5), "0.00%");
        assert_eq!(percent(1, 0), "—");
    }

    #[test]
    fn percent_rounds_half_up() {
        assert_eq!(percent(1, 8), "12.50%");
        assert_eq!(percent(1, 800), "0.13%"); // 0.125 rounds up
        assert_eq!(percent(1, 3), "33.33%");
        assert_eq!(percent(2, 3), "66.67%");
        assert_eq!(percent(5, 5), "100.00%");
    }

    fn shell(reg: &str, country: &str) -> ClassifiedAircraft {
        ClassifiedAircraft {
            registration: reg.into(),
            class: StakeholderClass::Business,
            kind: RegistrantKind::OffshoreShell,
            country: Some(country.into()),
        }
    }

    #[test]
    fn offshore_summary_orders_and_filters() {
        let mut fleet = Vec::new();
        for (n, country) in [(7, "Malta"), (9, "Isle of Man"), (6, "Bermuda"), (5, "Aruba")] {
            for i in 0..n {
                fleet.push(shell(&format!("{country}-{i}"), country));
            }
        }
        fleet.push(ClassifiedAircraft {
            registration: "N1D".into(),
            class: StakeholderClass::Business,
            kind: RegistrantKind::Direct,
            country: Some("Malta".into()),
        });
        let rows = offshore_summary(&fleet, DEFAULT_OFFSHORE_THRESHOLD);
        assert_eq!(
            rows,
            vec![
                ("Isle of Man".to_string(), 9),
                ("Malta".to_string(), 7),
                ("Bermuda".to_string(), 6),
            ]
        );
        // exactly-at-threshold territory (Aruba, 5) is excluded
        assert!(!rows.iter().any(|(t, _)| t == "Aruba"));
    }

    #[test]
    fn offshore_summary_all_direct_is_empty() {
        let fleet = vec![ClassifiedAircraft {
            registration: "N1".into(),
            class: StakeholderClass::Business,
            kind: RegistrantKind::Direct,
            country: Some("Malta".into()),
        }];
        assert!(offshore_summary(&fleet, 5).is_empty());
    }
}
