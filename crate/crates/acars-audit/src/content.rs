//! Privacy-sensitive content detectors.
//!
//! Each detector is a pure function of the parsed message (plus the loaded
//! keyword tables) and they are independent of each other: running them in
//! any order yields the same findings.

use std::collections::HashSet;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::parse::{AcarsMessage, LabelCategory, LabelRegistry};

/// Detected leak categories.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum FindingCategory {
    #[serde(rename = "POSITION_REPORT")]
    PositionReport,
    #[serde(rename = "CLEARANCE")]
    Clearance,
    #[serde(rename = "ATIS_REQUEST")]
    AtisRequest,
    #[serde(rename = "FLIGHT_PLAN")]
    FlightPlan,
    #[serde(rename = "WEATHER_REPORT")]
    WeatherReport,
    #[serde(rename = "CARD_FULL")]
    CardFull,
    #[serde(rename = "CARD_PARTIAL")]
    CardPartial,
    #[serde(rename = "CARD_CONTEXT")]
    CardContext,
    #[serde(rename = "MEDICAL_FULL")]
    MedicalFull,
    #[serde(rename = "MEDICAL_CONTEXT")]
    MedicalContext,
    #[serde(rename = "PASSENGER_MANIFEST")]
    PassengerManifest,
    #[serde(rename = "EMAIL_ADDRESS")]
    EmailAddress,
    #[serde(rename = "ENCRYPTED_WEAK")]
    EncryptedWeak,
    #[serde(rename = "EXISTENCE_ONLY")]
    ExistenceOnly,
}

impl FindingCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            FindingCategory::PositionReport => "POSITION_REPORT",
            FindingCategory::Clearance => "CLEARANCE",
            FindingCategory::AtisRequest => "ATIS_REQUEST",
            FindingCategory::FlightPlan => "FLIGHT_PLAN",
            FindingCategory::WeatherReport => "WEATHER_REPORT",
            FindingCategory::CardFull => "CARD_FULL",
            FindingCategory::CardPartial => "CARD_PARTIAL",
            FindingCategory::CardContext => "CARD_CONTEXT",
            FindingCategory::MedicalFull => "MEDICAL_FULL",
            FindingCategory::MedicalContext => "MEDICAL_CONTEXT",
            FindingCategory::PassengerManifest => "PASSENGER_MANIFEST",
            FindingCategory::EmailAddress => "EMAIL_ADDRESS",
            FindingCategory::EncryptedWeak => "ENCRYPTED_WEAK",
            FindingCategory::ExistenceOnly => "EXISTENCE_ONLY",
        }
    }
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Position,
    Aerodrome,
    Pan,
    MaskedPan,
    Cvv,
    Expiry,
    Amount,
    AuthCode,
    Name,
    Seat,
    FlightNumber,
    Condition,
    Logistics,
    Email,
}

impl EntityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntityKind::Position => "position",
            EntityKind::Aerodrome => "aerodrome",
            EntityKind::Pan => "pan",
            EntityKind::MaskedPan => "masked_pan",
            EntityKind::Cvv => "cvv",
            EntityKind::Expiry => "expiry",
            EntityKind::Amount => "amount",
            EntityKind::AuthCode => "auth_code",
            EntityKind::Name => "name",
            EntityKind::Seat => "seat",
            EntityKind::FlightNumber => "flight_number",
            EntityKind::Condition => "condition",
            EntityKind::Logistics => "logistics",
            EntityKind::Email => "email",
        }
    }
}

/// One extracted entity; `span` is a byte range into the message text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub kind: EntityKind,
    pub value: String,
    pub span: (usize, usize),
    /// Set once a redaction rule has transformed the value.
    #[serde(default)]
    pub redacted: bool,
}

impl Entity {
    fn new(kind: EntityKind, value: impl Into<String>, span: (usize, usize)) -> Self {
        Entity {
            kind,
            value: value.into(),
            span,
            redacted: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Low,
    Medium,
    High,
}

/// One detected leak.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    /// Record id of the originating message; filled by [`Detectors::run`].
    pub message_ref: String,
    pub category: FindingCategory,
    pub entities: Vec<Entity>,
    pub confidence: Confidence,
}

impl Finding {
    fn new(category: FindingCategory, entities: Vec<Entity>, confidence: Confidence) -> Self {
        Finding {
            message_ref: String::new(),
            category,
            entities,
            confidence,
        }
    }

    pub fn has_entity(&self, kind: EntityKind) -> bool {
        self.entities.iter().any(|e| e.kind == kind)
    }
}

/// A latitude/longitude extracted from message text.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub lat: f64,
    pub lon: f64,
}

impl Position {
    pub fn new(lat: f64, lon: f64) -> Option<Self> {
        ((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon))
            .then_some(Position { lat, lon })
    }

    /// Canonical entity value: `lat,lon` with six decimals.
    pub fn canonical(&self) -> String {
        format!("{:.6},{:.6}", self.lat, self.lon)
    }

    pub fn from_canonical(s: &str) -> Option<Self> {
        let (lat, lon) = s.split_once(',')?;
        Position::new(lat.parse().ok()?, lon.parse().ok()?)
    }

    /// Hemisphere-prefixed decimal degrees, e.g. `N47.46 E008.54`.
    pub fn format_decimal(&self) -> String {
        let (ns, lat) = if self.lat < 0.0 { ('S', -self.lat) } else { ('N', self.lat) };
        let (ew, lon) = if self.lon < 0.0 { ('W', -self.lon) } else { ('E', self.lon) };
        format!("{ns}{lat:05.2} {ew}{lon:06.2}")
    }

    /// Degrees plus decimal minutes, e.g. `N 47 27.6 E 008 32.7`.
    pub fn format_degrees_minutes(&self) -> String {
        let (ns, lat) = if self.lat < 0.0 { ('S', -self.lat) } else { ('N', self.lat) };
        let (ew, lon) = if self.lon < 0.0 { ('W', -self.lon) } else { ('E', self.lon) };
        let lat_d = lat.trunc();
        let lat_m = (lat - lat_d) * 60.0;
        let lon_d = lon.trunc();
        let lon_m = (lon - lon_d) * 60.0;
        format!(
            "{ns} {:02} {:04.1} {ew} {:03} {:04.1}",
            lat_d as u32, lat_m, lon_d as u32, lon_m
        )
    }
}

/// Verify a digit string with the mod-10 doubling checksum.
///
/// Input must be 12-19 digits; anything else is rejected as `None` rather
/// than guessed at.
pub fn luhn_valid(digits: &str) -> Option<bool> {
    if !(12..=19).contains(&digits.len()) || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut sum = 0u32;
    for (i, b) in digits.bytes().rev().enumerate() {
        let mut d = (b - b'0') as u32;
        if i % 2 == 1 {
            d *= 2;
            if d > 9 {
                d -= 9;
            }
        }
        sum += d;
    }
    Some(sum.is_multiple_of(10))
}

/// Keyword tables for the medical/manifest detectors.
#[derive(Clone, Debug, Default)]
pub struct KeywordTables {
    pub conditions: Vec<String>,
    pub logistics: Vec<String>,
    pub surnames: HashSet<String>,
}

impl KeywordTables {
    /// Parse the sectioned keyword file. Sections switch on comment lines of
    /// the form `# section: <name>`; entries are one token or phrase per line.
    pub fn from_text(text: &str) -> Self {
        let mut tables = KeywordTables::default();
        let mut section = "";
        let mut conditions = Vec::new();
        let mut logistics = Vec::new();
        let mut surnames = HashSet::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(name) = comment.trim().strip_prefix("section:") {
                    section = match name.trim() {
                        "conditions" => "conditions",
                        "logistics" => "logistics",
                        "surnames" => "surnames",
                        _ => "",
                    };
                }
                continue;
            }
            let token = line.to_ascii_uppercase();
            match section {
                "conditions" => conditions.push(token),
                "logistics" => logistics.push(token),
                "surnames" => {
                    surnames.insert(token);
                }
                _ => {}
            }
        }
        tables.conditions = conditions;
        tables.logistics = logistics;
        tables.surnames = surnames;
        tables
    }

    pub fn shipped() -> Self {
        Self::from_text(crate::defaults::KEYWORDS)
    }
}

/// Load an aerodrome gazetteer: one 4-letter designator per line.
pub fn load_gazetteer(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| l.len() == 4 && !l.starts_with('#'))
        .map(str::to_ascii_uppercase)
        .collect()
}

struct Patterns {
    pos_decimal: Regex,
    pos_deg_min: Regex,
    pan: Regex,
    masked_pan: Regex,
    cvv: Regex,
    expiry: Regex,
    amount: Regex,
    auth_code: Regex,
    auth_outcome: Regex,
    email: Regex,
    surname_initial: Regex,
    word: Regex,
    seat: Regex,
    flight_no: Regex,
    designator: Regex,
}

impl Patterns {
    fn new() -> Self {
        Patterns {
            pos_decimal: Regex::new(
                r"\b([NS])(\d{1,2}\.\d+)\s+([EW])(\d{1,3}\.\d+)",
            )
            .unwrap(),
            pos_deg_min: Regex::new(
                r"\b([NS]) (\d{1,2}) (\d{1,2}\.\d) ([EW]) (\d{1,3}) (\d{1,2}\.\d)\b",
            )
            .unwrap(),
            pan: Regex::new(r"(?:^|[^\d])(\d(?:[ -]?\d){11,18})(?:[^\d]|$)").unwrap(),
            masked_pan: Regex::new(r"\b(?:\d{4,6}[X\*]{4,12}\d{2,4}|[X\*]{8,12}\d{4})\b").unwrap(),
            cvv: Regex::new(r"\bCV[CV]\s*:?\s*(\d{3,4})\b").unwrap(),
            expiry: Regex::new(r"\bEXP(?:IRY)?\.?\s*:?\s*(\d{2}/\d{2})\b").unwrap(),
            amount: Regex::new(r"\b(USD|EUR|GBP|CHF)\s?(\d+(?:\.\d{2})?)\b").unwrap(),
            auth_code: Regex::new(r"\bAUTH\.?(?:\s*CODE)?\s*:?\s*([A-Z0-9]{4,8})\b").unwrap(),
            auth_outcome: Regex::new(r"\b(APPROVED|AUTHORIZED|AUTHORISED|DENIED|DECLINED)\b")
                .unwrap(),
            email: Regex::new(
                r"(?i)\b[A-Z0-9._%+-]+@[A-Z0-9](?:[A-Z0-9-]*[A-Z0-9])?(?:\.[A-Z0-9-]+)*\.[A-Z]{2,}\b",
            )
            .unwrap(),
            surname_initial: Regex::new(r"\b([A-Z]{2,15})/([A-Z]{1,2})\b").unwrap(),
            word: Regex::new(r"\b[A-Z]{2,15}\b").unwrap(),
            seat: Regex::new(r"\b(\d{1,2}[A-L])\b").unwrap(),
            flight_no: Regex::new(r"\b([A-Z]{2}\d{2,4})\b").unwrap(),
            designator: Regex::new(r"\b([A-Z]{4})\b").unwrap(),
        }
    }
}

/// All detectors plus their configuration tables.
pub struct Detectors {
    labels: LabelRegistry,
    gazetteer: HashSet<String>,
    keywords: KeywordTables,
    /// Max distance in bytes between a PAN and its corroborating entities.
    pub proximity_window: usize,
    patterns: Patterns,
}

impl Detectors {
    pub fn new(labels: LabelRegistry, gazetteer: HashSet<String>, keywords: KeywordTables) -> Self {
        Detectors {
            labels,
            gazetteer,
            keywords,
            proximity_window: 80,
            patterns: Patterns::new(),
        }
    }

    pub fn shipped() -> Self {
        Self::new(
            LabelRegistry::shipped(),
            load_gazetteer(crate::defaults::GAZETTEER),
            KeywordTables::shipped(),
        )
    }

    /// Run every detector and tag findings with the source record id.
    pub fn run(&self, msg: &AcarsMessage, record_id: &str) -> Vec<Finding> {
        let mut findings = Vec::new();
        findings.extend(self.detect_position(msg));
        findings.extend(self.detect_intention(msg));
        findings.extend(self.detect_card(msg));
        findings.extend(self.detect_medical(msg));
        findings.extend(self.detect_passenger_manifest(msg));
        findings.extend(self.detect_email(msg));
        for f in &mut findings {
            f.message_ref = record_id.to_string();
        }
        findings
    }

    /// Extract positions from hemisphere-prefixed decimal degrees or
    /// degrees + decimal-minutes text.
    pub fn detect_position(&self, msg: &AcarsMessage) -> Option<Finding> {
        let text = &msg.text;
        let mut entities = Vec::new();
        for cap in self.patterns.pos_decimal.captures_iter(text) {
            let lat: f64 = cap[2].parse().ok()?;
            let lon: f64 = cap[4].parse().ok()?;
            let lat = if &cap[1] == "S" { -lat } else { lat };
            let lon = if &cap[3] == "W" { -lon } else { lon };
            if let Some(pos) = Position::new(lat, lon) {
                let m = cap.get(0).unwrap();
                entities.push(Entity::new(EntityKind::Position, pos.canonical(), (m.start(), m.end())));
            }
        }
        for cap in self.patterns.pos_deg_min.captures_iter(text) {
            let lat_d: f64 = cap[2].parse().ok()?;
            let lat_m: f64 = cap[3].parse().ok()?;
            let lon_d: f64 = cap[5].parse().ok()?;
            let lon_m: f64 = cap[6].parse().ok()?;
            if lat_m >= 60.0 || lon_m >= 60.0 {
                continue;
            }
            let lat = lat_d + lat_m / 60.0;
            let lon = lon_d + lon_m / 60.0;
            let lat = if &cap[1] == "S" { -lat } else { lat };
            let lon = if &cap[4] == "W" { -lon } else { lon };
            if let Some(pos) = Position::new(lat, lon) {
                let m = cap.get(0).unwrap();
                entities.push(Entity::new(EntityKind::Position, pos.canonical(), (m.start(), m.end())));
            }
        }
        (!entities.is_empty()).then(|| {
            Finding::new(FindingCategory::PositionReport, entities, Confidence::High)
        })
    }

    /// Intention leaks: label-routed clearance/ATIS/flight-plan/weather
    /// services, with gazetteer-matched aerodromes as endpoint entities.
    pub fn detect_intention(&self, msg: &AcarsMessage) -> Option<Finding> {
        let category = match self.labels.lookup(&msg.label).category {
            LabelCategory::Clearance => FindingCategory::Clearance,
            LabelCategory::AtisRequest => FindingCategory::AtisRequest,
            LabelCategory::FlightPlan => FindingCategory::FlightPlan,
            LabelCategory::Weather => FindingCategory::WeatherReport,
            _ => return None,
        };
        let mut entities = Vec::new();
        for cap in self.patterns.designator.captures_iter(&msg.text) {
            let m = cap.get(1).unwrap();
            if self.gazetteer.contains(m.as_str()) {
                entities.push(Entity::new(EntityKind::Aerodrome, m.as_str(), (m.start(), m.end())));
            }
        }
        let confidence = if entities.is_empty() { Confidence::Medium } else { Confidence::High };
        Some(Finding::new(category, entities, confidence))
    }

    fn pan_candidates(&self, text: &str) -> Vec<(String, (usize, usize))> {
        let mut out = Vec::new();
        let mut search_from = 0;
        while let Some(cap) = self.patterns.pan.captures_at(text, search_from) {
            let m = cap.get(1).unwrap();
            let digits: String = m.as_str().chars().filter(|c| c.is_ascii_digit()).collect();
            if (12..=19).contains(&digits.len()) {
                out.push((digits, (m.start(), m.end())));
            }
            search_from = m.end();
        }
        out
    }

    /// Card-data leaks at three levels of detail: full, partial, context.
    pub fn detect_card(&self, msg: &AcarsMessage) -> Option<Finding> {
        let text = msg.text.to_ascii_uppercase();
        let pans = self.pan_candidates(&text);

        let mut corroborators = Vec::new();
        if let Some(cap) = self.patterns.cvv.captures(&text) {
            let m = cap.get(0).unwrap();
            corroborators.push(Entity::new(EntityKind::Cvv, &cap[1], (m.start(), m.end())));
        }
        if let Some(cap) = self.patterns.expiry.captures(&text) {
            let m = cap.get(0).unwrap();
            corroborators.push(Entity::new(EntityKind::Expiry, &cap[1], (m.start(), m.end())));
        }
        if let Some(cap) = self.patterns.amount.captures(&text) {
            let m = cap.get(0).unwrap();
            corroborators.push(Entity::new(EntityKind::Amount, &cap[2], (m.start(), m.end())));
        }
        let names = self.find_names(&text);
        let auth = self.patterns.auth_code.captures(&text).map(|cap| {
            let m = cap.get(0).unwrap();
            Entity::new(EntityKind::AuthCode, &cap[1], (m.start(), m.end()))
        });

        // Full: Luhn-valid PAN with at least two corroborators in proximity.
        for (digits, span) in &pans {
            if luhn_valid(digits) != Some(true) {
                continue;
            }
            let near: Vec<Entity> = corroborators
                .iter()
                .chain(names.first())
                .filter(|e| {
                    let d = if e.span.0 > span.1 { e.span.0 - span.1 } else { span.0.saturating_sub(e.span.1) };
                    d <= self.proximity_window
                })
                .cloned()
                .collect();
            if near.len() >= 2 {
                let mut entities = vec![Entity::new(EntityKind::Pan, digits.clone(), *span)];
                entities.extend(near);
                return Some(Finding::new(FindingCategory::CardFull, entities, Confidence::High));
            }
        }

        // Partial: masked/truncated PAN, or auth code plus expiry/amount.
        if let Some(cap) = self.patterns.masked_pan.captures(&text) {
            let m = cap.get(0).unwrap();
            let mut entities =
                vec![Entity::new(EntityKind::MaskedPan, m.as_str(), (m.start(), m.end()))];
            entities.extend(corroborators.iter().cloned());
            return Some(Finding::new(FindingCategory::CardPartial, entities, Confidence::Medium));
        }
        let has_detail = corroborators
            .iter()
            .any(|e| matches!(e.kind, EntityKind::Expiry | EntityKind::Amount));
        if let Some(auth_entity) = &auth {
            if has_detail && pans.is_empty() {
                let mut entities = vec![auth_entity.clone()];
                entities.extend(corroborators.iter().cloned());
                return Some(Finding::new(FindingCategory::CardPartial, entities, Confidence::Medium));
            }
        }

        // Context: an authorization outcome tied to an auth code, no PAN.
        if pans.is_empty() && !has_detail {
            if let (Some(auth_entity), Some(outcome)) =
                (&auth, self.patterns.auth_outcome.find(&text))
            {
                let entities = vec![
                    auth_entity.clone(),
                    Entity::new(EntityKind::AuthCode, outcome.as_str(), (outcome.start(), outcome.end())),
                ];
                return Some(Finding::new(FindingCategory::CardContext, entities, Confidence::Medium));
            }
        }
        None
    }

    /// Person names. Two shapes: the airline `SURNAME/INITIAL` convention and
    /// `FIRST LAST` uppercase pairs; the surname must be on the shipped list
    /// either way.
    fn find_names(&self, text: &str) -> Vec<Entity> {
        let mut out = Vec::new();
        for cap in self.patterns.surname_initial.captures_iter(text) {
            if self.keywords.surnames.contains(&cap[1]) {
                let m = cap.get(0).unwrap();
                out.push(Entity::new(EntityKind::Name, m.as_str(), (m.start(), m.end())));
            }
        }
        // FIRST LAST: check every consecutive word pair, not just the
        // non-overlapping regex matches
        let words: Vec<regex::Match> = self.patterns.word.find_iter(text).collect();
        for pair in words.windows(2) {
            let (first, last) = (pair[0], pair[1]);
            if last.start() == first.end() + 1
                && text.as_bytes()[first.end()] == b' '
                && self.keywords.surnames.contains(last.as_str())
                && !self.keywords.surnames.contains(first.as_str())
            {
                out.push(Entity::new(
                    EntityKind::Name,
                    &text[first.start()..last.end()],
                    (first.start(), last.end()),
                ));
            }
        }
        out.sort_by_key(|e| e.span);
        out
    }

    /// Medical leaks: names plus condition keywords (full), or emergency
    /// logistics chatter without them (context).
    pub fn detect_medical(&self, msg: &AcarsMessage) -> Option<Finding> {
        let text = msg.text.to_ascii_uppercase();
        let mut conditions = Vec::new();
        for kw in &self.keywords.conditions {
            if let Some(pos) = text.find(kw.as_str()) {
                conditions.push(Entity::new(EntityKind::Condition, kw, (pos, pos + kw.len())));
            }
        }
        let names = self.find_names(&text);
        if !conditions.is_empty() && !names.is_empty() {
            let mut entities = names;
            entities.extend(conditions);
            return Some(Finding::new(FindingCategory::MedicalFull, entities, Confidence::High));
        }
        let mut logistics = Vec::new();
        for kw in &self.keywords.logistics {
            if let Some(pos) = find_word(&text, kw) {
                logistics.push(Entity::new(EntityKind::Logistics, kw, (pos, pos + kw.len())));
            }
        }
        if !logistics.is_empty() {
            return Some(Finding::new(
                FindingCategory::MedicalContext,
                logistics,
                Confidence::Medium,
            ));
        }
        None
    }

    /// Passenger manifests: `SURNAME/INITIAL` names each followed closely by
    /// a seat, flight number or gazetteer destination.
    pub fn detect_passenger_manifest(&self, msg: &AcarsMessage) -> Option<Finding> {
        let text = msg.text.to_ascii_uppercase();
        let mut entities = Vec::new();
        let mut tuples = 0;
        for cap in self.patterns.surname_initial.captures_iter(&text) {
            if !self.keywords.surnames.contains(&cap[1]) {
                continue;
            }
            let name = cap.get(0).unwrap();
            let tail_start = name.end();
            let tail_end = (tail_start + 40).min(text.len());
            let tail = &text[tail_start..tail_end];
            // stop the lookahead at the next manifest name
            let tail = match self.patterns.surname_initial.find(tail) {
                Some(next) => &tail[..next.start()],
                None => tail,
            };
            let mut detail = Vec::new();
            if let Some(m) = self.patterns.seat.captures(tail) {
                let g = m.get(1).unwrap();
                detail.push(Entity::new(
                    EntityKind::Seat,
                    g.as_str(),
                    (tail_start + g.start(), tail_start + g.end()),
                ));
            }
            if let Some(m) = self.patterns.flight_no.captures(tail) {
                let g = m.get(1).unwrap();
                detail.push(Entity::new(
                    EntityKind::FlightNumber,
                    g.as_str(),
                    (tail_start + g.start(), tail_start + g.end()),
                ));
            }
            if detail.is_empty() {
                for cap in self.patterns.designator.captures_iter(tail) {
                    let g = cap.get(1).unwrap();
                    if self.gazetteer.contains(g.as_str()) {
                        detail.push(Entity::new(
                            EntityKind::Aerodrome,
                            g.as_str(),
                            (tail_start + g.start(), tail_start + g.end()),
                        ));
                        break;
                    }
                }
            }
            if !detail.is_empty() {
                tuples += 1;
                entities.push(Entity::new(EntityKind::Name, name.as_str(), (name.start(), name.end())));
                entities.extend(detail);
            }
        }
        (tuples >= 1).then(|| {
            Finding::new(FindingCategory::PassengerManifest, entities, Confidence::High)
        })
    }

    /// Email addresses in the text body.
    pub fn detect_email(&self, msg: &AcarsMessage) -> Option<Finding> {
        let entities: Vec<Entity> = self
            .patterns
            .email
            .find_iter(&msg.text)
            .map(|m| Entity::new(EntityKind::Email, m.as_str(), (m.start(), m.end())))
            .collect();
        (!entities.is_empty()).then(|| {
            Finding::new(FindingCategory::EmailAddress, entities, Confidence::High)
        })
    }
}

/// Find a keyword at word boundaries (the keyword may contain spaces).
fn find_word(text: &str, kw: &str) -> Option<usize> {
    let mut from = 0;
    while let Some(rel) = text[from..].find(kw) {
        let start = from + rel;
        let end = start + kw.len();
        let left_ok = start == 0
            || !text.as_bytes()[start - 1].is_ascii_alphanumeric();
        let right_ok =
            end == text.len() || !text.as_bytes()[end].is_ascii_alphanumeric();
        if left_ok && right_ok {
            return Some(start);
        }
        from = end;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::AcarsMessage;

    fn msg(label: &str, text: &str) -> AcarsMessage {
        AcarsMessage {
            mode: '2',
            registration: "N123AB".into(),
            tech_ack: '.',
            label: label.into(),
            block_id: Some('1'),
            msg_no: Some("M01A".into()),
            flight_id: None,
            text: text.into(),
        }
    }

    fn det() -> Detectors {
        Detectors::shipped()
    }

    #[test]
    fn position_decimal_degrees() {
        let f = det().detect_position(&msg("5Q", "POS N47.46 E008.54,FL360")).unwrap();
        let pos = Position::from_canonical(&f.entities[0].value).unwrap();
        assert!((pos.lat - 47.46).abs() < 1e-9);
        assert!((pos.lon - 8.54).abs() < 1e-9);
    }

    #[test]
    fn position_origin() {
        let f = det().detect_position(&msg("5Q", "POS S00.00 W000.00")).unwrap();
        let pos = Position::from_canonical(&f.entities[0].value).unwrap();
        assert_eq!((pos.lat, pos.lon), (0.0, 0.0));
    }

    #[test]
    fn position_degrees_minutes() {
        let f = det().detect_position(&msg("5Q", "N 47 27.6 E 008 32.7")).unwrap();
        let pos = Position::from_canonical(&f.entities[0].value).unwrap();
        assert!((pos.lat - (47.0 + 27.6 / 60.0)).abs() < 1e-9);
        assert!((pos.lon - (8.0 + 32.7 / 60.0)).abs() < 1e-9);
    }

    #[test]
    fn no_position_in_weather_request() {
        assert!(det().detect_position(&msg("5Q", "REQ WX LSZH")).is_none());
    }

    #[test]
    fn atis_request_with_destination() {
        let f = det().detect_intention(&msg("B9", "ATIS REQ EGLL ARR")).unwrap();
        assert_eq!(f.category, FindingCategory::AtisRequest);
        assert_eq!(f.entities[0].value, "EGLL");
    }

    #[test]
    fn flight_plan_with_both_endpoints() {
        let f = det()
            .detect_intention(&msg("F1", "FPN/RI:DA:LSZH:AA:EGLL:R:N870 KONIL"))
            .unwrap();
        assert_eq!(f.category, FindingCategory::FlightPlan);
        let codes: Vec<&str> = f.entities.iter().map(|e| e.value.as_str()).collect();
        assert!(codes.contains(&"LSZH") && codes.contains(&"EGLL"));
    }

    #[test]
    fn free_text_is_not_intention() {
        assert!(det().detect_intention(&msg("C2", "HELLO CREW")).is_none());
    }

    #[test]
    fn luhn_known_values() {
        assert_eq!(luhn_valid("4111111111111111"), Some(true));
        assert_eq!(luhn_valid("4111111111111112"), Some(false));
        assert_eq!(luhn_valid("0000000000000000"), Some(true));
        assert_eq!(luhn_valid("411"), None);
        assert_eq!(luhn_valid("4111-1111"), None);
    }

    #[test]
    fn card_full_with_corroborators() {
        let f = det()
            .detect_card(&msg("C2", "PAYMENT 4111111111111111 EXP 12/19 CVV 123 USD 750.00"))
            .unwrap();
        assert_eq!(f.category, FindingCategory::CardFull);
        assert!(f.has_entity(EntityKind::Pan));
        let amount = f.entities.iter().find(|e| e.kind == EntityKind::Amount).unwrap();
        assert_eq!(amount.value, "750.00");
    }

    #[test]
    fn card_context_from_auth_outcome() {
        let f = det().detect_card(&msg("C2", "AUTH 58231 APPROVED")).unwrap();
        assert_eq!(f.category, FindingCategory::CardContext);
    }

    #[test]
    fn pax_count_is_not_card_data() {
        assert!(det().detect_card(&msg("C2", "TOTAL PAX 140")).is_none());
    }

    #[test]
    fn card_partial_masked_pan() {
        let f = det().detect_card(&msg("C2", "CARD 411111XXXXXX1111 EXP 12/19")).unwrap();
        assert_eq!(f.category, FindingCategory::CardPartial);
    }

    #[test]
    fn medical_full_name_and_condition() {
        let f = det()
            .detect_medical(&msg("C2", "PAX JOHN DOE SEAT 12A CHEST PAIN"))
            .unwrap();
        assert_eq!(f.category, FindingCategory::MedicalFull);
        assert!(f.has_entity(EntityKind::Name));
    }

    #[test]
    fn medical_context_logistics_only() {
        let f = det().detect_medical(&msg("C2", "MEDICS MEETING ACFT ON STAND")).unwrap();
        assert_eq!(f.category, FindingCategory::MedicalContext);
    }

    #[test]
    fn catering_is_not_medical() {
        assert!(det().detect_medical(&msg("C2", "CATERING SHORT 5 MEALS")).is_none());
    }

    #[test]
    fn manifest_three_tuples() {
        let f = det()
            .detect_passenger_manifest(&msg(
                "C2",
                "SMITH/J 23F LH1234 FRA BROWN/A 12C LH1234 FRA TAYLOR/M 09B LH1234 FRA",
            ))
            .unwrap();
        assert_eq!(f.category, FindingCategory::PassengerManifest);
        let names = f.entities.iter().filter(|e| e.kind == EntityKind::Name).count();
        assert_eq!(names, 3);
    }

    #[test]
    fn single_bare_name_is_not_a_manifest() {
        assert!(det()
            .detect_passenger_manifest(&msg("C2", "PAX SMITH/J ON BOARD"))
            .is_none());
    }

    #[test]
    fn email_single_and_double() {
        let f = det()
            .detect_email(&msg("C2", "EMAIL FROM: DISPATCH AT OPS@EXAMPLE.COM"))
            .unwrap();
        assert_eq!(f.entities.len(), 1);
        assert_eq!(f.entities[0].value, "OPS@EXAMPLE.COM");
        let f2 = det()
            .detect_email(&msg("C2", "A@B.COM AND C@D.ORG"))
            .unwrap();
        assert_eq!(f2.entities.len(), 2);
        assert!(det().detect_email(&msg("C2", "NO AT SIGN HERE")).is_none());
    }

    #[test]
    fn detectors_are_order_independent() {
        let d = det();
        let m = msg("B9", "ATIS REQ EGLL POS N47.46 E008.54 OPS@EXAMPLE.COM");
        let mut a = d.run(&m, "r1");
        let mut b: Vec<Finding> = vec![
            d.detect_email(&m),
            d.detect_position(&m),
            d.detect_intention(&m),
        ]
        .into_iter()
        .flatten()
        .map(|mut f| {
            f.message_ref = "r1".into();
            f
        })
        .collect();
        a.sort_by_key(|f| f.category);
        b.sort_by_key(|f| f.category);
        assert_eq!(a, b);
    }

    #[test]
    fn position_round_trip_through_emitters() {
        let d = det();
        for (lat, lon) in [(47.46, 8.54), (-12.5, -99.25), (0.0, 0.0), (51.25, 0.05)] {
            let pos = Position::new(lat, lon).unwrap();
            for text in [pos.format_decimal(), pos.format_degrees_minutes()] {
                let f = d.detect_position(&msg("5Q", &text)).unwrap_or_else(|| {
                    panic!("no position detected in {text:?}")
                });
                let got = Position::from_canonical(&f.entities[0].value).unwrap();
                assert!((got.lat - lat).abs() < 1e-2, "{text}: lat {} vs {lat}", got.lat);
                assert!((got.lon - lon).abs() < 1e-2, "{text}: lon {} vs {lon}", got.lon);
            }
        }
    }
}
