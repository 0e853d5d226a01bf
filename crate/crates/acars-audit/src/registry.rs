//! Aircraft metadata snapshots, block lists, stakeholder classification and
//! registrant-kind (shell/trust/off-shore) detection.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use regex::RegexBuilder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Registry metadata for one airframe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AircraftRecord {
    /// Six hex characters, lowercased, when known.
    pub icao24: Option<String>,
    pub registration: Option<String>,
    pub ac_type: String,
    pub operator: String,
    pub owner: String,
    /// Country or territory name from the closed gazetteer; empty = unknown.
    pub country: String,
    pub source: String,
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum StakeholderClass {
    #[serde(rename = "BUSINESS")]
    Business,
    #[serde(rename = "COMMERCIAL")]
    Commercial,
    #[serde(rename = "MILITARY")]
    Military,
    #[serde(rename = "STATE")]
    State,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl StakeholderClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StakeholderClass::Business => "BUSINESS",
            StakeholderClass::Commercial => "COMMERCIAL",
            StakeholderClass::Military => "MILITARY",
            StakeholderClass::State => "STATE",
            StakeholderClass::Unknown => "UNKNOWN",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "BUSINESS" => StakeholderClass::Business,
            "COMMERCIAL" => StakeholderClass::Commercial,
            "MILITARY" => StakeholderClass::Military,
            "STATE" => StakeholderClass::State,
            "UNKNOWN" => StakeholderClass::Unknown,
            _ => return None,
        })
    }

    /// The four graded groups, in report order.
    pub const GRADED: [StakeholderClass; 4] = [
        StakeholderClass::Business,
        StakeholderClass::Commercial,
        StakeholderClass::Military,
        StakeholderClass::State,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegistrantKind {
    #[serde(rename = "DIRECT")]
    Direct,
    #[serde(rename = "LLC_SCHEME")]
    LlcScheme,
    #[serde(rename = "TRUST_SERVICE")]
    TrustService,
    #[serde(rename = "OFFSHORE_SHELL")]
    OffshoreShell,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

/// Public-display block levels; AGENCY outranks SUBSCRIBER.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum BlockLevel {
    #[serde(rename = "SUBSCRIBER")]
    Subscriber,
    #[serde(rename = "AGENCY")]
    Agency,
}

impl BlockLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlockLevel::Agency => "AGENCY",
            BlockLevel::Subscriber => "SUBSCRIBER",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEntry {
    pub registration: String,
    pub level: BlockLevel,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {detail}")]
    Schema {
        path: String,
        line: usize,
        detail: String,
    },
}

fn schema(path: &str, line: usize, detail: impl Into<String>) -> RegistryError {
    RegistryError::Schema {
        path: path.to_string(),
        line,
        detail: detail.into(),
    }
}

/// Closed set of country/territory names accepted in registry files.
pub fn country_gazetteer() -> HashSet<String> {
    crate::defaults::COUNTRY_LIST
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Merged registry snapshot; lookups by icao24 or registration.
#[derive(Clone, Debug, Default)]
pub struct RegistryIndex {
    records: Vec<AircraftRecord>,
    by_reg: HashMap<String, usize>,
    by_icao: HashMap<String, usize>,
    /// Duplicate rows resolved last-wins during load.
    pub duplicate_warnings: usize,
}

impl RegistryIndex {
    pub fn lookup_registration(&self, registration: &str) -> Option<&AircraftRecord> {
        self.by_reg
            .get(&registration.to_ascii_uppercase())
            .map(|&i| &self.records[i])
    }

    pub fn lookup_icao24(&self, icao24: &str) -> Option<&AircraftRecord> {
        self.by_icao
            .get(&icao24.to_ascii_lowercase())
            .map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[AircraftRecord] {
        &self.records
    }

    pub fn distinct_registrations(&self) -> usize {
        self.by_reg.len()
    }

    fn insert(&mut self, rec: AircraftRecord) {
        let idx = self.records.len();
        let mut replaced = false;
        if let Some(reg) = &rec.registration {
            if let Some(old) = self.by_reg.insert(reg.to_ascii_uppercase(), idx) {
                // later files (and later rows) override earlier ones
                let _ = old;
                replaced = true;
            }
        }
        if let Some(icao) = &rec.icao24 {
            self.by_icao.insert(icao.to_ascii_lowercase(), idx);
        }
        if replaced {
            self.duplicate_warnings += 1;
        }
        self.records.push(rec);
    }
}

/// Load and merge registry CSV files. Later paths override earlier ones per
/// registration; duplicates inside one file resolve last-wins.
///
/// Schema (exact header): `icao24,registration,type,operator,owner,country,source`.
pub fn load_registry(paths: &[impl AsRef<Path>]) -> Result<RegistryIndex, RegistryError> {
    let countries = country_gazetteer();
    let mut index = RegistryIndex::default();
    for p in paths {
        let path = p.as_ref();
        let text = fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        load_registry_str(&text, &path.display().to_string(), &countries, &mut index)?;
    }
    Ok(index)
}

const REGISTRY_HEADER: [&str; 7] = [
    "icao24",
    "registration",
    "type",
    "operator",
    "owner",
    "country",
    "source",
];

fn load_registry_str(
    text: &str,
    path: &str,
    countries: &HashSet<String>,
    index: &mut RegistryIndex,
) -> Result<(), RegistryError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    {
        let headers = rdr
            .headers()
            .map_err(|e| schema(path, 1, e.to_string()))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != REGISTRY_HEADER {
            return Err(schema(
                path,
                1,
                format!("expected header {REGISTRY_HEADER:?}, got {got:?}"),
            ));
        }
    }
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| schema(path, line, e.to_string()))?;
        if row.len() != 7 {
            return Err(schema(path, line, format!("expected 7 fields, got {}", row.len())));
        }
        let get = |n: usize| row.get(n).unwrap_or("").trim().to_string();
        let icao24 = {
            let v = get(0);
            if v.is_empty() {
                None
            } else if v.len() == 6 && v.chars().all(|c| c.is_ascii_hexdigit()) {
                Some(v.to_ascii_lowercase())
            } else {
                return Err(schema(path, line, format!("bad icao24 {v:?}")));
            }
        };
        let registration = {
            let v = get(1);
            if v.is_empty() { None } else { Some(v.to_ascii_uppercase()) }
        };
        if icao24.is_none() && registration.is_none() {
            return Err(schema(path, line, "row has neither icao24 nor registration"));
        }
        let country = get(5);
        if !country.is_empty() && !countries.contains(&country) {
            return Err(schema(path, line, format!("unknown country {country:?}")));
        }
        index.insert(AircraftRecord {
            icao24,
            registration,
            ac_type: get(2),
            operator: get(3),
            owner: get(4),
            country,
            source: get(6),
        });
    }
    Ok(())
}

/// Block list: one resolved entry per registration, AGENCY wins duplicates.
#[derive(Clone, Debug, Default)]
pub struct BlockList {
    entries: HashMap<String, BlockLevel>,
}

impl BlockList {
    pub fn lookup(&self, registration: &str) -> Option<BlockEntry> {
        self.entries
            .get(&registration.to_ascii_uppercase())
            .map(|&level| BlockEntry {
                registration: registration.to_ascii_uppercase(),
                level,
            })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, registration: &str, level: BlockLevel) {
        let key = registration.to_ascii_uppercase();
        let entry = self.entries.entry(key).or_insert(level);
        if level > *entry {
            *entry = level;
        }
    }
}

/// Load a blocklist CSV: `registration,level`, no header comments, '#' allowed.
pub fn load_blocklist(path: &Path) -> Result<BlockList, RegistryError> {
    let text = fs::read_to_string(path).map_err(|source| RegistryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_blocklist_str(&text, &path.display().to_string())
}

pub fn load_blocklist_str(text: &str, path: &str) -> Result<BlockList, RegistryError> {
    let mut list = BlockList::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') || raw == "registration,level" {
            continue;
        }
        let (reg, level) = raw
            .split_once(',')
            .ok_or_else(|| schema(path, line, "expected registration,level"))?;
        let level = match level.trim() {
            "AGENCY" => BlockLevel::Agency,
            "SUBSCRIBER" => BlockLevel::Subscriber,
            other => return Err(schema(path, line, format!("unknown level {other:?}"))),
        };
        list.insert(reg.trim(), level);
    }
    Ok(list)
}

/// Which registry field a rule matches against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleField {
    Operator,
    Owner,
    AcType,
    Registration,
    Country,
}

/// One ordered classification rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub tier: StakeholderClass,
    pub field: RuleField,
    pub pattern: regex::Regex,
    pub class: StakeholderClass,
    pub rule_id: String,
}

/// Ordered rule table; tier precedence MILITARY > STATE > COMMERCIAL >
/// BUSINESS, first match wins inside a tier.
#[derive(Clone, Debug)]
pub struct RuleTable {
    rules: Vec<Rule>,
}

#[derive(Debug, Error)]
pub enum RuleTableError {
    #[error("rule table line {line}: {detail}")]
    Malformed { line: usize, detail: String },
}

const TIER_ORDER: [StakeholderClass; 4] = [
    StakeholderClass::Military,
    StakeholderClass::State,
    StakeholderClass::Commercial,
    StakeholderClass::Business,
];

impl RuleTable {
    /// Parse `tier,field,pattern,class,rule_id` rows; '#' comments allowed.
    /// Patterns are case-insensitive regexes and may contain commas only via
    /// escaping is not needed because pattern is the middle of five fields
    /// split from the outside in.
    pub fn from_table(text: &str) -> Result<Self, RuleTableError> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            // tier,field from the left; class,rule_id from the right;
            // the remainder is the pattern and may itself contain commas.
            let mut left = raw.splitn(3, ',');
            let tier_s = left.next().unwrap_or("").trim();
            let field_s = left.next().unwrap_or("").trim();
            let rest = left.next().unwrap_or("");
            let (pattern_s, class_s, rule_id) = {
                let mut right = rest.rsplitn(3, ',');
                let rule_id = right.next().unwrap_or("").trim().to_string();
                let class_s = right.next().unwrap_or("").trim().to_string();
                let pattern_s = right.next().unwrap_or("").to_string();
                (pattern_s, class_s, rule_id)
            };
            let bad = |detail: String| RuleTableError::Malformed { line, detail };
            let tier = StakeholderClass::from_str(tier_s)
                .ok_or_else(|| bad(format!("unknown tier {tier_s:?}")))?;
            let class = StakeholderClass::from_str(&class_s)
                .ok_or_else(|| bad(format!("unknown class {class_s:?}")))?;
            let field = match field_s {
                "operator" => RuleField::Operator,
                "owner" => RuleField::Owner,
                "ac_type" | "type" => RuleField::AcType,
                "registration" => RuleField::Registration,
                "country" => RuleField::Country,
                other => return Err(bad(format!("unknown field {other:?}"))),
            };
            if rule_id.is_empty() {
                return Err(bad("missing rule_id".to_string()));
            }
            let pattern = RegexBuilder::new(&pattern_s)
                .case_insensitive(true)
                .build()
                .map_err(|e| bad(format!("bad pattern: {e}")))?;
            rules.push(Rule {
                tier,
                field,
                pattern,
                class,
                rule_id,
            });
        }
        Ok(Self { rules })
    }

    pub fn shipped() -> Self {
        Self::from_table(crate::defaults::RULE_TABLE).expect("shipped rule table is valid")
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// A classification decision with the id of the rule that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: StakeholderClass,
    pub rule_id: Option<String>,
}

fn field_value(rec: &AircraftRecord, field: RuleField) -> &str {
    match field {
        RuleField::Operator => &rec.operator,
        RuleField::Owner => &rec.owner,
        RuleField::AcType => &rec.ac_type,
        RuleField::Registration => rec.registration.as_deref().unwrap_or(""),
        RuleField::Country => &rec.country,
    }
}

/// Classify a registry record into a stakeholder group.
///
/// Pure: same record and table always give the same class and rule id.
pub fn classify_stakeholder(rec: &AircraftRecord, rules: &RuleTable) -> Classification {
    for tier in TIER_ORDER {
        for rule in rules.rules.iter().filter(|r| r.tier == tier) {
            let value = field_value(rec, rule.field);
            if !value.is_empty() && rule.pattern.is_match(value) {
                return Classification {
                    class: rule.class,
                    rule_id: Some(rule.rule_id.clone()),
                };
            }
        }
    }
    Classification {
        class: StakeholderClass::Unknown,
        rule_id: None,
    }
}

/// Load the OFC territory list: one per line, '#' comments.
pub fn load_ofc_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn corporate_owner(owner: &str) -> bool {
    const MARKERS: [&str; 14] = [
        "LTD", "LIMITED", "LLC", "INC", "CORP", "HOLDINGS", "AVIATION", "LEASING", "GMBH",
        "PLC", "SARL", "BV", "AG", "SA",
    ];
    let upper = owner.to_ascii_uppercase();
    upper
        .split(|c: char| !c.is_ascii_alphanumeric())
        .any(|tok| MARKERS.contains(&tok))
}

fn llc_mirror(rec: &AircraftRecord) -> bool {
    let owner = rec.owner.to_ascii_uppercase();
    let Some(stripped) = owner.strip_suffix(" LLC") else {
        return false;
    };
    let looks_like_n_number = stripped.len() >= 2
        && stripped.starts_with('N')
        && stripped[1..].chars().all(|c| c.is_ascii_alphanumeric());
    if !looks_like_n_number {
        return false;
    }
    match &rec.registration {
        Some(reg) => stripped == reg.to_ascii_uppercase(),
        None => true,
    }
}

fn trust_owner(owner: &str) -> bool {
    let upper = owner.to_ascii_uppercase();
    upper.contains("TRUSTEE") || upper.contains("TRUST")
}

/// Detect how the registrant obscures (or doesn't) the beneficial owner.
pub fn detect_registrant_kind(rec: &AircraftRecord, ofc_list: &HashSet<String>) -> RegistrantKind {
    if rec.owner.trim().is_empty() {
        return RegistrantKind::Unknown;
    }
    if ofc_list.contains(&rec.country) && corporate_owner(&rec.owner) {
        return RegistrantKind::OffshoreShell;
    }
    if llc_mirror(rec) {
        return RegistrantKind::LlcScheme;
    }
    if trust_owner(&rec.owner) {
        return RegistrantKind::TrustService;
    }
    RegistrantKind::Direct
}
