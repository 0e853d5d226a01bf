//! ACARS frame text parsing and the label-to-service registry.
//!
//! The over-the-air frame is flattened into a fixed-width character header
//! followed by the free text field:
//!
//! ```text
//! offset  width  field
//! 0       1      mode
//! 1       7      registration, left-padded with '.'
//! 8       1      technical ack
//! 9       2      label
//! 11      1      block id (' ' = absent)
//! 12      4      message number (all spaces = absent)
//! 16      6      flight id, right-padded with spaces (all spaces = absent)
//! 22      -      text, preserved byte-exact
//! ```
//!
//! A frame may legally stop after offset 12 (no message number) or after
//! offset 16 (no flight id); uplinks routinely omit both. `serialize_frame`
//! emits the shortest header that still round-trips.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const REG_WIDTH: usize = 7;
const HEADER_MANDATORY: usize = 12;
const MSG_NO_END: usize = 16;
const HEADER_FULL: usize = 22;

/// A parsed ACARS frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcarsMessage {
    pub mode: char,
    /// Normalized registration: leading pad dots stripped, 1-7 chars of
    /// `[A-Z0-9-]`.
    pub registration: String,
    pub tech_ack: char,
    /// Always exactly two characters.
    pub label: String,
    pub block_id: Option<char>,
    /// Four characters matching `[A-Z][0-9]{2}[A-Z0-9]` when present.
    pub msg_no: Option<String>,
    /// Up to six characters of `[A-Z0-9]` when present.
    pub flight_id: Option<String>,
    pub text: String,
}

/// Why a frame failed to parse, and where.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse failure at offset {position}: {reason}")]
pub struct ParseFailure {
    pub position: usize,
    pub reason: FailureReason,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    TooShort,
    BadMode,
    BadRegistration,
    BadAck,
    BadLabel,
    BadBlockId,
    BadMsgNo,
    BadFlightId,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureReason::TooShort => "too_short",
            FailureReason::BadMode => "bad_mode",
            FailureReason::BadRegistration => "bad_registration",
            FailureReason::BadAck => "bad_ack",
            FailureReason::BadLabel => "bad_label",
            FailureReason::BadBlockId => "bad_block_id",
            FailureReason::BadMsgNo => "bad_msg_no",
            FailureReason::BadFlightId => "bad_flight_id",
        };
        f.write_str(s)
    }
}

fn fail(position: usize, reason: FailureReason) -> ParseFailure {
    ParseFailure { position, reason }
}

fn is_reg_char(b: u8) -> bool {
    b.is_ascii_uppercase() || b.is_ascii_digit() || b == b'-'
}

fn is_label_char(b: u8) -> bool {
    b.is_ascii_uppercase() || b.is_ascii_digit()
}

fn is_flight_char(b: u8) -> bool {
    b.is_ascii_uppercase() || b.is_ascii_digit()
}

fn msg_no_ok(field: &[u8]) -> bool {
    field.len() == 4
        && field[0].is_ascii_uppercase()
        && field[1].is_ascii_digit()
        && field[2].is_ascii_digit()
        && (field[3].is_ascii_uppercase() || field[3].is_ascii_digit())
}

/// Parse raw frame text into an [`AcarsMessage`].
///
/// Never panics on arbitrary input; anything that does not fit the layout
/// comes back as a [`ParseFailure`] with offset and reason.
pub fn parse_frame(raw: &str) -> Result<AcarsMessage, ParseFailure> {
    let b = raw.as_bytes();
    if b.len() < HEADER_MANDATORY {
        return Err(fail(b.len(), FailureReason::TooShort));
    }

    let mode = b[0];
    if !mode.is_ascii_graphic() {
        return Err(fail(0, FailureReason::BadMode));
    }

    let reg_field = &b[1..1 + REG_WIDTH];
    let pad = reg_field.iter().take_while(|&&c| c == b'.').count();
    let reg = &reg_field[pad..];
    if reg.is_empty() || !reg.iter().all(|&c| is_reg_char(c)) {
        return Err(fail(1 + pad, FailureReason::BadRegistration));
    }

    let ack = b[8];
    if !ack.is_ascii_graphic() {
        return Err(fail(8, FailureReason::BadAck));
    }

    if !is_label_char(b[9]) || !is_label_char(b[10]) {
        return Err(fail(9, FailureReason::BadLabel));
    }

    let block_id = match b[11] {
        b' ' => None,
        c if c.is_ascii_graphic() => Some(c as char),
        _ => return Err(fail(11, FailureReason::BadBlockId)),
    };

    let msg_no = if b.len() == HEADER_MANDATORY {
        None
    } else if b.len() < MSG_NO_END {
        return Err(fail(b.len(), FailureReason::TooShort));
    } else {
        let field = &b[HEADER_MANDATORY..MSG_NO_END];
        if field.iter().all(|&c| c == b' ') {
            None
        } else if msg_no_ok(field) {
            Some(String::from_utf8(field.to_vec()).unwrap())
        } else {
            return Err(fail(HEADER_MANDATORY, FailureReason::BadMsgNo));
        }
    };

    let flight_id = if b.len() <= MSG_NO_END {
        None
    } else if b.len() < HEADER_FULL {
        return Err(fail(b.len(), FailureReason::TooShort));
    } else {
        let field = &b[MSG_NO_END..HEADER_FULL];
        let trimmed: &[u8] = {
            let end = field.iter().rposition(|&c| c != b' ').map_or(0, |i| i + 1);
            &field[..end]
        };
        if trimmed.is_empty() {
            None
        } else if trimmed.iter().all(|&c| is_flight_char(c)) {
            Some(String::from_utf8(trimmed.to_vec()).unwrap())
        } else {
            return Err(fail(MSG_NO_END, FailureReason::BadFlightId));
        }
    };

    // Header bytes are all ASCII at this point, so offset 22 is a char
    // boundary whenever the frame extends past it.
    let text = if raw.len() > HEADER_FULL {
        raw[HEADER_FULL..].to_string()
    } else {
        String::new()
    };

    Ok(AcarsMessage {
        mode: mode as char,
        registration: String::from_utf8(reg.to_vec()).unwrap(),
        tech_ack: ack as char,
        label: String::from_utf8(b[9..11].to_vec()).unwrap(),
        block_id,
        msg_no,
        flight_id,
        text,
    })
}

/// A message that violates the type invariants and cannot be serialized.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid message field {field}: {detail}")]
pub struct InvalidMessage {
    pub field: &'static str,
    pub detail: String,
}

fn invalid(field: &'static str, detail: impl Into<String>) -> InvalidMessage {
    InvalidMessage {
        field,
        detail: detail.into(),
    }
}

/// Serialize a message back to frame text.
///
/// Inverse of [`parse_frame`]: `parse_frame(&serialize_frame(&m)?) == Ok(m)`
/// for every message that satisfies the invariants.
pub fn serialize_frame(msg: &AcarsMessage) -> Result<String, InvalidMessage> {
    if !msg.mode.is_ascii_graphic() {
        return Err(invalid("mode", "must be a printable ASCII character"));
    }
    let reg = msg.registration.as_bytes();
    if reg.is_empty() || reg.len() > REG_WIDTH || !reg.iter().all(|&c| is_reg_char(c)) {
        return Err(invalid("registration", "1-7 chars of [A-Z0-9-]"));
    }
    if !msg.tech_ack.is_ascii_graphic() {
        return Err(invalid("tech_ack", "must be a printable ASCII character"));
    }
    if msg.label.len() != 2 || !msg.label.bytes().all(is_label_char) {
        return Err(invalid("label", "exactly 2 chars of [A-Z0-9]"));
    }
    if let Some(c) = msg.block_id {
        if !c.is_ascii_graphic() {
            return Err(invalid("block_id", "must be printable and non-space"));
        }
    }
    if let Some(no) = &msg.msg_no {
        if !msg_no_ok(no.as_bytes()) {
            return Err(invalid("msg_no", "must match [A-Z][0-9]{2}[A-Z0-9]"));
        }
    }
    if let Some(fid) = &msg.flight_id {
        let f = fid.as_bytes();
        if f.is_empty() || f.len() > 6 || !f.iter().all(|&c| is_flight_char(c)) {
            return Err(invalid("flight_id", "1-6 chars of [A-Z0-9]"));
        }
    }

    let mut out = String::with_capacity(HEADER_FULL + msg.text.len());
    out.push(msg.mode);
    for _ in 0..REG_WIDTH - reg.len() {
        out.push('.');
    }
    out.push_str(&msg.registration);
    out.push(msg.tech_ack);
    out.push_str(&msg.label);
    out.push(msg.block_id.unwrap_or(' '));

    let need_flight = msg.flight_id.is_some() || !msg.text.is_empty();
    let need_msg_no = msg.msg_no.is_some() || need_flight;
    if need_msg_no {
        match &msg.msg_no {
            Some(no) => out.push_str(no),
            None => out.push_str("    "),
        }
    }
    if need_flight {
        match &msg.flight_id {
            Some(fid) => {
                out.push_str(fid);
                for _ in 0..6 - fid.len() {
                    out.push(' ');
                }
            }
            None => out.push_str("      "),
        }
    }
    out.push_str(&msg.text);
    Ok(out)
}

/// Service categories routed by the two-character label.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum LabelCategory {
    Position,
    Clearance,
    AtisRequest,
    FlightPlan,
    Weather,
    FreeText,
    Maintenance,
    Loadsheet,
    MediaAdvisory,
    NetworkMgmt,
    Other,
}

impl LabelCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelCategory::Position => "POSITION",
            LabelCategory::Clearance => "CLEARANCE",
            LabelCategory::AtisRequest => "ATIS_REQUEST",
            LabelCategory::FlightPlan => "FLIGHT_PLAN",
            LabelCategory::Weather => "WEATHER",
            LabelCategory::FreeText => "FREE_TEXT",
            LabelCategory::Maintenance => "MAINTENANCE",
            LabelCategory::Loadsheet => "LOADSHEET",
            LabelCategory::MediaAdvisory => "MEDIA_ADVISORY",
            LabelCategory::NetworkMgmt => "NETWORK_MGMT",
            LabelCategory::Other => "OTHER",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "POSITION" => LabelCategory::Position,
            "CLEARANCE" => LabelCategory::Clearance,
            "ATIS_REQUEST" => LabelCategory::AtisRequest,
            "FLIGHT_PLAN" => LabelCategory::FlightPlan,
            "WEATHER" => LabelCategory::Weather,
            "FREE_TEXT" => LabelCategory::FreeText,
            "MAINTENANCE" => LabelCategory::Maintenance,
            "LOADSHEET" => LabelCategory::Loadsheet,
            "MEDIA_ADVISORY" => LabelCategory::MediaAdvisory,
            "NETWORK_MGMT" => LabelCategory::NetworkMgmt,
            "OTHER" => LabelCategory::Other,
            _ => return None,
        })
    }
}

/// One row of the label table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelEntry {
    pub label: String,
    pub category: LabelCategory,
    pub description: String,
}

#[derive(Debug, Error)]
pub enum LabelTableError {
    #[error("label table line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("label table line {line}: duplicate label {label}")]
    Duplicate { line: usize, label: String },
}

/// Label registry; read-only after load, total lookups via an OTHER fallback.
#[derive(Clone, Debug)]
pub struct LabelRegistry {
    entries: HashMap<String, LabelEntry>,
}

impl LabelRegistry {
    /// Parse from delimited text: `label,category,description`, `#` comments.
    pub fn from_table(text: &str) -> Result<Self, LabelTableError> {
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, ',');
            let label = parts.next().unwrap_or("").trim().to_string();
            let cat = parts.next().map(str::trim).unwrap_or("");
            let desc = parts.next().map(str::trim).unwrap_or("").to_string();
            if label.len() != 2 {
                return Err(LabelTableError::Malformed {
                    line: lineno,
                    detail: format!("label {label:?} is not 2 characters"),
                });
            }
            let category = LabelCategory::from_str(cat).ok_or_else(|| {
                LabelTableError::Malformed {
                    line: lineno,
                    detail: format!("unknown category {cat:?}"),
                }
            })?;
            if entries.contains_key(&label) {
                return Err(LabelTableError::Duplicate { line: lineno, label });
            }
            entries.insert(
                label.clone(),
                LabelEntry {
                    label,
                    category,
                    description: desc,
                },
            );
        }
        Ok(Self { entries })
    }

    /// The table shipped with the crate.
    pub fn shipped() -> Self {
        Self::from_table(crate::defaults::LABEL_TABLE).expect("shipped label table is valid")
    }

    /// Total lookup: unregistered labels fall back to OTHER.
    pub fn lookup(&self, label: &str) -> LabelEntry {
        self.entries.get(label).cloned().unwrap_or(LabelEntry {
            label: label.to_string(),
            category: LabelCategory::Other,
            description: "unregistered label".to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AcarsMessage {
        AcarsMessage {
            mode: '2',
            registration: "N123AB".into(),
            tech_ack: '.',
            label: "5Q".into(),
            block_id: Some('1'),
            msg_no: Some("M01A".into()),
            flight_id: Some("LX789".into()),
            text: "POS N47.46 E008.54".into(),
        }
    }

    #[test]
    fn round_trip_full_message() {
        let m = sample();
        let frame = serialize_frame(&m).unwrap();
        assert_eq!(parse_frame(&frame).unwrap(), m);
    }

    #[test]
    fn round_trip_short_registration() {
        let mut m = sample();
        m.registration = "N1".into();
        let frame = serialize_frame(&m).unwrap();
        assert!(frame.starts_with("2.....N1"));
        assert_eq!(parse_frame(&frame).unwrap().registration, "N1");
    }

    #[test]
    fn round_trip_empty_text() {
        let mut m = sample();
        m.text = String::new();
        m.flight_id = None;
        m.msg_no = None;
        let frame = serialize_frame(&m).unwrap();
        assert_eq!(frame.len(), 12);
        let back = parse_frame(&frame).unwrap();
        assert_eq!(back.text, "");
        assert_eq!(back, m);
    }

    #[test]
    fn round_trip_absent_optionals_with_text() {
        let mut m = sample();
        m.msg_no = None;
        m.flight_id = None;
        let frame = serialize_frame(&m).unwrap();
        assert_eq!(parse_frame(&frame).unwrap(), m);
    }

    #[test]
    fn empty_frame_is_too_short() {
        let err = parse_frame("").unwrap_err();
        assert_eq!(err.reason, FailureReason::TooShort);
        assert_eq!(err.position, 0);
    }

    #[test]
    fn bad_label_characters_rejected() {
        // lowercase in label position
        let err = parse_frame("2.N123AB.q9 ").unwrap_err();
        assert_eq!(err.reason, FailureReason::BadLabel);
        assert_eq!(err.position, 9);
    }

    #[test]
    fn bad_msg_no_rejected() {
        let err = parse_frame("2.N123AB.5Q101A1").unwrap_err();
        assert_eq!(err.reason, FailureReason::BadMsgNo);
    }

    #[test]
    fn serialize_rejects_invariant_violations() {
        let mut m = sample();
        m.label = "5QX".into();
        assert!(serialize_frame(&m).is_err());
        let mut m = sample();
        m.registration = "n123ab".into();
        assert!(serialize_frame(&m).is_err());
        let mut m = sample();
        m.msg_no = Some("01A1".into());
        assert!(serialize_frame(&m).is_err());
    }

    #[test]
    fn label_b9_maps_to_atis_request() {
        let reg = LabelRegistry::shipped();
        assert_eq!(reg.lookup("B9").category, LabelCategory::AtisRequest);
    }

    #[test]
    fn unregistered_label_falls_back_to_other() {
        let reg = LabelRegistry::shipped();
        assert_eq!(reg.lookup("ZZ").category, LabelCategory::Other);
    }

    #[test]
    fn shipped_sq_is_network_mgmt() {
        let reg = LabelRegistry::shipped();
        assert_eq!(reg.lookup("SQ").category, LabelCategory::NetworkMgmt);
        // spot-check the shipped file itself carries the row
        assert!(crate::defaults::LABEL_TABLE
            .lines()
            .any(|l| l.starts_with("SQ,NETWORK_MGMT")));
    }

    #[test]
    fn frame_with_b9_text_parses_and_categorizes() {
        let m = AcarsMessage {
            mode: '2',
            registration: "HBJSG".into(),
            tech_ack: '.',
            label: "B9".into(),
            block_id: Some('3'),
            msg_no: Some("M22A".into()),
            flight_id: None,
            text: "ATIS REQ LSZH".into(),
        };
        let frame = serialize_frame(&m).unwrap();
        let back = parse_frame(&frame).unwrap();
        let reg = LabelRegistry::shipped();
        assert_eq!(reg.lookup(&back.label).category, LabelCategory::AtisRequest);
        assert_eq!(back.text, "ATIS REQ LSZH");
    }
}
