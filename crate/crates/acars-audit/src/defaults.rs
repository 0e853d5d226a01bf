//! Data tables shipped with the crate.
//!
//! Every table is an editable text file under `data/`; these constants embed
//! them so library users and the examples work without any path setup. The
//! CLI accepts overriding paths for each.

/// Label table: `label,category,description`.
pub const LABEL_TABLE: &str = include_str!("../data/labels.csv");

/// Stakeholder classification rules: `tier,field,pattern,class,rule_id`.
pub const RULE_TABLE: &str = include_str!("../data/rules.csv");

/// Off-shore financial centers, one territory per line.
pub const OFC_LIST: &str = include_str!("../data/ofc.txt");

/// Closed country/territory gazetteer for registry records.
pub const COUNTRY_LIST: &str = include_str!("../data/countries.txt");

/// Aerodrome designators, one per line.
pub const GAZETTEER: &str = include_str!("../data/gazetteer.txt");

/// Sectioned keyword lists (conditions / logistics / surnames).
pub const KEYWORDS: &str = include_str!("../data/keywords.txt");

/// Crib template for the substitution-cipher attack.
pub const CRIB_TEMPLATE: &str = include_str!("../data/crib_template.txt");
