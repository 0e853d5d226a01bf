//! Classify registry entries into stakeholder tiers and flag off-shore shells.
//!
//!     cargo run --example classify_aircraft [REGISTRY.csv]

use acars_audit::registry::{
    classify_stakeholder, detect_registrant_kind, load_ofc_list, load_registry, RuleTable,
};

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo/registry.csv").into());

    let registry = load_registry(&[&path])?;
    let rules = RuleTable::shipped();
    let ofc = load_ofc_list(acars_audit::defaults::OFC_LIST);

    println!("{:<10} {:<12} {:<14} rule", "reg", "class", "registrant");
    for rec in registry.records() {
        let class = classify_stakeholder(rec, &rules);
        let kind = detect_registrant_kind(rec, &ofc);
        println!(
            "{:<10} {:<12} {:<14} {}",
            rec.registration.as_deref().unwrap_or("-"),
            format!("{:?}", class.class).to_uppercase(),
            format!("{kind:?}"),
            class.rule_id.as_deref().unwrap_or("-"),
        );
    }
    Ok(())
}
