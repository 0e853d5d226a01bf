//! Pipeline front end: ingest → parse → enrich → detect → audit → report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use acars_audit::cipher::{crack_with_crib, CrackError};
use acars_audit::config::{ConfigError, RunConfig};
use acars_audit::ingest::CorpusFormat;
use acars_audit::pipeline::{load_and_dedupe, load_tables, run_audit, PipelineError};
use acars_audit::report::{
    export_findings_csv, redact, render, render_offshore, OutputFormat, RedactionPolicy,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_NO_CIPHERTEXT: u8 = 3;

#[derive(Parser)]
#[command(name = "acars-audit", version, about = "Privacy audit for captured ACARS traffic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each maps onto a RunConfig field.
#[derive(Args)]
struct CommonArgs {
    /// Capture file(s); repeatable
    #[arg(long = "input")]
    input: Vec<PathBuf>,
    /// Corpus format: jsonl or rawlog
    #[arg(long = "input-format")]
    input_format: Option<String>,
    /// Aircraft registry CSV
    #[arg(long = "registry")]
    registry: Option<PathBuf>,
    /// Public-display blocklist CSV
    #[arg(long = "blocklist")]
    blocklist: Option<PathBuf>,
    /// Stakeholder classification rule table
    #[arg(long = "rules")]
    rules: Option<PathBuf>,
    /// Off-shore financial center list
    #[arg(long = "ofc-list")]
    ofc_list: Option<PathBuf>,
    /// Aerodrome designator list
    #[arg(long = "gazetteer")]
    gazetteer: Option<PathBuf>,
    /// Sectioned keyword lists
    #[arg(long = "keywords")]
    keywords: Option<PathBuf>,
    /// Crib template for the cipher attack
    #[arg(long = "crib-template")]
    crib_template: Option<PathBuf>,
    /// Dedup window in seconds
    #[arg(long = "dedup-window-s")]
    dedup_window_s: Option<i64>,
    /// Output path (stdout when absent)
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Output format: text, csv or json
    #[arg(long = "out-format")]
    out_format: Option<String>,
    /// Redaction policy: keep, mask or pseudonym
    #[arg(long = "redact-policy")]
    redact_policy: Option<String>,
    /// Key file for pseudonym redaction (else env ACARS_AUDIT_KEY)
    #[arg(long = "key-file")]
    key_file: Option<PathBuf>,
    /// key=value config file; flags override it
    #[arg(long = "config")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and dedup the corpus without auditing
    Ingest(CommonArgs),
    /// Run the full privacy audit
    Audit(CommonArgs),
    /// Re-render a saved report (json input)
    Report(CommonArgs),
    /// Recover substitution keys from encrypted-classified traffic
    Crack(CommonArgs),
    /// Export findings with the redaction policy applied
    Redact(CommonArgs),
}

impl CommonArgs {
    /// defaults < config file < flags.
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for input in &self.input {
            cfg.inputs.push(input.clone());
        }
        if let Some(v) = &self.input_format {
            cfg.input_format = CorpusFormat::from_str(v).ok_or(ConfigError::BadValue {
                key: "input-format".into(),
                detail: format!("unknown format {v:?}"),
            })?;
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = &self.$field {
                    cfg.$field = Some(v.clone());
                }
            };
        }
        take!(registry);
        take!(blocklist);
        take!(rules);
        take!(ofc_list);
        take!(gazetteer);
        take!(keywords);
        take!(crib_template);
        take!(out);
        take!(key_file);
        if let Some(v) = self.dedup_window_s {
            cfg.dedup_window_s = v;
        }
        if let Some(v) = &self.out_format {
            cfg.out_format = v.clone();
        }
        if let Some(v) = &self.redact_policy {
            cfg.redact_policy = v.clone();
        }
        Ok(cfg)
    }
}

fn write_output(cfg: &RunConfig, bytes: &[u8]) -> Result<(), String> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| format!("cannot write stdout: {e}"))
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn pipeline_exit(err: &PipelineError) -> u8 {
    match err {
        PipelineError::Ingest(acars_audit::ingest::IngestError::CorpusRejected { .. }) => {
            EXIT_REJECTED
        }
        _ => EXIT_CONFIG,
    }
}

fn cmd_ingest(cfg: &RunConfig) -> ExitCode {
    if let Err(e) = cfg.validate() {
        return fail(EXIT_CONFIG, e);
    }
    match load_and_dedupe(cfg) {
        Ok((records, stats)) => {
            eprintln!(
                "loaded {} records ({} lines skipped), removed {} duplicates, {} out of scope",
                stats.records_loaded, stats.lines_skipped, stats.dedup_removed, stats.out_of_scope
            );
            let mut bytes = Vec::new();
            for rec in &records {
                bytes.extend_from_slice(serde_json::to_string(rec).unwrap().as_bytes());
                bytes.push(b'\n');
            }
            if let Err(e) = write_output(cfg, &bytes) {
                return fail(EXIT_CONFIG, e);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(pipeline_exit(&e), e),
    }
}

fn cmd_audit(cfg: &RunConfig) -> ExitCode {
    let format = match OutputFormat::from_str(&cfg.out_format) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let out = match run_audit(cfg) {
        Ok(out) => out,
        Err(e) => return fail(pipeline_exit(&e), e),
    };
    eprintln!(
        "loaded {} records ({} lines skipped), removed {} duplicates, {} out of scope, {} unparseable",
        out.stats.records_loaded,
        out.stats.lines_skipped,
        out.stats.dedup_removed,
        out.stats.out_of_scope,
        out.stats.parse_failures
    );
    let mut bytes = match render(&out.report, format) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if format == OutputFormat::Text && !out.offshore.is_empty() {
        bytes.push(b'\n');
        bytes.extend_from_slice(render_offshore(&out.offshore).as_bytes());
    }
    if let Err(e) = write_output(cfg, &bytes) {
        return fail(EXIT_CONFIG, e);
    }
    ExitCode::SUCCESS
}

fn cmd_report(cfg: &RunConfig) -> ExitCode {
    let format = match OutputFormat::from_str(&cfg.out_format) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let Some(path) = cfg.inputs.first() else {
        return fail(EXIT_CONFIG, "no --input given (expected a saved json report)");
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, format!("cannot read {}: {e}", path.display())),
    };
    let report: acars_audit::audit::AuditReport = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_REJECTED, format!("{}: not a saved report: {e}", path.display())),
    };
    match render(&report, format) {
        Ok(bytes) => match write_output(cfg, &bytes) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(EXIT_CONFIG, e),
        },
        Err(e) => fail(EXIT_CONFIG, e),
    }
}

fn cmd_crack(cfg: &RunConfig) -> ExitCode {
    let out = match run_audit(cfg) {
        Ok(out) => out,
        Err(e) => return fail(pipeline_exit(&e), e),
    };
    if out.encrypted.is_empty() {
        return fail(
            EXIT_NO_CIPHERTEXT,
            "no encrypted-classified messages in the corpus; nothing to crack",
        );
    }
    let tables = match load_tables(cfg) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let lines: Vec<&str> = out.encrypted.iter().map(|m| m.text.as_str()).collect();
    let result = match crack_with_crib(&lines, &tables.crib) {
        Ok(r) => r,
        Err(e @ CrackError::NoAlignment) => return fail(EXIT_REJECTED, e),
        Err(e) => return fail(EXIT_REJECTED, e),
    };
    let mut text = String::new();
    text.push_str(&format!(
        "aligned {} of {} encrypted messages\n",
        result.aligned_lines,
        out.encrypted.len()
    ));
    text.push_str(&format!(
        "key coverage from crib constraints: {:.1}%\n",
        result.coverage * 100.0
    ));
    text.push_str("decrypted samples:\n");
    for msg in out.encrypted.iter().take(10) {
        text.push_str(&format!(
            "  {}: {}\n",
            msg.record_id,
            result.key.decrypt(&msg.text)
        ));
    }
    match write_output(cfg, text.as_bytes()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_CONFIG, e),
    }
}

fn cmd_redact(cfg: &RunConfig) -> ExitCode {
    let key = match cfg.redaction_key() {
        Ok(k) => k,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let policy = match RedactionPolicy::uniform(&cfg.redact_policy, key) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let mut out = match run_audit(cfg) {
        Ok(out) => out,
        Err(e) => return fail(pipeline_exit(&e), e),
    };
    for msg in &mut out.messages {
        msg.findings = match redact(&msg.findings, &policy) {
            Ok(f) => f,
            Err(e) => return fail(EXIT_CONFIG, e),
        };
    }
    match export_findings_csv(&out.messages) {
        Ok(bytes) => match write_output(cfg, &bytes) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(EXIT_CONFIG, e),
        },
        Err(e) => fail(EXIT_CONFIG, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&RunConfig) -> ExitCode) = match &cli.command {
        Command::Ingest(a) => (a, cmd_ingest),
        Command::Audit(a) => (a, cmd_audit),
        Command::Report(a) => (a, cmd_report),
        Command::Crack(a) => (a, cmd_crack),
        Command::Redact(a) => (a, cmd_redact),
    };
    match args.resolve() {
        Ok(cfg) => run(&cfg),
        Err(e) => fail(EXIT_CONFIG, e),
    }
}
