//! Plain-text and tab-separated renderings of a [`Report`].

use std::fmt::Write;

use lnlab_core::report::CheckReport;

use crate::run::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format `{other}` (text, table)")),
        }
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Table => render_table(report),
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}  digest sha256:{}", report.engine, report.digest);
    if let Some(t) = &report.title {
        let _ = writeln!(out, "scene: {t}");
    }
    if report.checks.is_empty() {
        return out;
    }
    for c in &report.checks {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "check {} ({}): {}  [{} ms]",
            c.name,
            c.kind,
            c.status.label(),
            c.elapsed.as_millis()
        );
        if let Some(m) = &c.message {
            let _ = writeln!(out, "  {m}");
        }
        if let Some(r) = &c.report {
            for line in r.to_string().lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
    }
    let passed = report
        .checks
        .iter()
        .filter(|c| c.status == crate::run::Status::Pass)
        .count();
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{} checks, {} passed, {} not passed",
        report.checks.len(),
        passed,
        report.checks.len() - passed
    );
    out
}

/// Columns: check, kind, record, path, key, value.
///
/// Every record except `time_ms` is independent of the run.
fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# engine\t{}", report.engine);
    let _ = writeln!(out, "# digest\tsha256:{}", report.digest);
    let _ = writeln!(out, "check\tkind\trecord\tpath\tkey\tvalue");
    for c in &report.checks {
        let mut row = |record: &str, path: &str, key: &str, value: &str| {
            let _ = writeln!(
                out,
                "{}\t{}\t{record}\t{path}\t{}\t{}",
                c.name,
                c.kind,
                clean(key),
                clean(value)
            );
        };
        row("status", "", "", c.status.label());
        if let Some(m) = &c.message {
            row("message", "", "", m);
        }
        if let Some(r) = &c.report {
            walk(r, &r.title, &mut row);
        }
        row("time_ms", "", "", &c.elapsed.as_millis().to_string());
    }
    out
}

fn walk(r: &CheckReport, path: &str, row: &mut dyn FnMut(&str, &str, &str, &str)) {
    row(
        "verdict",
        path,
        "",
        if r.verdict() { "pass" } else { "fail" },
    );
    for (k, v) in &r.facts {
        row("fact", path, k, v);
    }
    for e in &r.entries {
        let status = match (e.is_zero(), e.required) {
            (true, _) => "ok",
            (false, true) => "defect",
            (false, false) => "nonzero",
        };
        row("entry", path, &e.name, status);
        for (label, value) in &e.defect {
            row("component", path, &format!("{}: {label}", e.name), value);
        }
    }
    for s in &r.subreports {
        walk(s, &format!("{path}/{}", s.title), row);
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}
