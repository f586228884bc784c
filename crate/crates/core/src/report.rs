//! Check reports: named defect tables with a pass/fail verdict.

use std::fmt;

use crate::forms::{DiffForm, Multivector, VVForm};
use crate::poly::Poly;

/// One checked identity and its nonzero defect components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub identity: String,
    /// `(component label, rendered value)` for every nonzero component.
    pub defect: Vec<(String, String)>,
    /// Entries that do not take part in the verdict carry evidence only.
    pub required: bool,
}

impl Entry {
    pub fn is_zero(&self) -> bool {
        self.defect.is_empty()
    }
}

/// Accumulates the nonzero components of a defect.
#[derive(Clone, Debug, Default)]
pub struct Defect {
    names: Vec<String>,
    items: Vec<(String, String)>,
}

impl Defect {
    pub fn new(names: &[String]) -> Self {
        Defect {
            names: names.to_vec(),
            items: Vec::new(),
        }
    }

    pub fn poly(&mut self, label: impl Into<String>, p: &Poly) {
        if !p.is_zero() {
            self.items.push((label.into(), p.render(&self.names)));
        }
    }

    pub fn section(&mut self, label: &str, frame: &[String], s: &[Poly]) {
        for (b, c) in s.iter().enumerate() {
            let v = frame.get(b).cloned().unwrap_or_else(|| format!("#{b}"));
            self.poly(format!("{label} [{v}]"), c);
        }
    }

    pub fn form(&mut self, label: &str, f: &DiffForm) {
        for (idx, c) in f.terms() {
            let basis: Vec<String> = idx
                .iter()
                .map(|i| format!("d{}", self.names.get(*i).cloned().unwrap_or_default()))
                .collect();
            let l = if basis.is_empty() {
                label.to_string()
            } else {
                format!("{label} [{}]", basis.join("^"))
            };
            self.poly(l, c);
        }
    }

    pub fn vvform(&mut self, label: &str, frame: &[String], f: &VVForm) {
        for (b, c) in f.comps().iter().enumerate() {
            let v = frame.get(b).cloned().unwrap_or_else(|| format!("#{b}"));
            self.form(&format!("{label} {v}"), c);
        }
    }

    pub fn multivector(&mut self, label: &str, m: &Multivector) {
        for (idx, c) in m.terms() {
            let basis: Vec<String> = idx
                .iter()
                .map(|i| format!("d/d{}", self.names.get(*i).cloned().unwrap_or_default()))
                .collect();
            self.poly(format!("{label} [{}]", basis.join("^")), c);
        }
    }

    pub fn flag(&mut self, label: impl Into<String>, message: impl Into<String>) {
        self.items.push((label.into(), message.into()));
    }

    pub fn is_zero(&self) -> bool {
        self.items.is_empty()
    }

    pub fn into_items(self) -> Vec<(String, String)> {
        self.items
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub title: String,
    pub entries: Vec<Entry>,
    pub subreports: Vec<CheckReport>,
    /// Informational key/value output (derived objects, detected constants).
    pub facts: Vec<(String, String)>,
}

impl CheckReport {
    pub fn new(title: impl Into<String>) -> Self {
        CheckReport {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, name: &str, identity: &str, defect: Defect) {
        self.entries.push(Entry {
            name: name.into(),
            identity: identity.into(),
            defect: defect.into_items(),
            required: true,
        });
    }

    /// An entry shown for evidence but excluded from the verdict.
    pub fn push_evidence(&mut self, name: &str, identity: &str, defect: Defect) {
        self.entries.push(Entry {
            name: name.into(),
            identity: identity.into(),
            defect: defect.into_items(),
            required: false,
        });
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.facts.push((key.into(), value.into()));
    }

    pub fn sub(&mut self, report: CheckReport) {
        self.subreports.push(report);
    }

    pub fn verdict(&self) -> bool {
        self.entries.iter().all(|e| !e.required || e.is_zero())
            && self.subreports.iter().all(CheckReport::verdict)
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn subreport(&self, title: &str) -> Option<&CheckReport> {
        self.subreports.iter().find(|r| r.title == title)
    }

    pub fn fact_value(&self, key: &str) -> Option<&str> {
        self.facts
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Names of failing required entries, with sub-report titles as prefixes.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .entries
            .iter()
            .filter(|e| e.required && !e.is_zero())
            .map(|e| e.name.clone())
            .collect();
        for s in &self.subreports {
            out.extend(s.failures().into_iter().map(|f| format!("{}/{f}", s.title)));
        }
        out
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        writeln!(
            f,
            "{pad}{}: {}",
            self.title,
            if self.verdict() { "PASS" } else { "FAIL" }
        )?;
        for (k, v) in &self.facts {
            writeln!(f, "{pad}  {k} = {v}")?;
        }
        for e in &self.entries {
            let status = match (e.is_zero(), e.required) {
                (true, _) => "ok",
                (false, true) => "DEFECT",
                (false, false) => "nonzero",
            };
            writeln!(f, "{pad}  [{status}] {} ({})", e.name, e.identity)?;
            for (label, value) in &e.defect {
                writeln!(f, "{pad}      {label}: {value}")?;
            }
        }
        for s in &self.subreports {
            s.write_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_tracks_required_entries() {
        let names = vec!["x".to_string()];
        let mut r = CheckReport::new("demo");
        r.push("a", "a = 0", Defect::new(&names));
        assert!(r.verdict());
        let mut d = Defect::new(&names);
        d.poly("c", &Poly::var(1, 0));
        r.push_evidence("b", "b = 0", d.clone());
        assert!(r.verdict());
        r.push("c", "c = 0", d);
        assert!(!r.verdict());
        assert_eq!(r.failures(), vec!["c".to_string()]);
        assert!(r.to_string().contains("c: x"));
    }

    #[test]
    fn subreports_propagate() {
        let mut inner = CheckReport::new("inner");
        let mut d = Defect::new(&[]);
        d.flag("x", "broken");
        inner.push("e", "e", d);
        let mut outer = CheckReport::new("outer");
        outer.sub(inner);
        assert!(!outer.verdict());
        assert_eq!(outer.failures(), vec!["inner/e".to_string()]);
    }
}
