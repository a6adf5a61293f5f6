//! Law-check reports.
//!
//! A [`LawReport`] keeps, per law, how many instances were checked, how many
//! failed, and the first failing instance in enumeration order.

use std::fmt::{self, Write as _};

use crate::value::Value;

/// Where two stateful computations first part ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDivergence {
    pub initial: Value,
    pub lhs_result: Value,
    pub lhs_final: Value,
    pub rhs_result: Value,
    pub rhs_final: Value,
}

/// One failing law instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub law: String,
    pub bindings: Vec<(String, Value)>,
    pub lhs: String,
    pub rhs: String,
    pub divergence: Option<StateDivergence>,
}

impl Violation {
    pub fn new(law: &str, bindings: Vec<(String, Value)>, lhs: String, rhs: String) -> Violation {
        Violation {
            law: law.to_string(),
            bindings,
            lhs,
            rhs,
            divergence: None,
        }
    }

    pub fn binding(&self, name: &str) -> Option<&Value> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at", self.law)?;
        if self.bindings.is_empty() {
            write!(f, " (no bindings)")?;
        }
        for (name, value) in &self.bindings {
            write!(f, " {name}={value}")?;
        }
        write!(f, ": lhs = {} ; rhs = {}", self.lhs, self.rhs)?;
        if let Some(d) = &self.divergence {
            write!(
                f,
                " (from state {}: lhs ends in {}, rhs ends in {})",
                d.initial, d.lhs_final, d.rhs_final
            )?;
        }
        Ok(())
    }
}

/// Per-law tally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawTally {
    pub law: String,
    pub checked: u64,
    pub failed: u64,
    pub first: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub subject: String,
    pub laws: Vec<LawTally>,
    pub notes: Vec<String>,
}

impl LawReport {
    pub fn new(subject: impl Into<String>) -> LawReport {
        LawReport {
            subject: subject.into(),
            laws: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn tally_mut(&mut self, law: &str) -> &mut LawTally {
        if let Some(i) = self.laws.iter().position(|t| t.law == law) {
            return &mut self.laws[i];
        }
        self.laws.push(LawTally {
            law: law.to_string(),
            checked: 0,
            failed: 0,
            first: None,
        });
        self.laws.last_mut().expect("just pushed")
    }

    /// Registers a law so that it shows up even when quantified over nothing.
    pub fn declare(&mut self, law: &str) {
        self.tally_mut(law);
    }

    pub fn pass(&mut self, law: &str) {
        self.tally_mut(law).checked += 1;
    }

    pub fn fail(&mut self, violation: Violation) {
        let tally = self.tally_mut(&violation.law.clone());
        tally.checked += 1;
        tally.failed += 1;
        if tally.first.is_none() {
            tally.first = Some(violation);
        }
    }

    /// Records one instance; `violation` is only built when `ok` is false.
    pub fn record(&mut self, law: &str, ok: bool, violation: impl FnOnce() -> Violation) {
        if ok {
            self.pass(law);
        } else {
            self.fail(violation());
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.laws.iter().all(|t| t.failed == 0)
    }

    pub fn failures(&self) -> u64 {
        self.laws.iter().map(|t| t.failed).sum()
    }

    pub fn checked(&self) -> u64 {
        self.laws.iter().map(|t| t.checked).sum()
    }

    pub fn tally(&self, law: &str) -> Option<&LawTally> {
        self.laws.iter().find(|t| t.law == law)
    }

    pub fn violation(&self, law: &str) -> Option<&Violation> {
        self.tally(law).and_then(|t| t.first.as_ref())
    }

    /// Violations in law-declaration order.
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.laws.iter().filter_map(|t| t.first.as_ref())
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations().next()
    }

    /// Folds `other` into this report, prefixing its law names.
    pub fn absorb(&mut self, prefix: &str, other: LawReport) {
        for mut tally in other.laws {
            let law = if prefix.is_empty() {
                tally.law.clone()
            } else {
                format!("{prefix}.{}", tally.law)
            };
            if let Some(v) = tally.first.as_mut() {
                v.law = law.clone();
            }
            let mine = self.tally_mut(&law);
            mine.checked += tally.checked;
            mine.failed += tally.failed;
            if mine.first.is_none() {
                mine.first = tally.first;
            }
        }
        for n in other.notes {
            self.notes.push(if prefix.is_empty() {
                n
            } else {
                format!("{prefix}: {n}")
            });
        }
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {}", self.subject);
        for t in &self.laws {
            let mark = if t.failed == 0 { "ok  " } else { "FAIL" };
            let _ = writeln!(
                out,
                "  [{mark}] {:<20} {} checked, {} failed",
                t.law, t.checked, t.failed
            );
            if let Some(v) = &t.first {
                let bindings: Vec<String> =
                    v.bindings.iter().map(|(n, x)| format!("{n}={x}")).collect();
                let _ = writeln!(out, "         at   {}", bindings.join(" "));
                let _ = writeln!(out, "         lhs  {}", v.lhs);
                let _ = writeln!(out, "         rhs  {}", v.rhs);
                if let Some(d) = &v.divergence {
                    let _ = writeln!(
                        out,
                        "         from initial state {}: lhs final state {}, rhs final state {}",
                        d.initial, d.lhs_final, d.rhs_final
                    );
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }

    /// Stable `key=value` lines, one fact per line.
    pub fn render_machine(&self, prefix: &str) -> String {
        let mut out = String::new();
        let p = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        let _ = writeln!(out, "{}={}", p("subject"), self.subject);
        let _ = writeln!(
            out,
            "{}={}",
            p("status"),
            if self.passed() { "pass" } else { "fail" }
        );
        for t in &self.laws {
            let key = format!("law.{}", t.law);
            let _ = writeln!(out, "{}={}", p(&format!("{key}.checked")), t.checked);
            let _ = writeln!(out, "{}={}", p(&format!("{key}.failed")), t.failed);
            if let Some(v) = &t.first {
                for (n, x) in &v.bindings {
                    let _ = writeln!(out, "{}={x}", p(&format!("{key}.witness.{n}")));
                }
                let _ = writeln!(out, "{}={}", p(&format!("{key}.lhs")), v.lhs);
                let _ = writeln!(out, "{}={}", p(&format!("{key}.rhs")), v.rhs);
                if let Some(d) = &v.divergence {
                    let _ = writeln!(out, "{}={}", p(&format!("{key}.initial_state")), d.initial);
                    let _ = writeln!(
                        out,
                        "{}={}",
                        p(&format!("{key}.lhs_final_state")),
                        d.lhs_final
                    );
                    let _ = writeln!(
                        out,
                        "{}={}",
                        p(&format!("{key}.rhs_final_state")),
                        d.rhs_final
                    );
                }
            }
        }
        out
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_human())
    }
}
