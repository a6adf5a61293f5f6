//! Command output: human text followed by a `key=value` block.

use std::fmt::Write as _;

use bxlens::LawReport;

pub const MACHINE_MARKER: &str = "--- machine";

/// What a finished command prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn usage(message: impl Into<String>) -> Outcome {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {}\n", message.into()),
        }
    }

    /// Value of `key` in the machine block.
    pub fn machine_value(&self, key: &str) -> Option<&str> {
        let (_, block) = self.stdout.split_once(MACHINE_MARKER)?;
        block
            .lines()
            .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
    }
}

#[derive(Debug, Default)]
pub struct Report {
    human: String,
    machine: String,
    failed: bool,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut r = Report::default();
        r.key("command", command);
        r
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.human, "{}", s.as_ref());
    }

    pub fn text(&mut self, s: &str) {
        self.human.push_str(s);
        if !s.ends_with('\n') {
            self.human.push('\n');
        }
    }

    pub fn key(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.machine, "{key}={value}");
    }

    pub fn fail(&mut self) {
        self.failed = true;
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn laws(&mut self, prefix: &str, report: &LawReport) {
        self.text(&report.render_human());
        self.machine.push_str(&report.render_machine(prefix));
        if !report.passed() {
            self.failed = true;
        }
    }

    pub fn finish(mut self) -> Outcome {
        let code = i32::from(self.failed);
        self.key("exit", code);
        Outcome {
            code,
            stdout: format!("{}\n{MACHINE_MARKER}\n{}", self.human, self.machine),
            stderr: String::new(),
        }
    }
}
