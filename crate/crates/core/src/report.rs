//! Law reports: every checker collects violations instead of failing fast, so
//! callers (and the CLI) can print the full list deterministically.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LawReport {
    pub violations: Vec<String>,
}

impl LawReport {
    pub fn new() -> LawReport {
        LawReport::default()
    }

    pub fn violation(&mut self, msg: String) {
        self.violations.push(msg);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: LawReport) {
        self.violations.extend(other.violations);
    }

    pub fn prefixed(self, prefix: &str) -> LawReport {
        LawReport {
            violations: self
                .violations
                .into_iter()
                .map(|v| format!("{prefix}: {v}"))
                .collect(),
        }
    }

    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(msg());
        }
    }
}

impl std::fmt::Display for LawReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            writeln!(f, "ok")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            Ok(())
        }
    }
}
