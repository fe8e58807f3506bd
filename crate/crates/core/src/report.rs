use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

/// Most counterexamples kept per report.
pub const MAX_COUNTEREXAMPLES: usize = 10;

/// Wording attached to passes of grid-level implementability checks.
pub const GRID_CAVEAT: &str = "grid-implementable: verdict concerns the discretized mechanism only";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    /// Grid profile indices involved, in the order the explanation uses them.
    pub profiles: Vec<usize>,
    pub agent: Option<usize>,
    pub explanation: String,
    pub margin: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckStats {
    pub profiles_examined: usize,
    pub comparisons: u64,
    pub violations: u64,
    pub inconclusive: u64,
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    pub stats: CheckStats,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: &str) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Pass,
            counterexamples: Vec::new(),
            stats: CheckStats::default(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    /// Records a violation; the report fails.
    pub fn violation(&mut self, cx: Counterexample) {
        self.stats.violations += 1;
        self.verdict = Verdict::Fail;
        self.counterexamples.push(cx);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Sorts counterexamples by profile indices, keeps the first
    /// [`MAX_COUNTEREXAMPLES`], and downgrades a clean pass with inconclusive
    /// cases to inconclusive when `strict_inconclusive` is set.
    pub fn finish(mut self, strict_inconclusive: bool) -> Self {
        self.counterexamples.sort_by(|a, b| {
            a.profiles
                .cmp(&b.profiles)
                .then(a.agent.cmp(&b.agent))
                .then(a.explanation.cmp(&b.explanation))
        });
        self.counterexamples.truncate(MAX_COUNTEREXAMPLES);
        if strict_inconclusive && self.verdict == Verdict::Pass && self.stats.inconclusive > 0 {
            self.verdict = Verdict::Inconclusive;
        }
        self
    }
}
