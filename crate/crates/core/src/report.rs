//! Structured pass/fail records for every identity check.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, i64>,
}

impl Params {
    pub fn module(n: usize, len: usize) -> Self {
        Self {
            n: Some(n),
            len: Some(len),
            ..Self::default()
        }
    }

    pub fn with_i(mut self, i: usize) -> Self {
        self.i = Some(i);
        self
    }

    pub fn with_j(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

/// The grading convention a braid-level check ran under.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConventionTag {
    pub c1: i64,
    pub c2: i64,
    pub eps: i64,
    pub c: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub weight: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub words: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub lhs: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub citation: String,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<ConventionTag>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Number of weight spaces, samples or words compared.
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Stable ordering key used when merging reports from parallel runs.
    pub fn sort_key(&self) -> (String, Params, Option<ConventionTag>) {
        (self.check.clone(), self.params.clone(), self.convention.clone())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_convention(mut self, tag: ConventionTag) -> Self {
        self.convention = Some(tag);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// JSON with the duration zeroed, for determinism comparisons.
    pub fn to_json_untimed(&self) -> String {
        let mut copy = self.clone();
        copy.millis = 0;
        copy.to_json()
    }

    /// One human-readable line.
    pub fn summary_line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let mut params: Vec<String> = Vec::new();
        if let Some(n) = self.params.n {
            params.push(format!("n={n}"));
        }
        if let Some(len) = self.params.len {
            params.push(format!("N={len}"));
        }
        if let Some(i) = self.params.i {
            params.push(format!("i={i}"));
        }
        if let Some(j) = self.params.j {
            params.push(format!("j={j}"));
        }
        params.extend(self.params.extra.iter().map(|(k, v)| format!("{k}={v}")));
        let mut line = format!(
            "{status} {:<28} [{}] {} ({} cases, {} ms)",
            self.check,
            self.citation,
            params.join(" "),
            self.cases,
            self.millis
        );
        if let Some(w) = &self.counterexample_weight {
            line.push_str(&format!(" counterexample at {w}"));
        }
        line
    }
}

/// Accumulates comparisons for one check and produces its report.
pub struct CheckRun {
    check: String,
    citation: String,
    params: Params,
    started: Instant,
    cases: usize,
    failure: Option<Counterexample>,
}

impl CheckRun {
    pub fn start(check: &str, citation: &str, params: Params) -> Self {
        Self {
            check: check.to_string(),
            citation: citation.to_string(),
            params,
            started: Instant::now(),
            cases: 0,
            failure: None,
        }
    }

    pub fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    pub fn record_case(&mut self) {
        self.cases += 1;
    }

    pub fn has_failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Counts one case; keeps the first failure only.
    pub fn record(&mut self, ok: bool, counterexample: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(counterexample());
        }
    }

    /// Counts one failing case.
    pub fn fail_case(&mut self, counterexample: Counterexample) {
        self.cases += 1;
        self.fail(counterexample);
    }

    pub fn fail(&mut self, counterexample: Counterexample) {
        if self.failure.is_none() {
            self.failure = Some(counterexample);
        }
    }

    pub fn finish(self) -> VerificationReport {
        let status = if self.failure.is_some() { Status::Fail } else { Status::Pass };
        VerificationReport {
            check: self.check,
            citation: self.citation,
            params: self.params,
            convention: None,
            status,
            counterexample_weight: self.failure.as_ref().map(|c| c.weight.clone()),
            counterexample: self.failure,
            cases: self.cases,
            note: None,
            millis: self.started.elapsed().as_millis() as u64,
            seed: None,
        }
    }

    pub fn skipped(self, reason: &str) -> VerificationReport {
        let mut r = self.finish();
        r.status = Status::Skipped;
        r.note = Some(reason.to_string());
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_report_carries_counterexample() {
        let mut run = CheckRun::start("demo", "cond-viii", Params::module(3, 2).with_i(1).with_j(2));
        run.record(true, || unreachable!());
        run.record(false, || Counterexample {
            weight: "(1,1,0)".into(),
            words: vec!["E1 E2".into()],
            lhs: "0 0 1*q^0".into(),
            rhs: String::new(),
        });
        let r = run.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.counterexample_weight.as_deref(), Some("(1,1,0)"));
        assert_eq!(r.cases, 2);
        let json = r.to_json_untimed();
        assert!(json.contains("\"N\":2"));
        assert!(json.contains("\"status\":\"fail\""));
        assert!(json.contains("\"millis\":0"));
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
