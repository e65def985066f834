use serde::Serialize;
use serde_json::Value;

use crate::config::SuiteConfig;

pub const SCHEMA: &str = "hirschlab-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    /// What the check asserts, in a stable phrase.
    pub anchor: String,
    pub status: Status,
    pub evidence: Value,
    pub wall_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub config: SuiteConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: SuiteConfig, records: Vec<Record>) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Inconclusive => summary.inconclusive += 1,
            }
        }
        Report { schema: SCHEMA, tool_version: env!("CARGO_PKG_VERSION"), config, records, summary }
    }

    /// 0 when everything passes, 1 on any failure, 3 when only inconclusive checks remain.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if self.summary.inconclusive > 0 {
            3
        } else {
            0
        }
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    /// The report as JSON with every wall time zeroed.
    pub fn timeless_json(&self) -> Value {
        let mut copy = self.clone();
        for r in &mut copy.records {
            r.wall_ms = 0.0;
        }
        serde_json::to_value(copy).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("{:<12} {:<44} {:>9.1} ms  {}\n", r.status.label(), r.id, r.wall_ms, r.anchor));
        }
        let s = self.summary;
        out.push_str(&format!("{} passed, {} failed, {} inconclusive\n", s.pass, s.fail, s.inconclusive));
        out
    }
}
