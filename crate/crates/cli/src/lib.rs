//! Verification suites over the `hirschlab` core, with machine-readable reports.

pub mod config;
pub mod report;
pub mod roundtrip;
mod suites;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

pub use config::{named_model, Fault, SuiteConfig, SuiteId};
pub use report::{Record, Report, Status, Summary};

/// Errors outside the mathematics: bad flags, unreadable or malformed input.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    /// Well-formed JSON describing an object that violates its invariants.
    #[error("validation error: {0}")]
    Invalid(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Result of one check before timing is attached.
pub(crate) struct Outcome {
    status: Status,
    evidence: Value,
}

impl Outcome {
    pub(crate) fn judge(ok: bool, evidence: Value) -> Self {
        Outcome { status: if ok { Status::Pass } else { Status::Fail }, evidence }
    }
}

type CheckFn = Box<dyn Fn() -> Outcome + Send + Sync>;

pub(crate) struct Check {
    id: String,
    anchor: &'static str,
    run: CheckFn,
}

impl Check {
    pub(crate) fn new(id: impl Into<String>, anchor: &'static str, run: impl Fn() -> Outcome + Send + Sync + 'static) -> Self {
        Check { id: id.into(), anchor, run: Box::new(run) }
    }
}

/// Runs every selected suite in a pool of `cfg.jobs` workers; records keep suite order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut checks = Vec::new();
    for &suite in &cfg.suites {
        checks.extend(suites::checks(suite, cfg)?);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Pool(e.to_string()))?;
    let records = pool.install(|| {
        checks
            .par_iter()
            .map(|c| {
                let t = Instant::now();
                let out = (c.run)();
                Record {
                    id: c.id.clone(),
                    anchor: c.anchor.to_string(),
                    status: out.status,
                    evidence: out.evidence,
                    wall_ms: t.elapsed().as_secs_f64() * 1e3,
                }
            })
            .collect()
    });
    Ok(Report::new(cfg.clone(), records))
}
