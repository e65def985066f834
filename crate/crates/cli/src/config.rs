use std::path::PathBuf;

use clap::ValueEnum;
use hirschlab::hirsch::StabilizeParams;
use hirschlab::models::{canned, eigenvalue_one, log_point_r2, xy_nilpotent, MonomialSNCLModel, CANNED};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    ConeSign,
    Acyclicity,
    Residue,
    HirschQuotient,
    KoszulGr,
    Spectral,
    CechResolution,
    Comparison,
    Substitution,
    Tooling,
}

impl SuiteId {
    pub const ALL: [SuiteId; 10] = [
        SuiteId::ConeSign,
        SuiteId::Acyclicity,
        SuiteId::Residue,
        SuiteId::HirschQuotient,
        SuiteId::KoszulGr,
        SuiteId::Spectral,
        SuiteId::CechResolution,
        SuiteId::Comparison,
        SuiteId::Substitution,
        SuiteId::Tooling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::ConeSign => "cone-sign",
            SuiteId::Acyclicity => "acyclicity",
            SuiteId::Residue => "residue",
            SuiteId::HirschQuotient => "hirsch-quotient",
            SuiteId::KoszulGr => "koszul-gr",
            SuiteId::Spectral => "spectral",
            SuiteId::CechResolution => "cech-resolution",
            SuiteId::Comparison => "comparison",
            SuiteId::Substitution => "substitution",
            SuiteId::Tooling => "tooling",
        }
    }
}

/// Deliberate corruptions for exercising the failure paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Build mapping cones with `+L` on the source.
    FlipConeSign,
    /// Negate one restriction map of each component diagram.
    CorruptRestrictionSign,
    /// Move every degree-0 vector of the relative quotient into `F^1`.
    EnlargeFiltration,
    /// Replace each model's connection by the identity.
    NonNilpotent,
}

/// Models the suites accept by name besides the canned ones.
pub const EXTRA_MODELS: [&str; 3] = ["xy_nilpotent", "eigenvalue_one", "log_point_r2"];

pub fn named_model(name: &str) -> Result<MonomialSNCLModel, CliError> {
    match name {
        "xy_nilpotent" => Ok(xy_nilpotent()),
        "eigenvalue_one" => Ok(eigenvalue_one()),
        "log_point_r2" => Ok(log_point_r2()),
        _ => canned(name).map_err(|_| {
            let known: Vec<&str> = CANNED.iter().chain(EXTRA_MODELS.iter()).copied().collect();
            CliError::Config(format!("unknown model {name:?}; known: {}", known.join(", ")))
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub suites: Vec<SuiteId>,
    pub model: Option<String>,
    pub model_file: Option<PathBuf>,
    /// Loaded from `model_file`.
    #[serde(skip)]
    pub file_model: Option<MonomialSNCLModel>,
    /// Truncation bound `N`.
    pub truncation: usize,
    /// First bound of the stabilization window; defaults to `max_deg + 2`.
    pub start: Option<usize>,
    pub window: usize,
    /// Polynomial degree bound `D`; each suite has its own default when unset.
    pub degree_bound: Option<usize>,
    pub i_max: i32,
    pub q_max: i32,
    pub jobs: Option<usize>,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: SuiteId::ALL.to_vec(),
            model: None,
            model_file: None,
            file_model: None,
            truncation: 6,
            start: None,
            window: 2,
            degree_bound: None,
            i_max: 4,
            q_max: 3,
            jobs: None,
            fault: None,
            seed: 2024,
        }
    }
}

impl SuiteConfig {
    pub fn for_suite(suite: SuiteId) -> Self {
        SuiteConfig { suites: vec![suite], ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.suites.is_empty() {
            return Err(CliError::Config("no suites selected".into()));
        }
        if self.i_max < 0 || self.q_max < 0 {
            return Err(CliError::Config("--i-max and --q-max must be nonnegative".into()));
        }
        if self.truncation < self.i_max as usize {
            return Err(CliError::Config(format!(
                "truncation {} is below --i-max {}",
                self.truncation, self.i_max
            )));
        }
        if self.window == 0 {
            return Err(CliError::Config("--window must be positive".into()));
        }
        if self.model.is_some() && self.model_file.is_some() {
            return Err(CliError::Config("--model and --model-file are exclusive".into()));
        }
        if let Some(name) = &self.model {
            named_model(name)?;
        }
        Ok(())
    }

    /// Reads `model_file` if one is set.
    pub fn load_model_file(&mut self) -> Result<(), CliError> {
        if let Some(path) = &self.model_file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            let model: MonomialSNCLModel = serde_json::from_str(&text).map_err(crate::roundtrip::parse_error)?;
            model.validate(false).map_err(|e| CliError::Config(e.to_string()))?;
            self.file_model = Some(model);
        }
        Ok(())
    }

    pub fn stabilize(&self) -> StabilizeParams {
        StabilizeParams { n0: self.start, window: self.window, n_max: None }
    }

    /// The models a suite runs on: the selected one, or `defaults` with the suite's degree bound.
    pub fn models(&self, defaults: &[&str], default_bound: usize) -> Result<Vec<(String, MonomialSNCLModel)>, CliError> {
        let picked: Vec<(String, MonomialSNCLModel)> = if let Some(m) = &self.file_model {
            let name = self
                .model_file
                .as_ref()
                .and_then(|p| p.file_stem())
                .map_or("file".to_string(), |s| s.to_string_lossy().into_owned());
            // A model file carries its own degree bound.
            let bound = self.degree_bound.unwrap_or(m.degree_bound);
            vec![(name, m.with_degree_bound(bound))]
        } else if let Some(name) = &self.model {
            vec![(name.clone(), named_model(name)?)]
        } else {
            defaults.iter().map(|&n| Ok((n.to_string(), named_model(n)?))).collect::<Result<_, CliError>>()?
        };
        Ok(picked
            .into_iter()
            .map(|(n, m)| {
                let mut m = if self.file_model.is_some() {
                    m
                } else {
                    m.with_degree_bound(self.degree_bound.unwrap_or(default_bound))
                };
                if self.fault == Some(Fault::NonNilpotent) {
                    let k = m.coefficient_dim();
                    let id = hirschlab::SparseRatMatrix::identity(k);
                    m = m.with_connection(vec![id; m.r]);
                }
                (n, m)
            })
            .collect())
    }
}
