//! Load, save and reload of JSON artifacts.

use clap::ValueEnum;
use hirschlab::cech::ComponentDiagram;
use hirschlab::filt::FilteredComplex;
use hirschlab::hirsch::HirschDatum;
use hirschlab::models::MonomialSNCLModel;
use hirschlab::{ChainMap, Complex};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ArtifactKind {
    Model,
    Complex,
    ChainMap,
    Datum,
    Filtered,
    Diagram,
}

/// Guesses the artifact kind from the top-level keys.
pub fn detect(v: &Value) -> Option<ArtifactKind> {
    let obj = v.as_object()?;
    let has = |k: &str| obj.contains_key(k);
    Some(if has("t_map") {
        ArtifactKind::Model
    } else if has("m_max") {
        ArtifactKind::Diagram
    } else if has("source") && has("target") {
        ArtifactKind::ChainMap
    } else if has("levels") && has("complex") {
        ArtifactKind::Filtered
    } else if has("L") {
        ArtifactKind::Datum
    } else if has("spaces") {
        ArtifactKind::Complex
    } else {
        return None;
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripVerdict {
    pub kind: ArtifactKind,
    /// Whether the reloaded object serializes exactly like the first load.
    pub equal: bool,
}

pub(crate) fn parse_error(e: serde_json::Error) -> CliError {
    // Invariant checks run after the whole value is read and carry no position.
    if e.line() == 0 {
        CliError::Invalid(e.to_string())
    } else {
        CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

fn cycle<T: Serialize + DeserializeOwned>(text: &str) -> Result<bool, CliError> {
    let first: T = serde_json::from_str(text).map_err(parse_error)?;
    let saved = serde_json::to_string(&first).map_err(parse_error)?;
    let second: T = serde_json::from_str(&saved).map_err(parse_error)?;
    let resaved = serde_json::to_string(&second).map_err(parse_error)?;
    Ok(saved == resaved)
}

pub fn roundtrip_text(text: &str, kind: Option<ArtifactKind>) -> Result<RoundtripVerdict, CliError> {
    let kind = match kind {
        Some(k) => k,
        None => {
            let v: Value = serde_json::from_str(text).map_err(parse_error)?;
            detect(&v).ok_or_else(|| CliError::Config("cannot tell which artifact this file holds".into()))?
        }
    };
    let equal = match kind {
        ArtifactKind::Model => cycle::<MonomialSNCLModel>(text)?,
        ArtifactKind::Complex => cycle::<Complex>(text)?,
        ArtifactKind::ChainMap => cycle::<ChainMap>(text)?,
        ArtifactKind::Datum => cycle::<HirschDatum>(text)?,
        ArtifactKind::Filtered => cycle::<FilteredComplex>(text)?,
        ArtifactKind::Diagram => cycle::<ComponentDiagram>(text)?,
    };
    Ok(RoundtripVerdict { kind, equal })
}

pub fn roundtrip_file(path: &std::path::Path, kind: Option<ArtifactKind>) -> Result<RoundtripVerdict, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    roundtrip_text(&text, kind)
}
