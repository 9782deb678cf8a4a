//! Configuration documents: `{"lines": [{"id": "a", "t": "0", "s": "0"}, …]}`.

use lagrangian_ainf::geometry::{GeometryError, Line, LineConfig};
use lagrangian_ainf::scalar::{Rational, ScalarError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDocument {
    pub id: String,
    pub t: String,
    pub s: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub lines: Vec<LineDocument>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{0}`: {1}")]
    Io(String, std::io::Error),
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line `{id}`, field `{field}`: {source}")]
    Rational {
        id: String,
        field: &'static str,
        source: ScalarError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Name accepted in place of a file for the three-line fixture.
pub const BUILTIN: &str = "CFG3";

pub fn builtin() -> ConfigDocument {
    let line = |id: &str, t: &str, s: &str| LineDocument {
        id: id.into(),
        t: t.into(),
        s: s.into(),
    };
    ConfigDocument {
        lines: vec![line("a", "0", "0"), line("b", "1", "0"), line("c", "2", "-2")],
    }
}

pub fn parse_document(text: &str) -> Result<ConfigDocument, ConfigError> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_config(doc: &ConfigDocument) -> Result<LineConfig, ConfigError> {
    let field = |id: &str, name: &'static str, text: &str| {
        text.parse::<Rational>().map_err(|source| ConfigError::Rational {
            id: id.to_string(),
            field: name,
            source,
        })
    };
    let lines = doc
        .lines
        .iter()
        .map(|l| {
            Ok(Line::new(
                l.id.clone(),
                field(&l.id, "t", &l.t)?,
                field(&l.id, "s", &l.s)?,
            ))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Ok(LineConfig::new(lines)?)
}

pub fn parse_config(text: &str) -> Result<LineConfig, ConfigError> {
    to_config(&parse_document(text)?)
}

/// Canonical document: rationals in lowest terms.
pub fn to_document(cfg: &LineConfig) -> ConfigDocument {
    ConfigDocument {
        lines: cfg
            .lines()
            .iter()
            .map(|l| LineDocument {
                id: l.id.clone(),
                t: l.t.to_string(),
                s: l.s.to_string(),
            })
            .collect(),
    }
}

pub fn serialize(cfg: &LineConfig) -> String {
    serde_json::to_string_pretty(&to_document(cfg)).expect("plain data") + "\n"
}

/// Loads `CFG3` or a configuration file.
pub fn load(arg: &str) -> Result<LineConfig, ConfigError> {
    if arg == BUILTIN {
        return to_config(&builtin());
    }
    let text = std::fs::read_to_string(arg).map_err(|e| ConfigError::Io(arg.to_string(), e))?;
    parse_config(&text)
}
