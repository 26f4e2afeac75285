//! The envelope every JSON document carries, and output-format selection.

use std::str::FromStr;

use energame_core::Tolerances;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the core-membership tolerance.
pub const TOL_ENV: &str = "ENERGAME_TOL";

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool_version: &'static str,
    pub command: &'static str,
    /// Lowercase hex SHA-256 of the input bytes.
    pub input_digest: String,
    pub tolerances: Tolerances,
}

impl Envelope {
    pub fn new(command: &'static str, input: &[u8], tolerances: Tolerances) -> Self {
        Envelope { tool_version: TOOL_VERSION, command, input_digest: sha256_hex(input), tolerances }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// A command's result together with its envelope, serialised flat.
#[derive(Debug, Clone, Serialize)]
pub struct Document<T> {
    #[serde(flatten)]
    pub envelope: Envelope,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Document<T> {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Default tolerances, with `tol.core` taken from `ENERGAME_TOL` when set.
pub fn tolerances_from_env() -> Result<Tolerances, String> {
    match std::env::var(TOL_ENV) {
        Ok(v) => parse_tol(&v).map(|t| Tolerances::DEFAULT.with_core(t)),
        Err(std::env::VarError::NotPresent) => Ok(Tolerances::DEFAULT),
        Err(e) => Err(format!("{TOL_ENV}: {e}")),
    }
}

fn parse_tol(v: &str) -> Result<f64, String> {
    match v.trim().parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(format!("{TOL_ENV}={v:?} is not a nonnegative number")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?} (expected json, csv or text)")),
        }
    }
}

/// Writes CSV rows with a header into a string.
pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Formats a real for CSV and text output: shortest round-trip form,
/// empty for `None`.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
