//! Run configuration: defaults, JSON config files, and flag overrides.

use eigenfiber::matrix::{vector_from_strings, ComplexVector};
use eigenfiber::spaces::{Family, SpaceId};
use eigenfiber::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_POINTS: usize = 50;
pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_STEP_SIZE: f64 = 0.05;
pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Values readable from a JSON config file; command-line flags override any
/// field that is set on both sides.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub space: Option<String>,
    pub n: Option<usize>,
    pub a: Option<Vec<String>>,
    pub b: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub steps: Option<usize>,
    pub step_size: Option<f64>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub level: Option<f64>,
    pub out: Option<String>,
}

/// Fully resolved run configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    pub seed: u64,
    pub points: usize,
    pub steps: usize,
    pub step_size: f64,
    pub h: f64,
    pub tol: f64,
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip)]
    pub space_id: SpaceId,
}

pub struct RawArgs {
    pub space: Option<String>,
    pub n: Option<usize>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub steps: Option<usize>,
    pub step_size: Option<f64>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub level: Option<f64>,
    pub out: Option<String>,
    pub config: Option<String>,
}

/// Split "1+2i,0,3-1i" into parts; JSON array syntax is accepted as well.
fn parse_vector_arg(s: &str) -> Result<Vec<String>> {
    let t = s.trim();
    if t.starts_with('[') {
        let arr: Vec<String> = serde_json::from_str(t)
            .map_err(|e| Error::InvalidParameter(format!("bad JSON vector {t:?}: {e}")))?;
        return Ok(arr);
    }
    Ok(t.split(',').map(|p| p.trim().to_string()).collect())
}

impl RawArgs {
    /// Merge flags over an optional config file and fill in the defaults.
    pub fn resolve(self) -> Result<RunConfig> {
        let file: FileConfig = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidParameter(format!("cannot read config {path}: {e}"))
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidParameter(format!("bad config {path}: {e}")))?
            }
            None => FileConfig::default(),
        };
        let space_str = self
            .space
            .or(file.space)
            .ok_or_else(|| Error::InvalidParameter("--space is required".into()))?;
        let n_override = self.n.or(file.n);
        let space_id = if space_str.contains(':') {
            let mut id = SpaceId::parse(&space_str)?;
            if let Some(n) = n_override {
                id = SpaceId::new(id.family, n)?;
            }
            id
        } else {
            let family = Family::parse_token(&space_str)?;
            let n = n_override.ok_or_else(|| {
                Error::InvalidParameter(format!("space {space_str:?} needs :n or --n"))
            })?;
            SpaceId::new(family, n)?
        };
        let a = match self.a {
            Some(s) => Some(parse_vector_arg(&s)?),
            None => file.a,
        };
        let b = match self.b {
            Some(s) => Some(parse_vector_arg(&s)?),
            None => file.b,
        };
        Ok(RunConfig {
            space: space_id.to_string(),
            a,
            b,
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            points: self.points.or(file.points).unwrap_or(DEFAULT_POINTS),
            steps: self.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
            step_size: self
                .step_size
                .or(file.step_size)
                .unwrap_or(DEFAULT_STEP_SIZE),
            h: self.h.or(file.h).unwrap_or(DEFAULT_H),
            tol: self.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
            level: self.level.or(file.level).unwrap_or(0.0),
            out: self.out.or(file.out),
            space_id,
        })
    }
}

impl RunConfig {
    /// Parameter vectors, both required to be present for two-parameter
    /// families; `a` is mandatory everywhere.
    pub fn param_a(&self) -> Result<ComplexVector> {
        let a = self
            .a
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("--a is required".into()))?;
        vector_from_strings(a)
    }

    pub fn param_b(&self) -> Result<Option<ComplexVector>> {
        match &self.b {
            Some(b) => Ok(Some(vector_from_strings(b)?)),
            None => Ok(None),
        }
    }
}
