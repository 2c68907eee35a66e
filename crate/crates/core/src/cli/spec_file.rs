//! TOML problem files.
//!
//! ```toml
//! dimension = 3
//! core_radius = 1.0
//! rho_max = 5.0
//!
//! [f]
//! segments = [{ lo = 0.0, hi = 1.0, coeffs = [1.0] }]
//!
//! [g]
//! segments = [{ lo = 0.0, hi = 1.0, coeffs = [0.005] }]
//! extend_last = true
//!
//! [tolerances]          # optional
//! identity_tol = 1e-10
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{ProblemSpec, RadialProfile, Segment, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub segments: Vec<SegmentSpec>,
    #[serde(default)]
    pub extend_last: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub dimension: usize,
    pub core_radius: f64,
    pub rho_max: f64,
    pub f: ProfileSpec,
    pub g: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}{}: {message}", location.map(|(l, c)| format!(":{l}:{c}")).unwrap_or_default())]
pub struct SpecParseError {
    pub origin: String,
    /// One-based line and column, when the error has a position in the text.
    pub location: Option<(usize, usize)>,
    pub message: String,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

impl ProfileSpec {
    pub fn to_profile(&self) -> crate::Result<RadialProfile> {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.lo, s.hi, s.coeffs.clone()))
            .collect();
        RadialProfile::new(segments, self.extend_last)
    }

    pub fn from_profile(p: &RadialProfile) -> Self {
        Self {
            segments: p
                .segments()
                .iter()
                .map(|s| SegmentSpec {
                    lo: s.lo,
                    hi: s.hi,
                    coeffs: s.coeffs.clone(),
                })
                .collect(),
            extend_last: p.extend_last(),
        }
    }
}

impl SpecFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, SpecParseError> {
        toml::from_str(text).map_err(|e| SpecParseError {
            origin: origin.to_string(),
            location: e.span().map(|s| line_col(text, s.start)),
            message: e.message().to_string(),
        })
    }

    pub fn to_spec(&self, origin: &str) -> Result<ProblemSpec, SpecParseError> {
        let field_error = |field: &str, e: Error| SpecParseError {
            origin: origin.to_string(),
            location: None,
            message: format!("field '{field}': {e}"),
        };
        let f = self.f.to_profile().map_err(|e| field_error("f", e))?;
        let g = self.g.to_profile().map_err(|e| field_error("g", e))?;
        ProblemSpec::new(
            self.dimension,
            self.core_radius,
            f,
            g,
            self.rho_max,
            self.tolerances.unwrap_or_default(),
        )
        .map_err(|e| field_error("spec", e))
    }

    pub fn from_spec(spec: &ProblemSpec) -> Self {
        Self {
            dimension: spec.dimension,
            core_radius: spec.core_radius,
            rho_max: spec.rho_max,
            f: ProfileSpec::from_profile(&spec.f),
            g: ProfileSpec::from_profile(&spec.g),
            tolerances: Some(spec.tolerances),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec files serialize to TOML")
    }
}

/// Read, parse and validate a problem file.
pub fn load_spec(path: &Path) -> Result<ProblemSpec, SpecParseError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| SpecParseError {
        origin: origin.clone(),
        location: None,
        message: e.to_string(),
    })?;
    SpecFile::parse(&text, &origin)?.to_spec(&origin)
}
