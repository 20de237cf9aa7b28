//! The TOML function spec shared by every subcommand.
//!
//! ```toml
//! [function]
//! a = 2
//! b = 3
//! unit = [[0, 0, 1.0]]        # (i, j, c): v = Σ c x^i y^j
//! [[function.h]]              # x^j q(y) e^{-1/|y|^p}
//! j = 0
//! p = 2
//! q = [[1.0, 0]]              # (c, e): q = Σ c t^e
//!
//! [bump]
//! center = [0.0, 0.0]
//! radius = [1.0, 1.0]
//! inner = [0.5, 0.5]
//!
//! [quadrature]                # optional; overrides the config file
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use smoothzeta::funcmodel::{BumpFunction, FlatFactor, FlatTerm, Polynomial, SmoothModelFunction};
use smoothzeta::quad::QuadratureConfig;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: key `{key}`: {message}")]
    Invalid {
        path: String,
        key: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTerm(pub u32, pub u32, pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatSpec {
    pub j: u32,
    pub p: u32,
    #[serde(default = "default_q")]
    pub q: Vec<(f64, i32)>,
}

fn default_q() -> Vec<(f64, i32)> {
    vec![(1.0, 0)]
}

fn default_unit() -> Vec<UnitTerm> {
    vec![UnitTerm(0, 0, 1.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub a: u32,
    pub b: u32,
    #[serde(default = "default_unit")]
    pub unit: Vec<UnitTerm>,
    /// `y^j g_j(x)` terms, flat in `x`.
    #[serde(default)]
    pub g: Vec<FlatSpec>,
    /// `x^j h_j(y)` terms, flat in `y`.
    #[serde(default)]
    pub h: Vec<FlatSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub radius: [f64; 2],
    pub inner: [f64; 2],
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            radius: [1.0, 1.0],
            inner: [0.5, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub function: FunctionSpec,
    #[serde(default)]
    pub bump: BumpSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
}

impl SpecFile {
    /// The same integral with `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        let f = &self.function;
        let sw = |v: [f64; 2]| [v[1], v[0]];
        Self {
            function: FunctionSpec {
                a: f.b,
                b: f.a,
                unit: f.unit.iter().map(|t| UnitTerm(t.1, t.0, t.2)).collect(),
                g: f.h.clone(),
                h: f.g.clone(),
            },
            bump: BumpSpec {
                center: sw(self.bump.center),
                radius: sw(self.bump.radius),
                inner: sw(self.bump.inner),
            },
            quadrature: self.quadrature,
        }
    }
}

/// A validated spec and the objects built from it.
#[derive(Debug, Clone)]
pub struct ParsedSpec {
    /// The spec after normalization (`a ≤ b`).
    pub spec: SpecFile,
    pub function: SmoothModelFunction,
    pub bump: BumpFunction,
    pub quadrature: Option<QuadratureConfig>,
    pub swapped: bool,
    pub notices: Vec<String>,
    /// SHA-256 of the file contents.
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn flat_terms(list: &[FlatSpec], path: &str, key: &str) -> Result<Vec<FlatTerm>, SpecError> {
    list.iter()
        .enumerate()
        .map(|(i, t)| {
            if t.p == 0 {
                return Err(SpecError::Invalid {
                    path: path.into(),
                    key: format!("function.{key}[{i}].p"),
                    message: "flat exponent p must be at least 1".into(),
                });
            }
            Ok(FlatTerm {
                j: t.j,
                factor: FlatFactor::new(t.p, t.q.clone()),
            })
        })
        .collect()
}

/// Build the model objects from an already normalized spec.
pub fn build(spec: &SpecFile, path: &str) -> Result<(SmoothModelFunction, BumpFunction), SpecError> {
    let f = &spec.function;
    let invalid = |key: &str, message: String| SpecError::Invalid {
        path: path.into(),
        key: key.into(),
        message,
    };
    if f.a == 0 && f.b == 0 {
        return Err(invalid(
            "function",
            "a = b = 0: the function does not vanish at the origin and its zeta function is entire".into(),
        ));
    }
    let unit = Polynomial::new(f.unit.iter().map(|t| (t.0, t.1, t.2)));
    let g = flat_terms(&f.g, path, "g")?;
    let h = flat_terms(&f.h, path, "h")?;
    let function =
        SmoothModelFunction::new(f.a, f.b, unit, g, h).map_err(|e| invalid("function", e.to_string()))?;
    let bump = &spec.bump;
    for k in 0..2 {
        if !(bump.radius[k] > 0.0 && bump.inner[k] >= 0.0 && bump.inner[k] < bump.radius[k]) {
            return Err(invalid("bump", "need 0 ≤ inner < radius in each coordinate".into()));
        }
    }
    let phi = BumpFunction::product_at(bump.center, bump.radius, bump.inner);
    if phi.eval(0.0, 0.0) <= 0.0 {
        return Err(invalid("bump", "the weight must be positive at the origin".into()));
    }
    Ok((function, phi))
}

/// Parse, validate and normalize a spec from its text.
pub fn parse_spec_str(text: &str, path: &str) -> Result<ParsedSpec, SpecError> {
    let raw: SpecFile = toml::from_str(text).map_err(|e| SpecError::Schema {
        path: path.into(),
        message: e.to_string(),
    })?;
    let mut notices = Vec::new();
    let swapped = raw.function.a > raw.function.b;
    let spec = if swapped {
        notices.push(format!(
            "a = {} > b = {}: exchanged x and y (g and h lists, unit and bump swapped)",
            raw.function.a, raw.function.b
        ));
        raw.swapped()
    } else {
        raw
    };
    let (function, bump) = build(&spec, path)?;
    Ok(ParsedSpec {
        quadrature: spec.quadrature,
        spec,
        function,
        bump,
        swapped,
        notices,
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn parse_spec(path: &Path) -> Result<ParsedSpec, SpecError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: p.clone(),
        source,
    })?;
    parse_spec_str(&text, &p)
}

/// TOML text that parses back to `spec`.
pub fn emit_spec(spec: &SpecFile) -> String {
    toml::to_string(spec).expect("spec values are always representable in TOML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use smoothzeta::funcmodel::Case;

    #[test]
    fn minimal_monomial_is_case_a() {
        let p = parse_spec_str("[function]\na = 2\nb = 3\n", "t").unwrap();
        assert_eq!(p.function.classify(), Case::A);
        assert_eq!(p.spec.bump, BumpSpec::default());
        assert!(!p.swapped);
    }

    #[test]
    fn schema_errors_name_the_key() {
        let e = parse_spec_str("[function]\na = 2\nb = 3\nbogus = 1\n", "t").unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, SpecError::Schema { .. }));
        assert!(msg.contains("bogus") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn entire_case_rejected() {
        let e = parse_spec_str("[function]\na = 0\nb = 0\n", "t").unwrap_err();
        assert!(e.to_string().contains("entire"));
    }
}
