//! The JSON system document: the external serialization of an eigenvalue
//! configuration plus its Stokes collection, with validating parse and
//! canonical emit, and the `rad`/`deg` angle syntax used by the CLI.
//!
//! ```json
//! {
//!   "poincare_rank": 1,
//!   "eigenvalues": [{"re": 1.0, "im": 0.0}, {"re": -1.0, "im": 0.0}],
//!   "stokes": [[...n² entries row-major...], [...]],
//!   "starting_angle": 0.0,
//!   "tolerances": {"angle": 1e-9, "projection": 1e-9, "entry": 1e-9}
//! }
//! ```
//!
//! `starting_angle` and `tolerances` are optional. Complex numbers always
//! serialize as `{"re": …, "im": …}` objects.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, StokesCollection};
use crate::geometry::{hypothesis_check, EigenvalueConfig, GeometryError, Tolerances};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexField {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexField {
    fn from(z: Complex64) -> Self {
        ComplexField { re: z.re, im: z.im }
    }
}

impl From<ComplexField> for Complex64 {
    fn from(z: ComplexField) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<f64>,
}

impl ToleranceSection {
    pub fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            angle: self.angle.unwrap_or(d.angle),
            projection: self.projection.unwrap_or(d.projection),
            entry: self.entry.unwrap_or(d.entry),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub poincare_rank: usize,
    pub eigenvalues: Vec<ComplexField>,
    /// `2k` matrices, each `n²` entries in row-major order.
    pub stokes: Vec<Vec<ComplexField>>,
    #[serde(default)]
    pub starting_angle: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationKind {
    Hypothesis,
    Triangularity,
    Shape,
}

impl std::fmt::Display for ValidationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationKind::Hypothesis => write!(f, "hypothesis"),
            ValidationKind::Triangularity => write!(f, "triangularity"),
            ValidationKind::Shape => write!(f, "shape"),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("validation error ({kind}) at {path}: {message}")]
    Validation {
        kind: ValidationKind,
        path: String,
        message: String,
    },
}

fn schema(path: &str, message: impl Into<String>) -> DocumentError {
    DocumentError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn validation(kind: ValidationKind, path: &str, message: impl Into<String>) -> DocumentError {
    DocumentError::Validation {
        kind,
        path: path.to_string(),
        message: message.into(),
    }
}

/// Parses and fully validates a system document. On success the document is
/// guaranteed to convert into a [`StokesCollection`]; when `starting_angle`
/// is 0 the decreasing-real-part hypothesis is enforced as well.
pub fn parse_system(text: &str) -> Result<SystemDocument, DocumentError> {
    let doc: SystemDocument = serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() || e.is_io() {
            DocumentError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        } else {
            DocumentError::Schema {
                path: format!("line {}, column {}", e.line(), e.column()),
                message: e.to_string(),
            }
        }
    })?;
    document_to_collection(&doc)?;
    Ok(doc)
}

/// Canonical serialization: two-space pretty JSON with a trailing newline.
/// Emitting is deterministic, and `parse(emit(doc))` reproduces `doc`
/// bit-for-bit since numerals round-trip through shortest-form printing.
pub fn emit_system(doc: &SystemDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serializes");
    text.push('\n');
    text
}

/// Builds the validated configuration + collection a document describes.
pub fn document_to_collection(doc: &SystemDocument) -> Result<StokesCollection, DocumentError> {
    if doc.poincare_rank < 1 {
        return Err(schema("/poincare_rank", "Poincaré rank must be at least 1"));
    }
    let n = doc.eigenvalues.len();
    if n < 2 {
        return Err(schema("/eigenvalues", "at least two eigenvalues required"));
    }
    if doc.stokes.len() != 2 * doc.poincare_rank {
        return Err(schema(
            "/stokes",
            format!(
                "expected {} matrices (2·poincare_rank), got {}",
                2 * doc.poincare_rank,
                doc.stokes.len()
            ),
        ));
    }
    for (i, entries) in doc.stokes.iter().enumerate() {
        if entries.len() != n * n {
            return Err(schema(
                &format!("/stokes/{i}"),
                format!(
                    "expected {} entries ({n}×{n} row-major), got {}",
                    n * n,
                    entries.len()
                ),
            ));
        }
    }
    let tol = doc.tolerances.unwrap_or_default().resolve();
    if tol.angle <= 0.0 || tol.projection <= 0.0 || tol.entry <= 0.0 {
        return Err(schema("/tolerances", "tolerances must be positive"));
    }
    if !doc.starting_angle.is_finite() {
        return Err(schema("/starting_angle", "angle must be finite"));
    }

    let lambdas: Vec<Complex64> = doc.eigenvalues.iter().map(|&z| z.into()).collect();
    let config = EigenvalueConfig::with_tolerances(doc.poincare_rank, lambdas, tol)
        .map_err(|e| validation(ValidationKind::Shape, "/eigenvalues", e.to_string()))?;

    if doc.starting_angle == 0.0 {
        let report = hypothesis_check(&config);
        if !report.pass {
            return Err(validation(
                ValidationKind::Hypothesis,
                "/eigenvalues",
                report.reason.unwrap_or_else(|| "hypothesis failed".into()),
            ));
        }
    }

    let matrices: Vec<ComplexMatrix> = doc
        .stokes
        .iter()
        .map(|entries| ComplexMatrix::from_fn(n, |i, j| entries[i * n + j].into()))
        .collect();
    StokesCollection::new(config, matrices, doc.starting_angle).map_err(|e| match e {
        AlgebraError::NotTriangular { matrix, expected } => validation(
            ValidationKind::Triangularity,
            &format!("/stokes/{matrix}"),
            format!("matrix must be {expected} triangular in the starting-ray order"),
        ),
        AlgebraError::SingularDiagonal { matrix, index } => validation(
            ValidationKind::Shape,
            &format!("/stokes/{matrix}"),
            format!("diagonal entry {} must be nonzero", index + 1),
        ),
        AlgebraError::Geometry(GeometryError::StartingRayIsSeparating { theta, separating }) => {
            validation(
                ValidationKind::Shape,
                "/starting_angle",
                format!("angle {theta} lies on the separating ray at {separating}"),
            )
        }
        other => validation(ValidationKind::Shape, "/stokes", other.to_string()),
    })
}

/// Serializes a collection back into the document format. The matrices are
/// written in the collection's current position order; parsing the document
/// recomputes the same order from the starting angle.
pub fn collection_to_document(coll: &StokesCollection) -> SystemDocument {
    let n = coll.n();
    SystemDocument {
        poincare_rank: coll.k(),
        eigenvalues: coll.config().lambdas().iter().map(|&z| z.into()).collect(),
        stokes: coll
            .matrices()
            .iter()
            .map(|m| (0..n * n).map(|idx| m[(idx / n, idx % n)].into()).collect())
            .collect(),
        starting_angle: coll.starting_angle(),
        tolerances: None,
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("invalid angle '{input}': expected a number with optional 'rad' or 'deg' suffix")]
pub struct AngleParseError {
    pub input: String,
}

/// Parses an angle argument: plain radians by default, or a `rad`/`deg`
/// suffix (case-insensitive), e.g. `1.5708`, `1.5708rad`, `90deg`.
pub fn parse_angle(text: &str) -> Result<f64, AngleParseError> {
    let trimmed = text.trim();
    let err = || AngleParseError {
        input: text.to_string(),
    };
    let lower = trimmed.to_ascii_lowercase();
    let (number, degrees) = if let Some(stripped) = lower.strip_suffix("deg") {
        (stripped, true)
    } else if let Some(stripped) = lower.strip_suffix("rad") {
        (stripped, false)
    } else {
        (lower.as_str(), false)
    };
    let value: f64 = number.trim().parse().map_err(|_| err())?;
    if !value.is_finite() {
        return Err(err());
    }
    Ok(if degrees { value.to_radians() } else { value })
}

/// Formats a value with 12 significant digits in plain decimal notation.
pub fn format_significant(value: f64) -> String {
    if value == 0.0 {
        return "0.00000000000".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}
