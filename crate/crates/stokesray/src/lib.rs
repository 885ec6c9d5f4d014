//! Ray geometry of a non-resonant irregular singularity and the exact
//! transformation of its Stokes matrix collection between starting rays.
//!
//! Given the Poincaré rank `k` and the distinct eigenvalues `λ₁ … λₙ` of the
//! leading coefficient, the crate computes the critical and separating rays,
//! the eigenvalue orderings and overlapping sectors they induce, and rewrites
//! a collection of `2k` alternately triangular Stokes matrices when the
//! (non-canonical) starting ray is rotated across separating rays. Diagonal
//! gauge freedom is handled explicitly: collections can be put in a
//! canonical gauge and tested for gauge equivalence with recovered witnesses.
//!
//! The `oracle` module contains independent brute-force re-implementations
//! of the geometric predicates plus seeded randomized suites exercising the
//! transformation invariants; `document` and `svg` provide the JSON and
//! diagram interfaces used by the command-line tool.

pub mod algebra;
pub mod angle;
pub mod document;
pub mod geometry;
pub mod matrix;
pub mod oracle;
pub mod svg;
pub mod transform;

pub use algebra::{
    block, canonical_gauge, char_poly_coefficients, collection_product, gauge_equivalent,
    partition_matrix, triangularity, AlgebraError, GaugeWitness, Partition, StokesCollection,
    Triangularity,
};
pub use geometry::{
    critical_rays, hypothesis_check, next_separating_angle, ordering_on_ray, projection,
    sector_layout, separating_rays, CriticalRay, EigenvalueConfig, GeometryError, HypothesisReport,
    RayCatalog, RayOrdering, RotationDirection, SectorLayout, SeparatingRay, Tolerances,
};
pub use matrix::ComplexMatrix;
pub use transform::{CrossingRecord, TransformError, WalkState};
