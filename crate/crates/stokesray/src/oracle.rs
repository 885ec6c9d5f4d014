//! Independent brute-force oracles and the seeded randomized suites that
//! exercise every claimed invariant without reusing the main code paths.
//!
//! The hard-coded transformation tables in [`table_check`] are transcribed
//! once, independently of the transform engine, and serve as ground truth
//! for the k = 1, n = 3 walk.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::StokesCollection;
use crate::angle::{ccw_distance, normalize};
use crate::document::collection_to_document;
use crate::geometry::{
    hypothesis_check, ordering_on_ray, sector_layout, separating_rays, EigenvalueConfig,
    GeometryError,
};
use crate::matrix::ComplexMatrix;
use crate::transform::{TransformError, WalkState};

use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, thiserror::Error)]
pub enum OracleError {
    #[error("flatness comparison needs two distinct indices, got {0}")]
    SameIndex(usize),
    #[error("angle {theta} rad is separating for pair ({}, {})", p + 1, q + 1)]
    SeparatingAngle { theta: f64, p: usize, q: usize },
    #[error("configuration does not have the k=1, n=3 table shape: {0}")]
    ConfigShape(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Relative flatness of the sectorial solutions attached to two eigenvalues
/// along the ray at `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flatness {
    /// Solution `p` is flatter than `q` on the ray.
    Flatter,
    /// Solution `p` dominates `q` on the ray.
    Steeper,
    /// The ray separates the pair.
    Separating,
}

/// Compares `|exp(−λ_p/(kx^k))|` against `|exp(−λ_q/(kx^k))|` along the ray:
/// `p` is flatter iff `ℜ((λ_p−λ_q)e^{−ikθ}) > 0`.
pub fn flatness_compare(
    p: usize,
    q: usize,
    config: &EigenvalueConfig,
    theta: f64,
) -> Result<Flatness, OracleError> {
    if p == q {
        return Err(OracleError::SameIndex(p));
    }
    let k = config.k() as f64;
    let d = config.lambdas()[p] - config.lambdas()[q];
    let value = (d * Complex64::from_polar(1.0, -k * theta)).re;
    let tol = config.projection_tol();
    Ok(if value > tol {
        Flatness::Flatter
    } else if value < -tol {
        Flatness::Steeper
    } else {
        Flatness::Separating
    })
}

/// Total order of the eigenvalues on the ray at `theta`, rebuilt purely from
/// pairwise flatness comparisons. Independent of `ordering_on_ray`.
pub fn brute_order(config: &EigenvalueConfig, theta: f64) -> Result<Vec<usize>, OracleError> {
    let n = config.n();
    for p in 0..n {
        for q in (p + 1)..n {
            if flatness_compare(p, q, config, theta)? == Flatness::Separating {
                return Err(OracleError::SeparatingAngle { theta, p, q });
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        match flatness_compare(a, b, config, theta).expect("distinct indices") {
            Flatness::Flatter => std::cmp::Ordering::Less,
            Flatness::Steeper => std::cmp::Ordering::Greater,
            Flatness::Separating => unreachable!("separating pairs rejected above"),
        }
    });
    Ok(order)
}

/// Pass/fail tally for one named property.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PropertyStat {
    pub name: String,
    pub pass: usize,
    pub fail: usize,
    pub worst_residual: f64,
}

/// A failing trial, with the offending input serialized in the external
/// document format whenever one exists.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FailureCase {
    pub property: String,
    pub detail: String,
    pub document: Option<String>,
}

/// Aggregated outcome of a randomized suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyStat>,
    pub failures: Vec<FailureCase>,
}

impl TrialReport {
    fn new(seed: u64, trials: usize) -> Self {
        TrialReport {
            seed,
            trials,
            properties: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.properties.iter().all(|p| p.fail == 0)
    }

    pub fn worst_residual(&self) -> f64 {
        self.properties
            .iter()
            .map(|p| p.worst_residual)
            .fold(0.0, f64::max)
    }

    fn stat(&mut self, name: &str) -> &mut PropertyStat {
        if let Some(pos) = self.properties.iter().position(|p| p.name == name) {
            &mut self.properties[pos]
        } else {
            self.properties.push(PropertyStat {
                name: name.to_string(),
                pass: 0,
                fail: 0,
                worst_residual: 0.0,
            });
            self.properties.last_mut().unwrap()
        }
    }

    fn record(
        &mut self,
        name: &str,
        residual: f64,
        tol: f64,
        failure: impl FnOnce() -> FailureCase,
    ) {
        let stat = self.stat(name);
        stat.worst_residual = stat.worst_residual.max(residual);
        if residual <= tol {
            stat.pass += 1;
        } else {
            stat.fail += 1;
            if self.failures.len() < 32 {
                self.failures.push(failure());
            }
        }
    }

    fn record_bool(&mut self, name: &str, ok: bool, failure: impl FnOnce() -> FailureCase) {
        self.record(name, if ok { 0.0 } else { 1.0 }, 0.5, failure);
    }

    pub fn merge(&mut self, other: TrialReport) {
        self.trials += other.trials;
        for p in other.properties {
            let stat = self.stat(&p.name);
            stat.pass += p.pass;
            stat.fail += p.fail;
            stat.worst_residual = stat.worst_residual.max(p.worst_residual);
        }
        self.failures.extend(other.failures);
        self.failures.truncate(32);
    }
}

impl std::fmt::Display for TrialReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "seed = {}, trials = {}", self.seed, self.trials)?;
        for p in &self.properties {
            writeln!(
                f,
                "{} {:<24} pass {:>6} fail {:>4} worst residual {:.3e}",
                if p.fail == 0 { "PASS" } else { "FAIL" },
                p.name,
                p.pass,
                p.fail,
                p.worst_residual
            )?;
        }
        for c in &self.failures {
            writeln!(f, "counterexample [{}]: {}", c.property, c.detail)?;
            if let Some(doc) = &c.document {
                writeln!(f, "{doc}")?;
            }
        }
        Ok(())
    }
}

fn failure_with_doc(property: &str, detail: String, coll: &StokesCollection) -> FailureCase {
    FailureCase {
        property: property.to_string(),
        detail,
        document: Some(crate::document::emit_system(&collection_to_document(coll))),
    }
}

/// Relative residual between two characteristic-polynomial coefficient
/// vectors. Coefficient k is an alternating sum of k×k principal minors, so
/// its computational scale is `s^k` for entry scale `s`; a coefficient that
/// cancels to far below that scale is compared against the scale rather
/// than against its own (meaningless) magnitude.
pub fn char_poly_residual(a: &[Complex64], b: &[Complex64], entry_scale: f64) -> f64 {
    let s = entry_scale.max(1.0);
    let mut worst: f64 = 0.0;
    let mut sk = 1.0;
    for (k, (x, y)) in a.iter().zip(b.iter()).enumerate() {
        if k > 0 {
            sk *= s;
        }
        let scale = x.norm().max(y.norm()).max(sk);
        worst = worst.max((x - y).norm() / scale);
    }
    worst
}

// ---------------------------------------------------------------------------
// Random input generation
// ---------------------------------------------------------------------------

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU))
}

/// Random configuration satisfying the decreasing-real-part hypothesis, with
/// all separating arcs wider than `min_arc`.
fn random_config(
    rng: &mut ChaCha8Rng,
    max_k: usize,
    max_n: usize,
    min_arc: f64,
) -> EigenvalueConfig {
    loop {
        let k = rng.gen_range(1..=max_k);
        let n = rng.gen_range(2..=max_n);
        if let Some(config) = try_config(rng, k, n, min_arc) {
            return config;
        }
    }
}

/// Random configuration with fixed rank and size.
fn random_config_kn(rng: &mut ChaCha8Rng, k: usize, n: usize, min_arc: f64) -> EigenvalueConfig {
    loop {
        if let Some(config) = try_config(rng, k, n, min_arc) {
            return config;
        }
    }
}

fn try_config(rng: &mut ChaCha8Rng, k: usize, n: usize, min_arc: f64) -> Option<EigenvalueConfig> {
    let mut re = 0.0;
    let lambdas: Vec<Complex64> = (0..n)
        .map(|_| {
            let z = Complex64::new(re, rng.gen_range(-2.0..2.0));
            re -= rng.gen_range(0.4..1.6);
            z
        })
        .collect();
    let config = EigenvalueConfig::new(k, lambdas).ok()?;
    if !hypothesis_check(&config).pass {
        return None;
    }
    let catalog = separating_rays(&config).expect("valid configuration");
    if catalog.min_arc_width() < min_arc {
        return None;
    }
    // Keep the default starting ray clear of the first and last rays.
    let angles = catalog.separating_angles();
    let first = angles.first().copied().unwrap_or(PI);
    let last = angles.last().copied().unwrap_or(PI);
    if first < min_arc / 2.0 || TAU - last < min_arc / 2.0 {
        return None;
    }
    Some(config)
}

/// Random configuration for matrix walks. In addition to the geometric
/// constraints this bounds the crossing count of a full turn (2k·u ≤ 24):
/// the transform chain stays within a few dozen multiplications, which keeps
/// the conditioning of the r-blocks far from the comparison tolerances.
fn random_walk_config(rng: &mut ChaCha8Rng, min_arc: f64) -> EigenvalueConfig {
    loop {
        let config = random_config(rng, 3, 6, min_arc);
        let catalog = separating_rays(&config).expect("valid configuration");
        if catalog.separating.len() <= 24 {
            return config;
        }
    }
}

/// Random dense triangular collection (alternating upper/lower) with entry
/// magnitudes in [0.5, 2] so every r-block stays well conditioned.
fn random_collection(rng: &mut ChaCha8Rng, config: &EigenvalueConfig) -> StokesCollection {
    let n = config.n();
    let matrices: Vec<ComplexMatrix> = (0..2 * config.k())
        .map(|j| {
            ComplexMatrix::from_fn(n, |r, c| {
                let keep = if j % 2 == 0 { r <= c } else { r >= c };
                if keep {
                    random_unit(rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    StokesCollection::new(config.clone(), matrices, 0.0).expect("valid random collection")
}

/// Configuration whose first counterclockwise separating ray carries two
/// r-blocks: two disjoint eigenvalue pairs with parallel differences.
fn random_multiblock(rng: &mut ChaCha8Rng) -> (EigenvalueConfig, f64) {
    loop {
        let k = rng.gen_range(1..=3);
        // Shared difference direction with positive real part.
        let d = Complex64::new(1.0, rng.gen_range(-0.8..0.8));
        let t = rng.gen_range(0.5..2.0);
        let a = Complex64::new(4.0, rng.gen_range(-1.0..1.0));
        let b = Complex64::new(1.5, rng.gen_range(-1.0..1.0));
        let lambdas = vec![a, a - d, b, b - t * d];
        let Ok(config) = EigenvalueConfig::new(k, lambdas) else {
            continue;
        };
        if !hypothesis_check(&config).pass {
            continue;
        }
        let catalog = separating_rays(&config).expect("valid configuration");
        if catalog.min_arc_width() < 1e-2 {
            continue;
        }
        // Find a separating ray carrying both pairs with the blocks distinct
        // in projection at that ray.
        let both = catalog
            .separating
            .iter()
            .find(|r| r.pairs.contains(&(0, 1)) && r.pairs.contains(&(2, 3)));
        let Some(ray) = both else { continue };
        let ord = ordering_on_ray(&config, ray.angle);
        if ord.partition.block_count() != 2 {
            continue;
        }
        let phi = ray.angle;
        // Start the walk at the midpoint of the arc just before the
        // multi-block ray; the perturbation must not push any other ray
        // across the starting direction.
        let prev = catalog.next_separating(
            phi,
            crate::geometry::RotationDirection::Clockwise,
            config.tolerances().angle,
        );
        let gap = ccw_distance(prev.angle, phi);
        let theta = normalize(phi - gap / 2.0);
        let order = ordering_on_ray(&config, theta);
        if order.partition.block_count() != 0 {
            continue;
        }
        return (config, theta);
    }
}

fn random_collection_at(
    rng: &mut ChaCha8Rng,
    config: &EigenvalueConfig,
    theta: f64,
) -> StokesCollection {
    let n = config.n();
    let matrices: Vec<ComplexMatrix> = (0..2 * config.k())
        .map(|j| {
            ComplexMatrix::from_fn(n, |r, c| {
                let keep = if j % 2 == 0 { r <= c } else { r >= c };
                if keep {
                    random_unit(rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    StokesCollection::new(config.clone(), matrices, theta).expect("valid random collection")
}

// ---------------------------------------------------------------------------
// The k = 1, n = 3 transformation table
// ---------------------------------------------------------------------------

/// Entries of the pair (upper, lower) of 3×3 Stokes matrices.
#[derive(Debug, Clone, Copy)]
pub struct TableInputs {
    pub cp: [[Complex64; 3]; 3],
    pub cm: [[Complex64; 3]; 3],
}

impl TableInputs {
    pub fn matrices(&self) -> (ComplexMatrix, ComplexMatrix) {
        (
            ComplexMatrix::from_fn(3, |i, j| self.cp[i][j]),
            ComplexMatrix::from_fn(3, |i, j| self.cm[i][j]),
        )
    }
}

/// The four rows of the transformation table for the configuration whose
/// separating rays in (0, π) carry, in increasing angle, the pairs
/// {λ₂,λ₃}, {λ₁,λ₃}, {λ₁,λ₂}. Row 0 is the starting ray itself; rows 1–3
/// are the collections after crossing one, two, three rays.
pub fn table_row(inputs: &TableInputs, row: usize) -> (ComplexMatrix, ComplexMatrix) {
    let z = Complex64::new(0.0, 0.0);
    let cp = |i: usize, j: usize| inputs.cp[i - 1][j - 1];
    let cm = |i: usize, j: usize| inputs.cm[i - 1][j - 1];
    match row {
        0 => inputs.matrices(),
        1 => (
            ComplexMatrix::from_rows(&[
                vec![
                    cp(1, 1),
                    cp(1, 3) * cm(3, 3),
                    cm(2, 2) * cp(1, 2) + cm(3, 2) * cp(1, 3),
                ],
                vec![z, cm(3, 3), cm(3, 2)],
                vec![z, z, cm(2, 2)],
            ]),
            ComplexMatrix::from_rows(&[
                vec![cm(1, 1), z, z],
                vec![
                    (cm(2, 2) * cm(3, 1) - cm(3, 2) * cm(2, 1)) / (cm(2, 2) * cm(3, 3)),
                    cp(3, 3),
                    z,
                ],
                vec![cm(2, 1) / cm(2, 2), cp(2, 3), cp(2, 2)],
            ]),
        ),
        2 => (
            ComplexMatrix::from_rows(&[
                vec![
                    cp(3, 3),
                    (cm(2, 2) * cm(3, 1) - cm(2, 1) * cm(3, 2)) / (cm(2, 2) * cm(3, 3)),
                    cm(3, 2) / cm(3, 3),
                ],
                vec![z, cm(1, 1), cm(2, 2) * cp(1, 2) / cp(1, 1)],
                vec![z, z, cm(2, 2)],
            ]),
            ComplexMatrix::from_rows(&[
                vec![cm(3, 3), z, z],
                vec![cm(3, 3) * cp(1, 3), cp(1, 1), z],
                vec![
                    cm(3, 3) * (cm(2, 1) * cp(1, 3) / cm(2, 2) + cp(2, 3)),
                    cm(2, 1) * cp(1, 1) / cm(2, 2),
                    cp(2, 2),
                ],
            ]),
        ),
        3 => (
            ComplexMatrix::from_rows(&[
                vec![
                    cp(3, 3),
                    cm(3, 2) * cp(2, 2) / cm(3, 3),
                    cm(3, 1) * cp(1, 1) / cm(3, 3),
                ],
                vec![z, cp(2, 2), cm(2, 1) * cp(1, 1) / cm(2, 2)],
                vec![z, z, cp(1, 1)],
            ]),
            ComplexMatrix::from_rows(&[
                vec![cm(3, 3), z, z],
                vec![cm(3, 3) * cp(2, 3) / cp(2, 2), cm(2, 2), z],
                vec![
                    cm(3, 3) * cp(1, 3) / cp(1, 1),
                    cm(2, 2) * cp(1, 2) / cp(1, 1),
                    cm(1, 1),
                ],
            ]),
        ),
        _ => unreachable!("rows 0..=3"),
    }
}

/// Built-in configuration with the table's ray pattern: differences
/// λ₁−λ₂ = 2+i, λ₂−λ₃ = 1−i put the rays of {λ₂,λ₃}, {λ₁,λ₃}, {λ₁,λ₂} at
/// π/4 < π/2 < π/2 + atan(1/2) inside (0, π).
pub fn table_config() -> EigenvalueConfig {
    EigenvalueConfig::new(
        1,
        vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("fixed configuration is valid")
}

/// Checks that a configuration has the shape the hard-coded table assumes.
fn validate_table_shape(config: &EigenvalueConfig) -> Result<[f64; 3], OracleError> {
    if config.k() != 1 || config.n() != 3 {
        return Err(OracleError::ConfigShape(format!(
            "k = {}, n = {}",
            config.k(),
            config.n()
        )));
    }
    if !hypothesis_check(config).pass {
        return Err(OracleError::ConfigShape(
            "real parts are not strictly decreasing".into(),
        ));
    }
    let catalog = separating_rays(config)?;
    if catalog.separating.len() != 6 {
        return Err(OracleError::ConfigShape(format!(
            "{} separating rays, expected 6 distinct ones",
            catalog.separating.len()
        )));
    }
    let upper: Vec<_> = catalog.separating.iter().filter(|r| r.angle < PI).collect();
    let expected_pairs = [vec![(1usize, 2usize)], vec![(0, 2)], vec![(0, 1)]];
    if upper.len() != 3
        || upper
            .iter()
            .zip(expected_pairs.iter())
            .any(|(ray, pairs)| &ray.pairs != pairs)
    {
        return Err(OracleError::ConfigShape(
            "separating rays in (0, π) do not carry the pair pattern {2,3}, {1,3}, {1,2}".into(),
        ));
    }
    Ok([upper[0].angle, upper[1].angle, upper[2].angle])
}

/// Runs `trials` random instantiations of the 3×3 collection through the
/// walk and compares every arc against the hard-coded table rows; also
/// verifies the explicit half-turn diagonal identity and the recovered
/// gauge witness. Uses [`table_config`].
pub fn table_check(trials: usize, seed: u64) -> TrialReport {
    table_check_with(&table_config(), trials, seed).expect("built-in configuration has table shape")
}

/// [`table_check`] against a caller-supplied configuration of the same shape.
pub fn table_check_with(
    config: &EigenvalueConfig,
    trials: usize,
    seed: u64,
) -> Result<TrialReport, OracleError> {
    let [phi1, phi2, phi3] = validate_table_shape(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::new(seed, trials);
    let theta = [0.0, (phi1 + phi2) / 2.0, (phi2 + phi3) / 2.0, PI];

    for trial in 0..trials {
        let inputs = TableInputs {
            cp: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i <= j {
                        random_unit(&mut rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }),
            cm: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i >= j {
                        random_unit(&mut rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }),
        };
        let (upper, lower) = inputs.matrices();
        let coll = StokesCollection::new(config.clone(), vec![upper, lower], 0.0)
            .expect("random table inputs are triangular and invertible");
        let state = WalkState::new(coll);

        let mut walked = state.clone();
        for (row, &target) in theta.iter().enumerate().skip(1) {
            walked = match walked.retarget(target) {
                Ok(s) => s,
                Err(e) => {
                    report.record_bool(&format!("table_row_{row}"), false, || {
                        failure_with_doc(
                            &format!("table_row_{row}"),
                            format!("trial {trial}: retarget failed: {e}"),
                            state.collection(),
                        )
                    });
                    continue;
                }
            };
            let (want_upper, want_lower) = table_row(&inputs, row);
            let residual = walked
                .collection()
                .matrix(0)
                .max_rel_diff(&want_upper)
                .max(walked.collection().matrix(1).max_rel_diff(&want_lower));
            report.record(&format!("table_row_{row}"), residual, 1e-12, || {
                failure_with_doc(
                    &format!("table_row_{row}"),
                    format!("trial {trial}: residual {residual:.3e}"),
                    state.collection(),
                )
            });
        }

        // Half-turn identities: D·C̄⁺·D⁻¹_* = J·C⁻·J and D_*·C̄⁻·D⁻¹ = J·C⁺·J
        // with D = diag(c₃₃⁻, c₂₂⁻, c₁₁⁻), D_* = diag(c₃₃⁺, c₂₂⁺, c₁₁⁺).
        let (bar_upper, bar_lower) = table_row(&inputs, 3);
        let d: Vec<Complex64> = (0..3).map(|i| inputs.cm[2 - i][2 - i]).collect();
        let ds: Vec<Complex64> = (0..3).map(|i| inputs.cp[2 - i][2 - i]).collect();
        let jm = ComplexMatrix::anti_identity(3);
        let lhs1 = ComplexMatrix::from_fn(3, |i, j| d[i] * bar_upper[(i, j)] / ds[j]);
        let rhs1 = &(&jm * &inputs.matrices().1) * &jm;
        let lhs2 = ComplexMatrix::from_fn(3, |i, j| ds[i] * bar_lower[(i, j)] / d[j]);
        let rhs2 = &(&jm * &inputs.matrices().0) * &jm;
        let residual = lhs1.max_rel_diff(&rhs1).max(lhs2.max_rel_diff(&rhs2));
        report.record("half_turn_identity", residual, 1e-12, || {
            failure_with_doc(
                "half_turn_identity",
                format!("trial {trial}: residual {residual:.3e}"),
                state.collection(),
            )
        });

        // The engine must recover a witness proportional to (D⁻¹, D_*⁻¹).
        match state.half_turn_check() {
            Ok((true, Some(witness))) => {
                let w1 = &witness.diagonals[0];
                let w2 = &witness.diagonals[1];
                let prop = |w: &[Complex64], target: &[Complex64]| -> f64 {
                    // w[i]·target[i] must be constant over i.
                    let base = w[0] * target[0];
                    (1..3)
                        .map(|i| (w[i] * target[i] - base).norm() / base.norm().max(1e-300))
                        .fold(0.0, f64::max)
                };
                let residual = prop(w1, &d).max(prop(w2, &ds));
                report.record("half_turn_witness", residual, 1e-9, || {
                    failure_with_doc(
                        "half_turn_witness",
                        format!("trial {trial}: witness not proportional, residual {residual:.3e}"),
                        state.collection(),
                    )
                });
            }
            other => {
                report.record_bool("half_turn_witness", false, || {
                    failure_with_doc(
                        "half_turn_witness",
                        format!("trial {trial}: half-turn check failed: {other:?}"),
                        state.collection(),
                    )
                });
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Randomized invariant suites
// ---------------------------------------------------------------------------

/// Orderings sampled at φ ± ε around every separating angle must differ by
/// reversing each r-block, and must agree with the brute-force pairwise
/// order.
pub fn block_reversal_trials(trials: usize, seed: u64) -> TrialReport {
    let eps = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::new(seed, trials);
    for trial in 0..trials {
        let config = random_config(&mut rng, 3, 6, 10.0 * eps);
        let catalog = separating_rays(&config).expect("valid configuration");
        let mut ok = true;
        let mut detail = String::new();
        for ray in &catalog.separating {
            let before = ordering_on_ray(&config, ray.angle - eps);
            let after = ordering_on_ray(&config, ray.angle + eps);
            let on_ray =
                crate::geometry::partition_in_order(&config, &before.permutation, ray.angle);
            let Ok(partition) = on_ray else {
                ok = false;
                detail = format!("partition failed on ray {}", ray.angle);
                break;
            };
            let map = partition.position_reversal();
            let predicted: Vec<usize> = map.iter().map(|&old| before.permutation[old]).collect();
            if predicted != after.permutation {
                ok = false;
                detail = format!(
                    "ray {}: block reversal predicts {:?}, ordering gives {:?}",
                    ray.angle, predicted, after.permutation
                );
                break;
            }
            // Brute-force agreement on both sides.
            let bb = brute_order(&config, ray.angle - eps);
            let ba = brute_order(&config, ray.angle + eps);
            match (bb, ba) {
                (Ok(bb), Ok(ba)) => {
                    if bb != before.permutation || ba != after.permutation {
                        ok = false;
                        detail = format!("brute order mismatch at ray {}", ray.angle);
                        break;
                    }
                }
                _ => {
                    ok = false;
                    detail = format!("brute order hit a separating sample at ray {}", ray.angle);
                    break;
                }
            }
            // Flatness antisymmetry on the sampled angles.
            for p in 0..config.n() {
                for q in (p + 1)..config.n() {
                    let fwd = flatness_compare(p, q, &config, ray.angle + eps).unwrap();
                    let rev = flatness_compare(q, p, &config, ray.angle + eps).unwrap();
                    let consistent = matches!(
                        (fwd, rev),
                        (Flatness::Flatter, Flatness::Steeper)
                            | (Flatness::Steeper, Flatness::Flatter)
                            | (Flatness::Separating, Flatness::Separating)
                    );
                    if !consistent {
                        ok = false;
                        detail = format!("flatness not antisymmetric for ({p},{q})");
                    }
                }
            }
        }
        report.record_bool("block_reversal", ok, || FailureCase {
            property: "block_reversal".into(),
            detail: format!("trial {trial}: {detail}"),
            document: None,
        });
    }
    report
}

/// Separating-ray count law (2k·u) and one-ray-per-pair-per-sector, checked
/// against an independent per-pair enumeration.
pub fn ray_count_trials(trials: usize, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::new(seed, trials);
    for trial in 0..trials {
        let config = random_config(&mut rng, 3, 6, 1e-3);
        let catalog = separating_rays(&config).expect("valid configuration");
        let k = config.k();

        // Independent u: cluster the pair difference directions mod π.
        let mut lines: Vec<f64> = Vec::new();
        for p in 0..config.n() {
            for q in (p + 1)..config.n() {
                let d = config.lambdas()[p] - config.lambdas()[q];
                lines.push(d.arg().rem_euclid(PI));
            }
        }
        lines.sort_by(f64::total_cmp);
        let mut u = 0usize;
        let mut prev = f64::NAN;
        for &a in &lines {
            if prev.is_nan() || a - prev > 1e-9 {
                u += 1;
            }
            prev = a;
        }
        if u > 1 {
            let first = lines[0];
            let last = *lines.last().unwrap();
            if (PI - last) + first <= 1e-9 {
                u -= 1;
            }
        }

        let count_ok = catalog.separating.len() == 2 * k * u && catalog.count_u == u;

        // Sector containment, with per-pair ray lists enumerated directly.
        let theta = {
            let mut t;
            loop {
                t = rng.gen_range(0.0..TAU);
                if !catalog.is_separating(t, 1e-3) {
                    break;
                }
            }
            t
        };
        let sector_ok = match sector_layout(&config, theta) {
            Ok(layout) => {
                let mut ok = true;
                for p in 0..config.n() {
                    for q in (p + 1)..config.n() {
                        let d = config.lambdas()[p] - config.lambdas()[q];
                        let base = (d.arg() + PI / 2.0).rem_euclid(PI);
                        let pair_angles: Vec<f64> = (0..2 * k)
                            .map(|j| normalize((base + j as f64 * PI) / k as f64))
                            .collect();
                        for sector in &layout.sectors {
                            let inside =
                                pair_angles.iter().filter(|&&a| sector.contains(a)).count();
                            if inside != 1 {
                                ok = false;
                            }
                        }
                    }
                }
                ok
            }
            Err(_) => false,
        };

        report.record_bool("ray_count_law", count_ok, || FailureCase {
            property: "ray_count_law".into(),
            detail: format!(
                "trial {trial}: {} rays, u = {} vs independent {u}",
                catalog.separating.len(),
                catalog.count_u
            ),
            document: None,
        });
        report.record_bool("sector_containment", sector_ok, || FailureCase {
            property: "sector_containment".into(),
            detail: format!("trial {trial}: a sector missed or duplicated a pair ray"),
            document: None,
        });
    }
    report
}

/// Full random walks: triangularity preservation, the middle-block identity,
/// conjugacy invariance of the product's characteristic polynomial,
/// cross/uncross round trips, and full-turn gauge equivalence.
pub fn walk_invariant_trials(trials: usize, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::new(seed, trials);
    for trial in 0..trials {
        let config = random_walk_config(&mut rng, 1e-3);
        let collection = random_collection(&mut rng, &config);
        let catalog = separating_rays(&config).expect("valid configuration");
        let crossings = catalog.separating.len();
        let start = WalkState::new(collection);

        let mut state = start.clone();
        let mut tri_ok = true;
        let mut middle_res: f64 = 0.0;
        let mut conj_res: f64 = 0.0;
        let mut round_res: f64 = 0.0;
        let mut failed = None;
        for step in 0..crossings {
            let prev = state.clone();
            let invariants_before = prev.monodromy_invariants();
            let scale_before = crate::algebra::collection_product(prev.collection()).max_abs();
            state = match state.cross_ray() {
                Ok(s) => s,
                Err(e) => {
                    failed = Some(format!("step {step}: {e}"));
                    break;
                }
            };

            for (j, m) in state.collection().matrices().iter().enumerate() {
                let class = crate::algebra::triangularity(m, 1e-9);
                let ok = matches!(
                    (j % 2, class),
                    (_, crate::algebra::Triangularity::Diagonal)
                        | (0, crate::algebra::Triangularity::Upper)
                        | (1, crate::algebra::Triangularity::Lower)
                );
                tri_ok &= ok;
            }

            let record = state.history().last().expect("crossing recorded");
            let k2 = state.collection().matrices().len();
            for j in 0..k2 {
                for (slot, range) in record.partition.r_slots() {
                    let tilde = crate::algebra::block(
                        state.collection().matrix(j),
                        &record.partition,
                        slot,
                    )
                    .expect("slot valid");
                    let orig = prev
                        .collection()
                        .matrix((j + 1) % k2)
                        .principal_block(range.start, range.len());
                    let jm = ComplexMatrix::anti_identity(range.len());
                    middle_res = middle_res.max(tilde.max_rel_diff(&(&(&jm * &orig) * &jm)));
                }
            }

            let after = state.monodromy_invariants();
            let scale =
                scale_before.max(crate::algebra::collection_product(state.collection()).max_abs());
            conj_res = conj_res.max(char_poly_residual(&invariants_before, &after, scale));

            match state.uncross_ray() {
                Ok(back) => {
                    round_res = round_res.max(back.collection().max_rel_diff(prev.collection()));
                }
                Err(e) => failed = Some(format!("uncross at step {step}: {e}")),
            }
        }

        if let Some(detail) = failed {
            let coll = start.collection().clone();
            for name in [
                "triangularity",
                "middle_block",
                "conjugacy_invariance",
                "round_trip",
                "full_turn_gauge",
            ] {
                report.record_bool(name, false, || {
                    failure_with_doc(name, format!("trial {trial}: {detail}"), &coll)
                });
            }
            continue;
        }

        report.record_bool("triangularity", tri_ok, || {
            failure_with_doc(
                "triangularity",
                format!("trial {trial}: alternation broken"),
                start.collection(),
            )
        });
        report.record("middle_block", middle_res, 1e-12, || {
            failure_with_doc(
                "middle_block",
                format!("trial {trial}: residual {middle_res:.3e}"),
                start.collection(),
            )
        });
        report.record("conjugacy_invariance", conj_res, 1e-10, || {
            failure_with_doc(
                "conjugacy_invariance",
                format!("trial {trial}: residual {conj_res:.3e}"),
                start.collection(),
            )
        });
        report.record("round_trip", round_res, 1e-12, || {
            failure_with_doc(
                "round_trip",
                format!("trial {trial}: residual {round_res:.3e}"),
                start.collection(),
            )
        });

        // Full turn: identity net permutation and gauge equivalence.
        let full_ok =
            state.collection().eigen_permutation() == start.collection().eigen_permutation() && {
                let parked = StokesCollection::new(
                    config.clone(),
                    state.collection().matrices().to_vec(),
                    start.collection().starting_angle(),
                );
                match parked {
                    Ok(parked) => {
                        match crate::algebra::gauge_equivalent(start.collection(), &parked) {
                            Ok((eq, Some(w))) => {
                                eq && w.validates(start.collection(), &parked, 1e-8)
                            }
                            _ => false,
                        }
                    }
                    Err(_) => false,
                }
            };
        report.record_bool("full_turn_gauge", full_ok, || {
            failure_with_doc(
                "full_turn_gauge",
                format!("trial {trial}: full turn not gauge equivalent"),
                start.collection(),
            )
        });
    }
    report
}

/// Half-turn checks on randomized k = 2, n = 4 collections: retargeting by
/// π/k must be gauge equivalent to the index-shifted, order-conjugated
/// original collection.
pub fn half_turn_trials(trials: usize, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::new(seed, trials);
    for trial in 0..trials {
        let config = random_config_kn(&mut rng, 2, 4, 1e-3);
        let collection = random_collection(&mut rng, &config);
        let state = WalkState::new(collection);
        let ok = matches!(state.half_turn_check(), Ok((true, Some(_))));
        report.record_bool("half_turn", ok, || {
            failure_with_doc(
                "half_turn",
                format!("trial {trial}: half-turn equivalence failed"),
                state.collection(),
            )
        });
    }
    report
}

/// Commuting passages on constructed multi-block instances: sequential
/// ε-split crossings for both signs of ε agree with the direct multi-block
/// crossing.
pub fn commuting_passage_trials(trials: usize, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport::new(seed, trials);
    for trial in 0..trials {
        let (config, theta) = random_multiblock(&mut rng);
        let collection = random_collection_at(&mut rng, &config, theta);
        let state = WalkState::new(collection);
        let catalog = separating_rays(&config).expect("valid configuration");
        let arc = catalog.min_arc_width();
        let epsilon = 1e-3 * arc * config.k() as f64;
        let ok = state
            .perturbed_composition_check(epsilon)
            .unwrap_or_default();
        report.record_bool("commuting_passages", ok, || {
            failure_with_doc(
                "commuting_passages",
                format!("trial {trial}: split and direct crossings disagree (ε = {epsilon:.3e})"),
                state.collection(),
            )
        });
    }
    report
}

/// Composite randomized verification: all property suites at the same trial
/// budget, merged into one report.
pub fn invariant_suite(trials: usize, seed: u64) -> TrialReport {
    let mut report = TrialReport::new(seed, 0);
    report.merge(block_reversal_trials(trials, seed ^ 0x1));
    report.merge(ray_count_trials(trials, seed ^ 0x2));
    report.merge(walk_invariant_trials(trials, seed ^ 0x3));
    report.merge(commuting_passage_trials(trials.div_ceil(5), seed ^ 0x4));
    report.merge(half_turn_trials(trials.div_ceil(5), seed ^ 0x5));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flatness_examples() {
        let config = EigenvalueConfig::new(1, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(
            flatness_compare(0, 1, &config, 0.0).unwrap(),
            Flatness::Flatter
        );
        assert_eq!(
            flatness_compare(0, 1, &config, PI).unwrap(),
            Flatness::Steeper
        );
        assert_eq!(
            flatness_compare(0, 1, &config, PI / 2.0).unwrap(),
            Flatness::Separating
        );
        assert!(matches!(
            flatness_compare(1, 1, &config, 0.0),
            Err(OracleError::SameIndex(1))
        ));
    }

    #[test]
    fn brute_order_examples() {
        let config = EigenvalueConfig::new(1, vec![c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(brute_order(&config, 0.0).unwrap(), vec![0, 1, 2]);

        let config =
            EigenvalueConfig::new(1, vec![c(4.0, 1.0), c(3.0, 1.0), c(2.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        assert_eq!(
            brute_order(&config, 100.0_f64.to_radians()).unwrap(),
            vec![1, 0, 3, 2]
        );

        let config = EigenvalueConfig::new(2, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(brute_order(&config, PI / 2.0).unwrap(), vec![1, 0]);

        let config = EigenvalueConfig::new(1, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!(matches!(
            brute_order(&config, PI / 2.0),
            Err(OracleError::SeparatingAngle { .. })
        ));
    }

    #[test]
    fn table_config_shape_is_validated() {
        assert!(validate_table_shape(&table_config()).is_ok());
        let skew = EigenvalueConfig::new(1, vec![c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            validate_table_shape(&skew),
            Err(OracleError::ConfigShape(_))
        ));
    }

    #[test]
    fn table_check_small_run_passes() {
        let report = table_check(10, 42);
        assert!(report.all_pass(), "{report}");
        assert!(report.worst_residual() < 1e-12);
    }

    #[test]
    fn table_check_diagonal_inputs_stay_diagonal() {
        // Diagonal collections must transform into diagonal collections.
        let config = table_config();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let diag = |rng: &mut ChaCha8Rng| {
            ComplexMatrix::from_fn(3, |i, j| {
                if i == j {
                    random_unit(rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        };
        let coll = StokesCollection::new(config.clone(), vec![diag(&mut rng), diag(&mut rng)], 0.0)
            .unwrap();
        let walked = WalkState::new(coll).retarget(PI).unwrap();
        for m in walked.collection().matrices() {
            assert_eq!(
                crate::algebra::triangularity(m, 1e-12),
                crate::algebra::Triangularity::Diagonal
            );
        }
    }

    #[test]
    fn table_check_unipotent_inputs_keep_unit_diagonals() {
        let config = table_config();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let unipotent = |rng: &mut ChaCha8Rng, upper: bool| {
            ComplexMatrix::from_fn(3, |i, j| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else if (upper && i < j) || (!upper && i > j) {
                    random_unit(rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        };
        let coll = StokesCollection::new(
            config,
            vec![unipotent(&mut rng, true), unipotent(&mut rng, false)],
            0.0,
        )
        .unwrap();
        let walked = WalkState::new(coll).retarget(PI).unwrap();
        for m in walked.collection().matrices() {
            for i in 0..3 {
                assert!((m[(i, i)] - c(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn invariant_suite_smoke() {
        let report = invariant_suite(8, 1234);
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn half_turn_random_k2_n4_trials() {
        let report = half_turn_trials(200, 99);
        let stat = &report.properties[0];
        assert_eq!(stat.pass, 200, "{report}");
        assert_eq!(stat.fail, 0, "{report}");
    }

    #[test]
    fn table_residuals_scale_linearly_with_perturbations() {
        // Perturb every input entry relatively by δ and compare the oracle
        // rows for the perturbed inputs against the engine walk on the
        // original inputs: the residual must shrink linearly with δ, with a
        // modest constant (no catastrophic cancellation in the formulas).
        let config = table_config();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inputs = TableInputs {
            cp: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i <= j {
                        random_unit(&mut rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }),
            cm: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i >= j {
                        random_unit(&mut rng)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }),
        };
        let [phi1, phi2, phi3] = validate_table_shape(&config).unwrap();
        let theta = [(phi1 + phi2) / 2.0, (phi2 + phi3) / 2.0, PI];
        let (upper, lower) = inputs.matrices();
        let coll = StokesCollection::new(config, vec![upper, lower], 0.0).unwrap();

        let mut residuals = Vec::new();
        for delta in [1e-9, 1e-7, 1e-5] {
            let perturb = |m: &[[Complex64; 3]; 3]| -> [[Complex64; 3]; 3] {
                std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] * (1.0 + delta)))
            };
            let perturbed = TableInputs {
                cp: perturb(&inputs.cp),
                cm: perturb(&inputs.cm),
            };
            let mut worst: f64 = 0.0;
            let mut state = WalkState::new(coll.clone());
            for (row, target) in theta.iter().enumerate() {
                state = state.retarget(*target).unwrap();
                let (want_upper, want_lower) = table_row(&perturbed, row + 1);
                worst = worst
                    .max(state.collection().matrix(0).max_rel_diff(&want_upper))
                    .max(state.collection().matrix(1).max_rel_diff(&want_lower));
            }
            assert!(
                worst <= 1e3 * delta,
                "residual {worst:.3e} for perturbation {delta:.0e}"
            );
            assert!(worst >= delta / 1e3, "residual implausibly small");
            residuals.push(worst);
        }
        assert!(residuals[0] < residuals[1] && residuals[1] < residuals[2]);
    }
}
