//! Angular geometry derived from the eigenvalues of an irregular singularity:
//! signed projections, critical and separating rays, eigenvalue orderings and
//! their generalized partitions, and the overlapping sector layout.
//!
//! Conventions used throughout the crate:
//!
//! * eigenvalue indices and positions are 0-based (display code adds 1);
//! * a pair `(p, q)` always has `p < q`;
//! * every stored angle is in radians, normalized to `[0, 2π)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::algebra::Partition;
use crate::angle::{ccw_distance, circular_distance, normalize, same_ray};

/// Comparison tolerances used by the geometric predicates.
///
/// Angles coincide when their circular distance is at most `angle`.
/// Projections tie when they differ by at most `projection * max(1, max|λ|)`.
/// Matrix entries count as zero relative to the matrix scale times `entry`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub angle: f64,
    pub projection: f64,
    pub entry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            angle: 1e-9,
            projection: 1e-9,
            entry: 1e-9,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("Poincaré rank must be at least 1")]
    InvalidRank,
    #[error("at least two eigenvalues are required, got {n}")]
    TooFewEigenvalues { n: usize },
    #[error("eigenvalues {} and {} coincide (resonant configuration)", p + 1, q + 1)]
    DuplicateEigenvalue { p: usize, q: usize },
    #[error("starting ray at {theta} rad lies on the separating ray at {separating} rad")]
    StartingRayIsSeparating { theta: f64, separating: f64 },
    #[error("inconsistent ordering: {detail}")]
    InconsistentOrdering { detail: String },
    #[error("sector validation failed: {detail}")]
    SectorValidation { detail: String },
}

/// Poincaré rank plus the distinct eigenvalues `λ₁ … λₙ` of the leading
/// coefficient, with the tolerances every derived predicate will use.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueConfig {
    k: usize,
    lambdas: Vec<Complex64>,
    tol: Tolerances,
}

impl EigenvalueConfig {
    pub fn new(k: usize, lambdas: Vec<Complex64>) -> Result<Self, GeometryError> {
        Self::with_tolerances(k, lambdas, Tolerances::default())
    }

    pub fn with_tolerances(
        k: usize,
        lambdas: Vec<Complex64>,
        tol: Tolerances,
    ) -> Result<Self, GeometryError> {
        if k < 1 {
            return Err(GeometryError::InvalidRank);
        }
        let n = lambdas.len();
        if n < 2 {
            return Err(GeometryError::TooFewEigenvalues { n });
        }
        let scale = lambdas.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for p in 0..n {
            for q in (p + 1)..n {
                if (lambdas[p] - lambdas[q]).norm() <= 1e-12 * scale {
                    return Err(GeometryError::DuplicateEigenvalue { p, q });
                }
            }
        }
        Ok(EigenvalueConfig { k, lambdas, tol })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Absolute tie tolerance for projections, scaled by the eigenvalue
    /// magnitudes so that tie detection is scale invariant.
    pub fn projection_tol(&self) -> f64 {
        let scale = self.lambdas.iter().map(|z| z.norm()).fold(1.0, f64::max);
        self.tol.projection * scale
    }

    /// Signed projection of eigenvalue `index` on the critical direction
    /// associated with the ray at `phi`.
    pub fn projection_of(&self, index: usize, phi: f64) -> f64 {
        projection(self.lambdas[index], phi, self.k)
    }
}

/// Signed length `ℜ(λ e^{−ikφ})` of the projection of `λ` on the line
/// `e^{ikφ}ℝ` oriented by `e^{ikφ}`.
pub fn projection(lambda: Complex64, phi: f64, k: usize) -> f64 {
    (lambda * Complex64::from_polar(1.0, -(k as f64) * phi)).re
}

/// A direction in eigenvalue space on which two or more eigenvalues have
/// equal signed projections.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRay {
    pub angle: f64,
    /// Eigenvalue index pairs (0-based, `p < q`) sharing the projection.
    pub pairs: Vec<(usize, usize)>,
}

/// A direction in `x`-space across which the relative flatness of at least
/// one pair of sectorial solutions flips.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingRay {
    pub angle: f64,
    pub pairs: Vec<(usize, usize)>,
}

/// Traversal direction around the circle of rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationDirection {
    Counterclockwise,
    Clockwise,
}

/// All critical and separating rays of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RayCatalog {
    /// Critical rays sorted by angle, coincident angles merged.
    pub critical: Vec<CriticalRay>,
    /// Separating rays sorted by angle, coincident angles merged.
    pub separating: Vec<SeparatingRay>,
    /// Number of distinct critical lines (angles mod π).
    pub count_u: usize,
}

impl RayCatalog {
    pub fn separating_angles(&self) -> Vec<f64> {
        self.separating.iter().map(|r| r.angle).collect()
    }

    /// True when `theta` lies on a separating ray within `tol`.
    pub fn is_separating(&self, theta: f64, tol: f64) -> bool {
        self.separating
            .iter()
            .any(|r| same_ray(r.angle, theta, tol))
    }

    /// First separating ray strictly beyond `theta` in the given direction,
    /// with wraparound. `tol` excludes a ray that `theta` already sits on.
    pub fn next_separating(
        &self,
        theta: f64,
        direction: RotationDirection,
        tol: f64,
    ) -> &SeparatingRay {
        let dist = |ray: &SeparatingRay| match direction {
            RotationDirection::Counterclockwise => ccw_distance(theta, ray.angle),
            RotationDirection::Clockwise => ccw_distance(ray.angle, theta),
        };
        self.separating
            .iter()
            .map(|r| {
                let d = dist(r);
                // A ray `theta` sits on is a full turn away, not zero.
                let d = if d <= tol { d + TAU } else { d };
                (d, r)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, r)| r)
            .expect("catalog contains at least one separating ray")
    }

    /// Smallest gap between consecutive separating angles.
    pub fn min_arc_width(&self) -> f64 {
        let angles = self.separating_angles();
        let m = angles.len();
        (0..m)
            .map(|i| ccw_distance(angles[i], angles[(i + 1) % m]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn merge_rays(
    mut items: Vec<(f64, Vec<(usize, usize)>)>,
    tol: f64,
) -> Vec<(f64, Vec<(usize, usize)>)> {
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, Vec<(usize, usize)>)> = Vec::new();
    for (angle, pairs) in items {
        match merged.last_mut() {
            Some(last) if circular_distance(last.0, angle) <= tol => {
                last.1.extend(pairs);
            }
            _ => merged.push((angle, pairs)),
        }
    }
    // The sweep misses coincidences across the 0/2π seam.
    if merged.len() > 1 {
        let first_angle = merged[0].0;
        let last_angle = merged.last().unwrap().0;
        if circular_distance(first_angle, last_angle) <= tol {
            let (_, pairs) = merged.pop().unwrap();
            merged[0].1.extend(pairs);
        }
    }
    for (_, pairs) in &mut merged {
        pairs.sort();
        pairs.dedup();
    }
    merged
}

/// For each unordered pair `(p, q)` the two directions `arg(λ_p−λ_q) ± π/2`
/// on which the pair projects to a single point. Coincident directions are
/// merged and their pair sets unioned; the result is sorted by angle.
pub fn critical_rays(config: &EigenvalueConfig) -> Result<Vec<CriticalRay>, GeometryError> {
    let tol = config.tolerances().angle;
    let mut raw = Vec::new();
    for p in 0..config.n() {
        for q in (p + 1)..config.n() {
            let d = config.lambdas[p] - config.lambdas[q];
            let base = d.arg();
            raw.push((normalize(base + PI / 2.0), vec![(p, q)]));
            raw.push((normalize(base - PI / 2.0), vec![(p, q)]));
        }
    }
    Ok(merge_rays(raw, tol)
        .into_iter()
        .map(|(angle, pairs)| CriticalRay { angle, pairs })
        .collect())
}

/// Number of distinct lines (angles mod π) among the given ray angles.
fn count_lines(angles: &[f64], tol: f64) -> usize {
    let mut line_angles: Vec<f64> = angles.iter().map(|a| a.rem_euclid(PI)).collect();
    line_angles.sort_by(f64::total_cmp);
    let mut count = 0usize;
    let mut prev: Option<f64> = None;
    for &a in &line_angles {
        match prev {
            Some(p) if a - p <= tol => {}
            _ => count += 1,
        }
        prev = Some(a);
    }
    // Wraparound on the half-circle: π − ε and +ε are the same line.
    if count > 1 {
        let first = line_angles[0];
        let last = *line_angles.last().unwrap();
        if (PI - last) + first <= tol {
            count -= 1;
        }
    }
    count
}

/// Full catalog of separating rays: each critical direction `ψ` contributes
/// the `2k` rays `(ψ + jπ)/k`, `j = 0 … 2k−1`, carrying its pair set.
pub fn separating_rays(config: &EigenvalueConfig) -> Result<RayCatalog, GeometryError> {
    let critical = critical_rays(config)?;
    let tol = config.tolerances().angle;
    let k = config.k();
    let mut raw = Vec::new();
    for ray in &critical {
        for j in 0..(2 * k) {
            let phi = normalize((ray.angle + j as f64 * PI) / k as f64);
            raw.push((phi, ray.pairs.clone()));
        }
    }
    let separating: Vec<SeparatingRay> = merge_rays(raw, tol)
        .into_iter()
        .map(|(angle, pairs)| SeparatingRay { angle, pairs })
        .collect();
    let count_u = count_lines(&critical.iter().map(|r| r.angle).collect::<Vec<_>>(), tol);
    Ok(RayCatalog {
        critical,
        separating,
        count_u,
    })
}

/// First separating angle strictly beyond `theta` in the given direction.
pub fn next_separating_angle(
    config: &EigenvalueConfig,
    theta: f64,
    direction: RotationDirection,
) -> Result<(f64, Vec<(usize, usize)>), GeometryError> {
    let catalog = separating_rays(config)?;
    let ray = catalog.next_separating(theta, direction, config.tolerances().angle);
    Ok((ray.angle, ray.pairs.clone()))
}

/// Order of the eigenvalues on a ray: the permutation sorting them by
/// strictly decreasing projection, with tie blocks recorded in the partition.
#[derive(Debug, Clone, PartialEq)]
pub struct RayOrdering {
    /// `permutation[position] = eigenvalue index`.
    pub permutation: Vec<usize>,
    pub partition: Partition,
    /// Projections in position order (non-increasing).
    pub projections: Vec<f64>,
}

/// Sorts eigenvalue indices by decreasing projection on the critical
/// direction of `phi`. Projections within the tie tolerance form r-blocks of
/// size ≥ 2; inside a block the input index order is kept. Off the
/// separating rays the partition is the trivial `(n)`.
pub fn ordering_on_ray(config: &EigenvalueConfig, phi: f64) -> RayOrdering {
    let n = config.n();
    let ptol = config.projection_tol();
    let proj: Vec<f64> = (0..n).map(|i| config.projection_of(i, phi)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| proj[b].total_cmp(&proj[a]).then(a.cmp(&b)));

    // Group positions whose projections chain within tolerance, then restore
    // the input index order inside each group.
    let mut groups: Vec<usize> = Vec::new();
    let mut start = 0;
    for pos in 1..=n {
        let tied = pos < n && (proj[order[pos - 1]] - proj[order[pos]]).abs() <= ptol;
        if !tied {
            groups.push(pos - start);
            order[start..pos].sort_unstable();
            start = pos;
        }
    }
    let partition = Partition::from_groups(&groups).expect("groups cover all positions");
    let projections = order.iter().map(|&i| proj[i]).collect();
    RayOrdering {
        permutation: order,
        partition,
        projections,
    }
}

/// Partition of the positions of an already-permuted configuration at `phi`.
///
/// The projections listed in position order must be non-increasing; tie
/// blocks are therefore consecutive. A violation means `perm` is not the
/// order of any arc adjacent to `phi` and is rejected.
pub fn partition_in_order(
    config: &EigenvalueConfig,
    perm: &[usize],
    phi: f64,
) -> Result<Partition, GeometryError> {
    let n = config.n();
    assert_eq!(perm.len(), n);
    let ptol = config.projection_tol();
    let proj: Vec<f64> = perm.iter().map(|&i| config.projection_of(i, phi)).collect();
    let mut groups: Vec<usize> = Vec::new();
    let mut start = 0;
    for pos in 1..=n {
        if pos < n {
            let gap = proj[pos - 1] - proj[pos];
            if gap < -ptol {
                return Err(GeometryError::InconsistentOrdering {
                    detail: format!(
                        "projections increase between positions {} and {} at angle {phi}",
                        pos,
                        pos + 1
                    ),
                });
            }
            if gap.abs() <= ptol {
                continue;
            }
        }
        groups.push(pos - start);
        start = pos;
    }
    Ok(Partition::from_groups(&groups).expect("groups cover all positions"))
}

/// Outcome of checking whether the real parts are strictly decreasing, so
/// that `ℝ⁺` can serve as the starting ray with the identity order.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub pass: bool,
    pub reason: Option<String>,
}

pub fn hypothesis_check(config: &EigenvalueConfig) -> HypothesisReport {
    let ptol = config.projection_tol();
    for i in 0..config.n() - 1 {
        let d = config.lambdas[i].re - config.lambdas[i + 1].re;
        if d.abs() <= ptol {
            return HypothesisReport {
                pass: false,
                reason: Some(format!(
                    "eigenvalues {} and {} have equal real parts",
                    i + 1,
                    i + 2
                )),
            };
        }
        if d < 0.0 {
            return HypothesisReport {
                pass: false,
                reason: Some(format!("order violated: ℜ(λ{}) < ℜ(λ{})", i + 1, i + 2)),
            };
        }
    }
    HypothesisReport {
        pass: true,
        reason: None,
    }
}

/// One of the `2k` overlapping sectors. Endpoints are kept unnormalized so
/// that `end − start` is the opening; membership tests are circular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    /// 1-based sector index `j`.
    pub index: usize,
    pub start: f64,
    pub end: f64,
}

impl Sector {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        normalize((self.start + self.end) / 2.0)
    }

    /// Open-interval membership on the circle.
    pub fn contains(&self, angle: f64) -> bool {
        let d = ccw_distance(normalize(self.start), angle);
        d > 0.0 && d < self.width()
    }
}

/// The `2k` sectors, their common overlap margin `δ`, and a nominal radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorLayout {
    pub delta: f64,
    pub sectors: Vec<Sector>,
    pub radius: f64,
}

/// Builds the sector cover anchored at the starting ray `theta`:
/// sector `j` spans `(θ + (j−1)π/k − δ/4, θ + jπ/k + δ/4)` where `δ` is the
/// smallest gap in the list of separating angles seen from `theta`.
/// Each sector then contains exactly one separating ray per eigenvalue pair,
/// which is validated before returning.
pub fn sector_layout(config: &EigenvalueConfig, theta: f64) -> Result<SectorLayout, GeometryError> {
    let catalog = separating_rays(config)?;
    let tol = config.tolerances().angle;
    let mut rel: Vec<f64> = catalog
        .separating
        .iter()
        .map(|r| ccw_distance(theta, r.angle))
        .collect();
    rel.sort_by(f64::total_cmp);
    if rel.first().is_none_or(|&a| a <= tol) || TAU - rel.last().unwrap() <= tol {
        let nearest = catalog
            .separating
            .iter()
            .map(|r| r.angle)
            .min_by(|a, b| circular_distance(*a, theta).total_cmp(&circular_distance(*b, theta)))
            .unwrap();
        return Err(GeometryError::StartingRayIsSeparating {
            theta: normalize(theta),
            separating: nearest,
        });
    }
    let mut delta = rel[0].min(TAU - rel.last().unwrap());
    for w in rel.windows(2) {
        delta = delta.min(w[1] - w[0]);
    }
    let k = config.k() as f64;
    let sectors: Vec<Sector> = (1..=2 * config.k())
        .map(|j| Sector {
            index: j,
            start: theta + (j as f64 - 1.0) * PI / k - delta / 4.0,
            end: theta + j as f64 * PI / k + delta / 4.0,
        })
        .collect();

    // Exactly one separating ray per pair in every sector.
    let mut per_pair: std::collections::BTreeMap<(usize, usize), Vec<f64>> =
        std::collections::BTreeMap::new();
    for ray in &catalog.separating {
        for &pair in &ray.pairs {
            per_pair.entry(pair).or_default().push(ray.angle);
        }
    }
    for sector in &sectors {
        for (pair, angles) in &per_pair {
            let inside = angles.iter().filter(|&&a| sector.contains(a)).count();
            if inside != 1 {
                return Err(GeometryError::SectorValidation {
                    detail: format!(
                        "sector {} holds {} separating rays of pair ({},{})",
                        sector.index,
                        inside,
                        pair.0 + 1,
                        pair.1 + 1
                    ),
                });
            }
        }
    }
    Ok(SectorLayout {
        delta,
        sectors,
        radius: 1.0,
    })
}
