//! Matrix machinery for Stokes collections: generalized partitions and their
//! block permutation matrices, triangularity classification, characteristic
//! polynomials, and the diagonal gauge freedom (canonical form and
//! equivalence testing).

use num_complex::Complex64;
use std::ops::Range;

use crate::angle::normalize;
use crate::geometry::{ordering_on_ray, separating_rays, EigenvalueConfig, GeometryError};
use crate::matrix::ComplexMatrix;

/// Relative threshold under which an entry counts as a structural zero when
/// matching zero patterns. Diagonal gauges can neither create nor destroy
/// zeros, so pattern comparison is a cheap rejection test.
pub const ZERO_PATTERN_REL: f64 = 1e-12;

/// Relative tolerance for scalar equality in gauge computations.
pub const GAUGE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum AlgebraError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("slot {slot} out of range 1..={slots}")]
    SlotOutOfRange { slot: usize, slots: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix C({}) has a zero diagonal entry at index {}", matrix + 1, index + 1)]
    SingularDiagonal { matrix: usize, index: usize },
    #[error("expected {expected} Stokes matrices, got {got}")]
    WrongMatrixCount { expected: usize, got: usize },
    #[error("matrix C({}) must be {expected} triangular in the current order", matrix + 1)]
    NotTriangular {
        matrix: usize,
        expected: &'static str,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Ordered generalized partition `m̄ = (s₁, r₂, s₃, …, r_{2m}, s_{2m+1})`.
///
/// Entries at even 0-based indices are `s`-parts (singleton runs, possibly
/// empty); entries at odd indices are `r`-parts (tie blocks, size ≥ 2).
/// The list always has odd length, so `m` is the number of `r`-parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, AlgebraError> {
        if parts.is_empty() || parts.len().is_multiple_of(2) {
            return Err(AlgebraError::InvalidPartition(format!(
                "partition must have odd length, got {}",
                parts.len()
            )));
        }
        for (i, &p) in parts.iter().enumerate() {
            if i % 2 == 1 && p < 2 {
                return Err(AlgebraError::InvalidPartition(format!(
                    "r-part at slot {} must be at least 2, got {p}",
                    i + 1
                )));
            }
        }
        if parts.iter().sum::<usize>() == 0 {
            return Err(AlgebraError::InvalidPartition("partition of 0".into()));
        }
        Ok(Partition { parts })
    }

    /// The trivial partition `(n)` of an untied ordering.
    pub fn single(n: usize) -> Self {
        Partition { parts: vec![n] }
    }

    /// Builds the alternating form from maximal tie-group sizes: groups of
    /// size 1 accumulate into `s`-parts, larger groups become `r`-parts.
    pub fn from_groups(groups: &[usize]) -> Result<Self, AlgebraError> {
        let mut parts = Vec::new();
        let mut s_run = 0usize;
        for &g in groups {
            match g {
                0 => return Err(AlgebraError::InvalidPartition("empty tie group".into())),
                1 => s_run += 1,
                _ => {
                    parts.push(s_run);
                    parts.push(g);
                    s_run = 0;
                }
            }
        }
        parts.push(s_run);
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number `m` of r-blocks.
    pub fn block_count(&self) -> usize {
        self.parts.len() / 2
    }

    /// Number of slots `2m+1`.
    pub fn slots(&self) -> usize {
        self.parts.len()
    }

    /// Position range covered by the 1-based slot `i`.
    pub fn slot_range(&self, slot: usize) -> Result<Range<usize>, AlgebraError> {
        if slot < 1 || slot > self.slots() {
            return Err(AlgebraError::SlotOutOfRange {
                slot,
                slots: self.slots(),
            });
        }
        let start: usize = self.parts[..slot - 1].iter().sum();
        Ok(start..start + self.parts[slot - 1])
    }

    /// The r-slots as `(1-based slot index, position range)`.
    pub fn r_slots(&self) -> Vec<(usize, Range<usize>)> {
        (0..self.block_count())
            .map(|b| {
                let slot = 2 * (b + 1);
                (slot, self.slot_range(slot).expect("slot in range"))
            })
            .collect()
    }

    /// Position map reversing each r-block: `map[new] = old`. The map is an
    /// involution and equals the action of the partition matrix.
    pub fn position_reversal(&self) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.total()).collect();
        for (_, range) in self.r_slots() {
            let (a, b) = (range.start, range.end);
            for (offset, pos) in (a..b).enumerate() {
                map[pos] = b - 1 - offset;
            }
        }
        map
    }
}

/// The involutive block permutation matrix of a partition: identity blocks
/// on s-slots, anti-diagonal blocks `J` on r-slots.
pub fn partition_matrix(p: &Partition) -> ComplexMatrix {
    let map = p.position_reversal();
    ComplexMatrix::from_fn(p.total(), |i, j| {
        if map[i] == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Diagonal block of `m` at the 1-based slot `i` of partition `p`.
pub fn block(m: &ComplexMatrix, p: &Partition, slot: usize) -> Result<ComplexMatrix, AlgebraError> {
    if p.total() != m.dim() {
        return Err(AlgebraError::ShapeMismatch(format!(
            "partition of {} does not fit a {}×{} matrix",
            p.total(),
            m.dim(),
            m.dim()
        )));
    }
    let range = p.slot_range(slot)?;
    Ok(m.principal_block(range.start, range.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triangularity {
    Upper,
    Lower,
    Diagonal,
    None,
}

/// Classifies a matrix by comparing its off-diagonal halves to zero within
/// `entry_tol` relative to the entry scale.
pub fn triangularity(m: &ComplexMatrix, entry_tol: f64) -> Triangularity {
    let threshold = entry_tol * m.max_abs().max(1.0);
    let n = m.dim();
    let mut below_zero = true;
    let mut above_zero = true;
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)].norm() > threshold {
                if i > j {
                    below_zero = false;
                } else if i < j {
                    above_zero = false;
                }
            }
        }
    }
    match (below_zero, above_zero) {
        (true, true) => Triangularity::Diagonal,
        (true, false) => Triangularity::Upper,
        (false, true) => Triangularity::Lower,
        (false, false) => Triangularity::None,
    }
}

/// Coefficients of `det(xI − M)` in descending powers of `x`, leading 1.
///
/// Exact principal-minor expansion for `n ≤ 4`, Faddeev–LeVerrier recursion
/// for larger matrices.
pub fn char_poly_coefficients(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.dim();
    if n <= 4 {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        let sign = |k: usize| {
            if k.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        };
        for k in 1..=n {
            let mut e = Complex64::new(0.0, 0.0);
            for subset in k_subsets(n, k) {
                e += principal_minor(m, &subset);
            }
            coeffs.push(e * sign(k));
        }
        coeffs
    } else {
        // Faddeev–LeVerrier: M₁ = M, cₖ = −tr(Mₖ)/k, Mₖ₊₁ = M(Mₖ + cₖI).
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        let mut mk = m.clone();
        for k in 1..=n {
            let ck = -mk.trace() / k as f64;
            coeffs.push(ck);
            if k < n {
                mk = m * &mk.add(&ComplexMatrix::identity(n).scale(ck));
            }
        }
        coeffs
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

fn principal_minor(m: &ComplexMatrix, rows: &[usize]) -> Complex64 {
    let k = rows.len();
    let sub = ComplexMatrix::from_fn(k, |i, j| m[(rows[i], rows[j])]);
    det_small(&sub)
}

fn det_small(m: &ComplexMatrix) -> Complex64 {
    match m.dim() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        n => {
            // Laplace expansion along the first row; only used for n ≤ 4.
            let mut det = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let minor =
                    ComplexMatrix::from_fn(n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                det += m[(0, j)] * det_small(&minor) * sign;
            }
            det
        }
    }
}

/// A collection of `2k` Stokes matrices attached to a starting ray.
///
/// Matrices live in *position* space: position `p` carries the eigenvalue
/// `eigen_permutation[p]`, and positions are ordered by decreasing projection
/// on the starting ray's critical direction. `C(1)` (index 0) is upper
/// triangular, `C(2)` lower, alternating.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesCollection {
    config: EigenvalueConfig,
    matrices: Vec<ComplexMatrix>,
    starting_angle: f64,
    eigen_permutation: Vec<usize>,
}

impl StokesCollection {
    /// Validates shape, triangularity alternation, nonzero diagonals, and a
    /// non-separating starting ray; the eigenvalue order is recomputed from
    /// the starting angle.
    pub fn new(
        config: EigenvalueConfig,
        matrices: Vec<ComplexMatrix>,
        starting_angle: f64,
    ) -> Result<Self, AlgebraError> {
        let k = config.k();
        let n = config.n();
        if matrices.len() != 2 * k {
            return Err(AlgebraError::WrongMatrixCount {
                expected: 2 * k,
                got: matrices.len(),
            });
        }
        for (j, m) in matrices.iter().enumerate() {
            if m.dim() != n {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "matrix C({}) is {}×{}, expected {n}×{n}",
                    j + 1,
                    m.dim(),
                    m.dim()
                )));
            }
        }
        let starting_angle = normalize(starting_angle);
        let catalog = separating_rays(&config)?;
        if catalog.is_separating(starting_angle, config.tolerances().angle) {
            let nearest = catalog
                .next_separating(
                    starting_angle,
                    crate::geometry::RotationDirection::Counterclockwise,
                    0.0,
                )
                .angle;
            return Err(GeometryError::StartingRayIsSeparating {
                theta: starting_angle,
                separating: nearest,
            }
            .into());
        }
        let ordering = ordering_on_ray(&config, starting_angle);
        let entry_tol = config.tolerances().entry;
        for (j, m) in matrices.iter().enumerate() {
            let class = triangularity(m, entry_tol);
            let ok = matches!(
                (j % 2, class),
                (_, Triangularity::Diagonal)
                    | (0, Triangularity::Upper)
                    | (1, Triangularity::Lower)
            );
            if !ok {
                return Err(AlgebraError::NotTriangular {
                    matrix: j,
                    expected: if j % 2 == 0 { "upper" } else { "lower" },
                });
            }
            for i in 0..n {
                if m[(i, i)].norm() <= entry_tol * m.max_abs().max(1.0) * 1e-3 {
                    return Err(AlgebraError::SingularDiagonal {
                        matrix: j,
                        index: i,
                    });
                }
            }
        }
        Ok(StokesCollection {
            config,
            matrices,
            starting_angle,
            eigen_permutation: ordering.permutation,
        })
    }

    pub fn config(&self) -> &EigenvalueConfig {
        &self.config
    }

    pub fn k(&self) -> usize {
        self.config.k()
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    /// Matrix `C(j+1)` for the 0-based index `j`.
    pub fn matrix(&self, j: usize) -> &ComplexMatrix {
        &self.matrices[j]
    }

    pub fn starting_angle(&self) -> f64 {
        self.starting_angle
    }

    /// `eigen_permutation[position] = original eigenvalue index`.
    pub fn eigen_permutation(&self) -> &[usize] {
        &self.eigen_permutation
    }

    /// Largest entrywise relative difference against another collection.
    pub fn max_rel_diff(&self, other: &StokesCollection) -> f64 {
        self.matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.max_rel_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Diagonal matrices `D₁ … D_{2k}` realizing a gauge equivalence
/// `C(j) ↦ Dⱼ C(j) D⁻¹ⱼ₊₁` (indices mod 2k).
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeWitness {
    pub diagonals: Vec<Vec<Complex64>>,
}

impl GaugeWitness {
    pub fn identity(k: usize, n: usize) -> Self {
        GaugeWitness {
            diagonals: vec![vec![Complex64::new(1.0, 0.0); n]; 2 * k],
        }
    }

    /// Applies the witness to a collection: `C'(j) = Dⱼ C(j) D⁻¹ⱼ₊₁`.
    pub fn apply(&self, coll: &StokesCollection) -> Result<StokesCollection, AlgebraError> {
        let k2 = coll.matrices().len();
        let n = coll.n();
        if self.diagonals.len() != k2 || self.diagonals.iter().any(|d| d.len() != n) {
            return Err(AlgebraError::ShapeMismatch(
                "witness shape does not match collection".into(),
            ));
        }
        for (j, d) in self.diagonals.iter().enumerate() {
            if let Some(i) = d.iter().position(|z| z.norm() == 0.0) {
                return Err(AlgebraError::SingularDiagonal {
                    matrix: j,
                    index: i,
                });
            }
        }
        let matrices = (0..k2)
            .map(|j| {
                let d = &self.diagonals[j];
                let e = &self.diagonals[(j + 1) % k2];
                ComplexMatrix::from_fn(n, |p, q| d[p] * coll.matrix(j)[(p, q)] / e[q])
            })
            .collect();
        StokesCollection::new(coll.config().clone(), matrices, coll.starting_angle())
    }

    /// Checks `b(j) = Dⱼ a(j) D⁻¹ⱼ₊₁` for all j within `rel_tol`.
    pub fn validates(&self, a: &StokesCollection, b: &StokesCollection, rel_tol: f64) -> bool {
        match self.apply(a) {
            Ok(ga) => ga.max_rel_diff(b) <= rel_tol,
            Err(_) => false,
        }
    }
}

/// Gauge-equivalent collection with `C'(1) … C'(2k−1)` unipotent and the
/// whole diagonal history pushed into `C'(2k)`, whose i-th diagonal entry
/// becomes the gauge-invariant product `∏ⱼ C(j)ᵢᵢ`. The witness records
/// `D₁ = I` and the induced `D₂ … D_{2k}`. The residual freedom (simultaneous
/// diagonal conjugation) is left untouched.
pub fn canonical_gauge(
    coll: &StokesCollection,
) -> Result<(StokesCollection, GaugeWitness), AlgebraError> {
    let k2 = coll.matrices().len();
    let n = coll.n();
    let mut diagonals = vec![vec![Complex64::new(1.0, 0.0); n]];
    for j in 0..k2 - 1 {
        let prev = diagonals[j].clone();
        let mut next = Vec::with_capacity(n);
        for (i, d) in prev.iter().enumerate() {
            let cii = coll.matrix(j)[(i, i)];
            if cii.norm() == 0.0 {
                return Err(AlgebraError::SingularDiagonal {
                    matrix: j,
                    index: i,
                });
            }
            next.push(d * cii);
        }
        diagonals.push(next);
    }
    let witness = GaugeWitness { diagonals };
    let canonical = witness.apply(coll)?;
    Ok((canonical, witness))
}

/// Product `C(1)·C(2)⋯C(2k)` in index order.
pub fn collection_product(coll: &StokesCollection) -> ComplexMatrix {
    coll.matrices()
        .iter()
        .fold(ComplexMatrix::identity(coll.n()), |acc, m| &acc * m)
}

/// Decides whether two collections are related by diagonal gauges
/// `b(j) = Dⱼ a(j) D⁻¹ⱼ₊₁` and returns a witness when they are.
///
/// Zero patterns must match exactly; every shared nonzero entry contributes
/// the multiplicative constraint `d_{j,p}/d_{j+1,q} = b(j)_{pq}/a(j)_{pq}`.
/// The constraint graph is solved along a BFS forest and all remaining
/// (cycle) constraints are verified within relative tolerance.
pub fn gauge_equivalent(
    a: &StokesCollection,
    b: &StokesCollection,
) -> Result<(bool, Option<GaugeWitness>), AlgebraError> {
    let k2 = a.matrices().len();
    let n = a.n();
    if b.matrices().len() != k2 || b.n() != n {
        return Err(AlgebraError::ShapeMismatch(format!(
            "collections have incompatible shapes: 2k = {k2} vs {}, n = {n} vs {}",
            b.matrices().len(),
            b.n()
        )));
    }

    // Zero-pattern prefilter and constraint collection.
    struct Constraint {
        from: usize, // node j*n + p
        to: usize,   // node ((j+1) mod 2k)*n + q
        ratio: Complex64,
    }
    let mut constraints = Vec::new();
    for j in 0..k2 {
        let (ma, mb) = (a.matrix(j), b.matrix(j));
        let za = ZERO_PATTERN_REL * ma.max_abs().max(1.0);
        let zb = ZERO_PATTERN_REL * mb.max_abs().max(1.0);
        for p in 0..n {
            for q in 0..n {
                let zero_a = ma[(p, q)].norm() <= za;
                let zero_b = mb[(p, q)].norm() <= zb;
                if zero_a != zero_b {
                    return Ok((false, None));
                }
                if !zero_a {
                    constraints.push(Constraint {
                        from: j * n + p,
                        to: ((j + 1) % k2) * n + q,
                        ratio: mb[(p, q)] / ma[(p, q)],
                    });
                }
            }
        }
    }

    // Adjacency lists; edge value: d_from = ratio * d_to.
    let nodes = k2 * n;
    let mut adj: Vec<Vec<(usize, Complex64, bool)>> = vec![Vec::new(); nodes];
    for c in &constraints {
        adj[c.from].push((c.to, c.ratio, true));
        adj[c.to].push((c.from, c.ratio, false));
    }
    let mut values: Vec<Option<Complex64>> = vec![None; nodes];
    for root in 0..nodes {
        if values[root].is_some() {
            continue;
        }
        values[root] = Some(Complex64::new(1.0, 0.0));
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let vu = values[u].unwrap();
            for &(v, ratio, forward) in &adj[u] {
                if values[v].is_none() {
                    // forward: d_u = ratio · d_v, so d_v = d_u / ratio.
                    values[v] = Some(if forward { vu / ratio } else { vu * ratio });
                    queue.push_back(v);
                }
            }
        }
    }

    // Verify every constraint, including the cycle closures.
    for c in &constraints {
        let du = values[c.from].unwrap();
        let dv = values[c.to].unwrap();
        let lhs = du;
        let rhs = c.ratio * dv;
        let scale = lhs.norm().max(rhs.norm()).max(1e-300);
        if (lhs - rhs).norm() > GAUGE_REL_TOL * scale {
            return Ok((false, None));
        }
    }

    let diagonals = (0..k2)
        .map(|j| (0..n).map(|i| values[j * n + i].unwrap()).collect())
        .collect();
    Ok((true, Some(GaugeWitness { diagonals })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_eig_config() -> EigenvalueConfig {
        EigenvalueConfig::new(1, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap()
    }

    fn coll2(upper: ComplexMatrix, lower: ComplexMatrix) -> StokesCollection {
        StokesCollection::new(two_eig_config(), vec![upper, lower], 0.0).unwrap()
    }

    #[test]
    fn partition_matrix_examples() {
        let j3 = partition_matrix(&Partition::new(vec![0, 3, 0]).unwrap());
        assert!(j3.approx_eq(&ComplexMatrix::anti_identity(3), 0.0));

        let id = partition_matrix(&Partition::single(4));
        assert!(id.approx_eq(&ComplexMatrix::identity(4), 0.0));

        let p = partition_matrix(&Partition::new(vec![1, 2, 1]).unwrap());
        let expected = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(p.approx_eq(&expected, 0.0));
    }

    #[test]
    fn partition_matrix_is_involution() {
        for parts in [
            vec![0, 3, 0],
            vec![1, 2, 1],
            vec![0, 2, 0, 2, 0],
            vec![2, 3, 1, 4, 0],
        ] {
            let p = Partition::new(parts).unwrap();
            let m = partition_matrix(&p);
            assert!((&m * &m).approx_eq(&ComplexMatrix::identity(p.total()), 0.0));
        }
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(vec![1, 1, 1]).is_err()); // r-part too small
        assert!(Partition::new(vec![1, 2]).is_err()); // even length
        assert!(Partition::new(vec![]).is_err());
    }

    #[test]
    fn block_extraction() {
        let m =
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 9.0]]);
        let p = Partition::new(vec![1, 2, 0]).unwrap();
        let b = block(&m, &p, 2).unwrap();
        assert!(b.approx_eq(
            &ComplexMatrix::from_real_rows(&[&[5.0, 6.0], &[8.0, 9.0]]),
            0.0
        ));

        let p = Partition::new(vec![0, 2, 0, 2, 0]).unwrap();
        let b = block(&ComplexMatrix::identity(4), &p, 4).unwrap();
        assert!(b.approx_eq(&ComplexMatrix::identity(2), 0.0));

        assert!(matches!(
            block(&ComplexMatrix::identity(4), &p, 6),
            Err(AlgebraError::SlotOutOfRange { slot: 6, slots: 5 })
        ));
    }

    #[test]
    fn triangularity_classification() {
        let tol = 1e-9;
        assert_eq!(
            triangularity(&ComplexMatrix::identity(3), tol),
            Triangularity::Diagonal
        );
        assert_eq!(
            triangularity(
                &ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]),
                tol
            ),
            Triangularity::Upper
        );
        assert_eq!(
            triangularity(
                &ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[2.0, 1.0]]),
                tol
            ),
            Triangularity::Lower
        );
        assert_eq!(
            triangularity(
                &ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 1.0]]),
                tol
            ),
            Triangularity::None
        );
    }

    #[test]
    fn char_poly_examples() {
        let coeffs = char_poly_coefficients(&ComplexMatrix::identity(2));
        let expected = [c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)];
        for (a, e) in coeffs.iter().zip(expected.iter()) {
            assert!((a - e).norm() < 1e-14);
        }

        let m = ComplexMatrix::from_real_rows(&[&[7.0, 2.0], &[3.0, 1.0]]);
        let coeffs = char_poly_coefficients(&m);
        let expected = [c(1.0, 0.0), c(-8.0, 0.0), c(1.0, 0.0)];
        for (a, e) in coeffs.iter().zip(expected.iter()) {
            assert!((a - e).norm() < 1e-13);
        }

        let d = ComplexMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 3.0)],
        ]);
        let coeffs = char_poly_coefficients(&d);
        let sum = c(2.0, 1.0) + c(-1.0, 3.0);
        let prod = c(2.0, 1.0) * c(-1.0, 3.0);
        assert!((coeffs[1] + sum).norm() < 1e-14);
        assert!((coeffs[2] - prod).norm() < 1e-14);
    }

    #[test]
    fn char_poly_leverrier_matches_minor_expansion() {
        // Compare the two routes on a block-diagonal 5×5 built from known
        // pieces so the exact answer is the product of small factors.
        let mut m = ComplexMatrix::zeros(5);
        m.set_principal_block(
            0,
            &ComplexMatrix::from_real_rows(&[&[7.0, 2.0], &[3.0, 1.0]]),
        );
        m.set_principal_block(
            2,
            &ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 3.0]]),
        );
        let coeffs = char_poly_coefficients(&m);
        // det(xI−M) = (x²−8x+1)(x−1)(x−2)(x−3)
        let poly = [1.0, -8.0, 1.0];
        let mut full = [0.0; 6];
        let mut acc = vec![1.0];
        for root in [1.0, 2.0, 3.0] {
            let mut next = vec![0.0; acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i] += a;
                next[i + 1] -= a * root;
            }
            acc = next;
        }
        for (i, &p) in poly.iter().enumerate() {
            for (j, &a) in acc.iter().enumerate() {
                full[i + j] += p * a;
            }
        }
        for (got, want) in coeffs.iter().zip(full.iter()) {
            assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-10);
        }
    }

    #[test]
    fn collection_product_example() {
        let coll = coll2(
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[3.0, 1.0]]),
        );
        let p = collection_product(&coll);
        assert!(p.approx_eq(
            &ComplexMatrix::from_real_rows(&[&[7.0, 2.0], &[3.0, 1.0]]),
            1e-15
        ));
    }

    #[test]
    fn collection_product_k2_matches_pairwise_grouping() {
        let config = EigenvalueConfig::new(2, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let ms = [
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[3.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[2.0, 5.0], &[0.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[7.0, 4.0]]),
        ];
        let coll = StokesCollection::new(config, ms.to_vec(), 0.1).unwrap();
        let grouped = &(&ms[0] * &ms[1]) * &(&ms[2] * &ms[3]);
        assert!(collection_product(&coll).approx_eq(&grouped, 1e-14));
    }

    #[test]
    fn canonical_gauge_example() {
        let coll = coll2(
            ComplexMatrix::from_real_rows(&[&[2.0, 4.0], &[0.0, 3.0]]),
            ComplexMatrix::from_real_rows(&[&[5.0, 0.0], &[6.0, 7.0]]),
        );
        let (canon, witness) = canonical_gauge(&coll).unwrap();
        let expected0 = ComplexMatrix::from_real_rows(&[&[1.0, 4.0 / 3.0], &[0.0, 1.0]]);
        let expected1 = ComplexMatrix::from_real_rows(&[&[10.0, 0.0], &[18.0, 21.0]]);
        assert!(canon.matrix(0).approx_eq(&expected0, 1e-14));
        assert!(canon.matrix(1).approx_eq(&expected1, 1e-14));
        assert!((witness.diagonals[1][0] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((witness.diagonals[1][1] - c(3.0, 0.0)).norm() < 1e-14);
        // The last diagonal carries the per-index products.
        assert!((canon.matrix(1)[(0, 0)] - c(10.0, 0.0)).norm() < 1e-14);
        assert!((canon.matrix(1)[(1, 1)] - c(21.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn canonical_gauge_identity_cases() {
        let coll = coll2(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
        let (canon, witness) = canonical_gauge(&coll).unwrap();
        assert!(canon.matrix(0).approx_eq(&ComplexMatrix::identity(2), 0.0));
        assert!(canon.matrix(1).approx_eq(&ComplexMatrix::identity(2), 0.0));
        assert_eq!(witness, GaugeWitness::identity(1, 2));

        // Already unipotent except the last: unchanged.
        let coll = coll2(
            ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[4.0, 0.0], &[2.0, 9.0]]),
        );
        let (canon, witness) = canonical_gauge(&coll).unwrap();
        assert!(canon.max_rel_diff(&coll) < 1e-15);
        assert_eq!(witness, GaugeWitness::identity(1, 2));
    }

    #[test]
    fn canonical_gauge_idempotent() {
        let coll = coll2(
            ComplexMatrix::from_rows(&[
                vec![c(2.0, 1.0), c(0.3, -0.4)],
                vec![c(0.0, 0.0), c(1.0, -1.5)],
            ]),
            ComplexMatrix::from_rows(&[
                vec![c(0.8, 0.0), c(0.0, 0.0)],
                vec![c(-1.0, 2.0), c(0.0, 1.2)],
            ]),
        );
        let (once, _) = canonical_gauge(&coll).unwrap();
        let (twice, w2) = canonical_gauge(&once).unwrap();
        assert!(once.max_rel_diff(&twice) < 1e-14);
        assert_eq!(w2, GaugeWitness::identity(1, 2));
    }

    #[test]
    fn gauge_equivalent_solved_example() {
        let a = coll2(
            ComplexMatrix::from_real_rows(&[&[1.0, 3.0], &[0.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[4.0, 1.0]]),
        );
        let b = coll2(
            ComplexMatrix::from_real_rows(&[&[1.0, 6.0], &[0.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[2.0, 1.0]]),
        );
        let (eq, witness) = gauge_equivalent(&a, &b).unwrap();
        assert!(eq);
        let witness = witness.unwrap();
        assert!(witness.validates(&a, &b, 1e-12));
        // Up to one scalar per connected component the witness is
        // D₁ = D₂ ∝ diag(2, 1).
        let d1 = &witness.diagonals[0];
        let d2 = &witness.diagonals[1];
        assert!((d1[0] / d1[1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((d2[0] / d2[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gauge_equivalent_reflexive_and_pattern_mismatch() {
        let a = coll2(
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]),
            ComplexMatrix::identity(2),
        );
        let (eq, witness) = gauge_equivalent(&a, &a).unwrap();
        assert!(eq);
        assert!(witness.unwrap().validates(&a, &a, 1e-12));

        let b = coll2(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
        let (eq, witness) = gauge_equivalent(&a, &b).unwrap();
        assert!(!eq);
        assert!(witness.is_none());
    }

    #[test]
    fn gauge_equivalent_shape_mismatch() {
        let a = coll2(ComplexMatrix::identity(2), ComplexMatrix::identity(2));
        let config3 =
            EigenvalueConfig::new(1, vec![c(2.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let b = StokesCollection::new(
            config3,
            vec![ComplexMatrix::identity(3), ComplexMatrix::identity(3)],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            gauge_equivalent(&a, &b),
            Err(AlgebraError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn collection_rejects_wrong_triangularity() {
        let err = StokesCollection::new(
            two_eig_config(),
            vec![
                ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[2.0, 1.0]]),
                ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[3.0, 1.0]]),
            ],
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, AlgebraError::NotTriangular { matrix: 0, .. }));
    }

    #[test]
    fn collection_rejects_wrong_count() {
        let err = StokesCollection::new(two_eig_config(), vec![ComplexMatrix::identity(2)], 0.0)
            .unwrap_err();
        assert!(matches!(
            err,
            AlgebraError::WrongMatrixCount {
                expected: 2,
                got: 1
            }
        ));
    }
}
