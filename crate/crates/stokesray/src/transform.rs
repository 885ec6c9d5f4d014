//! Transformation of a Stokes collection across separating rays.
//!
//! Crossing the next separating ray `e^{iφ}ℝ⁺` counterclockwise rewrites
//! every matrix as
//!
//! ```text
//! C̃(j) = P · U(j)⁻¹ · C(j) · U(j+1) · P        (indices mod 2k)
//! ```
//!
//! where `P` is the block permutation matrix of the partition `m̄` read off
//! on the ray, and `U(j)` is block diagonal with identity blocks on s-slots
//! and the diagonal r-blocks of `C(j)` on r-slots. The eigenvalue order is
//! updated by reversing each r-block, and the starting ray advances into the
//! next open arc.

use num_complex::Complex64;

use crate::algebra::{
    char_poly_coefficients, collection_product, gauge_equivalent, partition_matrix, AlgebraError,
    GaugeWitness, Partition, StokesCollection,
};
use crate::angle::{ccw_distance, normalize};
use crate::geometry::{
    partition_in_order, separating_rays, EigenvalueConfig, GeometryError, RayCatalog,
    RotationDirection,
};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, thiserror::Error)]
pub enum TransformError {
    #[error("target angle {theta} rad is a separating ray")]
    TargetIsSeparating { theta: f64 },
    #[error("r-block at slot {slot} of C({}) is singular", matrix + 1)]
    SingularBlock { matrix: usize, slot: usize },
    #[error("walk history is empty, nothing to uncross")]
    EmptyHistory,
    #[error("the next separating ray carries a single block; nothing to decompose")]
    NotMultiBlock,
    #[error("perturbation too large: {detail}")]
    EpsilonTooLarge { detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Everything needed to replay or invert one ray crossing.
#[derive(Debug, Clone)]
pub struct CrossingRecord {
    /// Angle of the separating ray that was crossed.
    pub angle: f64,
    /// Pair set of the ray, in original eigenvalue indices.
    pub pairs: Vec<(usize, usize)>,
    /// Partition of the positions on the ray.
    pub partition: Partition,
    /// Position map applied to the order (`map[new] = old`), an involution.
    pub position_map: Vec<usize>,
    /// Starting angle before the crossing.
    pub from_angle: f64,
    /// Starting angle after the crossing.
    pub to_angle: f64,
    /// Left factors `U(j)` in index order.
    pub left_factors: Vec<ComplexMatrix>,
    /// Right factors `U(j+1)` in index order.
    pub right_factors: Vec<ComplexMatrix>,
}

/// A Stokes collection together with the crossings that produced it.
#[derive(Debug, Clone)]
pub struct WalkState {
    collection: StokesCollection,
    history: Vec<CrossingRecord>,
}

/// Clears cancellation noise from the half the crossing formula forces to
/// vanish: entries of the expected-zero triangle at or below the
/// classification threshold become exact zeros. Larger entries are kept so
/// that a genuinely broken matrix still fails validation loudly.
fn snap_triangular_zeros(m: &mut ComplexMatrix, index: usize, entry_tol: f64) {
    let threshold = entry_tol * m.max_abs().max(1.0);
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let structural_zero = if index.is_multiple_of(2) {
                i > j
            } else {
                i < j
            };
            if structural_zero && m[(i, j)].norm() <= threshold {
                m[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Block-diagonal factor `diag(I_{s₁}, M_{2,2}, I_{s₃}, …)` of a matrix.
fn u_factor(m: &ComplexMatrix, partition: &Partition) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(m.dim());
    for (_, range) in partition.r_slots() {
        u.set_principal_block(range.start, &m.principal_block(range.start, range.len()));
    }
    u
}

fn u_factor_inverse(
    m: &ComplexMatrix,
    partition: &Partition,
    matrix_index: usize,
) -> Result<ComplexMatrix, TransformError> {
    let mut u = ComplexMatrix::identity(m.dim());
    for (slot, range) in partition.r_slots() {
        let block = m.principal_block(range.start, range.len());
        let inv = block.inverse().map_err(|_| TransformError::SingularBlock {
            matrix: matrix_index,
            slot,
        })?;
        u.set_principal_block(range.start, &inv);
    }
    Ok(u)
}

impl WalkState {
    pub fn new(collection: StokesCollection) -> Self {
        WalkState {
            collection,
            history: Vec::new(),
        }
    }

    pub fn collection(&self) -> &StokesCollection {
        &self.collection
    }

    pub fn history(&self) -> &[CrossingRecord] {
        &self.history
    }

    fn catalog(&self) -> Result<RayCatalog, GeometryError> {
        separating_rays(self.collection.config())
    }

    /// Crosses the next counterclockwise separating ray.
    pub fn cross_ray(&self) -> Result<WalkState, TransformError> {
        let coll = &self.collection;
        let config = coll.config();
        let angle_tol = config.tolerances().angle;
        let catalog = self.catalog()?;
        let theta = coll.starting_angle();
        let ray = catalog.next_separating(theta, RotationDirection::Counterclockwise, angle_tol);
        let phi = ray.angle;
        let partition = partition_in_order(config, coll.eigen_permutation(), phi)?;
        let k2 = coll.matrices().len();

        let p = partition_matrix(&partition);
        let mut left = Vec::with_capacity(k2);
        let mut left_inv = Vec::with_capacity(k2);
        for (j, m) in coll.matrices().iter().enumerate() {
            left.push(u_factor(m, &partition));
            left_inv.push(u_factor_inverse(m, &partition, j)?);
        }
        let entry_tol = config.tolerances().entry;
        let new_matrices: Vec<ComplexMatrix> = (0..k2)
            .map(|j| {
                let right = &left[(j + 1) % k2];
                let mut m = &(&(&(&p * &left_inv[j]) * coll.matrix(j)) * right) * &p;
                snap_triangular_zeros(&mut m, j, entry_tol);
                m
            })
            .collect();

        let map = partition.position_reversal();
        let expected_perm: Vec<usize> = map
            .iter()
            .map(|&old| coll.eigen_permutation()[old])
            .collect();

        let next = catalog.next_separating(phi, RotationDirection::Counterclockwise, angle_tol);
        let gap = ccw_distance(phi, next.angle);
        let theta_new = normalize(phi + gap / 2.0);

        let record = CrossingRecord {
            angle: phi,
            pairs: ray.pairs.clone(),
            partition: partition.clone(),
            position_map: map,
            from_angle: theta,
            to_angle: theta_new,
            right_factors: (0..k2).map(|j| left[(j + 1) % k2].clone()).collect(),
            left_factors: left,
        };

        let new_collection = StokesCollection::new(config.clone(), new_matrices, theta_new)?;
        if new_collection.eigen_permutation() != expected_perm.as_slice() {
            return Err(GeometryError::InconsistentOrdering {
                detail: format!(
                    "order after crossing {phi} rad is {:?}, block reversal predicts {:?}",
                    new_collection.eigen_permutation(),
                    expected_perm
                ),
            }
            .into());
        }
        let mut history = self.history.clone();
        history.push(record);
        Ok(WalkState {
            collection: new_collection,
            history,
        })
    }

    /// Inverts the most recent crossing.
    ///
    /// The right factors are not taken from the record: the crossed
    /// collection still carries them, since `block(C̃(j), m̄, 2ℓ)` equals
    /// `J·C(j+1)_{2ℓ,2ℓ}·J`. Recovering them and inverting the crossing
    /// formula reconstructs the previous collection entrywise.
    pub fn uncross_ray(&self) -> Result<WalkState, TransformError> {
        let record = self.history.last().ok_or(TransformError::EmptyHistory)?;
        let coll = &self.collection;
        let config = coll.config();
        let k2 = coll.matrices().len();
        let partition = &record.partition;
        let p = partition_matrix(partition);

        // Recover C(j)'s r-blocks: the block at slot 2ℓ of C̃(j−1) is
        // J·C(j)_{2ℓ,2ℓ}·J, so C(j)_{2ℓ,2ℓ} = J·block(C̃(j−1))·J.
        let mut right_factors = Vec::with_capacity(k2);
        for j in 0..k2 {
            let source = coll.matrix((j + k2 - 1) % k2);
            let mut u = ComplexMatrix::identity(coll.n());
            for (_, range) in partition.r_slots() {
                let jm = ComplexMatrix::anti_identity(range.len());
                let tilde_block = source.principal_block(range.start, range.len());
                let original = &(&jm * &tilde_block) * &jm;
                u.set_principal_block(range.start, &original);
            }
            right_factors.push(u);
        }

        let entry_tol = config.tolerances().entry;
        let old_matrices: Vec<ComplexMatrix> = (0..k2)
            .map(|j| {
                let left = &right_factors[j];
                let right_inv = right_factors[(j + 1) % k2]
                    .inverse()
                    .map_err(|_| TransformError::SingularBlock { matrix: j, slot: 0 })?;
                let mut m = &(&(left * &(&p * coll.matrix(j))) * &p) * &right_inv;
                snap_triangular_zeros(&mut m, j, entry_tol);
                Ok(m)
            })
            .collect::<Result<_, TransformError>>()?;

        // C(j) = U(j) · P · C̃(j) · P · U(j+1)⁻¹, with U(j) = right_factors[j]
        // because the recovered blocks are exactly the U factors of the
        // original collection.
        let old_collection =
            StokesCollection::new(config.clone(), old_matrices, record.from_angle)?;
        let expected_perm: Vec<usize> = record
            .position_map
            .iter()
            .map(|&old| coll.eigen_permutation()[old])
            .collect();
        if old_collection.eigen_permutation() != expected_perm.as_slice() {
            return Err(GeometryError::InconsistentOrdering {
                detail: "uncross reached an unexpected eigenvalue order".into(),
            }
            .into());
        }
        let mut history = self.history.clone();
        history.pop();
        Ok(WalkState {
            collection: old_collection,
            history,
        })
    }

    /// Moves the starting ray to `theta_target`, crossing every separating
    /// ray in the counterclockwise arc between the current ray and the
    /// target (wrapping through 2π as needed).
    pub fn retarget(&self, theta_target: f64) -> Result<WalkState, TransformError> {
        let config = self.collection.config().clone();
        let angle_tol = config.tolerances().angle;
        let theta_target = normalize(theta_target);
        let catalog = self.catalog()?;
        if catalog.is_separating(theta_target, angle_tol) {
            return Err(TransformError::TargetIsSeparating {
                theta: theta_target,
            });
        }
        let start = self.collection.starting_angle();
        let span = ccw_distance(start, theta_target);
        let mut crossings: Vec<f64> = catalog
            .separating
            .iter()
            .map(|r| ccw_distance(start, r.angle))
            .filter(|&d| d > angle_tol && d < span)
            .collect();
        crossings.sort_by(f64::total_cmp);

        let mut state = self.clone();
        for &d in &crossings {
            state = state.cross_ray()?;
            let crossed = state.history.last().expect("crossing recorded").angle;
            debug_assert!(
                ccw_distance(start, crossed) - d < 1e-9,
                "walk crossed an unexpected ray"
            );
        }
        // Park the starting ray exactly on the target; it lies in the same
        // arc as the post-crossing midpoint, so the order is unchanged.
        let perm_before = state.collection.eigen_permutation().to_vec();
        let collection =
            StokesCollection::new(config, state.collection.matrices().to_vec(), theta_target)?;
        if collection.eigen_permutation() != perm_before.as_slice() {
            return Err(GeometryError::InconsistentOrdering {
                detail: format!("target {theta_target} rad is not in the arc reached by the walk"),
            }
            .into());
        }
        Ok(WalkState {
            collection,
            history: state.history,
        })
    }

    /// Crosses every separating ray exactly once, returning to the original
    /// starting ray after a full 2π turn.
    pub fn full_turn(&self) -> Result<WalkState, TransformError> {
        let catalog = self.catalog()?;
        let theta = self.collection.starting_angle();
        let mut state = self.clone();
        for _ in 0..catalog.separating.len() {
            state = state.cross_ray()?;
        }
        let perm_before = state.collection.eigen_permutation().to_vec();
        let collection = StokesCollection::new(
            self.collection.config().clone(),
            state.collection.matrices().to_vec(),
            theta,
        )?;
        if collection.eigen_permutation() != perm_before.as_slice() {
            return Err(GeometryError::InconsistentOrdering {
                detail: "full turn did not return to the starting arc".into(),
            }
            .into());
        }
        Ok(WalkState {
            collection,
            history: state.history,
        })
    }

    /// Conjugation-invariant summary of the collection: characteristic
    /// polynomial coefficients of `C(1)⋯C(2k)`. Invariant under crossings
    /// because the crossing formula telescopes into a similarity.
    pub fn monodromy_invariants(&self) -> Vec<Complex64> {
        char_poly_coefficients(&collection_product(&self.collection))
    }

    /// Retargets by `π/k` and tests gauge equivalence against the original
    /// collection with indices shifted by one and positions relabeled by the
    /// accumulated permutation.
    pub fn half_turn_check(&self) -> Result<(bool, Option<GaugeWitness>), TransformError> {
        let coll = &self.collection;
        let k = coll.k();
        let k2 = coll.matrices().len();
        let theta2 = normalize(coll.starting_angle() + std::f64::consts::PI / k as f64);
        let walked = self.retarget(theta2)?;

        // map[new] = old position holding the same eigenvalue.
        let sigma = coll.eigen_permutation();
        let sigma2 = walked.collection.eigen_permutation();
        let map: Vec<usize> = sigma2
            .iter()
            .map(|&eig| sigma.iter().position(|&e| e == eig).expect("permutation"))
            .collect();
        let expected_matrices: Vec<ComplexMatrix> = (0..k2)
            .map(|j| coll.matrix((j + 1) % k2).reindexed(&map))
            .collect();
        let expected = StokesCollection::new(coll.config().clone(), expected_matrices, theta2)?;
        Ok(gauge_equivalent(&expected, &walked.collection)?)
    }

    /// Splits a multi-block crossing by rotating the eigenvalues of each
    /// extra block by `e^{i·ℓ·ε}` (both signs of ε), performs the resulting
    /// single-block crossings sequentially, and compares both compositions
    /// with the direct multi-block crossing. The passages commute, so all
    /// three collections must agree within a tolerance scaled by ε.
    pub fn perturbed_composition_check(&self, epsilon: f64) -> Result<bool, TransformError> {
        let coll = &self.collection;
        let config = coll.config();
        let k = config.k();
        let angle_tol = config.tolerances().angle;
        let catalog = self.catalog()?;
        let theta = coll.starting_angle();
        let ray = catalog.next_separating(theta, RotationDirection::Counterclockwise, angle_tol);
        let phi = ray.angle;
        let partition = partition_in_order(config, coll.eigen_permutation(), phi)?;
        let blocks = partition.r_slots();
        let m = blocks.len();
        if m < 2 {
            return Err(TransformError::NotMultiBlock);
        }

        let next = catalog.next_separating(phi, RotationDirection::Counterclockwise, angle_tol);
        let arc_before = ccw_distance(theta, phi);
        let arc_after = ccw_distance(phi, next.angle);
        let ray_spread = epsilon * (m as f64 - 1.0) / k as f64;
        if !epsilon.is_finite() || epsilon <= 0.0 || ray_spread >= 0.45 * arc_before.min(arc_after)
        {
            return Err(TransformError::EpsilonTooLarge {
                detail: format!(
                    "ε = {epsilon} spreads the split rays over {ray_spread} rad against arcs {arc_before} and {arc_after}"
                ),
            });
        }

        let direct = self.cross_ray()?;
        let theta_land = direct.collection.starting_angle();
        let tol = (epsilon * epsilon).max(1e3 * f64::EPSILON);

        for sign in [1.0, -1.0] {
            let mut lambdas = config.lambdas().to_vec();
            for (b, (_, range)) in blocks.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let rot = Complex64::from_polar(1.0, sign * epsilon * b as f64);
                for pos in range.clone() {
                    let eig = coll.eigen_permutation()[pos];
                    lambdas[eig] *= rot;
                }
            }
            let perturbed_config =
                EigenvalueConfig::with_tolerances(k, lambdas, config.tolerances())?;
            let perturbed =
                StokesCollection::new(perturbed_config, coll.matrices().to_vec(), theta)?;
            let walked = WalkState::new(perturbed).retarget(theta_land)?;
            if walked.history().len() != m {
                return Err(TransformError::EpsilonTooLarge {
                    detail: format!(
                        "split walk crossed {} rays, expected {m}",
                        walked.history().len()
                    ),
                });
            }
            if walked.collection.eigen_permutation() != direct.collection.eigen_permutation() {
                return Ok(false);
            }
            let diff = walked
                .collection
                .matrices()
                .iter()
                .zip(direct.collection.matrices())
                .map(|(a, b)| a.max_rel_diff(b))
                .fold(0.0, f64::max);
            if diff > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
