//! Permutation two-sample tests over pooled transform distances.
//!
//! The observed within-group loss is compared against the losses of
//! seeded random relabelings that preserve the group sizes. The null is
//! rejected when the observed loss falls strictly below the k*-th
//! smallest permuted loss, k* being the largest integer strictly below
//! `alpha * permutations`. Ties count toward non-rejection and toward
//! the p-value numerator, the conservative conventions.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{split_loss, DistanceMatrix, GroupLabels};
use crate::seeds::substream;
use crate::shape::{DirectionGrid, GridShape, LevelGrid};
use crate::transform::{ect, sect};

/// Stream-id component for permutation draws.
const STREAM_PERMUTATION: u64 = 0x70_65_72_6d;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
}

impl TestConfig {
    pub fn new(alpha: f64, permutations: usize, seed: u64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        if permutations == 0 {
            return Err(Error::InvalidArgument(
                "permutation count must be positive".into(),
            ));
        }
        if (alpha * permutations as f64).floor() < 1.0 {
            log::warn!(
                "alpha * permutations = {} < 1: the rejection threshold index degenerates \
                 and the test will error; increase the permutation count",
                alpha * permutations as f64
            );
        }
        Ok(Self {
            alpha,
            permutations,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Accept,
    Reject,
}

/// Outcome of one permutation test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub observed_loss: f64,
    pub permuted_losses: Vec<f64>,
    /// 1-based rank k* into the ascending permuted losses.
    pub threshold_index: usize,
    pub decision: Decision,
    /// `(1 + #{S_k <= S_0}) / (permutations + 1)`.
    pub p_value: f64,
}

/// Largest integer strictly smaller than `alpha * permutations`, as a
/// 1-based rank. Products within 1e-9 of an integer are treated as that
/// integer (0.05 * 300 evaluates to 15.000000000000002 in doubles) and
/// then decremented.
pub fn threshold_index(alpha: f64, permutations: usize) -> Result<usize> {
    let product = alpha * permutations as f64;
    let nearest = product.round();
    let k = if (product - nearest).abs() < 1e-9 {
        nearest as i64 - 1
    } else {
        product.floor() as i64
    };
    if k < 1 {
        return Err(Error::DegenerateThreshold { product });
    }
    Ok(k as usize)
}

/// Runs the permutation test on a precomputed distance matrix.
///
/// Deterministic given `(dist, labels, config.seed)`: permutation `k`
/// draws its relabeling from an independent substream of the seed, so the
/// result does not depend on execution order or worker count.
pub fn permutation_test(
    dist: &DistanceMatrix,
    labels: &GroupLabels,
    config: &TestConfig,
) -> Result<TestResult> {
    if labels.len() != dist.size() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for a distance matrix of size {}",
            labels.len(),
            dist.size()
        )));
    }
    let k_star = threshold_index(config.alpha, config.permutations)?;

    let (g1, g2) = labels.members();
    let observed = split_loss(dist, &g1, &g2);

    let n = labels.len();
    let n1 = labels.counts().0;
    let permuted: Vec<f64> = (1..=config.permutations as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(config.seed, &[STREAM_PERMUTATION, k]);
            let mut indices: Vec<usize> = (0..n).collect();
            indices.shuffle(&mut rng);
            let (a, b) = indices.split_at(n1);
            split_loss(dist, a, b)
        })
        .collect();

    let mut sorted = permuted.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let threshold = sorted[k_star - 1];
    let decision = if observed < threshold {
        Decision::Reject
    } else {
        Decision::Accept
    };
    let at_most_observed = permuted.iter().filter(|&&loss| loss <= observed).count();
    let p_value = (1 + at_most_observed) as f64 / (config.permutations + 1) as f64;

    Ok(TestResult {
        observed_loss: observed,
        permuted_losses: permuted,
        threshold_index: k_star,
        decision,
        p_value,
    })
}

fn check_group_sizes(group1: &[GridShape], group2: &[GridShape]) -> Result<()> {
    if group1.len() < 2 {
        return Err(Error::DegenerateGroup {
            group: 1,
            size: group1.len(),
        });
    }
    if group2.len() < 2 {
        return Err(Error::DegenerateGroup {
            group: 2,
            size: group2.len(),
        });
    }
    Ok(())
}

/// End-to-end smooth-transform test between two shape collections.
pub fn sect_test(
    group1: &[GridShape],
    group2: &[GridShape],
    directions: &DirectionGrid,
    levels: &LevelGrid,
    config: &TestConfig,
) -> Result<TestResult> {
    check_group_sizes(group1, group2)?;
    let pooled: Vec<&GridShape> = group1.iter().chain(group2.iter()).collect();
    let matrices = pooled
        .par_iter()
        .map(|shape| sect(shape, directions, levels))
        .collect::<Result<Vec<_>>>()?;
    let dist = DistanceMatrix::from_sect(&matrices)?;
    let labels = GroupLabels::two_blocks(group1.len(), group2.len())?;
    permutation_test(&dist, &labels, config)
}

/// End-to-end integer-curve test between two shape collections.
pub fn ect_test(
    group1: &[GridShape],
    group2: &[GridShape],
    directions: &DirectionGrid,
    levels: &LevelGrid,
    config: &TestConfig,
) -> Result<TestResult> {
    check_group_sizes(group1, group2)?;
    let pooled: Vec<&GridShape> = group1.iter().chain(group2.iter()).collect();
    let matrices = pooled
        .par_iter()
        .map(|shape| ect(shape, directions, levels))
        .collect::<Result<Vec<_>>>()?;
    let dist = DistanceMatrix::from_ect(&matrices)?;
    let labels = GroupLabels::two_blocks(group1.len(), group2.len())?;
    permutation_test(&dist, &labels, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Frame;

    fn cluster_matrix(n1: usize, n2: usize, within: f64, between: f64) -> DistanceMatrix {
        let n = n1 + n2;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let same = (i < n1) == (j < n1);
                entries[i * n + j] = if same { within } else { between };
            }
        }
        DistanceMatrix::from_entries(n, entries).unwrap()
    }

    #[test]
    fn threshold_index_literal_reading() {
        // 0.05 * 999 = 49.95 -> 49; 0.05 * 300 = 15 exactly -> 14.
        assert_eq!(threshold_index(0.05, 999).unwrap(), 49);
        assert_eq!(threshold_index(0.05, 300).unwrap(), 14);
        assert_eq!(threshold_index(0.05, 20000).unwrap(), 999);
        assert!(matches!(
            threshold_index(0.05, 10),
            Err(Error::DegenerateThreshold { .. })
        ));
    }

    #[test]
    fn all_zero_distances_accept_with_p_one() {
        let dist = DistanceMatrix::from_entries(6, vec![0.0; 36]).unwrap();
        let labels = GroupLabels::two_blocks(3, 3).unwrap();
        for permutations in [40, 100, 999] {
            let config = TestConfig::new(0.05, permutations, 11).unwrap();
            let result = permutation_test(&dist, &labels, &config).unwrap();
            assert_eq!(result.decision, Decision::Accept);
            assert_eq!(result.p_value, 1.0);
            assert_eq!(result.observed_loss, 0.0);
        }
    }

    #[test]
    fn tight_clusters_reject() {
        let dist = cluster_matrix(5, 5, 0.01, 10.0);
        let labels = GroupLabels::two_blocks(5, 5).unwrap();
        let config = TestConfig::new(0.05, 999, 20240511).unwrap();
        let result = permutation_test(&dist, &labels, &config).unwrap();
        assert_eq!(result.decision, Decision::Reject);
        assert!(result.p_value <= 0.01, "p = {}", result.p_value);

        // Exhaustive check over all C(10,5) = 252 ordered splits (126
        // unordered): only the original split and its mirror reach a loss
        // this small, so the exact p-value is 2/252.
        let observed = result.observed_loss;
        let mut le = 0usize;
        let mut total = 0usize;
        for bits in 0u32..(1 << 10) {
            if bits.count_ones() != 5 {
                continue;
            }
            let g1: Vec<usize> = (0..10).filter(|&i| bits >> i & 1 == 1).collect();
            let g2: Vec<usize> = (0..10).filter(|&i| bits >> i & 1 == 0).collect();
            if split_loss(&dist, &g1, &g2) <= observed {
                le += 1;
            }
            total += 1;
        }
        assert_eq!(total, 252);
        assert_eq!(le, 2);
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let dist = cluster_matrix(4, 6, 0.5, 2.0);
        let labels = GroupLabels::two_blocks(4, 6).unwrap();
        let config = TestConfig::new(0.1, 200, 777).unwrap();
        let a = permutation_test(&dist, &labels, &config).unwrap();
        let b = permutation_test(&dist, &labels, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rank_invariance_under_positive_scaling() {
        let dist = cluster_matrix(4, 4, 1.3, 2.1);
        let labels = GroupLabels::two_blocks(4, 4).unwrap();
        let config = TestConfig::new(0.2, 400, 99).unwrap();
        let base = permutation_test(&dist, &labels, &config).unwrap();
        for c in [0.25, 2.0, 3.7, 1e6] {
            let scaled_entries: Vec<f64> = dist.entries().iter().map(|&d| d * c).collect();
            let scaled = DistanceMatrix::from_entries(dist.size(), scaled_entries).unwrap();
            let result = permutation_test(&scaled, &labels, &config).unwrap();
            assert_eq!(result.decision, base.decision, "c = {c}");
            assert_eq!(result.p_value, base.p_value, "c = {c}");
        }
    }

    #[test]
    fn identical_groups_accept_end_to_end() {
        let frame = Frame::new(4.0, 1.0, (-1.0, -1.0)).unwrap();
        let shape = GridShape::new(2, 2, vec![true, true, false, true], frame).unwrap();
        let group: Vec<GridShape> = vec![shape.clone(), shape.clone(), shape.clone()];
        let dirs = DirectionGrid::uniform(4).unwrap();
        let levels = LevelGrid::uniform(10, 8.0).unwrap();
        let config = TestConfig::new(0.05, 99, 5).unwrap();
        let result = sect_test(&group, &group, &dirs, &levels, &config).unwrap();
        assert_eq!(result.decision, Decision::Accept);
        let result = ect_test(&group, &group, &dirs, &levels, &config).unwrap();
        assert_eq!(result.decision, Decision::Accept);
    }

    #[test]
    fn too_small_group_rejected() {
        let frame = Frame::new(4.0, 1.0, (-0.5, -0.5)).unwrap();
        let shape = GridShape::new(1, 1, vec![true], frame).unwrap();
        let dirs = DirectionGrid::uniform(2).unwrap();
        let levels = LevelGrid::uniform(4, 8.0).unwrap();
        let config = TestConfig::new(0.05, 99, 5).unwrap();
        let err = sect_test(
            &[shape.clone()],
            &[shape.clone(), shape.clone()],
            &dirs,
            &levels,
            &config,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateGroup { group: 1, size: 1 }));
    }
}
