//! Dissimilarities between discretized transforms, pooled distance
//! matrices, and the within-group loss statistic driving the tests.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::transform::{ECTMatrix, SECTMatrix};

/// Distance between two discretized smooth transforms: the largest
/// per-direction Euclidean row distance,
/// `sup_p sqrt(Σ_q |a[p,q] - b[p,q]|²)`. No level-spacing weight is
/// applied; the sum runs over the raw sampled values.
pub fn sect_distance(a: &SECTMatrix, b: &SECTMatrix) -> Result<f64> {
    if !a.same_grids(b) {
        return Err(Error::IncompatibleGrids(
            "transform matrices live on different direction/level grids".into(),
        ));
    }
    let width = a.num_levels();
    let mut sup = 0.0f64;
    for p in 0..a.num_directions() {
        let mut sum = 0.0;
        for q in 0..width {
            let d = a.value(p, q) - b.value(p, q);
            sum += d * d;
        }
        sup = sup.max(sum.sqrt());
    }
    Ok(sup)
}

/// Same form as [`sect_distance`], applied to integer curve matrices.
pub fn ect_distance(a: &ECTMatrix, b: &ECTMatrix) -> Result<f64> {
    if !a.same_grids(b) {
        return Err(Error::IncompatibleGrids(
            "transform matrices live on different direction/level grids".into(),
        ));
    }
    let width = a.num_levels();
    let mut sup = 0.0f64;
    for p in 0..a.num_directions() {
        let mut sum = 0.0;
        for q in 0..width {
            let d = (a.value(p, q) - b.value(p, q)) as f64;
            sum += d * d;
        }
        sup = sup.max(sum.sqrt());
    }
    Ok(sup)
}

/// Symmetric nonnegative matrix of all pairwise transform distances in a
/// pooled sample. Computed once; label permutations never change it.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry, zero diagonal, nonnegativity, and the triangle
    /// inequality (within 1e-9) on a strided sample of triples.
    pub fn from_entries(size: usize, entries: Vec<f64>) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidArgument(
                "distance matrix needs at least 2 points".into(),
            ));
        }
        if entries.len() != size * size {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} entries for size {size}",
                entries.len()
            )));
        }
        for i in 0..size {
            if entries[i * size + i] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry ({i}, {i}) is {}, not 0",
                    entries[i * size + i]
                )));
            }
            for j in 0..i {
                let d = entries[i * size + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) is {d}"
                    )));
                }
                if d != entries[j * size + i] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let matrix = Self { size, entries };
        matrix.check_triangle_sample()?;
        Ok(matrix)
    }

    fn check_triangle_sample(&self) -> Result<()> {
        let n = self.size;
        // Stride so roughly a thousand triples get checked.
        let total = n * n * n;
        let stride = (total / 1000).max(1);
        let mut checked = 0usize;
        let mut idx = 0usize;
        while checked < 1000 {
            let (i, rest) = (idx / (n * n), idx % (n * n));
            if i >= n {
                break;
            }
            let (j, k) = (rest / n, rest % n);
            let (a, b, c) = (self.get(i, j), self.get(j, k), self.get(i, k));
            if c > a + b + 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "triangle inequality violated on ({i}, {j}, {k}): {c} > {a} + {b}"
                )));
            }
            checked += 1;
            idx += stride;
        }
        Ok(())
    }

    fn from_pairwise<F>(count: usize, distance: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync,
    {
        if count < 2 {
            return Err(Error::InvalidArgument(
                "need at least 2 transforms for pairwise distances".into(),
            ));
        }
        let pairs: Vec<(usize, usize)> = (0..count)
            .flat_map(|i| ((i + 1)..count).map(move |j| (i, j)))
            .collect();
        let computed: Result<Vec<f64>> = pairs
            .par_iter()
            .map(|&(i, j)| distance(i, j))
            .collect();
        let computed = computed?;
        let mut entries = vec![0.0; count * count];
        for (&(i, j), &d) in pairs.iter().zip(&computed) {
            entries[i * count + j] = d;
            entries[j * count + i] = d;
        }
        Ok(Self {
            size: count,
            entries,
        })
    }

    pub fn from_sect(transforms: &[SECTMatrix]) -> Result<Self> {
        Self::from_pairwise(transforms.len(), |i, j| {
            sect_distance(&transforms[i], &transforms[j])
        })
    }

    pub fn from_ect(transforms: &[ECTMatrix]) -> Result<Self> {
        Self::from_pairwise(transforms.len(), |i, j| {
            ect_distance(&transforms[i], &transforms[j])
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Group assignment of a pooled sample, labels over {1, 2}. Both groups
/// must have at least two members; sizes may differ.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLabels {
    labels: Vec<u8>,
    counts: (usize, usize),
}

impl GroupLabels {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        let mut counts = (0usize, 0usize);
        for &l in &labels {
            match l {
                1 => counts.0 += 1,
                2 => counts.1 += 1,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "label {other} is not in {{1, 2}}"
                    )))
                }
            }
        }
        if counts.0 < 2 {
            return Err(Error::DegenerateGroup {
                group: 1,
                size: counts.0,
            });
        }
        if counts.1 < 2 {
            return Err(Error::DegenerateGroup {
                group: 2,
                size: counts.1,
            });
        }
        Ok(Self { labels, counts })
    }

    /// First `n1` members labeled 1, the next `n2` labeled 2.
    pub fn two_blocks(n1: usize, n2: usize) -> Result<Self> {
        let mut labels = vec![1u8; n1];
        labels.extend(std::iter::repeat(2u8).take(n2));
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn counts(&self) -> (usize, usize) {
        self.counts
    }

    /// Member indices of each group, ascending.
    pub fn members(&self) -> (Vec<usize>, Vec<usize>) {
        let mut g1 = Vec::with_capacity(self.counts.0);
        let mut g2 = Vec::with_capacity(self.counts.1);
        for (idx, &l) in self.labels.iter().enumerate() {
            if l == 1 {
                g1.push(idx);
            } else {
                g2.push(idx);
            }
        }
        (g1, g2)
    }
}

/// Within-group loss: for each group, the mean pairwise distance over
/// ordered member pairs with the `1/(2 n_j (n_j - 1))` normalization,
/// summed over both groups. Small values mean tight groups.
pub fn within_group_loss(dist: &DistanceMatrix, labels: &GroupLabels) -> Result<f64> {
    if labels.len() != dist.size() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for a distance matrix of size {}",
            labels.len(),
            dist.size()
        )));
    }
    let (g1, g2) = labels.members();
    Ok(split_loss(dist, &g1, &g2))
}

/// Loss of an explicit split. Member lists are sorted internally so the
/// summation order (and hence the floating-point result) depends only on
/// the split as a set, letting identical splits compare exactly equal in
/// the permutation loop.
pub(crate) fn split_loss(dist: &DistanceMatrix, group1: &[usize], group2: &[usize]) -> f64 {
    let mut total = 0.0;
    for members in [group1, group2] {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let m = sorted.len();
        let mut sum = 0.0;
        for a in 0..m {
            for b in (a + 1)..m {
                sum += dist.get(sorted[a], sorted[b]);
            }
        }
        // Ordered pairs count each unordered pair twice; combined with the
        // 1/(2 m (m-1)) prefactor this is sum / (m (m-1)).
        total += sum / (m * (m - 1)) as f64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{DirectionGrid, LevelGrid};

    fn sect_matrix(rows: &[Vec<f64>]) -> SECTMatrix {
        let dirs = DirectionGrid::uniform(rows.len()).unwrap();
        let levels = LevelGrid::uniform(rows[0].len(), 3.0).unwrap();
        SECTMatrix::new(rows.concat(), dirs, levels).unwrap()
    }

    fn ect_matrix(rows: &[Vec<i64>]) -> ECTMatrix {
        let dirs = DirectionGrid::uniform(rows.len()).unwrap();
        let levels = LevelGrid::uniform(rows[0].len(), 3.0).unwrap();
        ECTMatrix::new(rows.concat(), dirs, levels).unwrap()
    }

    #[test]
    fn distance_to_self_is_zero() {
        let a = sect_matrix(&[vec![1.5, -2.0], vec![0.25, 4.0]]);
        assert_eq!(sect_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn distance_is_symmetric() {
        let a = sect_matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = sect_matrix(&[vec![0.5, 2.5], vec![2.0, 7.0]]);
        assert_eq!(
            sect_distance(&a, &b).unwrap(),
            sect_distance(&b, &a).unwrap()
        );
    }

    #[test]
    fn two_by_two_hand_case() {
        // Rows differ by (3, 4) and (1, 1): sup(5, sqrt 2) = 5.
        let a = sect_matrix(&[vec![3.0, 4.0], vec![1.0, 1.0]]);
        let b = sect_matrix(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(sect_distance(&a, &b).unwrap(), 5.0);

        let ea = ect_matrix(&[vec![3, 4], vec![1, 1]]);
        let eb = ect_matrix(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(ect_distance(&ea, &eb).unwrap(), 5.0);
        assert_eq!(ect_distance(&ea, &ea).unwrap(), 0.0);
        assert_eq!(
            ect_distance(&ea, &eb).unwrap(),
            ect_distance(&eb, &ea).unwrap()
        );
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = sect_matrix(&[vec![1.0, 2.0]]);
        let dirs = DirectionGrid::uniform(1).unwrap();
        let levels = LevelGrid::uniform(2, 4.0).unwrap();
        let b = SECTMatrix::new(vec![1.0, 2.0], dirs, levels).unwrap();
        assert!(matches!(
            sect_distance(&a, &b),
            Err(Error::IncompatibleGrids(_))
        ));
    }

    #[test]
    fn pairwise_of_identical_transforms_is_zero() {
        let a = sect_matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let matrix = DistanceMatrix::from_sect(&[a.clone(), a.clone(), a]).unwrap();
        assert!(matrix.entries().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn pairwise_matches_direct_calls_and_permutes_with_input() {
        let ms = [
            sect_matrix(&[vec![1.0, 0.0], vec![0.0, 0.0]]),
            sect_matrix(&[vec![0.0, 2.0], vec![0.0, 0.0]]),
            sect_matrix(&[vec![0.0, 0.0], vec![0.0, 3.0]]),
        ];
        let matrix = DistanceMatrix::from_sect(&ms).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(matrix.get(i, j), sect_distance(&ms[i], &ms[j]).unwrap());
            }
        }
        let swapped = [ms[1].clone(), ms[0].clone(), ms[2].clone()];
        let other = DistanceMatrix::from_sect(&swapped).unwrap();
        assert_eq!(other.get(0, 1), matrix.get(0, 1));
        assert_eq!(other.get(0, 2), matrix.get(1, 2));
        assert_eq!(other.get(1, 2), matrix.get(0, 2));
    }

    #[test]
    fn loss_of_zero_distances_is_zero() {
        let dist = DistanceMatrix::from_entries(4, vec![0.0; 16]).unwrap();
        let labels = GroupLabels::two_blocks(2, 2).unwrap();
        assert_eq!(within_group_loss(&dist, &labels).unwrap(), 0.0);
    }

    #[test]
    fn loss_of_two_pairs() {
        // Groups {0,1} and {2,3} with within-distances d1 = 3, d2 = 5.
        let mut entries = vec![0.0; 16];
        let mut set = |i: usize, j: usize, d: f64| {
            entries[i * 4 + j] = d;
            entries[j * 4 + i] = d;
        };
        set(0, 1, 3.0);
        set(2, 3, 5.0);
        set(0, 2, 4.0);
        set(0, 3, 4.0);
        set(1, 2, 4.0);
        set(1, 3, 4.0);
        let dist = DistanceMatrix::from_entries(4, entries).unwrap();
        let labels = GroupLabels::two_blocks(2, 2).unwrap();
        assert_eq!(within_group_loss(&dist, &labels).unwrap(), 3.0 / 2.0 + 5.0 / 2.0);
    }

    #[test]
    fn loss_invariant_under_label_swap() {
        let entries: Vec<f64> = (0..36)
            .map(|k| {
                let (i, j) = (k / 6, k % 6);
                if i == j {
                    0.0
                } else {
                    ((i + j) as f64).sqrt() + (i as f64 - j as f64).abs()
                }
            })
            .collect();
        // Symmetrize explicitly.
        let mut sym = entries.clone();
        for i in 0..6 {
            for j in 0..6 {
                sym[i * 6 + j] = entries[i.min(j) * 6 + i.max(j)];
            }
        }
        let dist = DistanceMatrix::from_entries(6, sym).unwrap();
        let labels = GroupLabels::new(vec![1, 2, 1, 2, 2, 1]).unwrap();
        let swapped = GroupLabels::new(vec![2, 1, 2, 1, 1, 2]).unwrap();
        assert_eq!(
            within_group_loss(&dist, &labels).unwrap(),
            within_group_loss(&dist, &swapped).unwrap()
        );
    }

    #[test]
    fn degenerate_group_rejected() {
        assert!(matches!(
            GroupLabels::new(vec![1, 2, 2, 2]),
            Err(Error::DegenerateGroup { group: 1, size: 1 })
        ));
        assert!(matches!(
            GroupLabels::two_blocks(2, 0),
            Err(Error::DegenerateGroup { group: 2, size: 0 })
        ));
    }

    #[test]
    fn triangle_violation_rejected() {
        let mut entries = vec![0.0; 9];
        let mut set = |i: usize, j: usize, d: f64| {
            entries[i * 3 + j] = d;
            entries[j * 3 + i] = d;
        };
        set(0, 1, 1.0);
        set(1, 2, 1.0);
        set(0, 2, 10.0);
        assert!(DistanceMatrix::from_entries(3, entries).is_err());
    }
}
