//! Cluster assignments, scatter statistics, the scatter decomposition
//! identity, and a Lloyd's-algorithm baseline for two clusters.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::DataSet;
use crate::error::{Error, Result};

/// A hard assignment of every point to cluster 1 or cluster 2, with both
/// clusters nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ClusterAssignment {
    labels: Vec<u8>,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        for (j, &label) in labels.iter().enumerate() {
            if label != 1 && label != 2 {
                return Err(Error::InvalidLabel {
                    point: j + 1,
                    label,
                });
            }
        }
        for cluster in [1, 2] {
            if !labels.contains(&cluster) {
                return Err(Error::EmptyCluster(cluster));
            }
        }
        Ok(ClusterAssignment { labels })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Cluster sizes `[n1, n2]`.
    pub fn sizes(&self) -> [usize; 2] {
        let n1 = self.labels.iter().filter(|&&l| l == 1).count();
        [n1, self.labels.len() - n1]
    }

    /// The same bipartition with the labels exchanged.
    pub fn swapped(&self) -> ClusterAssignment {
        ClusterAssignment {
            labels: self.labels.iter().map(|&l| 3 - l).collect(),
        }
    }

    /// True when both assignments split the points the same way, labels
    /// aside.
    pub fn same_bipartition(&self, other: &ClusterAssignment) -> bool {
        self == other || *self == other.swapped()
    }
}

/// Cluster means and sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Centroids {
    pub mean: [Vec<f64>; 2],
    pub size: [usize; 2],
}

/// Per-cluster arithmetic means.
pub fn centroids(data: &DataSet, assignment: &ClusterAssignment) -> Result<Centroids> {
    if assignment.len() != data.len() {
        return Err(Error::AssignmentLength {
            expected: data.len(),
            got: assignment.len(),
        });
    }
    let dim = data.dim();
    let mut mean = [vec![0.0; dim], vec![0.0; dim]];
    let mut size = [0usize; 2];
    for (point, &label) in data.points().zip(assignment.labels()) {
        let c = (label - 1) as usize;
        size[c] += 1;
        for (f, &v) in point.iter().enumerate() {
            mean[c][f] += v;
        }
    }
    for c in 0..2 {
        if size[c] == 0 {
            return Err(Error::EmptyCluster(c as u8 + 1));
        }
        for v in &mut mean[c] {
            *v /= size[c] as f64;
        }
    }
    Ok(Centroids { mean, size })
}

/// Within-cluster, between-cluster, and total scatter of an assignment.
///
/// `s_b` is the ordered double sum over cluster pairs, so for two clusters
/// it equals `2 n1 n2 |mu1 - mu2|^2`, and the decomposition
/// `s_t = s_w + s_b / (2n)` holds for every valid assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterStats {
    pub s_w: f64,
    pub s_b: f64,
    pub s_t: f64,
    pub centroids: [Vec<f64>; 2],
    pub sizes: [usize; 2],
}

pub fn scatter_stats(data: &DataSet, assignment: &ClusterAssignment) -> Result<ScatterStats> {
    let Centroids { mean, size } = centroids(data, assignment)?;
    let dim = data.dim();

    let mut global = vec![0.0; dim];
    for point in data.points() {
        for (f, &v) in point.iter().enumerate() {
            global[f] += v;
        }
    }
    for v in &mut global {
        *v /= data.len() as f64;
    }

    let mut s_w = 0.0;
    let mut s_t = 0.0;
    for (point, &label) in data.points().zip(assignment.labels()) {
        s_w += dist_sq(point, &mean[(label - 1) as usize]);
        s_t += dist_sq(point, &global);
    }

    let mut s_b = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s_b += (size[i] * size[j]) as f64 * dist_sq(&mean[i], &mean[j]);
        }
    }

    Ok(ScatterStats {
        s_w,
        s_b,
        s_t,
        centroids: mean,
        sizes: size,
    })
}

/// The defect `s_t - s_w - s_b / (2n)` of the scatter decomposition;
/// zero up to rounding for every valid assignment.
pub fn anova_residual(data: &DataSet, assignment: &ClusterAssignment) -> Result<f64> {
    let stats = scatter_stats(data, assignment)?;
    Ok(stats.s_t - stats.s_w - stats.s_b / (2.0 * data.len() as f64))
}

/// Initial centroids for [`lloyd_kmeans`].
#[derive(Debug, Clone)]
pub enum LloydInit {
    /// Two distinct data points chosen pseudo-randomly from the seed.
    Seed(u64),
    /// Explicit centroids; must be distinct and match the data dimension.
    Centroids([Vec<f64>; 2]),
}

#[derive(Debug, Clone)]
pub struct LloydOutcome {
    pub assignment: ClusterAssignment,
    pub s_w: f64,
    /// Within-cluster scatter after each update step.
    pub s_w_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Lloyd's algorithm for two clusters: assign to the nearest centroid,
/// recompute means, repeat until the assignment is stable. An iteration
/// that empties a cluster reseeds that centroid to the point farthest
/// from its current centroid.
pub fn lloyd_kmeans(data: &DataSet, init: &LloydInit, max_iter: usize) -> Result<LloydOutcome> {
    if max_iter == 0 {
        return Err(Error::Lloyd("max_iter must be at least 1".to_string()));
    }
    let n = data.len();
    let mut centers = initial_centers(data, init)?;

    let mut labels = vec![0u8; n];
    let mut prev: Option<Vec<u8>> = None;
    let mut s_w_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..max_iter {
        assign_nearest(data, &centers, &mut labels);
        reseed_if_empty(data, &mut centers, &mut labels)?;

        if prev.as_deref() == Some(labels.as_slice()) {
            converged = true;
            break;
        }
        prev = Some(labels.clone());
        iterations += 1;

        for c in 0..2 {
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == c as u8 + 1).collect();
            for f in 0..data.dim() {
                centers[c][f] =
                    members.iter().map(|&j| data.point(j)[f]).sum::<f64>() / members.len() as f64;
            }
        }
        let s_w = (0..n)
            .map(|j| dist_sq(data.point(j), &centers[(labels[j] - 1) as usize]))
            .sum();
        s_w_trace.push(s_w);
    }

    let s_w = s_w_trace.last().copied().unwrap_or(0.0);
    Ok(LloydOutcome {
        assignment: ClusterAssignment::new(labels)?,
        s_w,
        s_w_trace,
        iterations,
        converged,
    })
}

fn initial_centers(data: &DataSet, init: &LloydInit) -> Result<[Vec<f64>; 2]> {
    match init {
        LloydInit::Seed(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let n = data.len();
            let first = rng.random_range(0..n);
            let offset = rng.random_range(0..n);
            // First point, in cyclic order from a random offset, that
            // differs from the first pick.
            let second = (0..n)
                .map(|k| (offset + k) % n)
                .find(|&j| data.point(j) != data.point(first))
                .ok_or_else(|| Error::Lloyd("all points are identical".to_string()))?;
            Ok([data.point(first).to_vec(), data.point(second).to_vec()])
        }
        LloydInit::Centroids(centers) => {
            for c in centers {
                if c.len() != data.dim() {
                    return Err(Error::Lloyd(format!(
                        "centroid dimension {} does not match data dimension {}",
                        c.len(),
                        data.dim()
                    )));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Lloyd("centroids must be finite".to_string()));
                }
            }
            if centers[0] == centers[1] {
                return Err(Error::Lloyd("initial centroids must be distinct".to_string()));
            }
            Ok(centers.clone())
        }
    }
}

fn assign_nearest(data: &DataSet, centers: &[Vec<f64>; 2], labels: &mut [u8]) {
    for (j, point) in data.points().enumerate() {
        let d1 = dist_sq(point, &centers[0]);
        let d2 = dist_sq(point, &centers[1]);
        labels[j] = if d1 <= d2 { 1 } else { 2 };
    }
}

fn reseed_if_empty(
    data: &DataSet,
    centers: &mut [Vec<f64>; 2],
    labels: &mut [u8],
) -> Result<()> {
    loop {
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        let empty = if n1 == 0 {
            0
        } else if n1 == labels.len() {
            1
        } else {
            return Ok(());
        };
        let (farthest, dist) = (0..data.len())
            .map(|j| (j, dist_sq(data.point(j), &centers[(labels[j] - 1) as usize])))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        if dist == 0.0 {
            return Err(Error::Lloyd(
                "cannot split identical points into two clusters".to_string(),
            ));
        }
        centers[empty] = data.point(farthest).to_vec();
        assign_nearest(data, centers, labels);
    }
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_blobs;

    fn one_d(values: &[f64]) -> DataSet {
        DataSet::from_points(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn centroids_of_known_split() {
        let data = one_d(&[-2.0, -1.0, 1.0, 2.0]);
        let a = ClusterAssignment::new(vec![1, 1, 2, 2]).unwrap();
        let c = centroids(&data, &a).unwrap();
        assert_eq!(c.mean[0], vec![-1.5]);
        assert_eq!(c.mean[1], vec![1.5]);
        assert_eq!(c.size, [2, 2]);
    }

    #[test]
    fn singleton_cluster_mean_is_the_point() {
        let data = gen_blobs(3, 2, &[0.0, 1.0], &[4.0, -2.0], 0.5, 5).unwrap();
        let a = ClusterAssignment::new(vec![2, 2, 1, 2, 2]).unwrap();
        let c = centroids(&data, &a).unwrap();
        assert_eq!(c.mean[0], data.point(2).to_vec());
    }

    #[test]
    fn centered_centroids_balance() {
        let data = gen_blobs(3, 5, &[-2.0, 1.0], &[1.5, -0.5], 0.7, 42).unwrap();
        let a = ClusterAssignment::new(vec![1, 2, 1, 2, 2, 1, 2, 2]).unwrap();
        let c = centroids(&data, &a).unwrap();
        let tol = 1e-9 * data.len() as f64 * data.max_abs();
        for f in 0..data.dim() {
            let balance = c.size[0] as f64 * c.mean[0][f] + c.size[1] as f64 * c.mean[1][f];
            assert!(balance.abs() <= tol, "imbalance {balance}");
        }
    }

    #[test]
    fn scatter_of_hand_worked_example() {
        let data = one_d(&[-2.0, -1.0, 1.0, 2.0]);
        let a = ClusterAssignment::new(vec![1, 1, 2, 2]).unwrap();
        let stats = scatter_stats(&data, &a).unwrap();
        assert_eq!(stats.s_w, 1.0);
        assert_eq!(stats.s_b, 72.0);
        assert_eq!(stats.s_t, 10.0);
        assert_eq!(anova_residual(&data, &a).unwrap(), 0.0);
    }

    #[test]
    fn identical_points_have_zero_scatter() {
        let data = DataSet::from_points(&vec![vec![2.0, -1.0]; 4]).unwrap();
        let a = ClusterAssignment::new(vec![1, 2, 1, 2]).unwrap();
        let stats = scatter_stats(&data, &a).unwrap();
        assert_eq!((stats.s_w, stats.s_b, stats.s_t), (0.0, 0.0, 0.0));
        assert_eq!(anova_residual(&data, &a).unwrap(), 0.0);
    }

    #[test]
    fn residual_vanishes_on_uncentered_data_too() {
        let data = DataSet::from_points(&[
            vec![3.0, 10.0],
            vec![5.0, 11.0],
            vec![4.5, 9.0],
            vec![7.0, 12.5],
            vec![6.0, 8.0],
        ])
        .unwrap();
        let a = ClusterAssignment::new(vec![1, 2, 1, 2, 1]).unwrap();
        let stats = scatter_stats(&data, &a).unwrap();
        let residual = anova_residual(&data, &a).unwrap();
        assert!(residual.abs() <= 1e-9 * stats.s_t.max(1.0), "residual {residual}");
    }

    #[test]
    fn assignment_validation() {
        assert!(matches!(
            ClusterAssignment::new(vec![1, 1, 3]),
            Err(Error::InvalidLabel { point: 3, label: 3 })
        ));
        assert!(matches!(
            ClusterAssignment::new(vec![1, 1, 1]),
            Err(Error::EmptyCluster(2))
        ));
    }

    #[test]
    fn swapped_is_the_same_bipartition() {
        let a = ClusterAssignment::new(vec![1, 2, 2, 1]).unwrap();
        let b = a.swapped();
        assert_eq!(b.labels(), &[2, 1, 1, 2]);
        assert!(a.same_bipartition(&b));
        let c = ClusterAssignment::new(vec![1, 1, 2, 2]).unwrap();
        assert!(!a.same_bipartition(&c));
    }

    #[test]
    fn lloyd_separates_well_separated_pairs() {
        let data = one_d(&[-10.0, -9.0, 9.0, 10.0]);
        let want = ClusterAssignment::new(vec![1, 1, 2, 2]).unwrap();
        for seed in 0..8 {
            let out = lloyd_kmeans(&data, &LloydInit::Seed(seed), 100).unwrap();
            assert!(out.assignment.same_bipartition(&want), "seed {seed}");
            assert!(out.converged);
        }
    }

    #[test]
    fn lloyd_scatter_is_monotone() {
        let data = gen_blobs(20, 20, &[-1.0, 0.0], &[1.0, 0.5], 1.5, 13).unwrap();
        let out = lloyd_kmeans(&data, &LloydInit::Seed(1), 100).unwrap();
        for w in out.s_w_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "s_w increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn lloyd_balances_unequal_overlapping_blobs() {
        // Lloyd cuts between the centroids, so heavily overlapping unequal
        // clusters come out much closer to balanced than the truth.
        let data = gen_blobs(60, 240, &[-1.0, 0.0], &[1.0, 0.0], 1.0, 99).unwrap();
        let out = lloyd_kmeans(&data, &LloydInit::Seed(3), 200).unwrap();
        let [n1, n2] = out.assignment.sizes();
        let spread = (n1 as i64 - n2 as i64).unsigned_abs() as usize;
        assert!(spread < 120, "sizes {n1}/{n2} not comparable");
    }

    #[test]
    fn lloyd_reseeds_an_emptied_cluster() {
        // Both initial centroids sit far left, so the first assignment
        // sends every point to centroid 1 and empties cluster 2.
        let data = one_d(&[0.0, 1.0, 10.0, 11.0]);
        let init = LloydInit::Centroids([vec![-100.0], vec![-90.0]]);
        let out = lloyd_kmeans(&data, &init, 100).unwrap();
        let want = ClusterAssignment::new(vec![1, 1, 2, 2]).unwrap();
        assert!(out.assignment.same_bipartition(&want));
    }

    #[test]
    fn lloyd_rejects_identical_points() {
        let data = DataSet::from_points(&vec![vec![1.0]; 5]).unwrap();
        assert!(matches!(
            lloyd_kmeans(&data, &LloydInit::Seed(0), 10),
            Err(Error::Lloyd(_))
        ));
    }

    #[test]
    fn lloyd_rejects_coincident_initial_centroids() {
        let data = one_d(&[0.0, 1.0, 2.0]);
        let init = LloydInit::Centroids([vec![1.0], vec![1.0]]);
        assert!(matches!(
            lloyd_kmeans(&data, &init, 10),
            Err(Error::Lloyd(_))
        ));
    }

    #[test]
    fn scatter_is_translation_invariant() {
        let data = gen_blobs(4, 5, &[-1.0, 2.0, 0.0], &[2.0, -1.0, 1.0], 0.8, 21).unwrap();
        let shifted = DataSet::from_points(
            &data
                .points()
                .map(|p| p.iter().map(|v| v + 17.25).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let a = ClusterAssignment::new(vec![1, 2, 1, 1, 2, 2, 1, 2, 2]).unwrap();
        let s0 = scatter_stats(&data, &a).unwrap();
        let s1 = scatter_stats(&shifted, &a).unwrap();
        assert!((s0.s_w - s1.s_w).abs() <= 1e-9 * s0.s_w.max(1.0));
        assert!((s0.s_b - s1.s_b).abs() <= 1e-9 * s0.s_b.max(1.0));
    }
}
