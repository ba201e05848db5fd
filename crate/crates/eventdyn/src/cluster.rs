//! Agglomerative hierarchical clustering with Ward linkage on Euclidean
//! distances, dendrogram cutting, and per-cluster mean profiles.

use crate::error::{Error, Result};
use crate::ingest::CountryCode;

/// Symmetric pairwise distances between labeled rows, stored dense.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<CountryCode>,
    n: usize,
    /// Row-major n×n distances.
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Pairwise Euclidean distances between feature rows.
    pub fn from_rows(labels: &[CountryCode], rows: &[Vec<f64>]) -> Result<DistanceMatrix> {
        if labels.len() != rows.len() {
            return Err(Error::invalid("labels and rows differ in length"));
        }
        if rows.len() < 2 {
            return Err(Error::degenerate("need at least 2 rows to cluster"));
        }
        let dim = rows[0].len();
        for (label, row) in labels.iter().zip(rows) {
            if row.len() != dim {
                return Err(Error::invalid(format!("row for {label} has mismatched length")));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("row for {label} has a non-finite cell")));
            }
        }
        let n = rows.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        Ok(DistanceMatrix { labels: labels.to_vec(), n, d })
    }

    /// Wraps a precomputed distance matrix, validating symmetry, zero
    /// diagonal, finiteness and non-negativity.
    pub fn from_matrix(labels: &[CountryCode], d: &[Vec<f64>]) -> Result<DistanceMatrix> {
        let n = labels.len();
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("distance matrix shape does not match labels"));
        }
        if n < 2 {
            return Err(Error::degenerate("need at least 2 rows to cluster"));
        }
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            if d[i][i] != 0.0 {
                return Err(Error::invalid("distance matrix diagonal must be zero"));
            }
            for j in 0..n {
                let v = d[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid("distances must be finite and non-negative"));
                }
                if (v - d[j][i]).abs() > 1e-12 * v.abs().max(1.0) {
                    return Err(Error::invalid("distance matrix must be symmetric"));
                }
                flat[i * n + j] = v;
            }
        }
        Ok(DistanceMatrix { labels: labels.to_vec(), n, d: flat })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[CountryCode] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// Convenience wrapper over [`DistanceMatrix::from_rows`].
pub fn euclidean_distances(labels: &[CountryCode], rows: &[Vec<f64>]) -> Result<DistanceMatrix> {
    DistanceMatrix::from_rows(labels, rows)
}

/// One agglomeration step. Node ids: leaves are 0..n_leaves, the t-th merge
/// creates node n_leaves + t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    /// Leaves under the merged node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

/// Ward agglomeration via the Lance–Williams update on squared distances:
/// δ²(k, i∪j) = [(nᵢ+n_k)δ²(k,i) + (n_j+n_k)δ²(k,j) − n_k·δ²(i,j)] / (nᵢ+n_j+n_k).
/// Ties break toward the smallest (distance, i, j); reported heights are the
/// square roots.
pub fn ward_cluster(d: &DistanceMatrix) -> Result<Dendrogram> {
    if d.d.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("distances must be finite"));
    }
    let n = d.n;
    // Active clusters ordered by node id; new nodes are appended, so
    // positional order stays id order and the (i, j) tie-break is positional.
    struct Active {
        id: usize,
        size: usize,
        /// Squared distance to every other active cluster, by position.
        sq: Vec<f64>,
    }
    let mut active: Vec<Active> = (0..n)
        .map(|i| Active {
            id: i,
            size: 1,
            sq: (0..n).map(|j| d.get(i, j) * d.get(i, j)).collect(),
        })
        .collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                let sq = active[i].sq[j];
                if sq < best.0 {
                    best = (sq, i, j);
                }
            }
        }
        let (sq_ij, i, j) = best;
        let (ni, nj) = (active[i].size as f64, active[j].size as f64);
        let new_id = n + merges.len();
        merges.push(Merge {
            left: active[i].id,
            right: active[j].id,
            height: sq_ij.sqrt(),
            size: active[i].size + active[j].size,
        });

        let merged_sq: Vec<f64> = (0..active.len())
            .filter(|&k| k != i && k != j)
            .map(|k| {
                let nk = active[k].size as f64;
                ((ni + nk) * active[i].sq[k] + (nj + nk) * active[j].sq[k] - nk * sq_ij)
                    / (ni + nj + nk)
            })
            .collect();

        // Drop j first so i's position is still valid.
        let size = active[i].size + active[j].size;
        active.remove(j);
        active.remove(i);
        for (k, cluster) in active.iter_mut().enumerate() {
            cluster.sq.remove(j);
            cluster.sq.remove(i);
            cluster.sq.push(merged_sq[k]);
        }
        let mut sq = merged_sq;
        sq.push(0.0);
        active.push(Active { id: new_id, size, sq });
    }

    Ok(Dendrogram { n_leaves: n, merges })
}

/// Flat clustering over labeled leaves. Cluster ids run 1..=k, assigned by
/// order of first leaf appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<CountryCode>,
    pub cluster_ids: Vec<u32>,
}

impl ClusterAssignment {
    pub fn k(&self) -> u32 {
        self.cluster_ids.iter().copied().max().unwrap_or(0)
    }

    /// Leaf indices per cluster, in cluster-id order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k() as usize];
        for (leaf, &id) in self.cluster_ids.iter().enumerate() {
            members[id as usize - 1].push(leaf);
        }
        members
    }
}

/// Cuts the dendrogram into `k` clusters by undoing the last k−1 merges.
pub fn cut_dendrogram(
    dendrogram: &Dendrogram,
    labels: &[CountryCode],
    k: usize,
) -> Result<ClusterAssignment> {
    let n = dendrogram.n_leaves;
    if labels.len() != n {
        return Err(Error::invalid("labels do not match dendrogram leaves"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k must be in 1..={n}, got {k}")));
    }
    // Union the first n−k merges; the remaining roots are the clusters.
    let mut parent: Vec<usize> = (0..(2 * n - 1)).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (t, merge) in dendrogram.merges.iter().take(n - k).enumerate() {
        let node = n + t;
        let a = root(&mut parent, merge.left);
        let b = root(&mut parent, merge.right);
        parent[a] = node;
        parent[b] = node;
    }
    let mut ids = vec![0u32; n];
    let mut next = 0u32;
    let mut seen: Vec<(usize, u32)> = Vec::new();
    for (leaf, slot) in ids.iter_mut().enumerate() {
        let r = root(&mut parent, leaf);
        *slot = match seen.iter().find(|&&(node, _)| node == r) {
            Some(&(_, id)) => id,
            None => {
                next += 1;
                seen.push((r, next));
                next
            }
        };
    }
    Ok(ClusterAssignment { labels: labels.to_vec(), cluster_ids: ids })
}

/// Mean feature row per cluster, indexed by cluster id − 1.
pub fn cluster_profiles(assignment: &ClusterAssignment, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if rows.len() != assignment.cluster_ids.len() {
        return Err(Error::invalid("rows do not match assignment length"));
    }
    let dim = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::invalid("profile rows must share a dimension"));
    }
    let profiles = assignment
        .members()
        .iter()
        .map(|members| {
            let mut mean = vec![0.0; dim];
            for &leaf in members {
                for (m, v) in mean.iter_mut().zip(&rows[leaf]) {
                    *m += v;
                }
            }
            for m in &mut mean {
                *m /= members.len() as f64;
            }
            mean
        })
        .collect();
    Ok(profiles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<CountryCode> {
        (0..n)
            .map(|i| {
                let bytes = [b'A' + (i / 26) as u8, b'A' + (i % 26) as u8];
                CountryCode::new(std::str::from_utf8(&bytes).unwrap()).unwrap()
            })
            .collect()
    }

    #[test]
    fn euclidean_triangle() {
        let d = euclidean_distances(&labels(2), &[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn two_leaves_merge_at_their_distance() {
        let d = euclidean_distances(&labels(2), &[vec![0.0], vec![5.0]]).unwrap();
        let dg = ward_cluster(&d).unwrap();
        assert_eq!(dg.merges.len(), 1);
        let m = dg.merges[0];
        assert_eq!((m.left, m.right, m.size), (0, 1, 2));
        assert!((m.height - 5.0).abs() < 1e-12);
    }

    #[test]
    fn separation_forces_merge_order() {
        let d =
            euclidean_distances(&labels(3), &[vec![0.0], vec![1.0], vec![10.0]]).unwrap();
        let dg = ward_cluster(&d).unwrap();
        assert_eq!((dg.merges[0].left, dg.merges[0].right), (0, 1));
        // Second merge joins the pair-node (id 3) with leaf 2.
        assert_eq!((dg.merges[1].left, dg.merges[1].right), (2, 3));
        assert!(dg.merges[1].height > dg.merges[0].height);
    }

    #[test]
    fn cut_extremes_and_separated_pairs() {
        let rows = vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]];
        let lb = labels(4);
        let d = euclidean_distances(&lb, &rows).unwrap();
        let dg = ward_cluster(&d).unwrap();

        let all = cut_dendrogram(&dg, &lb, 1).unwrap();
        assert!(all.cluster_ids.iter().all(|&c| c == 1));

        let singletons = cut_dendrogram(&dg, &lb, 4).unwrap();
        assert_eq!(singletons.cluster_ids, vec![1, 2, 3, 4]);

        let two = cut_dendrogram(&dg, &lb, 2).unwrap();
        assert_eq!(two.cluster_ids, vec![1, 1, 2, 2]);

        assert!(cut_dendrogram(&dg, &lb, 0).is_err());
        assert!(cut_dendrogram(&dg, &lb, 5).is_err());
    }

    #[test]
    fn profiles_average_member_rows() {
        let rows = vec![vec![1.0, 3.0], vec![3.0, 5.0], vec![10.0, 10.0]];
        let assignment = ClusterAssignment {
            labels: labels(3),
            cluster_ids: vec![1, 1, 2],
        };
        let profiles = cluster_profiles(&assignment, &rows).unwrap();
        assert_eq!(profiles, vec![vec![2.0, 4.0], vec![10.0, 10.0]]);
    }

    #[test]
    fn precomputed_matrix_validation() {
        let lb = labels(2);
        assert!(DistanceMatrix::from_matrix(&lb, &[vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(DistanceMatrix::from_matrix(&lb, &[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_matrix(&lb, &[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(
            DistanceMatrix::from_matrix(&lb, &[vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err()
        );
    }

    #[test]
    fn heights_are_monotone() {
        // Deterministic non-trivial layout.
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![(i as f64 * 1.37).sin() * 3.0, (i as f64 * 0.91).cos() * 2.0])
            .collect();
        let lb = labels(8);
        let dg = ward_cluster(&euclidean_distances(&lb, &rows).unwrap()).unwrap();
        assert!(dg.merges.windows(2).all(|w| w[0].height <= w[1].height + 1e-12));
        assert_eq!(dg.merges.last().unwrap().size, 8);
    }
}
