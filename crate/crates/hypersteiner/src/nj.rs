//! Neighbor-Joining baseline: infer an unrooted binary topology from the
//! hyperbolic distance matrix, then embed its internal nodes back into the
//! disk by fixed-topology gradient descent. Edge lengths produced by the
//! agglomeration are discarded; only the topology is kept.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::klein::{self, GaussianSpec, KleinPoint};
use crate::opt::{self, GdConfig};
use crate::solve::{Method, SolveResult};
use crate::tree::Tree;
use crate::triangulation;

/// Symmetric pairwise distances with a zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::InvalidSpec(format!(
                "distance matrix size {} for n = {n}",
                d.len()
            )));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::InvalidSpec("nonzero diagonal".into()));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() || v != d[j * n + i] {
                    return Err(Error::InvalidSpec("asymmetric or non-finite entry".into()));
                }
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn from_points(points: &[KleinPoint]) -> Self {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let dist = klein::distance(&points[i], &points[j]);
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// Unrooted binary tree shape over `n` leaves: node ids `0..n` are leaves
/// and `n..2n-2` are internal (degree 3 for n ≥ 3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub n_leaves: usize,
    pub n_internal: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Standard Neighbor Joining on the Q-criterion
/// `Q(i,j) = (m-2) d(i,j) - Σ_k d(i,k) - Σ_k d(j,k)`,
/// merging the minimizing pair (ties by lexicographic pair) until three
/// nodes remain, which are starred onto a final internal node.
pub fn nj_topology(dm: &DistanceMatrix) -> Result<Topology> {
    let n = dm.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }

    // Active nodes carry their tree-node id and a row of current distances.
    let mut ids: Vec<usize> = (0..n).collect();
    let mut dist: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dm.get(i, j)).collect()).collect();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(2 * n - 3);
    let mut next_id = n;

    while ids.len() > 3 {
        let m = ids.len();
        let sums: Vec<f64> = (0..m).map(|i| dist[i].iter().sum()).collect();
        let mut best = (f64::INFINITY, 0usize, 1usize);
        for i in 0..m {
            for j in i + 1..m {
                let q = (m as f64 - 2.0) * dist[i][j] - sums[i] - sums[j];
                if q < best.0 {
                    best = (q, i, j);
                }
            }
        }
        let (_, i, j) = best;
        edges.push((ids[i], next_id));
        edges.push((ids[j], next_id));

        // Reduced distances to the merged node.
        let dij = dist[i][j];
        let mut row: Vec<f64> = Vec::with_capacity(m - 1);
        for k in 0..m {
            if k != i && k != j {
                row.push(0.5 * (dist[i][k] + dist[j][k] - dij));
            }
        }
        // Remove j first (j > i), then i; append the merged node.
        for r in &mut dist {
            r.remove(j);
            r.remove(i);
        }
        dist.remove(j);
        dist.remove(i);
        ids.remove(j);
        ids.remove(i);
        row.push(0.0);
        for (k, r) in dist.iter_mut().enumerate() {
            r.push(row[k]);
        }
        dist.push(row);
        ids.push(next_id);
        next_id += 1;
    }

    for &id in &ids {
        edges.push((id, next_id));
    }
    let topo = Topology { n_leaves: n, n_internal: next_id + 1 - n, edges };
    debug_assert_eq!(topo.n_internal, n - 2);
    debug_assert_eq!(topo.edges.len(), 2 * n - 3);
    Ok(topo)
}

/// Embed the NJ topology of the terminals back into the disk: internal nodes
/// are initialized independently from a wrapped Gaussian at the origin with
/// standard deviation 0.1 and refined by fixed-topology gradient descent.
pub fn nj_embed(terminals: &[KleinPoint], seed: u64, gd: &GdConfig) -> Result<SolveResult> {
    let start = std::time::Instant::now();
    if terminals.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: terminals.len() });
    }
    let dm = DistanceMatrix::from_points(terminals);
    let topo = nj_topology(&dm)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init_spec = GaussianSpec::new(KleinPoint::ORIGIN, 0.1)?;
    let steiner: Vec<KleinPoint> = (0..topo.n_internal)
        .map(|_| klein::sample_wrapped_gaussian(&init_spec, &mut rng))
        .collect::<Result<_>>()?;

    let tree = Tree::new(terminals.to_vec(), steiner, topo.edges);
    let tree = opt::optimize_steiner(&tree, gd)?;
    let length = tree.length();
    let mst_length = triangulation::mst(terminals)?.total_length();
    Ok(SolveResult::new(Method::Nj, tree, length, mst_length, seed, start.elapsed()))
}
