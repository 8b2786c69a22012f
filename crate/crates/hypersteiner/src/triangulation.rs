//! Hyperbolic Delaunay triangulation via the Euclidean power-diagram
//! reduction, plus the hyperbolic minimum spanning tree.
//!
//! In the Klein model the hyperbolic Voronoi diagram of a point set is the
//! restriction to the disk of a Euclidean power diagram over lifted sites.
//! With `γ = γ(p)` the lift used here is
//!
//! ```text
//! center  c_p = γ p,        weight  r_p = γ - 1,
//! ```
//!
//! and the hyperbolic distance comparison between any interior query `x` and
//! two sites agrees with the power comparison `||x - c_p||² - r_p²`. The
//! regular (weighted Delaunay) triangulation dual to that diagram is obtained
//! by lifting each site once more to 3-D, `(c_p, ||c_p||² - r_p²) = (γ p,
//! 2γ - 2)`, and extracting the lower convex hull.

use crate::error::{Error, Result};
use crate::hull::{hull_triangles, Point3};
use crate::klein::{self, KleinPoint};

/// A Euclidean power-diagram site equivalent to a hyperbolic point.
#[derive(Debug, Clone, Copy)]
pub struct PowerSite {
    pub center: (f64, f64),
    /// Additive radius; the power of a query `x` is `||x - center||² - weight²`.
    pub weight: f64,
}

impl PowerSite {
    /// Power of a Euclidean query point with respect to this site.
    pub fn power(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        dx * dx + dy * dy - self.weight * self.weight
    }
}

/// Lift a Klein point to its equivalent power site: `c = γ p`, `r = γ - 1`.
pub fn power_lift(p: &KleinPoint) -> PowerSite {
    let g = klein::gamma(p);
    PowerSite { center: (g * p.x(), g * p.y()), weight: g - 1.0 }
}

/// A triangulation over a point set. Degenerate inputs (fewer than three
/// points, or all collinear) carry no triangles and only the chain of edges
/// along the common geodesic.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub points: Vec<KleinPoint>,
    /// Sorted index triples, lexicographically ordered.
    pub triangles: Vec<[usize; 3]>,
    /// Sorted index pairs `(i, j)` with `i < j`, derived from the triangles
    /// (or the degenerate chain).
    pub edges: Vec<(usize, usize)>,
}

impl Triangulation {
    pub fn is_degenerate(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Weighted-length edges of a spanning tree, `i < j`, no duplicates.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub edges: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

/// Hyperbolic Delaunay triangulation of the given points, computed as the
/// regular triangulation of the lifted power sites.
///
/// Deterministic given the input order; cocircular ties are broken by index
/// order. Duplicate points (closer than `1e-12` in Klein coordinates) are an
/// error; fewer than three points or an all-collinear set yield a degenerate
/// result carrying only the edge path along the common chord.
pub fn delaunay(points: &[KleinPoint]) -> Result<Triangulation> {
    if let Some((i, j)) = find_duplicate(points) {
        return Err(Error::DuplicatePoints { i, j });
    }
    let n = points.len();
    if n < 3 || all_collinear(points) {
        return Ok(degenerate_chain(points));
    }

    let lifted: Vec<Point3> = points
        .iter()
        .map(|p| {
            let g = klein::gamma(p);
            Point3 { x: g * p.x(), y: g * p.y(), z: 2.0 * (g - 1.0) }
        })
        .collect();

    let triangles = match hull_triangles(&lifted) {
        Some(faces) => lower_faces(&lifted, &faces),
        // All lifted sites coplanar: the sites are mutually cocircular in the
        // power metric, so every convex-position triangulation is regular.
        None => fan_triangulation(points),
    };

    let mut triangles: Vec<[usize; 3]> = triangles
        .into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect();
    triangles.sort_unstable();
    triangles.dedup();

    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])])
        .collect();
    edges.sort_unstable();
    edges.dedup();

    Ok(Triangulation { points: points.to_vec(), triangles, edges })
}

/// Minimum spanning tree under the hyperbolic metric: Kruskal restricted to
/// the Delaunay edges, falling back to all-pairs Kruskal for degenerate
/// inputs. Errors on an empty point set.
pub fn mst(points: &[KleinPoint]) -> Result<EdgeList> {
    let n = points.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if n == 1 {
        return Ok(EdgeList { edges: Vec::new() });
    }
    if n == 2 {
        let d = klein::distance(&points[0], &points[1]);
        return Ok(EdgeList { edges: vec![(0, 1, d)] });
    }

    let candidates: Vec<(usize, usize)> = match delaunay(points) {
        Ok(tri) if !tri.is_degenerate() => tri.edges,
        _ => all_pairs(n),
    };
    let tree = kruskal(points, &candidates, n);
    if tree.edges.len() == n - 1 {
        return Ok(tree);
    }
    // The candidate graph failed to span (defensive): redo over all pairs.
    Ok(kruskal(points, &all_pairs(n), n))
}

/// Kruskal over an explicit candidate edge set, ties broken by index pair.
fn kruskal(points: &[KleinPoint], candidates: &[(usize, usize)], n: usize) -> EdgeList {
    let mut weighted: Vec<(f64, usize, usize)> = candidates
        .iter()
        .map(|&(i, j)| (klein::distance(&points[i], &points[j]), i, j))
        .collect();
    weighted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for (d, i, j) in weighted {
        if uf.union(i, j) {
            edges.push((i.min(j), i.max(j), d));
            if edges.len() == n - 1 {
                break;
            }
        }
    }
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    EdgeList { edges }
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Distance below which two Klein points count as the same site.
pub(crate) const DEDUPE_EPS: f64 = 1e-12;

fn find_duplicate(points: &[KleinPoint]) -> Option<(usize, usize)> {
    // Hash grid with cell size DEDUPE_EPS: near pairs share or neighbor cells.
    let cell = |v: f64| (v / DEDUPE_EPS).floor() as i64;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (j, p) in points.iter().enumerate() {
        let (cx, cy) = (cell(p.x()), cell(p.y()));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &i in bucket {
                        let d = (points[i].x() - p.x()).hypot(points[i].y() - p.y());
                        if d < DEDUPE_EPS {
                            return Some((i, j));
                        }
                    }
                }
            }
        }
        grid.entry((cx, cy)).or_default().push(j);
    }
    None
}

fn all_collinear(points: &[KleinPoint]) -> bool {
    let n = points.len();
    if n < 3 {
        return true;
    }
    let a = &points[0];
    let b = points[1..]
        .iter()
        .max_by(|p, q| {
            let dp = (p.x() - a.x()).hypot(p.y() - a.y());
            let dq = (q.x() - a.x()).hypot(q.y() - a.y());
            dp.partial_cmp(&dq).unwrap()
        })
        .unwrap();
    let (ux, uy) = (b.x() - a.x(), b.y() - a.y());
    let len = ux.hypot(uy);
    if len < 1e-15 {
        return true;
    }
    points.iter().all(|p| {
        let cross = ux * (p.y() - a.y()) - uy * (p.x() - a.x());
        cross.abs() <= 1e-14 * len.max(1.0)
    })
}

/// Chain of edges along the common chord, sorted by projection.
fn degenerate_chain(points: &[KleinPoint]) -> Triangulation {
    let n = points.len();
    let mut edges = Vec::new();
    if n >= 2 {
        let a = &points[0];
        let far = points
            .iter()
            .max_by(|p, q| {
                let dp = (p.x() - a.x()).hypot(p.y() - a.y());
                let dq = (q.x() - a.x()).hypot(q.y() - a.y());
                dp.partial_cmp(&dq).unwrap()
            })
            .unwrap();
        let (ux, uy) = (far.x() - a.x(), far.y() - a.y());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            let ti = ux * points[i].x() + uy * points[i].y();
            let tj = ux * points[j].x() + uy * points[j].y();
            ti.partial_cmp(&tj).unwrap().then(i.cmp(&j))
        });
        for w in order.windows(2) {
            edges.push((w[0].min(w[1]), w[0].max(w[1])));
        }
        edges.sort_unstable();
    }
    Triangulation { points: points.to_vec(), triangles: Vec::new(), edges }
}

fn lower_faces(lifted: &[Point3], faces: &[[usize; 3]]) -> Vec<[usize; 3]> {
    faces
        .iter()
        .filter(|f| {
            let (a, b, c) = (&lifted[f[0]], &lifted[f[1]], &lifted[f[2]]);
            let nz = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            let scale = [a, b, c]
                .iter()
                .map(|p| p.x.abs().max(p.y.abs()))
                .fold(1.0f64, f64::max);
            nz < -1e-14 * scale * scale
        })
        .copied()
        .collect()
}

/// Triangulate mutually cocircular sites: all lie on their own convex hull,
/// so fan from the lowest-index hull vertex in cyclic order.
fn fan_triangulation(points: &[KleinPoint]) -> Vec<[usize; 3]> {
    let hull = convex_hull_2d(points);
    if hull.len() < 3 {
        return Vec::new();
    }
    let start = hull
        .iter()
        .position(|&i| i == *hull.iter().min().unwrap())
        .unwrap();
    let m = hull.len();
    let mut out = Vec::with_capacity(m - 2);
    for k in 1..m - 1 {
        out.push([hull[start], hull[(start + k) % m], hull[(start + k + 1) % m]]);
    }
    out
}

/// Andrew monotone chain, counterclockwise vertex order.
fn convex_hull_2d(points: &[KleinPoint]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        (points[i].x(), points[i].y())
            .partial_cmp(&(points[j].x(), points[j].y()))
            .unwrap()
            .then(i.cmp(&j))
    });
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        (points[a].x() - points[o].x()) * (points[b].y() - points[o].y())
            - (points[a].y() - points[o].y()) * (points[b].x() - points[o].x())
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
