//! Tree-construction heuristics: degree-condition reduction, angle-condition
//! expansion, the deterministic HyperSteiner construction, and the
//! randomized driver that searches over stochastic Delaunay expansions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fermat::{self, Fst4Topology, LocalFst};
use crate::klein::{self, KleinPoint};
use crate::opt::{self, GdConfig};
use crate::solve::{Method, SolveResult};
use crate::tree::Tree;
use crate::triangulation::{self, DEDUPE_EPS};

/// Driver configuration for the randomized construction. `max_iterations`
/// defaults to `floor(sqrt(|P|))` and the insertion probability is drawn
/// uniformly from `insertion_range` before every expansion pass.
#[derive(Debug, Clone)]
pub struct RhsConfig {
    pub max_iterations: Option<usize>,
    pub insertion_range: (f64, f64),
    pub seed: u64,
    pub gd: GdConfig,
}

impl Default for RhsConfig {
    fn default() -> Self {
        RhsConfig {
            max_iterations: None,
            insertion_range: (0.3, 0.6),
            seed: 0,
            gd: GdConfig::default(),
        }
    }
}

impl RhsConfig {
    pub fn effective_max_iterations(&self, n_terminals: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| (n_terminals as f64).sqrt().floor() as usize)
            .max(1)
    }
}

/// Drop Steiner candidates that collide with a terminal or an earlier
/// candidate (within the triangulation's dedupe radius).
fn dedupe_steiner(terminals: &[KleinPoint], steiner: &[KleinPoint]) -> Vec<KleinPoint> {
    let cell = |v: f64| (v / DEDUPE_EPS).floor() as i64;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<(f64, f64)>> =
        std::collections::HashMap::new();
    let mut insert_if_free = |x: f64, y: f64| -> bool {
        let (cx, cy) = (cell(x), cell(y));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &(px, py) in bucket {
                        if (px - x).hypot(py - y) < DEDUPE_EPS {
                            return false;
                        }
                    }
                }
            }
        }
        grid.entry((cx, cy)).or_default().push((x, y));
        true
    };
    for t in terminals {
        insert_if_free(t.x(), t.y());
    }
    let mut out = Vec::with_capacity(steiner.len());
    for s in steiner {
        if insert_if_free(s.x(), s.y()) {
            out.push(*s);
        }
    }
    out
}

/// Minimum spanning tree over terminals plus Steiner points as a [`Tree`].
fn mst_tree(terminals: &[KleinPoint], steiner: &[KleinPoint]) -> Result<Tree> {
    let mut points = terminals.to_vec();
    points.extend_from_slice(steiner);
    let mst = triangulation::mst(&points)?;
    Ok(Tree::new(
        terminals.to_vec(),
        steiner.to_vec(),
        mst.edges.iter().map(|&(i, j, _)| (i, j)).collect(),
    ))
}

/// Degree-condition reduction: recompute `MST(P ∪ S')` and prune until
/// stable — Steiner points of degree ≤ 2 or ≥ 5 are deleted and degree-3
/// points are moved to the Fermat point of their neighbors (deleted when
/// none exists) — then replace each degree-4 Steiner point by the best
/// four-terminal full Steiner tree over its neighborhood and splice it in.
pub fn reduce_degree(
    terminals: &[KleinPoint],
    steiner: &[KleinPoint],
) -> Result<(Vec<KleinPoint>, Tree)> {
    let n_term = terminals.len();
    let mut s_pts = dedupe_steiner(terminals, steiner);
    let mut tree = mst_tree(terminals, &s_pts)?;

    for _pass in 0..50 {
        let adj = tree.adjacency();
        let mut changed = false;
        let mut next: Vec<KleinPoint> = Vec::with_capacity(s_pts.len());
        for (k, s) in s_pts.iter().enumerate() {
            let idx = n_term + k;
            match adj[idx].len() {
                0..=2 | 5.. => changed = true,
                3 => {
                    let nb: Vec<KleinPoint> =
                        adj[idx].iter().map(|&j| *tree.vertex(j)).collect();
                    match fermat::fermat_point(&nb[0], &nb[1], &nb[2]) {
                        Some(f) => {
                            if klein::distance(&f, s) > 1e-9 {
                                changed = true;
                            }
                            next.push(f);
                        }
                        None => changed = true,
                    }
                }
                _ => next.push(*s),
            }
        }
        s_pts = dedupe_steiner(terminals, &next);
        tree = mst_tree(terminals, &s_pts)?;
        if !changed {
            break;
        }
    }

    // Degree-4 splice on the stabilized tree.
    let mut k = 0;
    while k < s_pts.len() {
        let idx = n_term + k;
        if tree.degree(idx) != 4 {
            k += 1;
            continue;
        }
        let nb_ids = tree.neighbors(idx);
        let nb: Vec<KleinPoint> = nb_ids.iter().map(|&j| *tree.vertex(j)).collect();
        let best = Fst4Topology::ALL
            .iter()
            .filter_map(|&top| fermat::fst4(&nb[0], &nb[1], &nb[2], &nb[3], top))
            .min_by(|a, b| a.length.partial_cmp(&b.length).unwrap());
        let Some(fst) = best else {
            k += 1;
            continue;
        };
        tree = splice_degree4(&tree, n_term, k, &nb_ids, &fst);
        s_pts = tree.steiner.clone();
        // The slot at k changed; re-examine the same index.
    }

    debug_assert!(tree.is_valid());
    Ok((s_pts, tree))
}

/// Replace the degree-4 Steiner point `sk` (local index into the Steiner
/// list) by the two Steiner points of `fst`, rewiring its neighborhood.
fn splice_degree4(tree: &Tree, n_term: usize, sk: usize, nb_ids: &[usize], fst: &LocalFst) -> Tree {
    let old_idx = n_term + sk;
    let remap = |i: usize| -> usize {
        if i < old_idx {
            i
        } else {
            i - 1
        }
    };
    let mut steiner: Vec<KleinPoint> = tree.steiner.clone();
    steiner.remove(sk);
    let s1 = n_term + steiner.len();
    steiner.push(fst.steiner[0]);
    let s2 = n_term + steiner.len();
    steiner.push(fst.steiner[1]);

    let mut edges: Vec<(usize, usize)> = tree
        .edges
        .iter()
        .filter(|&&(u, v)| u != old_idx && v != old_idx)
        .map(|&(u, v)| (remap(u), remap(v)))
        .collect();
    for &(u, v) in &fst.edges {
        let map_local = |i: usize| -> usize {
            if i < 4 {
                remap(nb_ids[i])
            } else if i == 4 {
                s1
            } else {
                s2
            }
        };
        edges.push((map_local(u), map_local(v)));
    }
    Tree::new(tree.terminals.clone(), steiner, edges)
}

/// Angle-condition expansion: wherever two incident tree edges meet below
/// 120 degrees, insert the Fermat point of the angle-minimizing triangle and
/// rewire the two edges into a three-star. The resulting length never
/// exceeds the input length.
pub fn expand_angle(tree: &Tree) -> (Vec<KleinPoint>, Tree) {
    // Strictly-below threshold with a small guard so exact 120-degree stars
    // are left untouched.
    const ANGLE_GATE: f64 = fermat::FERMAT_ANGLE - 1e-9;
    let mut tree = tree.clone();
    let n_input = tree.n_vertices();
    for i in 0..n_input {
        let i_neighbors = tree.neighbors(i);
        for j in i_neighbors {
            if tree.edges.binary_search(&(i.min(j), i.max(j))).is_err() {
                continue;
            }
            let xi = *tree.vertex(i);
            let xj = *tree.vertex(j);
            let mut best: Option<(f64, usize)> = None;
            for l in tree.neighbors(j) {
                if l == i {
                    continue;
                }
                let Ok(angle) = klein::angle_at(&xj, &xi, tree.vertex(l)) else { continue };
                if angle < ANGLE_GATE && best.map_or(true, |(a, _)| angle < a) {
                    best = Some((angle, l));
                }
            }
            let Some((_, k)) = best else { continue };
            let xk = *tree.vertex(k);
            let Some(s) = fermat::fermat_point(&xi, &xj, &xk) else { continue };
            let s_idx = tree.n_vertices();
            let mut edges: Vec<(usize, usize)> = tree
                .edges
                .iter()
                .copied()
                .filter(|&(u, v)| (u, v) != (i.min(j), i.max(j)) && (u, v) != (j.min(k), j.max(k)))
                .collect();
            edges.push((i, s_idx));
            edges.push((j, s_idx));
            edges.push((k, s_idx));
            let mut steiner = tree.steiner.clone();
            steiner.push(s);
            let next = Tree::new(tree.terminals.clone(), steiner, edges);
            debug_assert!(next.length() <= tree.length() + 1e-9);
            tree = next;
        }
    }
    (tree.steiner.clone(), tree)
}

/// An entry of the deterministic construction queue: a local full Steiner
/// tree over a terminal subset, prioritized by its local Steiner ratio.
struct QueueItem {
    rho: f64,
    terminal_ids: Vec<usize>,
    fst: LocalFst,
}

/// Deterministic HyperSteiner: build the Delaunay triangulation and the MST,
/// queue the full Steiner trees of triangles carrying two MST edges
/// (extended by four-terminal trees over adjacent triangle pairs carrying
/// three MST edges), and concatenate greedily, completing with MST edges.
pub fn hypersteiner(terminals: &[KleinPoint]) -> Result<SolveResult> {
    let start = std::time::Instant::now();
    let n = terminals.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mst = triangulation::mst(terminals)?;
    let mst_length = mst.total_length();
    let tree = hypersteiner_tree(terminals, &mst)?;
    let length = tree.length();
    Ok(SolveResult::new(Method::Hs, tree, length, mst_length, 0, start.elapsed()))
}

fn hypersteiner_tree(terminals: &[KleinPoint], mst: &triangulation::EdgeList) -> Result<Tree> {
    let n = terminals.len();
    if n == 2 {
        return Ok(Tree::new(terminals.to_vec(), vec![], vec![(0, 1)]));
    }
    let tri = triangulation::delaunay(terminals)?;
    let mst_set: std::collections::HashSet<(usize, usize)> =
        mst.edges.iter().map(|&(i, j, _)| (i, j)).collect();

    let mut queue: Vec<QueueItem> = Vec::new();
    let mut marked: Vec<usize> = Vec::new();
    for (ti, t) in tri.triangles.iter().enumerate() {
        let tri_edges = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])];
        let mst_count = tri_edges.iter().filter(|e| mst_set.contains(e)).count();
        if mst_count != 2 {
            continue;
        }
        let (a, b, c) = (&terminals[t[0]], &terminals[t[1]], &terminals[t[2]]);
        let Some(fst) = fermat::fst3(a, b, c) else { continue };
        let local_mst = local_mst3(a, b, c);
        marked.push(ti);
        queue.push(QueueItem {
            rho: fst.length / local_mst,
            terminal_ids: t.to_vec(),
            fst,
        });
    }

    // Four-terminal trees over adjacent triangle pairs that jointly carry
    // three MST edges.
    let mut edge_to_triangles: std::collections::HashMap<(usize, usize), Vec<usize>> =
        std::collections::HashMap::new();
    for (ti, t) in tri.triangles.iter().enumerate() {
        for e in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            edge_to_triangles.entry(e).or_default().push(ti);
        }
    }
    let mut seen_pairs: std::collections::HashSet<(usize, usize)> =
        std::collections::HashSet::new();
    for &ti in &marked {
        let t = tri.triangles[ti];
        for shared in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let Some(adjacent) = edge_to_triangles.get(&shared) else { continue };
            for &tj in adjacent {
                if tj == ti || !seen_pairs.insert((ti.min(tj), ti.max(tj))) {
                    continue;
                }
                let u = tri.triangles[tj];
                let union_mst = {
                    let mut count = 0;
                    let mut seen: Vec<(usize, usize)> = Vec::with_capacity(6);
                    for v in [t, u] {
                        for e in [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])] {
                            if mst_set.contains(&e) && !seen.contains(&e) {
                                seen.push(e);
                                count += 1;
                            }
                        }
                    }
                    count
                };
                if union_mst != 3 {
                    continue;
                }
                let apex_t = t.iter().copied().find(|v| *v != shared.0 && *v != shared.1).unwrap();
                let apex_u = u.iter().copied().find(|v| *v != shared.0 && *v != shared.1).unwrap();
                // Quad in cyclic order apex_t, shared.0, apex_u, shared.1;
                // the two planar pairings split the shared edge.
                let ids = [apex_t, shared.0, apex_u, shared.1];
                let pts: Vec<KleinPoint> = ids.iter().map(|&i| terminals[i]).collect();
                let topologies = [
                    Fst4Topology { first_pair: (0, 1), second_pair: (2, 3) },
                    Fst4Topology { first_pair: (0, 3), second_pair: (1, 2) },
                ];
                let best = topologies
                    .iter()
                    .filter_map(|&top| fermat::fst4(&pts[0], &pts[1], &pts[2], &pts[3], top))
                    .min_by(|x, y| x.length.partial_cmp(&y.length).unwrap());
                let Some(fst) = best else { continue };
                let local_mst = triangulation::mst(&pts)?.total_length();
                if fst.length >= local_mst {
                    continue;
                }
                queue.push(QueueItem {
                    rho: fst.length / local_mst,
                    terminal_ids: ids.to_vec(),
                    fst,
                });
            }
        }
    }

    queue.sort_by(|a, b| {
        a.rho
            .partial_cmp(&b.rho)
            .unwrap()
            .then_with(|| a.terminal_ids.cmp(&b.terminal_ids))
    });

    // Greedy concatenation over terminal connectivity, then MST completion.
    let mut uf = GreedyForest::new(n);
    let mut steiner: Vec<KleinPoint> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for item in &queue {
        if !uf.all_disconnected(&item.terminal_ids) {
            continue;
        }
        uf.union_all(&item.terminal_ids);
        let offset = n + steiner.len();
        steiner.extend_from_slice(&item.fst.steiner);
        let n_local_terms = item.fst.terminals.len();
        for &(a, b) in &item.fst.edges {
            let map_local = |i: usize| -> usize {
                if i < n_local_terms {
                    item.terminal_ids[i]
                } else {
                    offset + (i - n_local_terms)
                }
            };
            edges.push((map_local(a), map_local(b)));
        }
    }
    let mut by_length: Vec<&(usize, usize, f64)> = mst.edges.iter().collect();
    by_length.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then((a.0, a.1).cmp(&(b.0, b.1))));
    for &&(i, j, _) in &by_length {
        if uf.union(i, j) {
            edges.push((i, j));
        }
    }

    let tree = Tree::new(terminals.to_vec(), steiner, edges);
    debug_assert!(tree.is_valid());
    Ok(tree)
}

fn local_mst3(a: &KleinPoint, b: &KleinPoint, c: &KleinPoint) -> f64 {
    let ab = klein::distance(a, b);
    let ac = klein::distance(a, c);
    let bc = klein::distance(b, c);
    ab + ac + bc - ab.max(ac).max(bc)
}

struct GreedyForest {
    parent: Vec<usize>,
}

impl GreedyForest {
    fn new(n: usize) -> Self {
        GreedyForest { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn all_disconnected(&mut self, ids: &[usize]) -> bool {
        let roots: Vec<usize> = ids.iter().map(|&i| self.find(i)).collect();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if roots[i] == roots[j] {
                    return false;
                }
            }
        }
        true
    }

    fn union_all(&mut self, ids: &[usize]) {
        for w in ids.windows(2) {
            let (a, b) = (self.find(w[0]), self.find(w[1]));
            if a != b {
                self.parent[a] = b;
            }
        }
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra] = rb;
            true
        }
    }
}

/// Optimize with a collapse fallback: a collapsed-edge error abandons the
/// refinement and keeps the unoptimized tree (the exploration policy then
/// judges the unimproved length).
fn optimize_or_keep(tree: &Tree, gd: &GdConfig) -> Tree {
    opt::optimize_steiner(tree, gd).unwrap_or_else(|_| tree.clone())
}

/// Randomized HyperSteiner: starting from the MST, repeatedly expand the
/// Steiner candidate set by inserting barycenters of stochastically sampled
/// Delaunay triangles, rebuild a candidate tree (degree reduction, gradient
/// refinement, angle expansion, gradient refinement, and a conditional
/// reduction pass), and keep the best tree found. The iteration counter
/// resets on every improvement and the candidate set reverts to the best
/// known set on rejection. Fully deterministic given the seed.
pub fn randomized_hypersteiner(
    terminals: &[KleinPoint],
    config: &RhsConfig,
) -> Result<SolveResult> {
    let start = std::time::Instant::now();
    let n = terminals.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let (l, u) = config.insertion_range;
    if !(0.0 < l && l <= u && u < 1.0) {
        return Err(Error::InvalidSpec(format!("insertion range [{l}, {u}]")));
    }

    let mst_length = triangulation::mst(terminals)?.total_length();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_star = config.effective_max_iterations(n);

    let mut best_tree = mst_tree(terminals, &[])?;
    let mut best_len = best_tree.length();
    let mut best_steiner: Vec<KleinPoint> = Vec::new();
    let mut candidates: Vec<KleinPoint> = Vec::new();

    let mut iter = 1usize;
    while iter <= n_star {
        let passes = ((2.0 * (iter as f64).sqrt() - 1.0).floor() as usize).max(1);
        for _ in 0..passes {
            let deduped = dedupe_steiner(terminals, &candidates);
            let mut points = terminals.to_vec();
            points.extend_from_slice(&deduped);
            let tri = triangulation::delaunay(&points)?;
            let p = rng.random_range(l..=u);
            for t in &tri.triangles {
                if rng.random::<f64>() < p {
                    candidates.push(klein::barycenter(
                        &points[t[0]],
                        &points[t[1]],
                        &points[t[2]],
                    ));
                }
            }
        }

        // Heuristic construction.
        let (_, reduced) = reduce_degree(terminals, &candidates)?;
        let reduced = optimize_or_keep(&reduced, &config.gd);
        let (_, expanded) = expand_angle(&reduced);
        let mut tree = optimize_or_keep(&expanded, &config.gd);
        if tree.length() < best_len {
            // Refinement pass.
            let (_, refit) = reduce_degree(terminals, &tree.steiner.clone())?;
            tree = optimize_or_keep(&refit, &config.gd);
        }
        debug_assert!(tree.is_valid());

        // Exploration policy: accept and reset, or restore and advance.
        if tree.length() < best_len {
            best_len = tree.length();
            best_tree = tree.clone();
            best_steiner = tree.steiner.clone();
            candidates = tree.steiner.clone();
            iter = 1;
        } else {
            candidates = best_steiner.clone();
            iter += 1;
        }
    }

    debug_assert!(best_len <= mst_length + 1e-9);
    let length = best_tree.length();
    Ok(SolveResult::new(
        Method::Rhs,
        best_tree,
        length,
        mst_length,
        config.seed,
        start.elapsed(),
    ))
}

/// The minimum spanning tree itself, reported through the same interface.
pub fn mst_solve(terminals: &[KleinPoint]) -> Result<SolveResult> {
    let start = std::time::Instant::now();
    if terminals.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: terminals.len() });
    }
    let tree = mst_tree(terminals, &[])?;
    let length = tree.length();
    Ok(SolveResult::new(Method::Mst, tree, length, length, 0, start.elapsed()))
}
