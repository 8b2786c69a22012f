//! Trees over terminals plus Steiner points.

use crate::klein::{self, KleinPoint};

/// A tree embedded in the disk: immutable terminals, movable Steiner points,
/// and undirected edges indexed over `terminals ++ steiner`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub terminals: Vec<KleinPoint>,
    pub steiner: Vec<KleinPoint>,
    /// Index pairs over the concatenated vertex list, terminals first.
    pub edges: Vec<(usize, usize)>,
}

impl Tree {
    pub fn new(terminals: Vec<KleinPoint>, steiner: Vec<KleinPoint>, edges: Vec<(usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        Tree { terminals, steiner, edges }
    }

    pub fn n_vertices(&self) -> usize {
        self.terminals.len() + self.steiner.len()
    }

    pub fn vertex(&self, i: usize) -> &KleinPoint {
        if i < self.terminals.len() {
            &self.terminals[i]
        } else {
            &self.steiner[i - self.terminals.len()]
        }
    }

    pub fn is_steiner_index(&self, i: usize) -> bool {
        i >= self.terminals.len()
    }

    /// Total hyperbolic edge length, summed over the index-sorted edge list
    /// so the value is bit-identical regardless of how edges were assembled.
    pub fn length(&self) -> f64 {
        debug_assert!(self.edges.windows(2).all(|w| w[0] <= w[1]));
        self.edges
            .iter()
            .map(|&(u, v)| klein::distance(self.vertex(u), self.vertex(v)))
            .sum()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(u, v)| u == i || v == i).count()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                if u == i {
                    Some(v)
                } else if v == i {
                    Some(u)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Adjacency lists for all vertices in one pass.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected, acyclic, spans every vertex, and every Steiner point has
    /// degree at least one.
    pub fn is_valid(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return false;
        }
        if self.edges.len() != n - 1 {
            return false;
        }
        let adj = self.adjacency();
        if (self.terminals.len()..n).any(|i| adj[i].is_empty()) {
            return false;
        }
        // BFS connectivity; edge count already rules out cycles.
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}
