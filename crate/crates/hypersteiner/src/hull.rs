//! Incremental 3-D convex hull over lifted power sites.
//!
//! Faces are wound counterclockwise seen from outside, so a query point `p`
//! is outside a face exactly when `orient3d(face, p) > 0`. Near-coplanar
//! quadruples are resolved with a scale-relative tolerance; exact ties fall
//! back to insertion order, which is the symbolic perturbation the
//! triangulation layer promises.
//!
//! Points are inserted in Morton (Z-curve) order and each insertion seeds
//! its visibility search from the previous cone, which keeps the expected
//! work per insertion constant; a full scan over alive faces is the
//! fallback when the locality probe misses.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone)]
struct Face {
    v: [usize; 3],
    /// `nbr[k]` is the face across the directed edge `(v[k], v[(k+1)%3])`.
    nbr: [usize; 3],
    alive: bool,
}

fn orient3d(points: &[Point3], f: &[usize; 3], d: usize) -> (f64, f64) {
    let (a, b, c, d) = (&points[f[0]], &points[f[1]], &points[f[2]], &points[d]);
    let (ux, uy, uz) = (b.x - a.x, b.y - a.y, b.z - a.z);
    let (vx, vy, vz) = (c.x - a.x, c.y - a.y, c.z - a.z);
    let (wx, wy, wz) = (d.x - a.x, d.y - a.y, d.z - a.z);
    let det = ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx);
    let scale = [a, b, c, d]
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(1.0f64, f64::max);
    (det, scale * scale * scale)
}

/// Full convex hull as outward-wound triangles. Returns `None` when the
/// points are degenerate (fewer than four, or no non-coplanar quadruple).
pub(crate) fn hull_triangles(points: &[Point3]) -> Option<Vec<[usize; 3]>> {
    let mut eps = 1e-12;
    for _ in 0..3 {
        match try_hull(points, eps) {
            HullOutcome::Hull(faces) => return Some(faces),
            HullOutcome::Degenerate => return None,
            HullOutcome::Corrupt => eps *= 100.0,
        }
    }
    panic!("convex hull failed to stabilize after tolerance escalation");
}

enum HullOutcome {
    Hull(Vec<[usize; 3]>),
    Degenerate,
    Corrupt,
}

/// Indices sorted along a Morton curve of the xy-projection.
fn morton_order(points: &[Point3]) -> Vec<usize> {
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let span_x = (max_x - min_x).max(1e-300);
    let span_y = (max_y - min_y).max(1e-300);
    let key = |p: &Point3| -> u64 {
        let qx = (((p.x - min_x) / span_x) * 65535.0) as u64;
        let qy = (((p.y - min_y) / span_y) * 65535.0) as u64;
        let mut out = 0u64;
        for bit in 0..16 {
            out |= ((qx >> bit) & 1) << (2 * bit);
            out |= ((qy >> bit) & 1) << (2 * bit + 1);
        }
        out
    };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| (key(&points[i]), i));
    order
}

struct HullState {
    faces: Vec<Face>,
    /// Per-face visitation epoch for the lazy visibility flood.
    mark: Vec<u32>,
    epoch: u32,
    hint: usize,
}

impl HullState {
    fn push_face(&mut self, f: Face) -> usize {
        self.faces.push(f);
        self.mark.push(0);
        self.faces.len() - 1
    }
}

fn try_hull(points: &[Point3], eps: f64) -> HullOutcome {
    let n = points.len();
    if n < 4 {
        return HullOutcome::Degenerate;
    }

    let order = morton_order(points);

    // Initial tetrahedron scanned in insertion order.
    let i0 = order[0];
    let dist1 = |i: usize| {
        let (p, q) = (&points[i], &points[i0]);
        (p.x - q.x).abs() + (p.y - q.y).abs() + (p.z - q.z).abs()
    };
    let Some(&i1) = order[1..].iter().find(|&&i| dist1(i) > eps) else {
        return HullOutcome::Degenerate;
    };
    let noncollinear = |i: usize| {
        let (a, b, c) = (&points[i0], &points[i1], &points[i]);
        let (ux, uy, uz) = (b.x - a.x, b.y - a.y, b.z - a.z);
        let (vx, vy, vz) = (c.x - a.x, c.y - a.y, c.z - a.z);
        let cx = uy * vz - uz * vy;
        let cy = uz * vx - ux * vz;
        let cz = ux * vy - uy * vx;
        (cx * cx + cy * cy + cz * cz).sqrt() > eps
    };
    let Some(&i2) = order.iter().find(|&&i| i != i0 && i != i1 && noncollinear(i)) else {
        return HullOutcome::Degenerate;
    };
    let Some(&i3) = order.iter().find(|&&i| {
        if i == i0 || i == i1 || i == i2 {
            return false;
        }
        let (det, s) = orient3d(points, &[i0, i1, i2], i);
        det.abs() > eps * s
    }) else {
        return HullOutcome::Degenerate;
    };

    let (a, mut b, mut c, d) = (i0, i1, i2, i3);
    let (det, _) = orient3d(points, &[a, b, c], d);
    if det > 0.0 {
        std::mem::swap(&mut b, &mut c);
    }
    let mut state = HullState {
        faces: vec![
            Face { v: [a, b, c], nbr: [0; 3], alive: true },
            Face { v: [a, d, b], nbr: [0; 3], alive: true },
            Face { v: [b, d, c], nbr: [0; 3], alive: true },
            Face { v: [c, d, a], nbr: [0; 3], alive: true },
        ],
        mark: vec![0; 4],
        epoch: 0,
        hint: 0,
    };
    link_initial(&mut state.faces);

    for &p in order.iter().filter(|&&i| ![a, b, c, d].contains(&i)) {
        if !insert_point(points, &mut state, p, eps) {
            return HullOutcome::Corrupt;
        }
    }

    HullOutcome::Hull(state.faces.iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn link_initial(faces: &mut [Face]) {
    let mut map = std::collections::HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            map.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    for fi in 0..faces.len() {
        for k in 0..3 {
            let (u, v) = (faces[fi].v[k], faces[fi].v[(k + 1) % 3]);
            faces[fi].nbr[k] = map[&(v, u)];
        }
    }
}

/// Find a seed face for the visibility flood: a bounded breadth-first probe
/// around the hint, falling back to a scan over all alive faces. Returns
/// `None` when `p` is strictly inside the hull.
fn find_seed(points: &[Point3], state: &mut HullState, p: usize, eps: f64) -> Option<usize> {
    const PROBE_BUDGET: usize = 128;
    state.epoch += 1;
    let epoch = state.epoch;
    if state.faces[state.hint].alive {
        let mut queue = std::collections::VecDeque::from([state.hint]);
        state.mark[state.hint] = epoch;
        let mut budget = PROBE_BUDGET;
        while let Some(fi) = queue.pop_front() {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let (det, s) = orient3d(points, &state.faces[fi].v, p);
            if det > eps * s {
                return Some(fi);
            }
            for k in 0..3 {
                let nb = state.faces[fi].nbr[k];
                if state.faces[nb].alive && state.mark[nb] != epoch {
                    state.mark[nb] = epoch;
                    queue.push_back(nb);
                }
            }
        }
    }
    // Fallback: argmax over every alive face.
    let mut best: Option<(usize, f64, f64)> = None;
    for fi in 0..state.faces.len() {
        if !state.faces[fi].alive {
            continue;
        }
        let (det, s) = orient3d(points, &state.faces[fi].v, p);
        if best.map_or(true, |(_, bd, _)| det > bd) {
            best = Some((fi, det, s));
        }
    }
    let (fi, det, s) = best.expect("hull has no alive faces");
    if det < -eps * s {
        None
    } else {
        Some(fi)
    }
}

fn insert_point(points: &[Point3], state: &mut HullState, p: usize, eps: f64) -> bool {
    let Some(seed) = find_seed(points, state, p, eps) else {
        // Strictly interior: cannot happen for sites on a convex lift, but a
        // skipped point only drops it from the triangulation.
        return true;
    };

    // Flood the weakly visible region around the seed; coplanar faces are
    // carved too so cocircular sites still enter the triangulation.
    state.epoch += 1;
    let epoch = state.epoch;
    let mut carved = vec![seed];
    let mut stack = vec![seed];
    state.mark[seed] = epoch;
    while let Some(fi) = stack.pop() {
        for k in 0..3 {
            let nb = state.faces[fi].nbr[k];
            if !state.faces[nb].alive || state.mark[nb] == epoch {
                continue;
            }
            state.mark[nb] = epoch;
            let (det, s) = orient3d(points, &state.faces[nb].v, p);
            if det > -eps * s {
                carved.push(nb);
                stack.push(nb);
            }
        }
    }
    let carved_set: std::collections::HashSet<usize> = carved.iter().copied().collect();

    // Horizon: directed edges of carved faces whose neighbor survives.
    let mut horizon: std::collections::HashMap<usize, (usize, usize, usize)> =
        std::collections::HashMap::new();
    for &fi in &carved {
        for k in 0..3 {
            let nb = state.faces[fi].nbr[k];
            if !carved_set.contains(&nb) {
                let u = state.faces[fi].v[k];
                let v = state.faces[fi].v[(k + 1) % 3];
                let slot = (0..3)
                    .find(|&j| state.faces[nb].v[j] == v && state.faces[nb].v[(j + 1) % 3] == u)
                    .expect("adjacency out of sync");
                if horizon.insert(u, (v, nb, slot)).is_some() {
                    return false;
                }
            }
        }
    }
    if horizon.is_empty() {
        return false;
    }

    // Walk the horizon cycle and erect the cone of new faces.
    let start = *horizon.keys().min().unwrap();
    let mut loop_edges = Vec::with_capacity(horizon.len());
    let mut u = start;
    loop {
        let Some(&(v, nb, slot)) = horizon.get(&u) else { return false };
        loop_edges.push((u, v, nb, slot));
        u = v;
        if u == start {
            break;
        }
        if loop_edges.len() > horizon.len() {
            return false;
        }
    }
    if loop_edges.len() != horizon.len() {
        return false;
    }

    for &fi in &carved {
        state.faces[fi].alive = false;
    }
    let base = state.faces.len();
    let m = loop_edges.len();
    for (idx, &(u, v, nb, slot)) in loop_edges.iter().enumerate() {
        let next = base + (idx + 1) % m;
        let prev = base + (idx + m - 1) % m;
        state.push_face(Face { v: [u, v, p], nbr: [nb, next, prev], alive: true });
        state.faces[nb].nbr[slot] = base + idx;
    }
    state.hint = base;
    true
}
