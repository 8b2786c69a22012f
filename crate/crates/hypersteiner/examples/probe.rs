use hypersteiner::fermat::{fst4, Fst4Topology, FERMAT_ANGLE};
use hypersteiner::klein::{self, KleinPoint};
use hypersteiner::triangulation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(x: f64, y: f64) -> KleinPoint { KleinPoint::new(x, y).unwrap() }

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0;
    while checked < 50 {
        let mut angles: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(|p, q| p.partial_cmp(q).unwrap());
        if angles.windows(2).any(|w| w[1] - w[0] < 0.3) { continue; }
        let pts: Vec<KleinPoint> = angles.iter().map(|&t| {
            let r = rng.random_range(0.2..0.7);
            pt(r * t.cos(), r * t.sin())
        }).collect();
        let convex = (0..4).all(|i| {
            let (o, a, b) = (&pts[i], &pts[(i + 1) % 4], &pts[(i + 2) % 4]);
            (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x()) > 1e-6
        });
        if !convex { continue; }
        let planar = [
            Fst4Topology { first_pair: (0, 1), second_pair: (2, 3) },
            Fst4Topology { first_pair: (0, 3), second_pair: (1, 2) },
        ];
        let m = triangulation::mst(&pts).unwrap().total_length();
        for top in planar {
            if let Some(f) = fst4(&pts[0], &pts[1], &pts[2], &pts[3], top) {
                if f.length > m + 1e-9 {
                    println!("VIOLATION top {:?}: fst {} vs mst {}", top, f.length, m);
                    for (k, p) in pts.iter().enumerate() { println!("  p{k} = ({}, {})", p.x(), p.y()); }
                    for (k, s) in f.steiner.iter().enumerate() {
                        println!("  s{k} = ({}, {})", s.x(), s.y());
                    }
                    // check angles at s1 w.r.t. its three neighbors
                    let s1 = &f.steiner[0]; let s2 = &f.steiner[1];
                    let (a0, a1) = (top.first_pair.0, top.first_pair.1);
                    println!("  angles at s1: {} {} {}",
                        klein::angle_at(s1, &pts[a0], &pts[a1]).unwrap() - FERMAT_ANGLE,
                        klein::angle_at(s1, &pts[a1], s2).unwrap() - FERMAT_ANGLE,
                        klein::angle_at(s1, s2, &pts[a0]).unwrap() - FERMAT_ANGLE);
                    // does the tree topology make planar sense? print edge crossing check
                }
            }
        }
        checked += 1;
    }
    println!("done");
}
