//! Independent oracles shared by the integration suites. Nothing here calls
//! the canonical-form code under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use balflip_core::bipartite::{apply_bip, enumerate_ops, BipGraph, BipOp, Part};
use balflip_core::{Coloring, Triangulation, Vertex};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Backtracking search for a vertex bijection carrying the faces of `a`
/// onto the faces of `b`. Colors, when given, must be carried by some fixed
/// permutation of the three colors.
pub fn brute_iso_tri(
    a: &Triangulation,
    b: &Triangulation,
    colors: Option<(&Coloring, &Coloring)>,
) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.face_count() != b.face_count() {
        return false;
    }
    let b_faces: HashSet<[Vertex; 3]> = b.faces().iter().copied().collect();
    let perms: Vec<[u8; 3]> = match colors {
        None => vec![[0, 1, 2]],
        Some(_) => vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ],
    };
    // Map vertices in BFS order so adjacency constraints bite early.
    let mut order = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        for &u in a.neighbors(order[i]) {
            if !seen[u] {
                seen[u] = true;
                order.push(u);
            }
        }
        i += 1;
    }
    for perm in perms {
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if extend(a, b, &b_faces, colors, perm, &order, 0, &mut map, &mut used) {
            return true;
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn extend(
    a: &Triangulation,
    b: &Triangulation,
    b_faces: &HashSet<[Vertex; 3]>,
    colors: Option<(&Coloring, &Coloring)>,
    perm: [u8; 3],
    order: &[Vertex],
    k: usize,
    map: &mut Vec<Vertex>,
    used: &mut Vec<bool>,
) -> bool {
    if k == order.len() {
        return a.faces().iter().all(|f| {
            let mut g = [map[f[0]], map[f[1]], map[f[2]]];
            g.sort_unstable();
            b_faces.contains(&g)
        });
    }
    let v = order[k];
    for w in 0..b.vertex_count() {
        if used[w] || a.degree(v) != b.degree(w) {
            continue;
        }
        if let Some((ca, cb)) = colors {
            if perm[ca.color(v) as usize] != cb.color(w) {
                continue;
            }
        }
        let ok = a
            .neighbors(v)
            .iter()
            .filter(|&&u| map[u] != usize::MAX)
            .all(|&u| b.has_edge(map[u], w))
            && order[..k]
                .iter()
                .filter(|&&u| !a.has_edge(u, v))
                .all(|&u| !b.has_edge(map[u], w));
        if !ok {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend(a, b, b_faces, colors, perm, order, k + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[w] = false;
    }
    false
}

/// Backtracking graph isomorphism between two small simple graphs.
pub fn brute_iso_graph(a: &BipGraph, b: &BipGraph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da: Vec<usize> = a.vertices().map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = b.vertices().map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let av: Vec<Vertex> = a.vertices().collect();
    let bv: Vec<Vertex> = b.vertices().collect();
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    extend_graph(a, b, &av, &bv, 0, &mut map, &mut used)
}

fn extend_graph(
    a: &BipGraph,
    b: &BipGraph,
    av: &[Vertex],
    bv: &[Vertex],
    k: usize,
    map: &mut BTreeMap<Vertex, Vertex>,
    used: &mut BTreeSet<Vertex>,
) -> bool {
    if k == av.len() {
        return true;
    }
    let v = av[k];
    for &w in bv {
        if used.contains(&w) || a.degree(v) != b.degree(w) {
            continue;
        }
        let ok = av[..k]
            .iter()
            .all(|&u| a.has_edge(u, v) == b.has_edge(map[&u], w));
        if !ok {
            continue;
        }
        map.insert(v, w);
        used.insert(w);
        if extend_graph(a, b, av, bv, k + 1, map, used) {
            return true;
        }
        map.remove(&v);
        used.remove(&w);
    }
    false
}

/// Direct scan for three consecutive faces `vwx, vxy, vyz` around a vertex
/// with `wz` not an edge, written against the face set only.
pub fn has_open_fan(t: &Triangulation) -> bool {
    let faces: HashSet<[Vertex; 3]> = t.faces().iter().copied().collect();
    let face = |a: Vertex, b: Vertex, c: Vertex| {
        let mut f = [a, b, c];
        f.sort_unstable();
        faces.contains(&f)
    };
    for v in 0..t.vertex_count() {
        let nb = t.neighbors(v);
        for &w in nb {
            for &x in nb {
                if x == w || !face(v, w, x) {
                    continue;
                }
                for &y in nb {
                    if y == w || y == x || !face(v, x, y) {
                        continue;
                    }
                    for &z in nb {
                        if z == w || z == x || z == y || !face(v, y, z) {
                            continue;
                        }
                        if !t.has_edge(w, z) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Random bipartite graph on at most 8 vertices with minimum degree 3.
pub fn random_dense_bip(rng: &mut ChaCha8Rng) -> BipGraph {
    loop {
        let a = rng.random_range(3..=5);
        let b = rng.random_range(3..=(8 - a).max(3));
        if a + b > 8 {
            continue;
        }
        let parts: Vec<Part> = (0..a + b).map(|v| u8::from(v >= a)).collect();
        let edges: Vec<_> = (0..a)
            .flat_map(|x| (a..a + b).map(move |y| (x, y)))
            .filter(|_| rng.random_bool(0.8))
            .collect();
        let g = BipGraph::from_edges(&parts, &edges).unwrap();
        if g.min_degree() >= 3 {
            return g;
        }
    }
}

/// Random applicable sequence, taking an inverse operation whenever one is
/// available with probability one half.
pub fn random_sequence(rng: &mut ChaCha8Rng, h: &BipGraph, len: usize) -> Vec<BipOp> {
    let mut g = h.clone();
    let mut next = g.next_id();
    let mut seq = Vec::new();
    for _ in 0..len {
        let ops = enumerate_ops(&g, next);
        let (fwd, inv): (Vec<BipOp>, Vec<BipOp>) = ops.into_iter().partition(|o| o.is_forward());
        let op = if !inv.is_empty() && rng.random_bool(0.5) {
            *inv.choose(rng).unwrap()
        } else {
            *fwd.choose(rng).unwrap()
        };
        g = apply_bip(&g, &op).unwrap();
        next += 2;
        seq.push(op);
    }
    seq
}

pub const CROSS_FLIPS: [balflip_core::FlipKind; 6] = {
    use balflip_core::FlipKind::*;
    [Bts, Btw, Bes, Bew, Ps, Pc]
};

/// Balanced sphere triangulation with at most `max_vertices` vertices, from
/// a seeded walk over the six cross-flips starting at the octahedron.
pub fn sample_sphere(rng: &mut ChaCha8Rng, max_vertices: usize) -> (Triangulation, Coloring) {
    let (t, c) = balflip_core::explorer::build_octahedron();
    let steps = rng.random_range(0..=12);
    balflip_core::explorer::random_walk_within((&t, &c), &CROSS_FLIPS, steps, rng.random(), max_vertices)
}

/// Like [`sample_sphere`] but also starting from the torus and the Klein
/// bottle, with all eight moves.
pub fn sample_any(rng: &mut ChaCha8Rng, max_vertices: usize) -> (Triangulation, Coloring) {
    use balflip_core::explorer::*;
    let (t, c) = match rng.random_range(0..4) {
        0 | 1 => build_octahedron(),
        2 => build_k333_torus(),
        _ => build_klein_subdivision(),
    };
    let cap = max_vertices.max(t.vertex_count());
    let steps = rng.random_range(0..=10);
    random_walk_within((&t, &c), &balflip_core::FlipKind::ALL, steps, rng.random(), cap)
}

/// Uniform random relabeling of `t` and `c`.
pub fn shuffle(rng: &mut ChaCha8Rng, t: &Triangulation, c: &Coloring) -> (Triangulation, Coloring) {
    use rand::seq::SliceRandom;
    let mut perm: Vec<Vertex> = (0..t.vertex_count()).collect();
    perm.shuffle(rng);
    let mut colors = vec![0; t.vertex_count()];
    for v in 0..t.vertex_count() {
        colors[perm[v]] = c.color(v);
    }
    (t.relabeled(&perm), Coloring::new(colors).unwrap())
}

/// Sphere or torus sample under all eight moves, at most `max_vertices`.
pub fn sample_small(rng: &mut ChaCha8Rng, max_vertices: usize) -> (Triangulation, Coloring) {
    use balflip_core::explorer::*;
    let (t, c) = if rng.random_bool(0.7) {
        build_octahedron()
    } else {
        build_k333_torus()
    };
    let steps = rng.random_range(0..=10);
    random_walk_within((&t, &c), &balflip_core::FlipKind::ALL, steps, rng.random(), max_vertices)
}
