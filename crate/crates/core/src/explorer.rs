//! Named triangulations, flip-graph search and random sampling.

use std::collections::HashMap;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::embeddings::{face_subdivision, klein_grid, prism};
use crate::flips::{apply_flip, enumerate_sites, FlipKind, FlipSite};
use crate::surface::{
    canonical_code, find_coloring, validate, CanonicalCode, ColorMode, Coloring, Surface,
    Triangulation,
};

pub fn build_octahedron() -> (Triangulation, Coloring) {
    let t = validate(&[
        [0, 2, 4],
        [0, 2, 5],
        [0, 3, 4],
        [0, 3, 5],
        [1, 2, 4],
        [1, 2, 5],
        [1, 3, 4],
        [1, 3, 5],
    ])
    .unwrap();
    let c = find_coloring(&t).unwrap();
    (t, c)
}

/// The 3×3 toroidal grid with one diagonal per square; its graph is
/// `K_{3,3,3}`.
pub fn build_k333_torus() -> (Triangulation, Coloring) {
    let v = |i: usize, j: usize| 3 * (i % 3) + j % 3;
    let mut faces = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            faces.push([v(i, j), v(i + 1, j), v(i, j + 1)]);
            faces.push([v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)]);
        }
    }
    let t = validate(&faces).unwrap();
    let colors = (0..9).map(|x| ((x / 3 + 3 - x % 3) % 3) as u8).collect();
    let c = Coloring::for_triangulation(&t, colors).unwrap();
    for a in 0..9 {
        for b in a + 1..9 {
            assert_eq!(t.has_edge(a, b), c.color(a) != c.color(b));
        }
    }
    (t, c)
}

pub fn build_cube_subdivision() -> (Triangulation, Coloring) {
    face_subdivision(&prism(4))
}

pub fn build_hex_prism_subdivision() -> (Triangulation, Coloring) {
    face_subdivision(&prism(6))
}

/// Face subdivision of the 4×4 twisted grid, a Klein bottle.
pub fn build_klein_subdivision() -> (Triangulation, Coloring) {
    face_subdivision(&klein_grid(4, 4))
}

pub const GALLERY: [&str; 5] = [
    "octahedron",
    "k333-torus",
    "cube-subdivision",
    "hex-prism-subdivision",
    "klein-grid",
];

pub fn gallery(name: &str) -> Option<(Triangulation, Coloring)> {
    Some(match name {
        "octahedron" => build_octahedron(),
        "k333-torus" => build_k333_torus(),
        "cube-subdivision" => build_cube_subdivision(),
        "hex-prism-subdivision" => build_hex_prism_subdivision(),
        "klein-grid" => build_klein_subdivision(),
        _ => return None,
    })
}

fn code(t: &Triangulation, c: &Coloring) -> CanonicalCode {
    canonical_code(t, Some(c), ColorMode::UpToPermutation).expect("coloring matches")
}

pub fn octahedron_code() -> CanonicalCode {
    let (t, c) = build_octahedron();
    code(&t, &c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub surface: Surface,
    pub is_octahedron: bool,
    pub ps_applicable: bool,
    pub pc_applicable: bool,
    pub all_degrees_four: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "surface={}", self.surface)?;
        writeln!(f, "is_octahedron={}", self.is_octahedron)?;
        writeln!(f, "ps_applicable={}", self.ps_applicable)?;
        writeln!(f, "pc_applicable={}", self.pc_applicable)?;
        write!(f, "all_degrees_four={}", self.all_degrees_four)
    }
}

pub fn classify(t: &Triangulation, col: &Coloring) -> Classification {
    Classification {
        surface: t.surface(),
        is_octahedron: t.vertex_count() == 6 && code(t, col) == octahedron_code(),
        ps_applicable: !enumerate_sites(t, col, FlipKind::Ps).is_empty(),
        pc_applicable: !enumerate_sites(t, col, FlipKind::Pc).is_empty(),
        all_degrees_four: (0..t.vertex_count()).all(|v| t.degree(v) == 4),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_vertices: usize,
    pub max_states: usize,
}

impl Caps {
    pub fn new(max_vertices: usize, max_states: usize) -> Self {
        Self {
            max_vertices,
            max_states,
        }
    }
}

#[derive(Debug, Clone)]
pub struct State {
    pub code: CanonicalCode,
    pub triangulation: Triangulation,
    pub coloring: Coloring,
    pub depth: usize,
}

/// States reached by a search, in discovery order, and the moves between
/// them.
#[derive(Debug, Clone)]
pub struct FlipGraphView {
    states: Vec<State>,
    index: HashMap<CanonicalCode, usize>,
    edges: Vec<(usize, FlipKind, usize)>,
    levels: Vec<usize>,
    truncated: bool,
    caps: Caps,
}

impl FlipGraphView {
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, code: &CanonicalCode) -> bool {
        self.index.contains_key(code)
    }

    pub fn state(&self, code: &CanonicalCode) -> Option<&State> {
        self.index.get(code).map(|&i| &self.states[i])
    }

    /// `(from, kind, to)` as indices into [`Self::states`], one per distinct
    /// triple.
    pub fn edges(&self) -> &[(usize, FlipKind, usize)] {
        &self.edges
    }

    /// Number of states first reached at each depth.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    /// One `code_a <tab> kind <tab> code_b` line per edge.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, k, b) in &self.edges {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                self.states[a].code, k, self.states[b].code
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Error)]
pub enum ExploreError {
    #[error("state cap of {} reached after {} states", .0.caps.max_states, .0.len())]
    StateCapExceeded(Box<FlipGraphView>),
    #[error("surfaces differ: {0} vs {1}")]
    SurfaceMismatch(Surface, Surface),
    #[error("not connected within caps ({states} states explored{})",
        if *.exhausted { ", search space exhausted" } else { "" })]
    NotConnectedWithinCaps { states: usize, exhausted: bool },
}

type Succ = (FlipKind, CanonicalCode, Triangulation, Coloring);

/// Distinct successors of a state, first occurrence kept, in `(kind, site)`
/// order.
fn successors(t: &Triangulation, c: &Coloring, kinds: &[FlipKind], max_vertices: usize) -> Vec<Succ> {
    let mut out: Vec<Succ> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &k in kinds {
        if t.vertex_count().saturating_add_signed(k.vertex_delta() as isize) > max_vertices {
            continue;
        }
        for site in enumerate_sites(t, c, k) {
            let (nt, nc) = apply_flip(t, c, &site).expect("enumerated site applies");
            let nk = code(&nt, &nc);
            if seen.insert((k, nk.clone())) {
                out.push((k, nk, nt, nc));
            }
        }
    }
    out
}

fn sorted_kinds(moves: &[FlipKind]) -> Vec<FlipKind> {
    let mut k = moves.to_vec();
    k.sort_unstable();
    k.dedup();
    k
}

/// Breadth-first search of the flip graph from `start` under `moves`,
/// keeping states with at most `caps.max_vertices` vertices.
///
/// Each frontier is expanded in parallel and merged in canonical-code
/// order, so the view does not depend on the number of workers. Hitting
/// `caps.max_states` returns the partial view inside the error.
pub fn bfs(
    start: (&Triangulation, &Coloring),
    moves: &[FlipKind],
    caps: Caps,
    record_edges: bool,
) -> Result<FlipGraphView, ExploreError> {
    let kinds = sorted_kinds(moves);
    let root = code(start.0, start.1);
    let mut view = FlipGraphView {
        states: vec![State {
            code: root.clone(),
            triangulation: start.0.clone(),
            coloring: start.1.clone(),
            depth: 0,
        }],
        index: HashMap::from([(root, 0)]),
        edges: Vec::new(),
        levels: vec![1],
        truncated: false,
        caps,
    };
    let mut frontier = vec![0];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let expanded: Vec<Vec<Succ>> = frontier
            .par_iter()
            .map(|&i| {
                let s = &view.states[i];
                successors(&s.triangulation, &s.coloring, &kinds, caps.max_vertices)
            })
            .collect();
        let mut next = Vec::new();
        for (&from, succ) in frontier.iter().zip(expanded) {
            for (k, nk, nt, nc) in succ {
                let to = match view.index.get(&nk) {
                    Some(&j) => j,
                    None => {
                        if view.states.len() >= caps.max_states {
                            view.truncated = true;
                            return Err(ExploreError::StateCapExceeded(Box::new(view)));
                        }
                        let j = view.states.len();
                        view.index.insert(nk.clone(), j);
                        view.states.push(State {
                            code: nk,
                            triangulation: nt,
                            coloring: nc,
                            depth,
                        });
                        next.push(j);
                        j
                    }
                };
                if record_edges {
                    view.edges.push((from, k, to));
                }
            }
        }
        next.sort_by(|&a, &b| view.states[a].code.cmp(&view.states[b].code));
        if !next.is_empty() {
            view.levels.push(next.len());
        }
        frontier = next;
    }
    Ok(view)
}

struct Side {
    kinds: Vec<FlipKind>,
    seen: HashMap<CanonicalCode, Option<CanonicalCode>>,
    frontier: Vec<(CanonicalCode, Triangulation, Coloring)>,
}

impl Side {
    fn new(t: &Triangulation, c: &Coloring, kinds: Vec<FlipKind>) -> Self {
        let k = code(t, c);
        Self {
            kinds,
            seen: HashMap::from([(k.clone(), None)]),
            frontier: vec![(k, t.clone(), c.clone())],
        }
    }

    /// Codes from `k` back to this side's root.
    fn chain(&self, k: &CanonicalCode) -> Vec<CanonicalCode> {
        let mut out = vec![k.clone()];
        while let Some(Some(p)) = self.seen.get(out.last().unwrap()) {
            out.push(p.clone());
        }
        out
    }
}

/// Finds a sequence of moves from `a` to a triangulation isomorphic to `b`.
///
/// Both sides grow breadth-first (the backward side with the inverse
/// kinds), always expanding the smaller frontier, until they share a
/// canonical code. The path is then replayed from `a`, taking at each step
/// the least `(kind, site)` that reaches the next code.
pub fn connect(
    a: (&Triangulation, &Coloring),
    b: (&Triangulation, &Coloring),
    moves: &[FlipKind],
    caps: Caps,
) -> Result<Vec<FlipSite>, ExploreError> {
    if a.0.surface() != b.0.surface() {
        return Err(ExploreError::SurfaceMismatch(a.0.surface(), b.0.surface()));
    }
    let kinds = sorted_kinds(moves);
    let back = sorted_kinds(&kinds.iter().map(|k| k.inverse()).collect::<Vec<_>>());
    let mut fwd = Side::new(a.0, a.1, kinds.clone());
    let mut bwd = Side::new(b.0, b.1, back);

    let meet = loop {
        if let Some(k) = fwd.seen.keys().find(|k| bwd.seen.contains_key(*k)) {
            break k.clone();
        }
        let states = fwd.seen.len() + bwd.seen.len();
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            return Err(ExploreError::NotConnectedWithinCaps {
                states,
                exhausted: true,
            });
        }
        let (grow, other) = if fwd.frontier.len() <= bwd.frontier.len() {
            (&mut fwd, &bwd)
        } else {
            (&mut bwd, &fwd)
        };
        let expanded: Vec<Vec<Succ>> = grow
            .frontier
            .par_iter()
            .map(|(_, t, c)| successors(t, c, &grow.kinds, caps.max_vertices))
            .collect();
        let mut next = Vec::new();
        let mut found = None;
        'merge: for ((pk, _, _), succ) in grow.frontier.iter().zip(expanded) {
            for (_, nk, nt, nc) in succ {
                if grow.seen.contains_key(&nk) {
                    continue;
                }
                if grow.seen.len() + other.seen.len() >= caps.max_states {
                    return Err(ExploreError::NotConnectedWithinCaps {
                        states: grow.seen.len() + other.seen.len(),
                        exhausted: false,
                    });
                }
                grow.seen.insert(nk.clone(), Some(pk.clone()));
                if other.seen.contains_key(&nk) {
                    found = Some(nk);
                    break 'merge;
                }
                next.push((nk, nt, nc));
            }
        }
        if let Some(k) = found {
            break k;
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        grow.frontier = next;
    };

    let mut codes = fwd.chain(&meet);
    codes.reverse();
    codes.extend(bwd.chain(&meet).into_iter().skip(1));

    let mut cur = (a.0.clone(), a.1.clone());
    let mut path = Vec::with_capacity(codes.len() - 1);
    for want in &codes[1..] {
        let step = kinds
            .iter()
            .flat_map(|&k| enumerate_sites(&cur.0, &cur.1, k))
            .find_map(|s| {
                let r = apply_flip(&cur.0, &cur.1, &s).unwrap();
                (code(&r.0, &r.1) == *want).then_some((s, r))
            })
            .expect("every recorded step is realized by some site");
        path.push(step.0);
        cur = step.1;
    }
    Ok(path)
}

/// Seeded random walk: each step picks uniformly among all `(kind, site)`
/// pairs over `moves`; stops early when there are none.
pub fn random_walk(
    start: (&Triangulation, &Coloring),
    moves: &[FlipKind],
    steps: usize,
    seed: u64,
) -> (Triangulation, Coloring) {
    random_walk_within(start, moves, steps, seed, usize::MAX)
}

/// [`random_walk`] restricted to moves that keep at most `max_vertices`
/// vertices.
pub fn random_walk_within(
    start: (&Triangulation, &Coloring),
    moves: &[FlipKind],
    steps: usize,
    seed: u64,
    max_vertices: usize,
) -> (Triangulation, Coloring) {
    let kinds = sorted_kinds(moves);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut t, mut c) = (start.0.clone(), start.1.clone());
    for _ in 0..steps {
        let sites: Vec<FlipSite> = kinds
            .iter()
            .filter(|k| t.vertex_count().saturating_add_signed(k.vertex_delta() as isize) <= max_vertices)
            .flat_map(|&k| enumerate_sites(&t, &c, k))
            .collect();
        let Some(site) = sites.choose(&mut rng) else {
            break;
        };
        (t, c) = apply_flip(&t, &c, site).expect("enumerated site applies");
    }
    (t, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_counts() {
        let (t, _) = build_octahedron();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (6, 12, 8));
        let (t, c) = build_k333_torus();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (9, 27, 18));
        assert_eq!(t.surface(), Surface::Orientable { genus: 1 });
        assert_eq!(find_coloring(&t).unwrap().class(0).len(), 3);
        assert!(c.is_proper(&t));
        assert_eq!(build_cube_subdivision().0.vertex_count(), 14);
        for name in GALLERY {
            let (t, c) = gallery(name).unwrap();
            assert!(c.is_proper(&t), "{name}");
        }
        assert!(gallery("nope").is_none());
    }

    #[test]
    fn octahedron_and_torus_are_exceptional() {
        let (t, c) = build_octahedron();
        let r = classify(&t, &c);
        assert!(r.is_octahedron && !r.ps_applicable && !r.pc_applicable && r.all_degrees_four);
        let (t, c) = build_k333_torus();
        assert!(!classify(&t, &c).ps_applicable);
    }

    #[test]
    fn octahedron_is_isolated_under_pentagon_moves() {
        let (t, c) = build_octahedron();
        let view = bfs((&t, &c), &[FlipKind::Ps, FlipKind::Pc], Caps::new(20, 100), true).unwrap();
        assert_eq!(view.len(), 1);
        assert_eq!(random_walk((&t, &c), &[FlipKind::Ps], 10, 1).0, t);
    }

    #[test]
    fn bes_only_bfs_moves_in_steps_of_two() {
        let (t, c) = build_octahedron();
        let view = bfs((&t, &c), &[FlipKind::Bes], Caps::new(10, 10_000), true).unwrap();
        assert!(view.len() > 1);
        assert!(view
            .states()
            .iter()
            .all(|s| [6, 8, 10].contains(&s.triangulation.vertex_count())));
    }

    #[test]
    fn state_cap_returns_partial_view() {
        let (t, c) = build_octahedron();
        match bfs((&t, &c), &[FlipKind::Bes, FlipKind::Bts], Caps::new(14, 3), false) {
            Err(ExploreError::StateCapExceeded(v)) => {
                assert!(v.truncated());
                assert_eq!(v.len(), 3);
            }
            other => panic!("expected cap, got {other:?}"),
        }
    }

    #[test]
    fn connect_replays_to_target() {
        let (t, c) = build_octahedron();
        let site = enumerate_sites(&t, &c, FlipKind::Bes)[0].clone();
        let (b, bc) = apply_flip(&t, &c, &site).unwrap();
        let (b2, bc2) = random_walk_within((&b, &bc), &[FlipKind::Ps, FlipKind::Pc], 3, 7, 10);
        let path = connect(
            (&b, &bc),
            (&b2, &bc2),
            &[FlipKind::Ps, FlipKind::Pc],
            Caps::new(12, 10_000),
        )
        .unwrap();
        let (r, rc) = crate::rewrites::replay(&b, &bc, &path).unwrap();
        assert_eq!(code(&r, &rc), code(&b2, &bc2));
        assert!(connect((&b, &bc), (&b, &bc), &[FlipKind::Ps], Caps::new(12, 10)).unwrap().is_empty());
        let (k, kc) = build_k333_torus();
        assert!(matches!(
            connect((&t, &c), (&k, &kc), &[FlipKind::Ps], Caps::new(12, 10)),
            Err(ExploreError::SurfaceMismatch(..))
        ));
    }
}
