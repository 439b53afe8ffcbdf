//! The eight local moves on balanced triangulations.
//!
//! Six of them exchange a disk of the octahedron boundary with its complement
//! (triangle, edge and pentagon subdivisions and their welds); the N-flip and
//! P2-flip rearrange a hexagonal or pentagonal patch without changing the
//! vertex count.
//!
//! Every site is a kind plus an ordered vertex tuple:
//!
//! | kind   | tuple                         |
//! |--------|-------------------------------|
//! | BTS    | `a b c` (a face)              |
//! | BTW    | `a* b* c* a b c`              |
//! | BES    | `a b c d` (edge `ab`, sides)  |
//! | BEW    | `p q a b c d`                 |
//! | PS     | `v w x y z`                   |
//! | PC     | `u w x y z v`                 |
//! | NFlip  | `v1 v2 v3 v4 v5 v6`           |
//! | P2Flip | `v1 v2 v3 v4 v5 q p`          |
//!
//! New vertices get ids `n, n+1, ...` in the order listed for each move;
//! removed vertices are then compacted away, keeping the relative order of
//! the survivors.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::surface::{sorted_face, Color, Coloring, Face, Triangulation, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlipKind {
    Bts,
    Btw,
    Bes,
    Bew,
    Ps,
    Pc,
    NFlip,
    P2Flip,
}

impl FlipKind {
    pub const ALL: [FlipKind; 8] = [
        FlipKind::Bts,
        FlipKind::Btw,
        FlipKind::Bes,
        FlipKind::Bew,
        FlipKind::Ps,
        FlipKind::Pc,
        FlipKind::NFlip,
        FlipKind::P2Flip,
    ];

    /// Change in the number of vertices.
    pub fn vertex_delta(self) -> i64 {
        match self {
            FlipKind::Bts => 3,
            FlipKind::Btw => -3,
            FlipKind::Bes => 2,
            FlipKind::Bew => -2,
            FlipKind::Ps => 1,
            FlipKind::Pc => -1,
            FlipKind::NFlip | FlipKind::P2Flip => 0,
        }
    }

    pub fn inverse(self) -> FlipKind {
        match self {
            FlipKind::Bts => FlipKind::Btw,
            FlipKind::Btw => FlipKind::Bts,
            FlipKind::Bes => FlipKind::Bew,
            FlipKind::Bew => FlipKind::Bes,
            FlipKind::Ps => FlipKind::Pc,
            FlipKind::Pc => FlipKind::Ps,
            k => k,
        }
    }

    /// Length of the site tuple.
    pub fn arity(self) -> usize {
        match self {
            FlipKind::Bts => 3,
            FlipKind::Bes => 4,
            FlipKind::Ps => 5,
            FlipKind::Btw | FlipKind::Bew | FlipKind::Pc | FlipKind::NFlip => 6,
            FlipKind::P2Flip => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlipKind::Bts => "bts",
            FlipKind::Btw => "btw",
            FlipKind::Bes => "bes",
            FlipKind::Bew => "bew",
            FlipKind::Ps => "ps",
            FlipKind::Pc => "pc",
            FlipKind::NFlip => "nflip",
            FlipKind::P2Flip => "p2flip",
        }
    }
}

impl fmt::Display for FlipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown flip kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for FlipKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "bts" => FlipKind::Bts,
            "btw" => FlipKind::Btw,
            "bes" => FlipKind::Bes,
            "bew" => FlipKind::Bew,
            "ps" => FlipKind::Ps,
            "pc" => FlipKind::Pc,
            "nflip" | "n" => FlipKind::NFlip,
            "p2flip" | "p2" => FlipKind::P2Flip,
            _ => return Err(UnknownKind(s.to_string())),
        })
    }
}

/// A move together with the vertex tuple pinning where it applies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlipSite {
    kind: FlipKind,
    verts: Vec<Vertex>,
}

impl FlipSite {
    pub fn new(kind: FlipKind, verts: Vec<Vertex>) -> Result<Self, FlipError> {
        if verts.len() != kind.arity() {
            return Err(FlipError::Arity {
                kind,
                expected: kind.arity(),
                got: verts.len(),
            });
        }
        Ok(Self { kind, verts })
    }

    pub fn kind(&self) -> FlipKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    /// The same move written in its canonical tuple order: sorted triangle
    /// for BTS/BTW, `a < b` and `c < d` for BES/BEW, `w < z` for PS/PC and
    /// `v1 < v4` for the N-flip.
    pub fn normalized(mut self) -> Self {
        let v = &mut self.verts;
        match self.kind {
            FlipKind::Bts => v.sort_unstable(),
            FlipKind::Btw => {
                let mut pairs = [(v[0], v[3]), (v[1], v[4]), (v[2], v[5])];
                pairs.sort_unstable();
                *v = vec![
                    pairs[0].0, pairs[1].0, pairs[2].0, pairs[0].1, pairs[1].1, pairs[2].1,
                ];
            }
            FlipKind::Bes => {
                if v[0] > v[1] {
                    v.swap(0, 1);
                }
                if v[2] > v[3] {
                    v.swap(2, 3);
                }
            }
            FlipKind::Bew => {
                if v[0] > v[1] {
                    v.swap(0, 1);
                    v.swap(2, 3);
                }
                if v[4] > v[5] {
                    v.swap(4, 5);
                }
            }
            FlipKind::Ps | FlipKind::Pc => {
                if v[1] > v[4] {
                    v.swap(1, 4);
                    v.swap(2, 3);
                }
            }
            FlipKind::NFlip => {
                if v[0] > v[3] {
                    v.rotate_left(3);
                }
            }
            FlipKind::P2Flip => {}
        }
        self
    }

    /// Renames every vertex through `map` and renormalizes.
    pub fn relabeled(&self, map: &[Vertex]) -> Self {
        Self {
            kind: self.kind,
            verts: self.verts.iter().map(|&v| map[v]).collect(),
        }
        .normalized()
    }
}

impl fmt::Display for FlipSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind)?;
        for (i, v) in self.verts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("{kind} site needs {expected} vertices, got {got}")]
    Arity {
        kind: FlipKind,
        expected: usize,
        got: usize,
    },
    #[error("invalid site: {0}")]
    InvalidSite(String),
    #[error("move would create a second edge {{{0}, {1}}}")]
    WouldCreateDoubleEdge(Vertex, Vertex),
    #[error("move would create a second face {{{}, {}, {}}}", .0[0], .0[1], .0[2])]
    WouldCreateDuplicateFace(Face),
    #[error("coloring does not match the triangulation")]
    ColoringMismatch,
}

/// Local description of a move: faces out, faces in, and vertex bookkeeping.
/// Added faces may refer to fresh vertices `n + i`.
#[derive(Debug)]
struct Plan {
    remove: Vec<Face>,
    add: Vec<Face>,
    new_colors: Vec<Color>,
    delete: Vec<Vertex>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, FlipError> {
    Err(FlipError::InvalidSite(msg.into()))
}

fn require_distinct(vs: &[Vertex], n: usize) -> Result<(), FlipError> {
    if let Some(&v) = vs.iter().find(|&&v| v >= n) {
        return invalid(format!("vertex {v} does not exist"));
    }
    let set: HashSet<_> = vs.iter().collect();
    if set.len() != vs.len() {
        return invalid("site vertices are not distinct");
    }
    Ok(())
}

fn require_faces(t: &Triangulation, faces: &[[Vertex; 3]]) -> Result<(), FlipError> {
    for &[a, b, c] in faces {
        if !t.has_face(a, b, c) {
            return invalid(format!("{{{a}, {b}, {c}}} is not a face"));
        }
    }
    Ok(())
}

fn require_degree(t: &Triangulation, vs: &[Vertex], deg: usize) -> Result<(), FlipError> {
    for &v in vs {
        if t.degree(v) != deg {
            return invalid(format!("vertex {v} has degree {}, not {deg}", t.degree(v)));
        }
    }
    Ok(())
}

fn forbid_edges(t: &Triangulation, edges: &[(Vertex, Vertex)]) -> Result<(), FlipError> {
    match edges.iter().find(|&&(a, b)| t.has_edge(a, b)) {
        Some(&(a, b)) => Err(FlipError::WouldCreateDoubleEdge(a.min(b), a.max(b))),
        None => Ok(()),
    }
}

fn plan(t: &Triangulation, col: &Coloring, site: &FlipSite) -> Result<Plan, FlipError> {
    let n = t.vertex_count();
    if col.len() != n {
        return Err(FlipError::ColoringMismatch);
    }
    let v = site.vertices();
    require_distinct(v, n)?;
    let c = |x: Vertex| col.color(x);
    let plan = match site.kind {
        FlipKind::Bts => {
            let (a, b, cc) = (v[0], v[1], v[2]);
            require_faces(t, &[[a, b, cc]])?;
            let (a2, b2, c2) = (n, n + 1, n + 2);
            Plan {
                remove: vec![[a, b, cc]],
                add: vec![
                    [a, b, c2],
                    [a, b2, cc],
                    [a2, b, cc],
                    [a, b2, c2],
                    [a2, b, c2],
                    [a2, b2, cc],
                    [a2, b2, c2],
                ],
                new_colors: vec![c(a), c(b), c(cc)],
                delete: vec![],
            }
        }
        FlipKind::Btw => {
            let (a2, b2, c2, a, b, cc) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            require_degree(t, &[a2, b2, c2], 4)?;
            let disk = [
                [a, b, c2],
                [a, b2, cc],
                [a2, b, cc],
                [a, b2, c2],
                [a2, b, c2],
                [a2, b2, cc],
                [a2, b2, c2],
            ];
            require_faces(t, &disk)?;
            if t.has_face(a, b, cc) {
                return Err(FlipError::WouldCreateDuplicateFace(sorted_face(a, b, cc)));
            }
            Plan {
                remove: disk.to_vec(),
                add: vec![[a, b, cc]],
                new_colors: vec![],
                delete: vec![a2, b2, c2],
            }
        }
        FlipKind::Bes => {
            let (a, b, cc, d) = (v[0], v[1], v[2], v[3]);
            require_faces(t, &[[a, b, cc], [a, b, d]])?;
            let (a2, b2) = (n, n + 1);
            Plan {
                remove: vec![[a, b, cc], [a, b, d]],
                add: vec![
                    [a, b2, cc],
                    [a2, b, cc],
                    [a, b2, d],
                    [a2, b, d],
                    [a2, b2, cc],
                    [a2, b2, d],
                ],
                new_colors: vec![c(a), c(b)],
                delete: vec![],
            }
        }
        FlipKind::Bew => {
            let (p, q, a, b, cc, d) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            require_degree(t, &[p, q], 4)?;
            let disk = [
                [p, b, cc],
                [p, b, d],
                [p, q, cc],
                [p, q, d],
                [q, a, cc],
                [q, a, d],
            ];
            require_faces(t, &disk)?;
            forbid_edges(t, &[(a, b)])?;
            Plan {
                remove: disk.to_vec(),
                add: vec![[a, b, cc], [a, b, d]],
                new_colors: vec![],
                delete: vec![p, q],
            }
        }
        FlipKind::Ps => {
            let (pv, w, x, y, z) = (v[0], v[1], v[2], v[3], v[4]);
            require_faces(t, &[[pv, w, x], [pv, x, y], [pv, y, z]])?;
            forbid_edges(t, &[(w, z)])?;
            let s = n;
            Plan {
                remove: vec![[pv, w, x], [pv, x, y], [pv, y, z]],
                add: vec![[pv, w, z], [s, w, x], [s, x, y], [s, y, z], [s, w, z]],
                new_colors: vec![c(pv)],
                delete: vec![],
            }
        }
        FlipKind::Pc => {
            let (u, w, x, y, z, pv) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            require_degree(t, &[u], 4)?;
            let star = [[u, w, x], [u, x, y], [u, y, z], [u, z, w]];
            require_faces(t, &star)?;
            require_faces(t, &[[pv, w, z]])?;
            forbid_edges(t, &[(pv, x), (pv, y)])?;
            let mut remove = star.to_vec();
            remove.push([pv, w, z]);
            Plan {
                remove,
                add: vec![[pv, w, x], [pv, x, y], [pv, y, z]],
                new_colors: vec![],
                delete: vec![u],
            }
        }
        FlipKind::NFlip => {
            let (v1, v2, v3, v4, v5, v6) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            let patch = [[v1, v2, v3], [v1, v3, v4], [v1, v4, v6], [v4, v5, v6]];
            require_faces(t, &patch)?;
            forbid_edges(t, &[(v2, v6), (v2, v5), (v3, v5)])?;
            Plan {
                remove: patch.to_vec(),
                add: vec![[v1, v2, v6], [v2, v5, v6], [v2, v3, v5], [v3, v4, v5]],
                new_colors: vec![],
                delete: vec![],
            }
        }
        FlipKind::P2Flip => {
            let (v1, v2, v3, v4, v5, q, p) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
            require_degree(t, &[q, p], 4)?;
            let patch = [
                [v1, v2, v3],
                [v1, v3, q],
                [q, v3, p],
                [p, v3, v4],
                [p, v4, v5],
                [q, p, v5],
                [v1, q, v5],
            ];
            require_faces(t, &patch)?;
            forbid_edges(t, &[(v1, v4)])?;
            let (q2, p2) = (n, n + 1);
            Plan {
                remove: patch.to_vec(),
                add: vec![
                    [v1, v2, q2],
                    [v2, p2, q2],
                    [v2, v3, p2],
                    [p2, v3, v4],
                    [q2, p2, v4],
                    [v1, q2, v4],
                    [v1, v4, v5],
                ],
                new_colors: vec![c(v3), c(v1)],
                delete: vec![q, p],
            }
        }
    };
    Ok(plan)
}

/// Checks whether `site` applies to `t`.
pub fn check_site(t: &Triangulation, col: &Coloring, site: &FlipSite) -> Result<(), FlipError> {
    plan(t, col, site).map(|_| ())
}

/// `map[v]` is the new id of `v` after deleting `deleted`, for every `v < n`.
fn compaction(n: usize, deleted: &[Vertex]) -> Vec<Vertex> {
    let mut gone = vec![false; n];
    for &d in deleted {
        gone[d] = true;
    }
    let mut map = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if !gone[v] {
            map[v] = next;
            next += 1;
        }
    }
    map
}

/// Applies the move and returns the new triangulation and coloring.
pub fn apply_flip(
    t: &Triangulation,
    col: &Coloring,
    site: &FlipSite,
) -> Result<(Triangulation, Coloring), FlipError> {
    apply_flip_tracked(t, col, site).map(|(r, c, _)| (r, c))
}

/// Like [`apply_flip`], also returning where every vertex went. The map is
/// indexed by old ids `0..n` followed by the fresh ids `n, n+1, ...`;
/// removed vertices map to `None`.
pub fn apply_flip_tracked(
    t: &Triangulation,
    col: &Coloring,
    site: &FlipSite,
) -> Result<(Triangulation, Coloring, Vec<Option<Vertex>>), FlipError> {
    let plan = plan(t, col, site)?;
    let n = t.vertex_count();
    let total = n + plan.new_colors.len();

    let removed: HashSet<Face> = plan
        .remove
        .iter()
        .map(|f| sorted_face(f[0], f[1], f[2]))
        .collect();
    let map = compaction(total, &plan.delete);
    let faces = t
        .faces()
        .iter()
        .filter(|f| !removed.contains(*f))
        .chain(plan.add.iter())
        .map(|f| [map[f[0]], map[f[1]], map[f[2]]]);

    let mut colors = vec![0; total - plan.delete.len()];
    for v in 0..total {
        if map[v] != usize::MAX {
            colors[map[v]] = if v < n { col.color(v) } else { plan.new_colors[v - n] };
        }
    }

    let result = Triangulation::from_faces(faces)
        .unwrap_or_else(|e| panic!("local checks for {site} admitted an invalid result: {e}"));
    let coloring = Coloring::new(colors).expect("colors stay in range");
    debug_assert!(coloring.is_proper(&result), "{site} broke the coloring");
    let tracked = map.into_iter().map(|m| (m != usize::MAX).then_some(m)).collect();
    Ok((result, coloring, tracked))
}

/// The move that undoes `site`, expressed on the result of applying it.
/// `result` is the triangulation `apply_flip` produced for `site`.
pub fn inverse_site(site: &FlipSite, result: &Triangulation) -> FlipSite {
    let kind = site.kind();
    let n = (result.vertex_count() as i64 - kind.vertex_delta()) as usize;
    let v = site.vertices();
    let verts = match kind {
        FlipKind::Bts => vec![n, n + 1, n + 2, v[0], v[1], v[2]],
        FlipKind::Bes => vec![n, n + 1, v[0], v[1], v[2], v[3]],
        FlipKind::Ps => vec![n, v[1], v[2], v[3], v[4], v[0]],
        FlipKind::NFlip => vec![v[1], v[0], v[5], v[4], v[3], v[2]],
        FlipKind::Btw => {
            let m = compaction(n, &v[..3]);
            vec![m[v[3]], m[v[4]], m[v[5]]]
        }
        FlipKind::Bew => {
            let m = compaction(n, &v[..2]);
            vec![m[v[2]], m[v[3]], m[v[4]], m[v[5]]]
        }
        FlipKind::Pc => {
            let m = compaction(n, &v[..1]);
            vec![m[v[5]], m[v[1]], m[v[2]], m[v[3]], m[v[4]]]
        }
        FlipKind::P2Flip => {
            let m = compaction(n + 2, &v[5..]);
            vec![m[v[0]], m[v[4]], m[v[3]], m[v[2]], m[v[1]], m[n], m[n + 1]]
        }
    };
    FlipSite {
        kind: kind.inverse(),
        verts,
    }
    .normalized()
}

fn candidates(t: &Triangulation, kind: FlipKind) -> Vec<Vec<Vertex>> {
    let n = t.vertex_count();
    let mut out = Vec::new();
    match kind {
        FlipKind::Bts => out.extend(t.faces().iter().map(|f| f.to_vec())),
        FlipKind::Btw => {
            for f in t.faces() {
                if f.iter().any(|&x| t.degree(x) != 4) {
                    continue;
                }
                let outer = |i: usize| -> Option<Vertex> {
                    let (o1, o2) = (f[(i + 1) % 3], f[(i + 2) % 3]);
                    let common: Vec<_> = t
                        .neighbors(o1)
                        .iter()
                        .filter(|&&x| x != f[i] && t.neighbors(o2).contains(&x))
                        .copied()
                        .collect();
                    (common.len() == 1).then(|| common[0])
                };
                if let (Some(a), Some(b), Some(c)) = (outer(0), outer(1), outer(2)) {
                    out.push(vec![f[0], f[1], f[2], a, b, c]);
                }
            }
        }
        FlipKind::Bes => {
            for (a, b) in t.edges() {
                let [c, d] = t.opposite(a, b).unwrap();
                out.push(vec![a, b, c, d]);
            }
        }
        FlipKind::Bew => {
            for (p, q) in t.edges() {
                if t.degree(p) != 4 || t.degree(q) != 4 {
                    continue;
                }
                let [c, d] = t.opposite(p, q).unwrap();
                let rest = |x: Vertex, y: Vertex| {
                    t.neighbors(x)
                        .iter()
                        .copied()
                        .find(|&w| w != y && w != c && w != d)
                };
                if let (Some(b), Some(a)) = (rest(p, q), rest(q, p)) {
                    out.push(vec![p, q, a, b, c, d]);
                }
            }
        }
        FlipKind::Ps => {
            for v in 0..n {
                let l = t.link(v);
                let k = l.len();
                for i in 0..k {
                    out.push(vec![v, l[i], l[(i + 1) % k], l[(i + 2) % k], l[(i + 3) % k]]);
                }
            }
        }
        FlipKind::Pc => {
            for u in (0..n).filter(|&u| t.degree(u) == 4) {
                let l = t.link(u);
                for i in 0..4 {
                    let (w, x, y, z) = (l[i], l[(i + 3) % 4], l[(i + 2) % 4], l[(i + 1) % 4]);
                    if let Some(v) = t.across(w, z, u) {
                        out.push(vec![u, w, x, y, z, v]);
                    }
                }
            }
        }
        FlipKind::NFlip => {
            for (v1, v4) in t.edges() {
                let [s, r] = t.opposite(v1, v4).unwrap();
                for (v3, v6) in [(s, r), (r, s)] {
                    let v2 = t.across(v1, v3, v4).unwrap();
                    let v5 = t.across(v4, v6, v1).unwrap();
                    out.push(vec![v1, v2, v3, v4, v5, v6]);
                }
            }
        }
        FlipKind::P2Flip => {
            for (a, b) in t.edges() {
                if t.degree(a) != 4 || t.degree(b) != 4 {
                    continue;
                }
                let [s, r] = t.opposite(a, b).unwrap();
                for (q, p) in [(a, b), (b, a)] {
                    for (v3, v5) in [(s, r), (r, s)] {
                        let other = |x: Vertex, y: Vertex| {
                            t.neighbors(x)
                                .iter()
                                .copied()
                                .find(|&w| w != y && w != v3 && w != v5)
                        };
                        let (Some(v1), Some(v4)) = (other(q, p), other(p, q)) else {
                            continue;
                        };
                        if let Some(v2) = t.across(v1, v3, q) {
                            out.push(vec![v1, v2, v3, v4, v5, q, p]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// All sites of `kind` where [`apply_flip`] succeeds, in ascending tuple
/// order.
pub fn enumerate_sites(t: &Triangulation, col: &Coloring, kind: FlipKind) -> Vec<FlipSite> {
    let mut sites: Vec<FlipSite> = candidates(t, kind)
        .into_iter()
        .map(|verts| FlipSite { kind, verts }.normalized())
        .filter(|s| check_site(t, col, s).is_ok())
        .collect();
    sites.sort_unstable();
    sites.dedup();
    sites
}

/// Sites of every kind in `kinds`, grouped by kind in the given order.
pub fn enumerate_all(t: &Triangulation, col: &Coloring, kinds: &[FlipKind]) -> Vec<FlipSite> {
    kinds
        .iter()
        .flat_map(|&k| enumerate_sites(t, col, k))
        .collect()
}
