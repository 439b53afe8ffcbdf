//! Abstract bipartite graphs, the six local operations on them, and the
//! normalizer that rewrites a mixed sequence into forward operations only.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::surface::Vertex;

/// Side of the bipartition, `0` or `1`.
pub type Part = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BipError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(Vertex),
    #[error("vertex id {0} is already in use")]
    IdInUse(Vertex),
    #[error("edge {{{0}, {1}}} joins vertices of the same part")]
    SamePart(Vertex, Vertex),
    #[error("vertex {v} has degree {degree}, expected {expected}")]
    WrongDegree {
        v: Vertex,
        degree: usize,
        expected: usize,
    },
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
}

/// Simple bipartite graph on stable vertex ids. Ids need not be contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BipGraph {
    part: BTreeMap<Vertex, Part>,
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl BipGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on `0..parts.len()` with the given sides and edges.
    pub fn from_edges(parts: &[Part], edges: &[(Vertex, Vertex)]) -> Result<Self, BipError> {
        let mut g = Self::new();
        for (v, &p) in parts.iter().enumerate() {
            g.add_vertex(v, p)?;
        }
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex, part: Part) -> Result<(), BipError> {
        if self.part.contains_key(&v) {
            return Err(BipError::IdInUse(v));
        }
        self.part.insert(v, part & 1);
        self.adj.insert(v, BTreeSet::new());
        Ok(())
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), BipError> {
        let (pa, pb) = (self.part_of(a)?, self.part_of(b)?);
        if pa == pb {
            return Err(BipError::SamePart(a, b));
        }
        self.adj.get_mut(&a).unwrap().insert(b);
        self.adj.get_mut(&b).unwrap().insert(a);
        Ok(())
    }

    fn remove_edge(&mut self, a: Vertex, b: Vertex) {
        self.adj.get_mut(&a).unwrap().remove(&b);
        self.adj.get_mut(&b).unwrap().remove(&a);
    }

    fn remove_vertex(&mut self, v: Vertex) {
        for u in self.adj.remove(&v).unwrap() {
            self.adj.get_mut(&u).unwrap().remove(&v);
        }
        self.part.remove(&v);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.part.contains_key(&v)
    }

    fn part_of(&self, v: Vertex) -> Result<Part, BipError> {
        self.part.get(&v).copied().ok_or(BipError::UnknownVertex(v))
    }

    /// Side of `v`. Panics if `v` is absent.
    pub fn part(&self, v: Vertex) -> Part {
        self.part[&v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.part.keys().copied()
    }

    pub fn neighbors(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.adj[&v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn vertex_count(&self) -> usize {
        self.part.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.adj
            .iter()
            .flat_map(|(&a, n)| n.range(a + 1..).map(move |&b| (a, b)))
            .collect()
    }

    /// Smallest degree, `0` for the empty graph.
    pub fn min_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).min().unwrap_or(0)
    }

    /// One past the largest id in use.
    pub fn next_id(&self) -> Vertex {
        self.part.keys().next_back().map_or(0, |&v| v + 1)
    }

    fn other_neighbor(&self, v: Vertex, not: Vertex) -> Vertex {
        *self.adj[&v].iter().find(|&&x| x != not).unwrap()
    }
}

/// The six operations. Fields named like new vertices carry the id the
/// operation will give them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BipOp {
    /// Pendant edge `vw` with new `w`.
    I { v: Vertex, w: Vertex },
    /// Edge `uv` becomes the path `u p q v`.
    II {
        u: Vertex,
        v: Vertex,
        p: Vertex,
        q: Vertex,
    },
    /// New `w` joined to `x` and `y`, which share the neighbor `z`.
    III {
        x: Vertex,
        y: Vertex,
        z: Vertex,
        w: Vertex,
    },
    /// Deletes the pendant vertex `w`.
    IPrime { w: Vertex },
    /// The path `u p q v` through degree-2 `p, q` becomes the edge `uv`.
    IIPrime {
        u: Vertex,
        p: Vertex,
        q: Vertex,
        v: Vertex,
    },
    /// Deletes the degree-2 vertex `w`.
    IIIPrime { w: Vertex },
}

impl BipOp {
    pub fn is_forward(&self) -> bool {
        matches!(self, BipOp::I { .. } | BipOp::II { .. } | BipOp::III { .. })
    }

    pub fn new_vertices(&self) -> Vec<Vertex> {
        match *self {
            BipOp::I { w, .. } | BipOp::III { w, .. } => vec![w],
            BipOp::II { p, q, .. } => vec![p, q],
            _ => vec![],
        }
    }

    /// Renames the vertices the operation refers to in the graph it acts on;
    /// new vertex ids are kept.
    fn relabel(self, f: impl Fn(Vertex) -> Vertex) -> Self {
        match self {
            BipOp::I { v, w } => BipOp::I { v: f(v), w },
            BipOp::II { u, v, p, q } => BipOp::II {
                u: f(u),
                v: f(v),
                p,
                q,
            },
            BipOp::III { x, y, z, w } => BipOp::III {
                x: f(x),
                y: f(y),
                z: f(z),
                w,
            },
            BipOp::IPrime { w } => BipOp::IPrime { w: f(w) },
            BipOp::IIPrime { u, p, q, v } => BipOp::IIPrime {
                u: f(u),
                p: f(p),
                q: f(q),
                v: f(v),
            },
            BipOp::IIIPrime { w } => BipOp::IIIPrime { w: f(w) },
        }
    }

    fn rename_new(self, f: &mut impl FnMut(Vertex) -> Vertex) -> Self {
        match self {
            BipOp::I { v, w } => BipOp::I { v, w: f(w) },
            BipOp::II { u, v, p, q } => {
                let p = f(p);
                BipOp::II { u, v, p, q: f(q) }
            }
            BipOp::III { x, y, z, w } => BipOp::III { x, y, z, w: f(w) },
            op => op,
        }
    }
}

impl fmt::Display for BipOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BipOp::I { v, w } => write!(f, "I {v} {w}"),
            BipOp::II { u, v, p, q } => write!(f, "II {u} {v} {p} {q}"),
            BipOp::III { x, y, z, w } => write!(f, "III {x} {y} {z} {w}"),
            BipOp::IPrime { w } => write!(f, "I' {w}"),
            BipOp::IIPrime { u, p, q, v } => write!(f, "II' {u} {p} {q} {v}"),
            BipOp::IIIPrime { w } => write!(f, "III' {w}"),
        }
    }
}

fn need_degree(h: &BipGraph, v: Vertex, expected: usize) -> Result<(), BipError> {
    h.part_of(v)?;
    match h.degree(v) {
        d if d == expected => Ok(()),
        degree => Err(BipError::WrongDegree {
            v,
            degree,
            expected,
        }),
    }
}

/// Whether the adjacent degree-2 vertices `p, q` lie on no 4-cycle.
pub fn is_smoothable(h: &BipGraph, p: Vertex, q: Vertex) -> Result<bool, BipError> {
    need_degree(h, p, 2)?;
    need_degree(h, q, 2)?;
    if !h.has_edge(p, q) {
        return Err(BipError::NotApplicable(format!("{p} and {q} are not adjacent")));
    }
    let u = h.other_neighbor(p, q);
    let v = h.other_neighbor(q, p);
    Ok(!h.has_edge(u, v))
}

/// Whether the degree-2 vertex `w` lies on a 4-cycle.
pub fn is_removable(h: &BipGraph, w: Vertex) -> Result<bool, BipError> {
    need_degree(h, w, 2)?;
    let mut it = h.neighbors(w).iter();
    let (x, y) = (*it.next().unwrap(), *it.next().unwrap());
    Ok(h.neighbors(x)
        .iter()
        .any(|&z| z != w && h.has_edge(z, y)))
}

fn fresh(h: &BipGraph, v: Vertex) -> Result<(), BipError> {
    if h.contains(v) {
        Err(BipError::IdInUse(v))
    } else {
        Ok(())
    }
}

fn not_applicable<T>(msg: String) -> Result<T, BipError> {
    Err(BipError::NotApplicable(msg))
}

pub fn apply_bip(h: &BipGraph, op: &BipOp) -> Result<BipGraph, BipError> {
    let mut g = h.clone();
    match *op {
        BipOp::I { v, w } => {
            let pv = h.part_of(v)?;
            fresh(h, w)?;
            g.add_vertex(w, 1 - pv)?;
            g.add_edge(v, w)?;
        }
        BipOp::II { u, v, p, q } => {
            if !h.has_edge(u, v) {
                return not_applicable(format!("{{{u}, {v}}} is not an edge"));
            }
            fresh(h, p)?;
            fresh(h, q)?;
            if p == q {
                return Err(BipError::IdInUse(p));
            }
            g.remove_edge(u, v);
            g.add_vertex(p, h.part(v))?;
            g.add_vertex(q, h.part(u))?;
            g.add_edge(u, p)?;
            g.add_edge(p, q)?;
            g.add_edge(q, v)?;
        }
        BipOp::III { x, y, z, w } => {
            h.part_of(x)?;
            h.part_of(y)?;
            h.part_of(z)?;
            if x == y || !h.has_edge(x, z) || !h.has_edge(y, z) {
                return not_applicable(format!("{z} is not a common neighbor of {x} and {y}"));
            }
            fresh(h, w)?;
            g.add_vertex(w, 1 - h.part(x))?;
            g.add_edge(x, w)?;
            g.add_edge(w, y)?;
        }
        BipOp::IPrime { w } => {
            need_degree(h, w, 1)?;
            g.remove_vertex(w);
        }
        BipOp::IIPrime { u, p, q, v } => {
            if !is_smoothable(h, p, q)? {
                return not_applicable(format!("{{{p}, {q}}} lies on a 4-cycle"));
            }
            if h.other_neighbor(p, q) != u || h.other_neighbor(q, p) != v {
                return not_applicable(format!("{u} {p} {q} {v} is not a path"));
            }
            g.remove_vertex(p);
            g.remove_vertex(q);
            g.add_edge(u, v)?;
        }
        BipOp::IIIPrime { w } => {
            if !is_removable(h, w)? {
                return not_applicable(format!("{w} lies on no 4-cycle"));
            }
            g.remove_vertex(w);
        }
    }
    Ok(g)
}

/// Applies `ops` in order, returning every intermediate graph (start
/// included). On failure reports the index of the offending operation.
pub fn replay_bip(h: &BipGraph, ops: &[BipOp]) -> Result<Vec<BipGraph>, (usize, BipError)> {
    let mut out = vec![h.clone()];
    for (i, op) in ops.iter().enumerate() {
        let next = apply_bip(out.last().unwrap(), op).map_err(|e| (i, e))?;
        out.push(next);
    }
    Ok(out)
}

/// Every applicable operation, forward ones first. New vertices take ids
/// from `next_id` on.
pub fn enumerate_ops(h: &BipGraph, next_id: Vertex) -> Vec<BipOp> {
    let (a, b) = (next_id, next_id + 1);
    let mut out: Vec<BipOp> = h.vertices().map(|v| BipOp::I { v, w: a }).collect();
    for (u, v) in h.edges() {
        out.push(BipOp::II { u, v, p: a, q: b });
    }
    for x in h.vertices() {
        let mut seen = BTreeSet::new();
        for &z in h.neighbors(x) {
            for &y in h.neighbors(z) {
                if y > x && seen.insert(y) {
                    out.push(BipOp::III { x, y, z, w: a });
                }
            }
        }
    }
    for w in h.vertices() {
        match h.degree(w) {
            1 => out.push(BipOp::IPrime { w }),
            2 => {
                if is_removable(h, w) == Ok(true) {
                    out.push(BipOp::IIIPrime { w });
                }
                for &q in h.neighbors(w).iter().filter(|&&q| q > w) {
                    if is_smoothable(h, w, q) == Ok(true) {
                        let (u, v) = (h.other_neighbor(w, q), h.other_neighbor(q, w));
                        out.push(BipOp::IIPrime { u, p: w, q, v });
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Relabeling-invariant form of a bipartite graph; equal for exactly the
/// isomorphic graphs (isomorphism of the underlying graphs).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BipCode {
    n: usize,
    edges: Vec<(u32, u32)>,
}

/// Canonical code and the labeling realizing it (`id -> position`).
pub fn canonical_bip(h: &BipGraph) -> (BipCode, BTreeMap<Vertex, usize>) {
    let ids: Vec<Vertex> = h.vertices().collect();
    let index: HashMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|v| h.neighbors(*v).iter().map(|u| index[u]).collect())
        .collect();
    let n = ids.len();
    let colors = refine(&adj, ids.iter().map(|&v| h.degree(v)).collect());
    let mut best: Option<Leaf> = None;
    search_canon(&adj, colors, &mut best);
    let (edges, order) = best.unwrap_or_default();
    let labeling = ids.iter().enumerate().map(|(i, &v)| (v, order[i])).collect();
    (BipCode { n, edges }, labeling)
}

/// Refines `colors` to the coarsest equitable partition below it. Colors
/// are dense ranks afterwards.
fn refine(adj: &[Vec<usize>], colors: Vec<usize>) -> Vec<usize> {
    let (mut colors, mut count) = rank(&colors, |v| colors[v]);
    loop {
        let sig = |v: usize| {
            let mut s: Vec<usize> = adj[v].iter().map(|&u| colors[u]).collect();
            s.sort_unstable();
            (colors[v], s)
        };
        let (next, next_count) = rank(&colors, sig);
        if next_count == count {
            return next;
        }
        count = next_count;
        colors = next;
    }
}

fn rank<K: Ord>(colors: &[usize], key: impl Fn(usize) -> K) -> (Vec<usize>, usize) {
    let keys: Vec<K> = (0..colors.len()).map(&key).collect();
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    let out = keys
        .iter()
        .map(|k| sorted.binary_search(&k).unwrap())
        .collect();
    (out, sorted.len())
}

type Leaf = (Vec<(u32, u32)>, Vec<usize>);

fn search_canon(adj: &[Vec<usize>], colors: Vec<usize>, best: &mut Option<Leaf>) {
    let n = colors.len();
    let mut size = vec![0; n];
    for &c in &colors {
        size[c] += 1;
    }
    let target = (0..n).find(|&c| size[c] > 1);
    let Some(cell) = target else {
        let mut edges: Vec<(u32, u32)> = (0..n)
            .flat_map(|a| {
                let colors = &colors;
                adj[a].iter().filter(move |&&b| a < b).map(move |&b| {
                    let (x, y) = (colors[a] as u32, colors[b] as u32);
                    (x.min(y), x.max(y))
                })
            })
            .collect();
        edges.sort_unstable();
        if best.as_ref().is_none_or(|(e, _)| edges < *e) {
            *best = Some((edges, colors));
        }
        return;
    };
    let mut tried: Vec<usize> = Vec::new();
    for v in (0..n).filter(|&v| colors[v] == cell) {
        // Vertices with equal neighborhoods are swapped by an automorphism
        // fixing everything else; one of them is enough.
        let mut nv = adj[v].clone();
        nv.sort_unstable();
        if tried.iter().any(|&t| {
            let mut nt = adj[t].clone();
            nt.sort_unstable();
            nt == nv
        }) {
            continue;
        }
        tried.push(v);
        let split: Vec<usize> = (0..n)
            .map(|u| 2 * colors[u] + usize::from(colors[u] == cell && u != v))
            .collect();
        search_canon(adj, refine(adj, split), best);
    }
}

pub fn is_isomorphic_bip(a: &BipGraph, b: &BipGraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && canonical_bip(a).0 == canonical_bip(b).0
}

/// An isomorphism `a -> b` as an id map, if one exists.
pub fn bip_isomorphism(a: &BipGraph, b: &BipGraph) -> Option<BTreeMap<Vertex, Vertex>> {
    let (ca, la) = canonical_bip(a);
    let (cb, lb) = canonical_bip(b);
    if ca != cb {
        return None;
    }
    let inv: HashMap<usize, Vertex> = lb.into_iter().map(|(v, p)| (p, v)).collect();
    Some(la.into_iter().map(|(v, p)| (v, inv[&p])).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("start graph has minimum degree {0}, need at least 3")]
    PreconditionViolated(usize),
    #[error("operation {index} ({op}) does not apply: {source}")]
    InvalidSequence {
        index: usize,
        op: BipOp,
        source: BipError,
    },
    #[error("rewrite budget of {0} steps exceeded")]
    BudgetExceeded(usize),
    #[error("no rewrite matched ({0})")]
    Unmatched(String),
}

type Map = HashMap<Vertex, Vertex>;

fn look(map: &Map, v: Vertex) -> Vertex {
    map.get(&v).copied().unwrap_or(v)
}

/// Rewrites `seq` into a sequence of forward operations from `h` whose
/// result is isomorphic to the result of `seq`.
///
/// Repeatedly takes the first inverse operation; everything before it is
/// forward, so the pair it forms with its predecessor can be cancelled,
/// replaced by a single forward operation, or the inverse can be moved one
/// step earlier and the argument repeated on the shorter prefix. The
/// relabeling each rewrite induces is pushed through the rest of the
/// sequence. At most `|seq|^2` rewrites are performed.
pub fn normalize_sequence(h: &BipGraph, seq: &[BipOp]) -> Result<Vec<BipOp>, NormalizeError> {
    if h.min_degree() < 3 {
        return Err(NormalizeError::PreconditionViolated(h.min_degree()));
    }
    if let Err((index, source)) = replay_bip(h, seq) {
        return Err(NormalizeError::InvalidSequence {
            index,
            op: seq[index],
            source,
        });
    }

    // Give every created vertex an id never used before, so maps between
    // graphs never collide with later creations.
    let mut used: BTreeSet<Vertex> = h.vertices().collect();
    let top = seq
        .iter()
        .flat_map(|op| op.new_vertices())
        .chain(h.vertices())
        .max()
        .unwrap_or(0);
    let mut next = top + 1;
    let mut rename = Map::new();
    let mut ops = Vec::with_capacity(seq.len());
    for op in seq {
        let op = op.relabel(|v| look(&rename, v)).rename_new(&mut |v| {
            if used.insert(v) {
                v
            } else {
                let w = next;
                next += 1;
                used.insert(w);
                rename.insert(v, w);
                w
            }
        });
        ops.push(op);
    }

    let mut n = Normalizer {
        h,
        fresh: next,
        steps: 0,
        limit: (seq.len() * seq.len()).max(1),
    };
    while let Some(t) = ops.iter().position(|op| !op.is_forward()) {
        let (mut out, map) = n.eliminate(&ops[..t], ops[t])?;
        out.extend(ops[t + 1..].iter().map(|op| op.relabel(|v| look(&map, v))));
        ops = repair_witnesses(h, out);
    }
    Ok(ops)
}

/// Replays `ops`, replacing any stale witness of a (III) by the smallest
/// valid one.
fn repair_witnesses(h: &BipGraph, ops: Vec<BipOp>) -> Vec<BipOp> {
    let mut g = h.clone();
    let mut out = Vec::with_capacity(ops.len());
    for op in ops {
        let op = with_witness(&g, op);
        if let Ok(next) = apply_bip(&g, &op) {
            g = next;
        }
        out.push(op);
    }
    out
}

fn with_witness(g: &BipGraph, op: BipOp) -> BipOp {
    match op {
        BipOp::III { x, y, z, w } if !(g.has_edge(x, z) && g.has_edge(y, z)) => {
            let z = g
                .contains(x)
                .then(|| g.neighbors(x).iter().copied().find(|&z| g.has_edge(y, z)))
                .flatten()
                .unwrap_or(z);
            BipOp::III { x, y, z, w }
        }
        op => op,
    }
}

struct Normalizer<'a> {
    h: &'a BipGraph,
    fresh: Vertex,
    steps: usize,
    limit: usize,
}

/// Isomorphism `from -> to` that is the identity on shared ids and matches
/// the (at most three) remaining ids by trying every pairing.
fn swap_iso(from: &BipGraph, to: &BipGraph) -> Option<Map> {
    if from.vertex_count() != to.vertex_count() || from.edge_count() != to.edge_count() {
        return None;
    }
    let a: Vec<_> = from.vertices().filter(|&v| !to.contains(v)).collect();
    let b: Vec<_> = to.vertices().filter(|&v| !from.contains(v)).collect();
    if a.len() > 3 {
        return None;
    }
    permutations(&b).into_iter().find_map(|perm| {
        let map: Map = a.iter().copied().zip(perm).collect();
        is_iso_map(from, to, &map).then_some(map)
    })
}

fn permutations(v: &[Vertex]) -> Vec<Vec<Vertex>> {
    if v.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn is_iso_map(from: &BipGraph, to: &BipGraph, map: &Map) -> bool {
    from.vertex_count() == to.vertex_count()
        && from.edge_count() == to.edge_count()
        && from.vertices().map(|v| look(map, v)).collect::<BTreeSet<_>>().len()
            == from.vertex_count()
        && from.vertices().all(|v| {
            let m = look(map, v);
            to.contains(m) && to.part(m) == from.part(v)
        })
        && from
            .edges()
            .into_iter()
            .all(|(x, y)| to.has_edge(look(map, x), look(map, y)))
}

fn compose(outer: &Map, inner: &Map, domain: &BipGraph) -> Map {
    domain
        .vertices()
        .map(|v| (v, look(outer, look(inner, v))))
        .collect()
}

impl Normalizer<'_> {
    fn graphs(&self, prefix: &[BipOp]) -> BipGraph {
        replay_bip(self.h, prefix).unwrap().pop().unwrap()
    }

    /// Turns `prefix` (forward only) followed by the inverse operation
    /// `inv` into forward operations, together with an isomorphism from the
    /// original result to the new one.
    fn eliminate(
        &mut self,
        prefix: &[BipOp],
        inv: BipOp,
    ) -> Result<(Vec<BipOp>, Map), NormalizeError> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(NormalizeError::BudgetExceeded(self.limit));
        }
        let m = prefix.len();
        if m == 0 {
            return Err(NormalizeError::Unmatched(format!(
                "{inv} applies to the start graph"
            )));
        }
        let g2 = self.graphs(&prefix[..m - 1]);
        let o = prefix[m - 1];
        let g1 = apply_bip(&g2, &o).unwrap();
        let gt = apply_bip(&g1, &inv).unwrap();
        let keep = prefix[..m - 1].to_vec();
        let unmatched = |case: &str| NormalizeError::Unmatched(format!("{case}: {o} then {inv}"));

        // The pair collapses: the result is the graph before `o`.
        let cancel = |case: &str| -> Result<(Vec<BipOp>, Map), NormalizeError> {
            let map = swap_iso(&gt, &g2).ok_or_else(|| unmatched(case))?;
            Ok((keep.clone(), map))
        };

        let (ops, map) = match inv {
            BipOp::IPrime { w } => {
                let v = *g1.neighbors(w).iter().next().unwrap();
                if !g2.contains(w) {
                    return cancel("pendant added then removed");
                }
                let v2 = *g2
                    .neighbors(w)
                    .iter()
                    .next()
                    .ok_or_else(|| unmatched("isolated pendant"))?;
                if v != v2 {
                    // `o` subdivided the pendant edge: hang a new pendant on w.
                    let x = self.take_fresh();
                    let add = BipOp::I { v: w, w: x };
                    let target = apply_bip(&g2, &add).unwrap();
                    let map = swap_iso(&gt, &target).ok_or_else(|| unmatched("subdivided pendant"))?;
                    let mut ops = keep;
                    ops.push(add);
                    (ops, map)
                } else {
                    self.commute(prefix, o, BipOp::IPrime { w }, &gt)?
                }
            }
            BipOp::IIPrime { p, q, .. } => {
                let both = g2.contains(p) && g2.contains(q);
                if both && is_smoothable(&g2, p, q) == Ok(true) {
                    let u2 = g2.other_neighbor(p, q);
                    let v2 = g2.other_neighbor(q, p);
                    let splits_end = matches!(o, BipOp::II { u, v, .. }
                        if [(u2, p), (p, u2), (q, v2), (v2, q)].contains(&(u, v)));
                    if splits_end {
                        return cancel("subdivided end of smoothable pair");
                    }
                    self.commute(prefix, o, BipOp::IIPrime { u: u2, p, q, v: v2 }, &gt)?
                } else if !g2.contains(p) || !g2.contains(q) {
                    return cancel("pair created by the previous step");
                } else if let Some(r) = [q, p].into_iter().find(|&r| g2.degree(r) == 1) {
                    // One end was pendant before `o` gave it a second edge.
                    let (ops, psi) = self.eliminate(&prefix[..m - 1], BipOp::IPrime { w: r })?;
                    let mid = apply_bip(&g2, &BipOp::IPrime { w: r }).unwrap();
                    let sigma = swap_iso(&gt, &mid).ok_or_else(|| unmatched("pendant pair"))?;
                    let map = compose(&psi, &sigma, &gt);
                    (ops, map)
                } else {
                    return cancel("4-cycle through the pair was subdivided");
                }
            }
            BipOp::IIIPrime { w } => {
                if g2.contains(w) && is_removable(&g2, w) == Ok(true) {
                    self.commute(prefix, o, BipOp::IIIPrime { w }, &gt)?
                } else if !g2.contains(w) {
                    return cancel("vertex added then removed");
                } else if g2.degree(w) == 1 {
                    let BipOp::III { x, y, w: added, .. } = o else {
                        return Err(unmatched("pendant gained a 4-cycle"));
                    };
                    let u = if x == w { y } else { x };
                    let (mut ops, psi) = self.eliminate(&prefix[..m - 1], BipOp::IPrime { w })?;
                    let mid = apply_bip(&g2, &BipOp::IPrime { w }).unwrap();
                    let mid = apply_bip(&mid, &BipOp::I { v: u, w: added }).unwrap();
                    let sigma = swap_iso(&gt, &mid).ok_or_else(|| unmatched("pendant rerouted"))?;
                    ops.push(BipOp::I {
                        v: look(&psi, u),
                        w: added,
                    });
                    (ops, compose(&psi, &sigma, &gt))
                } else {
                    return cancel("4-cycle closed by the previous step");
                }
            }
            _ => unreachable!("eliminate takes inverse operations"),
        };

        let result = self.graphs(&ops);
        if !is_iso_map(&gt, &result, &map) {
            return Err(unmatched("relabeling check failed"));
        }
        Ok((ops, map))
    }

    /// Moves `inv` in front of `o`: eliminate it from the shorter prefix,
    /// then replay `o` on the relabeled result.
    fn commute(
        &mut self,
        prefix: &[BipOp],
        o: BipOp,
        inv: BipOp,
        gt: &BipGraph,
    ) -> Result<(Vec<BipOp>, Map), NormalizeError> {
        let m = prefix.len();
        let (mut ops, psi) = self.eliminate(&prefix[..m - 1], inv)?;
        let before = self.graphs(&ops);
        let moved = with_witness(&before, o.relabel(|v| look(&psi, v)));
        ops.push(moved);
        let map = gt.vertices().map(|v| (v, look(&psi, v))).collect();
        Ok((ops, map))
    }

    fn take_fresh(&mut self) -> Vertex {
        self.fresh += 1;
        self.fresh - 1
    }
}
