//! Even embeddings and their face subdivisions.

use std::collections::HashMap;

use thiserror::Error;

use crate::bipartite::{BipGraph, Part};
use crate::surface::{
    find_coloring, is_isomorphic, ColorMode, Color, Coloring, ColoringError, Face, Triangulation,
    ValidationError, Vertex,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("face subdivision is not a closed surface: {0}")]
    NotASurface(ValidationError),
    #[error(transparent)]
    NotBalanced(#[from] ColoringError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, EmbeddingError> {
    Err(EmbeddingError::InvalidEmbedding(msg.into()))
}

/// Bipartite graph on `0..n` with its facial walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenEmbedding {
    parts: Vec<Part>,
    edges: Vec<(Vertex, Vertex)>,
    walks: Vec<Vec<Vertex>>,
}

impl EvenEmbedding {
    /// Validates and normalizes: edges sorted, each walk rotated to start at
    /// its least vertex in the lexicographically smaller direction, walks
    /// sorted.
    pub fn new(
        parts: Vec<Part>,
        edges: Vec<(Vertex, Vertex)>,
        walks: Vec<Vec<Vertex>>,
    ) -> Result<Self, EmbeddingError> {
        let n = parts.len();
        if let Some(p) = parts.iter().find(|&&p| p > 1) {
            return invalid(format!("part {p} is not 0 or 1"));
        }
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return invalid(format!("edge {{{}, {}}} appears twice", w[0].0, w[0].1));
            }
        }
        let mut slots: HashMap<(Vertex, Vertex), usize> = HashMap::new();
        for &(a, b) in &edges {
            if b >= n {
                return invalid(format!("vertex {b} does not exist"));
            }
            if parts[a] == parts[b] {
                return invalid(format!("edge {{{a}, {b}}} joins one part"));
            }
            slots.insert((a, b), 0);
        }
        let mut norm = Vec::with_capacity(walks.len());
        for walk in walks {
            if walk.len() < 4 || walk.len() % 2 == 1 {
                return invalid(format!("walk of length {} is not even and at least 4", walk.len()));
            }
            for i in 0..walk.len() {
                let (a, b) = (walk[i], walk[(i + 1) % walk.len()]);
                match slots.get_mut(&(a.min(b), a.max(b))) {
                    Some(c) => *c += 1,
                    None => return invalid(format!("walk steps along non-edge {{{a}, {b}}}")),
                }
            }
            norm.push(canonical_walk(&walk));
        }
        if let Some((&(a, b), &c)) = slots.iter().find(|(_, &c)| c != 2) {
            return invalid(format!("edge {{{a}, {b}}} lies on {c} walk sides, expected 2"));
        }
        norm.sort();
        let emb = Self {
            parts,
            edges,
            walks: norm,
        };
        Triangulation::from_faces(emb.cone_faces()).map_err(EmbeddingError::NotASurface)?;
        Ok(emb)
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn walk_count(&self) -> usize {
        self.walks.len()
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn walks(&self) -> &[Vec<Vertex>] {
        &self.walks
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn min_degree(&self) -> usize {
        let mut deg = vec![0; self.vertex_count()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().min().unwrap_or(0)
    }

    /// `V - E + W`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.walk_count() as i64
    }

    pub fn graph(&self) -> BipGraph {
        BipGraph::from_edges(&self.parts, &self.edges).expect("validated")
    }

    fn cone_faces(&self) -> impl Iterator<Item = Face> + '_ {
        let n = self.vertex_count();
        self.walks.iter().enumerate().flat_map(move |(i, w)| {
            (0..w.len()).map(move |j| [w[j], w[(j + 1) % w.len()], n + i])
        })
    }
}

fn canonical_walk(w: &[Vertex]) -> Vec<Vertex> {
    let k = w.len();
    let least = *w.iter().min().unwrap();
    let mut best: Option<Vec<Vertex>> = None;
    for s in (0..k).filter(|&s| w[s] == least) {
        let fwd: Vec<_> = (0..k).map(|i| w[(s + i) % k]).collect();
        let bwd: Vec<_> = (0..k).map(|i| w[(s + k - i) % k]).collect();
        for cand in [fwd, bwd] {
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap()
}

/// Cones every walk from a new vertex. Walk `i` gets vertex `V + i` with
/// color 2; original vertices keep their part as color.
pub fn face_subdivision(h: &EvenEmbedding) -> (Triangulation, Coloring) {
    let t = Triangulation::from_faces(h.cone_faces()).expect("validated");
    let colors = h
        .parts
        .iter()
        .copied()
        .chain(std::iter::repeat_n(2, h.walk_count()))
        .collect();
    let col = Coloring::new(colors).expect("colors in range");
    debug_assert!(col.is_proper(&t));
    (t, col)
}

/// Removes the vertices of color `c`; their links become the walks.
/// Survivors are renumbered in order, and the smaller remaining color
/// becomes part 0.
pub fn delete_color_class(g: &Triangulation, col: &Coloring, c: Color) -> EvenEmbedding {
    let mut id = vec![usize::MAX; g.vertex_count()];
    let mut parts = Vec::new();
    let low = (0..3).find(|&x| x != c).unwrap();
    for (v, slot) in id.iter_mut().enumerate() {
        if col.color(v) != c {
            *slot = parts.len();
            parts.push(u8::from(col.color(v) != low));
        }
    }
    let edges = g
        .edges()
        .into_iter()
        .filter(|&(a, b)| id[a] != usize::MAX && id[b] != usize::MAX)
        .map(|(a, b)| (id[a], id[b]))
        .collect();
    let walks = col
        .class(c)
        .into_iter()
        .map(|v| g.link(v).iter().map(|&u| id[u]).collect())
        .collect();
    EvenEmbedding::new(parts, edges, walks).expect("links of a color class form an even embedding")
}

/// `|V(S(H))|` computed from the embedding alone, as `χ + e(H)`.
pub fn subdivision_vertex_count(h: &EvenEmbedding) -> i64 {
    h.euler_characteristic() + h.edge_count() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No sequence of balanced subdivisions and welds joins the two.
    Unreachable,
    /// The obstruction does not apply.
    Inconclusive,
}

/// Whether some color class of `t` leaves a graph of minimum degree ≥ 3.
pub fn has_thick_deletion(t: &Triangulation, col: &Coloring) -> bool {
    (0..3).any(|c| delete_color_class(t, col, c).min_degree() >= 3)
}

/// Decides whether the subdivision/weld obstruction separates `g` and `h`.
///
/// Returns [`Verdict::Unreachable`] when they are non-isomorphic and one of
/// them has at least as many vertices as the other and a color class whose
/// deletion leaves minimum degree ≥ 3. Triangulations of different surfaces
/// are reported unreachable as well, since every move keeps the surface.
pub fn subdivision_obstruction(
    g: &Triangulation,
    h: &Triangulation,
) -> Result<Verdict, EmbeddingError> {
    let gc = find_coloring(g)?;
    let hc = find_coloring(h)?;
    if g.surface() != h.surface() {
        return Ok(Verdict::Unreachable);
    }
    if is_isomorphic(g, Some(&gc), h, Some(&hc), ColorMode::UpToPermutation).unwrap() {
        return Ok(Verdict::Inconclusive);
    }
    let blocks = |big: &Triangulation, big_col: &Coloring, small: &Triangulation| {
        big.vertex_count() >= small.vertex_count() && has_thick_deletion(big, big_col)
    };
    if blocks(g, &gc, h) || blocks(h, &hc, g) {
        Ok(Verdict::Unreachable)
    } else {
        Ok(Verdict::Inconclusive)
    }
}

/// The 4-cycle with its two square faces on the sphere.
pub fn square_sphere() -> EvenEmbedding {
    EvenEmbedding::new(
        vec![0, 1, 0, 1],
        vec![(0, 1), (1, 2), (2, 3), (0, 3)],
        vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]],
    )
    .unwrap()
}

/// The prism over an even `k`-gon on the sphere: two `k`-gon faces and `k`
/// squares. `prism(4)` is the cube.
pub fn prism(k: usize) -> EvenEmbedding {
    assert!(k >= 4 && k.is_multiple_of(2), "prism needs an even k >= 4");
    let a = |i: usize| i % k;
    let b = |i: usize| k + i % k;
    let parts = (0..k)
        .map(|i| (i % 2) as Part)
        .chain((0..k).map(|i| ((i + 1) % 2) as Part))
        .collect();
    let mut edges = Vec::new();
    let mut walks = vec![(0..k).map(a).collect::<Vec<_>>(), (0..k).map(b).collect()];
    for i in 0..k {
        edges.extend([(a(i), a(i + 1)), (b(i), b(i + 1)), (a(i), b(i))]);
        walks.push(vec![a(i), a(i + 1), b(i + 1), b(i)]);
    }
    EvenEmbedding::new(parts, edges, walks).unwrap()
}

/// `m × n` square grid glued into a Klein bottle: rows wrap plainly, and
/// the last row is glued to the first with `i -> -i`. Needs even
/// `m, n >= 4`.
pub fn klein_grid(m: usize, n: usize) -> EvenEmbedding {
    assert!(m >= 4 && n >= 4 && m.is_multiple_of(2) && n.is_multiple_of(2));
    let id = |i: usize, j: usize| j * m + i % m;
    let up = |i: usize, j: usize| if j + 1 < n { id(i, j + 1) } else { id((m - i % m) % m, 0) };
    let parts = (0..m * n).map(|v| ((v % m + v / m) % 2) as Part).collect();
    let mut edges = Vec::new();
    let mut walks = Vec::new();
    for j in 0..n {
        for i in 0..m {
            edges.push((id(i, j), id(i + 1, j)));
            edges.push((id(i, j), up(i, j)));
            walks.push(vec![id(i, j), id(i + 1, j), up(i + 1, j), up(i, j)]);
        }
    }
    EvenEmbedding::new(parts, edges, walks).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{canonical_code, validate};

    #[test]
    fn square_sphere_subdivides_to_octahedron() {
        let (t, c) = face_subdivision(&square_sphere());
        let octa = validate(&[
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
        assert_eq!(t.vertex_count(), 6);
        assert_eq!(
            canonical_code(&t, None, ColorMode::Ignore),
            canonical_code(&octa, None, ColorMode::Ignore)
        );
        assert!(c.is_proper(&t));
    }

    #[test]
    fn cube_subdivision_counts() {
        let (t, _) = face_subdivision(&prism(4));
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (14, 36, 24));
        assert_eq!(t.euler_characteristic(), 2);
    }

    #[test]
    fn single_edge_walk_is_rejected() {
        let got = EvenEmbedding::new(vec![0, 1], vec![(0, 1)], vec![vec![0, 1]]);
        assert!(matches!(got, Err(EmbeddingError::InvalidEmbedding(_))));
    }

    #[test]
    fn walk_rotation_is_canonical() {
        assert_eq!(canonical_walk(&[5, 2, 7, 3]), vec![2, 5, 3, 7]);
        assert_eq!(canonical_walk(&[3, 7, 2, 5]), vec![2, 5, 3, 7]);
    }

    #[test]
    fn klein_grid_is_non_orientable() {
        let h = klein_grid(4, 4);
        assert_eq!(h.euler_characteristic(), 0);
        let (t, _) = face_subdivision(&h);
        assert!(!t.is_orientable());
        assert_eq!(t.euler_characteristic(), 0);
    }

    #[test]
    fn octahedron_deletion_is_square() {
        let (t, c) = face_subdivision(&square_sphere());
        let h = delete_color_class(&t, &c, 2);
        assert_eq!((h.vertex_count(), h.edge_count(), h.walk_count()), (4, 4, 2));
        assert_eq!(subdivision_vertex_count(&h), 6);
    }
}
