use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Vertex identifier. Vertices of a triangulation are always `0..n`.
pub type Vertex = usize;

/// A face as a sorted vertex triple.
pub type Face = [Vertex; 3];

/// Returns the triple in ascending order.
pub fn sorted_face(a: Vertex, b: Vertex, c: Vertex) -> Face {
    let mut f = [a, b, c];
    f.sort_unstable();
    f
}

fn edge_key(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("face list is empty")]
    Empty,
    #[error("face {{{}, {}, {}}} repeats a vertex", .0[0], .0[1], .0[2])]
    DegenerateFace(Face),
    #[error("face {{{}, {}, {}}} appears more than once", .0[0], .0[1], .0[2])]
    DuplicateFace(Face),
    #[error("vertex {0} does not lie on any face")]
    UnusedVertex(Vertex),
    #[error("edge {{{0}, {1}}} lies in {2} faces instead of 2")]
    NonManifoldEdge(Vertex, Vertex, usize),
    #[error("link of vertex {0} is not a single cycle")]
    PinchedVertex(Vertex),
    #[error("faces do not form a connected surface")]
    Disconnected,
}

impl ValidationError {
    /// Same error with vertex ids shifted by one, for messages that refer to
    /// the 1-based ids used on disk.
    pub fn one_based(&self) -> Self {
        let f = |x: &Face| [x[0] + 1, x[1] + 1, x[2] + 1];
        match self {
            Self::DegenerateFace(x) => Self::DegenerateFace(f(x)),
            Self::DuplicateFace(x) => Self::DuplicateFace(f(x)),
            Self::UnusedVertex(v) => Self::UnusedVertex(v + 1),
            Self::NonManifoldEdge(a, b, k) => Self::NonManifoldEdge(a + 1, b + 1, *k),
            Self::PinchedVertex(v) => Self::PinchedVertex(v + 1),
            other => other.clone(),
        }
    }
}

/// Topological type of a closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    Orientable { genus: u32 },
    NonOrientable { crosscaps: u32 },
}

impl Surface {
    pub fn is_orientable(&self) -> bool {
        matches!(self, Surface::Orientable { .. })
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Surface::Orientable { genus: 0 } => write!(f, "sphere"),
            Surface::Orientable { genus: 1 } => write!(f, "torus"),
            Surface::Orientable { genus } => write!(f, "orientable surface of genus {genus}"),
            Surface::NonOrientable { crosscaps: 1 } => write!(f, "projective plane"),
            Surface::NonOrientable { crosscaps: 2 } => write!(f, "Klein bottle"),
            Surface::NonOrientable { crosscaps } => {
                write!(f, "non-orientable surface with {crosscaps} crosscaps")
            }
        }
    }
}

/// A triangulation of a closed connected surface, stored as its face set.
///
/// A simplicial closed surface is determined by its faces, so no rotation
/// system is kept; the per-vertex links provide the cyclic order whenever one
/// is needed.
#[derive(Debug, Clone)]
pub struct Triangulation {
    faces: Vec<Face>,
    neighbors: Vec<Vec<Vertex>>,
    links: Vec<Vec<Vertex>>,
    opposite: HashMap<(Vertex, Vertex), [Vertex; 2]>,
    orientable: bool,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.faces == other.faces
    }
}

impl Eq for Triangulation {}

/// Validates a face list. See [`Triangulation::from_faces`].
pub fn validate(faces: &[Face]) -> Result<Triangulation, ValidationError> {
    Triangulation::from_faces(faces.iter().copied())
}

impl Triangulation {
    /// Builds and validates a triangulation from unordered vertex triples.
    ///
    /// Vertex ids must be exactly `0..n`. Every edge must lie in two faces,
    /// every link must be one cycle and the faces must be connected.
    pub fn from_faces<I>(faces: I) -> Result<Self, ValidationError>
    where
        I: IntoIterator<Item = Face>,
    {
        let mut faces: Vec<Face> = faces
            .into_iter()
            .map(|f| {
                let s = sorted_face(f[0], f[1], f[2]);
                if s[0] == s[1] || s[1] == s[2] {
                    Err(ValidationError::DegenerateFace(f))
                } else {
                    Ok(s)
                }
            })
            .collect::<Result<_, _>>()?;
        if faces.is_empty() {
            return Err(ValidationError::Empty);
        }
        faces.sort_unstable();
        if let Some(w) = faces.windows(2).find(|w| w[0] == w[1]) {
            return Err(ValidationError::DuplicateFace(w[0]));
        }

        let n = faces.iter().map(|f| f[2]).max().unwrap() + 1;
        let mut used = vec![false; n];
        for f in &faces {
            for &v in f {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(ValidationError::UnusedVertex(v));
        }

        let mut incidences: HashMap<(Vertex, Vertex), Vec<Vertex>> = HashMap::new();
        for &[a, b, c] in &faces {
            incidences.entry((a, b)).or_default().push(c);
            incidences.entry((b, c)).or_default().push(a);
            incidences.entry((a, c)).or_default().push(b);
        }
        let mut bad: Vec<_> = incidences
            .iter()
            .filter(|(_, v)| v.len() != 2)
            .map(|(&(a, b), v)| (a, b, v.len()))
            .collect();
        bad.sort_unstable();
        if let Some(&(a, b, k)) = bad.first() {
            return Err(ValidationError::NonManifoldEdge(a, b, k));
        }
        let opposite: HashMap<_, _> = incidences
            .into_iter()
            .map(|(e, v)| (e, if v[0] < v[1] { [v[0], v[1]] } else { [v[1], v[0]] }))
            .collect();

        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in opposite.keys() {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }

        let mut links = Vec::with_capacity(n);
        for (v, nb) in neighbors.iter().enumerate() {
            links.push(trace_link(v, nb, &opposite).ok_or(ValidationError::PinchedVertex(v))?);
        }

        let orientable = orient(&faces, &opposite)?;

        Ok(Self {
            faces,
            neighbors,
            links,
            opposite,
            orientable,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.opposite.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Faces as sorted triples in ascending order.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// All edges `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<_> = self.opposite.keys().copied().collect();
        e.sort_unstable();
        e
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors[v].len()
    }

    /// The link of `v` as a cyclic vertex sequence. It starts at the smallest
    /// neighbor and proceeds towards the smaller of that neighbor's two
    /// cyclic successors.
    pub fn link(&self, v: Vertex) -> &[Vertex] {
        &self.links[v]
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.opposite.contains_key(&edge_key(a, b))
    }

    pub fn has_face(&self, a: Vertex, b: Vertex, c: Vertex) -> bool {
        self.opposite
            .get(&edge_key(a, b))
            .is_some_and(|o| o.contains(&c))
    }

    /// Third vertices of the two faces on edge `ab`, ascending.
    pub fn opposite(&self, a: Vertex, b: Vertex) -> Option<[Vertex; 2]> {
        self.opposite.get(&edge_key(a, b)).copied()
    }

    /// Third vertex of the face on edge `ab` that is not `abc`.
    pub fn across(&self, a: Vertex, b: Vertex, c: Vertex) -> Option<Vertex> {
        let [x, y] = self.opposite(a, b)?;
        if x == c {
            Some(y)
        } else if y == c {
            Some(x)
        } else {
            None
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn surface(&self) -> Surface {
        let deficit = (2 - self.euler_characteristic()) as u32;
        if self.orientable {
            Surface::Orientable { genus: deficit / 2 }
        } else {
            Surface::NonOrientable { crosscaps: deficit }
        }
    }

    /// Applies a vertex relabeling `v -> perm[v]`; `perm` must be a
    /// permutation of `0..n`.
    pub fn relabeled(&self, perm: &[Vertex]) -> Self {
        assert_eq!(perm.len(), self.vertex_count());
        Self::from_faces(
            self.faces
                .iter()
                .map(|f| [perm[f[0]], perm[f[1]], perm[f[2]]]),
        )
        .expect("relabeling preserves validity")
    }
}

/// Walks the link of `v`. Returns `None` unless it is one cycle through all
/// neighbors.
fn trace_link(
    v: Vertex,
    nb: &[Vertex],
    opposite: &HashMap<(Vertex, Vertex), [Vertex; 2]>,
) -> Option<Vec<Vertex>> {
    let start = nb[0];
    let [p, q] = opposite[&edge_key(v, start)];
    let mut cycle = Vec::with_capacity(nb.len());
    cycle.push(start);
    let (mut prev, mut cur) = (start, p.min(q));
    while cur != start {
        if cycle.len() > nb.len() {
            return None;
        }
        cycle.push(cur);
        let [x, y] = opposite[&edge_key(v, cur)];
        let next = if x == prev { y } else { x };
        prev = cur;
        cur = next;
    }
    (cycle.len() == nb.len() && cycle.len() >= 3).then_some(cycle)
}

/// Direction of edge `(x, y)`, `x < y`, in the ascending orientation of a
/// sorted face.
fn edge_direction(f: &Face, x: Vertex, y: Vertex) -> i8 {
    if (f[0], f[1]) == (x, y) || (f[1], f[2]) == (x, y) {
        1
    } else {
        -1
    }
}

/// Two-colors the faces by relative orientation. Returns whether the surface
/// is orientable, or `Disconnected` if some face is unreachable.
fn orient(
    faces: &[Face],
    opposite: &HashMap<(Vertex, Vertex), [Vertex; 2]>,
) -> Result<bool, ValidationError> {
    let index: HashMap<Face, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut sign = vec![0i8; faces.len()];
    let mut orientable = true;
    let mut queue = VecDeque::from([0usize]);
    sign[0] = 1;
    let mut seen = 1;
    while let Some(i) = queue.pop_front() {
        let f = faces[i];
        for (x, y, z) in [(f[0], f[1], f[2]), (f[1], f[2], f[0]), (f[0], f[2], f[1])] {
            let [p, q] = opposite[&(x, y)];
            let w = if p == z { q } else { p };
            let g = sorted_face(x, y, w);
            let j = index[&g];
            let want = -sign[i] * edge_direction(&f, x, y) * edge_direction(&g, x, y);
            if sign[j] == 0 {
                sign[j] = want;
                seen += 1;
                queue.push_back(j);
            } else if sign[j] != want {
                orientable = false;
            }
        }
    }
    if seen != faces.len() {
        return Err(ValidationError::Disconnected);
    }
    Ok(orientable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(faces: &[[usize; 3]]) -> Vec<Face> {
        faces.iter().map(|f| [f[0] - 1, f[1] - 1, f[2] - 1]).collect()
    }

    fn octahedron() -> Triangulation {
        validate(&one_based(&[
            [1, 3, 5],
            [1, 3, 6],
            [1, 4, 5],
            [1, 4, 6],
            [2, 3, 5],
            [2, 3, 6],
            [2, 4, 5],
            [2, 4, 6],
        ]))
        .unwrap()
    }

    #[test]
    fn octahedron_counts() {
        let t = octahedron();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (6, 12, 8));
        assert_eq!(t.euler_characteristic(), 2);
        assert!(t.is_orientable());
        assert_eq!(t.surface(), Surface::Orientable { genus: 0 });
        for v in 0..6 {
            assert_eq!(t.degree(v), 4);
            assert_eq!(t.link(v).len(), 4);
        }
    }

    #[test]
    fn tetrahedron_is_a_sphere() {
        let t = validate(&one_based(&[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]])).unwrap();
        assert_eq!(t.euler_characteristic(), 2);
        assert_eq!(t.surface().to_string(), "sphere");
    }

    #[test]
    fn edge_in_three_faces_is_rejected() {
        let err = validate(&one_based(&[
            [1, 2, 3],
            [1, 2, 4],
            [1, 3, 4],
            [2, 3, 4],
            [1, 2, 5],
        ]))
        .unwrap_err();
        assert_eq!(err, ValidationError::NonManifoldEdge(0, 1, 3));
    }

    #[test]
    fn degenerate_and_duplicate_faces() {
        assert!(matches!(
            validate(&[[0, 0, 1]]),
            Err(ValidationError::DegenerateFace(_))
        ));
        assert!(matches!(
            validate(&[[0, 1, 2], [2, 1, 0]]),
            Err(ValidationError::DuplicateFace([0, 1, 2]))
        ));
        assert_eq!(validate(&[]), Err(ValidationError::Empty));
    }

    #[test]
    fn gap_in_vertex_ids_is_rejected() {
        let faces = [[0, 1, 2], [0, 1, 4], [0, 2, 4], [1, 2, 4]];
        assert_eq!(validate(&faces), Err(ValidationError::UnusedVertex(3)));
    }

    #[test]
    fn two_tetrahedra_are_disconnected() {
        let mut faces = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        faces.extend(faces.clone().iter().map(|f| [f[0] + 4, f[1] + 4, f[2] + 4]));
        assert_eq!(validate(&faces), Err(ValidationError::Disconnected));
    }

    #[test]
    fn pinched_vertex_is_rejected() {
        // Two octahedra glued at a single vertex: vertex 0's link is two 4-cycles.
        let oct = octahedron();
        let mut faces: Vec<Face> = oct.faces().to_vec();
        let map = |v: usize| if v == 0 { 0 } else { v + 5 };
        faces.extend(oct.faces().iter().map(|f| [map(f[0]), map(f[1]), map(f[2])]));
        assert_eq!(validate(&faces), Err(ValidationError::PinchedVertex(0)));
    }

    #[test]
    fn projective_plane_is_non_orientable() {
        // Six-vertex real projective plane.
        let t = validate(&[
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 5, 1],
            [1, 2, 4],
            [2, 3, 5],
            [3, 4, 1],
            [4, 5, 2],
            [5, 1, 3],
        ])
        .unwrap();
        assert_eq!(t.euler_characteristic(), 1);
        assert!(!t.is_orientable());
        assert_eq!(t.surface(), Surface::NonOrientable { crosscaps: 1 });
    }

    #[test]
    fn degree_sum_and_face_lookup() {
        let t = octahedron();
        let deg: usize = (0..6).map(|v| t.degree(v)).sum();
        assert_eq!(deg, 2 * t.edge_count());
        assert_eq!(2 * t.edge_count(), 3 * t.face_count());
        assert!(t.has_face(4, 2, 0));
        assert!(!t.has_edge(0, 1));
        assert_eq!(t.across(0, 2, 4), Some(5));
    }
}
