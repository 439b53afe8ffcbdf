use std::collections::VecDeque;

use thiserror::Error;

use super::triangulation::{Triangulation, Vertex};

/// A color class, one of `0`, `1`, `2`.
pub type Color = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("triangulation is not balanced: no proper 3-coloring exists")]
    NotBalanced,
    #[error("coloring has {got} entries for {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("color {0} is out of range")]
    OutOfRange(u8),
    #[error("edge {{{0}, {1}}} joins two vertices of the same color")]
    Improper(Vertex, Vertex),
}

/// Proper 3-coloring of the vertices of a triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring(Vec<Color>);

impl Coloring {
    /// Wraps raw colors, checking the range only.
    pub fn new(colors: Vec<Color>) -> Result<Self, ColoringError> {
        if let Some(&c) = colors.iter().find(|&&c| c > 2) {
            return Err(ColoringError::OutOfRange(c));
        }
        Ok(Self(colors))
    }

    /// Wraps raw colors and checks that they properly color `t`.
    pub fn for_triangulation(t: &Triangulation, colors: Vec<Color>) -> Result<Self, ColoringError> {
        let col = Self::new(colors)?;
        col.check(t)?;
        Ok(col)
    }

    pub fn check(&self, t: &Triangulation) -> Result<(), ColoringError> {
        if self.0.len() != t.vertex_count() {
            return Err(ColoringError::WrongLength {
                expected: t.vertex_count(),
                got: self.0.len(),
            });
        }
        match t.edges().into_iter().find(|&(a, b)| self.0[a] == self.0[b]) {
            Some((a, b)) => Err(ColoringError::Improper(a, b)),
            None => Ok(()),
        }
    }

    pub fn is_proper(&self, t: &Triangulation) -> bool {
        self.check(t).is_ok()
    }

    pub fn color(&self, v: Vertex) -> Color {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Vertices of color `c`, ascending.
    pub fn class(&self, c: Color) -> Vec<Vertex> {
        (0..self.0.len()).filter(|&v| self.0[v] == c).collect()
    }

    /// Applies `c -> perm[c]` to every vertex.
    pub fn permuted(&self, perm: [Color; 3]) -> Self {
        Self(self.0.iter().map(|&c| perm[c as usize]).collect())
    }

    pub fn into_inner(self) -> Vec<Color> {
        self.0
    }
}

/// Finds the proper 3-coloring of `t`, if any.
///
/// The first face (in sorted order) gets colors `0, 1, 2` in ascending vertex
/// order; every other color is forced by propagation across edges. On a
/// connected triangulation the result is therefore the unique coloring up to
/// a permutation of the colors.
pub fn find_coloring(t: &Triangulation) -> Result<Coloring, ColoringError> {
    const UNSET: Color = u8::MAX;
    let mut color = vec![UNSET; t.vertex_count()];
    let [a, b, c] = t.faces()[0];
    color[a] = 0;
    color[b] = 1;
    color[c] = 2;
    let mut queue = VecDeque::from([(a, b, c), (b, c, a), (a, c, b)]);
    let mut done = std::collections::HashSet::new();
    while let Some((x, y, z)) = queue.pop_front() {
        let key = if x < y { (x, y) } else { (y, x) };
        if !done.insert(key) {
            continue;
        }
        let w = t.across(x, y, z).expect("edge lies in two faces");
        let forced = 3 - color[x] - color[y];
        if color[w] == UNSET {
            color[w] = forced;
        } else if color[w] != forced {
            return Err(ColoringError::NotBalanced);
        }
        queue.push_back((x, w, y));
        queue.push_back((y, w, x));
    }
    debug_assert!(color.iter().all(|&c| c != UNSET));
    Ok(Coloring(color))
}
