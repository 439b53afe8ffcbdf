//! Canonical codes for triangulations.
//!
//! A code is produced by a breadth-first relabeling that starts from a flag
//! (vertex, incident edge, side). Each dequeued vertex emits its degree, its
//! color (depending on the mode) and the labels of its neighbors in rotation
//! order. Rotations are carried from vertex to vertex consistently with the
//! local orientation, so one start flag determines the whole labeled face set.
//! Trying every flag at a minimum-degree vertex, in both orientations, and
//! keeping the least code yields an invariant of unoriented isomorphism.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use super::coloring::Coloring;
use super::triangulation::{Triangulation, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ColorMode {
    /// Colors are not part of the code.
    Ignore,
    /// Isomorphisms must preserve every color.
    Fixed,
    /// Isomorphisms may permute the three colors.
    #[default]
    UpToPermutation,
}

impl ColorMode {
    fn tag(self) -> u8 {
        match self {
            ColorMode::Ignore => 0,
            ColorMode::Fixed => 1,
            ColorMode::UpToPermutation => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("color mode {0:?} needs a coloring")]
    MissingColoring(ColorMode),
    #[error("coloring does not match the triangulation")]
    ColoringMismatch,
}

/// Relabeling-independent byte encoding of a triangulation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    bytes: Vec<u8>,
    mode: ColorMode,
}

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn mode(&self) -> ColorMode {
        self.mode
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hex = self.to_hex();
        if hex.len() > 24 {
            write!(f, "CanonicalCode({:?}, {}…)", self.mode, &hex[..24])
        } else {
            write!(f, "CanonicalCode({:?}, {})", self.mode, hex)
        }
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Canonical code plus the labeling that realizes it: `labeling[v]` is the
/// position of `v` in canonical order.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    pub labeling: Vec<Vertex>,
}

pub fn canonical_code(
    t: &Triangulation,
    coloring: Option<&Coloring>,
    mode: ColorMode,
) -> Result<CanonicalCode, CanonError> {
    canonical_form(t, coloring, mode).map(|f| f.code)
}

pub fn canonical_form(
    t: &Triangulation,
    coloring: Option<&Coloring>,
    mode: ColorMode,
) -> Result<CanonicalForm, CanonError> {
    let colors = match (mode, coloring) {
        (ColorMode::Ignore, _) => None,
        (_, None) => return Err(CanonError::MissingColoring(mode)),
        (_, Some(c)) if c.len() != t.vertex_count() => return Err(CanonError::ColoringMismatch),
        (_, Some(c)) => Some(c.as_slice()),
    };

    let n = t.vertex_count();
    let min_deg = (0..n).map(|v| t.degree(v)).min().unwrap();
    let mut search = Search {
        t,
        colors,
        mode,
        best: Vec::new(),
        best_labeling: Vec::new(),
        code: Vec::new(),
        label: vec![UNSET; n],
        queue: Vec::with_capacity(n),
    };
    for v in (0..n).filter(|&v| t.degree(v) == min_deg) {
        let link = t.link(v);
        let k = link.len();
        for i in 0..k {
            search.run(v, link[i], link[(i + 1) % k]);
            search.run(v, link[i], link[(i + k - 1) % k]);
        }
    }

    let body_max = n.max(3) as u32;
    let width: u8 = if body_max <= u8::MAX as u32 {
        1
    } else if body_max <= u16::MAX as u32 {
        2
    } else {
        4
    };
    let mut bytes = Vec::with_capacity(10 + search.best.len() * width as usize);
    bytes.push(mode.tag());
    bytes.extend_from_slice(&(n as u32).to_be_bytes());
    bytes.extend_from_slice(&(t.face_count() as u32).to_be_bytes());
    bytes.push(width);
    for &x in &search.best {
        match width {
            1 => bytes.push(x as u8),
            2 => bytes.extend_from_slice(&(x as u16).to_be_bytes()),
            _ => bytes.extend_from_slice(&x.to_be_bytes()),
        }
    }
    Ok(CanonicalForm {
        code: CanonicalCode { bytes, mode },
        labeling: search.best_labeling,
    })
}

/// Whether the two triangulations are isomorphic under `mode`.
pub fn is_isomorphic(
    a: &Triangulation,
    a_col: Option<&Coloring>,
    b: &Triangulation,
    b_col: Option<&Coloring>,
    mode: ColorMode,
) -> Result<bool, CanonError> {
    if a.vertex_count() != b.vertex_count() || a.face_count() != b.face_count() {
        return Ok(false);
    }
    Ok(canonical_code(a, a_col, mode)? == canonical_code(b, b_col, mode)?)
}

/// An isomorphism `a -> b` as a vertex map, if one exists under `mode`.
pub fn isomorphism(
    a: &Triangulation,
    a_col: Option<&Coloring>,
    b: &Triangulation,
    b_col: Option<&Coloring>,
    mode: ColorMode,
) -> Result<Option<Vec<Vertex>>, CanonError> {
    let fa = canonical_form(a, a_col, mode)?;
    let fb = canonical_form(b, b_col, mode)?;
    if fa.code != fb.code {
        return Ok(None);
    }
    let mut inv_b = vec![0; fb.labeling.len()];
    for (v, &pos) in fb.labeling.iter().enumerate() {
        inv_b[pos] = v;
    }
    Ok(Some(fa.labeling.iter().map(|&pos| inv_b[pos]).collect()))
}

const UNSET: usize = usize::MAX;

struct Search<'a> {
    t: &'a Triangulation,
    colors: Option<&'a [u8]>,
    mode: ColorMode,
    best: Vec<u32>,
    best_labeling: Vec<Vertex>,
    code: Vec<u32>,
    label: Vec<usize>,
    queue: Vec<(Vertex, Vertex, Vertex)>,
}

impl Search<'_> {
    /// Relabels from the flag at `v` whose rotation starts at `first` and
    /// continues towards `second`. Keeps the result if it beats the best code.
    fn run(&mut self, v: Vertex, first: Vertex, second: Vertex) {
        let t = self.t;
        self.code.clear();
        self.queue.clear();
        self.label.fill(UNSET);
        let mut color_map = [u8::MAX; 3];
        let mut next_color = 0u8;
        let mut order = if self.best.is_empty() {
            Ordering::Less
        } else {
            Ordering::Equal
        };

        macro_rules! emit {
            ($x:expr) => {{
                let x = $x as u32;
                if order == Ordering::Equal {
                    match x.cmp(&self.best[self.code.len()]) {
                        Ordering::Greater => return,
                        o => order = o,
                    }
                }
                self.code.push(x);
            }};
        }

        let (mode, colors) = (self.mode, self.colors);
        let mut next_label = 0;
        macro_rules! discover {
            ($y:expr) => {{
                let y = $y;
                self.label[y] = next_label;
                next_label += 1;
                if let (ColorMode::UpToPermutation, Some(c)) = (mode, colors) {
                    let c = c[y] as usize;
                    if color_map[c] == u8::MAX {
                        color_map[c] = next_color;
                        next_color += 1;
                    }
                }
            }};
        }

        discover!(v);
        self.queue.push((v, first, second));
        let mut head = 0;
        while head < self.queue.len() {
            let (x, start, toward) = self.queue[head];
            head += 1;
            let link = t.link(x);
            let k = link.len();
            let pos = link.iter().position(|&y| y == start).unwrap();
            let forward = link[(pos + 1) % k] == toward;
            debug_assert!(forward || link[(pos + k - 1) % k] == toward);
            let at = |i: usize| {
                if forward {
                    link[(pos + i) % k]
                } else {
                    link[(pos + k - i % k) % k]
                }
            };

            emit!(k);
            match (self.mode, self.colors) {
                (ColorMode::Fixed, Some(c)) => emit!(c[x]),
                (ColorMode::UpToPermutation, Some(c)) => emit!(color_map[c[x] as usize]),
                _ => {}
            }
            for i in 0..k {
                let y = at(i);
                if self.label[y] == UNSET {
                    discover!(y);
                    // Entering y from x keeps the orientation: y's rotation
                    // starts at x and runs towards the neighbor that precedes
                    // y around x.
                    self.queue.push((y, x, at(i + k - 1)));
                }
                emit!(self.label[y]);
            }
        }

        if order == Ordering::Less {
            std::mem::swap(&mut self.best, &mut self.code);
            self.best_labeling.clone_from(&self.label);
        }
    }
}
