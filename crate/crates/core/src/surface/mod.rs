//! Closed-surface triangulations: validation, topology, colorings and
//! canonical codes.

mod canon;
mod coloring;
mod triangulation;

pub use canon::{
    canonical_code, canonical_form, is_isomorphic, isomorphism, CanonError, CanonicalCode,
    CanonicalForm, ColorMode,
};
pub use coloring::{find_coloring, Color, Coloring, ColoringError};
pub use triangulation::{sorted_face, validate, Face, Surface, Triangulation, ValidationError, Vertex};
