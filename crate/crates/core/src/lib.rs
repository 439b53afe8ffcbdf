//! Balanced triangulations of closed surfaces and the local moves between
//! them.
//!
//! - [`surface`]: validated triangulations, colorings, canonical codes.
//! - [`flips`]: the eight moves, site enumeration and inverses.
//! - [`rewrites`]: moves expressed through other moves.
//! - [`bipartite`]: operations on bipartite graphs and sequence normalization.
//! - [`embeddings`]: even embeddings, face subdivision, the subdivision obstruction.
//! - [`explorer`]: named triangulations, flip-graph search, sampling.
//! - [`io`]: text formats.

pub mod bipartite;
pub mod embeddings;
pub mod explorer;
pub mod flips;
pub mod io;
pub mod rewrites;
pub mod surface;

pub use bipartite::{apply_bip, normalize_sequence, BipGraph, BipOp};
pub use embeddings::{delete_color_class, face_subdivision, subdivision_obstruction, EvenEmbedding, Verdict};
pub use explorer::{bfs, classify, connect, random_walk, Caps, Classification, FlipGraphView};
pub use flips::{apply_flip, enumerate_sites, inverse_site, FlipError, FlipKind, FlipSite};
pub use surface::{
    canonical_code, find_coloring, is_isomorphic, validate, CanonicalCode, Color, ColorMode,
    Coloring, Face, Surface, Triangulation, Vertex,
};
