//! Rainbow, pin and colour CSS codes built from products of levelled
//! bipartite graphs.
//!
//! Pipeline: [`graph`] factors → [`product`] flags and the coloured
//! simplex graph → [`subgraph`] maximal/rainbow supports → [`code`] check
//! matrices and logicals → [`distance`], [`triorth`], [`contraction`].

pub mod code;
pub mod contraction;
pub mod distance;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod io;
pub mod product;
pub mod subgraph;
pub mod triorth;

pub use error::{Error, Result};
pub use code::{assemble, Assignment, Class, CssCode, Side};
pub use gf2::{BitMatrix, BitVec, EchelonBasis, IncrementalBasis};
pub use graph::LevelledGraph;
pub use product::{ProductGraph, SimplexGraph};
