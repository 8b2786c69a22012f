//! Heuristic Steiner minimal trees for point sets in the hyperbolic plane,
//! using the Klein-Beltrami model.
//!
//! The crate provides:
//!
//! - exact Klein-model primitives (distances, barycenters, exponential and
//!   logarithmic maps, wrapped Gaussian sampling) in [`klein`],
//! - hyperbolic Delaunay triangulation via the Euclidean power-diagram
//!   reduction and the hyperbolic minimum spanning tree in [`triangulation`],
//! - local full-Steiner-tree solvers built on isoptic curves in [`fermat`],
//! - fixed-topology refinement by Riemannian gradient descent in [`opt`],
//! - the deterministic and randomized tree-construction heuristics in
//!   [`heuristics`],
//! - a Neighbor-Joining baseline embedded back into the disk in [`nj`],
//! - synthetic dataset generators and point-file ingestion in [`datagen`].

pub mod datagen;
pub mod error;
pub mod fermat;
pub mod heuristics;
pub mod klein;
pub mod nj;
pub mod opt;
pub mod solve;
pub mod tree;
pub mod triangulation;

mod hull;

pub use error::{Error, Result};
pub use klein::{GaussianSpec, KleinPoint, TangentVector};
pub use solve::{Method, SolveResult};
pub use tree::Tree;
