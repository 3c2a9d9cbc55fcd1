//! Bi-resolving and bi-covering graph homomorphisms.
//!
//! The crate decides whether a bi-resolving or bi-covering homomorphism exists
//! between two finite directed multigraphs and constructs one, extends
//! bi-resolving homomorphisms to bi-covering ones with irreducible domains, and
//! uses those extensions to enlarge a bi-closing code between shifts of finite
//! type into an exactly `n`-to-1 code.

pub mod cli;
pub mod connectivity;
pub mod error;
pub mod extension;
pub mod graph;
pub mod homomorphism;
pub mod io;
pub mod matrix;
pub mod report;
pub mod shift;
pub mod spectral;
pub mod synthesis;

pub use error::{Error, GraphError, HomError, Hypothesis, Result};
pub use graph::{higher_graph, Edge, Graph, HigherGraph, Path};
pub use homomorphism::{
    higher_homomorphism, matrix_relations, resolving_profile, Homomorphism, ResolvingProfile,
    SubamalgamationMatrix,
};
pub use matrix::IntMatrix;
