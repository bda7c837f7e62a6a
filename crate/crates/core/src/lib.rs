//! Torus embeddings of directed graphs from the phases of magnetic
//! Laplacian eigenvectors, with spectral diagnostics.

pub mod charge;
pub mod diagnostics;
pub mod eigen;
pub mod embedding;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod laplacian;
pub mod pipeline;

pub use charge::Charge;
pub use error::{Error, Result};
pub use graph::{DirectedGraph, SpanningTree, SymmetrizedView};
pub use laplacian::{build_magnetic_laplacian, MagneticLaplacian};
