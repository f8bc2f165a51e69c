//! Random walks on simplicial chains.
//!
//! The crate builds oriented simplicial complexes (Rips, Čech, triangulated
//! flat torus), provides chain algebra and combinatorial Laplacians with an
//! exact integer homology backend, simulates the continuous-time walk whose
//! jumps subtract boundaries of cofaces, and uses it for heat flow, scaling
//! studies on the torus and hole localization by simulated annealing.

pub mod chain;
pub mod complex;
pub mod error;
pub mod heat;
pub mod holes;
pub mod io;
pub mod rng;
pub mod sparse;
pub mod spectral;
pub mod torus;
pub mod walk;

pub use chain::{
    boundary, coboundary, is_cycle, loop_chain, Chain, Coefficient, IntChain, RealChain,
};
pub use complex::{
    build_annulus_triangulation, build_cech, build_rips, build_torus_triangulation, sample_annulus,
    validate_closure, Metric, PointCloud, Simplex, SimplicialComplex, VertexId, Violation,
};
pub use error::{Error, Result};
pub use holes::{
    anneal, cutoff, energy, localize, seed_cycle, AnnealResult, AnnealSchedule, HoleReport,
};
pub use sparse::SparseMatrix;
pub use walk::{
    simulate, simulate_many, JumpEvent, StopReason, Trajectory, Transition, WalkConfig,
};
