//! Boundary matrices, combinatorial Laplacians, eigenvalues, exact integer
//! homology and the Hodge decomposition.

mod eigen;
mod homology;
mod laplacian;
mod snf;

pub use eigen::{
    cg_solve, lanczos_largest, smallest_positive_iterative, spectrum, symmetric_eigen, up_extremes,
    EigenRequest, DENSE_LIMIT,
};
pub use homology::{
    betti_exact, betti_numbers, betti_spectral, harmonic_basis, harmonic_projection,
    hodge_decomposition, homology_generators, in_boundary_image, kernel_projection, BoundaryImage,
    HodgeParts,
};
pub use laplacian::{
    adjacency_form, boundary_matrix, down_laplacian, hodge_laplacian, laplacian, up_laplacian,
    LaplacianKind,
};
pub use snf::{smith_normal_form, BigMatrix, SnfResult};
