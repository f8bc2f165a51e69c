use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::sparse::SparseMatrix;

/// Matrix of `∂_k : C_k → C_{k-1}`, `|S_{k-1}| × |S_k|`. For `k = 0` it has
/// no rows.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize) -> SparseMatrix<i64> {
    let cols = complex.count(k);
    if k == 0 {
        return SparseMatrix::zeros(0, cols);
    }
    let rows = complex.count(k - 1);
    let mut trips = Vec::with_capacity(cols * (k + 1));
    for id in 0..cols {
        for &(f, s) in complex.faces_of(k, id) {
            trips.push((f, id, s as i64));
        }
    }
    SparseMatrix::from_triplets(rows, cols, trips)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    Up,
    Down,
    Full,
}

/// `L_k^↑ = ∂_{k+1} ∂_{k+1}^*`.
pub fn up_laplacian(complex: &SimplicialComplex, k: usize) -> SparseMatrix<i64> {
    let b = boundary_matrix(complex, k + 1);
    if b.cols() == 0 {
        return SparseMatrix::zeros(complex.count(k), complex.count(k));
    }
    b.matmul(&b.transpose())
}

/// `L_k^↓ = ∂_k^* ∂_k`.
pub fn down_laplacian(complex: &SimplicialComplex, k: usize) -> SparseMatrix<i64> {
    let b = boundary_matrix(complex, k);
    if k == 0 {
        return SparseMatrix::zeros(complex.count(0), complex.count(0));
    }
    b.transpose().matmul(&b)
}

pub fn hodge_laplacian(complex: &SimplicialComplex, k: usize) -> SparseMatrix<i64> {
    up_laplacian(complex, k).add(&down_laplacian(complex, k))
}

pub fn laplacian(complex: &SimplicialComplex, k: usize, kind: LaplacianKind) -> SparseMatrix<i64> {
    match kind {
        LaplacianKind::Up => up_laplacian(complex, k),
        LaplacianKind::Down => down_laplacian(complex, k),
        LaplacianKind::Full => hodge_laplacian(complex, k),
    }
}

fn position_sign(big: &[VertexId], small: &[VertexId]) -> i64 {
    let i = big.iter().position(|v| !small.contains(v)).unwrap();
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `L_k` assembled from degrees and oriented adjacencies,
/// `(D_k - A^↑) + ((k+1) Id + A^↓)` for `k >= 1` and `D - A` for `k = 0`.
/// `A^↑(σ, σ')` is `-1` when the two simplices induce the same sign in their
/// common coface and `+1` otherwise; `A^↓(σ, σ')` is `+1` when their common
/// face carries the same sign in both. Pairs that share a coface contribute
/// to both terms.
pub fn adjacency_form(complex: &SimplicialComplex, k: usize) -> SparseMatrix<i64> {
    let n = complex.count(k);
    let simplices = complex.simplices(k);
    let mut trips: Vec<(usize, usize, i64)> = Vec::new();

    let mut by_coface: HashMap<Vec<VertexId>, Vec<(usize, i64)>> = HashMap::new();
    for tau in complex.simplices(k + 1) {
        let tv = tau.vertices();
        let members = by_coface.entry(tv.to_vec()).or_default();
        for skip in 0..tv.len() {
            let face: Vec<VertexId> = tv
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            let s = Simplex::new(face.clone()).expect("faces have distinct vertices");
            let id = complex.id_of(&s).expect("complex is closed under faces");
            members.push((id, position_sign(tv, &face)));
        }
    }
    let mut degree = vec![0i64; n];
    for members in by_coface.values() {
        for &(a, sa) in members {
            degree[a] += 1;
            for &(b, sb) in members {
                if a != b {
                    // D - A^↑ with A^↑ = -sa·sb
                    trips.push((a, b, sa * sb));
                }
            }
        }
    }
    for (i, d) in degree.into_iter().enumerate() {
        trips.push((i, i, d));
    }

    if k >= 1 {
        let mut by_face: HashMap<Vec<VertexId>, Vec<(usize, i64)>> = HashMap::new();
        for (id, s) in simplices.iter().enumerate() {
            let sv = s.vertices();
            for skip in 0..sv.len() {
                let face: Vec<VertexId> = sv
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                by_face.entry(face).or_default().push((id, sign));
            }
        }
        for i in 0..n {
            trips.push((i, i, (k + 1) as i64));
        }
        for members in by_face.values() {
            for &(a, sa) in members {
                for &(b, sb) in members {
                    if a != b {
                        trips.push((a, b, sa * sb));
                    }
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, trips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_torus_triangulation, SimplicialComplex};

    #[test]
    fn boundary_of_boundary_vanishes() {
        let c = build_torus_triangulation(4).unwrap();
        let p = boundary_matrix(&c, 1).matmul(&boundary_matrix(&c, 2));
        assert_eq!(p.nnz(), 0);
    }

    #[test]
    fn graph_laplacian_of_path() {
        let c = SimplicialComplex::from_simplices(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        let l = up_laplacian(&c, 0);
        assert_eq!(l.get(1, 1), 2);
        assert_eq!(l.get(0, 1), -1);
        assert_eq!(l.get(0, 2), 0);
        assert_eq!(adjacency_form(&c, 0), l);
    }

    #[test]
    fn adjacency_form_matches_product_form_on_torus() {
        let c = build_torus_triangulation(4).unwrap();
        assert_eq!(adjacency_form(&c, 1), hodge_laplacian(&c, 1));
        assert_eq!(adjacency_form(&c, 2), hodge_laplacian(&c, 2));
    }

    #[test]
    fn laplacians_are_symmetric() {
        let c = build_torus_triangulation(6).unwrap();
        for k in 0..=2 {
            assert!(hodge_laplacian(&c, k).is_symmetric());
        }
    }
}
