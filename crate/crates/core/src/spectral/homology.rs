use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::chain::{IntChain, RealChain};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

use super::eigen::symmetric_eigen;
use super::laplacian::{boundary_matrix, down_laplacian, hodge_laplacian, up_laplacian};
use super::snf::{smith_normal_form, SnfResult};

fn rank_of(b: &SparseMatrix<i64>) -> usize {
    if b.nnz() == 0 {
        0
    } else {
        smith_normal_form(b, false).rank()
    }
}

/// `β_k = |S_k| - rank ∂_k - rank ∂_{k+1}`, from exact integer ranks.
pub fn betti_exact(complex: &SimplicialComplex, k: usize) -> usize {
    let n = complex.count(k);
    if n == 0 {
        return 0;
    }
    n - rank_of(&boundary_matrix(complex, k)) - rank_of(&boundary_matrix(complex, k + 1))
}

pub fn betti_numbers(complex: &SimplicialComplex) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=complex.top_dim() + 1)
        .map(|k| rank_of(&boundary_matrix(complex, k)))
        .collect();
    (0..=complex.top_dim())
        .map(|k| complex.count(k) - ranks[k] - ranks[k + 1])
        .collect()
}

/// Number of eigenvalues of the Hodge Laplacian `L_k` at most `tol`.
pub fn betti_spectral(complex: &SimplicialComplex, k: usize, tol: f64) -> usize {
    let l = hodge_laplacian(complex, k).to_f64().to_dense();
    symmetric_eigen(&l)
        .0
        .into_iter()
        .filter(|&v| v <= tol)
        .count()
}

/// Orthonormal basis of `ker L_k` as matrix columns.
pub fn harmonic_basis(complex: &SimplicialComplex, k: usize, tol: f64) -> DMatrix<f64> {
    let l = hodge_laplacian(complex, k).to_f64().to_dense();
    let (vals, vecs) = symmetric_eigen(&l);
    let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= tol).collect();
    DMatrix::from_fn(vals.len(), cols.len(), |r, c| vecs[(r, cols[c])])
}

/// Orthogonal projection of `x` onto the kernel of a symmetric operator.
pub fn kernel_projection(op: &SparseMatrix<f64>, x: &[f64], tol: f64) -> Vec<f64> {
    let (vals, vecs) = symmetric_eigen(&op.to_dense());
    let xv = DVector::from_column_slice(x);
    let mut out = DVector::zeros(x.len());
    for (i, &v) in vals.iter().enumerate() {
        if v <= tol {
            let col = vecs.column(i);
            out += col * col.dot(&xv);
        }
    }
    out.as_slice().to_vec()
}

fn range_projection(op: &DMatrix<f64>, x: &DVector<f64>, tol: f64) -> DVector<f64> {
    let (vals, vecs) = symmetric_eigen(op);
    let mut out = DVector::zeros(x.len());
    for (i, &v) in vals.iter().enumerate() {
        if v > tol {
            let col = vecs.column(i);
            out += col * col.dot(x);
        }
    }
    out
}

pub fn harmonic_projection(
    complex: &SimplicialComplex,
    omega: &RealChain,
    tol: f64,
) -> Result<RealChain> {
    omega.check_in(complex)?;
    let k = omega.dim();
    let x = omega.to_dense(complex.count(k));
    let p = kernel_projection(&hodge_laplacian(complex, k).to_f64(), &x, tol);
    Ok(RealChain::from_dense(k, &p, 0.0))
}

/// `ω = gradient + curl + harmonic` with `gradient ∈ im ∂_k^*`,
/// `curl ∈ im ∂_{k+1}` and `harmonic ∈ ker L_k`.
#[derive(Clone, Debug)]
pub struct HodgeParts {
    pub gradient: RealChain,
    pub curl: RealChain,
    pub harmonic: RealChain,
}

pub fn hodge_decomposition(
    complex: &SimplicialComplex,
    omega: &RealChain,
    tol: f64,
) -> Result<HodgeParts> {
    omega.check_in(complex)?;
    let k = omega.dim();
    let x = DVector::from_column_slice(&omega.to_dense(complex.count(k)));
    let curl = range_projection(&up_laplacian(complex, k).to_f64().to_dense(), &x, tol);
    let grad = range_projection(&down_laplacian(complex, k).to_f64().to_dense(), &x, tol);
    let harm = &x - &curl - &grad;
    Ok(HodgeParts {
        gradient: RealChain::from_dense(k, grad.as_slice(), 0.0),
        curl: RealChain::from_dense(k, curl.as_slice(), 0.0),
        harmonic: RealChain::from_dense(k, harm.as_slice(), 0.0),
    })
}

fn unit_vectors(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

fn integer_kernel(a: &SparseMatrix<i64>) -> Vec<Vec<BigInt>> {
    if a.nnz() == 0 {
        return unit_vectors(a.cols());
    }
    smith_normal_form(a, true)
        .kernel_basis()
        .expect("transforms were tracked")
}

/// Indices of a greedy subset of `vectors` whose harmonic coordinates are
/// linearly independent.
fn independent_subset(vectors: &[Vec<BigInt>], h: &DMatrix<f64>) -> Vec<usize> {
    let mut frame: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if frame.len() == h.ncols() {
            break;
        }
        let x = DVector::from_iterator(v.len(), v.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)));
        let mut coords = h.transpose() * &x;
        let scale = coords.norm();
        for f in &frame {
            let d = f.dot(&coords);
            coords -= f * d;
        }
        if coords.norm() > 1e-8 * scale.max(1.0) {
            frame.push(coords.normalize());
            out.push(i);
        }
    }
    out
}

fn to_chain(k: usize, v: &[BigInt]) -> Result<IntChain> {
    let mut chain = IntChain::zero(k);
    for (i, c) in v.iter().enumerate() {
        if !c.is_zero() {
            let c = c.to_i64().ok_or(Error::Overflow("homology generator"))?;
            chain.add_term(i, c)?;
        }
    }
    Ok(chain)
}

/// Integer `k`-cycles whose classes form a basis of the free part of `H_k`.
///
/// Cycles come from the Smith normal form of `∂_k`, cocycles from that of
/// `∂_{k+1}^T`. Pairing every cycle against `β_k` independent cocycles maps
/// `Z_k` onto a lattice of rank `β_k`; a lattice basis is read off the Smith
/// normal form of the pairing matrix.
pub fn homology_generators(
    complex: &SimplicialComplex,
    k: usize,
    tol: f64,
) -> Result<Vec<IntChain>> {
    let h = harmonic_basis(complex, k, tol);
    let beta = h.ncols();
    if beta == 0 {
        return Ok(Vec::new());
    }
    let n = complex.count(k);
    let cycles = if k == 0 {
        unit_vectors(n)
    } else {
        integer_kernel(&boundary_matrix(complex, k))
    };
    let cocycles = integer_kernel(&boundary_matrix(complex, k + 1).transpose());
    let cocycles: Vec<&Vec<BigInt>> = independent_subset(&cocycles, &h)
        .into_iter()
        .map(|i| &cocycles[i])
        .collect();
    let mut pairing = Vec::new();
    for (i, z) in cycles.iter().enumerate() {
        for (j, w) in cocycles.iter().enumerate() {
            let p: BigInt = z.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            if !p.is_zero() {
                let p = p.to_i64().ok_or(Error::Overflow("cycle pairing"))?;
                pairing.push((i, j, p));
            }
        }
    }
    let pairing = SparseMatrix::from_triplets(cycles.len(), cocycles.len(), pairing);
    let snf = smith_normal_form(&pairing, true);
    if snf.rank() != beta {
        return Err(Error::Solver(format!(
            "pairing rank {} differs from β_{k} = {beta}",
            snf.rank()
        )));
    }
    let u = snf.u().expect("transforms were tracked");
    (0..beta)
        .map(|j| {
            let mut acc = vec![BigInt::zero(); n];
            for (i, z) in cycles.iter().enumerate() {
                let c = u.get(j, i);
                if !c.is_zero() {
                    for (a, b) in acc.iter_mut().zip(z) {
                        *a += c * b;
                    }
                }
            }
            to_chain(k, &acc)
        })
        .collect()
}

/// Exact membership test for the integer boundary group `∂_{k+1} C_{k+1}`.
pub struct BoundaryImage {
    k: usize,
    snf: SnfResult,
}

impl BoundaryImage {
    pub fn new(complex: &SimplicialComplex, k: usize) -> Self {
        BoundaryImage {
            k,
            snf: smith_normal_form(&boundary_matrix(complex, k + 1), true),
        }
    }

    /// Integer `(k+1)`-chain with boundary `sigma`, if there is one.
    pub fn preimage(&self, sigma: &IntChain) -> Result<Option<Vec<BigInt>>> {
        if sigma.dim() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: sigma.dim(),
            });
        }
        let rows = self.snf.u().map_or(0, |u| u.rows());
        let mut b = vec![BigInt::zero(); rows];
        for (id, c) in sigma.iter() {
            if id >= rows {
                return Err(Error::UnknownSimplex { dim: self.k, id });
            }
            b[id] = BigInt::from(c);
        }
        Ok(self.snf.solve(&b))
    }

    pub fn contains(&self, sigma: &IntChain) -> Result<bool> {
        Ok(self.preimage(sigma)?.is_some())
    }

    /// `a - b ∈ im ∂_{k+1}`.
    pub fn homologous(&self, a: &IntChain, b: &IntChain) -> Result<bool> {
        self.contains(&a.sub(b)?)
    }
}

/// One-shot form of [`BoundaryImage::contains`].
pub fn in_boundary_image(complex: &SimplicialComplex, sigma: &IntChain) -> Result<bool> {
    BoundaryImage::new(complex, sigma.dim()).contains(sigma)
}
