use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

use super::laplacian::up_laplacian;

/// Operators up to this dimension are diagonalised densely.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenRequest {
    All,
    Largest(usize),
    /// Smallest eigenvalues above `tol`.
    SmallestPositive {
        count: usize,
        tol: f64,
    },
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    // a second pass on the nearly diagonal V^T M V sharpens the eigenvectors
    let v1 = eig.eigenvectors;
    let inner = v1.transpose() * m * &v1;
    let inner = (&inner + inner.transpose()) * 0.5;
    let eig2 = SymmetricEigen::new(inner);
    let eig = SymmetricEigen {
        eigenvalues: eig2.eigenvalues,
        eigenvectors: v1 * eig2.eigenvectors,
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Sorted eigenvalues of a symmetric operator. Dense below
/// [`DENSE_LIMIT`]; above it `Largest` uses Lanczos and `SmallestPositive`
/// block inverse iteration, while `All` stays dense.
pub fn spectrum(op: &SparseMatrix<f64>, request: EigenRequest) -> Result<Vec<f64>> {
    if op.rows() != op.cols() {
        return Err(Error::InvalidArgument(
            "spectrum of a non-square operator".into(),
        ));
    }
    let n = op.rows();
    let dense = n <= DENSE_LIMIT || matches!(request, EigenRequest::All);
    if dense {
        if n > DENSE_LIMIT {
            log::warn!("dense eigendecomposition of a {n}x{n} operator");
        }
        let (values, _) = symmetric_eigen(&op.to_dense());
        return Ok(match request {
            EigenRequest::All => values,
            EigenRequest::Largest(k) => values[n.saturating_sub(k)..].to_vec(),
            EigenRequest::SmallestPositive { count, tol } => values
                .into_iter()
                .filter(|&v| v > tol)
                .take(count)
                .collect(),
        });
    }
    match request {
        EigenRequest::Largest(k) => Ok(lanczos_largest(op, k, 7)),
        EigenRequest::SmallestPositive { count, tol } => {
            smallest_positive_iterative(op, count, tol)
        }
        EigenRequest::All => unreachable!(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
}

#[derive(Clone, Copy)]
enum Pick {
    Largest,
    /// Smallest Ritz value above the threshold; Krylov spaces started in
    /// the range of a semidefinite operator only reach the kernel through
    /// rounding, and those Ritz values stay below it.
    SmallestAbove(f64),
}

/// Deflated Lanczos: each eigenvalue is the picked Ritz value of a run
/// with full reorthogonalisation against both the Krylov basis and the
/// eigenvectors already found, so repeated eigenvalues are returned with
/// their multiplicity. A run is extended until the Ritz residual falls
/// below `1e-10 · ‖op‖`. Returns fewer than `k` values when the space is
/// exhausted first.
fn deflated_lanczos(op: &SparseMatrix<f64>, k: usize, seed: u64, pick: Pick) -> Vec<f64> {
    let n = op.rows();
    let k = k.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let deflate = |w: &mut Vec<f64>, found: &[Vec<f64>]| {
        for f in found {
            let c = dot(w, f);
            axpy(w, -c, f);
        }
    };
    while values.len() < k && found.len() < n {
        let mut m = 40.min(n - found.len()).max(1);
        let hit = loop {
            let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
            let mut alpha = Vec::with_capacity(m);
            let mut beta: Vec<f64> = Vec::with_capacity(m);
            let mut q = random_vector(n, &mut rng);
            if let Pick::SmallestAbove(_) = pick {
                q = op.matvec(&q);
            }
            deflate(&mut q, &found);
            let nq = norm(&q);
            if nq < 1e-300 {
                break None;
            }
            q.iter_mut().for_each(|x| *x /= nq);
            let mut last_beta = 0.0;
            for j in 0..m {
                let mut w = op.matvec(&q);
                let a = dot(&w, &q);
                axpy(&mut w, -a, &q);
                if j > 0 {
                    axpy(&mut w, -beta[j - 1], &basis[j - 1]);
                }
                basis.push(q.clone());
                for _ in 0..2 {
                    deflate(&mut w, &found);
                    for b in &basis {
                        let c = dot(&w, b);
                        axpy(&mut w, -c, b);
                    }
                }
                alpha.push(a);
                let bn = norm(&w);
                last_beta = bn;
                if j + 1 == m || bn < 1e-12 {
                    break;
                }
                beta.push(bn);
                q = w.into_iter().map(|x| x / bn).collect();
            }
            let dim = alpha.len();
            let t = DMatrix::from_fn(dim, dim, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c || c + 1 == r {
                    beta[r.min(c)]
                } else {
                    0.0
                }
            });
            let (vals, vecs) = symmetric_eigen(&t);
            let scale = vals.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
            let idx = match pick {
                Pick::Largest => Some(dim - 1),
                Pick::SmallestAbove(tol) => vals.iter().position(|&v| v > tol),
            };
            let exhausted = dim + found.len() >= n || last_beta < 1e-12;
            let Some(idx) = idx else {
                if exhausted {
                    break None;
                }
                m = (2 * m).min(n - found.len());
                continue;
            };
            let converged = (last_beta * vecs[(dim - 1, idx)]).abs() <= 1e-10 * scale;
            if converged || exhausted {
                let mut v = vec![0.0; n];
                for (i, b) in basis.iter().enumerate() {
                    axpy(&mut v, vecs[(i, idx)], b);
                }
                deflate(&mut v, &found);
                let nv = norm(&v);
                v.iter_mut().for_each(|x| *x /= nv);
                break Some((vals[idx], v));
            }
            m = (2 * m).min(n - found.len());
        };
        let Some((value, vector)) = hit else { break };
        values.push(value);
        found.push(vector);
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Largest `k` eigenvalues (ascending) by deflated Lanczos.
pub fn lanczos_largest(op: &SparseMatrix<f64>, k: usize, seed: u64) -> Vec<f64> {
    deflated_lanczos(op, k, seed, Pick::Largest)
}

/// Conjugate gradients for a symmetric positive semidefinite system with a
/// right-hand side in the range of the operator.
pub fn cg_solve(
    op: &SparseMatrix<f64>,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bn = norm(b);
    if bn == 0.0 {
        return (x, 0.0);
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * bn {
            break;
        }
        let ap = op.matvec(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let a = rr / pap;
        axpy(&mut x, a, &p);
        axpy(&mut r, -a, &ap);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    (x, rr.sqrt() / bn)
}

/// Smallest `count` eigenvalues above `tol` of a positive semidefinite
/// operator, by deflated Lanczos started in the range of the operator.
pub fn smallest_positive_iterative(
    op: &SparseMatrix<f64>,
    count: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    if count == 0 || op.rows() == 0 {
        return Ok(Vec::new());
    }
    let values = deflated_lanczos(op, count, 13, Pick::SmallestAbove(tol));
    if values.is_empty() {
        return Err(Error::Solver(format!("no eigenvalue above {tol}")));
    }
    Ok(values)
}

/// `(λ_m, λ_M)`: smallest positive and largest eigenvalue of `L_k^↑`.
pub fn up_extremes(complex: &SimplicialComplex, k: usize) -> Result<(f64, f64)> {
    let l = up_laplacian(complex, k).to_f64();
    if l.nnz() == 0 {
        return Err(Error::InvalidArgument(format!("L_{k}^up is zero")));
    }
    let n = l.rows();
    if n <= DENSE_LIMIT {
        let (vals, _) = symmetric_eigen(&l.to_dense());
        let lmax = *vals.last().unwrap();
        let tol = 1e-9 * lmax.max(1.0);
        let lmin = vals.iter().copied().find(|&v| v > tol).unwrap();
        return Ok((lmin, lmax));
    }
    let lmax = *lanczos_largest(&l, 1, 3).last().unwrap();
    let lmin = smallest_positive_iterative(&l, 1, 1e-9 * lmax.max(1.0))?[0];
    Ok((lmin, lmax))
}

/// Dense helper for tests and small operators: eigen-residual of a pair.
#[allow(dead_code)]
pub(crate) fn residual(m: &DMatrix<f64>, value: f64, vector: &DVector<f64>) -> f64 {
    (m * vector - vector * value).norm()
}
