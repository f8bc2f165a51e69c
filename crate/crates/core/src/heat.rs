//! Heat flow `dω/dt = -L ω` on real `k`-chains, with `L` the up-Laplacian
//! or the full Hodge Laplacian, and its limit in the kernel.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::RealChain;
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::spectral::{cg_solve, laplacian, symmetric_eigen, LaplacianKind, DENSE_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HeatMethod {
    /// Eigen below the dense limit, RK4 above.
    #[default]
    Auto,
    Eigen,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub omega: RealChain,
    pub t: f64,
}

/// Local error target of one adaptive RK4 step.
pub const RK4_LOCAL_TOL: f64 = 1e-9;

pub struct HeatFlow {
    k: usize,
    kind: LaplacianKind,
    op: SparseMatrix<f64>,
    eigen: Option<(Vec<f64>, DMatrix<f64>)>,
}

impl HeatFlow {
    pub fn new(complex: &SimplicialComplex, k: usize, kind: LaplacianKind) -> Result<Self> {
        if k > complex.top_dim() {
            return Err(Error::InvalidArgument(format!(
                "no {k}-simplices in a complex of dimension {}",
                complex.top_dim()
            )));
        }
        Ok(HeatFlow {
            k,
            kind,
            op: laplacian(complex, k, kind).to_f64(),
            eigen: None,
        })
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn operator(&self) -> &SparseMatrix<f64> {
        &self.op
    }

    fn dim(&self) -> usize {
        self.op.rows()
    }

    fn decomposition(&mut self) -> Result<&(Vec<f64>, DMatrix<f64>)> {
        if self.eigen.is_none() {
            if self.dim() > DENSE_LIMIT {
                return Err(Error::InvalidArgument(format!(
                    "eigen method limited to dimension {DENSE_LIMIT}, got {}",
                    self.dim()
                )));
            }
            self.eigen = Some(symmetric_eigen(&self.op.to_dense()));
        }
        Ok(self.eigen.as_ref().expect("just computed"))
    }

    fn dense_input(&self, omega: &RealChain) -> Result<Vec<f64>> {
        if omega.dim() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: omega.dim(),
            });
        }
        if let Some(id) = omega.support().into_iter().find(|&id| id >= self.dim()) {
            return Err(Error::UnknownSimplex { dim: self.k, id });
        }
        Ok(omega.to_dense(self.dim()))
    }

    pub fn evolve(&mut self, omega0: &RealChain, t: f64, method: HeatMethod) -> Result<FlowState> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time {t} must be finite and >= 0"
            )));
        }
        let x = self.dense_input(omega0)?;
        let method = match method {
            HeatMethod::Auto if self.dim() <= DENSE_LIMIT => HeatMethod::Eigen,
            HeatMethod::Auto => HeatMethod::Rk4,
            m => m,
        };
        let y = match method {
            HeatMethod::Eigen => {
                let (vals, vecs) = self.decomposition()?;
                let c = vecs.transpose() * DVector::from_column_slice(&x);
                let scaled = DVector::from_iterator(
                    c.len(),
                    c.iter().zip(vals).map(|(c, v)| c * (-v * t).exp()),
                );
                (vecs * scaled).as_slice().to_vec()
            }
            _ => rk4_adaptive(&self.op, x, t, RK4_LOCAL_TOL)?,
        };
        Ok(FlowState {
            omega: RealChain::from_dense(self.k, &y, 0.0),
            t,
        })
    }

    /// States at each of `times` (any order), evolved independently.
    pub fn evolve_many(
        &mut self,
        omega0: &RealChain,
        times: &[f64],
        method: HeatMethod,
    ) -> Result<Vec<FlowState>> {
        if matches!(method, HeatMethod::Rk4) || self.dim() > DENSE_LIMIT {
            let x = self.dense_input(omega0)?;
            let op = &self.op;
            let k = self.k;
            return times
                .par_iter()
                .map(|&t| {
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "time {t} must be finite and >= 0"
                        )));
                    }
                    let y = rk4_adaptive(op, x.clone(), t, RK4_LOCAL_TOL)?;
                    Ok(FlowState {
                        omega: RealChain::from_dense(k, &y, 0.0),
                        t,
                    })
                })
                .collect();
        }
        times
            .iter()
            .map(|&t| self.evolve(omega0, t, method))
            .collect()
    }

    /// Orthogonal projection of `omega0` onto `ker L`, the `t → ∞` limit.
    pub fn steady_state(&mut self, omega0: &RealChain) -> Result<RealChain> {
        let x = self.dense_input(omega0)?;
        let y = if self.dim() <= DENSE_LIMIT {
            let (vals, vecs) = self.decomposition()?;
            let top = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let xv = DVector::from_column_slice(&x);
            let mut out = DVector::zeros(x.len());
            for (i, &v) in vals.iter().enumerate() {
                if v <= 1e-9 * top {
                    let col = vecs.column(i);
                    out += col * col.dot(&xv);
                }
            }
            out.as_slice().to_vec()
        } else {
            // the CG iterate stays in im L, so it is the range component of x
            let lx = self.op.matvec(&x);
            let (r, res) = cg_solve(&self.op, &lx, 1e-12, 20 * self.dim() + 100);
            if res > 1e-8 {
                return Err(Error::Solver(format!(
                    "kernel projection stalled at residual {res:.2e}"
                )));
            }
            x.iter().zip(&r).map(|(a, b)| a - b).collect()
        };
        Ok(RealChain::from_dense(self.k, &y, 0.0))
    }

    /// `‖L ω‖`.
    pub fn residual(&self, omega: &RealChain) -> Result<f64> {
        let x = self.dense_input(omega)?;
        Ok(self.op.matvec(&x).iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `⟨L ω, ω⟩`.
    pub fn energy(&self, omega: &RealChain) -> Result<f64> {
        let x = self.dense_input(omega)?;
        Ok(self.op.matvec(&x).iter().zip(&x).map(|(a, b)| a * b).sum())
    }
}

fn rk4_step(op: &SparseMatrix<f64>, y: &[f64], h: f64) -> Vec<f64> {
    let f = |v: &[f64]| -> Vec<f64> { op.matvec(v).into_iter().map(|x| -x).collect() };
    let shift = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + s * y).collect()
    };
    let k1 = f(y);
    let k2 = f(&shift(y, &k1, h / 2.0));
    let k3 = f(&shift(y, &k2, h / 2.0));
    let k4 = f(&shift(y, &k3, h));
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Classical RK4 with step doubling: a full step is compared with two half
/// steps, and the step is accepted when the difference over 15 is below
/// `tol`. Accepted steps use the extrapolated value.
fn rk4_adaptive(op: &SparseMatrix<f64>, mut y: Vec<f64>, t_end: f64, tol: f64) -> Result<Vec<f64>> {
    let gersh = (0..op.rows())
        .map(|r| op.row(r).map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    if t_end == 0.0 || gersh == 0.0 {
        return Ok(y);
    }
    let mut h = (1.0 / gersh).min(t_end);
    let mut t = 0.0;
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Solver("RK4 step budget exhausted".into()));
        }
        let h_try = h.min(t_end - t);
        let full = rk4_step(op, &y, h_try);
        let half = rk4_step(op, &y, h_try / 2.0);
        let two = rk4_step(op, &half, h_try / 2.0);
        let err = full
            .iter()
            .zip(&two)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / 15.0;
        if err <= tol {
            y = two
                .iter()
                .zip(&full)
                .map(|(b, a)| b + (b - a) / 15.0)
                .collect();
            t += h_try;
            if t_end - t < 1e-14 * t_end {
                t = t_end;
            }
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.1, 4.0)
        };
        h = h_try * factor;
    }
    Ok(y)
}
