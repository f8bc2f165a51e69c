//! Smith normal form `U A V = D` over the integers.
//!
//! Elimination runs in checked `i64` first and is redone in `BigInt` if any
//! entry of `A`, `U` or `V` overflows.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::sparse::SparseMatrix;

trait Ring: Clone + Debug + PartialEq + Sized {
    fn r_zero() -> Self;
    fn r_one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn r_is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn r_is_negative(&self) -> bool;
    /// `|self| < |other|`
    fn mag_lt(&self, other: &Self) -> bool;
    /// Quotient truncated toward zero.
    fn quot(&self, d: &Self) -> Option<Self>;
    fn divides(&self, other: &Self) -> bool;
    /// `self -= q·x`
    fn sub_mul(&mut self, q: &Self, x: &Self) -> Option<()>;
    fn negate(&mut self) -> Option<()>;
    fn to_big(&self) -> BigInt;
}

impl Ring for i64 {
    fn r_zero() -> Self {
        0
    }
    fn r_one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn r_is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn r_is_negative(&self) -> bool {
        *self < 0
    }
    fn mag_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn divides(&self, other: &Self) -> bool {
        other.checked_rem(*self).is_none_or(|r| r == 0)
    }
    fn sub_mul(&mut self, q: &Self, x: &Self) -> Option<()> {
        *self = self.checked_sub(q.checked_mul(*x)?)?;
        Some(())
    }
    fn negate(&mut self) -> Option<()> {
        *self = self.checked_neg()?;
        Some(())
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ring for BigInt {
    fn r_zero() -> Self {
        Zero::zero()
    }
    fn r_one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn r_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn r_is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn mag_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn divides(&self, other: &Self) -> bool {
        Zero::is_zero(&(other % self))
    }
    fn sub_mul(&mut self, q: &Self, x: &Self) -> Option<()> {
        *self -= q * x;
        Some(())
    }
    fn negate(&mut self) -> Option<()> {
        *self = -std::mem::take(self);
        Some(())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BigMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl BigMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BigMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_sparse(a: &SparseMatrix<i64>) -> Self {
        let mut m = Self::zeros(a.rows(), a.cols());
        for (r, c, v) in a.triplets() {
            m.data[r * a.cols() + c] = BigInt::from(v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &BigMatrix) -> BigMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .filter(|&c| !x[c].is_zero())
                    .map(|c| self.get(r, c) * &x[c])
                    .sum()
            })
            .collect()
    }

    fn from_ring<R: Ring>(rows: usize, cols: usize, data: &[R]) -> Self {
        BigMatrix {
            rows,
            cols,
            data: data.iter().map(Ring::to_big).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SnfResult {
    rows: usize,
    cols: usize,
    /// Nonzero invariant factors `d_1 | d_2 | …`, all positive.
    factors: Vec<BigInt>,
    u: Option<BigMatrix>,
    v: Option<BigMatrix>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Invariant factors larger than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }

    pub fn u(&self) -> Option<&BigMatrix> {
        self.u.as_ref()
    }

    pub fn v(&self) -> Option<&BigMatrix> {
        self.v.as_ref()
    }

    pub fn diagonal_matrix(&self) -> BigMatrix {
        let mut d = BigMatrix::zeros(self.rows, self.cols);
        for (i, f) in self.factors.iter().enumerate() {
            d.data[i * self.cols + i] = f.clone();
        }
        d
    }

    /// A basis of the integer kernel: the last `cols - rank` columns of `V`.
    /// Each vector is made primitive with a positive leading entry.
    pub fn kernel_basis(&self) -> Option<Vec<Vec<BigInt>>> {
        let v = self.v.as_ref()?;
        Some(
            (self.rank()..self.cols)
                .map(|c| {
                    let mut col = v.column(c);
                    let g = col.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
                    if !g.is_zero() && !g.is_one() {
                        col.iter_mut().for_each(|x| *x /= &g);
                    }
                    if col
                        .iter()
                        .find(|x| !x.is_zero())
                        .is_some_and(|x| x.is_negative())
                    {
                        col.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    col
                })
                .collect(),
        )
    }

    /// An integer solution of `A x = b`, if one exists. Needs `U` and `V`.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let (u, v) = (self.u.as_ref()?, self.v.as_ref()?);
        let ub = u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.cols];
        for (i, val) in ub.iter().enumerate() {
            if i < self.rank() {
                let (q, r) = val.div_rem(&self.factors[i]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !val.is_zero() {
                return None;
            }
        }
        Some(v.mul_vec(&y))
    }
}

struct Work<R> {
    m: usize,
    n: usize,
    a: Vec<R>,
    u: Option<Vec<R>>,
    v: Option<Vec<R>>,
}

impl<R: Ring> Work<R> {
    fn at(&self, i: usize, j: usize) -> &R {
        &self.a[i * self.n + j]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.n {
            self.a.swap(i * self.n + c, j * self.n + c);
        }
        if let Some(u) = &mut self.u {
            for c in 0..self.m {
                u.swap(i * self.m + c, j * self.m + c);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.m {
            self.a.swap(r * self.n + i, r * self.n + j);
        }
        if let Some(v) = &mut self.v {
            for r in 0..self.n {
                v.swap(r * self.n + i, r * self.n + j);
            }
        }
    }

    /// `row_dst -= q · row_src`, touching columns `from..` of `A`.
    fn row_sub(&mut self, dst: usize, src: usize, q: &R, from: usize) -> Option<()> {
        let n = self.n;
        for c in from..n {
            let x = self.a[src * n + c].clone();
            if !x.r_is_zero() {
                self.a[dst * n + c].sub_mul(q, &x)?;
            }
        }
        if let Some(u) = &mut self.u {
            let m = self.m;
            for c in 0..m {
                let x = u[src * m + c].clone();
                if !x.r_is_zero() {
                    u[dst * m + c].sub_mul(q, &x)?;
                }
            }
        }
        Some(())
    }

    /// `col_dst -= q · col_src`, touching rows `from..` of `A`.
    fn col_sub(&mut self, dst: usize, src: usize, q: &R, from: usize) -> Option<()> {
        let n = self.n;
        for r in from..self.m {
            let x = self.a[r * n + src].clone();
            if !x.r_is_zero() {
                self.a[r * n + dst].sub_mul(q, &x)?;
            }
        }
        if let Some(v) = &mut self.v {
            for r in 0..n {
                let x = v[r * n + src].clone();
                if !x.r_is_zero() {
                    v[r * n + dst].sub_mul(q, &x)?;
                }
            }
        }
        Some(())
    }

    fn negate_row(&mut self, t: usize) -> Option<()> {
        for c in t..self.n {
            self.a[t * self.n + c].negate()?;
        }
        if let Some(u) = &mut self.u {
            for c in 0..self.m {
                u[t * self.m + c].negate()?;
            }
        }
        Some(())
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut row_nnz = vec![0usize; self.m];
        let mut col_nnz = vec![0usize; self.n];
        for i in t..self.m {
            for j in t..self.n {
                if !self.at(i, j).r_is_zero() {
                    row_nnz[i] += 1;
                    col_nnz[j] += 1;
                }
            }
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for i in t..self.m {
            if row_nnz[i] == 0 {
                continue;
            }
            for j in t..self.n {
                let x = self.at(i, j);
                if x.r_is_zero() {
                    continue;
                }
                let cost = (row_nnz[i] - 1) * (col_nnz[j] - 1);
                let better = match best {
                    None => true,
                    Some((bi, bj, bc)) => {
                        let b = self.at(bi, bj);
                        x.mag_lt(b) || (!b.mag_lt(x) && cost < bc)
                    }
                };
                if better {
                    best = Some((i, j, cost));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(&mut self) -> Option<Vec<R>> {
        let mut factors = Vec::new();
        for t in 0..self.m.min(self.n) {
            let Some((pi, pj)) = self.pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.m {
                    if !self.at(i, t).r_is_zero() {
                        let q = self.at(i, t).quot(self.at(t, t))?;
                        self.row_sub(i, t, &q, t)?;
                        if !self.at(i, t).r_is_zero() {
                            self.swap_rows(t, i);
                            clean = false;
                        }
                    }
                }
                for j in t + 1..self.n {
                    if !self.at(t, j).r_is_zero() {
                        let q = self.at(t, j).quot(self.at(t, t))?;
                        self.col_sub(j, t, &q, t)?;
                        if !self.at(t, j).r_is_zero() {
                            self.swap_cols(t, j);
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue;
                }
                if !self.at(t, t).is_unit() {
                    let p = self.at(t, t).clone();
                    let bad = (t + 1..self.m)
                        .find(|&i| (t + 1..self.n).any(|j| !p.divides(self.at(i, j))));
                    if let Some(i) = bad {
                        let minus_one = R::from_i64(-1);
                        self.row_sub(t, i, &minus_one, t)?;
                        continue;
                    }
                }
                break;
            }
            if self.at(t, t).r_is_negative() {
                self.negate_row(t)?;
            }
            factors.push(self.at(t, t).clone());
        }
        Some(factors)
    }
}

fn attempt<R: Ring>(a: &SparseMatrix<i64>, track: bool) -> Option<SnfResult> {
    let (m, n) = (a.rows(), a.cols());
    let mut data = vec![R::r_zero(); m * n];
    for (r, c, v) in a.triplets() {
        data[r * n + c] = R::from_i64(v);
    }
    let identity = |k: usize| {
        let mut d = vec![R::r_zero(); k * k];
        for i in 0..k {
            d[i * k + i] = R::r_one();
        }
        d
    };
    let mut w = Work {
        m,
        n,
        a: data,
        u: track.then(|| identity(m)),
        v: track.then(|| identity(n)),
    };
    let factors = w.run()?;
    Some(SnfResult {
        rows: m,
        cols: n,
        factors: factors.iter().map(Ring::to_big).collect(),
        u: w.u.as_ref().map(|u| BigMatrix::from_ring(m, m, u)),
        v: w.v.as_ref().map(|v| BigMatrix::from_ring(n, n, v)),
    })
}

/// Smith normal form of an integer matrix; with `track_transforms` the
/// unimodular `U` and `V` with `U A V = D` are kept as well.
pub fn smith_normal_form(a: &SparseMatrix<i64>, track_transforms: bool) -> SnfResult {
    attempt::<i64>(a, track_transforms).unwrap_or_else(|| {
        log::debug!("Smith normal form overflowed i64, retrying with big integers");
        attempt::<BigInt>(a, track_transforms).expect("big integer elimination cannot overflow")
    })
}

#[allow(dead_code)]
pub(crate) fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: usize, cols: usize, vals: &[i64]) -> SparseMatrix<i64> {
        SparseMatrix::from_triplets(
            rows,
            cols,
            vals.iter()
                .enumerate()
                .map(|(i, &v)| (i / cols, i % cols, v))
                .collect(),
        )
    }

    fn check(a: &SparseMatrix<i64>) -> SnfResult {
        let s = smith_normal_form(a, true);
        let lhs = s
            .u()
            .unwrap()
            .mul(&BigMatrix::from_sparse(a))
            .mul(s.v().unwrap());
        assert_eq!(lhs, s.diagonal_matrix());
        for w in s.invariant_factors().windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        assert!(s.invariant_factors().iter().all(|d| d.is_positive()));
        s
    }

    #[test]
    fn classic_example() {
        // diag(2, 6, 12)
        let a = dense(3, 3, &[2, 4, 4, -6, 6, 12, 10, -4, -16]);
        let s = check(&a);
        let f: Vec<i64> = s
            .invariant_factors()
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect();
        assert_eq!(f, vec![2, 6, 12]);
    }

    #[test]
    fn torsion_of_projective_plane_boundary() {
        // ∂2 of the minimal RP^2 has a single invariant factor 2
        let rp2 = crate::complex::SimplicialComplex::from_maximal(
            6,
            &[
                vec![0, 1, 2],
                vec![0, 2, 3],
                vec![0, 3, 4],
                vec![0, 4, 5],
                vec![0, 1, 5],
                vec![1, 2, 4],
                vec![2, 3, 5],
                vec![1, 3, 4],
                vec![2, 4, 5],
                vec![1, 3, 5],
            ],
        )
        .unwrap();
        let b2 = crate::spectral::boundary_matrix(&rp2, 2);
        let s = check(&b2);
        assert_eq!(s.torsion(), vec![BigInt::from(2)]);
        assert_eq!(s.rank(), 10);
    }

    #[test]
    fn kernel_and_membership() {
        let a = dense(2, 3, &[1, 1, 0, 0, 1, 1]);
        let s = check(&a);
        let k = s.kernel_basis().unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(
            BigMatrix::from_sparse(&a).mul_vec(&k[0]),
            vec![BigInt::zero(); 2]
        );
        let b = vec![BigInt::from(3), BigInt::from(-2)];
        let x = s.solve(&b).unwrap();
        assert_eq!(BigMatrix::from_sparse(&a).mul_vec(&x), b);
        let even = dense(1, 1, &[2]);
        assert!(smith_normal_form(&even, true)
            .solve(&[BigInt::from(3)])
            .is_none());
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = 3_000_000_000i64;
        let a = dense(2, 2, &[big, big + 1, big + 2, big + 3]);
        let s = check(&a);
        assert_eq!(s.rank(), 2);
    }

    proptest! {
        #[test]
        fn decomposition_holds(vals in prop::collection::vec(-6i64..=6, 20), rows in 1usize..=5) {
            let cols = 20 / rows.max(1);
            let a = dense(rows, cols, &vals[..rows * cols]);
            check(&a);
        }
    }
}
