//! Sparse chains over a complex, the boundary operator and its adjoint.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, VertexId};
use crate::error::{Error, Result};

/// Coefficient ring of a chain. Integer arithmetic is checked; every
/// operation returns `None` on overflow.
pub trait Coefficient: Copy + PartialEq + PartialOrd + Debug + Send + Sync + 'static {
    const ZERO: Self;
    const ONE: Self;

    fn checked_add(self, other: Self) -> Option<Self>;
    fn checked_mul(self, other: Self) -> Option<Self>;
    fn checked_neg(self) -> Option<Self>;
    fn checked_abs(self) -> Option<Self>;
    fn from_sign(sign: i8) -> Self;
    fn to_f64(self) -> f64;

    fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    fn checked_sub(self, other: Self) -> Option<Self> {
        self.checked_add(other.checked_neg()?)
    }
}

impl Coefficient for i64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;

    fn checked_add(self, other: Self) -> Option<Self> {
        i64::checked_add(self, other)
    }
    fn checked_mul(self, other: Self) -> Option<Self> {
        i64::checked_mul(self, other)
    }
    fn checked_neg(self) -> Option<Self> {
        i64::checked_neg(self)
    }
    fn checked_abs(self) -> Option<Self> {
        i64::checked_abs(self)
    }
    fn from_sign(sign: i8) -> Self {
        sign as i64
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Coefficient for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn checked_add(self, other: Self) -> Option<Self> {
        Some(self + other)
    }
    fn checked_mul(self, other: Self) -> Option<Self> {
        Some(self * other)
    }
    fn checked_neg(self) -> Option<Self> {
        Some(-self)
    }
    fn checked_abs(self) -> Option<Self> {
        Some(self.abs())
    }
    fn from_sign(sign: i8) -> Self {
        sign as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
}

fn overflow<T>(what: &'static str) -> impl FnOnce() -> Result<T> {
    move || Err(Error::Overflow(what))
}

/// A `dim`-chain stored as a sorted map from simplex id to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain<C> {
    dim: usize,
    coeffs: BTreeMap<usize, C>,
}

pub type IntChain = Chain<i64>;
pub type RealChain = Chain<f64>;

impl<C: Coefficient> Chain<C> {
    pub fn zero(dim: usize) -> Self {
        Chain {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn elementary(dim: usize, id: usize, c: C) -> Self {
        let mut ch = Self::zero(dim);
        if !c.is_zero() {
            ch.coeffs.insert(id, c);
        }
        ch
    }

    /// Repeated ids are summed.
    pub fn from_pairs<I: IntoIterator<Item = (usize, C)>>(dim: usize, pairs: I) -> Result<Self> {
        let mut ch = Self::zero(dim);
        for (id, c) in pairs {
            ch.add_term(id, c)?;
        }
        Ok(ch)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, id: usize) -> C {
        self.coeffs.get(&id).copied().unwrap_or(C::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, C)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, id: usize, c: C) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let v = match self.coeffs.get(&id) {
            Some(&old) => old
                .checked_add(c)
                .map_or_else(overflow("chain addition"), Ok)?,
            None => c,
        };
        if v.is_zero() {
            self.coeffs.remove(&id);
        } else {
            self.coeffs.insert(id, v);
        }
        Ok(())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (id, c) in other.iter() {
            out.add_term(id, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C::ONE.checked_neg().unwrap())?)
    }

    pub fn scale(&self, s: C) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for (id, c) in self.iter() {
            let v = c
                .checked_mul(s)
                .map_or_else(overflow("chain scaling"), Ok)?;
            if !v.is_zero() {
                out.coeffs.insert(id, v);
            }
        }
        Ok(out)
    }

    pub fn inner(&self, other: &Self) -> Result<C> {
        self.same_dim(other)?;
        let (small, large) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = C::ZERO;
        for (id, c) in small.iter() {
            if let Some(&d) = large.coeffs.get(&id) {
                let p = c
                    .checked_mul(d)
                    .map_or_else(overflow("inner product"), Ok)?;
                acc = acc
                    .checked_add(p)
                    .map_or_else(overflow("inner product"), Ok)?;
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> Result<C> {
        self.inner(self)
    }

    /// `Σ |λ|`, the energy used for hole localization.
    pub fn weight(&self) -> Result<C> {
        let mut acc = C::ZERO;
        for (_, c) in self.iter() {
            let a = c.checked_abs().map_or_else(overflow("chain weight"), Ok)?;
            acc = acc
                .checked_add(a)
                .map_or_else(overflow("chain weight"), Ok)?;
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.iter()
            .map(|(_, c)| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_real(&self) -> RealChain {
        Chain {
            dim: self.dim,
            coeffs: self.iter().map(|(i, c)| (i, c.to_f64())).collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut v = vec![0.0; len];
        for (i, c) in self.iter() {
            v[i] = c.to_f64();
        }
        v
    }

    /// Every id must name an existing `dim`-simplex of `complex`.
    pub fn check_in(&self, complex: &SimplicialComplex) -> Result<()> {
        let n = complex.count(self.dim);
        match self.coeffs.keys().next_back() {
            Some(&id) if id >= n => Err(Error::UnknownSimplex { dim: self.dim, id }),
            _ => Ok(()),
        }
    }
}

impl RealChain {
    /// Entries with `|x| <= drop_below` are omitted.
    pub fn from_dense(dim: usize, values: &[f64], drop_below: f64) -> Self {
        Chain {
            dim,
            coeffs: values
                .iter()
                .enumerate()
                .filter(|(_, x)| x.abs() > drop_below)
                .map(|(i, &x)| (i, x))
                .collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.iter().map(|(_, c)| c * c).sum::<f64>().sqrt()
    }
}

impl IntChain {
    /// Hashable canonical form, used as a state key.
    pub fn key(&self) -> Vec<(usize, i64)> {
        self.iter().collect()
    }
}

/// `∂σ`, the `(k-1)`-chain `Σ_i (-1)^i λ_σ [σ with vertex i removed]`. The
/// boundary of a 0-chain is the zero chain of dimension 0.
pub fn boundary<C: Coefficient>(complex: &SimplicialComplex, sigma: &Chain<C>) -> Result<Chain<C>> {
    sigma.check_in(complex)?;
    let k = sigma.dim;
    if k == 0 {
        return Ok(Chain::zero(0));
    }
    let mut out = Chain::zero(k - 1);
    for (id, c) in sigma.iter() {
        for &(f, s) in complex.faces_of(k, id) {
            let v = c
                .checked_mul(C::from_sign(s))
                .map_or_else(overflow("boundary"), Ok)?;
            out.add_term(f, v)?;
        }
    }
    Ok(out)
}

/// `∂*σ`, the adjoint of the boundary: `(∂*σ)(τ) = ⟨∂τ, σ⟩`.
pub fn coboundary<C: Coefficient>(
    complex: &SimplicialComplex,
    sigma: &Chain<C>,
) -> Result<Chain<C>> {
    sigma.check_in(complex)?;
    let k = sigma.dim;
    let mut out = Chain::zero(k + 1);
    for (id, c) in sigma.iter() {
        for &(t, s) in complex.cofaces_of(k, id) {
            let v = c
                .checked_mul(C::from_sign(s))
                .map_or_else(overflow("coboundary"), Ok)?;
            out.add_term(t, v)?;
        }
    }
    Ok(out)
}

/// Boundary of a single oriented simplex, `sign · ∂[id]`.
pub fn simplex_boundary(complex: &SimplicialComplex, k: usize, id: usize, sign: i8) -> IntChain {
    let mut out = Chain::zero(k.saturating_sub(1));
    for &(f, s) in complex.faces_of(k, id) {
        out.coeffs.insert(f, (s * sign) as i64);
    }
    out
}

pub fn is_cycle<C: Coefficient>(complex: &SimplicialComplex, sigma: &Chain<C>) -> Result<bool> {
    Ok(boundary(complex, sigma)?.is_zero())
}

/// The 1-chain walking the closed vertex loop `v₀ → v₁ → … → v₀`.
pub fn loop_chain(complex: &SimplicialComplex, vertices: &[VertexId]) -> Result<IntChain> {
    let mut out = Chain::zero(1);
    for (i, &u) in vertices.iter().enumerate() {
        let v = vertices[(i + 1) % vertices.len()];
        let (id, s) = complex
            .oriented_id(&[u, v])
            .ok_or_else(|| Error::InvalidArgument(format!("no edge between {u} and {v}")))?;
        out.add_term(id, s as i64)?;
    }
    Ok(out)
}
