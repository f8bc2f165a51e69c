use serde::{Deserialize, Serialize};

use crate::chain::{coboundary, IntChain};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::spectral::up_extremes;

use super::{enumerate_transitions, jump};

/// `𝒜f(σ) = Σ_τ (f(σ - ∂τ) - f(σ)) w(σ, ∂τ)` over both orientations of every
/// `(k+1)`-simplex.
pub fn apply_generator<F>(complex: &SimplicialComplex, sigma: &IntChain, f: F) -> Result<f64>
where
    F: Fn(&IntChain) -> f64,
{
    let here = f(sigma);
    let mut acc = 0.0;
    for tr in enumerate_transitions(complex, sigma)? {
        let next = jump(complex, sigma, tr.tau, tr.sign)?;
        acc += (f(&next) - here) * tr.rate as f64;
    }
    Ok(acc)
}

/// `𝒜⟨·, ζ⟩(σ)` in exact integer arithmetic.
pub fn pairing_drift(
    complex: &SimplicialComplex,
    sigma: &IntChain,
    zeta: &IntChain,
) -> Result<i64> {
    let here = sigma.inner(zeta)?;
    let mut acc: i64 = 0;
    for tr in enumerate_transitions(complex, sigma)? {
        let next = jump(complex, sigma, tr.tau, tr.sign)?;
        let d = next
            .inner(zeta)?
            .checked_sub(here)
            .ok_or(Error::Overflow("generator"))?;
        acc = d
            .checked_mul(tr.rate)
            .and_then(|v| acc.checked_add(v))
            .ok_or(Error::Overflow("generator"))?;
    }
    Ok(acc)
}

/// `𝒜‖·‖²(σ)` by direct summation over transitions.
pub fn norm_sq_drift(complex: &SimplicialComplex, sigma: &IntChain) -> Result<i64> {
    let here = sigma.norm_sq()?;
    let mut acc: i64 = 0;
    for tr in enumerate_transitions(complex, sigma)? {
        let next = jump(complex, sigma, tr.tau, tr.sign)?;
        let d = next
            .norm_sq()?
            .checked_sub(here)
            .ok_or(Error::Overflow("generator"))?;
        acc = d
            .checked_mul(tr.rate)
            .and_then(|v| acc.checked_add(v))
            .ok_or(Error::Overflow("generator"))?;
    }
    Ok(acc)
}

/// `-2⟨L^↑σ, σ⟩ + (k+2) Σ_τ |⟨∂τ, σ⟩|`, the closed form of
/// [`norm_sq_drift`].
pub fn norm_sq_drift_closed_form(complex: &SimplicialComplex, sigma: &IntChain) -> Result<i64> {
    let k = sigma.dim() as i64;
    let cob = coboundary(complex, sigma)?;
    let quad = cob.norm_sq()?;
    let abs = cob.weight()?;
    (k + 2)
        .checked_mul(abs)
        .and_then(|a| quad.checked_mul(2).and_then(|q| a.checked_sub(q)))
        .ok_or(Error::Overflow("generator"))
}

/// Spectral constants entering the drift and moment bounds for `k`-chains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConstants {
    pub k: usize,
    /// Smallest positive eigenvalue of `L_k^↑`.
    pub lambda_min: f64,
    /// Largest eigenvalue of `L_k^↑`.
    pub lambda_max: f64,
    /// `|S_{k+1}|`.
    pub cofaces: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftCheck {
    pub drift: f64,
    pub bound: f64,
}

impl DriftCheck {
    pub fn holds(&self) -> bool {
        self.drift <= self.bound
    }
}

impl LyapunovConstants {
    pub fn from_complex(complex: &SimplicialComplex, k: usize) -> Result<Self> {
        let (lambda_min, lambda_max) = up_extremes(complex, k)?;
        Ok(LyapunovConstants {
            k,
            lambda_min,
            lambda_max,
            cofaces: complex.count(k + 1),
        })
    }

    /// `(k+2)² |S_{k+1}| λ_M / (4 λ_m)`.
    pub fn constant_term(&self) -> f64 {
        let k2 = (self.k + 2) as f64;
        k2 * k2 * self.cofaces as f64 * self.lambda_max / (4.0 * self.lambda_min)
    }

    /// `-λ_m ‖σ‖² + (k+2)² |S_{k+1}| λ_M / (4λ_m) + 2 λ_m ‖P_ker X_0‖²`, where
    /// `P_ker` projects onto `ker L_k^↑`.
    pub fn drift_bound(&self, norm_sq: f64, kernel_norm_sq: f64) -> f64 {
        -self.lambda_min * norm_sq + self.constant_term() + 2.0 * self.lambda_min * kernel_norm_sq
    }

    pub fn check(
        &self,
        complex: &SimplicialComplex,
        sigma: &IntChain,
        kernel_norm_sq: f64,
    ) -> Result<DriftCheck> {
        Ok(DriftCheck {
            drift: norm_sq_drift(complex, sigma)? as f64,
            bound: self.drift_bound(sigma.norm_sq()? as f64, kernel_norm_sq),
        })
    }

    /// Second-moment bound at time `t <= horizon`:
    /// `[(1 + 2λ_m T) E‖X_0‖² + T (k+2)² |S_{k+1}| λ_M / (4λ_m)] e^{-λ_m t}`.
    pub fn moment_bound(&self, initial_mean_sq: f64, horizon: f64, t: f64) -> f64 {
        ((1.0 + 2.0 * self.lambda_min * horizon) * initial_mean_sq + horizon * self.constant_term())
            * (-self.lambda_min * t).exp()
    }
}
