use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{boundary, IntChain};
use crate::complex::SimplicialComplex;
use crate::error::Result;

use super::{Observer, Transition};

/// `deg↓(τ) = Σ_{τ' ≠ τ} |⟨∂τ, ∂τ'⟩|` for the `d`-simplex `tau`.
pub fn down_degree(complex: &SimplicialComplex, d: usize, tau: usize) -> i64 {
    let mut overlap: BTreeMap<usize, i64> = BTreeMap::new();
    for &(f, s) in complex.faces_of(d, tau) {
        for &(other, s2) in complex.cofaces_of(d - 1, f) {
            if other != tau {
                *overlap.entry(other).or_default() += (s * s2) as i64;
            }
        }
    }
    overlap.values().map(|v| v.abs()).sum()
}

/// A `(k+1)`-simplex where `deg↓(τ) <= k + 2 - |⟨∂τ, σ⟩|` fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfinementViolation {
    pub tau: usize,
    pub down_degree: i64,
    pub overlap: i64,
    pub limit: i64,
}

/// Checks the confinement condition for the walk started at `sigma` over
/// every `(k+1)`-simplex.
pub fn check_confinement(
    complex: &SimplicialComplex,
    sigma: &IntChain,
) -> Result<Vec<ConfinementViolation>> {
    sigma.check_in(complex)?;
    let k = sigma.dim();
    let d = k + 1;
    let mut out = Vec::new();
    for tau in 0..complex.count(d) {
        let overlap: i64 = complex
            .faces_of(d, tau)
            .iter()
            .map(|&(f, s)| s as i64 * sigma.get(f))
            .sum::<i64>()
            .abs();
        let limit = (k + 2) as i64 - overlap;
        let deg = down_degree(complex, d, tau);
        if deg > limit {
            out.push(ConfinementViolation {
                tau,
                down_degree: deg,
                overlap,
                limit,
            });
        }
    }
    Ok(out)
}

/// Tracks `λ` in `X_t = X_0 + Σ_τ λ_τ ∂τ` and whether every visited state
/// is a cycle.
#[derive(Clone, Debug, Default)]
pub struct ConfinementMonitor<'a> {
    complex: Option<&'a SimplicialComplex>,
    pub lambdas: BTreeMap<usize, i64>,
    pub max_abs_lambda: i64,
    pub jumps: u64,
    pub non_cycles: u64,
}

impl<'a> ConfinementMonitor<'a> {
    /// With a complex, every visited state is also checked to be a cycle.
    pub fn new(complex: Option<&'a SimplicialComplex>) -> Self {
        ConfinementMonitor {
            complex,
            ..Default::default()
        }
    }

    pub fn confined(&self) -> bool {
        self.max_abs_lambda <= 1
    }
}

impl Observer for ConfinementMonitor<'_> {
    fn jump(&mut self, _t: f64, tr: &Transition, state: &IntChain) {
        let l = self.lambdas.entry(tr.tau).or_default();
        *l -= tr.sign as i64;
        self.max_abs_lambda = self.max_abs_lambda.max(l.abs());
        self.jumps += 1;
        if let Some(c) = self.complex {
            if !boundary(c, state).map(|b| b.is_zero()).unwrap_or(false) {
                self.non_cycles += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Chain;
    use crate::complex::build_torus_triangulation;

    #[test]
    fn torus_triangles_have_down_degree_three() {
        let c = build_torus_triangulation(4).unwrap();
        assert!((0..c.count(2)).all(|t| down_degree(&c, 2, t) == 3));
        // an interior triangle fails the inequality once it carries an edge of σ
        let sigma = crate::torus::basis_cycles(&c).unwrap().0;
        let v = check_confinement(&c, &sigma).unwrap();
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.overlap == 1 && x.down_degree == 3));
    }

    #[test]
    fn isolated_triangle_is_confined() {
        let c = SimplicialComplex::from_maximal(3, &[vec![0, 1, 2]]).unwrap();
        let sigma = Chain::elementary(1, 0, 1i64);
        assert!(check_confinement(&c, &sigma).unwrap().is_empty());
    }
}
