use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Coefficient, RealChain};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Value of the flat norm and a minimising filling `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatNorm {
    pub value: f64,
    /// Weighted mass of `σ - ∂Δ`.
    pub residual_mass: f64,
    /// Weighted mass of `Δ`.
    pub filling_mass: f64,
    pub filling: RealChain,
}

/// Weighted mass `w Σ |λ|` of a chain.
pub fn mass<C: Coefficient>(sigma: &Chain<C>, weight: f64) -> f64 {
    weight * sigma.iter().map(|(_, c)| c.to_f64().abs()).sum::<f64>()
}

/// `min_Δ  w_k Σ_e |σ_e - (∂Δ)_e| + w_{k+1} Σ_τ |Δ_τ|` over real
/// `(k+1)`-chains `Δ`, as a linear program.
pub fn flat_norm_weighted<C: Coefficient>(
    complex: &SimplicialComplex,
    sigma: &Chain<C>,
    simplex_weight: f64,
    coface_weight: f64,
) -> Result<FlatNorm> {
    sigma.check_in(complex)?;
    let k = sigma.dim();
    let d = k + 1;
    if sigma.is_zero() {
        return Ok(FlatNorm {
            value: 0.0,
            residual_mass: 0.0,
            filling_mass: 0.0,
            filling: Chain::zero(d),
        });
    }
    let ne = complex.count(k);
    let nt = complex.count(d);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let plus: Vec<_> = (0..nt)
        .map(|_| lp.add_var(coface_weight, (0.0, f64::INFINITY)))
        .collect();
    let minus: Vec<_> = (0..nt)
        .map(|_| lp.add_var(coface_weight, (0.0, f64::INFINITY)))
        .collect();
    let slack: Vec<_> = (0..ne)
        .map(|_| lp.add_var(simplex_weight, (0.0, f64::INFINITY)))
        .collect();
    for e in 0..ne {
        let s = sigma.get(e).to_f64();
        let mut up = vec![(slack[e], 1.0)];
        let mut down = vec![(slack[e], 1.0)];
        for &(tau, sign) in complex.cofaces_of(k, e) {
            let b = sign as f64;
            up.push((plus[tau], b));
            up.push((minus[tau], -b));
            down.push((plus[tau], -b));
            down.push((minus[tau], b));
        }
        // t_e ≥ σ_e - (∂Δ)_e and t_e ≥ (∂Δ)_e - σ_e
        lp.add_constraint(up.as_slice(), ComparisonOp::Ge, s);
        lp.add_constraint(down.as_slice(), ComparisonOp::Ge, -s);
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::Solver(format!("flat norm LP: {e}")))?;
    let delta: Vec<f64> = (0..nt).map(|t| sol[plus[t]] - sol[minus[t]]).collect();
    let filling = RealChain::from_dense(d, &delta, 1e-12);
    let fb = crate::chain::boundary(complex, &filling)?;
    let residual = sigma.to_real().sub(&fb)?;
    let residual_mass = mass(&residual, simplex_weight);
    let filling_mass = mass(&filling, coface_weight);
    Ok(FlatNorm {
        value: sol.objective(),
        residual_mass,
        filling_mass,
        filling,
    })
}

/// Flat norm on the torus triangulation of side `n`, with edge weight `2ε`
/// and triangle weight `√3ε²`.
pub fn flat_norm<C: Coefficient>(
    complex: &SimplicialComplex,
    sigma: &Chain<C>,
    n: usize,
) -> Result<FlatNorm> {
    let eps = 1.0 / n as f64;
    flat_norm_weighted(complex, sigma, 2.0 * eps, 3f64.sqrt() * eps * eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{boundary, IntChain};
    use crate::complex::build_torus_triangulation;
    use proptest::prelude::*;

    #[test]
    fn single_triangle_boundary() {
        for n in [4, 8] {
            let c = build_torus_triangulation(n).unwrap();
            let eps = 1.0 / n as f64;
            let b = boundary(&c, &Chain::elementary(2, 3, 1i64)).unwrap();
            let f = flat_norm(&c, &b, n).unwrap();
            assert!((f.value - 3f64.sqrt() * eps * eps).abs() < 1e-10);
            assert!((f.value - f.residual_mass - f.filling_mass).abs() < 1e-9);
        }
        let c = build_torus_triangulation(4).unwrap();
        assert_eq!(flat_norm(&c, &IntChain::zero(1), 4).unwrap().value, 0.0);
    }

    #[test]
    fn basis_cycle_is_not_filled() {
        let c = build_torus_triangulation(4).unwrap();
        let s1 = crate::torus::basis_cycles(&c).unwrap().0;
        let f = flat_norm(&c, &s1, 4).unwrap();
        assert!(f.value <= mass(&s1, 0.5) + 1e-10);
        assert!(f.value > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bounded_by_mass_and_filling_area(
            edges in prop::collection::vec((0usize..48, -3i64..=3), 0..10),
            tris in prop::collection::vec((0usize..32, -2i64..=2), 0..6),
        ) {
            let c = build_torus_triangulation(4).unwrap();
            let sigma = Chain::from_pairs(1, edges).unwrap();
            let f = flat_norm(&c, &sigma, 4).unwrap();
            prop_assert!(f.value <= mass(&sigma, 0.5) + 1e-9);
            let delta = Chain::from_pairs(2, tris).unwrap();
            let bd = boundary(&c, &delta).unwrap();
            let g = flat_norm(&c, &bd, 4).unwrap();
            prop_assert!(g.value <= mass(&delta, 3f64.sqrt() / 16.0) + 1e-9);
        }
    }
}
