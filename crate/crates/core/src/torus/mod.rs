//! Scaling laboratory on the triangulated flat torus: pairings of chains with
//! smooth 1-forms, the rescaled generator and quadratic variation, flat
//! norms, triangle quadrature identities and the combined scaling report.

mod flat;
mod forms;
mod quadrature;
mod scaling;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Coefficient, IntChain};
use crate::complex::{torus_vertex, Metric, SimplicialComplex};
use crate::error::{Error, Result};
use crate::walk::{enumerate_transitions, jump};

pub use flat::{flat_norm, flat_norm_weighted, mass, FlatNorm};
pub use forms::{
    gauss_legendre, triangle_quadrature, wave_vector, FormMode, OneForm, ScalarField, ScalarMode,
    BUILTIN_FORMS,
};
pub use quadrature::{
    horizontal_integral, triangle_boundary_check, triangle_integral_check, voronoi_identities,
    DunavantRule, H1Check, VoronoiIdentities,
};
pub use scaling::{
    fit_rate, run_scaling_experiment, FormRow, ScalingConfig, ScalingReport, ScalingRow,
};

/// Straight-line geometry of every edge and triangle of a torus
/// triangulation, using minimal-image displacements.
#[derive(Clone, Debug)]
pub struct TorusGeometry {
    pub n: usize,
    pub eps: f64,
    edges: Vec<([f64; 2], [f64; 2])>,
    triangles: Vec<([f64; 2], [f64; 2], [f64; 2])>,
}

impl TorusGeometry {
    pub fn new(complex: &SimplicialComplex) -> Result<Self> {
        let geo = complex
            .geometry()
            .ok_or_else(|| Error::InvalidArgument("complex has no coordinates".into()))?;
        if !matches!(geo.metric, Metric::FlatTorus { .. }) {
            return Err(Error::InvalidArgument(
                "complex is not on a flat torus".into(),
            ));
        }
        let n = (complex.count(0) as f64).sqrt().round() as usize;
        if n * n != complex.count(0)
            || complex.count(1) != 3 * n * n
            || complex.count(2) != 2 * n * n
        {
            return Err(Error::InvalidArgument(
                "not a torus lattice triangulation".into(),
            ));
        }
        let pos = |v: u32| [geo.points[v as usize][0], geo.points[v as usize][1]];
        let disp = |a: u32, b: u32| {
            let d = geo
                .metric
                .displacement(&geo.points[a as usize], &geo.points[b as usize]);
            [d[0], d[1]]
        };
        let edges = complex
            .simplices(1)
            .iter()
            .map(|s| {
                let v = s.vertices();
                (pos(v[0]), disp(v[0], v[1]))
            })
            .collect();
        let triangles = complex
            .simplices(2)
            .iter()
            .map(|s| {
                let v = s.vertices();
                (pos(v[0]), disp(v[0], v[1]), disp(v[0], v[2]))
            })
            .collect();
        Ok(TorusGeometry {
            n,
            eps: 1.0 / n as f64,
            edges,
            triangles,
        })
    }

    /// Start point and displacement of edge `id`, oriented as stored.
    pub fn edge(&self, id: usize) -> ([f64; 2], [f64; 2]) {
        self.edges[id]
    }

    pub fn triangle(&self, id: usize) -> ([f64; 2], [f64; 2], [f64; 2]) {
        self.triangles[id]
    }

    /// `+1` when the stored vertex order of triangle `id` is counterclockwise.
    pub fn triangle_orientation(&self, id: usize) -> f64 {
        let (_, d1, d2) = self.triangles[id];
        (d1[0] * d2[1] - d1[1] * d2[0]).signum()
    }

    pub fn edge_length(&self) -> f64 {
        2.0 * self.eps
    }

    pub fn triangle_area(&self) -> f64 {
        3f64.sqrt() * self.eps * self.eps
    }

    /// `⟨σ, φ⟩ = Σ_e λ_e ∫_e φ`.
    pub fn pair<C: Coefficient>(&self, sigma: &Chain<C>, phi: &OneForm) -> f64 {
        sigma
            .iter()
            .map(|(e, c)| {
                let (p, d) = self.edges[e];
                c.to_f64() * phi.line_integral(p, d)
            })
            .sum()
    }

    /// `⟨sign · ∂τ, φ⟩` from the three edge integrals.
    pub fn boundary_pairing(
        &self,
        complex: &SimplicialComplex,
        tau: usize,
        sign: i8,
        phi: &OneForm,
    ) -> f64 {
        complex
            .faces_of(2, tau)
            .iter()
            .map(|&(e, s)| {
                let (p, d) = self.edges[e];
                (s * sign) as f64 * phi.line_integral(p, d)
            })
            .sum()
    }

    /// `⟨sign · ∂τ, φ⟩` by Stokes: `sign · ∫_τ *dφ` over the oriented triangle.
    pub fn stokes_pairing(
        &self,
        tau: usize,
        sign: i8,
        star_dphi: &ScalarField,
        order: usize,
    ) -> f64 {
        let (a, d1, d2) = self.triangles[tau];
        sign as f64
            * self.triangle_orientation(tau)
            * triangle_quadrature(a, d1, d2, order, |x| star_dphi.eval(x))
    }

    /// `ε Σ_e |λ_e| ∫_e f ds` with a 16-point Gauss rule on every edge.
    pub fn ucp<C: Coefficient, F: Fn([f64; 2]) -> f64>(&self, sigma: &Chain<C>, f: F) -> f64 {
        let (x, w) = gauss_legendre(16);
        let len = self.edge_length();
        self.eps
            * sigma
                .iter()
                .map(|(e, c)| {
                    let (p, d) = self.edges[e];
                    let integral: f64 = x
                        .iter()
                        .zip(&w)
                        .map(|(s, w)| w * f([p[0] + s * d[0], p[1] + s * d[1]]))
                        .sum();
                    c.to_f64().abs() * integral * len
                })
                .sum::<f64>()
    }
}

/// `𝒜_n⟨σ, φ⟩ = -ε⁻² Σ_τ ⟨∂τ, φ⟩ w(σ, ∂τ)`.
pub fn rescaled_generator(
    complex: &SimplicialComplex,
    geo: &TorusGeometry,
    sigma: &IntChain,
    phi: &OneForm,
) -> Result<f64> {
    let mut acc = 0.0;
    for tr in enumerate_transitions(complex, sigma)? {
        acc -= tr.rate as f64 * geo.boundary_pairing(complex, tr.tau, tr.sign, phi);
    }
    Ok(acc / (geo.eps * geo.eps))
}

/// Same quantity as [`rescaled_generator`], summed as
/// `ε⁻² Σ (⟨σ - ∂τ, φ⟩ - ⟨σ, φ⟩) w`.
pub fn rescaled_generator_by_jumps(
    complex: &SimplicialComplex,
    geo: &TorusGeometry,
    sigma: &IntChain,
    phi: &OneForm,
) -> Result<f64> {
    let here = geo.pair(sigma, phi);
    let mut acc = 0.0;
    for tr in enumerate_transitions(complex, sigma)? {
        let next = jump(complex, sigma, tr.tau, tr.sign)?;
        acc += tr.rate as f64 * (geo.pair(&next, phi) - here);
    }
    Ok(acc / (geo.eps * geo.eps))
}

/// `ε⁻² Σ_τ ⟨∂τ, φ⟩² w(σ, ∂τ)`.
pub fn quadratic_variation(
    complex: &SimplicialComplex,
    geo: &TorusGeometry,
    sigma: &IntChain,
    phi: &OneForm,
) -> Result<f64> {
    let mut acc = 0.0;
    for tr in enumerate_transitions(complex, sigma)? {
        let p = geo.boundary_pairing(complex, tr.tau, tr.sign, phi);
        acc += tr.rate as f64 * p * p;
    }
    Ok(acc / (geo.eps * geo.eps))
}

/// Continuum limit of [`rescaled_generator`] on the horizontal loop at
/// height `y0` oriented along `+x₁`: `-∫_0^2 ∂₂(*dφ)(x₁, y0) dx₁`.
pub fn horizontal_generator_limit(phi: &OneForm, y0: f64) -> f64 {
    let h2 = phi.star_d().derivative(1);
    -2.0 * h2
        .modes
        .iter()
        .filter(|md| md.n == 0)
        .map(|md| (md.c * Complex64::from_polar(1.0, wave_vector(0, md.m)[1] * y0)).re)
        .sum::<f64>()
}

fn oriented_edge(complex: &SimplicialComplex, u: u32, v: u32) -> Result<(usize, i64)> {
    complex
        .oriented_id(&[u, v])
        .map(|(id, s)| (id, s as i64))
        .ok_or_else(|| Error::InvalidArgument(format!("no edge between {u} and {v}")))
}

/// Lattice directions in axial coordinates, counterclockwise from `+x₁`.
pub const AXIAL_DIRECTIONS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

fn side(complex: &SimplicialComplex) -> Result<usize> {
    let n = (complex.count(0) as f64).sqrt().round() as usize;
    if n * n != complex.count(0) {
        return Err(Error::InvalidArgument(
            "not a torus lattice triangulation".into(),
        ));
    }
    Ok(n)
}

/// The closed lattice line through axial `(a, b)` in direction `dir` (an
/// index into [`AXIAL_DIRECTIONS`]), one unit coefficient per edge.
pub fn straight_cycle(complex: &SimplicialComplex, a: i64, b: i64, dir: usize) -> Result<IntChain> {
    let n = side(complex)?;
    let (da, db) = AXIAL_DIRECTIONS[dir % 6];
    let start = torus_vertex(n, a, b);
    let mut chain = Chain::zero(1);
    let (mut x, mut y) = (a, b);
    loop {
        let (u, v) = (torus_vertex(n, x, y), torus_vertex(n, x + da, y + db));
        let (id, s) = oriented_edge(complex, u, v)?;
        chain.add_term(id, s)?;
        x += da;
        y += db;
        if v == start {
            break;
        }
    }
    Ok(chain)
}

/// Boundary of the lattice hexagon of radius `r` centred at axial `(a, b)`,
/// counterclockwise.
pub fn hexagon_cycle(complex: &SimplicialComplex, a: i64, b: i64, r: i64) -> Result<IntChain> {
    let n = side(complex)?;
    if r < 1 || 2 * r >= n as i64 {
        return Err(Error::InvalidArgument(format!(
            "hexagon radius {r} does not fit n = {n}"
        )));
    }
    let mut chain = Chain::zero(1);
    let (mut x, mut y) = (a, b - r);
    for &(da, db) in &AXIAL_DIRECTIONS {
        for _ in 0..r {
            let (id, s) = oriented_edge(
                complex,
                torus_vertex(n, x, y),
                torus_vertex(n, x + da, y + db),
            )?;
            chain.add_term(id, s)?;
            x += da;
            y += db;
        }
    }
    Ok(chain)
}

/// `(σ₁, σ₂)`: the horizontal loop `x₂ = 0` oriented along `+x₁` (`n`
/// edges) and the loop through the origin with direction `(ε, √3ε)`, which
/// closes after `2n` edges.
pub fn basis_cycles(complex: &SimplicialComplex) -> Result<(IntChain, IntChain)> {
    Ok((
        straight_cycle(complex, 0, 0, 0)?,
        straight_cycle(complex, 0, 0, 1)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSample {
    pub n: usize,
    pub eps: f64,
    pub value: f64,
    pub limit: f64,
    pub error: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{boundary, is_cycle};
    use crate::complex::build_torus_triangulation;
    use std::f64::consts::PI;

    #[test]
    fn basis_cycles_have_expected_lengths() {
        for n in [4, 8] {
            let c = build_torus_triangulation(n).unwrap();
            let (s1, s2) = basis_cycles(&c).unwrap();
            assert!(is_cycle(&c, &s1).unwrap() && is_cycle(&c, &s2).unwrap());
            assert_eq!(s1.weight().unwrap(), n as i64);
            assert_eq!(s2.weight().unwrap(), 2 * n as i64);
        }
    }

    #[test]
    fn hexagons_are_boundaries_of_their_disks() {
        let c = build_torus_triangulation(8).unwrap();
        let h = hexagon_cycle(&c, 3, 2, 2).unwrap();
        assert_eq!(h.weight().unwrap(), 12);
        assert!(is_cycle(&c, &h).unwrap());
        assert!(crate::spectral::in_boundary_image(&c, &h).unwrap());
    }

    #[test]
    fn pairing_of_constant_form_measures_displacement() {
        let c = build_torus_triangulation(4).unwrap();
        let g = TorusGeometry::new(&c).unwrap();
        let dx1 = OneForm {
            name: "dx1".into(),
            modes: vec![FormMode {
                n: 0,
                m: 0,
                c1: 1.0.into(),
                c2: 0.0.into(),
            }],
        };
        let (s1, s2) = basis_cycles(&c).unwrap();
        assert!((g.pair(&s1, &dx1) - 2.0).abs() < 1e-12);
        assert!((g.pair(&s2, &dx1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stokes_and_edge_routes_agree() {
        let c = build_torus_triangulation(6).unwrap();
        let g = TorusGeometry::new(&c).unwrap();
        let phi = OneForm::builtin("mixed").unwrap();
        let h = phi.star_d();
        for tau in (0..c.count(2)).step_by(5) {
            for sign in [1, -1] {
                let a = g.boundary_pairing(&c, tau, sign, &phi);
                let b = g.stokes_pairing(tau, sign, &h, 16);
                assert!((a - b).abs() < 1e-13, "τ{tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn generator_routes_agree_and_approach_limit() {
        let phi = OneForm::builtin("cos_x2").unwrap();
        assert!((horizontal_generator_limit(&phi, 0.0) + 8.0 * PI * PI / 3.0).abs() < 1e-12);
        for n in [8, 16] {
            let c = build_torus_triangulation(n).unwrap();
            let g = TorusGeometry::new(&c).unwrap();
            let s1 = basis_cycles(&c).unwrap().0;
            let a = rescaled_generator(&c, &g, &s1, &phi).unwrap();
            let b = rescaled_generator_by_jumps(&c, &g, &s1, &phi).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs());
            assert!((a + 8.0 * PI * PI / 3.0).abs() < 2.0);
        }
    }

    #[test]
    fn boundary_pairing_is_pairing_of_boundary() {
        let c = build_torus_triangulation(4).unwrap();
        let g = TorusGeometry::new(&c).unwrap();
        let phi = OneForm::builtin("sin_x1").unwrap();
        for tau in 0..c.count(2) {
            let b = boundary(&c, &Chain::elementary(2, tau, 1i64)).unwrap();
            assert!((g.pair(&b, &phi) - g.boundary_pairing(&c, tau, 1, &phi)).abs() < 1e-14);
        }
    }
}
