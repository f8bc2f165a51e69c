use serde::{Deserialize, Serialize};

use super::forms::{gauss_legendre, triangle_quadrature, OneForm, ScalarField};

/// Seven-point degree-5 rule on a triangle (barycentric points, weights
/// summing to 1).
#[derive(Clone, Copy, Debug)]
pub struct DunavantRule;

impl DunavantRule {
    fn points() -> [([f64; 3], f64); 7] {
        let s15 = 15f64.sqrt();
        let a = (6.0 - s15) / 21.0;
        let b = (6.0 + s15) / 21.0;
        let wa = (155.0 - s15) / 1200.0;
        let wb = (155.0 + s15) / 1200.0;
        [
            ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 9.0 / 40.0),
            ([a, a, 1.0 - 2.0 * a], wa),
            ([a, 1.0 - 2.0 * a, a], wa),
            ([1.0 - 2.0 * a, a, a], wa),
            ([b, b, 1.0 - 2.0 * b], wb),
            ([b, 1.0 - 2.0 * b, b], wb),
            ([1.0 - 2.0 * b, b, b], wb),
        ]
    }

    /// Integral of `f` over the triangle `p, q, r` (unsigned area).
    pub fn integrate<F: Fn([f64; 2]) -> f64>(p: [f64; 2], q: [f64; 2], r: [f64; 2], f: F) -> f64 {
        let area = 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])).abs();
        area * Self::points()
            .iter()
            .map(|(l, w)| {
                let x = [
                    l[0] * p[0] + l[1] * q[0] + l[2] * r[0],
                    l[0] * p[1] + l[1] * q[1] + l[2] * r[1],
                ];
                w * f(x)
            })
            .sum::<f64>()
    }
}

/// The integrals over the reference triangle `(0,0), (2ε,0), (ε,√3ε)` of the
/// squared distance to the nearest vertex `c` (scaled by `ε⁻²`) and its
/// moments. Each Voronoi cell is split into two triangles at the edge
/// midpoints and the barycentre, where `c` is a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiIdentities {
    pub eps: f64,
    /// `∫ c`.
    pub c: f64,
    /// `∫ (x₁ - ε) c`.
    pub x1_c: f64,
    /// `∫ ∂₁c`.
    pub d1c: f64,
    /// `∫ (x₁ - ε) ∂₁c`.
    pub x1_d1c: f64,
    /// `∫ (x₂ - ε/√3) ∂₁c`.
    pub x2_d1c: f64,
    /// Per-cell contributions to `x1_d1c`.
    pub x1_d1c_cells: [f64; 3],
}

/// Vertices, and the two sub-triangles of each Voronoi cell.
pub(crate) fn voronoi_cells(eps: f64) -> ([[f64; 2]; 3], [[[f64; 2]; 3]; 6]) {
    let s3 = 3f64.sqrt();
    let v = [[0.0, 0.0], [2.0 * eps, 0.0], [eps, s3 * eps]];
    let g = [eps, eps / s3];
    let mid = |a: [f64; 2], b: [f64; 2]| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let m01 = mid(v[0], v[1]);
    let m12 = mid(v[1], v[2]);
    let m02 = mid(v[0], v[2]);
    (
        v,
        [
            [v[0], m01, g],
            [v[0], g, m02],
            [v[1], m12, g],
            [v[1], g, m01],
            [v[2], m02, g],
            [v[2], g, m12],
        ],
    )
}

pub fn voronoi_identities(eps: f64) -> VoronoiIdentities {
    let (v, pieces) = voronoi_cells(eps);
    let s3 = 3f64.sqrt();
    let e2 = eps * eps;
    let mut out = VoronoiIdentities {
        eps,
        c: 0.0,
        x1_c: 0.0,
        d1c: 0.0,
        x1_d1c: 0.0,
        x2_d1c: 0.0,
        x1_d1c_cells: [0.0; 3],
    };
    for (i, t) in pieces.iter().enumerate() {
        let cell = i / 2;
        let o = v[cell];
        let c = |x: [f64; 2]| ((x[0] - o[0]).powi(2) + (x[1] - o[1]).powi(2)) / e2;
        let d1c = |x: [f64; 2]| 2.0 * (x[0] - o[0]) / e2;
        let q = |f: &dyn Fn([f64; 2]) -> f64| DunavantRule::integrate(t[0], t[1], t[2], f);
        out.c += q(&c);
        out.x1_c += q(&|x| (x[0] - eps) * c(x));
        out.d1c += q(&d1c);
        let m = q(&|x| (x[0] - eps) * d1c(x));
        out.x1_d1c += m;
        out.x1_d1c_cells[cell] += m;
        out.x2_d1c += q(&|x| (x[1] - eps / s3) * d1c(x));
    }
    out
}

/// Integral of a smooth `H` over the clockwise triangle `[021]` translated
/// to `base`, against its expansion and its edge approximation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Check {
    pub eps: f64,
    /// Signed integral (negative orientation).
    pub integral: f64,
    /// `-√3 H ε² - (√3 H₁ + H₂) ε³` at `base`.
    pub expansion: f64,
    /// `-(√3/2) ε ∫_0^{2ε} H(base + (x₁, 0)) dx₁`.
    pub edge_form: f64,
}

fn edge_integral(h: &ScalarField, base: [f64; 2], eps: f64) -> f64 {
    2.0 * eps * h.segment_mean(base, [2.0 * eps, 0.0])
}

pub fn triangle_integral_check(h: &ScalarField, base: [f64; 2], eps: f64) -> H1Check {
    let s3 = 3f64.sqrt();
    let area = triangle_quadrature(base, [2.0 * eps, 0.0], [eps, s3 * eps], 16, |x| h.eval(x));
    let h0 = h.eval(base);
    let h1 = h.derivative(0).eval(base);
    let h2 = h.derivative(1).eval(base);
    H1Check {
        eps,
        integral: -area,
        expansion: -s3 * h0 * eps * eps - (s3 * h1 + h2) * eps.powi(3),
        edge_form: -0.5 * s3 * eps * edge_integral(h, base, eps),
    }
}

/// `⟨∂[012], φ⟩` for the counterclockwise triangle at `base` from the edge
/// integrals, and the prediction `(√3/2) ε ∫_0^{2ε} *dφ(base + (x₁, 0)) dx₁`.
pub fn triangle_boundary_check(phi: &OneForm, base: [f64; 2], eps: f64) -> (f64, f64) {
    let s3 = 3f64.sqrt();
    let p1 = [base[0] + 2.0 * eps, base[1]];
    let p2 = [base[0] + eps, base[1] + s3 * eps];
    let pairing = phi.line_integral(base, [2.0 * eps, 0.0])
        + phi.line_integral(p1, [-eps, s3 * eps])
        + phi.line_integral(p2, [-eps, -s3 * eps]);
    let h = phi.star_d();
    (pairing, 0.5 * s3 * eps * edge_integral(&h, base, eps))
}

/// `∫_0^{2ε} f(base + (x₁, 0)) dx₁` by Gauss–Legendre, for callables that
/// are not Fourier sums.
pub fn horizontal_integral<F: Fn([f64; 2]) -> f64>(f: F, base: [f64; 2], eps: f64) -> f64 {
    let (x, w) = gauss_legendre(16);
    2.0 * eps
        * x.iter()
            .zip(&w)
            .map(|(s, w)| w * f([base[0] + 2.0 * eps * s, base[1]]))
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `∫ x^a y^b` over a triangle, exact: the triangle is mapped from the
    /// unit simplex and the polynomial expanded by the multinomial theorem.
    fn exact_monomial(p: [f64; 2], q: [f64; 2], r: [f64; 2], a: u32, b: u32) -> f64 {
        // x = p0 + s u0 + t v0, y = p1 + s u1 + t v1
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let jac = (u[0] * v[1] - u[1] * v[0]).abs();
        let fact = |n: u32| (1..=n).map(|i| i as f64).product::<f64>();
        // ∫_simplex s^i t^j = i! j! / (i + j + 2)!
        let simplex = |i: u32, j: u32| fact(i) * fact(j) / fact(i + j + 2);
        let mut total = 0.0;
        for i0 in 0..=a {
            for i1 in 0..=(a - i0) {
                let i2 = a - i0 - i1;
                let cx = fact(a) / (fact(i0) * fact(i1) * fact(i2))
                    * p[0].powi(i0 as i32)
                    * u[0].powi(i1 as i32)
                    * v[0].powi(i2 as i32);
                for j0 in 0..=b {
                    for j1 in 0..=(b - j0) {
                        let j2 = b - j0 - j1;
                        let cy = fact(b) / (fact(j0) * fact(j1) * fact(j2))
                            * p[1].powi(j0 as i32)
                            * u[1].powi(j1 as i32)
                            * v[1].powi(j2 as i32);
                        total += cx * cy * simplex(i1 + j1, i2 + j2);
                    }
                }
            }
        }
        total * jac
    }

    #[test]
    fn dunavant_is_exact_to_degree_five() {
        let (p, q, r) = ([0.1, -0.2], [1.3, 0.4], [0.2, 0.9]);
        for a in 0..=5 {
            for b in 0..=(5 - a) {
                let got =
                    DunavantRule::integrate(p, q, r, |x| x[0].powi(a as i32) * x[1].powi(b as i32));
                let want = exact_monomial(p, q, r, a, b);
                assert!((got - want).abs() < 1e-13, "x^{a} y^{b}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn voronoi_identities_match_exact_integration() {
        for eps in [1.0, 0.125, 1.0 / 32.0] {
            let id = voronoi_identities(eps);
            let (v, pieces) = voronoi_cells(eps);
            let e2 = eps * eps;
            // c = ((x - o)² + (y - o)²)/ε² expanded into monomials
            let mut c = 0.0;
            let mut x1d1c = [0.0; 3];
            for (i, t) in pieces.iter().enumerate() {
                let o = v[i / 2];
                let m = |a, b| exact_monomial(t[0], t[1], t[2], a, b);
                c += (m(2, 0) - 2.0 * o[0] * m(1, 0) + o[0] * o[0] * m(0, 0) + m(0, 2)
                    - 2.0 * o[1] * m(0, 1)
                    + o[1] * o[1] * m(0, 0))
                    / e2;
                // (x - ε) 2 (x - o₀) / ε²
                x1d1c[i / 2] +=
                    2.0 * (m(2, 0) - (eps + o[0]) * m(1, 0) + eps * o[0] * m(0, 0)) / e2;
            }
            let unit = 3f64.sqrt() * e2;
            assert!((id.c - c).abs() < 1e-12 * unit);
            for k in 0..3 {
                assert!((id.x1_d1c_cells[k] - x1d1c[k]).abs() < 1e-12 * unit);
            }
            assert!((c / unit - 5.0 / 9.0).abs() < 1e-12);
            assert!((x1d1c[0] / unit + 0.125).abs() < 1e-12);
            assert!((x1d1c[1] / unit + 0.125).abs() < 1e-12);
            assert!((x1d1c[2] / unit - 1.0 / 36.0).abs() < 1e-12);
            assert!(id.x1_c.abs() < 1e-12 * unit * eps);
            assert!(id.d1c.abs() < 1e-12 * eps && id.x2_d1c.abs() < 1e-12 * unit);
        }
    }

    #[test]
    fn h1_expansion_orders() {
        let h = ScalarField {
            modes: vec![
                super::super::forms::ScalarMode {
                    n: 1,
                    m: 1,
                    c: 1.0.into(),
                },
                super::super::forms::ScalarMode {
                    n: 0,
                    m: 2,
                    c: num_complex::Complex64::new(0.3, -0.4),
                },
            ],
        };
        let base = [0.3, 0.2];
        let mut prev: Option<(f64, f64)> = None;
        for n in [32, 64, 128] {
            let eps = 1.0 / n as f64;
            let r = triangle_integral_check(&h, base, eps);
            let e_exp = (r.integral - r.expansion).abs();
            let e_edge = (r.integral - r.edge_form).abs();
            if let Some((a, b)) = prev {
                assert!(
                    (a / e_exp).log2() > 3.6,
                    "expansion remainder {a} -> {e_exp}"
                );
                assert!(
                    (b / e_edge).log2() > 2.7,
                    "edge form remainder is not O(ε³)"
                );
            }
            prev = Some((e_exp, e_edge));
        }
    }

    #[test]
    fn triangle_pairing_prediction_is_third_order() {
        let phi = OneForm::builtin("mixed").unwrap();
        let base = [0.41, 0.77];
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| {
                let (a, b) = triangle_boundary_check(&phi, base, 1.0 / n as f64);
                (a - b).abs()
            })
            .collect();
        assert!((errs[0] / errs[1]).log2() > 2.7 && (errs[1] / errs[2]).log2() > 2.7);
    }

    #[test]
    fn gauss_line_integral_agrees_with_exact() {
        let h = OneForm::builtin("mixed").unwrap().star_d();
        let base = [0.2, 0.5];
        let a = horizontal_integral(|x| h.eval(x), base, 0.1);
        assert!((a - edge_integral(&h, base, 0.1)).abs() < 1e-13);
    }
}
