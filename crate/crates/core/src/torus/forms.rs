//! Trigonometric 1-forms and scalar fields on the flat torus
//! `R^2 / (2Z × √3Z)`. A mode `(n, m)` is `e^{iθ}` with
//! `θ = 2π(n x₁/2 + m x₂/√3)`; fields are real parts of finite sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wave vector of mode `(n, m)`.
pub fn wave_vector(n: i32, m: i32) -> [f64; 2] {
    [PI * n as f64, 2.0 * PI * m as f64 / 3f64.sqrt()]
}

fn phase(n: i32, m: i32, x: [f64; 2]) -> Complex64 {
    let k = wave_vector(n, m);
    Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1])
}

/// `(e^{ia} - 1) / (ia)`, equal to `∫_0^1 e^{ias} ds`.
fn mean_phase(a: f64) -> Complex64 {
    if a.abs() < 1e-8 {
        Complex64::new(1.0 - a * a / 6.0, a / 2.0)
    } else {
        (Complex64::from_polar(1.0, a) - 1.0) / Complex64::new(0.0, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarMode {
    pub n: i32,
    pub m: i32,
    pub c: Complex64,
}

/// `f(x) = Re Σ c e^{iθ}`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalarField {
    pub modes: Vec<ScalarMode>,
}

impl ScalarField {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.modes
            .iter()
            .map(|md| (md.c * phase(md.n, md.m, x)).re)
            .sum()
    }

    /// Partial derivative along `x₁` (`axis = 0`) or `x₂` (`axis = 1`).
    pub fn derivative(&self, axis: usize) -> ScalarField {
        ScalarField {
            modes: self
                .modes
                .iter()
                .map(|md| ScalarMode {
                    c: md.c * Complex64::new(0.0, wave_vector(md.n, md.m)[axis]),
                    ..*md
                })
                .collect(),
        }
    }

    /// Exact integral along the segment `p → p + d`, per unit parameter
    /// (multiply by the length for an arclength integral).
    pub fn segment_mean(&self, p: [f64; 2], d: [f64; 2]) -> f64 {
        self.modes
            .iter()
            .map(|md| {
                let k = wave_vector(md.n, md.m);
                (md.c * phase(md.n, md.m, p) * mean_phase(k[0] * d[0] + k[1] * d[1])).re
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormMode {
    pub n: i32,
    pub m: i32,
    /// Coefficient of `dx₁`.
    pub c1: Complex64,
    /// Coefficient of `dx₂`.
    pub c2: Complex64,
}

/// `φ = φ¹ dx₁ + φ² dx₂` with trigonometric components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneForm {
    pub name: String,
    pub modes: Vec<FormMode>,
}

impl OneForm {
    pub fn component(&self, i: usize) -> ScalarField {
        ScalarField {
            modes: self
                .modes
                .iter()
                .map(|md| ScalarMode {
                    n: md.n,
                    m: md.m,
                    c: if i == 0 { md.c1 } else { md.c2 },
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        [self.component(0).eval(x), self.component(1).eval(x)]
    }

    /// `∫_0^1 φ(p + s d) · d ds`, exact.
    pub fn line_integral(&self, p: [f64; 2], d: [f64; 2]) -> f64 {
        self.modes
            .iter()
            .map(|md| {
                let k = wave_vector(md.n, md.m);
                let amp = md.c1 * d[0] + md.c2 * d[1];
                (amp * phase(md.n, md.m, p) * mean_phase(k[0] * d[0] + k[1] * d[1])).re
            })
            .sum()
    }

    /// `*dφ = ∂₁φ² - ∂₂φ¹`.
    pub fn star_d(&self) -> ScalarField {
        ScalarField {
            modes: self
                .modes
                .iter()
                .map(|md| {
                    let k = wave_vector(md.n, md.m);
                    ScalarMode {
                        n: md.n,
                        m: md.m,
                        c: Complex64::new(0.0, k[0]) * md.c2 - Complex64::new(0.0, k[1]) * md.c1,
                    }
                })
                .collect(),
        }
    }

    fn map_modes(
        &self,
        name: &str,
        f: impl Fn(&FormMode, [f64; 2]) -> (Complex64, Complex64),
    ) -> OneForm {
        OneForm {
            name: format!("{name}({})", self.name),
            modes: self
                .modes
                .iter()
                .map(|md| {
                    let (c1, c2) = f(md, wave_vector(md.n, md.m));
                    FormMode { c1, c2, ..*md }
                })
                .collect(),
        }
    }

    /// `(φ¹₂₂ - φ²₁₂) dx₁ + (φ²₁₁ - φ¹₁₂) dx₂`.
    pub fn hodge_up(&self) -> OneForm {
        self.map_modes("up", |md, k| {
            (
                -(k[1] * k[1]) * md.c1 + (k[0] * k[1]) * md.c2,
                -(k[0] * k[0]) * md.c2 + (k[0] * k[1]) * md.c1,
            )
        })
    }

    /// `(φ¹₁₁ + φ²₁₂) dx₁ + (φ¹₁₂ + φ²₂₂) dx₂`.
    pub fn hodge_down(&self) -> OneForm {
        self.map_modes("down", |md, k| {
            (
                -(k[0] * k[0]) * md.c1 - (k[0] * k[1]) * md.c2,
                -(k[0] * k[1]) * md.c1 - (k[1] * k[1]) * md.c2,
            )
        })
    }

    pub fn builtin(name: &str) -> Result<OneForm> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        // Re(-i e^{iθ}) = sin θ
        let sin = Complex64::new(0.0, -1.0);
        let modes = match name {
            "cos_x2" => vec![FormMode {
                n: 0,
                m: 1,
                c1: one,
                c2: zero,
            }],
            "sin_x1" => vec![FormMode {
                n: 1,
                m: 0,
                c1: zero,
                c2: sin,
            }],
            "mixed" => vec![
                FormMode {
                    n: 1,
                    m: 1,
                    c1: one,
                    c2: zero,
                },
                FormMode {
                    n: 2,
                    m: 0,
                    c1: zero,
                    c2: 0.5 * sin,
                },
                FormMode {
                    n: 0,
                    m: 2,
                    c1: 0.25 * sin,
                    c2: zero,
                },
            ],
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown builtin form {other:?}; known: {}",
                    BUILTIN_FORMS.join(", ")
                )))
            }
        };
        Ok(OneForm {
            name: name.to_string(),
            modes,
        })
    }
}

pub const BUILTIN_FORMS: &[&str] = &["cos_x2", "sin_x1", "mixed"];

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Integral of `f` over the triangle `a, a+d1, a+d2` (unsigned area),
/// collapsed Gauss–Legendre with `order²` points.
pub fn triangle_quadrature<F: Fn([f64; 2]) -> f64>(
    a: [f64; 2],
    d1: [f64; 2],
    d2: [f64; 2],
    order: usize,
    f: F,
) -> f64 {
    let (x, w) = gauss_legendre(order);
    let jac = (d1[0] * d2[1] - d1[1] * d2[0]).abs();
    let mut acc = 0.0;
    for (u, wu) in x.iter().zip(&w) {
        for (v, wv) in x.iter().zip(&w) {
            // (u, v) in the square maps to (s, t) = (u, (1-u) v) in the simplex
            let s = *u;
            let t = (1.0 - u) * v;
            let p = [a[0] + s * d1[0] + t * d2[0], a[1] + s * d1[1] + t * d2[1]];
            acc += wu * wv * (1.0 - u) * f(p);
        }
    }
    acc * jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        for p in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn line_integral_matches_quadrature() {
        let phi = OneForm::builtin("mixed").unwrap();
        let (p, d) = ([0.3, 0.7], [0.25, -0.1]);
        let (x, w) = gauss_legendre(20);
        let q: f64 = x
            .iter()
            .zip(&w)
            .map(|(s, w)| {
                let v = phi.eval([p[0] + s * d[0], p[1] + s * d[1]]);
                w * (v[0] * d[0] + v[1] * d[1])
            })
            .sum();
        assert!((phi.line_integral(p, d) - q).abs() < 1e-13);
    }

    #[test]
    fn star_d_of_example_form() {
        let phi = OneForm::builtin("cos_x2").unwrap();
        let h = phi.star_d();
        let x = [0.4, 0.3];
        let exact = 2.0 * PI / 3f64.sqrt() * (2.0 * PI * x[1] / 3f64.sqrt()).sin();
        assert!((h.eval(x) - exact).abs() < 1e-13);
    }

    #[test]
    fn hodge_up_coefficients_are_the_mode_system() {
        // on a single mode the up operator is -[[k2², -k1k2], [-k1k2, k1²]]
        for (n, m) in [(1, 0), (0, 1), (2, 3), (-1, 2)] {
            let k = wave_vector(n, m);
            let phi = OneForm {
                name: "t".into(),
                modes: vec![FormMode {
                    n,
                    m,
                    c1: Complex64::new(0.3, 0.1),
                    c2: Complex64::new(-0.2, 0.5),
                }],
            };
            let up = phi.hodge_up();
            let md = phi.modes[0];
            let e1 = -(k[1] * k[1]) * md.c1 + k[0] * k[1] * md.c2;
            let e2 = k[0] * k[1] * md.c1 - (k[0] * k[0]) * md.c2;
            assert!((up.modes[0].c1 - e1).norm() < 1e-12 && (up.modes[0].c2 - e2).norm() < 1e-12);
            // eigenvalues 0 (along k) and -|k|² (orthogonal to k)
            let grad = OneForm {
                name: "g".into(),
                modes: vec![FormMode {
                    n,
                    m,
                    c1: k[0].into(),
                    c2: k[1].into(),
                }],
            };
            assert!(grad.hodge_up().modes[0].c1.norm() < 1e-9);
            let curl = OneForm {
                name: "c".into(),
                modes: vec![FormMode {
                    n,
                    m,
                    c1: (-k[1]).into(),
                    c2: k[0].into(),
                }],
            };
            let l = curl.hodge_up().modes[0];
            let kk = k[0] * k[0] + k[1] * k[1];
            assert!((l.c1 + kk * (-k[1])).norm() < 1e-9 && (l.c2 + kk * k[0]).norm() < 1e-9);
        }
    }

    #[test]
    fn triangle_quadrature_area_and_moments() {
        let a = triangle_quadrature([0.0, 0.0], [2.0, 0.0], [1.0, 3f64.sqrt()], 8, |_| 1.0);
        assert!((a - 3f64.sqrt()).abs() < 1e-14);
        let m = triangle_quadrature([0.0, 0.0], [2.0, 0.0], [1.0, 3f64.sqrt()], 8, |p| p[0]);
        assert!((m - 3f64.sqrt()).abs() < 1e-14);
    }
}
