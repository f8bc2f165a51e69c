use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::build_torus_triangulation;
use crate::error::{Error, Result};
use crate::spectral::up_extremes;
use crate::walk::{simulate, states_at, WalkConfig};

use super::flat::flat_norm;
use super::forms::OneForm;
use super::{
    basis_cycles, horizontal_generator_limit, quadratic_variation, rescaled_generator,
    TorusGeometry,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub ns: Vec<usize>,
    pub forms: Vec<OneForm>,
    /// Horizon in accelerated time; the walk on side `n` runs for `n² T`.
    pub horizon: f64,
    pub trajectories: u64,
    /// Evenly spaced snapshot times in `(0, T]` for the flat-norm traces.
    pub snapshots: usize,
    pub seed: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            ns: vec![4, 8],
            forms: vec![OneForm::builtin("cos_x2").expect("builtin")],
            horizon: 0.05,
            trajectories: 4,
            snapshots: 10,
            seed: 0,
        }
    }
}

/// Diagnostics for one test form on `σ₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormRow {
    pub form: String,
    pub generator: f64,
    pub limit: f64,
    pub error: f64,
    pub qv: f64,
    /// `3 ε Σ |λ_e| ∫_e (*dφ)²`.
    pub qv_prediction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub eps: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub forms: Vec<FormRow>,
    /// `sup_{t ≤ T} ‖X_t‖_F` per trajectory.
    pub flat_sup: Vec<f64>,
    /// `‖X_t‖_F` at each snapshot, per trajectory.
    pub flat_traces: Vec<Vec<f64>>,
    /// Quadratic-variation estimator of the first form at each snapshot.
    pub qv_traces: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub config: ScalingConfig,
    pub rows: Vec<ScalingRow>,
    /// Fitted `p` in `λ_m ∝ n^{-p}`.
    pub lambda_rate: Option<f64>,
    /// Fitted `p` in `error ∝ n^{-p}` per form.
    pub generator_rates: Vec<(String, Option<f64>)>,
}

/// Least-squares slope `p` of `log y = c - p log n`; `None` with fewer than
/// two usable points.
pub fn fit_rate(ns: &[usize], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > 0.0 && y.is_finite())
        .map(|(&n, &y)| ((n as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}

fn row(cfg: &ScalingConfig, n: usize) -> Result<ScalingRow> {
    let complex = build_torus_triangulation(n)?;
    let geo = TorusGeometry::new(&complex)?;
    let (lambda_min, lambda_max) = up_extremes(&complex, 1)?;
    let sigma1 = basis_cycles(&complex)?.0;
    let mut forms = Vec::with_capacity(cfg.forms.len());
    for phi in &cfg.forms {
        let generator = rescaled_generator(&complex, &geo, &sigma1, phi)?;
        let limit = horizontal_generator_limit(phi, 0.0);
        let h = phi.star_d();
        forms.push(FormRow {
            form: phi.name.clone(),
            generator,
            limit,
            error: (generator - limit).abs(),
            qv: quadratic_variation(&complex, &geo, &sigma1, phi)?,
            qv_prediction: 3.0 * geo.ucp(&sigma1, |x| h.eval(x).powi(2)),
        });
    }
    let accel = (n * n) as f64;
    let times: Vec<f64> = (1..=cfg.snapshots.max(1))
        .map(|j| cfg.horizon * accel * j as f64 / cfg.snapshots.max(1) as f64)
        .collect();
    let walk = WalkConfig::new(cfg.seed ^ (n as u64).rotate_left(32), cfg.horizon * accel);
    let mut flat_traces = Vec::new();
    let mut qv_traces = Vec::new();
    for i in 0..cfg.trajectories {
        let traj = simulate(&complex, &sigma1, &walk.with_trajectory(i))?;
        let mut flat = vec![flat_norm(&complex, &sigma1, n)?.value];
        let mut qv = Vec::new();
        for s in states_at(&complex, &traj, &times)? {
            flat.push(flat_norm(&complex, &s, n)?.value);
            if let Some(phi) = cfg.forms.first() {
                qv.push(quadratic_variation(&complex, &geo, &s, phi)?);
            }
        }
        flat_traces.push(flat);
        qv_traces.push(qv);
    }
    let flat_sup = flat_traces
        .iter()
        .map(|t| t.iter().copied().fold(0.0, f64::max))
        .collect();
    Ok(ScalingRow {
        n,
        eps: geo.eps,
        lambda_min,
        lambda_max,
        forms,
        flat_sup,
        flat_traces,
        qv_traces,
    })
}

/// One row per side length in `cfg.ns` (strictly increasing, even, at
/// least 4). Rows are computed in parallel; the report does not depend on
/// the thread count.
pub fn run_scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingReport> {
    if cfg.ns.is_empty() || cfg.ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "n values must be non-empty and strictly increasing".into(),
        ));
    }
    if !(cfg.horizon.is_finite() && cfg.horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon {} must be positive",
            cfg.horizon
        )));
    }
    let rows: Vec<ScalingRow> = cfg
        .ns
        .par_iter()
        .map(|&n| row(cfg, n))
        .collect::<Result<_>>()?;
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda_min).collect();
    let generator_rates = cfg
        .forms
        .iter()
        .enumerate()
        .map(|(j, phi)| {
            let errs: Vec<f64> = rows.iter().map(|r| r.forms[j].error).collect();
            (phi.name.clone(), fit_rate(&cfg.ns, &errs))
        })
        .collect();
    Ok(ScalingReport {
        config: cfg.clone(),
        lambda_rate: fit_rate(&cfg.ns, &lambdas),
        rows,
        generator_rates,
    })
}
