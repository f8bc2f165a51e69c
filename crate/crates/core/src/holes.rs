//! Hole localization by simulated annealing over the walk kernel.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{is_cycle, IntChain};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::rng::{open_unit, stream};
use crate::spectral::homology_generators;
use crate::walk::{enumerate_transitions, Transition};

const HARMONIC_TOL: f64 = 1e-9;

/// Algebraic length `Σ |σ_e|`.
pub fn energy(sigma: &IntChain) -> Result<i64> {
    sigma.weight()
}

/// Generator `selector` of the integral basis of `H_1` computed by
/// [`homology_generators`].
pub fn seed_cycle(complex: &SimplicialComplex, selector: usize) -> Result<IntChain> {
    let gens = homology_generators(complex, 1, HARMONIC_TOL)?;
    if gens.is_empty() {
        return Err(Error::NoHoles);
    }
    let count = gens.len();
    gens.into_iter().nth(selector).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "hole selector {selector} out of range for β_1 = {count}"
        ))
    })
}

/// Geometric cooling `T_m = T_0 α^m`, stopped once `T_m < T_min` or after
/// `max_steps` proposals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    /// `None` starts at the energy of the seed.
    pub t0: Option<f64>,
    pub alpha: f64,
    pub t_min: f64,
    pub max_steps: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            t0: None,
            alpha: 0.999,
            t_min: 1e-3,
            max_steps: 1_000_000,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if let Some(t0) = self.t0 {
            if !(t0.is_finite() && t0 > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "T0 = {t0} must be positive"
                )));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} must lie in (0, 1)",
                self.alpha
            )));
        }
        if !(self.t_min.is_finite() && self.t_min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "T_min = {} must be positive",
                self.t_min
            )));
        }
        Ok(())
    }

    /// `T_0`, defaulting to `max(U(seed), 1)`.
    pub fn initial_temperature(&self, seed: &IntChain) -> Result<f64> {
        match self.t0 {
            Some(t) => Ok(t),
            None => Ok((energy(seed)? as f64).max(1.0)),
        }
    }

    pub fn temperature(t0: f64, alpha: f64, m: u64) -> f64 {
        t0 * alpha.powf(m as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    /// `None` when the state has no transitions.
    pub proposal: Option<Transition>,
    pub delta: i64,
    pub accepted: bool,
}

/// One Metropolis step at temperature `t`. The proposal is a single
/// transition of the walk drawn with probability proportional to its rate.
pub fn metropolis_step<R: Rng>(
    complex: &SimplicialComplex,
    sigma: &mut IntChain,
    current_energy: &mut i64,
    t: f64,
    rng: &mut R,
) -> Result<StepOutcome> {
    let transitions = enumerate_transitions(complex, sigma)?;
    let total = transitions
        .iter()
        .try_fold(0i64, |acc, tr| acc.checked_add(tr.rate))
        .ok_or(Error::Overflow("transition rates"))?;
    if total == 0 {
        return Ok(StepOutcome {
            proposal: None,
            delta: 0,
            accepted: false,
        });
    }
    let mut pick = rng.gen_range(0..total);
    let tr = *transitions
        .iter()
        .find(|tr| {
            if pick < tr.rate {
                true
            } else {
                pick -= tr.rate;
                false
            }
        })
        .expect("pick below total rate");
    let faces = complex.faces_of(sigma.dim() + 1, tr.tau);
    let mut delta = 0i64;
    for &(f, s) in faces {
        let c = sigma.get(f);
        let d = c
            .checked_sub((s * tr.sign) as i64)
            .ok_or(Error::Overflow("energy"))?;
        delta += d.abs() - c.abs();
    }
    let accepted = delta <= 0 || open_unit(rng) < (-(delta as f64) / t).exp();
    if accepted {
        for &(f, s) in faces {
            sigma.add_term(f, -((s * tr.sign) as i64))?;
        }
        *current_energy += delta;
    }
    Ok(StepOutcome {
        proposal: Some(tr),
        delta,
        accepted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealResult {
    pub final_chain: IntChain,
    pub final_energy: i64,
    /// `U(σ_m)` for `m = 0..=steps`.
    pub energy_trace: Vec<i64>,
    pub t0: f64,
    pub final_temperature: f64,
    pub steps: u64,
    pub accepted: u64,
    pub rejected: u64,
    /// Steps taken from a state without transitions.
    pub stalls: u64,
    /// Nonzero coefficients of the final chain, by edge id.
    pub weights: Vec<(usize, i64)>,
}

/// Simulated annealing of `U` started at the cycle `seed`. Every state is
/// `seed` minus a boundary, so the homology class is preserved.
pub fn anneal<R: Rng>(
    complex: &SimplicialComplex,
    seed: &IntChain,
    schedule: &AnnealSchedule,
    rng: &mut R,
) -> Result<AnnealResult> {
    schedule.validate()?;
    if !is_cycle(complex, seed)? {
        return Err(Error::NotACycle(seed.dim()));
    }
    let t0 = schedule.initial_temperature(seed)?;
    let mut sigma = seed.clone();
    let mut u = energy(&sigma)?;
    let mut trace = vec![u];
    let (mut accepted, mut rejected, mut stalls) = (0, 0, 0);
    let mut t_last = t0;
    let mut steps = 0;
    while steps < schedule.max_steps {
        let t = AnnealSchedule::temperature(t0, schedule.alpha, steps + 1);
        if t < schedule.t_min {
            break;
        }
        let out = metropolis_step(complex, &mut sigma, &mut u, t, rng)?;
        match (out.proposal, out.accepted) {
            (None, _) => stalls += 1,
            (Some(_), true) => accepted += 1,
            (Some(_), false) => rejected += 1,
        }
        trace.push(u);
        t_last = t;
        steps += 1;
    }
    Ok(AnnealResult {
        weights: sigma.iter().collect(),
        final_energy: u,
        final_chain: sigma,
        energy_trace: trace,
        t0,
        final_temperature: t_last,
        steps,
        accepted,
        rejected,
        stalls,
    })
}

/// Drops every coefficient with `|c| < threshold · max |c|`.
pub fn cutoff(sigma: &IntChain, threshold: f64) -> Result<IntChain> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "cutoff {threshold} must lie in [0, 1]"
        )));
    }
    let bar = threshold * sigma.max_abs();
    IntChain::from_pairs(
        sigma.dim(),
        sigma.iter().filter(|(_, c)| c.abs() as f64 >= bar),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoleReport {
    pub generator: usize,
    pub seed: IntChain,
    pub anneal: AnnealResult,
    /// Edges kept by the cutoff with their final weights.
    pub edges: Vec<(usize, i64)>,
}

/// Seeds, anneals and cuts off one cycle per generator of `H_1`. Generator
/// `j` draws from stream `j` of `seed`; runs are independent and parallel.
pub fn localize(
    complex: &SimplicialComplex,
    schedule: &AnnealSchedule,
    threshold: f64,
    seed: u64,
) -> Result<Vec<HoleReport>> {
    schedule.validate()?;
    let gens = homology_generators(complex, 1, HARMONIC_TOL)?;
    gens.into_par_iter()
        .enumerate()
        .map(|(j, g)| {
            let mut rng = stream(seed, j as u64);
            let anneal = anneal(complex, &g, schedule, &mut rng)?;
            let edges = cutoff(&anneal.final_chain, threshold)?.iter().collect();
            Ok(HoleReport {
                generator: j,
                seed: g,
                anneal,
                edges,
            })
        })
        .collect()
}
