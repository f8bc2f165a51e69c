//! Continuous-time walk on `k`-chains. From `σ`, every oriented
//! `(k+1)`-simplex `τ` with `w(σ, ∂τ) = ⟨∂τ, σ⟩⁺ > 0` fires at that rate and
//! the walk jumps to `σ - ∂τ`. Rates are integers, so the jump choice is an
//! exact integer draw and only the waiting times are floating point.

mod confinement;
mod generator;
mod invariant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{IntChain, RealChain};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::rng::{exponential, stream};

pub use confinement::{check_confinement, down_degree, ConfinementMonitor, ConfinementViolation};
pub use generator::{
    apply_generator, norm_sq_drift, norm_sq_drift_closed_form, pairing_drift, DriftCheck,
    LyapunovConstants,
};
pub use invariant::{
    empirical_invariant, exact_invariant, total_variation, EmpiricalInvariant, ExactInvariant,
    StateKey,
};

/// Firing of `sign · τ`: the walk moves to `σ - sign · ∂τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub tau: usize,
    pub sign: i8,
    pub rate: i64,
}

/// Transitions out of `sigma`, sorted by `(tau, sign)`.
pub fn enumerate_transitions(
    complex: &SimplicialComplex,
    sigma: &IntChain,
) -> Result<Vec<Transition>> {
    sigma.check_in(complex)?;
    let k = sigma.dim();
    let mut candidates: Vec<usize> = sigma
        .support()
        .flat_map(|id| complex.cofaces_of(k, id).iter().map(|&(t, _)| t))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut out = Vec::with_capacity(candidates.len());
    for tau in candidates {
        let mut p: i64 = 0;
        for &(f, s) in complex.faces_of(k + 1, tau) {
            let c = sigma.get(f);
            if c != 0 {
                p = p
                    .checked_add(
                        c.checked_mul(s as i64)
                            .ok_or(Error::Overflow("transition rate"))?,
                    )
                    .ok_or(Error::Overflow("transition rate"))?;
            }
        }
        match p.signum() {
            1 => out.push(Transition {
                tau,
                sign: 1,
                rate: p,
            }),
            -1 => out.push(Transition {
                tau,
                sign: -1,
                rate: p.checked_neg().ok_or(Error::Overflow("transition rate"))?,
            }),
            _ => {}
        }
    }
    Ok(out)
}

/// `σ - sign · ∂τ`.
pub fn jump(
    complex: &SimplicialComplex,
    sigma: &IntChain,
    tau: usize,
    sign: i8,
) -> Result<IntChain> {
    let k = sigma.dim();
    if tau >= complex.count(k + 1) {
        return Err(Error::UnknownSimplex {
            dim: k + 1,
            id: tau,
        });
    }
    let mut out = sigma.clone();
    for &(f, s) in complex.faces_of(k + 1, tau) {
        out.add_term(f, -((s * sign) as i64))?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Record {
    /// Keep every jump event.
    #[default]
    Full,
    /// Keep only the final state and the occupation measure.
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub seed: u64,
    /// Stream index; trajectory `i` uses stream `seed ^ i`.
    pub trajectory: u64,
    pub horizon: f64,
    pub max_jumps: u64,
    pub record: Record,
}

impl WalkConfig {
    pub fn new(seed: u64, horizon: f64) -> Self {
        WalkConfig {
            seed,
            trajectory: 0,
            horizon,
            max_jumps: u64::MAX,
            record: Record::Full,
        }
    }

    pub fn with_max_jumps(mut self, max_jumps: u64) -> Self {
        self.max_jumps = max_jumps;
        self
    }

    pub fn with_record(mut self, record: Record) -> Self {
        self.record = record;
        self
    }

    pub fn with_trajectory(mut self, trajectory: u64) -> Self {
        self.trajectory = trajectory;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub t: f64,
    pub tau: usize,
    pub sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    MaxJumps,
    /// No transition is available; the state is held until the horizon.
    Absorbed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub initial: IntChain,
    pub events: Vec<JumpEvent>,
    pub final_state: IntChain,
    pub end_time: f64,
    pub jumps: u64,
    pub stop: StopReason,
    /// Time integral of `|λ_σ(X_t)|` for every `k`-simplex.
    pub occupation: RealChain,
}

/// Hooks called while a trajectory is generated.
pub trait Observer {
    /// The walk sits in `state` during `[t0, t1)`.
    fn hold(&mut self, _t0: f64, _t1: f64, _state: &IntChain) {}
    /// At time `t` the walk fired `transition` and is now in `state`.
    fn jump(&mut self, _t: f64, _transition: &Transition, _state: &IntChain) {}
}

struct NoObserver;
impl Observer for NoObserver {}

pub fn simulate(
    complex: &SimplicialComplex,
    x0: &IntChain,
    cfg: &WalkConfig,
) -> Result<Trajectory> {
    simulate_observed(complex, x0, cfg, &mut NoObserver)
}

pub fn simulate_observed(
    complex: &SimplicialComplex,
    x0: &IntChain,
    cfg: &WalkConfig,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    if !(cfg.horizon.is_finite() && cfg.horizon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon {} must be finite and >= 0",
            cfg.horizon
        )));
    }
    x0.check_in(complex)?;
    let k = x0.dim();
    let mut rng = stream(cfg.seed, cfg.trajectory);
    let mut state = x0.clone();
    let mut t = 0.0;
    let mut jumps = 0u64;
    let mut events = Vec::new();
    let mut occ = vec![0.0; complex.count(k)];
    let mut hold = |t0: f64, t1: f64, s: &IntChain, obs: &mut dyn Observer| {
        for (id, c) in s.iter() {
            occ[id] += c.unsigned_abs() as f64 * (t1 - t0);
        }
        obs.hold(t0, t1, s);
    };
    let stop = loop {
        if jumps >= cfg.max_jumps {
            break StopReason::MaxJumps;
        }
        let transitions = enumerate_transitions(complex, &state)?;
        let total: i64 = transitions
            .iter()
            .try_fold(0i64, |acc, tr| acc.checked_add(tr.rate))
            .ok_or(Error::Overflow("total rate"))?;
        if total == 0 {
            hold(t, cfg.horizon.max(t), &state, observer);
            t = cfg.horizon.max(t);
            break StopReason::Absorbed;
        }
        let dt = exponential(&mut rng, total as f64);
        let pick = rng.gen_range(0..total);
        if t + dt > cfg.horizon {
            hold(t, cfg.horizon, &state, observer);
            t = cfg.horizon;
            break StopReason::Horizon;
        }
        hold(t, t + dt, &state, observer);
        t += dt;
        let mut acc = 0i64;
        let tr = *transitions
            .iter()
            .find(|tr| {
                acc += tr.rate;
                pick < acc
            })
            .expect("pick is below the total rate");
        state = jump(complex, &state, tr.tau, tr.sign)?;
        jumps += 1;
        if cfg.record == Record::Full {
            events.push(JumpEvent {
                t,
                tau: tr.tau,
                sign: tr.sign,
            });
        }
        observer.jump(t, &tr, &state);
    };
    Ok(Trajectory {
        initial: x0.clone(),
        events,
        final_state: state,
        end_time: t,
        jumps,
        stop,
        occupation: RealChain::from_dense(k, &occ, 0.0),
    })
}

/// Independent trajectories `0..count` of the same run, in parallel.
pub fn simulate_many(
    complex: &SimplicialComplex,
    x0: &IntChain,
    cfg: &WalkConfig,
    count: u64,
) -> Result<Vec<Trajectory>> {
    (0..count)
        .into_par_iter()
        .map(|i| simulate(complex, x0, &cfg.with_trajectory(i)))
        .collect()
}

/// Re-applies a jump log; each event must be an available transition.
pub fn replay(
    complex: &SimplicialComplex,
    x0: &IntChain,
    events: &[JumpEvent],
) -> Result<IntChain> {
    let mut state = x0.clone();
    for e in events {
        let ok = enumerate_transitions(complex, &state)?
            .iter()
            .any(|tr| tr.tau == e.tau && tr.sign == e.sign);
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "event at t = {} fires {}·τ{} which is not available",
                e.t, e.sign, e.tau
            )));
        }
        state = jump(complex, &state, e.tau, e.sign)?;
    }
    Ok(state)
}

/// States of a fully recorded trajectory at the given increasing times.
pub fn states_at(
    complex: &SimplicialComplex,
    traj: &Trajectory,
    times: &[f64],
) -> Result<Vec<IntChain>> {
    let mut out = Vec::with_capacity(times.len());
    let mut state = traj.initial.clone();
    let mut next = 0;
    for &t in times {
        while next < traj.events.len() && traj.events[next].t <= t {
            let e = traj.events[next];
            state = jump(complex, &state, e.tau, e.sign)?;
            next += 1;
        }
        out.push(state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{boundary, Chain};
    use crate::complex::{build_torus_triangulation, SimplicialComplex};
    use proptest::prelude::*;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::from_maximal(3, &[vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn boundary_of_triangle_fires_once_and_vanishes() {
        let c = triangle();
        let sigma = boundary(&c, &Chain::elementary(2, 0, 1i64)).unwrap();
        let tr = enumerate_transitions(&c, &sigma).unwrap();
        assert_eq!(
            tr,
            vec![Transition {
                tau: 0,
                sign: 1,
                rate: 3
            }]
        );
        assert!(jump(&c, &sigma, 0, 1).unwrap().is_zero());
        let traj = simulate(&c, &sigma, &WalkConfig::new(3, 10.0)).unwrap();
        assert_eq!(traj.jumps, 1);
        assert_eq!(traj.stop, StopReason::Absorbed);
        assert!(traj.final_state.is_zero());
    }

    #[test]
    fn single_edge_flips_through_the_triangle() {
        let c = triangle();
        // edge [0,2] sits with sign -1 in ∂[0,1,2]
        let sigma = Chain::elementary(1, 1, 1i64);
        let tr = enumerate_transitions(&c, &sigma).unwrap();
        assert_eq!(
            tr,
            vec![Transition {
                tau: 0,
                sign: -1,
                rate: 1
            }]
        );
        let next = jump(&c, &sigma, 0, -1).unwrap();
        assert_eq!(next.key(), vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn zero_chain_is_absorbing() {
        let c = triangle();
        let traj = simulate(&c, &Chain::zero(1), &WalkConfig::new(1, 5.0)).unwrap();
        assert_eq!(
            (traj.jumps, traj.stop, traj.end_time),
            (0, StopReason::Absorbed, 5.0)
        );
    }

    #[test]
    fn replay_reproduces_final_state() {
        let c = build_torus_triangulation(4).unwrap();
        let sigma = crate::torus::basis_cycles(&c).unwrap().0;
        let traj = simulate(&c, &sigma, &WalkConfig::new(77, 30.0)).unwrap();
        assert!(traj.jumps > 10);
        assert_eq!(replay(&c, &sigma, &traj.events).unwrap(), traj.final_state);
        let again = simulate(&c, &sigma, &WalkConfig::new(77, 30.0)).unwrap();
        assert_eq!(again, traj);
        let summary = simulate(
            &c,
            &sigma,
            &WalkConfig::new(77, 30.0).with_record(Record::Summary),
        )
        .unwrap();
        assert_eq!(summary.final_state, traj.final_state);
        assert!(summary.events.is_empty());
    }

    #[test]
    fn max_jumps_stops_early() {
        let c = build_torus_triangulation(4).unwrap();
        let sigma = crate::torus::basis_cycles(&c).unwrap().0;
        let traj = simulate(&c, &sigma, &WalkConfig::new(1, 1e9).with_max_jumps(25)).unwrap();
        assert_eq!((traj.jumps, traj.stop), (25, StopReason::MaxJumps));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn boundary_is_preserved_and_rates_bounded(seed in 0u64..1000, coeffs in prop::collection::vec(-2i64..=2, 6)) {
            let c = build_torus_triangulation(4).unwrap();
            let x0 = Chain::from_pairs(1, coeffs.iter().enumerate().map(|(i, &v)| (i * 7, v))).unwrap();
            let b0 = boundary(&c, &x0).unwrap();
            let traj = simulate(&c, &x0, &WalkConfig::new(seed, 3.0)).unwrap();
            let mut state = x0.clone();
            for e in &traj.events {
                state = jump(&c, &state, e.tau, e.sign).unwrap();
                prop_assert_eq!(&boundary(&c, &state).unwrap(), &b0);
            }
            for s in [&x0, &traj.final_state] {
                let bound = ((s.dim() + 2) as f64).sqrt() * (s.norm_sq().unwrap() as f64).sqrt();
                for tr in enumerate_transitions(&c, s).unwrap() {
                    prop_assert!(tr.rate as f64 <= bound + 1e-12);
                }
            }
        }

        #[test]
        fn transitions_are_sorted(coeffs in prop::collection::vec(-3i64..=3, 12)) {
            let c = build_torus_triangulation(4).unwrap();
            let x0 = Chain::from_pairs(1, coeffs.iter().enumerate().map(|(i, &v)| (i * 3, v))).unwrap();
            let tr = enumerate_transitions(&c, &x0).unwrap();
            prop_assert!(tr.windows(2).all(|w| (w[0].tau, w[0].sign) < (w[1].tau, w[1].sign)));
            prop_assert!(tr.iter().all(|t| t.rate > 0));
        }
    }
}
