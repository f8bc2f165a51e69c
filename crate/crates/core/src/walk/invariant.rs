use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::IntChain;
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

use super::{
    enumerate_transitions, jump, simulate_observed, Observer, Trajectory, Transition, WalkConfig,
};

pub type StateKey = Vec<(usize, i64)>;

/// Occupation statistics of one long trajectory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpiricalInvariant {
    /// Fraction of time spent in each state.
    pub time_fraction: BTreeMap<StateKey, f64>,
    /// Fraction of jumps landing in each state (the jump chain's visits),
    /// counting the initial state once.
    pub visit_fraction: BTreeMap<StateKey, f64>,
    pub total_time: f64,
    pub jumps: u64,
}

#[derive(Default)]
struct Occupancy {
    time: HashMap<StateKey, f64>,
    visits: HashMap<StateKey, u64>,
}

impl Observer for Occupancy {
    fn hold(&mut self, t0: f64, t1: f64, state: &IntChain) {
        *self.time.entry(state.key()).or_default() += t1 - t0;
    }
    fn jump(&mut self, _t: f64, _tr: &Transition, state: &IntChain) {
        *self.visits.entry(state.key()).or_default() += 1;
    }
}

fn normalise<V: Copy + Into<f64>>(m: HashMap<StateKey, V>) -> BTreeMap<StateKey, f64> {
    let total: f64 = m.values().map(|&v| v.into()).sum();
    m.into_iter().map(|(k, v)| (k, v.into() / total)).collect()
}

pub fn empirical_invariant(
    complex: &SimplicialComplex,
    x0: &IntChain,
    cfg: &WalkConfig,
) -> Result<(EmpiricalInvariant, Trajectory)> {
    let mut occ = Occupancy::default();
    *occ.visits.entry(x0.key()).or_default() += 1;
    let traj = simulate_observed(
        complex,
        x0,
        &cfg.with_record(super::Record::Summary),
        &mut occ,
    )?;
    let visits: HashMap<StateKey, f64> =
        occ.visits.into_iter().map(|(k, v)| (k, v as f64)).collect();
    Ok((
        EmpiricalInvariant {
            time_fraction: normalise(occ.time),
            visit_fraction: normalise(visits),
            total_time: traj.end_time,
            jumps: traj.jumps,
        },
        traj,
    ))
}

/// Stationary law of the walk restricted to the states reachable from `x0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactInvariant {
    pub states: Vec<StateKey>,
    pub exit_rates: Vec<f64>,
    /// Stationary probabilities of the continuous-time chain.
    pub pi: Vec<f64>,
}

impl ExactInvariant {
    pub fn as_map(&self) -> BTreeMap<StateKey, f64> {
        self.states
            .iter()
            .cloned()
            .zip(self.pi.iter().copied())
            .collect()
    }

    /// Stationary law of the jump chain, `∝ π_i q_i`.
    pub fn jump_chain(&self) -> BTreeMap<StateKey, f64> {
        let w: Vec<f64> = self
            .pi
            .iter()
            .zip(&self.exit_rates)
            .map(|(p, q)| p * q)
            .collect();
        let total: f64 = w.iter().sum();
        self.states
            .iter()
            .cloned()
            .zip(w.into_iter().map(|x| x / total))
            .collect()
    }
}

const DENSE_STATES: usize = 2500;

/// Enumerates the reachable states (at most `max_states`) and solves
/// `π Q = 0`, `Σ π = 1`. Dense LU up to 2500 states, Gauss–Seidel on the
/// balance equations above.
pub fn exact_invariant(
    complex: &SimplicialComplex,
    x0: &IntChain,
    max_states: usize,
) -> Result<ExactInvariant> {
    let mut index: HashMap<StateKey, usize> = HashMap::new();
    let mut states: Vec<IntChain> = Vec::new();
    let mut edges: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(x0.key(), 0);
    states.push(x0.clone());
    queue.push_back(0usize);
    while let Some(i) = queue.pop_front() {
        let s = states[i].clone();
        let mut out = Vec::new();
        for tr in enumerate_transitions(complex, &s)? {
            let next = jump(complex, &s, tr.tau, tr.sign)?;
            let key = next.key();
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::InvalidArgument(format!(
                            "more than {max_states} reachable states"
                        )));
                    }
                    let j = states.len();
                    index.insert(key, j);
                    states.push(next);
                    queue.push_back(j);
                    j
                }
            };
            out.push((j, tr.rate as f64));
        }
        edges.push(out);
    }
    let n = states.len();
    let exit: Vec<f64> = edges.iter().map(|e| e.iter().map(|x| x.1).sum()).collect();
    let pi = if n <= DENSE_STATES {
        let mut a = DMatrix::zeros(n, n);
        for (i, out) in edges.iter().enumerate() {
            a[(i, i)] -= exit[i];
            for &(j, r) in out {
                a[(j, i)] += r;
            }
        }
        for c in 0..n {
            a[(n - 1, c)] = 1.0;
        }
        let mut b = DVector::zeros(n);
        b[n - 1] = 1.0;
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Solver("singular generator: several closed classes".into()))?;
        x.as_slice().to_vec()
    } else {
        gauss_seidel(&edges, &exit)?
    };
    Ok(ExactInvariant {
        states: states.iter().map(|s| s.key()).collect(),
        exit_rates: exit,
        pi,
    })
}

fn gauss_seidel(edges: &[Vec<(usize, f64)>], exit: &[f64]) -> Result<Vec<f64>> {
    let n = edges.len();
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, out) in edges.iter().enumerate() {
        for &(j, r) in out {
            if j != i {
                incoming[j].push((i, r));
            }
        }
    }
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let mut change: f64 = 0.0;
        for j in 0..n {
            if exit[j] == 0.0 {
                continue;
            }
            let v = incoming[j].iter().map(|&(i, r)| pi[i] * r).sum::<f64>() / exit[j];
            change = change.max((v - pi[j]).abs());
            pi[j] = v;
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        if change < 1e-13 {
            return Ok(pi);
        }
    }
    Err(Error::Solver("Gauss–Seidel did not converge".into()))
}

/// `½ Σ |p - q|` over the union of supports.
pub fn total_variation(p: &BTreeMap<StateKey, f64>, q: &BTreeMap<StateKey, f64>) -> f64 {
    let mut tv = 0.0;
    for (k, a) in p {
        tv += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, b) in q {
        if !p.contains_key(k) {
            tv += b.abs();
        }
    }
    0.5 * tv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Chain;

    fn cycle_graph(n: u32) -> SimplicialComplex {
        let edges: Vec<Vec<u32>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SimplicialComplex::from_simplices(n as usize, &edges).unwrap()
    }

    #[test]
    fn vertex_walk_on_regular_graph_is_uniform() {
        let g = cycle_graph(6);
        let x0 = Chain::elementary(0, 0, 1i64);
        let ex = exact_invariant(&g, &x0, 100).unwrap();
        assert_eq!(ex.states.len(), 6);
        assert!(ex.pi.iter().all(|p| (p - 1.0 / 6.0).abs() < 1e-12));
    }

    #[test]
    fn total_variation_basics() {
        let a: BTreeMap<StateKey, f64> = [(vec![(0, 1)], 0.5), (vec![(1, 1)], 0.5)]
            .into_iter()
            .collect();
        let b: BTreeMap<StateKey, f64> = [(vec![(0, 1)], 1.0)].into_iter().collect();
        assert!((total_variation(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(total_variation(&a, &a), 0.0);
    }

    #[test]
    fn gauss_seidel_matches_dense() {
        let g =
            SimplicialComplex::from_simplices(4, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![1, 3]])
                .unwrap();
        let x0 = Chain::elementary(0, 0, 1i64);
        let ex = exact_invariant(&g, &x0, 100).unwrap();
        let edges: Vec<Vec<(usize, f64)>> = ex
            .states
            .iter()
            .map(|s| {
                let st = Chain::from_pairs(0, s.iter().copied()).unwrap();
                enumerate_transitions(&g, &st)
                    .unwrap()
                    .iter()
                    .map(|tr| {
                        let k = jump(&g, &st, tr.tau, tr.sign).unwrap().key();
                        (
                            ex.states.iter().position(|x| *x == k).unwrap(),
                            tr.rate as f64,
                        )
                    })
                    .collect()
            })
            .collect();
        let gs = gauss_seidel(&edges, &ex.exit_rates).unwrap();
        for (a, b) in gs.iter().zip(&ex.pi) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
