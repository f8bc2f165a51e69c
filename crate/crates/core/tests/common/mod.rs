//! Test-only oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use cyclewalk::{IntChain, SimplicialComplex};

pub fn adjacency(c: &SimplicialComplex) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); c.count(0)];
    for s in c.simplices(1) {
        let v = s.vertices();
        adj[v[0] as usize].push(v[1] as usize);
        adj[v[1] as usize].push(v[0] as usize);
    }
    adj
}

fn add_edge(c: &SimplicialComplex, chain: &mut IntChain, a: usize, b: usize) {
    let (id, sign) = c.oriented_id(&[a as u32, b as u32]).expect("edge");
    chain.add_term(id, sign as i64).unwrap();
}

/// Algebraic length of the shortest 1-cycle accepted by `nontrivial`,
/// searched over the Horton candidates: a BFS tree from every root closed
/// by one non-tree edge.
pub fn shortest_cycle<F: Fn(&IntChain) -> bool>(
    c: &SimplicialComplex,
    nontrivial: F,
) -> Option<i64> {
    let adj = adjacency(c);
    let n = adj.len();
    let mut best: Option<i64> = None;
    for root in 0..n {
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = u;
                    q.push_back(v);
                }
            }
        }
        for (a, nbrs) in adj.iter().enumerate() {
            for &b in nbrs {
                if a > b || depth[a] == usize::MAX || parent[a] == b || parent[b] == a {
                    continue;
                }
                let len = (depth[a] + depth[b] + 1) as i64;
                if best.is_some_and(|m| len >= m) {
                    continue;
                }
                let mut chain = IntChain::zero(1);
                let mut x = a;
                while x != root {
                    add_edge(c, &mut chain, parent[x], x);
                    x = parent[x];
                }
                add_edge(c, &mut chain, a, b);
                let mut x = b;
                while x != root {
                    add_edge(c, &mut chain, x, parent[x]);
                    x = parent[x];
                }
                let w = chain.weight().unwrap();
                if w > 0 && nontrivial(&chain) && best.map_or(true, |m| w < m) {
                    best = Some(w);
                }
            }
        }
    }
    best
}

/// Winding number of a 1-chain about the origin, from the planar vertex
/// coordinates; edges are assumed shorter than the distance to the origin.
pub fn winding_number(c: &SimplicialComplex, sigma: &IntChain) -> f64 {
    let pts = &c.geometry().expect("planar geometry").points;
    let mut total = 0.0;
    for (id, coeff) in sigma.iter() {
        let v = c.simplex(1, id).unwrap().vertices();
        let (p, q) = (&pts[v[0] as usize], &pts[v[1] as usize]);
        let cross = p[0] * q[1] - p[1] * q[0];
        let dot = p[0] * q[0] + p[1] * q[1];
        total += coeff as f64 * cross.atan2(dot);
    }
    total / std::f64::consts::TAU
}

/// Closed zigzag through rings 0 and 1 of an annulus triangulation with an
/// even number of segments: twice as long as the inner ring.
pub fn zigzag_loop(segments: usize) -> Vec<u32> {
    assert!(segments % 2 == 0);
    let s = segments as u32;
    let mut out = Vec::new();
    for j in 0..s {
        if j % 2 == 0 {
            out.extend([j, s + j]);
        } else {
            out.extend([s + j, j]);
        }
    }
    out
}
