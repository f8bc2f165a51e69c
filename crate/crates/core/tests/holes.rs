mod common;

use cyclewalk::holes::{anneal, cutoff, energy, seed_cycle, AnnealSchedule};
use cyclewalk::rng::stream;
use cyclewalk::spectral::{harmonic_projection, BoundaryImage};
use cyclewalk::{build_annulus_triangulation, loop_chain, IntChain, SimplicialComplex};

use common::{shortest_cycle, winding_number, zigzag_loop};

/// Unit grid of `w × h` squares, each split along its diagonal, with the
/// listed squares removed.
fn grid_with_holes(w: u32, h: u32, holes: &[(u32, u32)]) -> SimplicialComplex {
    let id = |i: u32, j: u32| j * (w + 1) + i;
    let mut tris = Vec::new();
    for j in 0..h {
        for i in 0..w {
            if holes.contains(&(i, j)) {
                continue;
            }
            tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
        }
    }
    for t in tris.iter_mut() {
        t.sort();
    }
    SimplicialComplex::from_maximal(((w + 1) * (h + 1)) as usize, &tris).unwrap()
}

#[test]
fn wiggly_seed_anneals_near_a_shortest_loop() {
    let a = build_annulus_triangulation(12, 3, 1.0, 2.0).unwrap();
    let img = BoundaryImage::new(&a, 1);
    let seed = loop_chain(&a, &zigzag_loop(12)).unwrap();
    assert_eq!(energy(&seed).unwrap(), 24);
    let oracle = shortest_cycle(&a, |z| winding_number(&a, z).abs() > 0.5).unwrap();
    assert_eq!(oracle, 12);
    let finals: Vec<i64> = (0..10)
        .map(|s| {
            let r = anneal(&a, &seed, &AnnealSchedule::default(), &mut stream(s, 0)).unwrap();
            assert!(img.homologous(&r.final_chain, &seed).unwrap());
            assert!((winding_number(&a, &r.final_chain).abs() - 1.0).abs() < 1e-9);
            r.final_energy
        })
        .collect();
    // ring switches leave plateaus one or two edges above the minimum
    assert!(
        finals.iter().all(|&u| u >= oracle && u <= oracle + 2),
        "{finals:?}"
    );
    assert!(finals.contains(&oracle), "{finals:?}");
}

#[test]
fn every_visited_state_stays_in_the_seed_class() {
    let a = build_annulus_triangulation(8, 2, 1.0, 2.0).unwrap();
    let seed = seed_cycle(&a, 0).unwrap();
    let w0 = winding_number(&a, &seed);
    assert!((w0.abs() - 1.0).abs() < 1e-9, "{w0}");
    let schedule = AnnealSchedule {
        t0: Some(3.0),
        alpha: 0.99,
        t_min: 0.05,
        max_steps: 10_000,
    };
    let mut sigma = seed.clone();
    let mut u = energy(&sigma).unwrap();
    let mut rng = stream(2, 0);
    for m in 1..=400u64 {
        let t = AnnealSchedule::temperature(3.0, schedule.alpha, m);
        let before = u;
        let out = cyclewalk::holes::metropolis_step(&a, &mut sigma, &mut u, t, &mut rng).unwrap();
        if !out.accepted {
            assert_eq!(u, before);
        }
        assert!(cyclewalk::is_cycle(&a, &sigma).unwrap());
        assert!((winding_number(&a, &sigma) - w0).abs() < 1e-9);
    }
}

#[test]
fn snf_seeded_run_hugs_the_hole() {
    let segments = 10;
    let a = build_annulus_triangulation(segments, 3, 1.0, 2.0).unwrap();
    let seed = seed_cycle(&a, 0).unwrap();
    let r = anneal(&a, &seed, &AnnealSchedule::default(), &mut stream(4, 0)).unwrap();
    let kept = cutoff(&r.final_chain, 0.5).unwrap();
    // triangles with a vertex on the inner ring
    let inner = |v: u32| (v as usize) < segments;
    let near: Vec<usize> = (0..a.count(2))
        .filter(|&t| {
            a.simplex(2, t)
                .unwrap()
                .vertices()
                .iter()
                .any(|&v| inner(v))
        })
        .collect();
    for e in kept.support() {
        assert!(
            near.iter()
                .any(|&t| a.faces_of(2, t).iter().any(|&(f, _)| f == e)),
            "edge {e} away from the hole"
        );
    }
    assert!(energy(&kept).unwrap() >= segments as i64);
}

#[test]
fn two_holes_manual_seed() {
    let g = grid_with_holes(7, 4, &[(1, 1), (1, 2), (5, 1), (5, 2)]);
    assert_eq!(cyclewalk::spectral::betti_numbers(&g), vec![1, 2, 0]);
    let id = |i: u32, j: u32| j * 8 + i;
    let mut outer = Vec::new();
    outer.extend((0..7).map(|i| id(i, 0)));
    outer.extend((0..4).map(|j| id(7, j)));
    outer.extend((1..=7).rev().map(|i| id(i, 4)));
    outer.extend((1..=4).rev().map(|j| id(0, j)));
    let seed = loop_chain(&g, &outer).unwrap();
    let u0 = energy(&seed).unwrap();
    assert_eq!(u0, 22);
    let img = BoundaryImage::new(&g, 1);
    let r = anneal(&g, &seed, &AnnealSchedule::default(), &mut stream(8, 0)).unwrap();
    assert!(r.final_energy <= u0);
    assert!(img.homologous(&r.final_chain, &seed).unwrap());
    let h = harmonic_projection(&g, &r.final_chain.to_real(), 1e-9).unwrap();
    assert!(h.norm() > 1e-6);
    let kept = cutoff(&r.final_chain, 0.5).unwrap();
    assert!(kept.iter().all(|(_, c)| c.abs() == 1));
    let _unused: IntChain = kept;
}
