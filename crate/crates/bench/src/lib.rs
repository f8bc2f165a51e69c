//! Fixtures shared by the benchmarks.

use cyclewalk::torus::basis_cycles;
use cyclewalk::{boundary, build_annulus_triangulation, build_torus_triangulation, loop_chain};
use cyclewalk::{Chain, IntChain, SimplicialComplex};

pub fn torus(n: usize) -> (SimplicialComplex, IntChain) {
    let c = build_torus_triangulation(n).expect("torus");
    let s1 = basis_cycles(&c).expect("basis").0;
    (c, s1)
}

/// Annulus triangulation with a loop around the hole lengthened by the
/// boundaries of every triangle on the inner ring.
pub fn annulus(segments: u32) -> (SimplicialComplex, IntChain) {
    let c = build_annulus_triangulation(segments as usize, 3, 1.0, 2.0).expect("annulus");
    let inner = loop_chain(&c, &(0..segments).collect::<Vec<_>>()).expect("ring");
    let ring = Chain::from_pairs(2, (0..2 * segments as usize).step_by(2).map(|t| (t, 1i64)))
        .expect("triangles");
    let seed = inner
        .add(&boundary(&c, &ring).expect("boundary"))
        .expect("sum");
    (c, seed)
}
