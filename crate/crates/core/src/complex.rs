//! Oriented simplicial complexes, point clouds and the standard constructors
//! (Vietoris–Rips, Čech, triangulated flat torus).

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;

/// A simplex stored as its strictly increasing vertex list. The stored order
/// is the reference orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Sorts the vertices; repeated vertices are rejected.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated vertex in simplex {vertices:?}"
            )));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// `i`-th face (vertex `i` removed) with its incidence sign `(-1)^i`.
    pub fn face(&self, i: usize) -> (Simplex, i8) {
        let mut v = self.0.clone();
        v.remove(i);
        (Simplex(v), if i % 2 == 0 { 1 } else { -1 })
    }

    pub fn faces(&self) -> impl Iterator<Item = (Simplex, i8)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| self.face(i))
    }
}

/// Sign relating an ordered vertex tuple to the reference orientation of the
/// simplex it spans: `+1` for an even permutation, `-1` for an odd one.
pub fn orientation_sign(ordered: &[VertexId]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..ordered.len() {
        for j in i + 1..ordered.len() {
            if ordered[i] > ordered[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// Flat torus `R^2 / (p0 Z × p1 Z)` with minimal-image distances.
    FlatTorus {
        periods: [f64; 2],
    },
}

impl Metric {
    /// Displacement `b - a`; on the torus the minimal image is used.
    pub fn displacement(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| y - x).collect(),
            Metric::FlatTorus { periods } => a
                .iter()
                .zip(b)
                .zip(periods.iter())
                .map(|((x, y), p)| {
                    let d = y - x;
                    d - p * (d / p).round()
                })
                .collect(),
        }
    }

    pub fn dist2(&self, a: &[f64], b: &[f64]) -> f64 {
        self.displacement(a, b).iter().map(|d| d * d).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    pub metric: Metric,
}

impl PointCloud {
    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        let cloud = PointCloud {
            points,
            metric: Metric::Euclidean,
        };
        cloud.check()?;
        Ok(cloud)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    fn check(&self) -> Result<()> {
        let d = self.ambient_dim();
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has {} coordinates, expected {d}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        if let Metric::FlatTorus { periods } = self.metric {
            if d != 2 || periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                return Err(Error::InvalidArgument(
                    "flat torus metric needs planar points and positive periods".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A simplex that is present while one of its faces is not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingFace {
        simplex: Vec<VertexId>,
        face: Vec<VertexId>,
    },
    VertexOutOfRange {
        simplex: Vec<VertexId>,
        vertex: VertexId,
    },
    RepeatedVertex {
        simplex: Vec<VertexId>,
    },
    Duplicate {
        simplex: Vec<VertexId>,
    },
}

/// Checks that a raw list of simplices (dimension >= 1) over the vertex set
/// `0..n_vertices` is closed under taking faces.
pub fn validate_closure(n_vertices: usize, simplices: &[Vec<VertexId>]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut present: BTreeSet<Vec<VertexId>> = BTreeSet::new();
    let mut sorted_all = Vec::with_capacity(simplices.len());
    for s in simplices {
        let mut v = s.clone();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) || v.len() < 2 {
            out.push(Violation::RepeatedVertex { simplex: s.clone() });
            continue;
        }
        if let Some(&bad) = v.iter().find(|&&x| x as usize >= n_vertices) {
            out.push(Violation::VertexOutOfRange {
                simplex: s.clone(),
                vertex: bad,
            });
            continue;
        }
        if !present.insert(v.clone()) {
            out.push(Violation::Duplicate { simplex: s.clone() });
            continue;
        }
        sorted_all.push(v);
    }
    for v in &sorted_all {
        if v.len() <= 2 {
            continue;
        }
        for i in 0..v.len() {
            let mut f = v.clone();
            f.remove(i);
            if !present.contains(&f) {
                out.push(Violation::MissingFace {
                    simplex: v.clone(),
                    face: f,
                });
            }
        }
    }
    out
}

/// Adds every face of the given simplices.
pub fn closure(simplices: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
    let mut all: BTreeSet<Vec<VertexId>> = BTreeSet::new();
    let mut stack: Vec<Vec<VertexId>> = simplices
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort_unstable();
            v
        })
        .collect();
    while let Some(s) = stack.pop() {
        if s.len() < 2 || all.contains(&s) {
            continue;
        }
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            stack.push(f);
        }
        all.insert(s);
    }
    all.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Simplex>>,
    lookup: Vec<HashMap<Simplex, usize>>,
    /// `faces[k][id]` for `k >= 1`.
    faces: Vec<Vec<Vec<(usize, i8)>>>,
    /// `cofaces[k][id]` for `k < top_dim`.
    cofaces: Vec<Vec<Vec<(usize, i8)>>>,
    geometry: Option<PointCloud>,
}

impl SimplicialComplex {
    /// Builds a complex over vertices `0..n_vertices` from simplices of
    /// dimension >= 1. The list must already be closed under faces.
    pub fn from_simplices(n_vertices: usize, simplices: &[Vec<VertexId>]) -> Result<Self> {
        let violations = validate_closure(n_vertices, simplices);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidComplex(format!(
                "{} closure violation(s), first: {v:?}",
                violations.len()
            )));
        }
        let mut by_dim: Vec<Vec<Simplex>> =
            vec![(0..n_vertices as u32).map(Simplex::vertex).collect()];
        for s in simplices {
            let s = Simplex::new(s.clone())?;
            let d = s.dim();
            while by_dim.len() <= d {
                by_dim.push(Vec::new());
            }
            by_dim[d].push(s);
        }
        for level in by_dim.iter_mut() {
            level.sort();
        }
        Ok(Self::from_sorted_levels(by_dim))
    }

    /// Like [`from_simplices`](Self::from_simplices) but adds missing faces.
    pub fn from_maximal(n_vertices: usize, simplices: &[Vec<VertexId>]) -> Result<Self> {
        Self::from_simplices(n_vertices, &closure(simplices))
    }

    fn from_sorted_levels(mut by_dim: Vec<Vec<Simplex>>) -> Self {
        while by_dim.len() > 1 && by_dim.last().is_some_and(|l| l.is_empty()) {
            by_dim.pop();
        }
        let lookup: Vec<HashMap<Simplex, usize>> = by_dim
            .iter()
            .map(|level| {
                level
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, s)| (s, i))
                    .collect()
            })
            .collect();
        let top = by_dim.len();
        let mut faces: Vec<Vec<Vec<(usize, i8)>>> = vec![Vec::new()];
        let mut cofaces: Vec<Vec<Vec<(usize, i8)>>> = (0..top)
            .map(|k| vec![Vec::new(); by_dim[k].len()])
            .collect();
        for k in 1..top {
            let level: Vec<Vec<(usize, i8)>> = by_dim[k]
                .iter()
                .map(|s| {
                    s.faces()
                        .map(|(f, sign)| (lookup[k - 1][&f], sign))
                        .collect()
                })
                .collect();
            for (id, fs) in level.iter().enumerate() {
                for &(f, sign) in fs {
                    cofaces[k - 1][f].push((id, sign));
                }
            }
            faces.push(level);
        }
        cofaces.pop();
        SimplicialComplex {
            simplices: by_dim,
            lookup,
            faces,
            cofaces,
            geometry: None,
        }
    }

    pub fn with_geometry(mut self, cloud: PointCloud) -> Result<Self> {
        cloud.check()?;
        if cloud.len() != self.count(0) {
            return Err(Error::InvalidArgument(format!(
                "{} points for {} vertices",
                cloud.len(),
                self.count(0)
            )));
        }
        self.geometry = Some(cloud);
        Ok(self)
    }

    pub fn geometry(&self) -> Option<&PointCloud> {
        self.geometry.as_ref()
    }

    /// Highest dimension carrying at least one simplex.
    pub fn top_dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |l| l.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|l| l.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, l)| {
                if k % 2 == 0 {
                    l.len() as i64
                } else {
                    -(l.len() as i64)
                }
            })
            .sum()
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.simplices.get(k).map_or(&[], |l| l.as_slice())
    }

    pub fn simplex(&self, k: usize, id: usize) -> Result<&Simplex> {
        self.simplices
            .get(k)
            .and_then(|l| l.get(id))
            .ok_or(Error::UnknownSimplex { dim: k, id })
    }

    pub fn id_of(&self, s: &Simplex) -> Option<usize> {
        self.lookup.get(s.dim())?.get(s).copied()
    }

    /// Id of the simplex spanned by `vertices` plus the orientation sign of
    /// the given vertex order relative to the stored one.
    pub fn oriented_id(&self, vertices: &[VertexId]) -> Option<(usize, i8)> {
        let s = Simplex::new(vertices.to_vec()).ok()?;
        Some((self.id_of(&s)?, orientation_sign(vertices)))
    }

    /// Codimension-one faces of the `k`-simplex `id`, with incidence signs.
    pub fn faces_of(&self, k: usize, id: usize) -> &[(usize, i8)] {
        if k == 0 {
            return &[];
        }
        self.faces
            .get(k)
            .and_then(|l| l.get(id))
            .map_or(&[], |v| v.as_slice())
    }

    /// `(k+1)`-simplices having the `k`-simplex `id` as a face, with signs.
    pub fn cofaces_of(&self, k: usize, id: usize) -> &[(usize, i8)] {
        self.cofaces
            .get(k)
            .and_then(|l| l.get(id))
            .map_or(&[], |v| v.as_slice())
    }

    /// Every simplex of dimension >= 1 as a raw vertex list.
    pub fn raw_simplices(&self) -> Vec<Vec<VertexId>> {
        self.simplices
            .iter()
            .skip(1)
            .flat_map(|l| l.iter().map(|s| s.vertices().to_vec()))
            .collect()
    }

    /// True when every simplex of `self` is a simplex of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices
            .iter()
            .flatten()
            .all(|s| other.id_of(s).is_some())
    }
}

fn edge_within(cloud: &PointCloud, a: usize, b: usize, r: f64) -> bool {
    let d2 = cloud.metric.dist2(&cloud.points[a], &cloud.points[b]);
    let t = 4.0 * r * r;
    let margin = 1e-12 * t.max(1.0);
    if (d2 - t).abs() > margin || cloud.metric != Metric::Euclidean {
        return d2 <= t;
    }
    let pts = [to_rational(&cloud.points[a]), to_rational(&cloud.points[b])];
    let d2: BigRational = pts[0]
        .iter()
        .zip(&pts[1])
        .map(|(x, y)| (y - x) * (y - x))
        .fold(BigRational::zero(), |s, v| s + v);
    let r = rational(r);
    d2 <= BigRational::from_integer(BigInt::from(4)) * &r * &r
}

fn neighbourhoods(cloud: &PointCloud, r: f64) -> Vec<Vec<VertexId>> {
    let n = cloud.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .filter(|&b| b != a && edge_within(cloud, a, b, r))
                .map(|b| b as VertexId)
                .collect()
        })
        .collect()
}

/// Clique expansion where each extended simplex must also pass `accept`.
fn expand<F>(n: usize, nbrs: &[Vec<VertexId>], max_dim: usize, accept: F) -> Vec<Vec<Simplex>>
where
    F: Fn(&[VertexId]) -> bool + Sync,
{
    let adjacency: Vec<BTreeSet<VertexId>> =
        nbrs.iter().map(|l| l.iter().copied().collect()).collect();
    let mut levels: Vec<Vec<Simplex>> = vec![(0..n as u32).map(Simplex::vertex).collect()];
    for k in 1..=max_dim {
        let next: Vec<Simplex> = levels[k - 1]
            .par_iter()
            .flat_map_iter(|s| {
                let last = *s.vertices().last().unwrap();
                let first = s.vertices()[0] as usize;
                let mut out = Vec::new();
                for &v in adjacency[first].range(last + 1..) {
                    if s.vertices()
                        .iter()
                        .all(|&u| adjacency[u as usize].contains(&v))
                    {
                        let mut verts = s.vertices().to_vec();
                        verts.push(v);
                        if k == 1 || accept(&verts) {
                            out.push(Simplex(verts));
                        }
                    }
                }
                out
            })
            .collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    for l in levels.iter_mut() {
        l.sort();
    }
    levels
}

/// Vietoris–Rips complex: a simplex for every vertex set with pairwise
/// distances at most `2r`, up to dimension `max_dim`.
pub fn build_rips(cloud: &PointCloud, r: f64, max_dim: usize) -> Result<SimplicialComplex> {
    cloud.check()?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius {r} must be finite and >= 0"
        )));
    }
    let nbrs = neighbourhoods(cloud, r);
    let levels = expand(cloud.len(), &nbrs, max_dim, |_| true);
    SimplicialComplex::from_sorted_levels(levels).with_geometry(cloud.clone())
}

/// Čech complex: a simplex whenever the closed balls of radius `r` around its
/// vertices share a point, decided by an exact minimum enclosing ball test.
pub fn build_cech(cloud: &PointCloud, r: f64, max_dim: usize) -> Result<SimplicialComplex> {
    cloud.check()?;
    if cloud.metric != Metric::Euclidean {
        return Err(Error::InvalidArgument(
            "Čech complexes need a Euclidean cloud".into(),
        ));
    }
    let d = cloud.ambient_dim();
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "Čech complexes support ambient dimension 2 or 3, got {d}"
        )));
    }
    if max_dim > 3 {
        return Err(Error::InvalidArgument(
            "Čech complexes support max_dim <= 3".into(),
        ));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius {r} must be finite and >= 0"
        )));
    }
    let pts: Vec<Vec<BigRational>> = cloud.points.iter().map(|p| to_rational(p)).collect();
    let rq = rational(r);
    let r2 = &rq * &rq;
    let nbrs = neighbourhoods(cloud, r);
    let levels = expand(cloud.len(), &nbrs, max_dim, |verts| {
        let sub: Vec<&[BigRational]> = verts.iter().map(|&v| pts[v as usize].as_slice()).collect();
        min_enclosing_radius2(&sub) <= r2
    });
    SimplicialComplex::from_sorted_levels(levels).with_geometry(cloud.clone())
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

fn to_rational(p: &[f64]) -> Vec<BigRational> {
    p.iter().map(|&x| rational(x)).collect()
}

/// Squared radius of the minimum enclosing ball of at most four points,
/// computed exactly as the smallest enclosing circumball over all affinely
/// independent subsets.
pub fn min_enclosing_radius2(points: &[&[BigRational]]) -> BigRational {
    let n = points.len();
    assert!(
        (1..=4).contains(&n),
        "minimum enclosing ball supports 1..=4 points"
    );
    let mut best: Option<BigRational> = None;
    for mask in 1u32..(1 << n) {
        let subset: Vec<&[BigRational]> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| points[i])
            .collect();
        let Some((center, r2)) = circumball(&subset) else {
            continue;
        };
        if best.as_ref().is_some_and(|b| &r2 >= b) {
            continue;
        }
        let encloses = points.iter().all(|p| {
            let d2 = p
                .iter()
                .zip(&center)
                .map(|(x, c)| (x - c) * (x - c))
                .fold(BigRational::zero(), |s, v| s + v);
            d2 <= r2
        });
        if encloses {
            best = Some(r2);
        }
    }
    best.expect("the full set always has an enclosing circumball candidate")
}

fn circumball(points: &[&[BigRational]]) -> Option<(Vec<BigRational>, BigRational)> {
    let p0 = points[0];
    let m = points.len() - 1;
    if m == 0 {
        return Some((p0.to_vec(), BigRational::zero()));
    }
    let diffs: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[BigRational], b: &[BigRational]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x * y)
            .fold(BigRational::zero(), |s, v| s + v)
    };
    let two = BigRational::from_integer(BigInt::from(2));
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> =
                (0..m).map(|j| &two * dot(&diffs[i], &diffs[j])).collect();
            row.push(dot(&diffs[i], &diffs[i]));
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = BigRational::one() / &a[col][col];
        for j in col..=m {
            a[col][j] = &a[col][j] * &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=m {
                    let v = &f * &a[col][j];
                    a[r][j] -= v;
                }
            }
        }
    }
    let mut center = p0.to_vec();
    for (i, d) in diffs.iter().enumerate() {
        for (c, x) in center.iter_mut().zip(d) {
            *c += &a[i][m] * x;
        }
    }
    let r2 = center
        .iter()
        .zip(p0)
        .map(|(c, x)| (c - x) * (c - x))
        .fold(BigRational::zero(), |s, v| s + v);
    debug_assert!(!r2.is_negative());
    Some((center, r2))
}

/// Vertex id of the lattice point `a·(2ε, 0) + b·(ε, √3ε)` of the torus
/// triangulation of side `n`; rows hold `n` vertices each.
pub fn torus_vertex(n: usize, a: i64, b: i64) -> VertexId {
    let n = n as i64;
    let x = (2 * a + b).rem_euclid(2 * n);
    let j = b.rem_euclid(n);
    let i = ((x - j % 2) / 2).rem_euclid(n);
    (j * n + i) as VertexId
}

/// Coordinates of a torus lattice vertex in `[0, 2) × [0, √3)`.
pub fn torus_position(n: usize, v: VertexId) -> [f64; 2] {
    let eps = 1.0 / n as f64;
    let (i, j) = ((v as usize) % n, (v as usize) / n);
    [(2 * i + j % 2) as f64 * eps, j as f64 * 3f64.sqrt() * eps]
}

/// Equilateral triangulation of the flat torus with periods `(2, √3)` and
/// mesh `ε = 1/n`: `n²` vertices, `3n²` edges, `2n²` triangles. Needs even
/// `n >= 4` so that the lattice closes up and no two edges coincide.
pub fn build_torus_triangulation(n: usize) -> Result<SimplicialComplex> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "torus side must be even and at least 4, got {n}"
        )));
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            let v = |da: i64, db: i64| torus_vertex(n, a + da, b + db);
            triangles.push(vec![v(0, 0), v(1, 0), v(0, 1)]);
            triangles.push(vec![v(1, 0), v(0, 1), v(1, 1)]);
        }
    }
    let complex = SimplicialComplex::from_maximal(n * n, &triangles)?;
    let counts = complex.counts();
    if counts != vec![n * n, 3 * n * n, 2 * n * n] {
        return Err(Error::InvalidComplex(format!(
            "degenerate torus lattice: counts {counts:?}"
        )));
    }
    let points = (0..(n * n) as u32)
        .map(|v| torus_position(n, v).to_vec())
        .collect();
    complex.with_geometry(PointCloud {
        points,
        metric: Metric::FlatTorus {
            periods: [2.0, 3f64.sqrt()],
        },
    })
}

/// Triangulated annulus: `rings + 1` concentric circles of `segments`
/// vertices with radii evenly spaced in `[inner, outer]`, each circle
/// rotated by half a segment against the previous one. Vertex
/// `ring · segments + s` sits on circle `ring`; 2·segments triangles join
/// two neighbouring circles.
pub fn build_annulus_triangulation(
    segments: usize,
    rings: usize,
    inner: f64,
    outer: f64,
) -> Result<SimplicialComplex> {
    if segments < 4 || rings == 0 || !(inner > 0.0 && outer > inner) {
        return Err(Error::InvalidArgument(format!(
            "annulus needs segments >= 4, rings >= 1 and 0 < inner < outer, got {segments}, {rings}, {inner}, {outer}"
        )));
    }
    let id = |ring: usize, s: usize| (ring * segments + s % segments) as VertexId;
    let mut triangles = Vec::with_capacity(2 * segments * rings);
    for j in 0..rings {
        for s in 0..segments {
            triangles.push(vec![id(j, s), id(j, s + 1), id(j + 1, s)]);
            triangles.push(vec![id(j, s + 1), id(j + 1, s + 1), id(j + 1, s)]);
        }
    }
    let nv = segments * (rings + 1);
    let complex = SimplicialComplex::from_maximal(nv, &triangles)?;
    let points = (0..nv)
        .map(|v| {
            let (j, s) = (v / segments, v % segments);
            let r = inner + (outer - inner) * j as f64 / rings as f64;
            let a = std::f64::consts::TAU * (s as f64 + 0.5 * j as f64) / segments as f64;
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    complex.with_geometry(PointCloud {
        points,
        metric: Metric::Euclidean,
    })
}

/// `count` points uniform (by area) in the planar annulus
/// `inner <= |x| <= outer`.
pub fn sample_annulus(count: usize, inner: f64, outer: f64, seed: u64) -> Result<PointCloud> {
    use rand::{Rng, SeedableRng};
    if !(inner >= 0.0 && outer > inner) {
        return Err(Error::InvalidArgument(format!(
            "bad annulus radii {inner}, {outer}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
            let a = std::f64::consts::TAU * rng.gen::<f64>();
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    PointCloud::euclidean(points)
}
