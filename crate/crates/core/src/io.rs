//! JSON, NDJSON and CSV formats. Every JSON document carries a
//! `format_version` field.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain::{Chain, Coefficient, IntChain, RealChain};
use crate::complex::{
    validate_closure, Metric, PointCloud, SimplicialComplex, VertexId, Violation,
};
use crate::error::{Error, Result};
use crate::walk::Trajectory;

pub const FORMAT_VERSION: u32 = 1;

fn format_error(what: &str, e: serde_json::Error) -> Error {
    Error::Format(format!(
        "{what}: line {}, column {}: {e}",
        e.line(),
        e.column()
    ))
}

fn check_version(what: &str, v: Option<u32>) -> Result<()> {
    match v {
        Some(v) if v > FORMAT_VERSION => Err(Error::Format(format!(
            "{what}: format_version {v} is newer than {FORMAT_VERSION}"
        ))),
        _ => Ok(()),
    }
}

fn to_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    #[serde(default)]
    format_version: Option<u32>,
    #[serde(default)]
    n_vertices: Option<usize>,
    #[serde(default)]
    metric: Option<Metric>,
    #[serde(default)]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    simplices: BTreeMap<String, Vec<Vec<VertexId>>>,
}

pub fn complex_to_json(complex: &SimplicialComplex) -> String {
    let simplices = (1..=complex.top_dim())
        .map(|k| {
            let list = complex
                .simplices(k)
                .iter()
                .map(|s| s.vertices().to_vec())
                .collect();
            (k.to_string(), list)
        })
        .collect();
    let geo = complex.geometry();
    to_pretty(&ComplexDoc {
        format_version: Some(FORMAT_VERSION),
        n_vertices: Some(complex.count(0)),
        metric: geo.map(|g| g.metric),
        vertices: geo.map(|g| g.points.clone()),
        simplices,
    })
}

struct ComplexParts {
    n_vertices: usize,
    simplices: Vec<Vec<VertexId>>,
    geometry: Option<PointCloud>,
}

fn complex_parts(text: &str) -> Result<ComplexParts> {
    let doc: ComplexDoc = serde_json::from_str(text).map_err(|e| format_error("complex", e))?;
    check_version("complex", doc.format_version)?;
    let n = match (&doc.vertices, doc.n_vertices) {
        (Some(v), Some(n)) if v.len() != n => {
            return Err(Error::Format(format!(
                "complex: {} vertex coordinates but n_vertices = {n}",
                v.len()
            )))
        }
        (Some(v), _) => v.len(),
        (None, Some(n)) => n,
        (None, None) => {
            return Err(Error::Format(
                "complex: need `vertices` or `n_vertices`".into(),
            ))
        }
    };
    let mut all = Vec::new();
    for (key, list) in &doc.simplices {
        let k: usize = key
            .parse()
            .map_err(|_| Error::Format(format!("complex: bad dimension key {key:?}")))?;
        for s in list {
            if s.len() != k + 1 {
                return Err(Error::Format(format!(
                    "complex: simplex {s:?} listed under dimension {k}"
                )));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Format(format!(
                    "complex: simplex {s:?} is not strictly increasing"
                )));
            }
            all.push(s.clone());
        }
    }
    Ok(ComplexParts {
        n_vertices: n,
        simplices: all,
        geometry: doc.vertices.map(|points| PointCloud {
            points,
            metric: doc.metric.unwrap_or(Metric::Euclidean),
        }),
    })
}

/// Parses a complex document. Tuples must be strictly increasing and the
/// list closed under faces; vertex count comes from `vertices` or
/// `n_vertices`.
pub fn complex_from_json(text: &str) -> Result<SimplicialComplex> {
    let parts = complex_parts(text)?;
    let complex = SimplicialComplex::from_simplices(parts.n_vertices, &parts.simplices)?;
    match parts.geometry {
        Some(g) => complex.with_geometry(g),
        None => Ok(complex),
    }
}

/// Closure violations of a syntactically valid complex document.
pub fn validate_complex_json(text: &str) -> Result<Vec<Violation>> {
    let parts = complex_parts(text)?;
    Ok(validate_closure(parts.n_vertices, &parts.simplices))
}

#[derive(Serialize, Deserialize)]
struct ChainDoc<V> {
    #[serde(default)]
    format_version: Option<u32>,
    dim: usize,
    coeffs: Vec<(usize, V)>,
}

pub fn chain_to_json<C: Coefficient + Serialize>(sigma: &Chain<C>) -> String {
    to_pretty(&ChainDoc {
        format_version: Some(FORMAT_VERSION),
        dim: sigma.dim(),
        coeffs: sigma.iter().collect(),
    })
}

fn parse_chain<C: Coefficient>(text: &str, coeff: fn(&Value) -> Option<C>) -> Result<Chain<C>> {
    let doc: ChainDoc<Value> = serde_json::from_str(text).map_err(|e| format_error("chain", e))?;
    check_version("chain", doc.format_version)?;
    let mut pairs = Vec::with_capacity(doc.coeffs.len());
    for (id, v) in &doc.coeffs {
        let c = coeff(v)
            .ok_or_else(|| Error::Format(format!("chain: bad coefficient {v} for simplex {id}")))?;
        pairs.push((*id, c));
    }
    Chain::from_pairs(doc.dim, pairs)
}

/// Integer chain; coefficients are JSON integers or decimal strings.
pub fn int_chain_from_json(text: &str) -> Result<IntChain> {
    parse_chain(text, |v| match v {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    })
}

/// Real chain; coefficients are JSON numbers or decimal strings.
pub fn real_chain_from_json(text: &str) -> Result<RealChain> {
    parse_chain(text, |v| match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    })
    .and_then(|c| {
        if c.iter().all(|(_, x)| x.is_finite()) {
            Ok(c)
        } else {
            Err(Error::Format("chain: non-finite coefficient".into()))
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub format_version: u32,
    pub k: usize,
    pub kind: String,
    pub betti: usize,
    pub eigenvalues: Vec<f64>,
}

impl SpectrumReport {
    pub fn new(k: usize, kind: &str, betti: usize, eigenvalues: Vec<f64>) -> Self {
        SpectrumReport {
            format_version: FORMAT_VERSION,
            k,
            kind: kind.to_string(),
            betti,
            eigenvalues,
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

/// One `{"t", "tau", "sign"}` object per line.
pub fn trajectory_ndjson(traj: &Trajectory) -> String {
    let mut out = String::new();
    for ev in &traj.events {
        out.push_str(&serde_json::to_string(ev).expect("events serialize"));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct TrajectorySummary<'a> {
    format_version: u32,
    jumps: u64,
    end_time: f64,
    stop: crate::walk::StopReason,
    initial: &'a IntChain,
    final_state: &'a IntChain,
    occupation: &'a RealChain,
}

pub fn trajectory_summary_json(traj: &Trajectory) -> String {
    to_pretty(&TrajectorySummary {
        format_version: FORMAT_VERSION,
        jumps: traj.jumps,
        end_time: traj.end_time,
        stop: traj.stop,
        initial: &traj.initial,
        final_state: &traj.final_state,
        occupation: &traj.occupation,
    })
}

/// Any serializable report, pretty-printed with a trailing newline.
pub fn report_json<T: Serialize>(report: &T) -> String {
    to_pretty(report)
}

/// One point per row; a first row that does not parse as numbers is taken
/// as a header.
pub fn point_cloud_from_csv(text: &str, metric: Metric) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("point cloud: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(p) => points.push(p),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::Format(format!("point cloud: line {}: {e}", i + 1)));
            }
        }
    }
    let cloud = PointCloud { points, metric };
    if cloud.points.iter().any(|p| p.len() != cloud.ambient_dim()) {
        return Err(Error::Format(
            "point cloud: rows have different lengths".into(),
        ));
    }
    Ok(cloud)
}

pub fn point_cloud_to_csv(cloud: &PointCloud) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in &cloud.points {
        w.write_record(p.iter().map(|x| format!("{x:?}")))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips, build_torus_triangulation, sample_annulus};
    use crate::walk::{simulate, WalkConfig};

    #[test]
    fn complex_round_trip_keeps_ids_and_geometry() {
        for c in [
            build_torus_triangulation(4).unwrap(),
            build_rips(&sample_annulus(30, 1.0, 2.0, 3).unwrap(), 0.8, 2).unwrap(),
        ] {
            let back = complex_from_json(&complex_to_json(&c)).unwrap();
            assert_eq!(back.counts(), c.counts());
            for k in 0..=c.top_dim() {
                assert_eq!(back.simplices(k), c.simplices(k));
            }
            assert_eq!(back.geometry(), c.geometry());
        }
    }

    #[test]
    fn validation_lists_missing_faces() {
        let text = r#"{"n_vertices": 3, "simplices": {"1": [[0,1]], "2": [[0,1,2]]}}"#;
        assert_eq!(validate_complex_json(text).unwrap().len(), 2);
        let c = build_torus_triangulation(4).unwrap();
        assert!(validate_complex_json(&complex_to_json(&c))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn square_without_geometry() {
        let text = r#"{"n_vertices": 4, "simplices": {"1": [[0,1],[1,2],[2,3],[0,3]]}}"#;
        let c = complex_from_json(text).unwrap();
        assert_eq!(c.counts(), vec![4, 4]);
        assert!(c.geometry().is_none());
    }

    #[test]
    fn malformed_complexes_are_rejected() {
        let bad = [
            "{\"n_vertices\": 3,\n \"simplices\": {\"1\": [[0,1],[1,0]]}}",
            r#"{"n_vertices": 3, "simplices": {"2": [[0,1,2]]}}"#,
            r#"{"simplices": {}}"#,
            r#"{"n_vertices": 2, "simplices": {"1": [[0,1,2]]}}"#,
            r#"{"format_version": 99, "n_vertices": 1}"#,
            "{\"n_vertices\": 2,\n \"simplices\": [",
        ];
        for text in bad {
            assert!(complex_from_json(text).is_err(), "{text}");
        }
        match complex_from_json("{\n\"n_vertices\": x}") {
            Err(Error::Format(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chain_round_trip_and_string_coefficients() {
        let s = Chain::from_pairs(1, [(3, -2i64), (0, 5)]).unwrap();
        assert_eq!(int_chain_from_json(&chain_to_json(&s)).unwrap(), s);
        let r = Chain::from_pairs(1, [(1, 0.25f64), (4, -1e-3)]).unwrap();
        assert_eq!(real_chain_from_json(&chain_to_json(&r)).unwrap(), r);
        let text = r#"{"dim": 1, "coeffs": [[0, "12"], [2, -3]]}"#;
        let c = int_chain_from_json(text).unwrap();
        assert_eq!((c.get(0), c.get(2)), (12, -3));
        assert!(int_chain_from_json(r#"{"dim": 1, "coeffs": [[0, 1.5]]}"#).is_err());
        assert!(int_chain_from_json(r#"{"dim": 1, "coeffs": [[0, "x"]]}"#).is_err());
    }

    #[test]
    fn trajectory_log_has_one_event_per_line() {
        let c = build_torus_triangulation(4).unwrap();
        let s1 = crate::torus::basis_cycles(&c).unwrap().0;
        let traj = simulate(&c, &s1, &WalkConfig::new(7, 2.0)).unwrap();
        let log = trajectory_ndjson(&traj);
        assert_eq!(log.lines().count(), traj.events.len());
        for line in log.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v["t"].is_f64() && v["tau"].is_u64() && v["sign"].is_i64());
        }
        let summary: Value = serde_json::from_str(&trajectory_summary_json(&traj)).unwrap();
        assert_eq!(summary["format_version"], 1);
        assert_eq!(summary["jumps"], traj.jumps);
    }

    #[test]
    fn point_cloud_csv_with_and_without_header() {
        let a = point_cloud_from_csv("x,y\n0.5,1\n-2,3e-1\n", Metric::Euclidean).unwrap();
        assert_eq!(a.points, vec![vec![0.5, 1.0], vec![-2.0, 0.3]]);
        let b = point_cloud_from_csv(&point_cloud_to_csv(&a), Metric::Euclidean).unwrap();
        assert_eq!(a, b);
        assert!(point_cloud_from_csv("1,2\n3\n", Metric::Euclidean).is_err());
        assert!(point_cloud_from_csv("1,2\nx,y\n", Metric::Euclidean).is_err());
    }
}
