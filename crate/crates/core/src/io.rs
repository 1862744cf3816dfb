//! JSON file formats.
//!
//! Masses, weights and times are written as strings via
//! [`Scalar::to_text`]; readers also accept plain JSON numbers. Measure maps
//! are keyed by vertex id (or arc index) written as a string.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::kingman::{HistoryError, Level, MergerEvent, MergerHistory};
use crate::measure::{A2mTree, Measure, MeasureError, TwoLevelMeasure};
use crate::scalar::{Scalar, ScalarParseError};
use crate::shape::{Label, ShapeDistribution, ShapeMode};
use crate::tree::{AlgebraicTree, TreeError, VertexId};
use crate::triangulation::{ArcTwoLevelMeasure, CodecError, Triangulation};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Number(#[from] ScalarParseError),
    #[error("`{0}` is not a vertex id")]
    VertexKey(String),
    #[error("cannot tell the file kind: expected a `vertices` or `n` field")]
    UnknownKind,
    #[error("unknown merger level `{0}`")]
    Level(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    History(#[from] HistoryError),
}

/// A number given either as text or as a JSON number.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn get<S: Scalar>(&self) -> Result<S, ScalarParseError> {
        match self {
            Num::Int(k) => Ok(S::from_ratio(*k, 1)),
            Num::Float(x) => S::parse_text(&format!("{x:e}")),
            Num::Text(t) => S::parse_text(t),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoLevelFile {
    weights: Vec<Num>,
    measures: Vec<BTreeMap<String, Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    vertices: Vec<VertexId>,
    edges: Vec<[VertexId; 2]>,
    #[serde(default)]
    nu: Option<TwoLevelFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcMeasureFile {
    weights: Vec<Num>,
    measures: Vec<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangulationFile {
    n: usize,
    diagonals: Vec<[usize; 2]>,
    #[serde(default)]
    arcs: Option<Vec<Num>>,
    #[serde(default)]
    measure: Option<ArcMeasureFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EventFile {
    t: Num,
    level: String,
    blocks: [usize; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryFile {
    labels: Vec<[u32; 2]>,
    gamma_h: Num,
    gamma_p: Num,
    events: Vec<EventFile>,
}

/// The kind of a parsed input file.
pub enum TreeOrTriangulation {
    Tree(Value),
    Triangulation(Value),
}

/// Guesses the file kind from its top-level keys.
pub fn detect_kind(text: &str) -> Result<TreeOrTriangulation, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    match &v {
        Value::Object(m) if m.contains_key("vertices") => Ok(TreeOrTriangulation::Tree(v)),
        Value::Object(m) if m.contains_key("n") => Ok(TreeOrTriangulation::Triangulation(v)),
        _ => Err(FormatError::UnknownKind),
    }
}

fn measure_from<S: Scalar>(m: &BTreeMap<String, Num>) -> Result<Measure<S>, FormatError> {
    let mut masses = Vec::with_capacity(m.len());
    for (k, x) in m {
        let v: VertexId = k.trim().parse().map_err(|_| FormatError::VertexKey(k.clone()))?;
        masses.push((v, x.get::<S>()?));
    }
    Ok(Measure::new(masses)?)
}

fn two_level_from<S: Scalar>(f: &TwoLevelFile) -> Result<TwoLevelMeasure<S>, FormatError> {
    if f.weights.len() != f.measures.len() {
        return Err(MeasureError::Empty.into());
    }
    let mut components = Vec::with_capacity(f.weights.len());
    for (w, m) in f.weights.iter().zip(&f.measures) {
        components.push((w.get::<S>()?, measure_from(m)?));
    }
    Ok(TwoLevelMeasure::new(components)?)
}

fn tree_from(f: &TreeFile) -> Result<AlgebraicTree, TreeError> {
    let edges: Vec<(VertexId, VertexId)> = f.edges.iter().map(|&[a, b]| (a, b)).collect();
    AlgebraicTree::new(f.vertices.iter().copied(), edges)
}

/// Reads a tree, ignoring any measure in the file.
pub fn tree_from_value(v: Value) -> Result<AlgebraicTree, FormatError> {
    let f: TreeFile = serde_json::from_value(v)?;
    Ok(tree_from(&f)?)
}

pub fn parse_tree(text: &str) -> Result<AlgebraicTree, FormatError> {
    tree_from_value(serde_json::from_str(text)?)
}

/// Reads a tree with its two-level measure (field `nu`).
pub fn parse_a2m<S: Scalar>(text: &str) -> Result<A2mTree<S>, FormatError> {
    let f: TreeFile = serde_json::from_str(text)?;
    let tree = tree_from(&f)?;
    let nu = match &f.nu {
        Some(nu) => two_level_from(nu)?,
        None => return Err(MeasureError::Empty.into()),
    };
    Ok(A2mTree::new(tree, nu)?)
}

/// Triangulation and its arc measure. A missing `arcs` field means the
/// regular polygon; a missing `measure` means `δ` of the arc lengths.
pub fn triangulation_from_value<S: Scalar>(v: Value) -> Result<(Triangulation<S>, ArcTwoLevelMeasure<S>), FormatError> {
    let f: TriangulationFile = serde_json::from_value(v)?;
    let diagonals = f.diagonals.iter().map(|&[a, b]| (a, b)).collect();
    let t = match &f.arcs {
        Some(arcs) => Triangulation::new(f.n, diagonals, arcs.iter().map(Num::get).collect::<Result<_, _>>()?),
        None => Triangulation::regular(f.n, diagonals),
    };
    let k = match &f.measure {
        Some(m) => {
            let mut components = Vec::with_capacity(m.weights.len());
            if m.weights.len() != m.measures.len() || m.weights.is_empty() {
                return Err(CodecError::Weights("need one weight per arc measure".into()).into());
            }
            for (w, arcs) in m.weights.iter().zip(&m.measures) {
                components.push((w.get::<S>()?, arcs.iter().map(Num::get).collect::<Result<Vec<S>, _>>()?));
            }
            ArcTwoLevelMeasure::new(components)?
        }
        None => ArcTwoLevelMeasure::from_arcs(t.arcs()),
    };
    Ok((t, k))
}

pub fn parse_triangulation<S: Scalar>(text: &str) -> Result<(Triangulation<S>, ArcTwoLevelMeasure<S>), FormatError> {
    triangulation_from_value(serde_json::from_str(text)?)
}

pub fn parse_history(text: &str) -> Result<MergerHistory, FormatError> {
    let f: HistoryFile = serde_json::from_str(text)?;
    let labels = f.labels.iter().map(|&[h, p]| Label::new(h, p)).collect();
    let mut events = Vec::with_capacity(f.events.len());
    for e in &f.events {
        let level = match e.level.as_str() {
            "H" => Level::Host,
            "P" => Level::Parasite,
            other => return Err(FormatError::Level(other.to_string())),
        };
        events.push(MergerEvent { time: e.t.get::<f64>()?, level, blocks: e.blocks });
    }
    Ok(MergerHistory::new(labels, f.gamma_h.get()?, f.gamma_p.get()?, events)?)
}

fn text<S: Scalar>(x: &S) -> Value {
    Value::String(x.to_text())
}

pub fn measure_json<S: Scalar>(m: &Measure<S>) -> Value {
    Value::Object(m.iter().map(|(v, x)| (v.to_string(), text(x))).collect::<Map<_, _>>())
}

pub fn two_level_json<S: Scalar>(nu: &TwoLevelMeasure<S>) -> Value {
    json!({
        "weights": nu.components().iter().map(|(w, _)| text(w)).collect::<Vec<_>>(),
        "measures": nu.components().iter().map(|(_, m)| measure_json(m)).collect::<Vec<_>>(),
    })
}

pub fn tree_json(t: &AlgebraicTree) -> Value {
    json!({
        "vertices": t.vertices(),
        "edges": t.edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
    })
}

pub fn a2m_json<S: Scalar>(chi: &A2mTree<S>) -> Value {
    let mut v = tree_json(&chi.tree);
    v["nu"] = two_level_json(&chi.nu);
    v
}

pub fn triangulation_json<S: Scalar>(t: &Triangulation<S>, k: &ArcTwoLevelMeasure<S>) -> Value {
    json!({
        "n": t.n(),
        "diagonals": t.diagonals().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "arcs": t.arcs().iter().map(text).collect::<Vec<_>>(),
        "measure": {
            "weights": k.components().iter().map(|(w, _)| text(w)).collect::<Vec<_>>(),
            "measures": k.components().iter().map(|(_, a)| a.iter().map(text).collect::<Vec<_>>()).collect::<Vec<_>>(),
        },
    })
}

pub fn shape_distribution_json<S: Scalar>(d: &ShapeDistribution<S>) -> Value {
    let probs: Map<String, Value> = d.probs.iter().map(|(c, p)| (c.clone(), text(p))).collect();
    json!({
        "m": d.m(),
        "n": d.n,
        "mode": match d.mode {
            ShapeMode::Exact => "exact",
            ShapeMode::Mc => "mc",
        },
        "samples": d.samples,
        "probs": probs,
    })
}

pub fn history_json(h: &MergerHistory) -> Value {
    json!({
        "labels": h.labels().iter().map(|l| [l.host, l.parasite]).collect::<Vec<_>>(),
        "gamma_h": text(&h.gamma_h()),
        "gamma_p": text(&h.gamma_p()),
        "events": h.events().iter().map(|e| json!({
            "t": text(&e.time),
            "level": e.level.as_str(),
            "blocks": e.blocks,
        })).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kingman::simulate;
    use crate::rng::rng_from_seed;
    use crate::scalar::Rational;

    #[test]
    fn a2m_round_trip() {
        let text = r#"{"vertices":[1,2,3,4],"edges":[[1,4],[2,4],[3,4]],
            "nu":{"weights":["1/3",0.6666666666666666e0],"measures":[{"1":1},{"2":"0.5","3":"1/2"}]}}"#;
        let err = parse_a2m::<Rational>(text).unwrap_err();
        assert!(matches!(err, FormatError::Measure(_)));
        let text = text.replace("0.6666666666666666e0", "\"2/3\"");
        let chi = parse_a2m::<Rational>(&text).unwrap();
        assert_eq!(chi.nu.components().len(), 2);
        let again = parse_a2m::<Rational>(&to_pretty(&a2m_json(&chi))).unwrap();
        assert_eq!(again.nu, chi.nu);
        assert_eq!(again.tree, chi.tree);
        let float = parse_a2m::<f64>(&to_pretty(&a2m_json(&chi.to_f64()))).unwrap();
        assert_eq!(float.nu, chi.to_f64().nu);
    }

    #[test]
    fn triangulation_defaults() {
        let (t, k) = parse_triangulation::<Rational>(r#"{"n":4,"diagonals":[[2,0]]}"#).unwrap();
        assert_eq!(t.diagonals(), &[(0, 2)]);
        assert_eq!(k.intensity(), vec![Rational::new(1.into(), 4.into()); 4]);
        let (t2, k2) = parse_triangulation::<Rational>(&to_pretty(&triangulation_json(&t, &k))).unwrap();
        assert_eq!((t2, k2), (t, k));
    }

    #[test]
    fn history_round_trip() {
        let h = simulate(&[2, 1], 1.0, 2.0, &mut rng_from_seed(2)).unwrap();
        assert_eq!(parse_history(&to_pretty(&history_json(&h))).unwrap(), h);
    }

    #[test]
    fn kinds() {
        assert!(matches!(detect_kind(r#"{"n":3,"diagonals":[]}"#), Ok(TreeOrTriangulation::Triangulation(_))));
        assert!(matches!(detect_kind(r#"{"vertices":[1],"edges":[]}"#), Ok(TreeOrTriangulation::Tree(_))));
        assert!(matches!(detect_kind("[]"), Err(FormatError::UnknownKind)));
        assert!(matches!(detect_kind("{"), Err(FormatError::Json(_))));
    }
}
