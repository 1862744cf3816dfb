//! Sample shapes: the labelled cladogram spanned by sampled points, shape
//! distributions and the sample shape distance.

mod bpd_rate;
mod dist;
mod ds;
mod enumerate;
mod poly;

pub use bpd_rate::{empirical_bpd_error, BpdRateReport};
pub use dist::{shape_distribution_exact, shape_distribution_mc, tv_distance, ShapeDistribution, ShapeMode};
pub use ds::{
    compositions_by_size, d_s_from_profiles, d_s_truncated, A2mSource, DsEstimate, ProfileMethod, ShapeProfile, ShapeSource,
    Truncation,
};
pub use enumerate::{enumeration_terms, EXACT_LIMIT};
pub(crate) use enumerate::check_index_set;
pub use poly::{distance_polynomial_exact, distance_polynomial_mc};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::canon::canonical_form;
use crate::measure::{MeasureError, SampleMatrix};
use crate::tree::{AlgebraicTree, TreeError, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("sample point {0} is a branch point of the tree")]
    SampleOnBranchPoint(VertexId),
    #[error("the spanned subtree has a vertex of degree {degree} at {vertex}; binary trees only")]
    NotBinary { vertex: VertexId, degree: usize },
    #[error("the tree has a vertex of degree greater than three")]
    NotBinaryTree,
    #[error("no sample points")]
    EmptySample,
    #[error("exact enumeration needs {terms} terms, above the limit of {limit}")]
    EnumerationTooLarge { terms: u128, limit: u128 },
    #[error("shape distributions have different index sets: {0:?} vs {1:?}")]
    MismatchedIndexSets(Vec<u32>, Vec<u32>),
    #[error("every host needs at least one sample and there must be at least one host")]
    EmptyIndexSet,
    #[error("invalid cladogram: {0}")]
    InvalidCladogram(String),
    #[error("cannot parse cladogram code: {0}")]
    BadCode(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Index `(i, j)`: sample `j` of host `i`, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub host: u32,
    pub parasite: u32,
}

/// Label reserved for a distinguished root point.
pub const ROOT_LABEL: Label = Label { host: 0, parasite: 0 };

impl Label {
    pub fn new(host: u32, parasite: u32) -> Self {
        Label { host, parasite }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.host, self.parasite)
    }
}

impl FromStr for Label {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ShapeError::BadCode(format!("label `{s}`"));
        let (h, p) = s.split_once('.').ok_or_else(bad)?;
        Ok(Label { host: h.parse().map_err(|_| bad())?, parasite: p.parse().map_err(|_| bad())? })
    }
}

/// All labels `(i, j)` with `1 ≤ i ≤ m`, `1 ≤ j ≤ n_i`, in lexicographic order.
pub fn index_set(n: &[u32]) -> Vec<Label> {
    n.iter()
        .enumerate()
        .flat_map(|(i, &k)| (1..=k).map(move |j| Label::new(i as u32 + 1, j)))
        .collect()
}

/// Pairs each entry of a sample matrix with its label.
pub fn labelled_points(samples: &SampleMatrix) -> Vec<(Label, VertexId)> {
    samples
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (Label::new(i as u32 + 1, j as u32 + 1), v)))
        .collect()
}

/// A binary tree of leaves and degree-three vertices whose leaves carry
/// nonempty sets of labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cladogram {
    adj: Vec<Vec<usize>>,
    labels: Vec<Vec<Label>>,
}

impl Cladogram {
    pub fn new(adj: Vec<Vec<usize>>, mut labels: Vec<Vec<Label>>) -> Result<Self, ShapeError> {
        let invalid = |msg: String| ShapeError::InvalidCladogram(msg);
        if adj.is_empty() || adj.len() != labels.len() {
            return Err(invalid("need one label list per vertex".into()));
        }
        AlgebraicTree::from_adjacency(&adj).map_err(|e| invalid(e.to_string()))?;
        for (v, list) in adj.iter().enumerate() {
            match list.len() {
                0 | 1 if labels[v].is_empty() => return Err(invalid(format!("leaf {v} has no label"))),
                0 | 1 => {}
                3 if !labels[v].is_empty() => return Err(invalid(format!("interior vertex {v} carries labels"))),
                3 => {}
                d => return Err(invalid(format!("vertex {v} has degree {d}"))),
            }
        }
        for l in &mut labels {
            l.sort_unstable();
        }
        let mut all: Vec<Label> = labels.iter().flatten().copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("a label appears twice".into()));
        }
        Ok(Cladogram { adj, labels })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn labels(&self) -> &[Vec<Label>] {
        &self.labels
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.iter().filter(|l| !l.is_empty()).count()
    }

    pub fn label_count(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    /// Each leaf carries exactly one label.
    pub fn is_injective(&self) -> bool {
        self.labels.iter().all(|l| l.len() <= 1)
    }

    pub fn canonical_code(&self) -> String {
        let text: Vec<String> =
            self.labels.iter().map(|l| l.iter().map(Label::to_string).collect::<Vec<_>>().join(",")).collect();
        canonical_form(&self.adj, &text)
    }

    /// Rebuilds a cladogram from its canonical code.
    pub fn from_code(code: &str) -> Result<Self, ShapeError> {
        let mut p = CodeParser { s: code.as_bytes(), pos: 0, adj: Vec::new(), labels: Vec::new() };
        p.node()?;
        if p.pos != p.s.len() {
            return Err(ShapeError::BadCode(code.to_string()));
        }
        Cladogram::new(p.adj, p.labels)
    }

    /// Applies `f` to every label.
    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Result<Self, ShapeError> {
        let labels = self.labels.iter().map(|l| l.iter().map(|&x| f(x)).collect()).collect();
        Cladogram::new(self.adj.clone(), labels)
    }

    /// Labels grouped by leaf, keyed by vertex index.
    pub fn leaf_labels(&self) -> BTreeMap<usize, Vec<Label>> {
        self.labels.iter().enumerate().filter(|(_, l)| !l.is_empty()).map(|(v, l)| (v, l.clone())).collect()
    }
}

struct CodeParser<'a> {
    s: &'a [u8],
    pos: usize,
    adj: Vec<Vec<usize>>,
    labels: Vec<Vec<Label>>,
}

impl CodeParser<'_> {
    fn err(&self) -> ShapeError {
        ShapeError::BadCode(format!("unexpected input at byte {}", self.pos))
    }

    fn expect(&mut self, c: u8) -> Result<(), ShapeError> {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn node(&mut self) -> Result<usize, ShapeError> {
        self.expect(b'(')?;
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|&c| c != b';') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).map_err(|_| self.err())?;
        let labels = if text.is_empty() {
            Vec::new()
        } else {
            text.split(',').map(Label::from_str).collect::<Result<Vec<_>, _>>()?
        };
        self.expect(b';')?;
        let id = self.adj.len();
        self.adj.push(Vec::new());
        self.labels.push(labels);
        while self.s.get(self.pos) == Some(&b'(') {
            let child = self.node()?;
            self.adj[id].push(child);
            self.adj[child].push(id);
        }
        self.expect(b')')?;
        Ok(id)
    }
}

/// The shape of labelled sample points: the subtree they span, with
/// degree-two vertices suppressed and each leaf labelled by the samples on it.
///
/// A sample sitting inside the spanned subtree becomes a leaf hanging off a
/// new degree-three vertex at its position.
pub fn shape(tree: &AlgebraicTree, points: &[(Label, VertexId)]) -> Result<Cladogram, ShapeError> {
    if points.is_empty() {
        return Err(ShapeError::EmptySample);
    }
    let mut at: BTreeMap<usize, Vec<Label>> = BTreeMap::new();
    for &(l, v) in points {
        let i = tree.index_of(v)?;
        if tree.degree_at(i) >= 3 {
            return Err(ShapeError::SampleOnBranchPoint(v));
        }
        at.entry(i).or_default().push(l);
    }
    if at.len() == 1 {
        let labels = at.into_values().collect();
        return Cladogram::new(vec![Vec::new()], labels);
    }
    let s0 = *at.keys().next().expect("nonempty");
    let h = tree.hang(s0);
    let n = tree.len();
    let mut in_hull = vec![false; n];
    in_hull[s0] = true;
    for &s in at.keys() {
        let mut v = s;
        while !in_hull[v] {
            in_hull[v] = true;
            v = h.parent[v];
        }
    }
    let adj = tree.adjacency();
    let hull_degree = |v: usize| adj[v].iter().filter(|&&w| in_hull[w]).count();

    let mut node = vec![usize::MAX; n];
    let mut c_adj: Vec<Vec<usize>> = Vec::new();
    let mut c_labels: Vec<Vec<Label>> = Vec::new();
    let mut nearest_kept = vec![usize::MAX; n];
    for &v in h.order.iter().filter(|&&v| in_hull[v]) {
        let hd = hull_degree(v);
        if hd > 3 {
            return Err(ShapeError::NotBinary { vertex: tree.id(v), degree: hd });
        }
        let labels = at.get(&v);
        let kept = labels.is_some() || hd == 3;
        if kept {
            let id = c_adj.len();
            c_adj.push(Vec::new());
            node[v] = id;
            match labels {
                Some(l) if hd == 2 => {
                    c_labels.push(Vec::new());
                    c_adj.push(vec![id]);
                    c_adj[id].push(id + 1);
                    c_labels.push(l.clone());
                }
                Some(l) => c_labels.push(l.clone()),
                None => c_labels.push(Vec::new()),
            }
            if v != s0 {
                let up = node[nearest_kept[h.parent[v]]];
                c_adj[id].push(up);
                c_adj[up].push(id);
            }
            nearest_kept[v] = v;
        } else {
            nearest_kept[v] = nearest_kept[h.parent[v]];
        }
    }
    Cladogram::new(c_adj, c_labels)
}

/// Shape of a sample matrix; entry `(i, j)` is labelled `i+1.j+1`.
pub fn shape_of_matrix(tree: &AlgebraicTree, samples: &SampleMatrix) -> Result<Cladogram, ShapeError> {
    shape(tree, &labelled_points(samples))
}
