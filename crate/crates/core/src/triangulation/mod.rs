//! Triangulations of convex polygons with arc lengths on the unit-length
//! circle, and the coding of binary trees with two-level measures by them.
//!
//! Polygon vertices are numbered `0..n` counterclockwise; vertex `k` sits at
//! the cumulative arc length of arcs `0..k`. Side `a` joins vertex `a` to
//! vertex `a + 1 (mod n)` and bounds arc `a`.

mod codec;
mod geometry;

pub use codec::{dual_tree, encode_tree, ArcTwoLevelMeasure, CodecError, ComponentOrder, DualTree, Encoded};
pub use geometry::{circle_point, hausdorff_distance, GeometryError, PointSet2D, RADIUS};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::report::Report;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("polygon size {0} is outside 3..=14")]
    SizeOutOfRange(usize),
}

/// One failed check of [`Triangulation::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriViolation {
    EmptyPolygon,
    OutOfRange(usize, usize),
    Degenerate(usize),
    IsSide(usize, usize),
    Duplicate(usize, usize),
    Crossing((usize, usize), (usize, usize)),
    DiagonalCount { expected: usize, got: usize },
    NonTriangularFace,
    ArcCount { expected: usize, got: usize },
    NonPositiveArc(usize),
    ArcSum(String),
    /// The faces have no separating triangle, or several.
    Separation { faces: [Face; 3], separators: usize },
}

impl fmt::Display for TriViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriViolation::EmptyPolygon => write!(f, "polygon has no vertices"),
            TriViolation::OutOfRange(a, b) => write!(f, "diagonal ({a},{b}) uses a vertex outside the polygon"),
            TriViolation::Degenerate(a) => write!(f, "diagonal ({a},{a}) is a single point"),
            TriViolation::IsSide(a, b) => write!(f, "({a},{b}) is a polygon side, not a diagonal"),
            TriViolation::Duplicate(a, b) => write!(f, "diagonal ({a},{b}) is listed twice"),
            TriViolation::Crossing(x, y) => write!(f, "diagonals {x:?} and {y:?} cross"),
            TriViolation::DiagonalCount { expected, got } => write!(f, "expected {expected} diagonals, got {got}"),
            TriViolation::NonTriangularFace => write!(f, "some face is not a triangle"),
            TriViolation::ArcCount { expected, got } => write!(f, "expected {expected} arcs, got {got}"),
            TriViolation::NonPositiveArc(a) => write!(f, "arc {a} has nonpositive length"),
            TriViolation::ArcSum(s) => write!(f, "arc lengths sum to {s}, expected 1"),
            TriViolation::Separation { faces, separators } => {
                write!(f, "faces {faces:?} are separated by {separators} triangles, expected exactly 1")
            }
        }
    }
}

/// A face of the triangulated disc: a triangle or a circular segment
/// (the region between a side and its arc).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    Triangle([usize; 3]),
    Segment(usize),
}

/// Position of a face relative to a triangle `t`: `t` itself, or one of the
/// three caps cut off by its edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    Inside,
    Cap(usize),
}

fn cap_of_vertex(t: [usize; 3], v: usize) -> usize {
    if t[0] < v && v < t[1] {
        0
    } else if t[1] < v && v < t[2] {
        1
    } else {
        2
    }
}

fn cap_of_side(t: [usize; 3], s: usize) -> usize {
    if t[0] <= s && s < t[1] {
        0
    } else if t[1] <= s && s < t[2] {
        1
    } else {
        2
    }
}

fn region(t: [usize; 3], face: Face) -> Region {
    match face {
        Face::Segment(s) => Region::Cap(cap_of_side(t, s)),
        Face::Triangle(u) if u == t => Region::Inside,
        Face::Triangle(u) => {
            let v = u.iter().copied().find(|v| !t.contains(v)).expect("distinct triangles differ in a vertex");
            Region::Cap(cap_of_vertex(t, v))
        }
    }
}

/// A polygon triangulation with arc lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation<S> {
    n: usize,
    diagonals: Vec<(usize, usize)>,
    arcs: Vec<S>,
}

impl<S: Scalar> Triangulation<S> {
    /// Stores the data without validating it; see [`Self::validate`].
    pub fn new(n: usize, diagonals: Vec<(usize, usize)>, arcs: Vec<S>) -> Self {
        let mut diagonals: Vec<(usize, usize)> = diagonals.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        diagonals.sort_unstable();
        Triangulation { n, diagonals, arcs }
    }

    /// Triangulation of the regular polygon, all arcs `1/n`.
    pub fn regular(n: usize, diagonals: Vec<(usize, usize)>) -> Self {
        let arcs = vec![S::from_ratio(1, n.max(1) as i64); n];
        Self::new(n, diagonals, arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> &[(usize, usize)] {
        &self.diagonals
    }

    pub fn arcs(&self) -> &[S] {
        &self.arcs
    }

    /// Circle position of every polygon vertex.
    pub fn positions(&self) -> Vec<S> {
        let mut acc = S::zero();
        self.arcs
            .iter()
            .map(|a| {
                let p = acc.clone();
                acc = acc.clone() + a.clone();
                p
            })
            .collect()
    }

    pub(crate) fn is_side(&self, a: usize, b: usize) -> bool {
        let (a, b) = (a.min(b), a.max(b));
        b == a + 1 || (a == 0 && b + 1 == self.n && self.n > 2)
    }

    /// Side index of the edge `(a, b)` if it is a side.
    pub(crate) fn side_index(&self, a: usize, b: usize) -> Option<usize> {
        let (a, b) = (a.min(b), a.max(b));
        if b == a + 1 {
            Some(a)
        } else if a == 0 && b + 1 == self.n {
            Some(b)
        } else {
            None
        }
    }

    /// All triangles with vertices in increasing order, sorted.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let n = self.n;
        if n < 3 {
            return Vec::new();
        }
        let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for a in 0..n {
            let b = (a + 1) % n;
            nbrs[a].insert(b);
            nbrs[b].insert(a);
        }
        for &(a, b) in &self.diagonals {
            if a < n && b < n && a != b {
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        let mut out = Vec::new();
        for a in 0..n {
            for &b in nbrs[a].range(a + 1..) {
                for &c in nbrs[b].range(b + 1..) {
                    if nbrs[a].contains(&c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// All faces: triangles first, then segments by side index.
    pub fn faces(&self) -> Vec<Face> {
        let mut f: Vec<Face> = self.triangles().into_iter().map(Face::Triangle).collect();
        f.extend((0..self.n).map(Face::Segment));
        f
    }

    pub fn validate(&self) -> Report<TriViolation> {
        let mut report = Report::default();
        let n = self.n;
        if n == 0 {
            report.push(TriViolation::EmptyPolygon);
            return report;
        }
        if self.arcs.len() != n {
            report.push(TriViolation::ArcCount { expected: n, got: self.arcs.len() });
        }
        for (a, x) in self.arcs.iter().enumerate() {
            if *x <= S::zero() {
                report.push(TriViolation::NonPositiveArc(a));
            }
        }
        let total = crate::scalar::sum(&self.arcs);
        if !total.close_to(&S::one()) {
            report.push(TriViolation::ArcSum(total.to_text()));
        }
        let mut structural = true;
        for (k, &(a, b)) in self.diagonals.iter().enumerate() {
            if b >= n {
                report.push(TriViolation::OutOfRange(a, b));
                structural = false;
            } else if a == b {
                report.push(TriViolation::Degenerate(a));
                structural = false;
            } else if n < 3 || self.is_side(a, b) {
                report.push(TriViolation::IsSide(a, b));
                structural = false;
            }
            if k > 0 && self.diagonals[k - 1] == (a, b) {
                report.push(TriViolation::Duplicate(a, b));
                structural = false;
            }
        }
        for (i, &(a, b)) in self.diagonals.iter().enumerate() {
            for &(c, d) in &self.diagonals[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    report.push(TriViolation::Crossing((a, b), (c, d)));
                    structural = false;
                }
            }
        }
        let expected = n.saturating_sub(3);
        if self.diagonals.len() != expected {
            report.push(TriViolation::DiagonalCount { expected, got: self.diagonals.len() });
            structural = false;
        }
        if !structural || n < 3 {
            return report;
        }
        let triangles = self.triangles();
        let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                *uses.entry((a, b)).or_insert(0) += 1;
            }
        }
        let sides_ok = (0..n).all(|s| uses.get(&(s.min((s + 1) % n), s.max((s + 1) % n))) == Some(&1));
        let diagonals_ok = self.diagonals.iter().all(|d| uses.get(d) == Some(&2));
        if triangles.len() != n - 2 || !sides_ok || !diagonals_ok {
            report.push(TriViolation::NonTriangularFace);
            return report;
        }
        let faces = self.faces();
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                for k in j + 1..faces.len() {
                    let triple = [faces[i], faces[j], faces[k]];
                    let separators = triangles.iter().filter(|&&t| separates(t, triple)).count();
                    if separators != 1 {
                        report.push(TriViolation::Separation { faces: triple, separators });
                    }
                }
            }
        }
        report
    }

    /// Arcs (by index) inside the component of the disc minus `x` that
    /// contains `y`; for `x == y` the face itself.
    pub fn component_arcs(&self, x: Face, y: Face) -> Vec<usize> {
        let n = self.n;
        if x == y {
            return match x {
                Face::Segment(s) => vec![s],
                Face::Triangle(_) => Vec::new(),
            };
        }
        match x {
            Face::Segment(s) => (0..n).filter(|&a| a != s).collect(),
            Face::Triangle(t) => match region(t, y) {
                Region::Inside => Vec::new(),
                Region::Cap(k) => (0..n).filter(|&a| cap_of_side(t, a) == k).collect(),
            },
        }
    }
}

/// `t` puts the three faces in pairwise different regions.
fn separates(t: [usize; 3], faces: [Face; 3]) -> bool {
    let r = faces.map(|f| region(t, f));
    r[0] != r[1] && r[0] != r[2] && r[1] != r[2]
}

/// All triangulations of the convex `n`-gon with equal arcs.
pub fn enumerate_triangulations<S: Scalar>(n: usize) -> Result<Vec<Triangulation<S>>, TriangulationError> {
    if !(3..=14).contains(&n) {
        return Err(TriangulationError::SizeOutOfRange(n));
    }
    let mut memo = Memo::new();
    let all = chain(0, n - 1, &mut memo);
    Ok(all.into_iter().map(|d| Triangulation::regular(n, d)).collect())
}

type Memo = BTreeMap<(usize, usize), Vec<Vec<(usize, usize)>>>;

/// Triangulations of the sub-polygon `i, i+1, …, j` closed by the edge `(i, j)`.
fn chain(i: usize, j: usize, memo: &mut Memo) -> Vec<Vec<(usize, usize)>> {
    if j - i < 2 {
        return vec![Vec::new()];
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for k in i + 1..j {
        let left = chain(i, k, memo);
        let right = chain(k, j, memo);
        for l in &left {
            for r in &right {
                let mut d = l.clone();
                d.extend_from_slice(r);
                if k - i >= 2 {
                    d.push((i, k));
                }
                if j - k >= 2 {
                    d.push((k, j));
                }
                out.push(d);
            }
        }
    }
    memo.insert((i, j), out.clone());
    out
}
