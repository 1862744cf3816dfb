use std::f64::consts::PI;

use thiserror::Error;

use super::Triangulation;
use crate::scalar::Scalar;

/// Radius of the circle of circumference one.
pub const RADIUS: f64 = 1.0 / (2.0 * PI);

const DISC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point set is empty")]
    Empty,
    #[error("point ({0}, {1}) lies outside the disc")]
    OutsideDisc(f64, f64),
}

/// A nonempty finite subset of the closed disc of circumference one.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet2D {
    points: Vec<[f64; 2]>,
}

impl PointSet2D {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::Empty);
        }
        if let Some(p) = points.iter().find(|p| p[0].hypot(p[1]) > RADIUS + DISC_TOLERANCE) {
            return Err(GeometryError::OutsideDisc(p[0], p[1]));
        }
        Ok(PointSet2D { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }
}

/// Point of the circle at arc-length position `s`.
pub fn circle_point(s: f64) -> [f64; 2] {
    let a = 2.0 * PI * s;
    [RADIUS * a.cos(), RADIUS * a.sin()]
}

fn directed(a: &PointSet2D, b: &PointSet2D) -> f64 {
    a.points
        .iter()
        .map(|p| b.points.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &PointSet2D, b: &PointSet2D) -> f64 {
    directed(a, b).max(directed(b, a))
}

impl<S: Scalar> Triangulation<S> {
    /// Samples every side and diagonal at `segments + 1` evenly spaced points.
    pub fn discretize(&self, segments: usize) -> PointSet2D {
        let pos: Vec<[f64; 2]> = self.positions().iter().map(|p| circle_point(p.to_f64())).collect();
        let mut chords: Vec<(usize, usize)> = (0..self.n()).map(|a| (a, (a + 1) % self.n())).collect();
        chords.extend_from_slice(self.diagonals());
        let k = segments.max(1);
        let mut points = Vec::with_capacity(chords.len() * (k + 1));
        for (a, b) in chords {
            for i in 0..=k {
                let s = i as f64 / k as f64;
                points.push([pos[a][0] * (1.0 - s) + pos[b][0] * s, pos[a][1] * (1.0 - s) + pos[b][1] * s]);
            }
        }
        PointSet2D { points }
    }
}
