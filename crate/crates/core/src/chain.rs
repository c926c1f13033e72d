//! Polygonal chains: storage, edge addressing, eager dihedral rotation and
//! simplicity checking.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom3::{rotate_about_axis, tolerance_for, AxisLine, Point3};

/// Tolerance for the edge-length and vertex-angle check after a rotation.
pub const RIGIDITY_TOL: f64 = 1e-9;

/// Segment `i` runs from vertex `i` to vertex `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeRef(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point3,
    pub b: Point3,
}

impl Segment {
    pub fn new(a: Point3, b: Point3) -> Self {
        Segment { a, b }
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.a.lerp(self.b, t)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

/// Closest pair between two closed segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPair {
    pub distance: f64,
    /// Parameter on the first segment.
    pub s: f64,
    /// Parameter on the second segment.
    pub t: f64,
}

/// Closest points between closed segments, following the clamped
/// parametric solution (Ericson, Real-Time Collision Detection, 5.1.9).
pub fn closest_pair(s1: &Segment, s2: &Segment) -> ClosestPair {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let r = s1.a - s2.a;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(r);
    let tiny = f64::EPSILON * f64::EPSILON;

    let (s, t) = if a <= tiny && e <= tiny {
        (0.0, 0.0)
    } else if a <= tiny {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(r);
        if e <= tiny {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    ClosestPair {
        distance: s1.at(s).dist(s2.at(t)),
        s,
        t,
    }
}

pub fn segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    closest_pair(s1, s2).distance
}

/// The two sides of a chain cut at an edge, as vertex ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub static_side: Range<usize>,
    pub moving_side: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    vertices: Vec<Point3>,
    allowed_overlaps: BTreeSet<(usize, usize)>,
}

impl Chain {
    pub fn new(vertices: Vec<Point3>) -> Result<Self> {
        Chain::with_overlaps(vertices, std::iter::empty())
    }

    pub fn with_overlaps<I>(vertices: Vec<Point3>, overlaps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if vertices.len() < 2 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vertex"));
        }
        let eps = tolerance_for(vertices.iter().copied());
        for (i, w) in vertices.windows(2).enumerate() {
            if w[0].dist(w[1]) <= eps {
                return Err(Error::CoincidentVertices(i, i + 1));
            }
        }
        let segments = vertices.len() - 1;
        let mut allowed = BTreeSet::new();
        for (i, j) in overlaps {
            if i == j || i >= segments || j >= segments {
                return Err(Error::BadOverlap(i, j));
            }
            allowed.insert((i.min(j), i.max(j)));
        }
        Ok(Chain {
            vertices,
            allowed_overlaps: allowed,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment {
        Segment::new(self.vertices[i], self.vertices[i + 1])
    }

    pub fn allowed_overlaps(&self) -> &BTreeSet<(usize, usize)> {
        &self.allowed_overlaps
    }

    pub fn is_allowed_overlap(&self, i: usize, j: usize) -> bool {
        self.allowed_overlaps.contains(&(i.min(j), i.max(j)))
    }

    /// Geometric tolerance for this chain.
    pub fn tolerance(&self) -> f64 {
        tolerance_for(self.vertices.iter().copied())
    }

    pub fn check_edge(&self, e: EdgeRef) -> Result<()> {
        if e.0 + 1 >= self.vertices.len() {
            return Err(Error::EdgeOutOfRange {
                index: e.0,
                vertices: self.vertices.len(),
            });
        }
        Ok(())
    }

    /// Oriented line through the endpoints of `e`.
    pub fn edge_axis(&self, e: EdgeRef) -> Result<AxisLine> {
        self.check_edge(e)?;
        let (u, v) = (self.vertices[e.0], self.vertices[e.0 + 1]);
        if u.dist(v) <= self.tolerance() {
            return Err(Error::DegenerateEdge(e.0));
        }
        AxisLine::through(u, v)
    }

    pub fn split_at_edge(&self, e: EdgeRef) -> Result<SplitResult> {
        self.check_edge(e)?;
        Ok(SplitResult {
            static_side: 0..e.0 + 1,
            moving_side: e.0 + 1..self.vertices.len(),
        })
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|w| w[0].dist(w[1])).collect()
    }

    /// Angle at every interior vertex between its two incident edges.
    pub fn vertex_angles(&self) -> Vec<f64> {
        self.vertices
            .windows(3)
            .map(|w| {
                let a = w[0] - w[1];
                let b = w[2] - w[1];
                a.cross(b).norm().atan2(a.dot(b))
            })
            .collect()
    }

    /// Rotates the vertices after `e` about the line through `e` by `phi`.
    /// Edge lengths and vertex angles are re-measured and must agree with the
    /// input within [`RIGIDITY_TOL`].
    pub fn apply_dihedral(&self, e: EdgeRef, phi: f64) -> Result<Chain> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        let axis = self.edge_axis(e)?;
        let motion = rotate_about_axis(&axis, phi);
        let mut vertices = self.vertices.clone();
        for v in &mut vertices[e.0 + 1..] {
            *v = motion.apply(*v);
        }
        let out = Chain {
            vertices,
            allowed_overlaps: self.allowed_overlaps.clone(),
        };
        let worst = max_shape_deviation(self, &out);
        if worst > RIGIDITY_TOL {
            return Err(Error::RigidityViolated(worst));
        }
        Ok(out)
    }

    /// First pair of segments (lexicographic) that touch, ignoring the shared
    /// vertex of adjacent segments and pairs listed in `allowed_overlaps`.
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        let eps = self.tolerance();
        let n = self.segment_count();
        for i in 0..n {
            let si = self.segment(i);
            for j in i + 1..n {
                if self.is_allowed_overlap(i, j) {
                    continue;
                }
                let sj = self.segment(j);
                let touching = if j == i + 1 {
                    // Shared vertex is exempt; folding back along the
                    // previous edge is not.
                    segment_point_distance(&sj, si.a) <= eps || segment_point_distance(&si, sj.b) <= eps
                } else {
                    segment_distance(&si, &sj) <= eps
                };
                if touching {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.first_violation().is_none()
    }

    pub fn to_file(&self) -> ChainFile {
        ChainFile {
            version: Some(1),
            vertices: self.vertices.clone(),
            allowed_overlaps: self.allowed_overlaps.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_file(f: ChainFile) -> Result<Chain> {
        Chain::with_overlaps(f.vertices, f.allowed_overlaps.into_iter().map(|[i, j]| (i, j)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("chain serializes")
    }

    /// Same chain with vertices replaced; overlaps are kept.
    pub(crate) fn with_vertices(&self, vertices: Vec<Point3>) -> Chain {
        debug_assert_eq!(vertices.len(), self.vertices.len());
        Chain {
            vertices,
            allowed_overlaps: self.allowed_overlaps.clone(),
        }
    }
}

pub fn segment_point_distance(s: &Segment, p: Point3) -> f64 {
    let d = s.b - s.a;
    let len2 = d.norm_sq();
    let t = if len2 > 0.0 {
        ((p - s.a).dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    s.at(t).dist(p)
}

/// Largest change in edge length or vertex angle between two chains of the
/// same length.
pub fn max_shape_deviation(a: &Chain, b: &Chain) -> f64 {
    let lens = a
        .edge_lengths()
        .iter()
        .zip(b.edge_lengths())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let angles = a
        .vertex_angles()
        .iter()
        .zip(b.vertex_angles())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    lens.max(angles)
}

/// On-disk chain document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub vertices: Vec<Point3>,
    #[serde(default)]
    pub allowed_overlaps: Vec<[usize; 2]>,
}
