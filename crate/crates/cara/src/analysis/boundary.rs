//! Piecewise frontier of a two-queue stability region.
//!
//! The channel-aware closure region and the no-CSI baseline region share one
//! closed form: two boundary line segments, joined either directly at a corner
//! vertex (convex case) or by a square-root curve (non-convex case). The two
//! regions differ only in the per-node axis scale, solo success probability
//! and interference penalty, so both are expressed through [`FrontierSpec`].

use serde::Serialize;

/// Tolerance used when deciding whether the convexity criterion sits exactly
/// on the boundary between the curved and polygonal descriptions.
pub const SHAPE_TOL: f64 = 1e-12;

/// A point in the arrival-rate plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl RatePoint {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2 }
    }
}

/// Kind of a frontier piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Line,
    Curve,
}

/// One exported frontier vertex, tagged with the segment it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryVertex {
    pub segment: SegmentKind,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Closed-form ingredients of the frontier.
///
/// `scale_i` stretches axis `i`, `solo_i` is the success probability of a
/// lone transmission and `pen_i` the interference penalty inflicted on node
/// `i` by the other node. Invariant `0 <= pen_i <= solo_i` is expected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FrontierSpec {
    pub scale1: f64,
    pub scale2: f64,
    pub solo1: f64,
    pub solo2: f64,
    pub pen1: f64,
    pub pen2: f64,
}

impl FrontierSpec {
    /// The convexity criterion. At least 1 selects the curved description.
    pub fn criterion(&self) -> f64 {
        self.pen1 / self.solo1 + self.pen2 / self.solo2
    }

    fn p_x(&self) -> RatePoint {
        RatePoint::new(self.scale1 * self.solo1, 0.0)
    }

    fn p_y(&self) -> RatePoint {
        RatePoint::new(0.0, self.scale2 * self.solo2)
    }

    fn p1(&self) -> RatePoint {
        let d = self.solo1 - self.pen1;
        RatePoint::new(
            self.scale1 * self.solo2 * d * d / (self.pen2 * self.solo1),
            self.scale2 * self.pen1 * self.solo2 / self.solo1,
        )
    }

    fn p2(&self) -> RatePoint {
        let d = self.solo2 - self.pen2;
        RatePoint::new(
            self.scale1 * self.pen2 * self.solo1 / self.solo2,
            self.scale2 * self.solo1 * d * d / (self.pen1 * self.solo2),
        )
    }

    fn p3(&self) -> RatePoint {
        RatePoint::new(
            self.scale1 * (self.solo1 - self.pen1),
            self.scale2 * (self.solo2 - self.pen2),
        )
    }

    /// Left boundary line, from the lambda2 axis to the first joint. This is
    /// the frontier obtained when node 2 transmits at every opportunity.
    fn line_left(&self, l1: f64) -> f64 {
        self.scale2 * (self.solo2 - self.pen2 * l1 / (self.scale1 * (self.solo1 - self.pen1)))
    }

    /// Right boundary line, ending on the lambda1 axis. Mirror image of
    /// `line_left` under the node swap.
    fn line_right(&self, l1: f64) -> f64 {
        self.scale2 * (self.solo2 - self.pen2) * (self.scale1 * self.solo1 - l1)
            / (self.scale1 * self.pen1)
    }

    /// The curved piece: sqrt(pen2 l1 / scale1) + sqrt(pen1 l2 / scale2) =
    /// sqrt(solo1 solo2), solved for l2.
    fn curve(&self, l1: f64) -> f64 {
        let root = (self.solo1 * self.solo2).sqrt() - (self.pen2 * l1 / self.scale1).sqrt();
        self.scale2 * root * root / self.pen1
    }
}

/// How the frontier is pieced together between the axis anchors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundaryShape {
    /// Line from the lambda2 anchor to `p1`, curve from `p1` to `p2`, line
    /// from `p2` to the lambda1 anchor.
    CurvedThreeSegment { p1: RatePoint, p2: RatePoint },
    /// Two lines joined at the corner vertex `p3`.
    TwoLine { p3: RatePoint },
}

/// Piecewise description of a stability-region frontier with named anchors.
///
/// `p_x` sits on the lambda1 axis, `p_y` on the lambda2 axis; the interior of
/// the region is the set of rate pairs strictly below the frontier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub p_x: RatePoint,
    pub p_y: RatePoint,
    pub shape: BoundaryShape,
    #[serde(skip)]
    spec: FrontierSpec,
}

impl RegionBoundary {
    pub(crate) fn from_spec(spec: FrontierSpec) -> Self {
        let curved = spec.criterion() >= 1.0 - SHAPE_TOL && spec.pen1 > 0.0 && spec.pen2 > 0.0;
        let shape = if curved {
            BoundaryShape::CurvedThreeSegment { p1: spec.p1(), p2: spec.p2() }
        } else {
            BoundaryShape::TwoLine { p3: spec.p3() }
        };
        RegionBoundary { p_x: spec.p_x(), p_y: spec.p_y(), shape, spec }
    }

    /// Frontier value at a given `lambda1` in `[0, p_x.lambda1]`.
    pub fn frontier_lambda2(&self, lambda1: f64) -> f64 {
        if lambda1 <= 0.0 {
            return self.p_y.lambda2;
        }
        if lambda1 >= self.p_x.lambda1 {
            return 0.0;
        }
        match self.shape {
            BoundaryShape::CurvedThreeSegment { p1, p2 } => {
                if lambda1 < p1.lambda1 {
                    self.spec.line_left(lambda1)
                } else if lambda1 < p2.lambda1 {
                    self.spec.curve(lambda1)
                } else {
                    self.spec.line_right(lambda1)
                }
            }
            BoundaryShape::TwoLine { p3 } => {
                if lambda1 < p3.lambda1 {
                    self.spec.line_left(lambda1)
                } else {
                    self.spec.line_right(lambda1)
                }
            }
        }
    }

    /// Strict membership: true iff the point lies strictly below the frontier
    /// (and in the first quadrant).
    pub fn contains(&self, rates: RatePoint) -> bool {
        rates.lambda1 >= 0.0
            && rates.lambda2 >= 0.0
            && rates.lambda1 < self.p_x.lambda1
            && rates.lambda2 < self.frontier_lambda2(rates.lambda1)
    }

    /// Euclidean distance from a point to the frontier polyline. The curved
    /// piece is approximated by a dense sample, accurate far beyond any band
    /// width used in practice.
    pub fn distance(&self, rates: RatePoint) -> f64 {
        let vertices = self.sample(1024);
        let points: Vec<RatePoint> =
            vertices.iter().map(|v| RatePoint::new(v.lambda1, v.lambda2)).collect();
        polyline_distance(&points, rates)
    }

    /// Ordered frontier vertices for export.
    ///
    /// `curve_points` controls the resolution of the curved piece (at least
    /// two: its endpoints). Junction vertices are repeated at tag changes so
    /// each tag run forms a complete polyline. The two-line case always
    /// yields exactly three vertices.
    pub fn sample(&self, curve_points: usize) -> Vec<BoundaryVertex> {
        let vertex = |segment, p: RatePoint| BoundaryVertex {
            segment,
            lambda1: p.lambda1,
            lambda2: p.lambda2,
        };
        match self.shape {
            BoundaryShape::TwoLine { p3 } => vec![
                vertex(SegmentKind::Line, self.p_y),
                vertex(SegmentKind::Line, p3),
                vertex(SegmentKind::Line, self.p_x),
            ],
            BoundaryShape::CurvedThreeSegment { p1, p2 } => {
                let n = curve_points.max(2);
                let mut out = Vec::with_capacity(n + 4);
                out.push(vertex(SegmentKind::Line, self.p_y));
                out.push(vertex(SegmentKind::Line, p1));
                for i in 0..n {
                    let t = i as f64 / (n - 1) as f64;
                    let l1 = p1.lambda1 + t * (p2.lambda1 - p1.lambda1);
                    let l2 = if i == 0 {
                        p1.lambda2
                    } else if i == n - 1 {
                        p2.lambda2
                    } else {
                        self.spec.curve(l1)
                    };
                    out.push(vertex(SegmentKind::Curve, RatePoint::new(l1, l2)));
                }
                out.push(vertex(SegmentKind::Line, p2));
                out.push(vertex(SegmentKind::Line, self.p_x));
                out
            }
        }
    }
}

/// Distance from `p` to the segment `ab`.
fn segment_distance(a: RatePoint, b: RatePoint, p: RatePoint) -> f64 {
    let (dx, dy) = (b.lambda1 - a.lambda1, b.lambda2 - a.lambda2);
    let len2 = dx * dx + dy * dy;
    let (px, py) = (p.lambda1 - a.lambda1, p.lambda2 - a.lambda2);
    let t = if len2 > 0.0 { ((px * dx + py * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (ex, ey) = (px - t * dx, py - t * dy);
    (ex * ex + ey * ey).sqrt()
}

/// Minimum distance from `p` to a polyline given by consecutive vertices.
pub fn polyline_distance(vertices: &[RatePoint], p: RatePoint) -> f64 {
    match vertices {
        [] => f64::INFINITY,
        [only] => segment_distance(*only, *only, p),
        _ => vertices
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], p))
            .fold(f64::INFINITY, f64::min),
    }
}
