//! Closed-form stability analysis for the two-node random-access system and
//! the centralized scheduler baseline.
//!
//! Everything here is pure arithmetic on validated parameters: interference
//! penalties, service rates of the decoupled (dominant) system, fixed-`p`
//! and closure region membership, the optimized frontier, the no-CSI baseline
//! and the scheduler region. The Monte-Carlo counterparts live in
//! [`crate::sim`]; the test suite cross-checks the two against each other.

mod boundary;

pub use boundary::{
    polyline_distance, BoundaryShape, BoundaryVertex, RatePoint, RegionBoundary, SegmentKind,
    SHAPE_TOL,
};

use crate::model::{ArrivalRates, LcqSystemParams, SystemParams, TransmitProbs};
use boundary::FrontierSpec;
use serde::Serialize;
use thiserror::Error;

/// Hard cap on the node count for subset enumeration (2^N - 1 constraints).
pub const MAX_LCQ_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    /// The interfering queue saturates before reaching the requested load, so
    /// the partner's service rate is undefined.
    #[error("queue 1 is unstable in the dominant system: lambda1 = {lambda1} >= mu1 = {mu1}")]
    DominantQueueUnstable { lambda1: f64, mu1: f64 },
    /// The solo-vs-multi success gap must be strictly positive for the no-CSI
    /// region to be meaningful.
    #[error("no-CSI success gap for node {node} is not strictly positive ({gap})")]
    NonPositiveGap { node: usize, gap: f64 },
    #[error("subset enumeration supports at most {max} nodes, got {got}")]
    TooManyNodes { got: usize, max: usize },
    #[error("expected exactly {expected} nodes, got {got}")]
    WrongNodeCount { expected: usize, got: usize },
    #[error("rate vector has {rates} entries but the system has {nodes} nodes")]
    RateCountMismatch { rates: usize, nodes: usize },
}

/// Expected reduction of each node's solo success probability caused by the
/// other node's estimation-gated activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferencePenalty {
    pub node1: f64,
    pub node2: f64,
}

/// Compute the per-node interference penalties.
///
/// The penalty on node 1 averages, over the interferer's channel/estimate
/// states in which it may transmit, the drop from the solo success
/// probability to the with-interference one; symmetrically for node 2.
pub fn interference_penalty(params: &SystemParams) -> InterferencePenalty {
    let r = &params.reception;
    let (n1, n2) = (&params.node1, &params.node2);
    InterferencePenalty {
        node1: n2.pi_good * n2.bar_eps_good() * (r.q1_solo - r.q1_with_good)
            + n2.pi_bad() * n2.eps_bad * (r.q1_solo - r.q1_with_bad),
        node2: n1.pi_good * n1.bar_eps_good() * (r.q2_solo - r.q2_with_good)
            + n1.pi_bad() * n1.eps_bad * (r.q2_solo - r.q2_with_bad),
    }
}

/// Average service rates in the dominant system where node 2 keeps
/// transmitting dummy packets when empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominantRates {
    pub mu1: f64,
    pub mu2: f64,
}

/// Service rate of queue 1 in the dominant system: node 2's interference is
/// unconditional, so the rate does not depend on queue states at all.
pub fn dominant_mu1(params: &SystemParams, p: TransmitProbs) -> f64 {
    let pen = interference_penalty(params);
    params.node1.gate() * p.p1 * (params.reception.q1_solo - pen.node1 * p.p2)
}

/// Service rate of queue 2 in the dominant system, as a function of node 2's
/// transmit probability and node 1's load. Node 1 interferes only while
/// backlogged, which happens a fraction `lambda1 / mu1` of the time; `p1`
/// cancels out of the final expression.
///
/// No feasibility check is performed; see [`dominant_service_rates`] for the
/// checked variant.
pub fn dominant_mu2(params: &SystemParams, p2: f64, lambda1: f64) -> f64 {
    let pen = interference_penalty(params);
    let gate2 = params.node2.gate();
    let q2 = params.reception.q2_solo;
    if lambda1 == 0.0 {
        return gate2 * p2 * q2;
    }
    let denom = params.node1.gate() * (params.reception.q1_solo - pen.node1 * p2);
    gate2 * p2 * (q2 - pen.node2 * lambda1 / denom)
}

/// Both service rates of the dominant system at transmit probabilities `p`
/// and node-1 load `lambda1`.
///
/// Fails if `lambda1 >= mu1`: queue 1 then never empties and the closed form
/// for `mu2` does not apply.
pub fn dominant_service_rates(
    params: &SystemParams,
    p: TransmitProbs,
    lambda1: f64,
) -> Result<DominantRates, AnalysisError> {
    let mu1 = dominant_mu1(params, p);
    // Negated so that a NaN rate fails the check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lambda1 < mu1) {
        return Err(AnalysisError::DominantQueueUnstable { lambda1, mu1 });
    }
    Ok(DominantRates { mu1, mu2: dominant_mu2(params, p.p2, lambda1) })
}

/// Membership of an arrival-rate pair in the stability region at fixed
/// transmit probabilities.
///
/// The region is the union of the two dominant-system subregions; both are
/// evaluated with strict inequalities, so points exactly on the frontier are
/// excluded.
pub fn fixed_p_region_contains(
    params: &SystemParams,
    p: TransmitProbs,
    rates: ArrivalRates,
) -> bool {
    if rates.lambda1 < 0.0 || rates.lambda2 < 0.0 {
        return false;
    }
    let node2_dummies = |pa: &SystemParams, pr: TransmitProbs, l1: f64, l2: f64| {
        let mu1 = dominant_mu1(pa, pr);
        l1 < mu1 && l2 < dominant_mu2(pa, pr.p2, l1)
    };
    node2_dummies(params, p, rates.lambda1, rates.lambda2)
        || node2_dummies(
            &params.swapped(),
            TransmitProbs::new(p.p2, p.p1),
            rates.lambda2,
            rates.lambda1,
        )
}

/// Saturation frontier of the fixed-`p` region: a two-segment polyline from
/// the lambda2 axis through the joint saturation point to the lambda1 axis.
pub fn fixed_p_frontier_vertices(params: &SystemParams, p: TransmitProbs) -> [RatePoint; 3] {
    let pen = interference_penalty(params);
    let (gate1, gate2) = (params.node1.gate(), params.node2.gate());
    let (q1, q2) = (params.reception.q1_solo, params.reception.q2_solo);
    let corner = RatePoint::new(
        gate1 * p.p1 * (q1 - pen.node1 * p.p2),
        gate2 * p.p2 * (q2 - pen.node2 * p.p1),
    );
    [RatePoint::new(0.0, gate2 * p.p2 * q2), corner, RatePoint::new(gate1 * p.p1 * q1, 0.0)]
}

/// Where the maximizing transmit probability of node 2 falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptimalRegime {
    /// Unclamped stationary point strictly inside (0, 1).
    Interior,
    /// The service rate is non-decreasing in `p2`; transmit at every chance.
    AtOne,
    /// The service rate is non-increasing in `p2`; the best rate is zero.
    AtZero,
}

/// Result of maximizing queue 2's dominant-system service rate over `p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalP2 {
    pub p2: f64,
    pub regime: OptimalRegime,
}

/// Maximize queue 2's service rate over `p2` at a given node-1 load.
///
/// The regime is decided by comparing `lambda1` against the closed-form range
/// endpoints rather than by numerical search. The interior stationary point
/// exists only when the region is non-convex; at the left regime boundary the
/// interior expression evaluates to exactly 1, so `p2` is continuous across
/// regime changes.
pub fn optimal_p2(params: &SystemParams, lambda1: f64) -> OptimalP2 {
    let pen = interference_penalty(params);
    let gate1 = params.node1.gate();
    let (q1, q2) = (params.reception.q1_solo, params.reception.q2_solo);
    if lambda1 <= 0.0 || pen.node2 == 0.0 {
        return OptimalP2 { p2: 1.0, regime: OptimalRegime::AtOne };
    }
    let d1 = q1 - pen.node1;
    let left_end = gate1 * q2 * d1 * d1 / (pen.node2 * q1);
    if lambda1 <= left_end {
        return OptimalP2 { p2: 1.0, regime: OptimalRegime::AtOne };
    }
    let criterion = pen.node1 / q1 + pen.node2 / q2;
    let right_end = gate1 * pen.node2 * q1 / q2;
    if criterion >= 1.0 - SHAPE_TOL && pen.node1 > 0.0 && lambda1 < right_end {
        let p2 = (q1 - (pen.node2 * q1 * lambda1 / (gate1 * q2)).sqrt()) / pen.node1;
        OptimalP2 { p2, regime: OptimalRegime::Interior }
    } else {
        OptimalP2 { p2: 0.0, regime: OptimalRegime::AtZero }
    }
}

/// Envelope value `max over p of mu2` at a given node-1 load. Zero in the
/// `AtZero` regime.
pub fn max_mu2(params: &SystemParams, lambda1: f64) -> f64 {
    let opt = optimal_p2(params, lambda1);
    match opt.regime {
        OptimalRegime::AtZero => 0.0,
        _ => dominant_mu2(params, opt.p2, lambda1),
    }
}

/// Qualitative shape of the closure region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionShape {
    NonConvex,
    ConvexPolygon,
    RightTriangle,
}

/// Classify the closure region by the convexity criterion, with tolerance
/// [`SHAPE_TOL`] around the measure-zero triangle case.
pub fn classify_shape(params: &SystemParams) -> RegionShape {
    let pen = interference_penalty(params);
    let criterion =
        pen.node1 / params.reception.q1_solo + pen.node2 / params.reception.q2_solo;
    if (criterion - 1.0).abs() <= SHAPE_TOL {
        RegionShape::RightTriangle
    } else if criterion > 1.0 {
        RegionShape::NonConvex
    } else {
        RegionShape::ConvexPolygon
    }
}

fn closure_spec(params: &SystemParams) -> FrontierSpec {
    let pen = interference_penalty(params);
    FrontierSpec {
        scale1: params.node1.gate(),
        scale2: params.node2.gate(),
        solo1: params.reception.q1_solo,
        solo2: params.reception.q2_solo,
        pen1: pen.node1,
        pen2: pen.node2,
    }
}

/// Frontier of the closure region (union of fixed-`p` regions over all `p`).
pub fn closure_boundary(params: &SystemParams) -> RegionBoundary {
    RegionBoundary::from_spec(closure_spec(params))
}

/// Strict membership in the closure region.
pub fn closure_region_contains(params: &SystemParams, rates: ArrivalRates) -> bool {
    closure_boundary(params).contains(RatePoint::new(rates.lambda1, rates.lambda2))
}

/// Success probabilities seen under the no-CSI protocol, where transmissions
/// ignore the channel state and successes average over it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlohaDerived {
    /// Success probability of node 1 transmitting alone.
    pub q1_solo: f64,
    /// Success probability of node 1 transmitting alongside node 2.
    pub q1_multi: f64,
    pub q2_solo: f64,
    pub q2_multi: f64,
    /// `solo - multi` gap; the region machinery requires it strictly positive.
    pub gap1: f64,
    pub gap2: f64,
}

impl AlohaDerived {
    pub fn gaps_positive(&self) -> bool {
        self.gap1 > 0.0 && self.gap2 > 0.0
    }
}

/// Channel-averaged success probabilities and gaps for the no-CSI baseline.
pub fn aloha_derived(params: &SystemParams) -> AlohaDerived {
    let r = &params.reception;
    let (pi1, pi2) = (params.node1.pi_good, params.node2.pi_good);
    let q1_solo = pi1 * r.q1_solo;
    let q1_multi = pi1 * pi2 * r.q1_with_good + pi1 * (1.0 - pi2) * r.q1_with_bad;
    let q2_solo = pi2 * r.q2_solo;
    let q2_multi = pi1 * pi2 * r.q2_with_good + (1.0 - pi1) * pi2 * r.q2_with_bad;
    AlohaDerived {
        q1_solo,
        q1_multi,
        q2_solo,
        q2_multi,
        gap1: q1_solo - q1_multi,
        gap2: q2_solo - q2_multi,
    }
}

fn aloha_spec(params: &SystemParams) -> Result<FrontierSpec, AnalysisError> {
    let d = aloha_derived(params);
    for (node, gap) in [(1, d.gap1), (2, d.gap2)] {
        if gap <= 0.0 {
            return Err(AnalysisError::NonPositiveGap { node, gap });
        }
    }
    Ok(FrontierSpec {
        scale1: 1.0,
        scale2: 1.0,
        solo1: d.q1_solo,
        solo2: d.q2_solo,
        pen1: d.gap1,
        pen2: d.gap2,
    })
}

/// Frontier of the no-CSI baseline region. Same piecewise structure as the
/// channel-aware closure with the channel-averaged quantities substituted.
pub fn aloha_boundary(params: &SystemParams) -> Result<RegionBoundary, AnalysisError> {
    Ok(RegionBoundary::from_spec(aloha_spec(params)?))
}

/// Strict membership in the no-CSI baseline region.
pub fn aloha_region_contains(
    params: &SystemParams,
    rates: ArrivalRates,
) -> Result<bool, AnalysisError> {
    Ok(aloha_boundary(params)?.contains(RatePoint::new(rates.lambda1, rates.lambda2)))
}

/// Service capacity available to a subset of nodes under any stationary
/// scheduler: the probability that at least one subset member is connected.
pub fn lcq_subset_capacity(params: &LcqSystemParams, members: &[usize]) -> f64 {
    let mut miss = 1.0;
    for &i in members {
        miss *= 1.0 - params.nodes[i].gate();
    }
    1.0 - miss
}

/// Membership in the stability region of the centralized scheduler class.
///
/// Checks, for every non-empty subset of nodes, that the normalized load of
/// the subset is strictly below its service capacity. All `2^N - 1` subsets
/// are enumerated, so `N` is capped at [`MAX_LCQ_NODES`].
pub fn lcq_region_contains(
    params: &LcqSystemParams,
    rates: &[f64],
) -> Result<bool, AnalysisError> {
    let n = params.len();
    if n > MAX_LCQ_NODES {
        return Err(AnalysisError::TooManyNodes { got: n, max: MAX_LCQ_NODES });
    }
    if rates.len() != n {
        return Err(AnalysisError::RateCountMismatch { rates: rates.len(), nodes: n });
    }
    let load: Vec<f64> = rates
        .iter()
        .zip(&params.nodes)
        .map(|(&l, node)| if l == 0.0 { 0.0 } else { l / node.q_solo })
        .collect();
    let gate_miss: Vec<f64> = params.nodes.iter().map(|node| 1.0 - node.gate()).collect();
    for mask in 1u32..(1u32 << n) {
        let mut sum = 0.0;
        let mut miss = 1.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                sum += load[i];
                miss *= gate_miss[i];
            }
        }
        // Negated so that a NaN load (zero solo probability) falls outside.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(sum < 1.0 - miss) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Boundary polyline of the two-node scheduler region: two axis-parallel
/// pieces capped by the pair-constraint diagonal.
pub fn lcq_two_node_vertices(
    params: &LcqSystemParams,
) -> Result<Vec<BoundaryVertex>, AnalysisError> {
    if params.len() != 2 {
        return Err(AnalysisError::WrongNodeCount { expected: 2, got: params.len() });
    }
    let (b1, b2) = (params.nodes[0].gate(), params.nodes[1].gate());
    let (q1, q2) = (params.nodes[0].q_solo, params.nodes[1].q_solo);
    let line = |lambda1: f64, lambda2: f64| BoundaryVertex {
        segment: SegmentKind::Line,
        lambda1,
        lambda2,
    };
    Ok(vec![
        line(0.0, b2 * q2),
        line(b1 * (1.0 - b2) * q1, b2 * q2),
        line(b1 * q1, b2 * (1.0 - b1) * q2),
        line(b1 * q1, 0.0),
    ])
}

/// Whether the channel-aware closure region is contained in the centralized
/// scheduler region.
///
/// True whenever the closure is non-convex; for convex shapes the corner
/// vertex decides: the closure is a subset iff the corner lies strictly
/// inside the scheduler region. A `false` answer means some rate pairs are
/// achievable only by random access.
pub fn cara_subset_of_lcq(params: &SystemParams) -> bool {
    if classify_shape(params) == RegionShape::NonConvex {
        return true;
    }
    let pen = interference_penalty(params);
    let (gate1, gate2) = (params.node1.gate(), params.node2.gate());
    let (q1, q2) = (params.reception.q1_solo, params.reception.q2_solo);
    pen.node1 / (gate2 * q1) + pen.node2 / (gate1 * q2) > 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LcqNodeParams;
    use crate::presets;

    const EXACT: f64 = 1e-12;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (delta {})",
            actual - expected
        );
    }

    #[test]
    fn penalties_nonconvex_setting() {
        let pen = interference_penalty(&presets::nonconvex());
        assert_close(pen.node1, 0.552, EXACT);
        assert_close(pen.node2, 0.540, EXACT);
    }

    #[test]
    fn penalties_convex_setting() {
        let pen = interference_penalty(&presets::convex());
        assert_close(pen.node1, 0.393, EXACT);
        assert_close(pen.node2, 0.368, EXACT);
    }

    #[test]
    fn penalty_vanishes_when_interferer_never_estimated_good() {
        let mut params = presets::nonconvex();
        params.node2.eps_good = 1.0;
        params.node2.eps_bad = 0.0;
        let pen = interference_penalty(&params);
        assert_eq!(pen.node1, 0.0);
    }

    #[test]
    fn dominant_rates_reference_point() {
        let params = presets::nonconvex();
        let rates =
            dominant_service_rates(&params, TransmitProbs::new(0.5, 0.5), 0.1).unwrap();
        assert_close(rates.mu1, 0.23168, EXACT);
        assert_close(rates.mu2, 0.21936878453038675, EXACT);
    }

    #[test]
    fn dominant_rates_silent_partner() {
        let params = presets::nonconvex();
        let rates = dominant_service_rates(&params, TransmitProbs::new(1.0, 0.0), 0.2).unwrap();
        assert_close(rates.mu1, 0.64, EXACT);
        assert_eq!(rates.mu2, 0.0);
    }

    #[test]
    fn dominant_rates_perfect_estimation() {
        let params = presets::nonconvex().with_perfect_csi();
        let pen = interference_penalty(&params);
        assert_close(pen.node1, 0.7 * 0.9, EXACT);
        assert_close(pen.node2, 0.8 * 0.8, EXACT);
        let rates = dominant_service_rates(&params, TransmitProbs::new(0.5, 0.5), 0.1).unwrap();
        assert_close(rates.mu1, 0.8 * 0.5 * (1.0 - 0.63 * 0.5), EXACT);
        assert_close(rates.mu2, 0.7 * 0.5 * (0.9 - 0.64 * 0.1 / (0.8 * (1.0 - 0.63 * 0.5))), EXACT);
    }

    #[test]
    fn dominant_rates_reject_saturated_queue() {
        let params = presets::nonconvex();
        let err = dominant_service_rates(&params, TransmitProbs::new(0.5, 0.5), 0.3).unwrap_err();
        assert!(matches!(err, AnalysisError::DominantQueueUnstable { .. }));
    }

    #[test]
    fn fixed_p_membership_examples() {
        let params = presets::nonconvex();
        let p = TransmitProbs::new(0.5, 0.5);
        assert!(fixed_p_region_contains(&params, p, ArrivalRates::new(0.1, 0.21)));
        assert!(fixed_p_region_contains(&params, p, ArrivalRates::new(0.0, 0.0)));
        assert!(!fixed_p_region_contains(&params, p, ArrivalRates::new(0.1, 0.22)));
        // With lambda2 = 0 node 2 never interferes, so the region reaches all
        // the way to the solo saturation point 0.32 of node 1.
        assert!(fixed_p_region_contains(&params, p, ArrivalRates::new(0.24, 0.0)));
        assert!(fixed_p_region_contains(&params, p, ArrivalRates::new(0.319, 0.0)));
        assert!(!fixed_p_region_contains(&params, p, ArrivalRates::new(0.33, 0.0)));
        assert!(!fixed_p_region_contains(&params, p, ArrivalRates::new(-0.01, 0.1)));
    }

    #[test]
    fn fixed_p_frontier_matches_membership() {
        let params = presets::nonconvex();
        let p = TransmitProbs::new(0.5, 0.5);
        let [py, corner, px] = fixed_p_frontier_vertices(&params, p);
        assert_close(py.lambda2, 0.252, EXACT);
        assert_close(corner.lambda1, 0.23168, EXACT);
        assert_close(corner.lambda2, 0.1764, EXACT);
        assert_close(px.lambda1, 0.32, EXACT);
        let inside = ArrivalRates::new(corner.lambda1 - 1e-6, corner.lambda2 - 1e-6);
        let outside = ArrivalRates::new(corner.lambda1 + 1e-6, corner.lambda2 + 1e-6);
        assert!(fixed_p_region_contains(&params, p, inside));
        assert!(!fixed_p_region_contains(&params, p, outside));
    }

    #[test]
    fn optimal_p2_regimes() {
        let params = presets::nonconvex();
        let zero = optimal_p2(&params, 0.0);
        assert_eq!(zero.regime, OptimalRegime::AtOne);
        assert_eq!(zero.p2, 1.0);

        // Regime boundary between saturation and the interior optimum.
        let left_end = 0.64 * 0.9 * (1.0 - 0.552) * (1.0 - 0.552) / 0.54;
        assert_close(left_end, 0.21408426666666666, EXACT);
        assert_eq!(optimal_p2(&params, left_end).regime, OptimalRegime::AtOne);
        let just_right = optimal_p2(&params, left_end + 1e-9);
        assert_eq!(just_right.regime, OptimalRegime::Interior);
        assert_close(just_right.p2, 1.0, 1e-6);

        let interior = optimal_p2(&params, 0.3);
        assert_eq!(interior.regime, OptimalRegime::Interior);
        assert_close(interior.p2, 0.8508512936776981, 1e-9);

        // Beyond the interior range the rate is non-increasing in p2.
        assert_eq!(optimal_p2(&params, 0.39).regime, OptimalRegime::AtZero);
        assert_eq!(max_mu2(&params, 0.39), 0.0);
    }

    #[test]
    fn optimal_p2_agrees_with_grid_search() {
        let params = presets::nonconvex();
        for lambda1 in [0.05, 0.15, 0.21408426666666666, 0.25, 0.3, 0.36] {
            let mut best = (0.0f64, f64::NEG_INFINITY);
            for i in 0..=10_000 {
                let p2 = i as f64 / 10_000.0;
                let mu2 = dominant_mu2(&params, p2, lambda1);
                if mu2 > best.1 {
                    best = (p2, mu2);
                }
            }
            let opt = optimal_p2(&params, lambda1);
            assert!(
                (opt.p2 - best.0).abs() <= 2e-4,
                "lambda1 {lambda1}: closed form {} vs grid {}",
                opt.p2,
                best.0
            );
            assert_close(max_mu2(&params, lambda1), best.1, 1e-7);
        }
    }

    #[test]
    fn shape_classification() {
        assert_eq!(classify_shape(&presets::nonconvex()), RegionShape::NonConvex);
        assert_eq!(classify_shape(&presets::convex()), RegionShape::ConvexPolygon);
        assert_eq!(classify_shape(&presets::right_triangle()), RegionShape::RightTriangle);
    }

    #[test]
    fn closure_boundary_nonconvex_anchors() {
        let boundary = closure_boundary(&presets::nonconvex());
        assert_close(boundary.p_x.lambda1, 0.64, EXACT);
        assert_eq!(boundary.p_x.lambda2, 0.0);
        assert_close(boundary.p_y.lambda2, 0.504, EXACT);
        let BoundaryShape::CurvedThreeSegment { p1, p2 } = boundary.shape else {
            panic!("expected curved boundary");
        };
        assert_close(p1.lambda1, 0.21408426666666666, EXACT);
        assert_close(p1.lambda2, 0.278208, EXACT);
        assert_close(p2.lambda1, 0.384, EXACT);
        assert_close(p2.lambda2, 0.14608695652173914, EXACT);
        // Segment continuity at the joints.
        assert_close(boundary.frontier_lambda2(p1.lambda1 - 1e-12), p1.lambda2, 1e-9);
        assert_close(boundary.frontier_lambda2(p1.lambda1), p1.lambda2, 1e-9);
        assert_close(boundary.frontier_lambda2(p2.lambda1 - 1e-12), p2.lambda2, 1e-9);
        assert_close(boundary.frontier_lambda2(p2.lambda1), p2.lambda2, 1e-9);
    }

    #[test]
    fn closure_boundary_convex_anchors() {
        let boundary = closure_boundary(&presets::convex());
        assert_close(boundary.p_x.lambda1, 0.72, EXACT);
        assert_close(boundary.p_y.lambda2, 0.567, EXACT);
        let BoundaryShape::TwoLine { p3 } = boundary.shape else {
            panic!("expected two-line boundary");
        };
        assert_close(p3.lambda1, 0.43704, EXACT);
        assert_close(p3.lambda2, 0.33516, EXACT);
        assert_close(boundary.frontier_lambda2(p3.lambda1), p3.lambda2, 1e-9);
    }

    #[test]
    fn closure_boundary_degenerate_triangle() {
        let boundary = closure_boundary(&presets::right_triangle());
        let BoundaryShape::CurvedThreeSegment { p1, p2 } = boundary.shape else {
            panic!("the equality case keeps the curved description");
        };
        // The curve collapses to a single point.
        assert_close(p1.lambda1, p2.lambda1, EXACT);
        assert_close(p1.lambda2, p2.lambda2, EXACT);
        assert_close(p1.lambda1, 0.5, EXACT);
        assert_close(p1.lambda2, 0.5, EXACT);
    }

    #[test]
    fn closure_membership_examples() {
        let convex = presets::convex();
        assert!(closure_region_contains(&convex, ArrivalRates::new(0.43704 * 0.99, 0.33516 * 0.99)));
        assert!(!closure_region_contains(&convex, ArrivalRates::new(0.43704 * 1.01, 0.33516 * 1.01)));

        let nonconvex = presets::nonconvex();
        let mid = 0.29904213333333335;
        let on_curve = 0.2021354699049043;
        assert!(closure_region_contains(&nonconvex, ArrivalRates::new(mid, on_curve - 1e-6)));
        assert!(!closure_region_contains(&nonconvex, ArrivalRates::new(mid, on_curve + 1e-6)));
    }

    #[test]
    fn aloha_derived_values() {
        let d = aloha_derived(&presets::nonconvex());
        assert_close(d.q1_solo, 0.8, EXACT);
        assert_close(d.q1_multi, 0.104, EXACT);
        assert_close(d.gap1, 0.696, EXACT);
        assert_close(d.q2_solo, 0.63, EXACT);
        assert_close(d.q2_multi, 0.084, EXACT);
        assert_close(d.gap2, 0.546, EXACT);
        assert_close(d.gap1 / d.q1_solo + d.gap2 / d.q2_solo, 0.87 + 0.546 / 0.63, EXACT);
    }

    #[test]
    fn aloha_multi_with_never_good_interferer() {
        let mut params = presets::nonconvex();
        params.node2.pi_good = 0.0;
        let d = aloha_derived(&params);
        assert_close(d.q1_multi, 0.8 * 0.2, EXACT);
        // Node 2 can never succeed, so its gap collapses and the region
        // machinery refuses to run.
        assert_eq!(d.q2_solo, 0.0);
        let err = aloha_boundary(&params).unwrap_err();
        assert!(matches!(err, AnalysisError::NonPositiveGap { node: 2, .. }));
    }

    #[test]
    fn aloha_region_examples() {
        let params = presets::nonconvex();
        let boundary = aloha_boundary(&params).unwrap();
        assert_close(boundary.p_x.lambda1, 0.8, EXACT);
        assert_close(boundary.p_y.lambda2, 0.63, EXACT);
        assert!(matches!(boundary.shape, BoundaryShape::CurvedThreeSegment { .. }));
        assert!(aloha_region_contains(&params, ArrivalRates::new(0.0, 0.0)).unwrap());
        assert!(!aloha_region_contains(&params, ArrivalRates::new(0.8, 0.0)).unwrap());
    }

    #[test]
    fn lcq_membership_examples() {
        let params = presets::strong_mpr().scheduler_view();
        assert_close(lcq_subset_capacity(&params, &[0, 1]), 0.8964, EXACT);
        assert!(lcq_region_contains(&params, &[0.3, 0.3]).unwrap());
        assert!(lcq_region_contains(&params, &[0.0, 0.0]).unwrap());
        // The pair constraint binds: 0.58 + 0.33 = 0.91 > 0.8964.
        assert!(!lcq_region_contains(&params, &[0.522, 0.297]).unwrap());
    }

    #[test]
    fn lcq_node_cap_enforced() {
        let params = LcqSystemParams {
            nodes: vec![LcqNodeParams { pi_good: 0.5, eps_good: 0.1, q_solo: 0.9 }; 21],
        };
        let err = lcq_region_contains(&params, &[0.0; 21]).unwrap_err();
        assert!(matches!(err, AnalysisError::TooManyNodes { got: 21, max: 20 }));
    }

    #[test]
    fn lcq_two_node_polyline() {
        let params = presets::strong_mpr().scheduler_view();
        let verts = lcq_two_node_vertices(&params).unwrap();
        assert_eq!(verts.len(), 4);
        assert_close(verts[0].lambda2, 0.567, EXACT);
        assert_close(verts[1].lambda1, 0.23976, EXACT);
        assert_close(verts[2].lambda1, 0.648, EXACT);
        assert_close(verts[2].lambda2, 0.15876, EXACT);
        assert_eq!(verts[3].lambda2, 0.0);
    }

    #[test]
    fn subset_verdicts() {
        // Strong reception: random access reaches rates no single-node
        // scheduler can serve.
        assert!(!cara_subset_of_lcq(&presets::strong_mpr()));
        // Weak reception with poor estimation: the scheduler region wins.
        assert!(cara_subset_of_lcq(&presets::weak_mpr()));
        // Non-convex closure is always inside the scheduler region.
        assert!(cara_subset_of_lcq(&presets::nonconvex()));
    }
}
