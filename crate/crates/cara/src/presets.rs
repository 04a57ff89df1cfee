//! Canonical parameter settings used throughout the examples and test suite.
//!
//! Each preset is a fully valid [`SystemParams`] exercising a qualitatively
//! different regime of the region geometry.

use crate::model::{NodeChannelParams, ReceptionProbs2, SystemParams};

fn two_node(
    pi1: f64,
    pi2: f64,
    eps: f64,
    q1_solo: f64,
    q2_solo: f64,
    q_with_bad: f64,
    q_with_good: f64,
) -> SystemParams {
    SystemParams {
        node1: NodeChannelParams { pi_good: pi1, eps_good: eps, eps_bad: eps },
        node2: NodeChannelParams { pi_good: pi2, eps_good: eps, eps_bad: eps },
        reception: ReceptionProbs2 {
            q1_solo,
            q1_with_bad: q_with_bad,
            q1_with_good: q_with_good,
            q2_solo,
            q2_with_bad: q_with_bad,
            q2_with_good: q_with_good,
        },
    }
}

/// Weak multipacket reception and 20% estimation errors. The closure of the
/// stability region is non-convex: time sharing between the corner points
/// beats simultaneous transmission.
pub fn nonconvex() -> SystemParams {
    two_node(0.8, 0.7, 0.2, 1.0, 0.9, 0.2, 0.1)
}

/// Moderate multipacket reception and 10% estimation errors. The closure of
/// the stability region is a convex polygon.
pub fn convex() -> SystemParams {
    two_node(0.8, 0.7, 0.1, 1.0, 0.9, 0.5, 0.4)
}

/// Strong multipacket reception: simultaneous transmissions succeed almost as
/// often as solo ones. Random access can reach rate pairs a single-node-per-
/// slot scheduler cannot.
pub fn strong_mpr() -> SystemParams {
    two_node(0.8, 0.7, 0.1, 0.9, 0.9, 0.7, 0.6)
}

/// Weak multipacket reception with 30% estimation errors. The region is
/// convex and strictly inside the centralized-scheduler region.
pub fn weak_mpr() -> SystemParams {
    two_node(0.8, 0.7, 0.3, 0.9, 0.9, 0.4, 0.3)
}

/// Degenerate setting tuned so the convexity criterion sits exactly at the
/// boundary: the curved part of the frontier collapses to a single point and
/// the region is a right triangle.
pub fn right_triangle() -> SystemParams {
    SystemParams {
        node1: NodeChannelParams { pi_good: 1.0, eps_good: 0.0, eps_bad: 0.0 },
        node2: NodeChannelParams { pi_good: 1.0, eps_good: 0.0, eps_bad: 0.0 },
        reception: ReceptionProbs2 {
            q1_solo: 1.0,
            q1_with_bad: 0.75,
            q1_with_good: 0.5,
            q2_solo: 1.0,
            q2_with_bad: 0.75,
            q2_with_good: 0.5,
        },
    }
}
