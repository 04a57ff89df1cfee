//! Domain types and parameter validation shared by the analysis and
//! simulation layers.
//!
//! All probabilities are plain `f64` values. Validation never normalizes or
//! clamps: a field reads back exactly as supplied, and out-of-range inputs are
//! reported instead of being repaired. Range checks use a tolerance of
//! [`PROB_TOL`] so values produced by floating-point arithmetic (e.g. `1.0 -
//! eps`) are not rejected for being one ulp outside `[0, 1]`.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Tolerance applied to `[0, 1]` range checks.
pub const PROB_TOL: f64 = 1e-12;

/// Channel statistics and estimation error rates for one node.
///
/// `pi_good` is the stationary probability that the node's channel is in the
/// good state. `eps_good` is the probability that a good channel is estimated
/// as bad, `eps_bad` the probability that a bad channel is estimated as good.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeChannelParams {
    pub pi_good: f64,
    pub eps_good: f64,
    pub eps_bad: f64,
}

impl NodeChannelParams {
    pub fn pi_bad(&self) -> f64 {
        1.0 - self.pi_good
    }

    /// Probability that a good channel is also estimated as good.
    pub fn bar_eps_good(&self) -> f64 {
        1.0 - self.eps_good
    }

    pub fn bar_eps_bad(&self) -> f64 {
        1.0 - self.eps_bad
    }

    /// Probability that the channel is good *and* estimated as good. This is
    /// the rate at which the node is actually able to exploit its channel.
    pub fn gate(&self) -> f64 {
        self.pi_good * self.bar_eps_good()
    }
}

/// Reception probabilities for the two-node system.
///
/// `qi_solo` is the success probability when node `i` transmits alone on a
/// good channel. `qi_with_bad` / `qi_with_good` apply when the other node
/// transmits simultaneously with its channel in the bad / good state. A
/// transmission on one's own bad channel never succeeds, so no fields exist
/// for that case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceptionProbs2 {
    pub q1_solo: f64,
    pub q1_with_bad: f64,
    pub q1_with_good: f64,
    pub q2_solo: f64,
    pub q2_with_bad: f64,
    pub q2_with_good: f64,
}

/// Full parameter set for the two-node system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub node1: NodeChannelParams,
    pub node2: NodeChannelParams,
    pub reception: ReceptionProbs2,
}

impl SystemParams {
    /// Validate with the default (strict ordering) options.
    pub fn validate(&self) -> ValidationReport {
        validate(self, &ValidationOptions::default())
    }

    /// Swap the roles of the two nodes, including the reception fields.
    ///
    /// The stability results are symmetric under this relabeling, which makes
    /// it the natural tool for symmetry tests.
    pub fn swapped(&self) -> SystemParams {
        SystemParams {
            node1: self.node2,
            node2: self.node1,
            reception: ReceptionProbs2 {
                q1_solo: self.reception.q2_solo,
                q1_with_bad: self.reception.q2_with_bad,
                q1_with_good: self.reception.q2_with_good,
                q2_solo: self.reception.q1_solo,
                q2_with_bad: self.reception.q1_with_bad,
                q2_with_good: self.reception.q1_with_good,
            },
        }
    }

    /// The same system observed through a perfect estimator (all error rates
    /// zero). Channel statistics and reception probabilities are unchanged.
    pub fn with_perfect_csi(&self) -> SystemParams {
        let mut out = *self;
        out.node1.eps_good = 0.0;
        out.node1.eps_bad = 0.0;
        out.node2.eps_good = 0.0;
        out.node2.eps_bad = 0.0;
        out
    }

    /// Project onto the parameters a centralized scheduler cares about:
    /// per-node channel statistics, good-state estimation error, and the solo
    /// reception probability.
    pub fn scheduler_view(&self) -> LcqSystemParams {
        LcqSystemParams {
            nodes: vec![
                LcqNodeParams {
                    pi_good: self.node1.pi_good,
                    eps_good: self.node1.eps_good,
                    q_solo: self.reception.q1_solo,
                },
                LcqNodeParams {
                    pi_good: self.node2.pi_good,
                    eps_good: self.node2.eps_good,
                    q_solo: self.reception.q2_solo,
                },
            ],
        }
    }
}

/// Transmission probabilities of the two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmitProbs {
    pub p1: f64,
    pub p2: f64,
}

impl TransmitProbs {
    pub fn new(p1: f64, p2: f64) -> Self {
        Self { p1, p2 }
    }
}

/// Bernoulli arrival rates of the two nodes, in packets per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalRates {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl ArrivalRates {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2 }
    }
}

/// Per-node parameters for the centralized scheduler model, which supports an
/// arbitrary number of nodes. Only the solo reception probability matters
/// because the scheduler grants the slot to a single node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcqNodeParams {
    pub pi_good: f64,
    pub eps_good: f64,
    pub q_solo: f64,
}

impl LcqNodeParams {
    /// Probability the node is connected: channel good and estimated good.
    pub fn gate(&self) -> f64 {
        self.pi_good * (1.0 - self.eps_good)
    }
}

/// Parameter set for the centralized scheduler model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcqSystemParams {
    pub nodes: Vec<LcqNodeParams>,
}

impl LcqSystemParams {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.nodes.is_empty() {
            report.push("nodes", "at least one node is required");
        }
        for (i, n) in self.nodes.iter().enumerate() {
            check_prob(&mut report, &format!("nodes[{i}].pi_good"), n.pi_good);
            check_prob(&mut report, &format!("nodes[{i}].eps_good"), n.eps_good);
            check_prob(&mut report, &format!("nodes[{i}].q_solo"), n.q_solo);
        }
        report
    }
}

/// Options controlling [`validate`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    /// Permit equality in the reception-probability ordering
    /// `q_solo > q_with_bad > q_with_good`. The strict ordering is part of the
    /// model, but degenerate inputs (equal probabilities, zero interference)
    /// are useful for exercising edge cases.
    pub allow_degenerate: bool,
}

/// One violated invariant, identified by field name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

/// Outcome of a validation pass. Empty means the parameters are usable.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: &str, message: &str) {
        self.violations.push(Violation {
            field: field.to_string(),
            message: message.to_string(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

fn check_prob(report: &mut ValidationReport, field: &str, value: f64) {
    if !value.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&value) {
        report.push(field, &format!("must be a probability in [0, 1], got {value}"));
    }
}

/// Check every invariant of a [`SystemParams`] and report the violations.
///
/// This is a pure function: the same input always yields the same report, and
/// the input is never modified.
pub fn validate(params: &SystemParams, opts: &ValidationOptions) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (prefix, node) in [("node1", &params.node1), ("node2", &params.node2)] {
        check_prob(&mut report, &format!("{prefix}.pi_good"), node.pi_good);
        check_prob(&mut report, &format!("{prefix}.eps_good"), node.eps_good);
        check_prob(&mut report, &format!("{prefix}.eps_bad"), node.eps_bad);
    }
    let r = &params.reception;
    for (field, value) in [
        ("reception.q1_solo", r.q1_solo),
        ("reception.q1_with_bad", r.q1_with_bad),
        ("reception.q1_with_good", r.q1_with_good),
        ("reception.q2_solo", r.q2_solo),
        ("reception.q2_with_bad", r.q2_with_bad),
        ("reception.q2_with_good", r.q2_with_good),
    ] {
        check_prob(&mut report, field, value);
    }
    let chains = [
        ("reception.q1", r.q1_solo, r.q1_with_bad, r.q1_with_good),
        ("reception.q2", r.q2_solo, r.q2_with_bad, r.q2_with_good),
    ];
    for (field, solo, with_bad, with_good) in chains {
        let ordered = if opts.allow_degenerate {
            solo >= with_bad && with_bad >= with_good
        } else {
            solo > with_bad && with_bad > with_good
        };
        if !ordered {
            let rel = if opts.allow_degenerate { ">=" } else { ">" };
            report.push(
                field,
                &format!(
                    "expected solo {rel} with_bad {rel} with_good, got {solo} / {with_bad} / {with_good}"
                ),
            );
        }
    }
    report
}
