//! Coupled sample-path comparison of the original system against its
//! dummy-packet dominant variant.
//!
//! Both systems run on the same arrival, channel, estimation, coin-toss and
//! reception draws, which the counter-based streams make exact: queue states
//! never influence the randomness. On such a coupling the dominant system's
//! queues can never fall below the original's, so any violation indicates a
//! coupling or protocol bug. A deliberately decoupled mode severs the shared
//! streams to exercise the detector.

use super::{PolicyKind, SimConfig, SimError, SimParams, TwoNodeEngine};

/// Salt applied to the dominant system's seed in decoupled mode.
const DECOUPLE_SALT: u64 = 0xDEC0_0B1E_0000_5EED;

/// First slot at which a dominant queue fell below its original counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DominanceViolation {
    pub slot: u64,
    pub node: usize,
    pub original: u64,
    pub dominant: u64,
}

/// Outcome of a coupled run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DominanceReport {
    /// Slots compared.
    pub slots: u64,
    /// True iff `Q_dominant >= Q_original` held per node at every slot.
    pub holds: bool,
    pub first_violation: Option<DominanceViolation>,
    /// Largest observed `Q_dominant - Q_original` over all nodes and slots.
    /// Zero means the two trajectories coincided throughout.
    pub max_gap: u64,
}

/// Run the original and dominant systems slot by slot on shared randomness
/// and verify the per-slot queue ordering.
///
/// The configs must be identical except for the policy: `original` runs the
/// plain channel-aware policy, `dominant` its dummy-packet variant. With
/// `decouple` set, the dominant system draws from independent streams, so
/// ordering violations become possible (and should be reported).
pub fn run_coupled_dominance(
    original: &SimConfig,
    dominant: &SimConfig,
    decouple: bool,
) -> Result<DominanceReport, SimError> {
    original.validate()?;
    dominant.validate()?;
    if original.policy != PolicyKind::Cara {
        return Err(SimError::CoupleMismatch(format!(
            "original system must run the plain policy, got {:?}",
            original.policy
        )));
    }
    if !matches!(dominant.policy, PolicyKind::CaraDominant { .. }) {
        return Err(SimError::CoupleMismatch(format!(
            "dominant system must run the dummy-packet policy, got {:?}",
            dominant.policy
        )));
    }
    let mut normalized = dominant.clone();
    normalized.policy = original.policy;
    if &normalized != original {
        return Err(SimError::CoupleMismatch(
            "configs differ beyond the policy field".into(),
        ));
    }
    let SimParams::TwoNode(params) = &original.params else {
        return Err(SimError::CoupleMismatch("dominance coupling is two-node only".into()));
    };

    let mut engine_orig = TwoNodeEngine::new(params, original)?;
    let mut config_dom = dominant.clone();
    if decouple {
        config_dom.seed ^= DECOUPLE_SALT;
    }
    let mut engine_dom = TwoNodeEngine::new(params, &config_dom)?;

    let mut first_violation = None;
    let mut max_gap = 0u64;
    for slot in 0..original.horizon {
        engine_orig.step(slot);
        engine_dom.step(slot);
        let q_orig = engine_orig.queues();
        let q_dom = engine_dom.queues();
        for node in 0..2 {
            if q_dom[node] < q_orig[node] {
                if first_violation.is_none() {
                    first_violation = Some(DominanceViolation {
                        slot,
                        node: node + 1,
                        original: q_orig[node],
                        dominant: q_dom[node],
                    });
                }
            } else {
                max_gap = max_gap.max(q_dom[node] - q_orig[node]);
            }
        }
    }

    Ok(DominanceReport {
        slots: original.horizon,
        holds: first_violation.is_none(),
        first_violation,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TransmitProbs;
    use crate::presets;

    fn pair(rates: (f64, f64), p: TransmitProbs, seed: u64) -> (SimConfig, SimConfig) {
        let original = SimConfig::two_node(
            presets::nonconvex(),
            PolicyKind::Cara,
            p,
            rates,
            20_000,
            seed,
        );
        let mut dominant = original.clone();
        dominant.policy = PolicyKind::CaraDominant { node: 2 };
        (original, dominant)
    }

    #[test]
    fn dominance_holds_across_seeds() {
        for seed in 0..5 {
            let (original, dominant) = pair((0.1, 0.1), TransmitProbs::new(0.5, 0.5), seed);
            let report = run_coupled_dominance(&original, &dominant, false).unwrap();
            assert!(report.holds, "seed {seed}: {:?}", report.first_violation);
            assert!(report.max_gap > 0, "dummy interference should cost something");
        }
    }

    #[test]
    fn no_arrivals_keeps_both_empty() {
        let (original, dominant) = pair((0.0, 0.0), TransmitProbs::new(0.5, 0.5), 1);
        let report = run_coupled_dominance(&original, &dominant, false).unwrap();
        assert!(report.holds);
        assert_eq!(report.max_gap, 0);
    }

    #[test]
    fn silent_nodes_stay_identical() {
        let (original, dominant) = pair((0.2, 0.2), TransmitProbs::new(0.0, 0.0), 2);
        let report = run_coupled_dominance(&original, &dominant, false).unwrap();
        assert!(report.holds);
        assert_eq!(report.max_gap, 0);
    }

    #[test]
    fn decoupled_streams_trip_the_detector() {
        // Independent randomness at a busy load: the original system's queue
        // overtakes the "dominant" one somewhere with near certainty.
        let (original, dominant) = pair((0.2, 0.15), TransmitProbs::new(0.5, 0.5), 3);
        let report = run_coupled_dominance(&original, &dominant, true).unwrap();
        assert!(!report.holds);
        let v = report.first_violation.unwrap();
        assert!(v.dominant < v.original);
    }

    #[test]
    fn mismatched_configs_are_rejected() {
        let (original, mut dominant) = pair((0.1, 0.1), TransmitProbs::new(0.5, 0.5), 4);
        dominant.seed += 1;
        assert!(matches!(
            run_coupled_dominance(&original, &dominant, false),
            Err(SimError::CoupleMismatch(_))
        ));
        let (original, dominant) = pair((0.1, 0.1), TransmitProbs::new(0.5, 0.5), 4);
        assert!(matches!(
            run_coupled_dominance(&dominant, &original, false),
            Err(SimError::CoupleMismatch(_))
        ));
    }
}
