//! Slotted-time Monte-Carlo simulator of the random-access system.
//!
//! A run executes the exact slot structure of the model: draw true channel
//! states, draw noisy estimates, let the policy pick transmitters, resolve
//! receptions, then apply the queue recursion
//! `Q(n+1) = max(Q(n) - served, 0) + arrived`. Four transmission disciplines
//! are supported: decentralized channel-aware random access, its dominant
//! variant where one node keeps transmitting dummy packets while empty, plain
//! no-CSI random access, and the centralized longest-connected-queue
//! scheduler.
//!
//! All randomness is counter-based (see [`rng`]): a run is a pure function of
//! its config, and two configs sharing a seed share every stream, which makes
//! coupled comparisons exact.

pub mod rng;

mod dominance;

pub use dominance::{run_coupled_dominance, DominanceReport, DominanceViolation};

use crate::model::{LcqSystemParams, SystemParams, TransmitProbs};
use rng::{Purpose, Stream, Streams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default queue cap: a run whose queue passes this is declared unstable.
pub const DEFAULT_QUEUE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("coupled runs must differ only in policy: {0}")]
    CoupleMismatch(String),
}

/// Transmission discipline driving the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Transmit with probability `p_i` when the channel is estimated good and
    /// the queue is non-empty.
    Cara,
    /// Same as `Cara`, but the given node (1-based) transmits dummy packets
    /// on estimated-good slots even when its queue is empty.
    CaraDominant { node: u8 },
    /// Transmit with probability `p_i` whenever the queue is non-empty,
    /// ignoring channel estimates.
    Aloha,
    /// Centralized scheduler: serve the longest queue among nodes whose
    /// channel is good and correctly estimated. Requires scheduler params.
    Lcq,
}

/// Temporal structure of the true channel process. The stationary
/// probabilities always come from the system parameters; this only chooses
/// how states correlate across slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelProcessSpec {
    /// Fresh stationary draw every slot.
    IidStationary,
    /// Two-state Markov chain per node. `persistence` in `[0, 1)` is the
    /// extra probability of holding the current state; zero reduces to the
    /// i.i.d. case with identical draws. The transition matrix is solved from
    /// (stationary probability, persistence), so the marginals are unchanged.
    TwoStateMarkov { persistence: Vec<f64> },
}

impl ChannelProcessSpec {
    fn persistence_for(&self, nodes: usize) -> Result<Vec<f64>, SimError> {
        match self {
            ChannelProcessSpec::IidStationary => Ok(vec![0.0; nodes]),
            ChannelProcessSpec::TwoStateMarkov { persistence } => {
                if persistence.len() != nodes {
                    return Err(SimError::InvalidConfig(format!(
                        "persistence has {} entries for {} nodes",
                        persistence.len(),
                        nodes
                    )));
                }
                for &h in persistence {
                    if !(0.0..1.0).contains(&h) {
                        return Err(SimError::InvalidConfig(format!(
                            "persistence must lie in [0, 1), got {h}"
                        )));
                    }
                }
                Ok(persistence.clone())
            }
        }
    }
}

/// Which parameter set a config carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimParams {
    TwoNode(SystemParams),
    Lcq(LcqSystemParams),
}

impl SimParams {
    pub fn node_count(&self) -> usize {
        match self {
            SimParams::TwoNode(_) => 2,
            SimParams::Lcq(p) => p.len(),
        }
    }
}

/// Thresholds for the finite-horizon stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerdictThresholds {
    /// Queue-growth slope (packets/slot) treated as flat.
    pub slope_tol: f64,
    /// Minimum emptiness fraction for a flat queue to count as stable.
    pub empty_min: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds { slope_tol: 1e-4, empty_min: 0.01 }
    }
}

/// A reproducible simulation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: SimParams,
    pub policy: PolicyKind,
    /// Transmit probabilities; ignored by the centralized scheduler.
    pub p: TransmitProbs,
    /// Per-node arrival rates, one entry per node.
    pub rates: Vec<f64>,
    pub channel: ChannelProcessSpec,
    pub horizon: u64,
    pub warmup: u64,
    pub seed: u64,
    pub queue_cap: u64,
    pub thresholds: VerdictThresholds,
}

impl SimConfig {
    /// Two-node config with the defaults: i.i.d. channels, 1% warmup,
    /// default queue cap and verdict thresholds.
    pub fn two_node(
        params: SystemParams,
        policy: PolicyKind,
        p: TransmitProbs,
        rates: (f64, f64),
        horizon: u64,
        seed: u64,
    ) -> Self {
        SimConfig {
            params: SimParams::TwoNode(params),
            policy,
            p,
            rates: vec![rates.0, rates.1],
            channel: ChannelProcessSpec::IidStationary,
            horizon,
            warmup: horizon / 100,
            seed,
            queue_cap: DEFAULT_QUEUE_CAP,
            thresholds: VerdictThresholds::default(),
        }
    }

    /// Centralized-scheduler config with the same defaults.
    pub fn lcq(params: LcqSystemParams, rates: Vec<f64>, horizon: u64, seed: u64) -> Self {
        SimConfig {
            params: SimParams::Lcq(params),
            policy: PolicyKind::Lcq,
            p: TransmitProbs::new(0.0, 0.0),
            rates,
            channel: ChannelProcessSpec::IidStationary,
            horizon,
            warmup: horizon / 100,
            seed,
            queue_cap: DEFAULT_QUEUE_CAP,
            thresholds: VerdictThresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.horizon == 0 || self.horizon <= self.warmup {
            return fail(format!(
                "horizon ({}) must exceed warmup ({})",
                self.horizon, self.warmup
            ));
        }
        if self.queue_cap == 0 {
            return fail("queue_cap must be positive".into());
        }
        let nodes = self.params.node_count();
        if self.rates.len() != nodes {
            return fail(format!("{} rates given for {} nodes", self.rates.len(), nodes));
        }
        for &r in &self.rates {
            if !(0.0..=1.0).contains(&r) {
                return fail(format!("arrival rate {r} outside [0, 1]"));
            }
        }
        match (&self.params, self.policy) {
            (SimParams::TwoNode(params), policy) => {
                if policy == PolicyKind::Lcq {
                    return fail("the scheduler policy needs scheduler params".into());
                }
                if let PolicyKind::CaraDominant { node } = policy {
                    if !(1..=2).contains(&node) {
                        return fail(format!("dominant node must be 1 or 2, got {node}"));
                    }
                }
                for p in [self.p.p1, self.p.p2] {
                    if !(0.0..=1.0).contains(&p) {
                        return fail(format!("transmit probability {p} outside [0, 1]"));
                    }
                }
                let report = crate::model::validate(
                    params,
                    &crate::model::ValidationOptions { allow_degenerate: true },
                );
                if !report.is_ok() {
                    return fail(format!("system params: {report}"));
                }
            }
            (SimParams::Lcq(params), PolicyKind::Lcq) => {
                let report = params.validate();
                if !report.is_ok() {
                    return fail(format!("scheduler params: {report}"));
                }
            }
            (SimParams::Lcq(_), other) => {
                return fail(format!("policy {other:?} needs two-node params"));
            }
        }
        self.channel.persistence_for(nodes)?;
        Ok(())
    }
}

/// Finite-horizon stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

/// Measured outcomes for one node, over the post-warmup window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeStats {
    /// Arrivals per slot.
    pub arrival_rate: f64,
    /// Service rate seen by the queue. For a dummy-transmitting node this is
    /// the per-slot success rate of its transmissions (dummies included,
    /// since every success would have served a backlogged queue); for all
    /// other nodes it is departures per backlogged slot.
    pub service_rate: f64,
    /// Fraction of slots that began with an empty queue.
    pub empty_fraction: f64,
    /// Mean queue length at slot starts.
    pub mean_queue: f64,
    /// Least-squares slope of queue length over the window, packets/slot.
    pub queue_slope: f64,
    pub verdict: Verdict,
    /// Whole-run totals for the conservation identity
    /// `arrivals = departures + final_queue`.
    pub arrivals: u64,
    pub departures: u64,
    pub final_queue: u64,
}

/// Point where a queue crossed the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CapHit {
    pub node: usize,
    pub slot: u64,
}

/// Result of a completed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStats {
    pub nodes: Vec<NodeStats>,
    pub verdict: Verdict,
    /// Post-warmup slots that entered the statistics.
    pub observed_slots: u64,
    /// Slots actually simulated (smaller than the horizon after a cap hit).
    pub simulated_slots: u64,
    pub cap_hit: Option<CapHit>,
}

/// Verdict for one node from its measured slope and emptiness.
pub fn node_verdict(
    queue_slope: f64,
    empty_fraction: f64,
    hit_cap: bool,
    t: &VerdictThresholds,
) -> Verdict {
    if hit_cap || queue_slope > t.slope_tol {
        Verdict::Unstable
    } else if queue_slope < -t.slope_tol
        || (queue_slope.abs() <= t.slope_tol && empty_fraction > t.empty_min)
    {
        Verdict::Stable
    } else {
        Verdict::Inconclusive
    }
}

/// Re-derive the verdict of a completed run under different thresholds.
pub fn stability_verdict(stats: &SimStats, thresholds: &VerdictThresholds) -> Verdict {
    let verdicts = stats.nodes.iter().enumerate().map(|(i, n)| {
        let hit = stats.cap_hit.map(|c| c.node == i).unwrap_or(false);
        node_verdict(n.queue_slope, n.empty_fraction, hit, thresholds)
    });
    aggregate_verdict(verdicts)
}

fn aggregate_verdict(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut all_stable = true;
    for v in verdicts {
        match v {
            Verdict::Unstable => return Verdict::Unstable,
            Verdict::Inconclusive => all_stable = false,
            Verdict::Stable => {}
        }
    }
    if all_stable {
        Verdict::Stable
    } else {
        Verdict::Inconclusive
    }
}

/// Everything that happened in one slot. Queue lengths are those at the slot
/// start, before service and arrivals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRecord {
    pub slot: u64,
    pub queues_start: Vec<u64>,
    pub channel_good: Vec<bool>,
    pub estimate_good: Vec<bool>,
    pub transmitted: Vec<bool>,
    /// Transmission made from an empty queue (dominant node only).
    pub dummy: Vec<bool>,
    pub succeeded: Vec<bool>,
    pub departed: Vec<bool>,
    pub arrived: Vec<bool>,
}

/// Bounded per-slot trace for protocol assertions and debugging.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SlotTrace {
    pub slots: Vec<SlotRecord>,
}

/// Execute a run and return its statistics.
pub fn run(config: &SimConfig) -> Result<SimStats, SimError> {
    run_impl(config, 0).map(|(stats, _)| stats)
}

/// Execute a run, additionally recording the first `max_trace_slots` slots.
pub fn run_with_trace(
    config: &SimConfig,
    max_trace_slots: u64,
) -> Result<(SimStats, SlotTrace), SimError> {
    run_impl(config, max_trace_slots)
}

fn run_impl(config: &SimConfig, trace_slots: u64) -> Result<(SimStats, SlotTrace), SimError> {
    config.validate()?;
    match &config.params {
        SimParams::TwoNode(params) => {
            let mut engine = TwoNodeEngine::new(params, config)?;
            drive(config, 2, trace_slots, |slot| engine.step(slot))
        }
        SimParams::Lcq(params) => {
            let mut engine = LcqEngine::new(params, config)?;
            drive(config, params.len(), trace_slots, |slot| engine.step(slot))
        }
    }
}

/// One slot's outcome, as slices indexed by node.
struct SlotOutcome {
    queues_start: Vec<u64>,
    queues_end: Vec<u64>,
    channel_good: Vec<bool>,
    estimate_good: Vec<bool>,
    transmitted: Vec<bool>,
    dummy: Vec<bool>,
    succeeded: Vec<bool>,
    departed: Vec<bool>,
    arrived: Vec<bool>,
}

fn drive(
    config: &SimConfig,
    nodes: usize,
    trace_slots: u64,
    mut step: impl FnMut(u64) -> SlotOutcome,
) -> Result<(SimStats, SlotTrace), SimError> {
    let dominant = match config.policy {
        PolicyKind::CaraDominant { node } => Some(node as usize - 1),
        _ => None,
    };
    let mut acc = vec![NodeAccum::default(); nodes];
    let mut trace = SlotTrace::default();
    let mut cap_hit = None;
    let mut simulated = 0u64;
    let mut final_queues = vec![0u64; nodes];

    'slots: for slot in 0..config.horizon {
        let out = step(slot);
        simulated = slot + 1;
        if slot < trace_slots {
            trace.slots.push(SlotRecord {
                slot,
                queues_start: out.queues_start.clone(),
                channel_good: out.channel_good.clone(),
                estimate_good: out.estimate_good.clone(),
                transmitted: out.transmitted.clone(),
                dummy: out.dummy.clone(),
                succeeded: out.succeeded.clone(),
                departed: out.departed.clone(),
                arrived: out.arrived.clone(),
            });
        }
        let observe = slot >= config.warmup;
        for (i, a) in acc.iter_mut().enumerate() {
            a.arrivals_total += out.arrived[i] as u64;
            a.departures_total += out.departed[i] as u64;
            if observe {
                let idx = a.observed as f64;
                a.observed += 1;
                a.arrivals_obs += out.arrived[i] as u64;
                a.departures_obs += out.departed[i] as u64;
                a.successes_obs += out.succeeded[i] as u64;
                if out.queues_start[i] == 0 {
                    a.empty_obs += 1;
                } else {
                    a.busy_obs += 1;
                }
                let q = out.queues_start[i] as f64;
                a.queue_sum += q;
                a.t_queue_sum += idx * q;
            }
        }
        final_queues.copy_from_slice(&out.queues_end);
        for i in 0..nodes {
            if out.queues_end[i] > config.queue_cap {
                cap_hit = Some(CapHit { node: i, slot });
                break 'slots;
            }
        }
    }

    let node_stats: Vec<NodeStats> = acc
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let slope = a.slope();
            let empty_fraction = a.ratio(a.empty_obs, a.observed);
            let service_rate = if dominant == Some(i) {
                a.ratio(a.successes_obs, a.observed)
            } else {
                a.ratio(a.departures_obs, a.busy_obs)
            };
            let hit = cap_hit.map(|c| c.node == i).unwrap_or(false);
            NodeStats {
                arrival_rate: a.ratio(a.arrivals_obs, a.observed),
                service_rate,
                empty_fraction,
                mean_queue: if a.observed > 0 { a.queue_sum / a.observed as f64 } else { 0.0 },
                queue_slope: slope,
                verdict: node_verdict(slope, empty_fraction, hit, &config.thresholds),
                arrivals: a.arrivals_total,
                departures: a.departures_total,
                final_queue: final_queues[i],
            }
        })
        .collect();

    let verdict = aggregate_verdict(node_stats.iter().map(|n| n.verdict));
    let observed_slots = acc.first().map(|a| a.observed).unwrap_or(0);
    Ok((
        SimStats { nodes: node_stats, verdict, observed_slots, simulated_slots: simulated, cap_hit },
        trace,
    ))
}

#[derive(Debug, Clone, Copy, Default)]
struct NodeAccum {
    arrivals_total: u64,
    departures_total: u64,
    observed: u64,
    arrivals_obs: u64,
    departures_obs: u64,
    successes_obs: u64,
    busy_obs: u64,
    empty_obs: u64,
    queue_sum: f64,
    t_queue_sum: f64,
}

impl NodeAccum {
    fn ratio(&self, num: u64, den: u64) -> f64 {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    }

    /// Least-squares slope of queue length against the slot index.
    fn slope(&self) -> f64 {
        let m = self.observed as f64;
        if self.observed < 2 {
            return 0.0;
        }
        let t_mean = (m - 1.0) / 2.0;
        let s_ty = self.t_queue_sum - t_mean * self.queue_sum;
        let s_tt = m * (m * m - 1.0) / 12.0;
        s_ty / s_tt
    }
}

/// Per-node streams bundle.
struct NodeStreams {
    arrival: Stream,
    channel: Stream,
    estimate: Stream,
    tx_coin: Stream,
    reception: Stream,
}

impl NodeStreams {
    fn new(streams: &Streams, node: u32) -> Self {
        NodeStreams {
            arrival: streams.stream(Purpose::Arrival, node),
            channel: streams.stream(Purpose::Channel, node),
            estimate: streams.stream(Purpose::Estimate, node),
            tx_coin: streams.stream(Purpose::TxCoin, node),
            reception: streams.stream(Purpose::Reception, node),
        }
    }

    /// Stationary-respecting channel draw: with persistence `h` the current
    /// state is held with extra probability `h`, otherwise redrawn from the
    /// stationary law. Slot 0 always draws stationary.
    fn channel_draw(&self, slot: u64, pi_good: f64, persistence: f64, prev_good: bool) -> bool {
        let p_good = if slot == 0 {
            pi_good
        } else if prev_good {
            persistence + (1.0 - persistence) * pi_good
        } else {
            (1.0 - persistence) * pi_good
        };
        self.channel.unit(slot) < p_good
    }

    fn estimate_draw(&self, slot: u64, channel_good: bool, eps_good: f64, eps_bad: f64) -> bool {
        let u = self.estimate.unit(slot);
        if channel_good {
            u >= eps_good
        } else {
            u < eps_bad
        }
    }
}

pub(crate) struct TwoNodeEngine {
    nodes: [crate::model::NodeChannelParams; 2],
    reception: crate::model::ReceptionProbs2,
    policy: PolicyKind,
    p: [f64; 2],
    rates: [f64; 2],
    persistence: [f64; 2],
    streams: [NodeStreams; 2],
    queues: [u64; 2],
    prev_channel: [bool; 2],
}

impl TwoNodeEngine {
    pub(crate) fn new(params: &SystemParams, config: &SimConfig) -> Result<Self, SimError> {
        let persistence = config.channel.persistence_for(2)?;
        let streams = Streams::new(config.seed);
        Ok(TwoNodeEngine {
            nodes: [params.node1, params.node2],
            reception: params.reception,
            policy: config.policy,
            p: [config.p.p1, config.p.p2],
            rates: [config.rates[0], config.rates[1]],
            persistence: [persistence[0], persistence[1]],
            streams: [NodeStreams::new(&streams, 0), NodeStreams::new(&streams, 1)],
            queues: [0, 0],
            prev_channel: [false, false],
        })
    }

    pub(crate) fn queues(&self) -> [u64; 2] {
        self.queues
    }

    fn step(&mut self, slot: u64) -> SlotOutcome {
        let queues_start = self.queues;
        let mut channel_good = [false; 2];
        let mut estimate_good = [false; 2];
        for i in 0..2 {
            let node = &self.nodes[i];
            channel_good[i] = self.streams[i].channel_draw(
                slot,
                node.pi_good,
                self.persistence[i],
                self.prev_channel[i],
            );
            estimate_good[i] =
                self.streams[i].estimate_draw(slot, channel_good[i], node.eps_good, node.eps_bad);
        }
        self.prev_channel = channel_good;

        let mut transmitted = [false; 2];
        let mut dummy = [false; 2];
        for i in 0..2 {
            let coin = self.streams[i].tx_coin.unit(slot) < self.p[i];
            let backlogged = queues_start[i] > 0;
            transmitted[i] = match self.policy {
                PolicyKind::Cara => coin && estimate_good[i] && backlogged,
                PolicyKind::CaraDominant { node } => {
                    let always_on = node as usize == i + 1;
                    coin && estimate_good[i] && (backlogged || always_on)
                }
                PolicyKind::Aloha => coin && backlogged,
                PolicyKind::Lcq => unreachable!("two-node engine never runs the scheduler"),
            };
            dummy[i] = transmitted[i] && !backlogged;
        }

        let mut succeeded = [false; 2];
        for i in 0..2 {
            if !transmitted[i] || !channel_good[i] {
                continue;
            }
            let other = 1 - i;
            let r = &self.reception;
            let q = if transmitted[other] {
                match (i, channel_good[other]) {
                    (0, true) => r.q1_with_good,
                    (0, false) => r.q1_with_bad,
                    (1, true) => r.q2_with_good,
                    _ => r.q2_with_bad,
                }
            } else if i == 0 {
                r.q1_solo
            } else {
                r.q2_solo
            };
            succeeded[i] = self.streams[i].reception.unit(slot) < q;
        }

        let mut departed = [false; 2];
        let mut arrived = [false; 2];
        for i in 0..2 {
            departed[i] = succeeded[i] && queues_start[i] > 0;
            if departed[i] {
                self.queues[i] -= 1;
            }
            arrived[i] = self.streams[i].arrival.unit(slot) < self.rates[i];
            if arrived[i] {
                self.queues[i] += 1;
            }
        }

        SlotOutcome {
            queues_start: queues_start.to_vec(),
            queues_end: self.queues.to_vec(),
            channel_good: channel_good.to_vec(),
            estimate_good: estimate_good.to_vec(),
            transmitted: transmitted.to_vec(),
            dummy: dummy.to_vec(),
            succeeded: succeeded.to_vec(),
            departed: departed.to_vec(),
            arrived: arrived.to_vec(),
        }
    }
}

struct LcqEngine<'a> {
    params: &'a LcqSystemParams,
    rates: Vec<f64>,
    persistence: Vec<f64>,
    streams: Vec<NodeStreams>,
    tie_break: Stream,
    queues: Vec<u64>,
    prev_channel: Vec<bool>,
}

impl<'a> LcqEngine<'a> {
    fn new(params: &'a LcqSystemParams, config: &SimConfig) -> Result<Self, SimError> {
        let n = params.len();
        let persistence = config.channel.persistence_for(n)?;
        let streams = Streams::new(config.seed);
        Ok(LcqEngine {
            params,
            rates: config.rates.clone(),
            persistence,
            streams: (0..n).map(|i| NodeStreams::new(&streams, i as u32)).collect(),
            tie_break: streams.stream(Purpose::TieBreak, 0),
            queues: vec![0; n],
            prev_channel: vec![false; n],
        })
    }

    fn step(&mut self, slot: u64) -> SlotOutcome {
        let n = self.params.len();
        let queues_start = self.queues.clone();
        let mut channel_good = vec![false; n];
        let mut estimate_good = vec![false; n];
        for i in 0..n {
            let node = &self.params.nodes[i];
            channel_good[i] = self.streams[i].channel_draw(
                slot,
                node.pi_good,
                self.persistence[i],
                self.prev_channel[i],
            );
            // A bad channel is never reported good to the scheduler; only the
            // good-state miss rate matters for connectivity.
            estimate_good[i] =
                channel_good[i] && self.streams[i].estimate.unit(slot) >= node.eps_good;
        }
        self.prev_channel.copy_from_slice(&channel_good);

        // Longest connected backlogged queue, uniform tie-break.
        let mut best_len = 0u64;
        let mut candidates: Vec<usize> = Vec::new();
        for i in 0..n {
            if estimate_good[i] && queues_start[i] > 0 {
                if queues_start[i] > best_len {
                    best_len = queues_start[i];
                    candidates.clear();
                    candidates.push(i);
                } else if queues_start[i] == best_len {
                    candidates.push(i);
                }
            }
        }
        let scheduled = match candidates.len() {
            0 => None,
            1 => Some(candidates[0]),
            k => Some(candidates[self.tie_break.pick(slot, k as u32) as usize]),
        };

        let mut transmitted = vec![false; n];
        let mut succeeded = vec![false; n];
        if let Some(i) = scheduled {
            transmitted[i] = true;
            succeeded[i] = self.streams[i].reception.unit(slot) < self.params.nodes[i].q_solo;
        }

        let mut departed = vec![false; n];
        let mut arrived = vec![false; n];
        for i in 0..n {
            departed[i] = succeeded[i] && queues_start[i] > 0;
            if departed[i] {
                self.queues[i] -= 1;
            }
            arrived[i] = self.streams[i].arrival.unit(slot) < self.rates[i];
            if arrived[i] {
                self.queues[i] += 1;
            }
        }

        SlotOutcome {
            queues_start,
            queues_end: self.queues.clone(),
            channel_good,
            estimate_good,
            transmitted,
            dummy: vec![false; n],
            succeeded,
            departed,
            arrived,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn base_config() -> SimConfig {
        SimConfig::two_node(
            presets::nonconvex(),
            PolicyKind::Cara,
            TransmitProbs::new(0.5, 0.5),
            (0.1, 0.05),
            50_000,
            7,
        )
    }

    #[test]
    fn identical_configs_yield_identical_stats() {
        let config = base_config();
        assert_eq!(run(&config).unwrap(), run(&config).unwrap());
    }

    #[test]
    fn changing_rates_keeps_channel_streams() {
        let mut a = base_config();
        a.horizon = 5_000;
        a.warmup = 0;
        let mut b = a.clone();
        b.rates = vec![0.4, 0.3];
        let (_, trace_a) = run_with_trace(&a, 5_000).unwrap();
        let (_, trace_b) = run_with_trace(&b, 5_000).unwrap();
        for (ra, rb) in trace_a.slots.iter().zip(&trace_b.slots) {
            assert_eq!(ra.channel_good, rb.channel_good);
            assert_eq!(ra.estimate_good, rb.estimate_good);
        }
    }

    #[test]
    fn conservation_identity_holds_exactly() {
        for seed in 0..5 {
            let mut config = base_config();
            config.seed = seed;
            config.rates = vec![0.25, 0.2];
            let stats = run(&config).unwrap();
            for node in &stats.nodes {
                assert_eq!(node.arrivals, node.departures + node.final_queue);
            }
        }
    }

    #[test]
    fn no_arrivals_means_empty_queues_and_stable() {
        let mut config = base_config();
        config.rates = vec![0.0, 0.0];
        let stats = run(&config).unwrap();
        assert_eq!(stats.verdict, Verdict::Stable);
        for node in &stats.nodes {
            assert_eq!(node.arrivals, 0);
            assert_eq!(node.final_queue, 0);
            assert_eq!(node.empty_fraction, 1.0);
            assert_eq!(node.mean_queue, 0.0);
        }
    }

    #[test]
    fn protocol_guards_on_trace() {
        let mut config = base_config();
        config.policy = PolicyKind::CaraDominant { node: 2 };
        config.horizon = 20_000;
        config.warmup = 0;
        let (_, trace) = run_with_trace(&config, 20_000).unwrap();
        let mut saw_dummy = false;
        for rec in &trace.slots {
            for i in 0..2 {
                if rec.succeeded[i] {
                    assert!(rec.transmitted[i], "success without transmission");
                    assert!(rec.channel_good[i], "success on a bad channel");
                }
                if rec.transmitted[i] {
                    assert!(rec.estimate_good[i], "transmission on estimated-bad slot");
                    if rec.queues_start[i] == 0 {
                        assert!(i == 1 && rec.dummy[i], "empty-queue transmission by node {i}");
                        saw_dummy = true;
                    }
                }
                if rec.dummy[i] {
                    assert!(!rec.departed[i], "dummy success drained the queue");
                }
            }
        }
        assert!(saw_dummy, "dominant node never sent a dummy packet");
    }

    #[test]
    fn aloha_ignores_estimates() {
        let mut config = base_config();
        config.policy = PolicyKind::Aloha;
        config.rates = vec![0.3, 0.3];
        config.horizon = 20_000;
        config.warmup = 0;
        let (_, trace) = run_with_trace(&config, 20_000).unwrap();
        let mut est_bad_tx = 0u32;
        for rec in &trace.slots {
            for i in 0..2 {
                if rec.transmitted[i] {
                    assert!(rec.queues_start[i] > 0);
                    if !rec.estimate_good[i] {
                        est_bad_tx += 1;
                    }
                }
            }
        }
        assert!(est_bad_tx > 0, "no-CSI policy should transmit on estimated-bad slots");
    }

    #[test]
    fn lcq_schedules_one_connected_node() {
        let params = presets::strong_mpr().scheduler_view();
        let mut config = SimConfig::lcq(params, vec![0.3, 0.3], 20_000, 3);
        config.warmup = 0;
        let (stats, trace) = run_with_trace(&config, 20_000).unwrap();
        for rec in &trace.slots {
            let tx: Vec<usize> = (0..2).filter(|&i| rec.transmitted[i]).collect();
            assert!(tx.len() <= 1, "scheduler transmitted {} nodes", tx.len());
            if let [i] = tx[..] {
                assert!(rec.channel_good[i] && rec.estimate_good[i] && rec.queues_start[i] > 0);
                // The scheduled queue is the longest connected backlogged one.
                for j in 0..2 {
                    if j != i && rec.estimate_good[j] && rec.queues_start[j] > 0 {
                        assert!(rec.queues_start[j] <= rec.queues_start[i]);
                    }
                }
            }
        }
        assert_eq!(stats.verdict, Verdict::Stable);
    }

    #[test]
    fn queue_cap_short_circuits_to_unstable() {
        let mut config = base_config();
        config.rates = vec![1.0, 0.0];
        config.p = TransmitProbs::new(0.0, 0.0);
        config.queue_cap = 100;
        let stats = run(&config).unwrap();
        let hit = stats.cap_hit.expect("cap must be reached");
        assert_eq!(hit.node, 0);
        assert_eq!(stats.verdict, Verdict::Unstable);
        assert!(stats.simulated_slots < config.horizon);
        assert_eq!(stats.nodes[0].verdict, Verdict::Unstable);
    }

    #[test]
    fn verdict_rules() {
        let t = VerdictThresholds::default();
        assert_eq!(node_verdict(-0.05, 0.4, false, &t), Verdict::Stable);
        assert_eq!(node_verdict(0.02, 0.0, false, &t), Verdict::Unstable);
        assert_eq!(node_verdict(5e-5, 0.005, false, &t), Verdict::Inconclusive);
        assert_eq!(node_verdict(0.0, 0.5, true, &t), Verdict::Unstable);
        assert_eq!(node_verdict(0.0, 0.5, false, &t), Verdict::Stable);
    }

    #[test]
    fn verdict_recomputable_under_new_thresholds() {
        let stats = run(&base_config()).unwrap();
        assert_eq!(stats.verdict, Verdict::Stable);
        assert_eq!(stability_verdict(&stats, &VerdictThresholds::default()), stats.verdict);
        // An unreachable emptiness requirement pushes flat queues into the
        // dead band.
        let strict = VerdictThresholds { slope_tol: 1e-4, empty_min: 1.5 };
        assert_eq!(stability_verdict(&stats, &strict), Verdict::Inconclusive);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut config = base_config();
        config.warmup = config.horizon;
        assert!(matches!(config.validate(), Err(SimError::InvalidConfig(_))));

        let mut config = base_config();
        config.rates = vec![0.1];
        assert!(config.validate().is_err());

        let mut config = base_config();
        config.rates = vec![0.1, 1.5];
        assert!(config.validate().is_err());

        let mut config = base_config();
        config.policy = PolicyKind::Lcq;
        assert!(config.validate().is_err());

        let mut config = base_config();
        config.policy = PolicyKind::CaraDominant { node: 3 };
        assert!(config.validate().is_err());

        let mut config = base_config();
        config.channel = ChannelProcessSpec::TwoStateMarkov { persistence: vec![0.9] };
        assert!(config.validate().is_err());
    }

    #[test]
    fn channel_marginals_match_both_modes() {
        // Pooled over seeds so a single tail draw cannot trip the check.
        for (label, channel) in [
            ("iid", ChannelProcessSpec::IidStationary),
            ("markov", ChannelProcessSpec::TwoStateMarkov { persistence: vec![0.9, 0.9] }),
        ] {
            let horizon = 200_000u64;
            let seeds = [1u64, 2, 3];
            let mut good = [0u64; 2];
            for &seed in &seeds {
                let mut config = base_config();
                config.horizon = horizon;
                config.warmup = 0;
                config.seed = seed;
                config.channel = channel.clone();
                let (_, trace) = run_with_trace(&config, horizon).unwrap();
                for rec in &trace.slots {
                    for (g, &is_good) in good.iter_mut().zip(&rec.channel_good) {
                        *g += is_good as u64;
                    }
                }
            }
            let total = (horizon * seeds.len() as u64) as f64;
            // Persistence inflates the variance of the empirical marginal by
            // (1 + h) / (1 - h) relative to the binomial case.
            let inflation: f64 = match &channel {
                ChannelProcessSpec::IidStationary => 1.0,
                ChannelProcessSpec::TwoStateMarkov { .. } => 1.9f64 / 0.1,
            };
            for (i, pi) in [(0usize, 0.8f64), (1, 0.7)] {
                let frac = good[i] as f64 / total;
                let tol = 3.0 * (pi * (1.0 - pi) * inflation / total).sqrt();
                assert!(
                    (frac - pi).abs() <= tol,
                    "{label} node {i}: fraction {frac} vs {pi} (tol {tol})"
                );
            }
        }
    }

    #[test]
    fn estimation_error_frequencies_match() {
        let horizon = 200_000u64;
        let seeds = [1u64, 2, 3, 4];
        let mut good = [0u64; 2];
        let mut good_flipped = [0u64; 2];
        let mut bad = [0u64; 2];
        let mut bad_flipped = [0u64; 2];
        for &seed in &seeds {
            let mut config = base_config();
            config.horizon = horizon;
            config.warmup = 0;
            config.seed = seed;
            let (_, trace) = run_with_trace(&config, horizon).unwrap();
            for rec in &trace.slots {
                for i in 0..2 {
                    if rec.channel_good[i] {
                        good[i] += 1;
                        good_flipped[i] += !rec.estimate_good[i] as u64;
                    } else {
                        bad[i] += 1;
                        bad_flipped[i] += rec.estimate_good[i] as u64;
                    }
                }
            }
        }
        for i in 0..2 {
            for (flips, total, eps) in
                [(good_flipped[i], good[i], 0.2), (bad_flipped[i], bad[i], 0.2)]
            {
                let frac = flips as f64 / total as f64;
                let tol = 3.0 * (eps * (1.0 - eps) / total as f64).sqrt();
                assert!((frac - eps).abs() <= tol, "node {i}: {frac} vs {eps} (tol {tol})");
            }
        }
    }

    #[test]
    fn saturated_rates_depend_only_on_channel_marginals() {
        // Conditional-on-backlog service rates are marginal quantities only
        // when the backlog carries no information about the channel. Saturate
        // both queues: every slot's interaction is then decided by fresh
        // marginal draws, so the measured rates must match the closed forms
        // under any temporal channel correlation.
        let make = |channel, seed| {
            let mut config = SimConfig::two_node(
                presets::nonconvex(),
                PolicyKind::Cara,
                TransmitProbs::new(0.5, 0.5),
                (1.0, 1.0),
                400_000,
                seed,
            );
            config.channel = channel;
            config.queue_cap = u64::MAX;
            config
        };
        let mu = [0.23168f64, 0.1764];
        for (channel, inflation) in [
            (ChannelProcessSpec::IidStationary, 1.0f64),
            (ChannelProcessSpec::TwoStateMarkov { persistence: vec![0.9, 0.9] }, 19.0),
        ] {
            let stats = run(&make(channel.clone(), 11)).unwrap();
            for (i, &mu_i) in mu.iter().enumerate() {
                let n = stats.observed_slots as f64;
                let tol = 3.0 * (mu_i * (1.0 - mu_i) * inflation / n).sqrt();
                assert!(
                    (stats.nodes[i].service_rate - mu_i).abs() <= tol,
                    "{channel:?} node {i}: {} vs {mu_i} (tol {tol})",
                    stats.nodes[i].service_rate,
                );
            }
        }
    }

    #[test]
    fn dominant_service_rates_match_closed_forms() {
        // Moderate-horizon version of the core oracle agreement; the
        // acceptance suite runs the full-scale one.
        let config = SimConfig::two_node(
            presets::nonconvex(),
            PolicyKind::CaraDominant { node: 2 },
            TransmitProbs::new(0.5, 0.5),
            (0.1, 0.05),
            300_000,
            5,
        );
        let stats = run(&config).unwrap();
        let n1 = stats.nodes[0].empty_fraction * stats.observed_slots as f64;
        let busy1 = stats.observed_slots as f64 - n1;
        let se1 = (0.23168f64 * (1.0 - 0.23168) / busy1).sqrt();
        assert!((stats.nodes[0].service_rate - 0.23168).abs() <= 4.0 * se1);
        let se2 = (0.2193687845f64 * (1.0 - 0.2193687845) / stats.observed_slots as f64).sqrt();
        assert!((stats.nodes[1].service_rate - 0.2193687845).abs() <= 5.0 * se2);
        assert!((stats.nodes[0].empty_fraction - 0.5683701657).abs() <= 0.02);
    }
}
