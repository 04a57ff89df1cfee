//! Seeded samplers shared by the integration suites. Independent of the
//! crate's simulation streams so test inputs never track implementation
//! changes.

use cara::{NodeChannelParams, ReceptionProbs2, SystemParams};

/// Small splitmix-style generator for test inputs.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_add(0x9E37_79B9_7F4A_7C15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

/// A random valid parameter set with strictly ordered, strictly positive
/// reception probabilities.
pub fn random_params(rng: &mut TestRng) -> SystemParams {
    let node = |rng: &mut TestRng| NodeChannelParams {
        pi_good: rng.range(0.05, 1.0),
        eps_good: rng.range(0.0, 0.9),
        eps_bad: rng.range(0.0, 0.9),
    };
    let chain = |rng: &mut TestRng| {
        let solo = rng.range(0.2, 1.0);
        let with_bad = solo * rng.range(0.15, 0.85);
        let with_good = with_bad * rng.range(0.1, 0.9);
        (solo, with_bad, with_good)
    };
    let (q1_solo, q1_with_bad, q1_with_good) = chain(rng);
    let (q2_solo, q2_with_bad, q2_with_good) = chain(rng);
    let params = SystemParams {
        node1: node(rng),
        node2: node(rng),
        reception: ReceptionProbs2 {
            q1_solo,
            q1_with_bad,
            q1_with_good,
            q2_solo,
            q2_with_bad,
            q2_with_good,
        },
    };
    debug_assert!(params.validate().is_ok());
    params
}
