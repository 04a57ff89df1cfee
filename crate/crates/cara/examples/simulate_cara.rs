//! Run the dominant variant of the channel-aware protocol and compare the
//! measured rates against the closed forms.
//!
//! ```bash
//! cargo run --release --example simulate_cara
//! ```

use cara::analysis::dominant_service_rates;
use cara::model::TransmitProbs;
use cara::presets;
use cara::sim::{run, PolicyKind, SimConfig};

fn main() {
    let params = presets::nonconvex();
    let p = TransmitProbs::new(0.5, 0.5);
    let (lambda1, lambda2) = (0.1, 0.05);
    let predicted = dominant_service_rates(&params, p, lambda1).unwrap();
    println!(
        "closed forms: mu1 = {:.5}, mu2 = {:.5}, P[Q1 empty] = {:.5}",
        predicted.mu1,
        predicted.mu2,
        1.0 - lambda1 / predicted.mu1
    );

    let config = SimConfig::two_node(
        params,
        PolicyKind::CaraDominant { node: 2 },
        p,
        (lambda1, lambda2),
        500_000,
        42,
    );
    let stats = run(&config).unwrap();
    for (i, node) in stats.nodes.iter().enumerate() {
        println!(
            "node {}: arrival {:.5}  service {:.5}  empty {:.5}  slope {:+.2e}  {:?}",
            i + 1,
            node.arrival_rate,
            node.service_rate,
            node.empty_fraction,
            node.queue_slope,
            node.verdict
        );
    }
    println!("overall verdict: {:?}", stats.verdict);
    println!(
        "service-rate errors: node 1 {:+.5}, node 2 {:+.5}",
        stats.nodes[0].service_rate - predicted.mu1,
        stats.nodes[1].service_rate - predicted.mu2
    );
}
