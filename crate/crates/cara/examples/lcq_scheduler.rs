//! The centralized longest-connected-queue baseline: exact region membership
//! for two and three nodes, simulated verdicts at points on either side, and
//! the subset relation against decentralized channel-aware access.
//!
//! ```bash
//! cargo run --release --example lcq_scheduler
//! ```

use cara::analysis::{cara_subset_of_lcq, lcq_region_contains, lcq_subset_capacity};
use cara::model::{LcqNodeParams, LcqSystemParams};
use cara::presets;
use cara::sim::{run, SimConfig};

fn main() {
    let strong = presets::strong_mpr();
    let view = strong.scheduler_view();
    println!(
        "two-node scheduler capacity for the pair: {:.4}",
        lcq_subset_capacity(&view, &[0, 1])
    );
    for rates in [vec![0.3, 0.3], vec![0.522, 0.297]] {
        let inside = lcq_region_contains(&view, &rates).unwrap();
        let stats = run(&SimConfig::lcq(view.clone(), rates.clone(), 300_000, 17)).unwrap();
        println!(
            "rates {rates:?}: analytic {} -> simulated {:?}",
            if inside { "inside " } else { "outside" },
            stats.verdict
        );
    }

    let three = LcqSystemParams {
        nodes: vec![LcqNodeParams { pi_good: 0.8, eps_good: 0.1, q_solo: 0.9 }; 3],
    };
    println!(
        "\nthree symmetric nodes; all-nodes capacity {:.6}",
        lcq_subset_capacity(&three, &[0, 1, 2])
    );
    for lambda in [0.26, 0.30] {
        let rates = vec![lambda; 3];
        let inside = lcq_region_contains(&three, &rates).unwrap();
        let stats = run(&SimConfig::lcq(three.clone(), rates, 300_000, 17)).unwrap();
        println!(
            "symmetric rate {lambda:.2}: analytic {} -> simulated {:?}",
            if inside { "inside " } else { "outside" },
            stats.verdict
        );
    }

    println!("\nis decentralized access confined to the scheduler region?");
    for (name, params) in [
        ("strong reception", strong),
        ("weak reception", presets::weak_mpr()),
        ("non-convex", presets::nonconvex()),
    ] {
        println!("  {name}: {}", cara_subset_of_lcq(&params));
    }
}
