//! Compare the no-CSI baseline against channel-aware access: derived success
//! probabilities, region anchors, and rate points separating the protocols.
//!
//! ```bash
//! cargo run --example aloha_baseline
//! ```

use cara::analysis::{
    aloha_boundary, aloha_derived, aloha_region_contains, closure_boundary,
    closure_region_contains,
};
use cara::model::ArrivalRates;
use cara::presets;

fn main() {
    let params = presets::nonconvex();
    let derived = aloha_derived(&params);
    println!(
        "node 1: solo {:.3}, with interference {:.3}, gap {:.3}",
        derived.q1_solo, derived.q1_multi, derived.gap1
    );
    println!(
        "node 2: solo {:.3}, with interference {:.3}, gap {:.3}",
        derived.q2_solo, derived.q2_multi, derived.gap2
    );

    let aloha = aloha_boundary(&params).unwrap();
    let cara_eps = closure_boundary(&params);
    let cara_perfect = closure_boundary(&params.with_perfect_csi());
    println!("\naxis anchors (lambda1 reach, lambda2 reach):");
    println!("  no CSI      : {:.3}, {:.3}", aloha.p_x.lambda1, aloha.p_y.lambda2);
    println!("  noisy CSI   : {:.3}, {:.3}", cara_eps.p_x.lambda1, cara_eps.p_y.lambda2);
    println!(
        "  perfect CSI : {:.3}, {:.3}",
        cara_perfect.p_x.lambda1, cara_perfect.p_y.lambda2
    );

    // Estimation errors cost real rate: near the axes, plain no-CSI access
    // serves points that channel-aware access with 20% error rates cannot.
    println!("\nsample points (no-CSI / noisy-CSI / perfect-CSI membership):");
    for rates in [
        ArrivalRates::new(0.3, 0.2),
        ArrivalRates::new(0.75, 0.005),
        ArrivalRates::new(0.1, 0.45),
        ArrivalRates::new(0.2, 0.3),
    ] {
        println!(
            "  ({:.2}, {:.2}): {:5} / {:5} / {:5}",
            rates.lambda1,
            rates.lambda2,
            aloha_region_contains(&params, rates).unwrap(),
            closure_region_contains(&params, rates),
            closure_region_contains(&params.with_perfect_csi(), rates),
        );
    }
}
