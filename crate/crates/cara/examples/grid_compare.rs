//! Validate the fixed-probability region empirically: simulate a grid of
//! arrival-rate pairs and compare verdicts with the analytic membership,
//! excluding a thin band around the frontier.
//!
//! ```bash
//! cargo run --release --example grid_compare
//! ```

use cara::analysis::{
    fixed_p_frontier_vertices, fixed_p_region_contains, polyline_distance, RatePoint,
};
use cara::model::{ArrivalRates, TransmitProbs};
use cara::presets;
use cara::sim::{run, PolicyKind, SimConfig, Verdict};

fn main() {
    let params = presets::nonconvex();
    let p = TransmitProbs::new(0.5, 0.5);
    let frontier = fixed_p_frontier_vertices(&params, p).to_vec();
    let band = 0.02;
    let n = 8;

    println!("grid verdicts (S stable / U unstable / ? inconclusive, . = in band)");
    let mut agreed = 0;
    let mut judged = 0;
    for j in (0..n).rev() {
        let lambda2 = 0.3 * j as f64 / (n - 1) as f64;
        print!("lambda2 {lambda2:.3} | ");
        for i in 0..n {
            let lambda1 = 0.3 * i as f64 / (n - 1) as f64;
            if polyline_distance(&frontier, RatePoint::new(lambda1, lambda2)) < band {
                print!(" . ");
                continue;
            }
            let config =
                SimConfig::two_node(params, PolicyKind::Cara, p, (lambda1, lambda2), 100_000, 7);
            let stats = run(&config).unwrap();
            let analytic =
                fixed_p_region_contains(&params, p, ArrivalRates::new(lambda1, lambda2));
            let agree = (analytic && stats.verdict == Verdict::Stable)
                || (!analytic && stats.verdict == Verdict::Unstable);
            judged += 1;
            agreed += agree as usize;
            let mark = match stats.verdict {
                Verdict::Stable => 'S',
                Verdict::Unstable => 'U',
                Verdict::Inconclusive => '?',
            };
            print!(" {mark}{}", if agree { ' ' } else { '!' });
        }
        println!();
    }
    println!(
        "\nagreement with the analytic region: {agreed}/{judged} points outside the band"
    );
}
