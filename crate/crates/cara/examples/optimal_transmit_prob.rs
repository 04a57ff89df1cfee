//! Sweep node 1's load and show how node 2's best transmit probability moves
//! through its three regimes, reproducing the region frontier as it goes.
//!
//! ```bash
//! cargo run --example optimal_transmit_prob
//! ```

use cara::analysis::{closure_boundary, max_mu2, optimal_p2, BoundaryShape};
use cara::presets;

fn main() {
    let params = presets::nonconvex();
    let boundary = closure_boundary(&params);
    let BoundaryShape::CurvedThreeSegment { p1, p2 } = boundary.shape else {
        unreachable!("the non-convex preset has a curved frontier");
    };
    println!("saturation regime ends at lambda1 = {:.5}", p1.lambda1);
    println!("interior regime ends at lambda1 = {:.5}", p2.lambda1);
    println!();
    println!("lambda1    p2*      regime    best mu2   frontier");
    for i in 0..16 {
        let lambda1 = p2.lambda1 * i as f64 / 16.0;
        let opt = optimal_p2(&params, lambda1);
        let envelope = max_mu2(&params, lambda1);
        let frontier = boundary.frontier_lambda2(lambda1);
        println!(
            "{lambda1:.5}   {:.5}  {:<8}  {envelope:.6}   {frontier:.6}",
            opt.p2,
            format!("{:?}", opt.regime),
        );
        assert!((envelope - frontier).abs() < 1e-9);
    }
    println!();
    println!("past the joint the mirrored node owns the frontier:");
    let swapped = params.swapped();
    let mirrored = closure_boundary(&swapped);
    for lambda2 in [0.05, 0.1] {
        let opt = optimal_p2(&swapped, lambda2);
        println!(
            "at lambda2 = {lambda2:.2}: node 1 rate {:.6} with p1* = {:.4} ({:?})",
            mirrored.frontier_lambda2(lambda2),
            opt.p2,
            opt.regime
        );
    }
}
