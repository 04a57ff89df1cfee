//! Compute the closure of the stability region for two qualitatively
//! different parameter settings and print its shape, anchors and a few
//! frontier vertices.
//!
//! ```bash
//! cargo run --example stability_regions
//! ```

use cara::analysis::{classify_shape, closure_boundary, interference_penalty, BoundaryShape};
use cara::presets;

fn main() {
    for (name, params) in [("non-convex", presets::nonconvex()), ("convex", presets::convex())] {
        let pen = interference_penalty(&params);
        let boundary = closure_boundary(&params);
        println!("== {name} setting");
        println!("interference penalties: node1 {:.4}, node2 {:.4}", pen.node1, pen.node2);
        println!("shape: {:?}", classify_shape(&params));
        println!(
            "axis anchors: PX = ({:.4}, 0), PY = (0, {:.4})",
            boundary.p_x.lambda1, boundary.p_y.lambda2
        );
        match boundary.shape {
            BoundaryShape::CurvedThreeSegment { p1, p2 } => {
                println!(
                    "curved frontier joints: P1 = ({:.4}, {:.4}), P2 = ({:.4}, {:.4})",
                    p1.lambda1, p1.lambda2, p2.lambda1, p2.lambda2
                );
            }
            BoundaryShape::TwoLine { p3 } => {
                println!("corner vertex: P3 = ({:.4}, {:.4})", p3.lambda1, p3.lambda2);
            }
        }
        println!("frontier samples (segment, lambda1, lambda2):");
        for v in boundary.sample(5) {
            println!("  {:?}\t{:.4}\t{:.4}", v.segment, v.lambda1, v.lambda2);
        }
        println!();
    }
}
