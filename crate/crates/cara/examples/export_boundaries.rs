//! Produce the overlay dataset of all four region frontiers in the CSV
//! schema written by the `cara region` task, printed to stdout.
//!
//! ```bash
//! cargo run --example export_boundaries > boundaries.csv
//! ```

use cara::analysis::{
    aloha_boundary, closure_boundary, lcq_two_node_vertices, BoundaryVertex, SegmentKind,
};
use cara::presets;

fn print_rows(label: &str, vertices: &[BoundaryVertex]) {
    for v in vertices {
        let tag = match v.segment {
            SegmentKind::Line => "line",
            SegmentKind::Curve => "curve",
        };
        println!("{tag},{},{},{label}", v.lambda1, v.lambda2);
    }
}

fn main() {
    let params = presets::nonconvex();
    let samples = 32;
    println!("segment_tag,lambda1,lambda2,region_label");
    print_rows("cara_eps", &closure_boundary(&params).sample(samples));
    print_rows(
        "cara_perfect",
        &closure_boundary(&params.with_perfect_csi()).sample(samples),
    );
    print_rows("aloha", &aloha_boundary(&params).unwrap().sample(samples));
    print_rows("lcq", &lcq_two_node_vertices(&params.scheduler_view()).unwrap());
}
