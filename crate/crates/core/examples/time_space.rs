//! Expands fragments over a coarse and a fine grid and shows how rounding
//! shortens the copies.
//!
//! cargo run --example time_space

use darpsv::fixtures::subtour_rounding;
use darpsv::fragments::enumerate_fragments;
use darpsv::timespace::{expand_fragments, TimeGrid};

fn main() {
    let inst = subtour_rounding();
    let frags = enumerate_fragments(&inst);
    for step in [10.0, 5.0, 1.0] {
        let grid = TimeGrid::fixed(&inst, step);
        let net = expand_fragments(&inst, &frags, &grid);
        let short: Vec<String> = net
            .moves()
            .filter(|(_, e)| e.discrepancy() > 0.0)
            .take(4)
            .map(|(_, e)| {
                format!(
                    "{:?} {}->{} (exact {})",
                    e.element().unwrap(),
                    e.depart,
                    e.arrive,
                    e.exact
                )
            })
            .collect();
        println!(
            "step {step}: {} nodes, {} edges, shortened e.g. {}",
            net.num_nodes(),
            net.num_edges(),
            short.join("; ")
        );
    }
}
