//! Enumerates the event network of a small instance.
//!
//! cargo run --example event_network

use darpsv::events::enumerate_events;
use darpsv::gen::{random_instance, RandomParams};

fn main() {
    let inst = random_instance(
        4,
        &RandomParams {
            n: 3,
            ..RandomParams::default()
        },
    );
    let net = enumerate_events(&inst);
    println!("|V_E| = {}, |A_E| = {}", net.num_events(), net.num_arcs());
    print!("{}", net.dump());
}
