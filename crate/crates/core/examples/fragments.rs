//! Enumerates the fragments of a small instance with one large customer.
//!
//! cargo run --example fragments

use darpsv::fragments::enumerate_fragments;
use darpsv::gen::{random_instance, RandomParams};

fn main() {
    let params = RandomParams {
        n: 4,
        large_prob: 0.25,
        ..RandomParams::default()
    };
    let inst = (0..)
        .map(|s| random_instance(s, &params))
        .find(|i| !i.large_customers().is_empty())
        .unwrap();
    println!(
        "{}: large customers {:?}",
        inst.name,
        inst.large_customers()
    );
    print!("{}", enumerate_fragments(&inst).dump());
}
