//! Seeded random instances, small enough for exhaustive checking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Location};

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub n: usize,
    pub capacity: i64,
    pub fleet: usize,
    /// Chance that a customer's demand exceeds the capacity.
    pub large_prob: f64,
    /// Side of the square holding all locations.
    pub side: f64,
    pub horizon: f64,
    /// Pickup window width.
    pub window: f64,
    pub service: f64,
    /// Ride limit as a multiple of the direct travel time.
    pub ride_factor: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            n: 3,
            capacity: 3,
            fleet: 3,
            large_prob: 0.3,
            side: 20.0,
            horizon: 120.0,
            window: 20.0,
            service: 1.0,
            ride_factor: 2.0,
        }
    }
}

/// A random instance with integer coordinates and times. Deliveries open
/// after the direct ride from their pickup and stay open for the pickup
/// window plus the ride limit.
pub fn random_instance(seed: u64, p: &RandomParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n;
    let dim = 2 * n + 2;
    let side = p.side as i64;
    let mut pts: Vec<(f64, f64)> = (0..dim)
        .map(|_| {
            (
                rng.gen_range(0..=side) as f64,
                rng.gen_range(0..=side) as f64,
            )
        })
        .collect();
    pts[dim - 1] = pts[0];
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let mut locs: Vec<Location> = (0..dim)
        .map(|k| Location {
            id: k,
            x: pts[k].0,
            y: pts[k].1,
            service: 0.0,
            load: 0,
            early: 0.0,
            late: p.horizon * 2.0 + p.side * 4.0,
        })
        .collect();
    let mut ride = Vec::with_capacity(n);
    for i in 1..=n {
        let q = if rng.gen_bool(p.large_prob) {
            rng.gen_range(p.capacity + 1..=2 * p.capacity)
        } else {
            rng.gen_range(1..=p.capacity)
        };
        let d = i + n;
        let direct = dist(pts[i], pts[d]) + p.service;
        let r = (p.ride_factor * direct).ceil().max(direct + 1.0);
        let reach = dist(pts[0], pts[i]);
        let e = (reach + rng.gen_range(0.0..p.horizon)).round();
        locs[i].load = q;
        locs[i].service = p.service;
        locs[i].early = e;
        locs[i].late = e + p.window;
        locs[d].load = -q;
        locs[d].service = p.service;
        locs[d].early = (e + direct).floor();
        locs[d].late = e + p.window + r;
        ride.push(r);
    }
    Instance::from_locations(format!("rand-{seed}"), n, p.capacity, p.fleet, locs, ride)
        .expect("generated instance is well formed")
}

/// Text in the benchmark format with the usual shape: coordinates in
/// `[-10, 10]`, a 24-hour horizon, half the customers with a 15-minute
/// pickup window and half with a 15-minute delivery window. Type `b` has
/// capacity 6 and demands 1..=6 with service equal to demand, type `a`
/// capacity 3 and unit demands with 3 minutes of service.
pub fn benchmark_text(seed: u64, vehicles: usize, n: usize, type_b: bool) -> String {
    use std::fmt::Write;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cap, ride) = if type_b { (6, 45) } else { (3, 30) };
    let mut out = String::new();
    let _ = writeln!(out, "{vehicles} {n} 480 {cap} {ride}");
    let _ = writeln!(out, "0 0 0 0 0 0 1440");
    let mut lines = vec![String::new(); 2 * n];
    for i in 1..=n {
        let q: i64 = if type_b { rng.gen_range(1..=6) } else { 1 };
        let service = if type_b { q as f64 } else { 3.0 };
        let pick = (
            rng.gen_range(-10.0..=10.0f64),
            rng.gen_range(-10.0..=10.0f64),
        );
        let drop = (
            rng.gen_range(-10.0..=10.0f64),
            rng.gen_range(-10.0..=10.0f64),
        );
        let e = rng.gen_range(60..=465) as f64;
        let (pw, dw) = if i <= n / 2 {
            ((e, e + 15.0), (0.0, 1440.0))
        } else {
            ((0.0, 1440.0), (e, e + 15.0))
        };
        lines[i - 1] = format!(
            "{i} {:.3} {:.3} {service} {q} {} {}",
            pick.0, pick.1, pw.0, pw.1
        );
        lines[i + n - 1] = format!(
            "{} {:.3} {:.3} {service} {} {} {}",
            i + n,
            drop.0,
            drop.1,
            -q,
            dw.0,
            dw.1
        );
    }
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    let _ = writeln!(out, "{} 0 0 0 0 0 1440", 2 * n + 1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let p = RandomParams::default();
        let a = random_instance(7, &p);
        let b = random_instance(7, &p);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.check().is_ok());
        let mixed = (0..40).any(|s| !random_instance(s, &p).large_customers().is_empty());
        assert!(mixed);
    }

    #[test]
    fn benchmark_text_parses() {
        let text = benchmark_text(3, 2, 16, false);
        let inst = crate::instance::parse_cordeau("x", &text).unwrap();
        assert_eq!((inst.fleet, inst.n, inst.capacity), (2, 16, 3));
        assert_eq!(inst.ride(1), 33.0);
        let b = crate::instance::parse_cordeau("y", &benchmark_text(3, 2, 16, true)).unwrap();
        assert_eq!(b.capacity, 6);
    }
}
