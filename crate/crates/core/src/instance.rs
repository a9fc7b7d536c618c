//! Problem data: locations, windows, loads, travel metric and fleet.
//!
//! Locations are numbered `0..=2n+1`: `0` is the origin depot, `1..=n` are
//! pickups, `n+1..=2n` the matching deliveries and `2n+1` the destination
//! depot. Service durations are folded into the travel-time matrix at the
//! origin of each arc, so every time variable downstream is the time service
//! starts (equivalently, the time a vehicle is "at" the location).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Location index in `0..=2n+1`.
pub type Loc = usize;

/// Tolerance for all time and cost comparisons.
pub const EPS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub id: Loc,
    pub x: f64,
    pub y: f64,
    pub service: f64,
    /// Signed load change: positive at pickups, negative at deliveries.
    pub load: i64,
    pub early: f64,
    pub late: f64,
}

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    /// Number of customers.
    pub n: usize,
    /// Vehicle capacity `Q`.
    pub capacity: i64,
    /// Number of available vehicles `|V|`.
    pub fleet: usize,
    /// Maximum route duration from the source file; kept for reference only.
    #[serde(default)]
    pub route_duration: Option<f64>,
    pub locations: Vec<Location>,
    /// Maximum ride time per customer, indexed by `customer - 1`.
    pub ride_limit: Vec<f64>,
    pub travel_time: Matrix,
    pub travel_cost: Matrix,
}

pub fn euclid(a: &Location, b: &Location) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

impl Instance {
    /// Builds an instance from coordinates, using Euclidean costs and
    /// `T_ij = dist(i, j) + service_i`.
    pub fn from_locations(
        name: impl Into<String>,
        n: usize,
        capacity: i64,
        fleet: usize,
        locations: Vec<Location>,
        ride_limit: Vec<f64>,
    ) -> Result<Self> {
        let dim = 2 * n + 2;
        if locations.len() != dim {
            return Err(Error::Structure(format!(
                "expected {dim} locations for n = {n}, got {}",
                locations.len()
            )));
        }
        let travel_cost = Matrix::from_fn(dim, |i, j| {
            if i == j {
                0.0
            } else {
                euclid(&locations[i], &locations[j])
            }
        });
        let travel_time = Matrix::from_fn(dim, |i, j| {
            if i == j {
                0.0
            } else {
                travel_cost.get(i, j) + locations[i].service
            }
        });
        let inst = Instance {
            name: name.into(),
            n,
            capacity,
            fleet,
            route_duration: None,
            locations,
            ride_limit,
            travel_time,
            travel_cost,
        };
        inst.check()?;
        Ok(inst)
    }

    /// Builds an instance from explicit travel-time and cost matrices.
    /// Coordinates in `locations` are kept but not used.
    #[allow(clippy::too_many_arguments)]
    pub fn from_matrices(
        name: impl Into<String>,
        n: usize,
        capacity: i64,
        fleet: usize,
        locations: Vec<Location>,
        ride_limit: Vec<f64>,
        travel_time: Matrix,
        travel_cost: Matrix,
    ) -> Result<Self> {
        let inst = Instance {
            name: name.into(),
            n,
            capacity,
            fleet,
            route_duration: None,
            locations,
            ride_limit,
            travel_time,
            travel_cost,
        };
        inst.check()?;
        Ok(inst)
    }

    /// All-pairs shortest travel times. With service embedded in `T` the raw
    /// matrix need not satisfy the triangle inequality, so pruning rules use
    /// this closure as a lower bound on the time between two visits.
    pub fn time_closure(&self) -> Matrix {
        let dim = self.num_locations();
        let mut d = self.travel_time.clone();
        for k in 0..dim {
            for i in 0..dim {
                let dik = d.get(i, k);
                for j in 0..dim {
                    let via = dik + d.get(k, j);
                    if via < d.get(i, j) {
                        d.set(i, j, via);
                    }
                }
            }
        }
        d
    }

    /// Structural checks on loads, windows, matrices and ride limits.
    pub fn check(&self) -> Result<()> {
        let n = self.n;
        let dim = 2 * n + 2;
        let bad = |msg: String| Err(Error::Structure(msg));
        if self.locations.len() != dim {
            return bad(format!(
                "{} locations, expected {dim}",
                self.locations.len()
            ));
        }
        if self.travel_time.dim() != dim || self.travel_cost.dim() != dim {
            return bad("matrix dimension does not match location count".into());
        }
        if self.ride_limit.len() != n {
            return bad(format!(
                "{} ride limits, expected {n}",
                self.ride_limit.len()
            ));
        }
        if self.capacity <= 0 {
            return bad(format!("capacity must be positive, got {}", self.capacity));
        }
        for (k, loc) in self.locations.iter().enumerate() {
            if loc.id != k {
                return bad(format!("location at position {k} has id {}", loc.id));
            }
            if loc.early > loc.late + EPS {
                return bad(format!(
                    "location {k} has window [{}, {}]",
                    loc.early, loc.late
                ));
            }
        }
        if self.locations[0].load != 0 || self.locations[dim - 1].load != 0 {
            return bad("depots must have zero load".into());
        }
        for i in 1..=n {
            let q = self.locations[i].load;
            if q <= 0 {
                return bad(format!("pickup {i} has non-positive load {q}"));
            }
            if self.locations[i + n].load != -q {
                return bad(format!(
                    "delivery {} load {} does not mirror pickup load {q}",
                    i + n,
                    self.locations[i + n].load
                ));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if self.travel_time.get(i, j) < 0.0 || self.travel_cost.get(i, j) < 0.0 {
                    return bad(format!("negative travel time or cost on arc ({i}, {j})"));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn origin(&self) -> Loc {
        0
    }

    #[inline]
    pub fn sink(&self) -> Loc {
        2 * self.n + 1
    }

    #[inline]
    pub fn num_locations(&self) -> usize {
        2 * self.n + 2
    }

    #[inline]
    pub fn is_pickup(&self, i: Loc) -> bool {
        i >= 1 && i <= self.n
    }

    #[inline]
    pub fn is_delivery(&self, i: Loc) -> bool {
        i > self.n && i <= 2 * self.n
    }

    #[inline]
    pub fn is_depot(&self, i: Loc) -> bool {
        i == 0 || i == self.sink()
    }

    #[inline]
    pub fn delivery_of(&self, pickup: Loc) -> Loc {
        debug_assert!(self.is_pickup(pickup));
        pickup + self.n
    }

    #[inline]
    pub fn pickup_of(&self, delivery: Loc) -> Loc {
        debug_assert!(self.is_delivery(delivery));
        delivery - self.n
    }

    /// Customer (= pickup id) served at a non-depot location.
    #[inline]
    pub fn customer_of(&self, i: Loc) -> Option<usize> {
        if self.is_pickup(i) {
            Some(i)
        } else if self.is_delivery(i) {
            Some(i - self.n)
        } else {
            None
        }
    }

    #[inline]
    pub fn time(&self, i: Loc, j: Loc) -> f64 {
        self.travel_time.get(i, j)
    }

    #[inline]
    pub fn cost(&self, i: Loc, j: Loc) -> f64 {
        self.travel_cost.get(i, j)
    }

    #[inline]
    pub fn early(&self, i: Loc) -> f64 {
        self.locations[i].early
    }

    #[inline]
    pub fn late(&self, i: Loc) -> f64 {
        self.locations[i].late
    }

    #[inline]
    pub fn load(&self, i: Loc) -> i64 {
        self.locations[i].load
    }

    /// Maximum ride time of the customer whose pickup is `pickup`.
    #[inline]
    pub fn ride(&self, pickup: Loc) -> f64 {
        self.ride_limit[pickup - 1]
    }

    /// `ceil(|q_i| / Q)`; zero at the depots.
    #[inline]
    pub fn vehicles_needed(&self, i: Loc) -> usize {
        let q = self.load(i).unsigned_abs() as i64;
        ((q + self.capacity - 1) / self.capacity) as usize
    }

    /// True for both the pickup and the delivery of a customer with `q > Q`.
    #[inline]
    pub fn is_large(&self, i: Loc) -> bool {
        !self.is_depot(i) && self.load(i).abs() > self.capacity
    }

    pub fn pickups(&self) -> std::ops::RangeInclusive<Loc> {
        1..=self.n
    }

    pub fn large_customers(&self) -> Vec<Loc> {
        self.pickups().filter(|&i| self.is_large(i)).collect()
    }

    pub fn small_customers(&self) -> Vec<Loc> {
        self.pickups().filter(|&i| !self.is_large(i)).collect()
    }

    /// Big-M for the time-increment constraint on `(i, j)`.
    #[inline]
    pub fn big_m(&self, i: Loc, j: Loc) -> f64 {
        (self.late(i) + self.time(i, j) - self.early(j)).max(0.0)
    }

    /// Location arcs admissible in any route, before time-window filtering.
    ///
    /// Large pickups lead only to their own delivery, and nothing but the
    /// origin depot or a delivery leads into a large pickup.
    pub fn arc_allowed(&self, i: Loc, j: Loc) -> bool {
        let n = self.n;
        if i == j || j == 0 || i == self.sink() {
            return false;
        }
        if i == 0 {
            // Departing to the destination depot directly is an unused vehicle.
            return self.is_pickup(j) || j == self.sink();
        }
        if j == self.sink() {
            return self.is_delivery(i);
        }
        if self.is_pickup(i) && self.is_large(i) {
            return j == i + n;
        }
        if self.is_pickup(j) && self.is_large(j) && self.is_pickup(i) {
            return false;
        }
        if self.is_delivery(j) && self.is_large(j) {
            return i == j - n;
        }
        if self.is_delivery(i) && self.pickup_of(i) == j {
            return false;
        }
        true
    }

    /// Arc admissible and not excluded by the windows alone.
    pub fn arc_time_feasible(&self, i: Loc, j: Loc) -> bool {
        self.arc_allowed(i, j) && self.early(i) + self.time(i, j) <= self.late(j) + EPS
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.check()?;
        Ok(inst)
    }
}

/// Reads an instance from JSON (`.json`) or the benchmark text format. The
/// instance name is the file stem.
pub fn load_instance(path: &std::path::Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        return Instance::from_json(&text);
    }
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance");
    parse_cordeau(name, &text)
}

/// Builds the dataset instance for `params` from a raw benchmark instance.
pub fn build_dataset(raw: &Instance, params: &DatasetParams) -> Result<Instance> {
    params.validate()?;
    match params.variant {
        Variant::DarpsvSet1 => build_dataset1(raw, params),
        _ => build_dataset2(&tighten_windows(raw)?, params),
    }
}

/// Parses the whitespace-separated benchmark format: a header
/// `fleet n route_duration capacity ride_limit` followed by one
/// `id x y service load early late` line per location. The destination depot
/// line is optional; when absent it is copied from the origin depot.
pub fn parse_cordeau(name: &str, text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let hdr = parse_numbers(hline, header)?;
    if hdr.len() < 5 {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header needs 5 fields, found {}", hdr.len()),
        });
    }
    let fleet = as_count(hline, hdr[0], "fleet size")?;
    let n = as_count(hline, hdr[1], "customer count")?;
    let route_duration = hdr[2];
    let capacity = as_count(hline, hdr[3], "capacity")? as i64;
    let ride = hdr[4];

    let mut locations = Vec::with_capacity(2 * n + 2);
    for (lineno, line) in lines {
        let v = parse_numbers(lineno, line)?;
        if v.len() < 7 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("location line needs 7 fields, found {}", v.len()),
            });
        }
        if locations.len() == 2 * n + 2 {
            return Err(Error::Structure(format!(
                "more than {} location lines (line {lineno})",
                2 * n + 2
            )));
        }
        let id = locations.len();
        if v[0] as usize != id {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected location id {id}, found {}", v[0]),
            });
        }
        locations.push(Location {
            id,
            x: v[1],
            y: v[2],
            service: v[3],
            load: v[4].round() as i64,
            early: v[5],
            late: v[6],
        });
    }
    if locations.len() == 2 * n + 1 {
        let mut sink = locations[0].clone();
        sink.id = 2 * n + 1;
        locations.push(sink);
    }
    if locations.len() != 2 * n + 2 {
        return Err(Error::Structure(format!(
            "header announces n = {n} ({} locations) but file has {}",
            2 * n + 2,
            locations.len()
        )));
    }
    let ride_limit = (1..=n).map(|i| ride + locations[i + n].service).collect();
    let mut inst = Instance::from_locations(name, n, capacity, fleet, locations, ride_limit)?;
    inst.route_duration = Some(route_duration);
    Ok(inst)
}

/// Writes the benchmark format. Per-customer ride limits are not
/// representable there; the first customer's limit (minus its delivery
/// service) is written to the header.
pub fn write_cordeau(inst: &Instance) -> String {
    use std::fmt::Write;
    let n = inst.n;
    let ride = if n > 0 {
        inst.ride(1) - inst.locations[1 + n].service
    } else {
        0.0
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {}",
        inst.fleet,
        n,
        inst.route_duration.unwrap_or(0.0),
        inst.capacity,
        ride
    );
    for l in &inst.locations {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {}",
            l.id, l.x, l.y, l.service, l.load, l.early, l.late
        );
    }
    out
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not a number: {tok:?}"),
            })
        })
        .collect()
}

fn as_count(line: usize, v: f64, what: &str) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::Parse {
            line,
            msg: format!("{what} must be a non-negative integer, found {v}"),
        });
    }
    Ok(v as usize)
}

/// Tightens windows with one forward-backward pass per customer.
pub fn tighten_windows(inst: &Instance) -> Result<Instance> {
    let mut out = inst.clone();
    let n = inst.n;
    let sink = inst.sink();
    for i in 1..=n {
        let d = i + n;
        let r = out.ride(i);
        let (e0, lsink) = (out.early(0), out.late(sink));
        let t = |a, b| inst.time(a, b);

        let e_i = out.early(i).max(out.early(d) - r).max(e0 + t(0, i));
        out.locations[i].early = e_i;
        let l_d = out.late(d).min(out.late(i) + r).min(lsink - t(d, sink));
        out.locations[d].late = l_d;
        let l_i = out.late(i).min(out.late(d) - t(i, d));
        out.locations[i].late = l_i;
        let e_d = out.early(d).max(out.early(i) + t(i, d));
        out.locations[d].early = e_d;

        for loc in [i, d] {
            if out.early(loc) > out.late(loc) + EPS {
                return Err(Error::InfeasibleCustomer {
                    customer: i,
                    location: loc,
                    early: out.early(loc),
                    late: out.late(loc),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    DarpsvSet1,
    DarpsvSet2,
    Darp,
    Pdptw,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "darpsv-set1" => Ok(Variant::DarpsvSet1),
            "darpsv-set2" => Ok(Variant::DarpsvSet2),
            "darp" => Ok(Variant::Darp),
            "pdptw" => Ok(Variant::Pdptw),
            _ => Err(Error::Params(format!("unknown variant {s:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::DarpsvSet1 => "darpsv-set1",
            Variant::DarpsvSet2 => "darpsv-set2",
            Variant::Darp => "darp",
            Variant::Pdptw => "pdptw",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    /// Fraction of customers made large.
    pub large_fraction: f64,
    /// Pickup window width in minutes.
    pub pickup_window: f64,
    /// Ride-time factor applied to the direct travel time.
    pub ride_factor: f64,
    pub fleet_multiplier: usize,
    pub variant: Variant,
}

impl DatasetParams {
    pub fn set1() -> Self {
        DatasetParams {
            large_fraction: 1.0 / 3.0,
            pickup_window: 15.0,
            ride_factor: 1.5,
            fleet_multiplier: 3,
            variant: Variant::DarpsvSet1,
        }
    }

    pub fn set2(large_fraction: f64, pickup_window: f64, ride_factor: f64) -> Self {
        DatasetParams {
            large_fraction,
            pickup_window,
            ride_factor,
            fleet_multiplier: 4,
            variant: Variant::DarpsvSet2,
        }
    }

    pub fn darp(ride_factor: f64) -> Self {
        DatasetParams {
            large_fraction: 0.0,
            pickup_window: 15.0,
            ride_factor,
            fleet_multiplier: 4,
            variant: Variant::Darp,
        }
    }

    pub fn pdptw(ride_factor: f64) -> Self {
        DatasetParams {
            variant: Variant::Pdptw,
            ..DatasetParams::darp(ride_factor)
        }
    }

    /// Rejects values outside the experimental grid.
    pub fn validate(&self) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        if ![0.0, 1.0 / 6.0, 1.0 / 3.0]
            .iter()
            .any(|&v| close(v, self.large_fraction))
        {
            return Err(Error::Params(format!(
                "large fraction {} not in {{0, 1/6, 1/3}}",
                self.large_fraction
            )));
        }
        if ![15.0, 30.0].iter().any(|&v| close(v, self.pickup_window)) {
            return Err(Error::Params(format!(
                "pickup window {} not in {{15, 30}}",
                self.pickup_window
            )));
        }
        if ![1.5, 1.75, 2.0].iter().any(|&v| close(v, self.ride_factor)) {
            return Err(Error::Params(format!(
                "ride factor {} not in {{1.5, 1.75, 2.0}}",
                self.ride_factor
            )));
        }
        if !(3..=5).contains(&self.fleet_multiplier) {
            return Err(Error::Params(format!(
                "fleet multiplier {} not in {{3, 4, 5}}",
                self.fleet_multiplier
            )));
        }
        if matches!(self.variant, Variant::Darp | Variant::Pdptw) && self.large_fraction != 0.0 {
            return Err(Error::Params(format!(
                "variant {} requires a zero large fraction",
                self.variant
            )));
        }
        Ok(())
    }
}

/// Makes every k-th customer large with `q = 2Q`, where `k = round(1/fraction)`.
///
/// Customers `i` with `i % k == 0` are selected; a zero fraction selects none.
pub fn designate_large(inst: &Instance, fraction: f64) -> Instance {
    let mut out = inst.clone();
    if fraction <= 0.0 {
        return out;
    }
    let k = (1.0 / fraction).round().max(1.0) as usize;
    let n = inst.n;
    for i in (1..=n).filter(|i| i % k == 0) {
        out.locations[i].load = 2 * inst.capacity;
        out.locations[i + n].load = -2 * inst.capacity;
    }
    out
}

/// First dataset: original windows tightened, large customers designated and
/// the fleet scaled.
pub fn build_dataset1(inst: &Instance, params: &DatasetParams) -> Result<Instance> {
    let mut out = designate_large(inst, params.large_fraction);
    out.fleet = inst.fleet * params.fleet_multiplier;
    out.name = format!("{}-set1", inst.name);
    tighten_windows(&out)
}

/// Second dataset (and its DARP / PDPTW variants) from a tightened instance.
pub fn build_dataset2(inst: &Instance, params: &DatasetParams) -> Result<Instance> {
    let n = inst.n;
    let mut out = designate_large(inst, params.large_fraction);
    if params.large_fraction > 0.0 && out.large_customers().is_empty() {
        log::warn!(
            "{}: large fraction {} designates no large customer",
            inst.name,
            params.large_fraction
        );
    }
    const SHIFT: f64 = 30.0;
    for i in 1..=n {
        let d = i + n;
        let direct = inst.time(i, d);
        let e = inst.early(i).rem_euclid(60.0);
        out.locations[i].early = e + SHIFT;
        out.locations[i].late = e + params.pickup_window + SHIFT;
        out.locations[d].early = e + direct + SHIFT;
        out.locations[d].late = e + params.ride_factor * direct + SHIFT;
        out.ride_limit[i - 1] = match params.variant {
            Variant::Pdptw => 100.0 * direct,
            _ => params.ride_factor * direct,
        };
    }
    let max_late = (1..=2 * n).map(|i| out.late(i)).fold(out.late(0), f64::max);
    let sink = out.sink();
    out.locations[sink].late = 10.0 * max_late;
    out.fleet = inst.fleet * params.fleet_multiplier;
    out.name = format!(
        "{}-{}-rl{:.3}-tw{}-de{}-v{}",
        inst.name,
        params.variant,
        params.large_fraction,
        params.pickup_window,
        params.ride_factor,
        params.fleet_multiplier
    );
    out.check()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TINY: &str = "\
1 2 480 3 30
0 0 0 0 0 0 480
1 1 0 3 1 0 100
2 2 0 3 1 0 100
3 3 0 3 -1 0 200
4 4 0 3 -1 0 200
5 0 0 0 0 0 480
";

    #[test]
    fn header_fields_and_embedding() {
        let inst = parse_cordeau("tiny", TINY).unwrap();
        assert_eq!(inst.fleet, 1);
        assert_eq!(inst.n, 2);
        assert_eq!(inst.capacity, 3);
        assert_eq!(inst.route_duration, Some(480.0));
        assert_eq!(inst.ride(1), 33.0);
        assert!((inst.time(1, 3) - 5.0).abs() < 1e-12);
        assert!((inst.cost(1, 3) - 2.0).abs() < 1e-12);
        assert_eq!(inst.time(0, 1), 1.0);
    }

    #[test]
    fn a2_16_header() {
        let mut text = String::from("2 16 480 3 30\n");
        text.push_str("0 0 0 0 0 0 480\n");
        for i in 1..=32 {
            let load = if i <= 16 { 1 } else { -1 };
            text.push_str(&format!("{i} {i} 1 3 {load} 0 1440\n"));
        }
        let inst = parse_cordeau("a2-16", &text).unwrap();
        assert_eq!((inst.fleet, inst.n, inst.capacity), (2, 16, 3));
        assert_eq!(inst.ride(1), 33.0);
        assert_eq!(inst.sink(), 33);
        assert_eq!(inst.locations[33].x, 0.0);
    }

    #[test]
    fn empty_instance() {
        let inst =
            parse_cordeau("empty", "1 0 480 3 30\n0 0 0 0 0 0 480\n1 0 0 0 0 0 480\n").unwrap();
        assert_eq!(inst.n, 0);
        assert_eq!(inst.pickups().count(), 0);
        assert_eq!(inst.num_locations(), 2);
    }

    #[test]
    fn coincident_locations() {
        let text = "1 1 480 3 30\n0 0 0 0 0 0 480\n1 5 5 2 1 0 100\n2 5 5 2 -1 0 100\n";
        let inst = parse_cordeau("same", text).unwrap();
        assert_eq!(inst.time(1, 2), 2.0);
        assert_eq!(inst.cost(1, 2), 0.0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "1 1 480 3 30\n0 0 0 0 0 0 480\n1 5 x 2 1 0 100\n2 5 5 2 -1 0 100\n";
        match parse_cordeau("bad", text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_count_is_structural() {
        let text = "1 2 480 3 30\n0 0 0 0 0 0 480\n1 5 5 2 1 0 100\n2 5 5 2 -1 0 100\n";
        assert!(matches!(
            parse_cordeau("bad", text),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn tighten_pickup_from_delivery() {
        // e_i = 0, e_{i+n} = 100, R = 30
        let text = "1 1 480 3 27\n0 0 0 0 0 0 1000\n1 1 0 3 1 0 500\n2 2 0 3 -1 100 500\n";
        let inst = parse_cordeau("t", text).unwrap();
        assert_eq!(inst.ride(1), 30.0);
        let out = tighten_windows(&inst).unwrap();
        let expect = 0f64.max(100.0 - 30.0).max(0.0 + inst.time(0, 1));
        assert_eq!(out.early(1), expect);
        assert_eq!(out.early(1), 70.0);
    }

    #[test]
    fn tight_instance_is_fixed_point() {
        let inst = parse_cordeau("tiny", TINY).unwrap();
        let once = tighten_windows(&inst).unwrap();
        let twice = tighten_windows(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn collapsed_window_names_customer() {
        let text = "1 1 480 3 1\n0 0 0 0 0 0 1000\n1 1 0 3 1 0 10\n2 50 0 3 -1 0 500\n";
        let inst = parse_cordeau("t", text).unwrap();
        match tighten_windows(&inst) {
            Err(Error::InfeasibleCustomer { customer, .. }) => assert_eq!(customer, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dataset2_delivery_window() {
        // P_De = 1.5, T = 20, e_i = 10
        let text = "1 1 480 3 30\n0 0 0 0 0 0 1000\n1 0 0 0 1 10 400\n2 20 0 3 -1 0 800\n";
        let inst = parse_cordeau("t", text).unwrap();
        assert_eq!(inst.time(1, 2), 20.0);
        let p = DatasetParams::set2(0.0, 15.0, 1.5);
        let out = build_dataset2(&inst, &p).unwrap();
        assert_eq!(out.early(2), 30.0 + 30.0);
        assert_eq!(out.late(2), 40.0 + 30.0);
        assert_eq!(out.early(1), 40.0);
        assert_eq!(out.late(1), 55.0);
        assert_eq!(out.ride(1), 30.0);
        assert_eq!(out.fleet, 4);
    }

    #[test]
    fn zero_large_fraction_is_plain_darp() {
        let inst = parse_cordeau("tiny", TINY).unwrap();
        let out = build_dataset2(&inst, &DatasetParams::darp(1.5)).unwrap();
        assert!(out.large_customers().is_empty());
    }

    #[test]
    fn pdptw_ride_limit() {
        let inst = parse_cordeau("tiny", TINY).unwrap();
        let out = build_dataset2(&inst, &DatasetParams::pdptw(2.0)).unwrap();
        assert_eq!(out.ride(1), 100.0 * inst.time(1, 3));
    }

    #[test]
    fn every_third_customer_is_large() {
        let mut text = String::from("2 6 480 3 30\n0 0 0 0 0 0 480\n");
        for i in 1..=12 {
            let load = if i <= 6 { 1 } else { -1 };
            text.push_str(&format!("{i} {i} 1 3 {load} 0 1440\n"));
        }
        let inst = parse_cordeau("six", &text).unwrap();
        let out = designate_large(&inst, 1.0 / 3.0);
        assert_eq!(out.large_customers(), vec![3, 6]);
        assert_eq!(out.load(3), 6);
        assert_eq!(out.load(9), -6);
        assert_eq!(out.vehicles_needed(3), 2);
        assert_eq!(out.vehicles_needed(1), 1);
        assert_eq!(out.vehicles_needed(0), 0);
    }

    #[test]
    fn params_grid_is_enforced() {
        assert!(DatasetParams::set2(1.0 / 3.0, 15.0, 1.5).validate().is_ok());
        assert!(DatasetParams::set2(0.5, 15.0, 1.5).validate().is_err());
        assert!(DatasetParams::set2(0.0, 20.0, 1.5).validate().is_err());
        assert!(DatasetParams::darp(1.75).validate().is_ok());
    }

    #[test]
    fn json_round_trip() {
        let inst = parse_cordeau("tiny", TINY).unwrap();
        let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn arc_rules_for_large_customers() {
        let mut text = String::from("2 3 480 3 30\n0 0 0 0 0 0 480\n");
        for i in 1..=6 {
            let load = if i <= 3 { 1 } else { -1 };
            text.push_str(&format!("{i} {i} 1 3 {load} 0 1440\n"));
        }
        let inst = designate_large(&parse_cordeau("x", &text).unwrap(), 1.0 / 3.0);
        // customer 3 is large: pickup 3, delivery 6
        assert!(inst.arc_allowed(3, 6));
        assert!(!inst.arc_allowed(3, 1));
        assert!(!inst.arc_allowed(1, 3));
        assert!(inst.arc_allowed(0, 3));
        assert!(inst.arc_allowed(4, 3));
        assert!(!inst.arc_allowed(1, 6));
        assert!(inst.arc_allowed(6, 1));
        assert!(inst.arc_allowed(6, 7));
        // an unused vehicle goes straight to the destination depot
        assert!(inst.arc_allowed(0, 7));
        assert!(!inst.arc_allowed(7, 1));
    }
}
