//! Small hand-built instances where grid rounding changes the answer.

use crate::instance::{Instance, Loc, Location, Matrix};

/// Matrix instance with unit loads, travel cost equal to travel time, depot
/// arcs of length `depot` and all unlisted customer arcs unusable.
pub fn matrix_instance(
    name: &str,
    n: usize,
    windows: &[(f64, f64)],
    times: &[(Loc, Loc, f64)],
    depot: f64,
    ride: f64,
) -> Instance {
    let dim = 2 * n + 2;
    let mut tt = Matrix::from_fn(dim, |i, j| {
        if i == j {
            0.0
        } else if i == 0 || j == dim - 1 || i == dim - 1 || j == 0 {
            depot
        } else {
            10_000.0
        }
    });
    for &(i, j, t) in times {
        tt.set(i, j, t);
    }
    let locations = (0..dim)
        .map(|k| Location {
            id: k,
            x: 0.0,
            y: 0.0,
            service: 0.0,
            load: if k == 0 || k == dim - 1 {
                0
            } else if k <= n {
                1
            } else {
                -1
            },
            early: windows[k].0,
            late: windows[k].1,
        })
        .collect();
    Instance::from_matrices(name, n, 3, 1, locations, vec![ride; n], tt.clone(), tt)
        .expect("fixture is well formed")
}

/// Route `(p1, p2, d1, d2)` served at 600/624/626/650 with ride limits of
/// 26. Feasible in continuous time; a 10-minute grid loses it.
pub fn ride_rounding() -> Instance {
    matrix_instance(
        "ride-rounding",
        2,
        &[
            (0.0, 2000.0),
            (600.0, 600.0),
            (620.0, 640.0),
            (620.0, 630.0),
            (650.0, 650.0),
            (0.0, 2000.0),
        ],
        &[(1, 2, 24.0), (2, 3, 2.0), (3, 4, 24.0)],
        100.0,
        26.0,
    )
}

/// The cycle `(p1, p2, d1, d2, p1)` takes 9 minutes. Rounding down to a
/// 10-minute grid closes it in zero time; a 5-minute grid cannot.
pub fn subtour_rounding() -> Instance {
    let w = (600.0, 660.0);
    matrix_instance(
        "subtour-rounding",
        2,
        &[(0.0, 2000.0), w, w, w, w, (0.0, 2000.0)],
        &[(1, 2, 6.0), (2, 3, 1.0), (3, 4, 1.0), (4, 1, 1.0)],
        100.0,
        30.0,
    )
}
