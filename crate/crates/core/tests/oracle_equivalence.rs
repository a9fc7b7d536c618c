use darpsv::formulations::{solve, Formulation, SolveConfig};
use darpsv::gen::{random_instance, RandomParams};
use darpsv::milp::Status;
use darpsv::validate::{brute_optimum, check};

fn configs() -> Vec<SolveConfig> {
    vec![
        SolveConfig::new(Formulation::Abf),
        SolveConfig::new(Formulation::Ebf),
        SolveConfig::new(Formulation::Tsfrag).with_ddd(),
    ]
}

#[test]
fn formulations_match_brute_force() {
    let mut feasible = 0;
    for seed in 0..40u64 {
        let params = RandomParams {
            n: 1 + (seed % 4) as usize,
            fleet: 2 + (seed % 2) as usize,
            ..RandomParams::default()
        };
        let inst = random_instance(seed, &params);
        let oracle = brute_optimum(&inst).unwrap();
        for cfg in configs() {
            let rep = solve(&inst, &cfg).unwrap();
            match &oracle {
                None => assert_eq!(rep.status, Status::Infeasible, "seed {seed} {}", rep.method),
                Some((obj, _)) => {
                    assert_eq!(rep.status, Status::Optimal, "seed {seed} {}", rep.method);
                    assert!(
                        (rep.objective - obj).abs() < 1e-4,
                        "seed {seed} {}: {} vs {obj}",
                        rep.method,
                        rep.objective
                    );
                    let v = check(&inst, &rep.routes);
                    assert!(v.is_empty(), "seed {seed} {}: {v:?}", rep.method);
                }
            }
        }
        feasible += oracle.is_some() as usize;
    }
    assert!(feasible >= 10, "only {feasible} feasible");
}
