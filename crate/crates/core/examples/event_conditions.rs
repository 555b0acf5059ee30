//! Event-level checks: does the planner respect every event ranking the
//! opinions agree on, and does each event probability stay within the
//! opinions' range?

use nrb::exactnum::{format_rational, rat};
use nrb::measures::{CredalSet, ProbVector};
use nrb::pooling::{check_condition_cm, check_event_minmax, pool_min_eps_additive, PoolingInstance};

pub fn run() {
    let planner = ProbVector::new(vec![rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
    let opinions = CredalSet::new(vec![
        ProbVector::new(vec![rat(2, 3), rat(1, 3), rat(0, 1)]).unwrap(),
        ProbVector::new(vec![rat(1, 3), rat(2, 3), rat(0, 1)]).unwrap(),
    ])
    .unwrap();
    let cm = check_condition_cm(&planner, &opinions, &rat(0, 1)).unwrap();
    println!(
        "unanimous rankings need ε ≥ {} (worst pair {:03b} over {:03b})",
        format_rational(&cm.min_required_eps),
        cm.worst_pair.0,
        cm.worst_pair.1
    );
    let additive = pool_min_eps_additive(&PoolingInstance::unlabeled(planner.clone(), opinions.clone()).unwrap())
        .unwrap()
        .epsilon_min;
    assert!(cm.min_required_eps <= additive);

    let mm = check_event_minmax(&planner, &opinions).unwrap();
    println!(
        "range condition needs ε ≥ {} above the maximum and {} below the minimum",
        format_rational(&mm.eps_i),
        format_rational(&mm.eps_ii)
    );
}

#[allow(dead_code)]
fn main() {
    run();
}
