//! Two forecasters who both rule out the third outcome, and a planner who
//! spreads mass evenly: the additive and contamination pools disagree on
//! how far the planner is from a consensus.

use nrb::exactnum::{format_rational, rat};
use nrb::measures::{CredalSet, PointSpace, ProbVector};
use nrb::pooling::{
    check_condition_c, pool_min_eps_additive, pool_min_eps_genest, pooled_opinion, PoolingInstance,
};

pub fn run() {
    let space = PointSpace::numbered(3).unwrap();
    let planner = ProbVector::new(vec![rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
    let opinions = CredalSet::new(vec![
        ProbVector::new(vec![rat(2, 3), rat(1, 3), rat(0, 1)]).unwrap(),
        ProbVector::new(vec![rat(1, 3), rat(2, 3), rat(0, 1)]).unwrap(),
    ])
    .unwrap();
    let inst = PoolingInstance::new(space, planner, opinions).unwrap();

    let additive = pool_min_eps_additive(&inst).unwrap();
    assert_eq!(additive.epsilon_min, rat(2, 3));
    assert!(additive.verify(&inst));
    let pooled = pooled_opinion(&additive, &inst).unwrap();
    println!(
        "additive: ‖P − Q_m‖₁ = {} with Q_m = {:?}",
        format_rational(&additive.epsilon_min),
        pooled.weights().iter().map(format_rational).collect::<Vec<_>>()
    );

    let genest = pool_min_eps_genest(&inst).unwrap();
    assert_eq!(genest.epsilon_min, rat(1, 3));
    println!(
        "contamination: P = (1−ε)Q_m + εR with ε = {}, R = {:?}",
        format_rational(&genest.epsilon_min),
        genest.residual.as_ref().unwrap().weights().iter().map(format_rational).collect::<Vec<_>>()
    );

    for eps in [rat(1, 2), rat(2, 3)] {
        let check = check_condition_c(&inst, &eps).unwrap();
        assert_eq!(check.holds, eps >= rat(2, 3));
        match &check.witness {
            Some(w) => {
                assert!(w.verify(&inst, &eps));
                println!(
                    "ε = {}: violated, conclusion fails by {}",
                    format_rational(&eps),
                    format_rational(&w.violation_amount)
                );
            }
            None => println!("ε = {}: holds", format_rational(&eps)),
        }
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
