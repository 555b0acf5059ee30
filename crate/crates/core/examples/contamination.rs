//! ε-contamination: how much of the planner's belief must come from an
//! unconstrained residual. The exact answer is compared with a grid search
//! over opinion weights.

use nrb::duality::{contamination_feasible, Contamination, ResidualFamily};
use nrb::exactnum::{format_rational, rat};
use nrb::measures::{CredalSet, ProbVector};
use nrb::oracle::grid_contamination_eps;
use nrb::pooling::{pool_min_eps_genest, PoolingInstance};

pub fn run() {
    let p = ProbVector::new(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
    let q = CredalSet::new(vec![
        ProbVector::new(vec![rat(1, 2), rat(1, 2), rat(0, 1)]).unwrap(),
        ProbVector::new(vec![rat(1, 1), rat(0, 1), rat(0, 1)]).unwrap(),
    ])
    .unwrap();
    let inst = PoolingInstance::unlabeled(p.clone(), q.clone()).unwrap();
    let eps = pool_min_eps_genest(&inst).unwrap().epsilon_min;
    println!("minimal contamination: {}", format_rational(&eps));
    let grid = grid_contamination_eps(&p, &q, 4).unwrap();
    assert!(grid >= eps);
    println!("grid search (quarters) finds {}", format_rational(&grid));

    for level in [eps.clone() / rat(2, 1), eps.clone()] {
        match contamination_feasible(&p, &q, &ResidualFamily::FullSimplex, &level).unwrap() {
            Contamination::Feasible(dec) => {
                assert!(dec.verify(&p, &q));
                println!(
                    "ε = {}: residual {:?}",
                    format_rational(&level),
                    dec.residual.weights().iter().map(format_rational).collect::<Vec<_>>()
                );
            }
            Contamination::Infeasible(w) => {
                assert!(w.verify(&p, &q, &ResidualFamily::FullSimplex, &level));
                println!(
                    "ε = {}: stakes {:?} rule it out",
                    format_rational(&level),
                    w.stakes.values().iter().map(format_rational).collect::<Vec<_>>()
                );
            }
        }
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
