//! The brute-force verifiers next to the simplex answers on a small
//! instance: vertex enumeration, a stakes grid, and a generic box-bounded LP.

use nrb::duality::min_set_distance;
use nrb::exactnum::{format_rational, rat, solve_lp, LinearProgram, Relation, Sense, VarBounds};
use nrb::measures::{CredalSet, ProbVector};
use nrb::oracle::{grid_max_gap, vertex_distance, vertex_lp_optimum, GridSpec};

pub fn run() {
    let p = CredalSet::new(vec![
        ProbVector::new(vec![rat(1, 2), rat(1, 2), rat(0, 1)]).unwrap(),
        ProbVector::new(vec![rat(1, 5), rat(3, 5), rat(1, 5)]).unwrap(),
    ])
    .unwrap();
    let q = CredalSet::new(vec![ProbVector::new(vec![rat(0, 1), rat(1, 4), rat(3, 4)]).unwrap()]).unwrap();
    let lp = min_set_distance(&p, &q).unwrap().value;
    let vertex = vertex_distance(&p, &q).unwrap();
    assert_eq!(lp, vertex);
    println!("distance: simplex {} = vertices {}", format_rational(&lp), format_rational(&vertex));
    for k in 1..=4 {
        let g = grid_max_gap(&p, &q, GridSpec::new(k).unwrap()).unwrap();
        assert!(g <= lp);
        println!("grid resolution {k}: lower bound {}", format_rational(&g));
    }

    let mut prog = LinearProgram::new(Sense::Maximize, vec![rat(3, 1), rat(2, 1)]);
    prog.add_constraint(vec![rat(1, 1), rat(1, 1)], Relation::Le, rat(4, 1));
    prog.add_constraint(vec![rat(1, 1), rat(3, 1)], Relation::Le, rat(6, 1));
    for var in 0..2 {
        prog.set_bounds(var, VarBounds::between(rat(0, 1), rat(3, 1)));
    }
    let simplex = solve_lp(&prog).unwrap().objective_value;
    let brute = vertex_lp_optimum(&prog).unwrap().unwrap();
    assert_eq!(simplex, brute);
    println!("small LP: simplex {} = vertices {}", format_rational(&simplex), format_rational(&brute));
}

#[allow(dead_code)]
fn main() {
    run();
}
