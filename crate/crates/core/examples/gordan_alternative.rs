//! For two credal sets exactly one of two things happens at each level ε:
//! some unit stakes separate them by more than ε, or two mixtures lie within
//! ε of each other. Sweeping ε shows the switch at the set distance.

use nrb::duality::{gordan_decide, min_set_distance, GordanOutcome};
use nrb::exactnum::{format_rational, rat};
use nrb::measures::{CredalSet, ProbVector};

fn set(rows: &[[i64; 3]]) -> CredalSet {
    CredalSet::new(
        rows.iter()
            .map(|r| ProbVector::new(r.iter().map(|&w| rat(w, 12)).collect()).unwrap())
            .collect(),
    )
    .unwrap()
}

pub fn run() {
    let p = set(&[[12, 0, 0], [6, 6, 0]]);
    let q = set(&[[0, 3, 9], [2, 2, 8]]);
    let d = min_set_distance(&p, &q).unwrap();
    println!("distance between hulls: {}", format_rational(&d.value));
    for eps in [rat(0, 1), rat(1, 2), d.value.clone(), rat(2, 1)] {
        let outcome = gordan_decide(&p, &q, &eps).unwrap();
        assert!(outcome.verify(&p, &q, &eps));
        assert_eq!(outcome.is_separation(), eps < d.value);
        match outcome {
            GordanOutcome::Separation { stakes, gap } => println!(
                "ε = {}: stakes {:?} separate by {}",
                format_rational(&eps),
                stakes.values().iter().map(format_rational).collect::<Vec<_>>(),
                format_rational(&gap)
            ),
            GordanOutcome::Proximity { distance, .. } => {
                println!("ε = {}: mixtures within {}", format_rational(&eps), format_rational(&distance))
            }
        }
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
