//! Block–Marschak polynomials detect random-utility violations through
//! inclusion–exclusion; their negative mass is set against the exact ℓ₁
//! distance to the polytope.

use nrb::blockmarschak::{bm_negative_norm, bm_polynomials, hoffman_ratio};
use nrb::exactnum::{format_rational, rat, Rational};
use nrb::rum::{build_matrix, RumInstance};
use num_traits::{Signed, Zero};

pub fn run() {
    let names: Vec<String> = ["1", "2", "3", "4"].map(String::from).to_vec();
    let tilted = RumInstance::from_fn(names.clone(), |y, m| match m.count_ones() {
        3 if y == m.trailing_zeros() as usize => rat(2, 5),
        3 => rat(3, 10),
        k => rat(1, k as i64),
    })
    .unwrap();
    let k = bm_polynomials(&tilted);
    for (i, v) in k.values.iter().enumerate().filter(|(_, v)| v.is_negative()) {
        println!("K({}) = {}", tilted.pair_label(i), format_rational(v));
    }
    let a = build_matrix(&tilted).unwrap();
    let diag = hoffman_ratio(&tilted, &a).unwrap();
    println!(
        "ε = {}, negative mass = {}, ratio = {}",
        format_rational(&diag.epsilon_min),
        format_rational(&diag.negative_norm),
        format_rational(diag.ratio.as_ref().unwrap())
    );

    let pi: Vec<Rational> = (1..=24).map(|j| rat(j, 300)).collect();
    let rational = RumInstance::from_preference(names, &pi).unwrap();
    assert!(bm_negative_norm(&rational).is_zero());
    println!("a choice generated by a preference has no negative polynomial");
}

#[allow(dead_code)]
fn main() {
    run();
}
