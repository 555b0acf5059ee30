//! Four alternatives, uniform choice on every menu except the triples, where
//! the lowest-numbered alternative is slightly favoured. The distance to the
//! random utility polytope is computed exactly and compared with two explicit
//! stochastic preferences.

use nrb::exactnum::{format_rational, rat, Rational};
use nrb::rum::{build_matrix, rum_min_eps, RumInstance, StrictOrdering};
use num_traits::Zero;

fn tilted() -> RumInstance {
    let names = ["1", "2", "3", "4"].map(String::from).to_vec();
    RumInstance::from_fn(names, |y, m| match m.count_ones() {
        3 if y == m.trailing_zeros() as usize => rat(2, 5),
        3 => rat(3, 10),
        k => rat(1, k as i64),
    })
    .unwrap()
}

fn l1(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| num_traits::Signed::abs(&(x - y))).sum()
}

pub fn run() {
    let inst = tilted();
    let a = build_matrix(&inst).unwrap();
    let report = rum_min_eps(&inst, &a).unwrap();
    assert_eq!(report.epsilon_min, rat(1, 10));
    assert!(report.verify(&inst, &a));
    println!("min ‖P₀ − Aπ‖₁ = {}", format_rational(&report.epsilon_min));

    // A hand-picked preference: weights in twentieths on listed rankings.
    let listed: [(&str, i64); 13] = [
        ("1342", 1), ("2341", 1), ("3124", 1), ("3142", 1), ("3241", 1), ("4123", 1), ("4132", 1),
        ("4231", 1), ("4321", 1), ("1432", 2), ("2143", 2), ("2431", 2), ("3421", 2),
    ];
    let mut pi = vec![Rational::zero(); a.cols()];
    let mut place = |digits: &str, w: Rational| {
        let ranking = digits.bytes().map(|b| (b - b'1') as usize).collect();
        let order = StrictOrdering::new(ranking).unwrap();
        let j = a.orderings().iter().position(|o| o == &order).unwrap();
        pi[j] += w;
    };
    for (digits, w) in listed {
        place(digits, rat(w, 20));
    }
    place("1234", rat(3, 20));
    let hand = l1(inst.choice(), &a.apply(&pi));
    assert_eq!(hand, rat(1, 10));
    println!("hand-picked preference also reaches {}", format_rational(&hand));

    let uniform = vec![rat(1, 24); 24];
    let gap = l1(inst.choice(), &a.apply(&uniform));
    assert_eq!(gap, rat(8, 15));
    println!("uniform preference: ‖P₀ − Aπ‖₁ = {}", format_rational(&gap));
}

#[allow(dead_code)]
fn main() {
    run();
}
