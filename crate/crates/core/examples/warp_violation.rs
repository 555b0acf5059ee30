//! A deterministic chooser that picks x from {x, y} but y from {x, y, z}.
//! The choice is as far from any random utility model as ℓ₁ allows on the
//! affected menus, and a two-tag trial sequence exposes it.

use nrb::exactnum::{format_rational, int, rat};
use nrb::oracle::{exhaustive_rum_check, ExhaustiveOutcome};
use nrb::rum::{build_matrix, check_eps_arsp, rum_min_eps, RumInstance};

pub fn run() {
    let names = ["x", "y", "z"].map(String::from).to_vec();
    let inst = RumInstance::deterministic(names, |m| match m {
        0b011 => 0,
        0b111 => 1,
        _ => m.trailing_zeros() as usize,
    })
    .unwrap();
    let a = build_matrix(&inst).unwrap();
    let eps_min = rum_min_eps(&inst, &a).unwrap().epsilon_min;
    assert!(eps_min >= int(2));
    println!("min ε = {}", format_rational(&eps_min));

    for eps in [int(0), int(1), rat(3, 2), rat(199, 100)] {
        let check = check_eps_arsp(&inst, &a, &eps).unwrap();
        let cert = check.certificate.expect("violated below the threshold");
        let margin = cert.arsp_violation(&inst, &a, &eps).expect("certificate re-verifies");
        println!(
            "ε = {}: tags with width {} violate by {}",
            format_rational(&eps),
            cert.width,
            format_rational(&margin)
        );
    }

    match exhaustive_rum_check(&inst, &int(1), 1).unwrap() {
        ExhaustiveOutcome::Violation(t) => {
            let tagged: Vec<String> = t
                .tags
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.into())
                .map(|(i, _)| inst.pair_label(i))
                .collect();
            assert_eq!(tagged, ["x|x,y", "y|x,y,z"]);
            println!("exhaustive search finds tags on {}", tagged.join(" and "));
        }
        ExhaustiveOutcome::HoldsUpTo(_) => panic!("the two-tag violation exists"),
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
