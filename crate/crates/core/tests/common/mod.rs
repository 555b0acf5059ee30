//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use nrb::exactnum::{rat, Rational};
use nrb::measures::{CredalSet, ProbVector};
use nrb::rum::{PairIndex, RumInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A probability vector with small denominators, zeros included.
pub fn prob(rng: &mut impl Rng, n: usize) -> ProbVector {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
        let s: i64 = w.iter().sum();
        if s > 0 {
            return ProbVector::new(w.iter().map(|&x| rat(x, s)).collect()).unwrap();
        }
    }
}

pub fn credal(rng: &mut impl Rng, n: usize, members: usize) -> CredalSet {
    CredalSet::new((0..members).map(|_| prob(rng, n)).collect()).unwrap()
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i}")).collect()
}

/// Independent random distributions on every menu.
pub fn random_choice(rng: &mut impl Rng, n: usize) -> RumInstance {
    let index = PairIndex::new(n).unwrap();
    let mut choice = vec![Rational::from_integer(0.into()); index.len()];
    for k in 0..index.menus().len() {
        let rows = index.menu_rows(k);
        let p = prob(rng, rows.len());
        for (row, w) in rows.zip(p.weights()) {
            choice[row] = w.clone();
        }
    }
    RumInstance::from_vector(names(n), choice).unwrap()
}

/// A random stochastic preference over the `n!` orderings, sparse about half
/// the time.
pub fn random_preference(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let count: usize = (1..=n).product();
    let sparse = rng.gen_bool(0.5);
    loop {
        let w: Vec<i64> = (0..count)
            .map(|_| if sparse && rng.gen_bool(0.8) { 0 } else { rng.gen_range(0..=5) })
            .collect();
        let s: i64 = w.iter().sum();
        if s > 0 {
            return w.iter().map(|&x| rat(x, s)).collect();
        }
    }
}

/// Mixes a preference-generated choice with an arbitrary one.
pub fn perturbed_choice(rng: &mut impl Rng, n: usize, mix: Rational) -> RumInstance {
    let pi = random_preference(rng, n);
    let base = RumInstance::from_preference(names(n), &pi).unwrap();
    let noise = random_choice(rng, n);
    let keep = Rational::from_integer(1.into()) - &mix;
    let choice = base
        .choice()
        .iter()
        .zip(noise.choice())
        .map(|(b, z)| &keep * b + &mix * z)
        .collect();
    RumInstance::from_vector(names(n), choice).unwrap()
}
