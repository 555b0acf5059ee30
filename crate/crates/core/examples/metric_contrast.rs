//! Point masses at 0 and at 1/k on the real line: total variation stays at
//! its maximum 2 while the Kantorovich–Rubinstein distance shrinks to 0.

use nrb::duality::min_set_distance;
use nrb::exactnum::{format_rational, int, rat, Rational};
use nrb::measures::{kr_distance, CredalSet, PointSpace, ProbVector};

pub fn run() {
    let mut points: Vec<Rational> = vec![int(0)];
    points.extend((1..=5).map(|k| rat(1, k)));
    let space = PointSpace::on_line(&points).unwrap();
    let n = points.len();
    let origin = ProbVector::point_mass(n, 0);
    for k in 1..=5usize {
        let target = ProbVector::point_mass(n, k);
        let tv = min_set_distance(&CredalSet::singleton(origin.clone()), &CredalSet::singleton(target.clone()))
            .unwrap()
            .value;
        let (kr, _) = kr_distance(&space, &origin, &target).unwrap();
        assert_eq!(tv, int(2));
        assert_eq!(kr, rat(1, k as i64));
        println!("k = {k}: ‖δ₀ − δ_1/k‖₁ = {}, KR = {}", format_rational(&tv), format_rational(&kr));
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
