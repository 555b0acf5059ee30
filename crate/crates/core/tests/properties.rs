//! Property tests over random small instances.

mod common;

use nrb::blockmarschak::bm_polynomials;
use nrb::duality::{contamination_feasible, min_set_distance, Contamination, ResidualFamily};
use nrb::exactnum::{int, rat, solve_lp, LinearProgram, LpStatus, Rational, Relation, Sense, VarBounds};
use nrb::measures::{hahn_split, kr_distance, l1_distance, mixture, CredalSet, PointSpace, ProbVector, SignedVector};
use nrb::oracle::{grid_max_gap, vertex_distance, vertex_lp_optimum, GridSpec};
use nrb::pooling::{
    check_condition_cm, check_event_minmax, pool_min_eps_additive, pool_min_eps_genest, pool_min_eps_normalized,
    pooled_opinion, PoolingInstance,
};
use nrb::rum::{
    build_matrix, check_eps_arsp, normalized_vectors, rum_min_eps, rum_residual_min_eps, RumInstance,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn prob(n: usize) -> impl Strategy<Value = ProbVector> {
    prop::collection::vec(0i64..=6, n)
        .prop_filter("some mass", |w| w.iter().sum::<i64>() > 0)
        .prop_map(|w| {
            let s: i64 = w.iter().sum();
            ProbVector::new(w.iter().map(|&x| rat(x, s)).collect()).unwrap()
        })
}

fn credal(n: usize, max: usize) -> impl Strategy<Value = CredalSet> {
    prop::collection::vec(prob(n), 1..=max).prop_map(|m| CredalSet::new(m).unwrap())
}

fn set_pair() -> impl Strategy<Value = (CredalSet, CredalSet)> {
    (2usize..=5).prop_flat_map(|n| (credal(n, 4), credal(n, 4)))
}

fn pooling() -> impl Strategy<Value = PoolingInstance> {
    (2usize..=5)
        .prop_flat_map(|n| (prob(n), credal(n, 4)))
        .prop_map(|(p, q)| PoolingInstance::unlabeled(p, q).unwrap())
}

/// A box-bounded program with up to four variables and four rows.
fn bounded_lp() -> impl Strategy<Value = LinearProgram> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            any::<bool>(),
            prop::collection::vec(-4i64..=4, n),
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), 0u8..3, -2i64..=6), m),
            prop::collection::vec((-2i64..=0, 1i64..=4), n),
        )
            .prop_map(|(maximize, c, rows, bounds)| {
                let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
                let mut lp = LinearProgram::new(sense, c.into_iter().map(int).collect());
                for (coeffs, rel, rhs) in rows {
                    let relation = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
                    lp.add_constraint(coeffs.into_iter().map(int).collect(), relation, int(rhs));
                }
                for (j, (lo, hi)) in bounds.into_iter().enumerate() {
                    lp.set_bounds(j, VarBounds::between(int(lo), int(hi)));
                }
                lp
            })
    })
}

fn line_space() -> impl Strategy<Value = (PointSpace, usize)> {
    prop::collection::btree_set(-10i64..=10, 2..=5).prop_map(|pts| {
        let points: Vec<Rational> = pts.into_iter().map(|p| rat(p, 4)).collect();
        let n = points.len();
        (PointSpace::on_line(&points).unwrap(), n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn simplex_matches_vertex_enumeration(lp in bounded_lp()) {
        let sol = solve_lp(&lp).unwrap();
        let brute = vertex_lp_optimum(&lp).unwrap();
        match brute {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert_eq!(&sol.objective_value, &v);
                prop_assert!(sol.check_optimality(&lp).is_ok());
                prop_assert_eq!(sol.dual_objective(&lp), Some(v));
                for c in &lp.constraints {
                    let lhs: Rational = c.coeffs.iter().zip(&sol.primal).map(|(a, x)| a * x).sum();
                    let ok = match c.relation {
                        Relation::Le => lhs <= c.rhs,
                        Relation::Ge => lhs >= c.rhs,
                        Relation::Eq => lhs == c.rhs,
                    };
                    prop_assert!(ok);
                }
            }
        }
        prop_assert_eq!(solve_lp(&lp).unwrap(), sol);
    }

    #[test]
    fn kr_is_dominated_by_total_variation((space, n) in line_space(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (p, q, r) = (common::prob(&mut rng, n), common::prob(&mut rng, n), common::prob(&mut rng, n));
        let kr = |a: &ProbVector, b: &ProbVector| kr_distance(&space, a, b).unwrap().0;
        let tv = |a: &ProbVector, b: &ProbVector| l1_distance(a, b).unwrap();
        prop_assert!(kr(&p, &q) <= tv(&p, &q));
        prop_assert_eq!(kr(&p, &q), kr(&q, &p));
        prop_assert_eq!(tv(&p, &q), tv(&q, &p));
        prop_assert!(kr(&p, &r) <= kr(&p, &q) + kr(&q, &r));
        prop_assert!(tv(&p, &r) <= tv(&p, &q) + tv(&q, &r));
        prop_assert_eq!(kr(&p, &q).is_zero(), p == q);
        prop_assert_eq!(tv(&p, &q).is_zero(), p == q);
        prop_assert!(!kr(&p, &q).is_negative());
    }

    #[test]
    fn mixtures_and_sign_splits(set in credal(4, 4), raw in prop::collection::vec(0i64..=5, 4)) {
        let raw: Vec<i64> = raw[..set.len()].to_vec();
        let total: i64 = raw.iter().sum();
        prop_assume!(total > 0);
        let w: Vec<Rational> = raw.iter().map(|&x| rat(x, total)).collect();
        let m = mixture(&w, &set).unwrap();
        prop_assert!(m.weights().iter().sum::<Rational>().is_one());
        let e = SignedVector::difference(m.weights(), set.members()[0].weights());
        let (pos, neg) = hahn_split(&e);
        for x in 0..4 {
            prop_assert_eq!(&e.weights[x], &(&pos.weights[x] - &neg.weights[x]));
            prop_assert!(pos.weights[x].is_zero() || neg.weights[x].is_zero());
        }
        prop_assert_eq!(e.l1_norm(), pos.total() + neg.total());
    }

    #[test]
    fn distance_matches_vertices_and_is_monotone((p, q) in set_pair(), extra_seed in any::<u64>()) {
        let d = min_set_distance(&p, &q).unwrap();
        prop_assert_eq!(&d.value, &vertex_distance(&p, &q).unwrap());
        prop_assert!(d.verify(&p, &q));
        let mut rng = common::rng(extra_seed);
        let mut bigger = q.members().to_vec();
        bigger.push(common::prob(&mut rng, q.dim()));
        let larger = CredalSet::new(bigger).unwrap();
        prop_assert!(min_set_distance(&p, &larger).unwrap().value <= d.value);
        prop_assert!(min_set_distance(&larger, &p).unwrap().value <= d.value);
    }

    #[test]
    fn grid_bounds_the_distance_from_below((p, q) in set_pair()) {
        let d = min_set_distance(&p, &q).unwrap().value;
        let mut last = int(-1);
        for k in [1, 2, 4, 8] {
            let g = grid_max_gap(&p, &q, GridSpec::new(k).unwrap()).unwrap();
            prop_assert!(g <= d);
            prop_assert!(g >= last);
            last = g;
        }
    }

    #[test]
    fn full_simplex_contamination_is_monotone(inst in pooling(), num in 0i64..=8) {
        let eps = rat(num, 8);
        let feasible = |e: &Rational| {
            matches!(
                contamination_feasible(&inst.planner, &inst.opinions, &ResidualFamily::FullSimplex, e).unwrap(),
                Contamination::Feasible(_)
            )
        };
        let here = feasible(&eps);
        let genest = pool_min_eps_genest(&inst).unwrap().epsilon_min;
        prop_assert_eq!(here, genest <= eps);
        if here {
            for up in num..=8 {
                prop_assert!(feasible(&rat(up, 8)));
            }
        }
    }

    #[test]
    fn pooling_relations(inst in pooling()) {
        let additive = pool_min_eps_additive(&inst).unwrap();
        let singleton = CredalSet::singleton(inst.planner.clone());
        prop_assert_eq!(&additive.epsilon_min, &min_set_distance(&singleton, &inst.opinions).unwrap().value);
        let genest = pool_min_eps_genest(&inst).unwrap().epsilon_min;
        prop_assert!(int(2) * &genest >= additive.epsilon_min);
        let normalized = pool_min_eps_normalized(&inst, true).unwrap().epsilon_min;
        let cm = check_condition_cm(&inst.planner, &inst.opinions, &normalized).unwrap();
        prop_assert!(cm.min_required_eps <= normalized);
        prop_assert!(cm.holds);
        let mm = check_event_minmax(&inst.planner, &inst.opinions).unwrap();
        prop_assert!(mm.eps_i <= normalized);
        if additive.epsilon_min.is_zero() {
            prop_assert_eq!(pooled_opinion(&additive, &inst).unwrap(), inst.planner.clone());
        }
        let free = pool_min_eps_normalized(&inst, false).unwrap().epsilon_min;
        prop_assert!(free <= normalized);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_utility_relations(seed in any::<u64>(), n in 2usize..=4, level in 0i64..=12) {
        let mut rng = common::rng(seed);
        let inst = match seed % 3 {
            0 => common::random_choice(&mut rng, n),
            1 => common::perturbed_choice(&mut rng, n, rat(1, 5)),
            _ => RumInstance::from_preference(common::names(n), &common::random_preference(&mut rng, n)).unwrap(),
        };
        let a = build_matrix(&inst).unwrap();
        let report = rum_min_eps(&inst, &a).unwrap();
        let eps = rat(level, 12);
        let check = check_eps_arsp(&inst, &a, &eps).unwrap();
        prop_assert_eq!(check.holds, report.epsilon_min <= eps);
        if let Some(t) = &check.certificate {
            prop_assert!(t.tags.iter().all(|v| !v.is_negative()));
            prop_assert!(t.arsp_violation(&inst, &a, &eps).is_some());
        }

        let menus = int((1i64 << n) - 1);
        let (p, q) = normalized_vectors(&inst, &a).unwrap();
        let d = min_set_distance(&CredalSet::singleton(p), &q).unwrap().value;
        prop_assert_eq!(&report.epsilon_min, &(&menus * d));

        let residual = rum_residual_min_eps(&inst, &a).unwrap().epsilon_min;
        let scale = int((1i64 << (n + 1)) - 2);
        prop_assert!(report.epsilon_min <= scale * residual);
    }

    #[test]
    fn choice_from_any_preference_is_stochastic(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = common::rng(seed);
        let pi = common::random_preference(&mut rng, n);
        let inst = RumInstance::from_preference(common::names(n), &pi).unwrap();
        let a = build_matrix(&inst).unwrap();
        let ap = a.apply(&pi);
        let index = inst.index();
        for k in 0..index.menus().len() {
            let total: Rational = ap[index.menu_rows(k)].iter().cloned().sum();
            prop_assert!(total.is_one());
        }
        prop_assert!(rum_min_eps(&inst, &a).unwrap().epsilon_min.is_zero());
    }

    #[test]
    fn block_marschak_is_linear_and_telescopes(seed in any::<u64>(), n in 2usize..=4, num in 0i64..=6) {
        let mut rng = common::rng(seed);
        let p = common::random_choice(&mut rng, n);
        let q = common::random_choice(&mut rng, n);
        let alpha = rat(num, 6);
        let beta = Rational::one() - &alpha;
        let mixed: Vec<Rational> = p.choice().iter().zip(q.choice()).map(|(x, y)| &alpha * x + &beta * y).collect();
        let mixed = RumInstance::from_vector(common::names(n), mixed).unwrap();
        let (kp, kq, km) = (bm_polynomials(&p), bm_polynomials(&q), bm_polynomials(&mixed));
        for i in 0..km.values.len() {
            prop_assert_eq!(&km.values[i], &(&alpha * &kp.values[i] + &beta * &kq.values[i]));
        }
        for y in 0..n {
            let total: Rational = p
                .index()
                .pairs()
                .iter()
                .zip(&kp.values)
                .filter(|((a, _), _)| *a == y)
                .map(|(_, v)| v.clone())
                .sum();
            prop_assert_eq!(&total, p.probability(y, 1 << y).unwrap());
        }
    }
}

/// The textbook form `min Σz` with `z ≥ |P₀ − Aπ|` on the tilted menus.
#[test]
fn literal_slack_program_on_tilted_menus() {
    let inst = RumInstance::from_fn(common::names(4), |y, m| match m.count_ones() {
        3 if y == m.trailing_zeros() as usize => rat(2, 5),
        3 => rat(3, 10),
        k => rat(1, k as i64),
    })
    .unwrap();
    let a = build_matrix(&inst).unwrap();
    let (rows, cols) = (a.rows(), a.cols());
    let mut objective = vec![int(0); cols + rows];
    for v in objective.iter_mut().skip(cols) {
        *v = int(1);
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for i in 0..rows {
        // z_i − P₀ᵢ + (Aπ)ᵢ ≥ 0 and z_i + P₀ᵢ − (Aπ)ᵢ ≥ 0.
        for sign in [1i64, -1] {
            let mut row = vec![int(0); cols + rows];
            for (j, slot) in row.iter_mut().enumerate().take(cols) {
                if a.entry(i, j) {
                    *slot = int(sign);
                }
            }
            row[cols + i] = int(1);
            lp.add_constraint(row, Relation::Ge, int(sign) * &inst.choice()[i]);
        }
    }
    let mut total = vec![int(1); cols];
    total.extend(vec![int(0); rows]);
    lp.add_constraint(total, Relation::Eq, int(1));
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.objective_value, rat(1, 10));
    assert!(sol.check_optimality(&lp).is_ok());
}

/// Deterministic three-alternative choices: zero distance exactly when every
/// Block–Marschak polynomial is nonnegative, on vertices and midpoints.
#[test]
fn bm_equivalence_on_vertex_grid() {
    let sets: [u32; 4] = [0b011, 0b101, 0b110, 0b111];
    let mut vertices = Vec::new();
    for code in 0..(2 * 2 * 2 * 3) {
        let mut c = code;
        let mut pick = std::collections::BTreeMap::new();
        for &m in &sets {
            let members: Vec<usize> = (0..3).filter(|i| m & (1 << i) != 0).collect();
            pick.insert(m, members[c % members.len()]);
            c /= members.len();
        }
        let chooser = |m: u32| pick.get(&m).copied().unwrap_or(m.trailing_zeros() as usize);
        vertices.push(RumInstance::deterministic(common::names(3), chooser).unwrap());
    }
    let half = rat(1, 2);
    let mut all = vertices.clone();
    for (i, u) in vertices.iter().enumerate() {
        for v in &vertices[i + 1..] {
            let mid = u.choice().iter().zip(v.choice()).map(|(x, y)| &half * x + &half * y).collect();
            all.push(RumInstance::from_vector(common::names(3), mid).unwrap());
        }
    }
    let mut checked = 0;
    for inst in &all {
        let a = build_matrix(inst).unwrap();
        let eps = rum_min_eps(inst, &a).unwrap().epsilon_min;
        let negative = bm_polynomials(inst).values.iter().any(|k| k.is_negative());
        assert_eq!(eps.is_zero(), !negative);
        checked += 1;
    }
    assert_eq!(checked, 24 + 24 * 23 / 2);
}
