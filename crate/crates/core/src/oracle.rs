//! Brute-force reference computations.
//!
//! Nothing here calls the simplex solver or the helpers of the modules being
//! checked: distances come from enumerating vertices of the piecewise-linear
//! arrangement, stakes from a grid, and tagged trial sequences from plain
//! depth-first enumeration in integer arithmetic. They are slow and only
//! meant for small instances.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{LinearProgram, Rational, Relation, Sense};
use crate::measures::{CredalSet, ProbVector};
use crate::rum::{RumInstance, TaggedTrialSequence};

fn cap(what: &'static str, limit: usize, requested: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::CapExceeded {
            what,
            limit,
            requested,
        });
    }
    Ok(())
}

/// Solves the square system `m x = rhs` by exact Gauss–Jordan elimination.
/// Returns `None` when the system is singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        rhs[col] *= &inv;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            let (pivot_row, target) = if r < col {
                let (head, tail) = m.split_at_mut(col);
                (&tail[0], &mut head[r])
            } else {
                let (head, tail) = m.split_at_mut(r);
                (&head[col], &mut tail[0])
            };
            for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= &factor * p;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some(rhs)
}

/// Calls `visit` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn weights(p: &ProbVector) -> &[Rational] {
    p.weights()
}

/// Minimum ℓ₁ distance between two convex hulls by vertex enumeration.
///
/// The objective `Σ_x |Σλ_j P_j(x) − Σμ_k Q_k(x)|` is linear on every cell
/// cut out of the product of simplices by the hyperplanes where a coordinate
/// of the difference vanishes. Each cell vertex solves a square system made
/// of the two simplex equations and enough tight hyperplanes of the form
/// `λ_j = 0`, `μ_k = 0` or `d_x = 0`.
pub fn vertex_distance(p_set: &CredalSet, q_set: &CredalSet) -> Result<Rational> {
    cap("members per set", 6, p_set.len().max(q_set.len()))?;
    if p_set.dim() != q_set.dim() {
        return Err(Error::DimensionMismatch {
            expected: p_set.dim(),
            found: q_set.dim(),
        });
    }
    let (np, nq, n) = (p_set.len(), q_set.len(), p_set.dim());
    let vars = np + nq;
    // Hyperplane rows over (λ, μ): the coordinate facets, then d_x = 0.
    let mut planes: Vec<Vec<Rational>> = Vec::new();
    for v in 0..vars {
        let mut row = vec![Rational::zero(); vars];
        row[v] = Rational::one();
        planes.push(row);
    }
    for x in 0..n {
        let mut row = Vec::with_capacity(vars);
        row.extend(p_set.members().iter().map(|p| weights(p)[x].clone()));
        row.extend(q_set.members().iter().map(|q| -&weights(q)[x]));
        planes.push(row);
    }
    let mut lam_sum = vec![Rational::zero(); vars];
    let mut mu_sum = vec![Rational::zero(); vars];
    lam_sum[..np].fill(Rational::one());
    mu_sum[np..].fill(Rational::one());

    let diff_norm = |point: &[Rational]| -> Rational {
        planes[vars..]
            .iter()
            .map(|row| {
                row.iter()
                    .zip(point)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                    .abs()
            })
            .sum()
    };

    let mut best: Option<Rational> = None;
    for_each_subset(planes.len(), vars - 2, |chosen| {
        let mut m = vec![lam_sum.clone(), mu_sum.clone()];
        let mut rhs = vec![Rational::one(), Rational::one()];
        for &c in chosen {
            m.push(planes[c].clone());
            rhs.push(Rational::zero());
        }
        let Some(point) = solve_square(m, rhs) else { return };
        if point.iter().any(|v| v.is_negative()) {
            return;
        }
        let value = diff_norm(&point);
        if best.as_ref().is_none_or(|b| &value < b) {
            best = Some(value);
        }
    });
    best.ok_or_else(|| Error::Internal("vertex enumeration found no feasible vertex".into()))
}

/// Optimum of a small linear program whose variables all have finite lower
/// and upper bounds, by enumerating basic solutions of the constraint
/// arrangement. `None` means infeasible.
pub fn vertex_lp_optimum(lp: &LinearProgram) -> Result<Option<Rational>> {
    let n = lp.objective.len();
    cap("variables", 8, n)?;
    let mut eq: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut le: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in &lp.constraints {
        match c.relation {
            Relation::Eq => eq.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Le => le.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Ge => le.push((c.coeffs.iter().map(|v| -v).collect(), -&c.rhs)),
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        let (Some(lo), Some(hi)) = (&b.lower, &b.upper) else {
            return Err(Error::input("vertex enumeration needs every variable bounded"));
        };
        let mut row = vec![Rational::zero(); n];
        row[j] = Rational::one();
        le.push((row.clone(), hi.clone()));
        row[j] = -Rational::one();
        le.push((row, -lo));
    }
    cap("constraint rows", 32, eq.len() + le.len())?;
    let feasible = |x: &[Rational]| {
        let dot = |a: &[Rational]| a.iter().zip(x).fold(Rational::zero(), |acc, (p, q)| acc + p * q);
        eq.iter().all(|(a, b)| &dot(a) == b) && le.iter().all(|(a, b)| &dot(a) <= b)
    };
    // Every vertex makes some n linearly independent rows tight; equality
    // rows are tight everywhere, so they compete for the basis like the rest.
    let rows: Vec<&(Vec<Rational>, Rational)> = eq.iter().chain(&le).collect();
    let mut best: Option<Rational> = None;
    for_each_subset(rows.len(), n, |chosen| {
        let m: Vec<Vec<Rational>> = chosen.iter().map(|&c| rows[c].0.clone()).collect();
        let rhs: Vec<Rational> = chosen.iter().map(|&c| rows[c].1.clone()).collect();
        let Some(x) = solve_square(m, rhs) else { return };
        if !feasible(&x) {
            return;
        }
        let value = lp
            .objective
            .iter()
            .zip(&x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v);
        let better = match (&best, lp.sense) {
            (None, _) => true,
            (Some(b), Sense::Minimize) => &value < b,
            (Some(b), Sense::Maximize) => &value > b,
        };
        if better {
            best = Some(value);
        }
    });
    Ok(best)
}

/// Stakes grid `{−1, −(k−1)/k, …, 1}^X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    resolution: u32,
}

impl GridSpec {
    pub fn new(resolution: u32) -> Result<GridSpec> {
        if resolution == 0 {
            return Err(Error::input("grid resolution must be at least 1"));
        }
        Ok(GridSpec { resolution })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }
}

/// Integer numerators of every member over one shared denominator.
fn scaled_members(sets: &[&CredalSet]) -> Result<(BigInt, Vec<Vec<Vec<i64>>>)> {
    let mut den = BigInt::one();
    for s in sets {
        for p in s.members() {
            for w in p.weights() {
                den = den.lcm(w.denom());
            }
        }
    }
    let scaled = sets
        .iter()
        .map(|s| {
            s.members()
                .iter()
                .map(|p| {
                    p.weights()
                        .iter()
                        .map(|w| {
                            (w * Rational::from_integer(den.clone()))
                                .to_integer()
                                .to_i64()
                                .filter(|v| v.checked_mul(1 << 20).is_some())
                                .ok_or_else(|| Error::input("denominators too large for the grid oracle"))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((den, scaled))
}

/// Largest `min_P f·P − max_Q f·Q` over grid stakes: a lower bound for the
/// distance between the hulls.
pub fn grid_max_gap(p_set: &CredalSet, q_set: &CredalSet, grid: GridSpec) -> Result<Rational> {
    let n = p_set.dim();
    cap("points", 6, n)?;
    cap("grid resolution", 8, grid.resolution as usize)?;
    if q_set.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q_set.dim(),
        });
    }
    let (den, scaled) = scaled_members(&[p_set, q_set])?;
    let (ps, qs) = (&scaled[0], &scaled[1]);
    let k = grid.resolution as i64;
    let mut f = vec![-k; n];
    let mut best = i64::MIN;
    loop {
        let ev = |v: &Vec<i64>| v.iter().zip(&f).map(|(a, b)| a * b).sum::<i64>();
        let lo = ps.iter().map(ev).min().expect("nonempty");
        let hi = qs.iter().map(ev).max().expect("nonempty");
        best = best.max(lo - hi);
        let Some(pos) = f.iter().position(|&v| v < k) else { break };
        for v in f.iter_mut().take(pos) {
            *v = -k;
        }
        f[pos] += 1;
    }
    Ok(Rational::new(BigInt::from(best), den * BigInt::from(k)))
}

/// Smallest contamination level over a grid of opinion weights
/// `λ_j ∈ {0, 1/k, …, 1}` with `Σ λ_j Q_j ≤ P`: an upper bound for the
/// minimal ε of `P = (1−ε) Q_m + ε R`.
pub fn grid_contamination_eps(p: &ProbVector, q_set: &CredalSet, resolution: u32) -> Result<Rational> {
    cap("opinions", 5, q_set.len())?;
    cap("grid resolution", 24, resolution as usize)?;
    if resolution == 0 {
        return Err(Error::input("grid resolution must be at least 1"));
    }
    let single = CredalSet::singleton(p.clone());
    let (_, scaled) = scaled_members(&[&single, q_set])?;
    let (pv, qs) = (&scaled[0][0], &scaled[1]);
    let k = resolution as i64;
    let mut lam = vec![0i64; qs.len()];
    let mut best = 0i64;
    loop {
        let total: i64 = lam.iter().sum();
        if total <= k && total > best {
            let fits = (0..pv.len()).all(|x| {
                let used: i64 = lam.iter().zip(qs).map(|(l, q)| l * q[x]).sum();
                used <= k * pv[x]
            });
            if fits {
                best = total;
            }
        }
        let Some(pos) = lam.iter().position(|&v| v < k) else { break };
        for v in lam.iter_mut().take(pos) {
            *v = 0;
        }
        lam[pos] += 1;
    }
    Ok(Rational::one() - Rational::new(BigInt::from(best), BigInt::from(k)))
}

/// Outcome of the exhaustive tag search.
#[derive(Debug, Clone, PartialEq)]
pub enum ExhaustiveOutcome {
    /// No tag vector with entries up to the bound violates the inequality.
    HoldsUpTo(u32),
    /// A violating sequence of smallest total tag count (first in
    /// lexicographic order among those).
    Violation(TaggedTrialSequence),
}

struct TagSearch {
    /// `P₀` numerators over the shared scale `L`.
    observed: Vec<i128>,
    /// For each pair, the orderings that pick it.
    pickers: Vec<Vec<usize>>,
    orderings: usize,
    /// `L` and `L·ε/2` as integers.
    scale: i128,
    half_eps: i128,
    max_tag: i128,
}

struct SearchState {
    tags: Vec<i128>,
    payoffs: Vec<i128>,
    observed: i128,
    sum: i128,
    best: Option<(i128, Vec<i128>)>,
}

impl TagSearch {
    fn descend(&self, st: &mut SearchState, depth: usize, lo: i128, hi: i128) {
        if let Some((best_sum, _)) = &st.best {
            if st.sum >= *best_sum {
                return;
            }
        }
        if depth == self.observed.len() {
            let best_payoff = st.payoffs.iter().copied().max().unwrap_or(0);
            let width = if depth == 0 { 0 } else { hi - lo };
            if st.observed > self.scale * best_payoff + self.half_eps * width {
                st.best = Some((st.sum, st.tags.clone()));
            }
            return;
        }
        for t in 0..=self.max_tag {
            st.tags[depth] = t;
            st.observed += self.observed[depth] * t;
            st.sum += t;
            for &o in &self.pickers[depth] {
                st.payoffs[o] += t;
            }
            let (nlo, nhi) = if depth == 0 { (t, t) } else { (lo.min(t), hi.max(t)) };
            self.descend(st, depth + 1, nlo, nhi);
            for &o in &self.pickers[depth] {
                st.payoffs[o] -= t;
            }
            st.sum -= t;
            st.observed -= self.observed[depth] * t;
        }
        st.tags[depth] = 0;
    }
}

/// Permutations of `0..n` by Heap's algorithm.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Checks `Σ P₀ t ≤ max_≻ Σ a_≻ t + w_T ε/2` for every tag vector with
/// entries in `0..=max_tag`.
pub fn exhaustive_rum_check(inst: &RumInstance, eps: &Rational, max_tag: u32) -> Result<ExhaustiveOutcome> {
    let n = inst.alternatives().len();
    cap("alternatives", 3, n)?;
    cap("tag bound", 3, max_tag as usize)?;
    if eps.is_negative() {
        return Err(Error::input("epsilon must be nonnegative"));
    }
    let pairs = inst.index().pairs();
    let perms = all_permutations(n);
    let pickers: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(y, menu)| {
            perms
                .iter()
                .enumerate()
                .filter(|(_, perm)| {
                    let best = perm.iter().copied().find(|&a| menu & (1 << a) != 0);
                    best == Some(y)
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    let half = eps / Rational::from_integer(BigInt::from(2));
    let mut scale = half.denom().clone();
    for p in inst.choice() {
        scale = scale.lcm(p.denom());
    }
    let to_i128 = |v: Rational| -> Result<i128> {
        (v * Rational::from_integer(scale.clone()))
            .to_integer()
            .to_i128()
            .filter(|x| x.checked_mul(1 << 40).is_some())
            .ok_or_else(|| Error::input("values too large for the exhaustive oracle"))
    };
    let observed = inst
        .choice()
        .iter()
        .map(|p| to_i128(p.clone()))
        .collect::<Result<Vec<_>>>()?;
    let search = TagSearch {
        observed,
        pickers,
        orderings: perms.len(),
        scale: to_i128(Rational::one())?,
        half_eps: to_i128(half)?,
        max_tag: max_tag as i128,
    };
    let mut st = SearchState {
        tags: vec![0; pairs.len()],
        payoffs: vec![0; search.orderings],
        observed: 0,
        sum: 0,
        best: None,
    };
    search.descend(&mut st, 0, 0, 0);
    Ok(match st.best {
        None => ExhaustiveOutcome::HoldsUpTo(max_tag),
        Some((_, tags)) => ExhaustiveOutcome::Violation(TaggedTrialSequence::new(
            tags.into_iter().map(BigInt::from).collect(),
        )?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat, VarBounds};

    fn pv(w: &[(i64, i64)]) -> ProbVector {
        ProbVector::new(w.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn nielsen() -> (CredalSet, CredalSet) {
        (
            CredalSet::singleton(pv(&[(1, 3), (1, 3), (1, 3)])),
            CredalSet::new(vec![pv(&[(2, 3), (1, 3), (0, 1)]), pv(&[(1, 3), (2, 3), (0, 1)])]).unwrap(),
        )
    }

    #[test]
    fn subsets_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut empty = 0;
        for_each_subset(3, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }

    #[test]
    fn heap_permutations_are_complete() {
        let mut perms = all_permutations(4);
        perms.sort();
        perms.dedup();
        assert_eq!(perms.len(), 24);
    }

    #[test]
    fn singleton_distance_is_plain_l1() {
        let p = CredalSet::singleton(pv(&[(1, 2), (1, 2), (0, 1)]));
        let q = CredalSet::singleton(pv(&[(0, 1), (1, 4), (3, 4)]));
        assert_eq!(vertex_distance(&p, &q).unwrap(), rat(3, 2));
    }

    #[test]
    fn nielsen_by_vertices_and_grid() {
        let (p, q) = nielsen();
        assert_eq!(vertex_distance(&p, &q).unwrap(), rat(2, 3));
        let mut last = int(-3);
        for k in 1..=4 {
            let g = grid_max_gap(&p, &q, GridSpec::new(k).unwrap()).unwrap();
            assert!(g <= rat(2, 3));
            assert!(g >= last);
            last = g;
        }
        assert_eq!(last, rat(2, 3));
        assert!(grid_max_gap(&q, &q, GridSpec::new(3).unwrap()).unwrap() <= int(0));
        assert_eq!(grid_max_gap(&p, &p, GridSpec::new(2).unwrap()).unwrap(), int(0));
    }

    #[test]
    fn nielsen_contamination_grid() {
        let (p, q) = nielsen();
        assert_eq!(grid_contamination_eps(&p.members()[0], &q, 3).unwrap(), rat(1, 3));
        assert_eq!(grid_contamination_eps(&p.members()[0], &q, 12).unwrap(), rat(1, 3));
    }

    #[test]
    fn vertex_lp_small_cases() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1)]);
        lp.set_bounds(0, VarBounds::between(rat(1, 3), int(1)));
        assert_eq!(vertex_lp_optimum(&lp).unwrap(), Some(rat(1, 3)));
        let mut lp = LinearProgram::new(Sense::Maximize, vec![int(1), int(1)]);
        lp.set_bounds(0, VarBounds::between(int(0), int(5)));
        lp.set_bounds(1, VarBounds::between(int(0), int(5)));
        lp.add_constraint(vec![int(1), int(2)], Relation::Le, int(4));
        assert_eq!(vertex_lp_optimum(&lp).unwrap(), Some(int(4)));
        lp.add_constraint(vec![int(1), int(0)], Relation::Ge, int(6));
        assert_eq!(vertex_lp_optimum(&lp).unwrap(), None);
    }

    #[test]
    fn warp_instance_two_tag_violation() {
        let names: Vec<String> = ["y1", "y2", "y3"].iter().map(|s| s.to_string()).collect();
        let inst = RumInstance::deterministic(names, |m| match m {
            0b011 => 0,
            0b111 => 1,
            _ => m.trailing_zeros() as usize,
        })
        .unwrap();
        let ExhaustiveOutcome::Violation(t) = exhaustive_rum_check(&inst, &int(1), 1).unwrap() else {
            panic!("expected a violation");
        };
        let ones: Vec<usize> = (0..t.tags.len()).filter(|&i| t.tags[i].is_one()).collect();
        let expected = vec![inst.index().row_of(0, 0b011).unwrap(), inst.index().row_of(1, 0b111).unwrap()];
        let mut ones = ones;
        ones.sort();
        let mut expected = expected;
        expected.sort();
        assert_eq!(ones, expected);
    }

    #[test]
    fn rationalizable_deterministic_choice_never_violates() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let inst = RumInstance::deterministic(names, |m| m.trailing_zeros() as usize).unwrap();
        assert_eq!(exhaustive_rum_check(&inst, &int(0), 2).unwrap(), ExhaustiveOutcome::HoldsUpTo(2));
    }
}
