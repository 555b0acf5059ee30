//! Minimum total-variation distance between convex hulls and the
//! bounded-arbitrage alternatives built on it.
//!
//! The central computation is the program
//!
//! ```text
//! min Σ_x (e⁺_x + e⁻_x)
//! s.t. Σ_j λ_j P_j(x) − Σ_k μ_k Q_k(x) = e⁺_x − e⁻_x   for every point x
//!      Σ λ = Σ μ = 1,  λ, μ, e⁺, e⁻ ≥ 0
//! ```
//!
//! whose dual values on the point rows are (minus) a stakes vector `f` with
//! `‖f‖∞ ≤ 1` achieving `min_P f·P − max_Q f·Q` equal to the optimum.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{solve_lp, LinearProgram, LpSolution, LpStatus, Rational, Relation, Sense};
use crate::measures::{mixture, CredalSet, ProbVector, SignedVector, StakesVector};

/// `min_{P∈𝒫} f·P − max_{Q∈𝒬} f·Q`.
pub fn separation_gap(f: &[Rational], p_set: &CredalSet, q_set: &CredalSet) -> Rational {
    p_set.min_expectation(f) - q_set.max_expectation(f)
}

fn check_dims(p_set: &CredalSet, q_set: &CredalSet) -> Result<()> {
    if p_set.dim() != q_set.dim() {
        return Err(Error::DimensionMismatch {
            expected: p_set.dim(),
            found: q_set.dim(),
        });
    }
    Ok(())
}

pub(crate) fn expect_optimal(sol: LpSolution, what: &str) -> Result<LpSolution> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        other => Err(Error::Internal(format!("{what} solved as {other:?}"))),
    }
}

pub(crate) fn check_probability(eps: &Rational, what: &str) -> Result<()> {
    if eps.is_negative() || eps > &Rational::one() {
        return Err(Error::input(format!("{what} must lie in [0, 1]")));
    }
    Ok(())
}

pub(crate) fn check_nonnegative(eps: &Rational) -> Result<()> {
    if eps.is_negative() {
        return Err(Error::input("epsilon must be nonnegative"));
    }
    Ok(())
}

/// Optimal pair of mixtures together with the dual stakes certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    pub value: Rational,
    pub p_weights: Vec<Rational>,
    pub q_weights: Vec<Rational>,
    /// Unit sup norm whenever `value > 0`.
    pub stakes: StakesVector,
}

impl DistanceResult {
    pub fn p_mixture(&self, p_set: &CredalSet) -> Result<ProbVector> {
        mixture(&self.p_weights, p_set)
    }

    pub fn q_mixture(&self, q_set: &CredalSet) -> Result<ProbVector> {
        mixture(&self.q_weights, q_set)
    }

    /// Re-substitutes every claim: the mixtures realise `value`, and so does
    /// the stakes vector.
    pub fn verify(&self, p_set: &CredalSet, q_set: &CredalSet) -> bool {
        let (Ok(p), Ok(q)) = (self.p_mixture(p_set), self.q_mixture(q_set)) else {
            return false;
        };
        let primal = SignedVector::difference(p.weights(), q.weights()).l1_norm();
        let norm_ok = if self.value.is_positive() {
            self.stakes.norm().is_one()
        } else {
            self.stakes.norm() <= &Rational::one()
        };
        primal == self.value
            && norm_ok
            && separation_gap(self.stakes.values(), p_set, q_set) == self.value
    }
}

/// Minimum ℓ₁ distance between the convex hulls of two credal sets.
pub fn min_set_distance(p_set: &CredalSet, q_set: &CredalSet) -> Result<DistanceResult> {
    check_dims(p_set, q_set)?;
    let n = p_set.dim();
    let (np, nq) = (p_set.len(), q_set.len());
    let nvars = np + nq + 2 * n;
    let (lam0, mu0, pos0, neg0) = (0, np, np + nq, np + nq + n);

    let mut objective = vec![Rational::zero(); nvars];
    for c in objective.iter_mut().skip(pos0) {
        *c = Rational::one();
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for x in 0..n {
        let mut row = vec![Rational::zero(); nvars];
        for (j, p) in p_set.members().iter().enumerate() {
            row[lam0 + j] = p.weights()[x].clone();
        }
        for (k, q) in q_set.members().iter().enumerate() {
            row[mu0 + k] = -&q.weights()[x];
        }
        row[pos0 + x] = -Rational::one();
        row[neg0 + x] = Rational::one();
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }
    let mut sum_row = |start: usize, len: usize| {
        let mut row = vec![Rational::zero(); nvars];
        for c in row.iter_mut().skip(start).take(len) {
            *c = Rational::one();
        }
        lp.add_constraint(row, Relation::Eq, Rational::one());
    };
    sum_row(lam0, np);
    sum_row(mu0, nq);

    let sol = expect_optimal(solve_lp(&lp)?, "distance program")?;
    let raw = StakesVector::new(sol.dual[..n].iter().map(|y| -y).collect());
    let stakes = if sol.objective_value.is_positive() {
        raw.normalized().ok_or_else(|| {
            Error::Internal("positive distance with a zero dual stakes vector".into())
        })?
    } else {
        raw
    };
    let result = DistanceResult {
        value: sol.objective_value,
        p_weights: sol.primal[lam0..mu0].to_vec(),
        q_weights: sol.primal[mu0..pos0].to_vec(),
        stakes,
    };
    if !result.verify(p_set, q_set) {
        return Err(Error::Internal("distance certificate failed re-verification".into()));
    }
    Ok(result)
}

/// Exactly one of the two systems of the approximate alternative.
#[derive(Debug, Clone, PartialEq)]
pub enum GordanOutcome {
    /// Unit-norm stakes separating the hulls by more than ε.
    Separation { stakes: StakesVector, gap: Rational },
    /// A pair of mixtures within ℓ₁ distance ε.
    Proximity {
        p_weights: Vec<Rational>,
        q_weights: Vec<Rational>,
        distance: Rational,
    },
}

impl GordanOutcome {
    pub fn is_separation(&self) -> bool {
        matches!(self, GordanOutcome::Separation { .. })
    }

    pub fn verify(&self, p_set: &CredalSet, q_set: &CredalSet, eps: &Rational) -> bool {
        match self {
            GordanOutcome::Separation { stakes, gap } => {
                stakes.norm().is_one()
                    && &separation_gap(stakes.values(), p_set, q_set) == gap
                    && gap > eps
            }
            GordanOutcome::Proximity {
                p_weights,
                q_weights,
                distance,
            } => {
                let (Ok(p), Ok(q)) = (mixture(p_weights, p_set), mixture(q_weights, q_set)) else {
                    return false;
                };
                let d = SignedVector::difference(p.weights(), q.weights()).l1_norm();
                &d == distance && distance <= eps
            }
        }
    }
}

/// Decides which system of the approximate alternative holds at `eps`.
/// A distance exactly equal to `eps` counts as proximity.
pub fn gordan_decide(p_set: &CredalSet, q_set: &CredalSet, eps: &Rational) -> Result<GordanOutcome> {
    check_nonnegative(eps)?;
    let d = min_set_distance(p_set, q_set)?;
    Ok(if &d.value > eps {
        GordanOutcome::Separation {
            stakes: d.stakes,
            gap: d.value,
        }
    } else {
        GordanOutcome::Proximity {
            p_weights: d.p_weights,
            q_weights: d.q_weights,
            distance: d.value,
        }
    })
}

/// A unit-norm `f` with `min_P f·P > max_Q f·Q + ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationWitness {
    pub stakes: StakesVector,
    /// `min_P f·P − max_Q f·Q − ε`, strictly positive.
    pub excess: Rational,
    /// Same violation read through `−f` in the max/min form:
    /// `min_Q (−f)·Q − ε − max_P (−f)·P`.
    pub mirrored_excess: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedSeparation {
    pub holds: bool,
    pub distance: Rational,
    pub witness: Option<SeparationWitness>,
}

/// Whether no unit-norm stakes separate the sets by more than `eps`
/// (equivalently, the hulls are within ℓ₁ distance `eps`).
pub fn check_bounded_separation(
    p_set: &CredalSet,
    q_set: &CredalSet,
    eps: &Rational,
) -> Result<BoundedSeparation> {
    check_nonnegative(eps)?;
    let d = min_set_distance(p_set, q_set)?;
    if &d.value <= eps {
        return Ok(BoundedSeparation {
            holds: true,
            distance: d.value,
            witness: None,
        });
    }
    let f = d.stakes;
    let excess = separation_gap(f.values(), p_set, q_set) - eps;
    let g = f.negated();
    let mirrored_excess = q_set.min_expectation(g.values()) - eps - p_set.max_expectation(g.values());
    if !excess.is_positive() || !mirrored_excess.is_positive() {
        return Err(Error::Internal("separation witness does not separate".into()));
    }
    Ok(BoundedSeparation {
        holds: false,
        distance: d.value,
        witness: Some(SeparationWitness {
            stakes: f,
            excess,
            mirrored_excess,
        }),
    })
}

/// Where the contaminating residual may come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidualFamily {
    /// Mixtures of the given members.
    Hull(CredalSet),
    /// Any probability vector.
    FullSimplex,
}

impl ResidualFamily {
    /// `max_{R} f·R` over the family.
    pub fn max_expectation(&self, f: &[Rational]) -> Rational {
        match self {
            ResidualFamily::Hull(set) => set.max_expectation(f),
            ResidualFamily::FullSimplex => f.iter().max().cloned().unwrap_or_else(Rational::zero),
        }
    }
}

/// `P = (1−ε) Q_m + ε R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContaminationDecomposition {
    pub epsilon: Rational,
    pub q_weights: Vec<Rational>,
    pub residual: ProbVector,
}

impl ContaminationDecomposition {
    pub fn verify(&self, p: &ProbVector, q_set: &CredalSet) -> bool {
        let Ok(qm) = mixture(&self.q_weights, q_set) else {
            return false;
        };
        let keep = Rational::one() - &self.epsilon;
        p.weights()
            .iter()
            .zip(qm.weights().iter().zip(self.residual.weights()))
            .all(|(px, (qx, rx))| px == &(&keep * qx + &self.epsilon * rx))
    }
}

/// A nonnegative unit-norm `g` with `P·g > (1−ε) max_Q g·Q + ε max_R g·R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualWitness {
    pub stakes: StakesVector,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl ResidualWitness {
    pub fn verify(
        &self,
        p: &ProbVector,
        q_set: &CredalSet,
        family: &ResidualFamily,
        eps: &Rational,
    ) -> bool {
        let g = self.stakes.values();
        let lhs = p.expectation(g);
        let rhs = (Rational::one() - eps) * q_set.max_expectation(g) + eps * family.max_expectation(g);
        self.stakes.norm().is_one()
            && g.iter().all(|v| !v.is_negative())
            && lhs == self.lhs
            && rhs == self.rhs
            && lhs > rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Contamination {
    Feasible(ContaminationDecomposition),
    Infeasible(ResidualWitness),
}

/// Decides whether `P = (1−ε) Q_m + ε R` for some mixture `Q_m` of `q_set`
/// and some `R` in `family`, returning the decomposition or a separating
/// nonnegative stakes vector.
pub fn contamination_feasible(
    p: &ProbVector,
    q_set: &CredalSet,
    family: &ResidualFamily,
    eps: &Rational,
) -> Result<Contamination> {
    check_probability(eps, "epsilon")?;
    let n = q_set.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if let ResidualFamily::Hull(r) = family {
        if r.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.dim(),
            });
        }
    }
    let keep = Rational::one() - eps;
    let nq = q_set.len();
    let nres = match family {
        ResidualFamily::Hull(r) => r.len(),
        ResidualFamily::FullSimplex => n,
    };
    let (lam0, res0, pos0, neg0) = (0, nq, nq + nres, nq + nres + n);
    let nvars = neg0 + n;

    let mut objective = vec![Rational::zero(); nvars];
    for c in objective.iter_mut().skip(pos0) {
        *c = Rational::one();
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for x in 0..n {
        let mut row = vec![Rational::zero(); nvars];
        for (j, q) in q_set.members().iter().enumerate() {
            row[lam0 + j] = &keep * &q.weights()[x];
        }
        match family {
            ResidualFamily::Hull(r) => {
                for (k, rk) in r.members().iter().enumerate() {
                    row[res0 + k] = eps * &rk.weights()[x];
                }
            }
            ResidualFamily::FullSimplex => row[res0 + x] = Rational::one(),
        }
        row[pos0 + x] = Rational::one();
        row[neg0 + x] = -Rational::one();
        lp.add_constraint(row, Relation::Eq, p.weights()[x].clone());
    }
    let mut row = vec![Rational::zero(); nvars];
    for c in row.iter_mut().take(nq) {
        *c = Rational::one();
    }
    lp.add_constraint(row, Relation::Eq, Rational::one());
    let mut row = vec![Rational::zero(); nvars];
    for c in row.iter_mut().skip(res0).take(nres) {
        *c = Rational::one();
    }
    let res_total = match family {
        ResidualFamily::Hull(_) => Rational::one(),
        ResidualFamily::FullSimplex => eps.clone(),
    };
    lp.add_constraint(row, Relation::Eq, res_total);

    let sol = expect_optimal(solve_lp(&lp)?, "contamination program")?;
    if sol.objective_value.is_zero() {
        let residual = match family {
            ResidualFamily::Hull(r) => mixture(&sol.primal[res0..pos0], r)?,
            ResidualFamily::FullSimplex if eps.is_zero() => p.clone(),
            ResidualFamily::FullSimplex => {
                ProbVector::new(sol.primal[res0..pos0].iter().map(|v| v / eps).collect())?
            }
        };
        let dec = ContaminationDecomposition {
            epsilon: eps.clone(),
            q_weights: sol.primal[lam0..res0].to_vec(),
            residual,
        };
        if !dec.verify(p, q_set) {
            return Err(Error::Internal("contamination decomposition failed re-verification".into()));
        }
        return Ok(Contamination::Feasible(dec));
    }

    // Shift the dual stakes to be nonnegative with minimum zero, then
    // normalise; both sides of the inequality move together under the shift.
    let f = StakesVector::new(sol.dual[..n].to_vec());
    let sigma = f.min_value();
    let shifted = StakesVector::new(f.values().iter().map(|v| v - &sigma).collect());
    let g = shifted
        .normalized()
        .ok_or_else(|| Error::Internal("constant dual stakes with positive infeasibility".into()))?;
    let lhs = p.expectation(g.values());
    let rhs = &keep * q_set.max_expectation(g.values()) + eps * family.max_expectation(g.values());
    let witness = ResidualWitness {
        stakes: g,
        lhs,
        rhs,
    };
    if !witness.verify(p, q_set, family, eps) {
        return Err(Error::Internal("residual witness failed re-verification".into()));
    }
    Ok(Contamination::Infeasible(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn pv(w: &[(i64, i64)]) -> ProbVector {
        ProbVector::new(w.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn nielsen() -> (CredalSet, CredalSet) {
        let p = CredalSet::singleton(pv(&[(1, 3), (1, 3), (1, 3)]));
        let q = CredalSet::new(vec![pv(&[(2, 3), (1, 3), (0, 1)]), pv(&[(1, 3), (2, 3), (0, 1)])]).unwrap();
        (p, q)
    }

    #[test]
    fn identical_singletons_have_zero_distance() {
        let s = CredalSet::singleton(pv(&[(1, 2), (1, 4), (1, 4)]));
        let d = min_set_distance(&s, &s).unwrap();
        assert_eq!(d.value, int(0));
        assert!(d.verify(&s, &s));
    }

    #[test]
    fn point_masses_on_convergent_sequence() {
        for n in 1..=5 {
            let m = n + 1;
            let p = CredalSet::singleton(ProbVector::point_mass(m, 0));
            let q = CredalSet::new((1..m).map(|i| ProbVector::point_mass(m, i)).collect()).unwrap();
            let d = min_set_distance(&p, &q).unwrap();
            assert_eq!(d.value, int(2));
            assert!(d.verify(&p, &q));
        }
    }

    #[test]
    fn nielsen_distance() {
        let (p, q) = nielsen();
        let d = min_set_distance(&p, &q).unwrap();
        assert_eq!(d.value, rat(2, 3));
        assert!(d.verify(&p, &q));
        // The distance is constant along the segment of opinions.
        for k in 0..=6 {
            let l = rat(k, 6);
            let qm = mixture(&[l.clone(), int(1) - l], &q).unwrap();
            assert_eq!(crate::measures::l1_distance(&p.members()[0], &qm).unwrap(), rat(2, 3));
        }
    }

    #[test]
    fn gordan_on_nielsen() {
        let (p, q) = nielsen();
        let sep = gordan_decide(&p, &q, &rat(1, 2)).unwrap();
        match &sep {
            GordanOutcome::Separation { gap, .. } => assert_eq!(gap, &rat(2, 3)),
            other => panic!("expected separation, got {other:?}"),
        }
        assert!(sep.verify(&p, &q, &rat(1, 2)));

        let prox = gordan_decide(&p, &q, &rat(2, 3)).unwrap();
        match &prox {
            GordanOutcome::Proximity { distance, .. } => assert_eq!(distance, &rat(2, 3)),
            other => panic!("expected proximity, got {other:?}"),
        }
        assert!(prox.verify(&p, &q, &rat(2, 3)));
        assert!(!prox.verify(&p, &q, &rat(1, 2)));

        assert!(gordan_decide(&p, &q, &int(-1)).is_err());
        let same = gordan_decide(&q, &q, &int(0)).unwrap();
        assert!(matches!(same, GordanOutcome::Proximity { ref distance, .. } if distance.is_zero()));
    }

    #[test]
    fn bounded_separation_examples() {
        let (p, q) = nielsen();
        assert!(check_bounded_separation(&p, &q, &int(2)).unwrap().holds);
        assert!(check_bounded_separation(&p, &q, &rat(2, 3)).unwrap().holds);
        let r = check_bounded_separation(&p, &q, &int(0)).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.excess, rat(2, 3));
        assert_eq!(w.mirrored_excess, rat(2, 3));
        assert!(w.stakes.norm().is_one());
    }

    #[test]
    fn contamination_boundary_cases() {
        let (p, q) = nielsen();
        let p = p.members()[0].clone();
        let member = q.members()[1].clone();
        match contamination_feasible(&member, &q, &ResidualFamily::FullSimplex, &int(0)).unwrap() {
            Contamination::Feasible(d) => assert!(d.verify(&member, &q)),
            other => panic!("{other:?}"),
        }
        match contamination_feasible(&p, &q, &ResidualFamily::FullSimplex, &int(1)).unwrap() {
            Contamination::Feasible(d) => assert_eq!(d.residual, p),
            other => panic!("{other:?}"),
        }
        assert!(contamination_feasible(&p, &q, &ResidualFamily::FullSimplex, &rat(3, 2)).is_err());
    }

    #[test]
    fn contamination_threshold_on_nielsen() {
        let (p, q) = nielsen();
        let p = p.members()[0].clone();
        match contamination_feasible(&p, &q, &ResidualFamily::FullSimplex, &rat(1, 3)).unwrap() {
            Contamination::Feasible(d) => {
                assert!(d.verify(&p, &q));
                assert_eq!(d.residual, pv(&[(0, 1), (0, 1), (1, 1)]));
            }
            other => panic!("{other:?}"),
        }
        let fam = ResidualFamily::FullSimplex;
        match contamination_feasible(&p, &q, &fam, &rat(1, 4)).unwrap() {
            Contamination::Infeasible(w) => assert!(w.verify(&p, &q, &fam, &rat(1, 4))),
            other => panic!("{other:?}"),
        }
        // A residual hull that excludes the third point can never help.
        let hull = ResidualFamily::Hull(CredalSet::singleton(ProbVector::point_mass(3, 0)));
        match contamination_feasible(&p, &q, &hull, &rat(1, 2)).unwrap() {
            Contamination::Infeasible(w) => assert!(w.verify(&p, &q, &hull, &rat(1, 2))),
            other => panic!("{other:?}"),
        }
    }
}
