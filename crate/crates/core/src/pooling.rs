//! Almost-linear aggregation of probabilistic opinions.
//!
//! A planner's probability `P` is compared with a finite set of opinions
//! `𝒬`. The minimal-ε computations come in three flavours (additive error,
//! contamination, and additive error with unnormalised weights), and each of
//! the Pareto-style conditions is decided exactly through its linear-program
//! equivalent. When a condition fails, an explicit pair of payoff vectors
//! `(f, g)` is produced on which the unanimity premise holds and the
//! conclusion fails.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::duality::{
    check_probability, contamination_feasible, expect_optimal, min_set_distance, Contamination,
    ResidualFamily,
};
use crate::error::{Error, Result};
use crate::exactnum::{
    common_denominator, serde_rational, serde_rational_vec, solve_lp, LinearProgram, Rational,
    Relation, Sense,
};
use crate::measures::{
    mixture, oscillation, CredalSet, PointSpace, ProbVector, SignedVector, StakesVector,
};

/// Largest space the event-based checkers will enumerate by default.
pub const DEFAULT_EVENT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolingInstance {
    pub space: PointSpace,
    pub planner: ProbVector,
    pub opinions: CredalSet,
}

impl PoolingInstance {
    pub fn new(space: PointSpace, planner: ProbVector, opinions: CredalSet) -> Result<Self> {
        if planner.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: planner.len(),
            });
        }
        if opinions.dim() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: opinions.dim(),
            });
        }
        Ok(PoolingInstance {
            space,
            planner,
            opinions,
        })
    }

    /// Instance on an anonymous space `{0, …, n−1}`.
    pub fn unlabeled(planner: ProbVector, opinions: CredalSet) -> Result<Self> {
        let space = PointSpace::numbered(planner.len())?;
        PoolingInstance::new(space, planner, opinions)
    }

    fn planner_set(&self) -> CredalSet {
        CredalSet::singleton(self.planner.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolingKind {
    Additive,
    Genest,
    NormalizedAdditive,
}

/// Optimal representation of the planner in terms of the opinions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolingReport {
    pub kind: PoolingKind,
    #[serde(with = "serde_rational")]
    pub epsilon_min: Rational,
    /// Additive: a probability over members. Genest: `λ ≥ 0`, `Σλ = 1−ε`.
    /// Normalized additive: `m ≥ 0`, summing to one only in the constrained
    /// variant.
    #[serde(with = "serde_rational_vec")]
    pub weights: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<SignedVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<ProbVector>,
    /// Dual certificate that no better representation exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stakes: Option<StakesVector>,
}

impl PoolingReport {
    /// Re-derives the representation from the weights and checks it.
    pub fn verify(&self, inst: &PoolingInstance) -> bool {
        let p = inst.planner.weights();
        let q = inst.opinions.members();
        if self.weights.len() != q.len() || self.weights.iter().any(|w| w.is_negative()) {
            return false;
        }
        let combined: Vec<Rational> = (0..p.len())
            .map(|x| {
                self.weights
                    .iter()
                    .zip(q)
                    .fold(Rational::zero(), |acc, (w, qi)| acc + w * &qi.weights()[x])
            })
            .collect();
        let total: Rational = self.weights.iter().sum();
        match self.kind {
            PoolingKind::Additive | PoolingKind::NormalizedAdditive => {
                let Some(e) = &self.error else { return false };
                let sum_ok = self.kind == PoolingKind::NormalizedAdditive || total.is_one();
                sum_ok
                    && e.len() == p.len()
                    && e.weights
                        .iter()
                        .zip(p.iter().zip(&combined))
                        .all(|(ex, (px, cx))| ex == &(px - cx))
                    && e.l1_norm() == self.epsilon_min
            }
            PoolingKind::Genest => {
                if total != Rational::one() - &self.epsilon_min {
                    return false;
                }
                match &self.residual {
                    None => self.epsilon_min.is_zero() && combined.as_slice() == p,
                    Some(r) => p
                        .iter()
                        .zip(combined.iter().zip(r.weights()))
                        .all(|(px, (cx, rx))| px == &(cx + &self.epsilon_min * rx)),
                }
            }
        }
    }
}

/// `min_m ‖P − Q_m‖₁` over mixtures of the opinions.
pub fn pool_min_eps_additive(inst: &PoolingInstance) -> Result<PoolingReport> {
    let d = min_set_distance(&inst.planner_set(), &inst.opinions)?;
    let qm = d.q_mixture(&inst.opinions)?;
    let error = SignedVector::difference(inst.planner.weights(), qm.weights());
    Ok(PoolingReport {
        kind: PoolingKind::Additive,
        epsilon_min: d.value,
        weights: d.q_weights,
        error: Some(error),
        residual: None,
        stakes: Some(d.stakes),
    })
}

/// `min ‖P − Σ m_i Q_i‖₁` over `m ≥ 0`, with `Σm = 1` when `constrain_sum`.
pub fn pool_min_eps_normalized(inst: &PoolingInstance, constrain_sum: bool) -> Result<PoolingReport> {
    if constrain_sum {
        let mut report = pool_min_eps_additive(inst)?;
        report.kind = PoolingKind::NormalizedAdditive;
        return Ok(report);
    }
    let n = inst.planner.len();
    let nq = inst.opinions.len();
    let (pos0, neg0) = (nq, nq + n);
    let nvars = nq + 2 * n;
    let mut objective = vec![Rational::zero(); nvars];
    for c in objective.iter_mut().skip(pos0) {
        *c = Rational::one();
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for x in 0..n {
        let mut row = vec![Rational::zero(); nvars];
        for (i, q) in inst.opinions.members().iter().enumerate() {
            row[i] = q.weights()[x].clone();
        }
        row[pos0 + x] = Rational::one();
        row[neg0 + x] = -Rational::one();
        lp.add_constraint(row, Relation::Eq, inst.planner.weights()[x].clone());
    }
    let sol = expect_optimal(solve_lp(&lp)?, "free-weight fit")?;
    let weights = sol.primal[..nq].to_vec();
    let fitted: Vec<Rational> = (0..n)
        .map(|x| {
            weights
                .iter()
                .zip(inst.opinions.members())
                .fold(Rational::zero(), |acc, (w, q)| acc + w * &q.weights()[x])
        })
        .collect();
    let error = SignedVector::difference(inst.planner.weights(), &fitted);
    // Dual values y satisfy |y| ≤ 1 and Q_i·y ≤ 0 with P·y equal to the optimum.
    let stakes = StakesVector::new(sol.dual[..n].to_vec());
    let report = PoolingReport {
        kind: PoolingKind::NormalizedAdditive,
        epsilon_min: sol.objective_value,
        weights,
        error: Some(error),
        residual: None,
        stakes: Some(stakes),
    };
    if !report.verify(inst) {
        return Err(Error::Internal("free-weight representation failed re-verification".into()));
    }
    Ok(report)
}

/// Smallest ε with `P = (1−ε) Q_m + ε R`, via `max Σλ` subject to
/// `Σ λ_j Q_j ≤ P`.
pub fn pool_min_eps_genest(inst: &PoolingInstance) -> Result<PoolingReport> {
    let n = inst.planner.len();
    let nq = inst.opinions.len();
    let mut lp = LinearProgram::new(Sense::Maximize, vec![Rational::one(); nq]);
    for x in 0..n {
        let row = inst
            .opinions
            .members()
            .iter()
            .map(|q| q.weights()[x].clone())
            .collect();
        lp.add_constraint(row, Relation::Le, inst.planner.weights()[x].clone());
    }
    let sol = expect_optimal(solve_lp(&lp)?, "contamination weight program")?;
    let eps = Rational::one() - &sol.objective_value;
    let lambda = sol.primal.clone();
    let residual = if eps.is_zero() {
        None
    } else {
        let r = (0..n)
            .map(|x| {
                let used = lambda
                    .iter()
                    .zip(inst.opinions.members())
                    .fold(Rational::zero(), |acc, (l, q)| acc + l * &q.weights()[x]);
                (&inst.planner.weights()[x] - used) / &eps
            })
            .collect();
        Some(ProbVector::new(r)?)
    };
    let report = PoolingReport {
        kind: PoolingKind::Genest,
        epsilon_min: eps,
        weights: lambda,
        error: None,
        residual,
        stakes: Some(StakesVector::new(sol.dual)),
    };
    if !report.verify(inst) {
        return Err(Error::Internal("contamination representation failed re-verification".into()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParetoCondition {
    /// Conclusion `f·P ≥ g·P − ε ω(f−g)/2`.
    C,
    /// Conclusion `f·P ≥ g·P − ε [ω(f−g) − max(f−g)]`.
    CStar,
}

/// Payoff vectors on which every opinion weakly prefers `f` to `g` while the
/// planner's conclusion fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoWitness {
    pub condition: ParetoCondition,
    pub f: StakesVector,
    pub g: StakesVector,
    /// `f·Q_i − g·Q_i` for each opinion.
    #[serde(with = "serde_rational_vec")]
    pub premise_margins: Vec<Rational>,
    /// Conclusion right-hand side minus `f·P`.
    #[serde(with = "serde_rational")]
    pub violation_amount: Rational,
}

fn conclusion_rhs(
    condition: ParetoCondition,
    planner: &ProbVector,
    f: &StakesVector,
    g: &StakesVector,
    eps: &Rational,
) -> Rational {
    let diff = f.minus(g);
    let penalty = match condition {
        ParetoCondition::C => eps * oscillation(&diff) / Rational::from_integer(BigInt::from(2)),
        ParetoCondition::CStar => eps * (oscillation(&diff) - diff.max_value()),
    };
    planner.expectation(g.values()) - penalty
}

impl ParetoWitness {
    fn build(
        condition: ParetoCondition,
        inst: &PoolingInstance,
        f: StakesVector,
        eps: &Rational,
    ) -> ParetoWitness {
        let c = inst.opinions.min_expectation(f.values());
        let g = StakesVector::constant(f.len(), c);
        let premise_margins = inst
            .opinions
            .members()
            .iter()
            .map(|q| q.expectation(f.values()) - q.expectation(g.values()))
            .collect();
        let violation_amount =
            conclusion_rhs(condition, &inst.planner, &f, &g, eps) - inst.planner.expectation(f.values());
        ParetoWitness {
            condition,
            f,
            g,
            premise_margins,
            violation_amount,
        }
    }

    /// Direct substitution into the condition.
    pub fn verify(&self, inst: &PoolingInstance, eps: &Rational) -> bool {
        let margins: Vec<Rational> = inst
            .opinions
            .members()
            .iter()
            .map(|q| q.expectation(self.f.values()) - q.expectation(self.g.values()))
            .collect();
        let violation = conclusion_rhs(self.condition, &inst.planner, &self.f, &self.g, eps)
            - inst.planner.expectation(self.f.values());
        margins == self.premise_margins
            && margins.iter().all(|m| !m.is_negative())
            && violation == self.violation_amount
            && violation.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    #[serde(with = "serde_rational")]
    pub epsilon_min: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ParetoWitness>,
}

/// Decides condition `C_ε`: it holds exactly when the additive minimal ε is
/// at most `eps`.
pub fn check_condition_c(inst: &PoolingInstance, eps: &Rational) -> Result<ConditionCheck> {
    crate::duality::check_nonnegative(eps)?;
    let report = pool_min_eps_additive(inst)?;
    if &report.epsilon_min <= eps {
        return Ok(ConditionCheck {
            holds: true,
            epsilon_min: report.epsilon_min,
            witness: None,
        });
    }
    let stakes = report
        .stakes
        .ok_or_else(|| Error::Internal("additive report without stakes".into()))?;
    // The optimal stakes favour P over every opinion; flipping them gives a
    // bet every opinion likes at least as much as the constant g.
    let witness = ParetoWitness::build(ParetoCondition::C, inst, stakes.negated(), eps);
    if !witness.verify(inst, eps) {
        return Err(Error::Internal("condition C witness failed re-verification".into()));
    }
    Ok(ConditionCheck {
        holds: false,
        epsilon_min: report.epsilon_min,
        witness: Some(witness),
    })
}

/// Decides condition `C*_ε` for `ε ∈ [0, 1]`.
pub fn check_condition_cstar(inst: &PoolingInstance, eps: &Rational) -> Result<ConditionCheck> {
    check_probability(eps, "epsilon")?;
    let report = pool_min_eps_genest(inst)?;
    if &report.epsilon_min <= eps {
        return Ok(ConditionCheck {
            holds: true,
            epsilon_min: report.epsilon_min,
            witness: None,
        });
    }
    let resid = contamination_feasible(&inst.planner, &inst.opinions, &ResidualFamily::FullSimplex, eps)?;
    let Contamination::Infeasible(sep) = resid else {
        return Err(Error::Internal(
            "contamination feasible above the minimal contamination level".into(),
        ));
    };
    let witness = ParetoWitness::build(ParetoCondition::CStar, inst, sep.stakes.negated(), eps);
    if !witness.verify(inst, eps) {
        return Err(Error::Internal("condition C* witness failed re-verification".into()));
    }
    Ok(ConditionCheck {
        holds: false,
        epsilon_min: report.epsilon_min,
        witness: Some(witness),
    })
}

/// Event masses of every subset of the space, scaled to integers by a
/// shared denominator.
struct EventTable {
    denominator: BigInt,
    planner: Vec<i128>,
    opinions: Vec<Vec<i128>>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n >= 63 {
        return Err(Error::CapExceeded {
            what: "points for event enumeration",
            limit: cap.min(62),
            requested: n,
        });
    }
    Ok(())
}

fn subset_masses(numerators: &[i128]) -> Vec<i128> {
    let n = numerators.len();
    let mut out = vec![0i128; 1usize << n];
    for mask in 1usize..out.len() {
        let low = mask.trailing_zeros() as usize;
        out[mask] = out[mask & (mask - 1)] + numerators[low];
    }
    out
}

impl EventTable {
    fn build(planner: &ProbVector, opinions: &CredalSet) -> Result<EventTable> {
        if planner.len() != opinions.dim() {
            return Err(Error::DimensionMismatch {
                expected: opinions.dim(),
                found: planner.len(),
            });
        }
        let all = planner
            .weights()
            .iter()
            .chain(opinions.members().iter().flat_map(|q| q.weights()));
        let denominator = common_denominator(all);
        let scale = |p: &ProbVector| -> Result<Vec<i128>> {
            p.weights()
                .iter()
                .map(|w| {
                    (w * Rational::from_integer(denominator.clone()))
                        .to_integer()
                        .to_i128()
                        .filter(|v| v.checked_mul(64).is_some())
                        .ok_or_else(|| Error::input("probabilities have denominators too large to enumerate"))
                })
                .collect()
        };
        Ok(EventTable {
            planner: subset_masses(&scale(planner)?),
            opinions: opinions
                .members()
                .iter()
                .map(|q| scale(q).map(|v| subset_masses(&v)))
                .collect::<Result<_>>()?,
            denominator,
        })
    }

    fn to_rational(&self, v: i128) -> Rational {
        Rational::new(BigInt::from(v), self.denominator.clone())
    }
}

/// Result of the binary-bet condition enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventCheck {
    pub holds: bool,
    #[serde(with = "serde_rational")]
    pub min_required_eps: Rational,
    /// Events as bitmasks over the points.
    pub worst_pair: (u64, u64),
}

/// Condition `C^M_ε`: among event pairs ranked `E₁ ≽ E₂` by every opinion,
/// the largest `P(E₂) − P(E₁)`.
pub fn check_condition_cm(planner: &ProbVector, opinions: &CredalSet, eps: &Rational) -> Result<EventCheck> {
    check_condition_cm_with_cap(planner, opinions, eps, DEFAULT_EVENT_CAP)
}

pub fn check_condition_cm_with_cap(
    planner: &ProbVector,
    opinions: &CredalSet,
    eps: &Rational,
    cap: usize,
) -> Result<EventCheck> {
    check_cap(planner.len(), cap)?;
    crate::duality::check_nonnegative(eps)?;
    let t = EventTable::build(planner, opinions)?;
    let events = t.planner.len();
    let mut best = 0i128;
    let mut worst_pair = (0u64, 0u64);
    for e1 in 0..events {
        let p1 = t.planner[e1];
        for e2 in 0..events {
            let gap = t.planner[e2] - p1;
            if gap <= best {
                continue;
            }
            if t.opinions.iter().all(|q| q[e1] >= q[e2]) {
                best = gap;
                worst_pair = (e1 as u64, e2 as u64);
            }
        }
    }
    let min_required_eps = t.to_rational(best);
    Ok(EventCheck {
        holds: eps >= &min_required_eps,
        min_required_eps,
        worst_pair,
    })
}

/// The two event-wise min/max bounds, each doubled to the ℓ₁ scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventMinMax {
    /// `2·max(0, max_E P(E) − max_i Q_i(E))`.
    #[serde(with = "serde_rational")]
    pub eps_i: Rational,
    /// `2·max(0, max_E min_i Q_i(E) − P(E))`.
    #[serde(with = "serde_rational")]
    pub eps_ii: Rational,
    pub worst_event_i: u64,
    pub worst_event_ii: u64,
}

pub fn check_event_minmax(planner: &ProbVector, opinions: &CredalSet) -> Result<EventMinMax> {
    check_event_minmax_with_cap(planner, opinions, DEFAULT_EVENT_CAP)
}

pub fn check_event_minmax_with_cap(
    planner: &ProbVector,
    opinions: &CredalSet,
    cap: usize,
) -> Result<EventMinMax> {
    check_cap(planner.len(), cap)?;
    let t = EventTable::build(planner, opinions)?;
    let (mut best_i, mut best_ii) = (0i128, 0i128);
    let (mut worst_i, mut worst_ii) = (0u64, 0u64);
    for e in 0..t.planner.len() {
        let hi = t.opinions.iter().map(|q| q[e]).max().unwrap_or(0);
        let lo = t.opinions.iter().map(|q| q[e]).min().unwrap_or(0);
        if t.planner[e] - hi > best_i {
            best_i = t.planner[e] - hi;
            worst_i = e as u64;
        }
        if lo - t.planner[e] > best_ii {
            best_ii = lo - t.planner[e];
            worst_ii = e as u64;
        }
    }
    if best_i != best_ii {
        return Err(Error::Internal("event bounds disagree under complementation".into()));
    }
    Ok(EventMinMax {
        eps_i: t.to_rational(2 * best_i),
        eps_ii: t.to_rational(2 * best_ii),
        worst_event_i: worst_i,
        worst_event_ii: worst_ii,
    })
}

/// The planner as the mixture given by a report's weights, for inspection.
pub fn pooled_opinion(report: &PoolingReport, inst: &PoolingInstance) -> Result<ProbVector> {
    match report.kind {
        PoolingKind::Additive => mixture(&report.weights, &inst.opinions),
        _ => Err(Error::input("only additive reports carry a probability mixture")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn pv(w: &[(i64, i64)]) -> ProbVector {
        ProbVector::new(w.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn nielsen() -> PoolingInstance {
        PoolingInstance::unlabeled(
            pv(&[(1, 3), (1, 3), (1, 3)]),
            CredalSet::new(vec![pv(&[(2, 3), (1, 3), (0, 1)]), pv(&[(1, 3), (2, 3), (0, 1)])]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn exact_pool_has_zero_error() {
        let q = CredalSet::new(vec![pv(&[(1, 2), (1, 2)]), pv(&[(1, 1), (0, 1)])]).unwrap();
        let inst = PoolingInstance::unlabeled(pv(&[(1, 2), (1, 2)]), q).unwrap();
        let r = pool_min_eps_additive(&inst).unwrap();
        assert!(r.epsilon_min.is_zero());
        assert!(r.error.as_ref().unwrap().is_zero());
        assert!(r.verify(&inst));
    }

    #[test]
    fn nielsen_values() {
        let inst = nielsen();
        let add = pool_min_eps_additive(&inst).unwrap();
        assert_eq!(add.epsilon_min, rat(2, 3));
        assert!(add.verify(&inst));
        let gen = pool_min_eps_genest(&inst).unwrap();
        assert_eq!(gen.epsilon_min, rat(1, 3));
        assert_eq!(gen.weights, vec![rat(1, 3), rat(1, 3)]);
        assert_eq!(gen.residual, Some(pv(&[(0, 1), (0, 1), (1, 1)])));
        assert!(gen.verify(&inst));
    }

    #[test]
    fn genest_with_no_usable_mass() {
        let inst = PoolingInstance::unlabeled(
            ProbVector::point_mass(2, 1),
            CredalSet::singleton(ProbVector::point_mass(2, 0)),
        )
        .unwrap();
        let r = pool_min_eps_genest(&inst).unwrap();
        assert_eq!(r.epsilon_min, int(1));
        assert_eq!(r.residual, Some(ProbVector::point_mass(2, 1)));
    }

    #[test]
    fn condition_c_on_nielsen() {
        let inst = nielsen();
        assert!(check_condition_c(&inst, &int(2)).unwrap().holds);
        assert!(check_condition_c(&inst, &rat(2, 3)).unwrap().holds);
        let r = check_condition_c(&inst, &rat(1, 2)).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert!(w.verify(&inst, &rat(1, 2)));
        assert!(w.premise_margins.iter().all(|m| !m.is_negative()));
    }

    #[test]
    fn condition_cstar_on_nielsen() {
        let inst = nielsen();
        assert!(check_condition_cstar(&inst, &int(1)).unwrap().holds);
        assert!(check_condition_cstar(&inst, &rat(1, 3)).unwrap().holds);
        let r = check_condition_cstar(&inst, &int(0)).unwrap();
        assert!(!r.holds);
        assert!(r.witness.unwrap().verify(&inst, &int(0)));
        assert!(check_condition_cstar(&inst, &rat(5, 4)).is_err());
    }

    #[test]
    fn free_weights_relax_the_fit() {
        let inst = nielsen();
        let free = pool_min_eps_normalized(&inst, false).unwrap();
        let constrained = pool_min_eps_normalized(&inst, true).unwrap();
        assert!(free.epsilon_min <= constrained.epsilon_min);
        assert_eq!(constrained.epsilon_min, rat(2, 3));
        let total: Rational = free.weights.iter().sum();
        assert!(total >= int(1) - &free.epsilon_min && total <= int(1) + &free.epsilon_min);
        assert!(free.verify(&inst));
    }

    #[test]
    fn event_checks_on_nielsen() {
        let inst = nielsen();
        let cm = check_condition_cm(&inst.planner, &inst.opinions, &int(0)).unwrap();
        assert!(cm.min_required_eps <= rat(2, 3));
        assert!(cm.min_required_eps.is_positive());
        let mm = check_event_minmax(&inst.planner, &inst.opinions).unwrap();
        assert_eq!(mm.eps_i, mm.eps_ii);
        assert!(mm.eps_i <= rat(2, 3));
    }

    #[test]
    fn event_cap_refuses() {
        let p = ProbVector::uniform(13);
        let q = CredalSet::singleton(ProbVector::uniform(13));
        assert!(matches!(
            check_condition_cm(&p, &q, &int(0)),
            Err(Error::CapExceeded { .. })
        ));
        assert!(check_event_minmax_with_cap(&p, &q, 13).is_ok());
    }
}
