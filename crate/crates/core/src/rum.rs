//! Stochastic choice on all nonempty menus of a finite set of alternatives,
//! compared with the random utility polytope `{Aπ : π ∈ Δ(ℒ)}`.
//!
//! Pairs `(y, Y)` are enumerated menu by menu: menus by size, then
//! lexicographically by their sorted alternative indices, and within a menu
//! by ascending alternative. The rows of a menu are therefore contiguous.
//! Orderings are the permutations of the alternatives in lexicographic
//! order, best first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::duality::{check_nonnegative, check_probability, expect_optimal};
use crate::error::{Error, Result};
use crate::exactnum::{common_denominator, dot, solve_lp, LinearProgram, Rational, Relation, Sense};
use crate::measures::{CredalSet, ProbVector};

/// Default limit on the number of alternatives (7! = 5040 orderings).
pub const DEFAULT_MAX_ALTERNATIVES: usize = 7;
/// Upper limit the environment override may raise the cap to.
pub const HARD_MAX_ALTERNATIVES: usize = 10;
/// Environment variable overriding [`DEFAULT_MAX_ALTERNATIVES`].
pub const MAX_ALTERNATIVES_ENV: &str = "NRB_MAX_ALTERNATIVES";

/// The configured cap on alternatives.
pub fn max_alternatives() -> usize {
    std::env::var(MAX_ALTERNATIVES_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(HARD_MAX_ALTERNATIVES))
        .unwrap_or(DEFAULT_MAX_ALTERNATIVES)
}

fn check_alternative_cap(n: usize) -> Result<()> {
    let limit = max_alternatives();
    if n > limit {
        return Err(Error::CapExceeded {
            what: "number of alternatives",
            limit,
            requested: n,
        });
    }
    Ok(())
}

/// Enumeration of menus and `(alternative, menu)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIndex {
    n: usize,
    menus: Vec<u32>,
    pairs: Vec<(usize, u32)>,
    menu_rows: Vec<Range<usize>>,
    lookup: HashMap<(usize, u32), usize>,
    menu_lookup: HashMap<u32, usize>,
}

fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32usize).filter(move |i| mask & (1 << i) != 0)
}

impl PairIndex {
    pub fn new(n: usize) -> Result<PairIndex> {
        if n == 0 {
            return Err(Error::input("at least one alternative is required"));
        }
        check_alternative_cap(n)?;
        let mut menus: Vec<u32> = (1u32..(1u32 << n)).collect();
        menus.sort_by_key(|&m| (m.count_ones(), members(m).collect::<Vec<_>>()));
        let mut pairs = Vec::new();
        let mut menu_rows = Vec::with_capacity(menus.len());
        for &m in &menus {
            let start = pairs.len();
            pairs.extend(members(m).map(|y| (y, m)));
            menu_rows.push(start..pairs.len());
        }
        let lookup = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let menu_lookup = menus.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(PairIndex {
            n,
            menus,
            pairs,
            menu_rows,
            lookup,
            menu_lookup,
        })
    }

    pub fn num_alternatives(&self) -> usize {
        self.n
    }

    pub fn menus(&self) -> &[u32] {
        &self.menus
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Rows belonging to the `k`-th menu.
    pub fn menu_rows(&self, k: usize) -> Range<usize> {
        self.menu_rows[k].clone()
    }

    pub fn row_of(&self, y: usize, menu: u32) -> Option<usize> {
        self.lookup.get(&(y, menu)).copied()
    }

    pub fn menu_position(&self, menu: u32) -> Option<usize> {
        self.menu_lookup.get(&menu).copied()
    }

    /// Menu position of each row.
    pub fn row_menus(&self) -> Vec<usize> {
        let mut out = vec![0; self.pairs.len()];
        for (k, r) in self.menu_rows.iter().enumerate() {
            for i in r.clone() {
                out[i] = k;
            }
        }
        out
    }
}

/// A strict ranking of the alternatives, best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrictOrdering {
    ranking: Vec<usize>,
}

impl StrictOrdering {
    pub fn new(ranking: Vec<usize>) -> Result<StrictOrdering> {
        let mut seen = vec![false; ranking.len()];
        for &a in &ranking {
            if a >= ranking.len() || std::mem::replace(&mut seen[a], true) {
                return Err(Error::input(format!("{ranking:?} is not a permutation")));
            }
        }
        Ok(StrictOrdering { ranking })
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// The ranking's best element of `menu`.
    pub fn choice(&self, menu: u32) -> Option<usize> {
        self.ranking.iter().copied().find(|&a| menu & (1 << a) != 0)
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        let pos = |x| self.ranking.iter().position(|&r| r == x);
        matches!((pos(a), pos(b)), (Some(i), Some(j)) if i < j)
    }

    /// `"b>a>c"` with the given labels.
    pub fn label(&self, alternatives: &[String]) -> String {
        self.ranking
            .iter()
            .map(|&a| alternatives[a].as_str())
            .collect::<Vec<_>>()
            .join(">")
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("a larger element exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// All `n!` orderings in lexicographic order of their rankings.
pub fn enumerate_orderings(n: usize) -> Result<Vec<StrictOrdering>> {
    check_alternative_cap(n)?;
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![StrictOrdering {
        ranking: current.clone(),
    }];
    while next_permutation(&mut current) {
        out.push(StrictOrdering {
            ranking: current.clone(),
        });
    }
    Ok(out)
}

/// A stochastic choice function on all nonempty menus.
#[derive(Debug, Clone, PartialEq)]
pub struct RumInstance {
    alternatives: Vec<String>,
    index: PairIndex,
    choice: Vec<Rational>,
}

fn menu_label(alternatives: &[String], menu: u32) -> String {
    members(menu)
        .map(|a| alternatives[a].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

impl RumInstance {
    /// Builds the instance from probabilities listed in pair order.
    pub fn from_vector(alternatives: Vec<String>, choice: Vec<Rational>) -> Result<RumInstance> {
        let mut seen = std::collections::HashSet::new();
        for a in &alternatives {
            if !seen.insert(a) {
                return Err(Error::input(format!("duplicate alternative {a:?}")));
            }
        }
        let index = PairIndex::new(alternatives.len())?;
        if choice.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: choice.len(),
            });
        }
        for (i, p) in choice.iter().enumerate() {
            if p.is_negative() {
                let (y, m) = index.pairs[i];
                return Err(Error::input(format!(
                    "negative probability for {} from {{{}}}",
                    alternatives[y],
                    menu_label(&alternatives, m)
                )));
            }
        }
        for (k, &m) in index.menus.iter().enumerate() {
            let total: Rational = choice[index.menu_rows(k)].iter().sum();
            if !total.is_one() {
                return Err(Error::input(format!(
                    "choice probabilities on menu {{{}}} sum to {}, not 1",
                    menu_label(&alternatives, m),
                    crate::exactnum::Exact(&total)
                )));
            }
        }
        Ok(RumInstance {
            alternatives,
            index,
            choice,
        })
    }

    /// Builds the instance from a function of `(alternative, menu mask)`.
    pub fn from_fn(
        alternatives: Vec<String>,
        mut p: impl FnMut(usize, u32) -> Rational,
    ) -> Result<RumInstance> {
        let index = PairIndex::new(alternatives.len())?;
        let choice = index.pairs.iter().map(|&(y, m)| p(y, m)).collect();
        RumInstance::from_vector(alternatives, choice)
    }

    /// Builds the instance from an explicit table, reporting every missing
    /// pair at once.
    pub fn from_table(
        alternatives: Vec<String>,
        table: &BTreeMap<(usize, u32), Rational>,
    ) -> Result<RumInstance> {
        let index = PairIndex::new(alternatives.len())?;
        let missing: Vec<String> = index
            .pairs
            .iter()
            .filter(|p| !table.contains_key(p))
            .map(|&(y, m)| format!("{}|{}", alternatives[y], menu_label(&alternatives, m)))
            .collect();
        if !missing.is_empty() {
            return Err(Error::input(format!("missing choice probabilities for {}", missing.join(" "))));
        }
        if let Some(&(y, m)) = table.keys().find(|k| index.row_of(k.0, k.1).is_none()) {
            return Err(Error::input(format!(
                "alternative index {y} is not in menu mask {m:#b}"
            )));
        }
        let choice = index.pairs.iter().map(|p| table[p].clone()).collect();
        RumInstance::from_vector(alternatives, choice)
    }

    /// A deterministic choice function given by a chooser per menu.
    pub fn deterministic(alternatives: Vec<String>, mut chooser: impl FnMut(u32) -> usize) -> Result<RumInstance> {
        let index = PairIndex::new(alternatives.len())?;
        let picks: HashMap<u32, usize> = index.menus.iter().map(|&m| (m, chooser(m))).collect();
        RumInstance::from_fn(alternatives, |y, m| {
            if picks[&m] == y {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// The choice function generated by a distribution over orderings.
    pub fn from_preference(alternatives: Vec<String>, pi: &[Rational]) -> Result<RumInstance> {
        let orderings = enumerate_orderings(alternatives.len())?;
        if pi.len() != orderings.len() {
            return Err(Error::DimensionMismatch {
                expected: orderings.len(),
                found: pi.len(),
            });
        }
        RumInstance::from_fn(alternatives, |y, m| {
            orderings
                .iter()
                .zip(pi)
                .filter(|(o, _)| o.choice(m) == Some(y))
                .map(|(_, w)| w.clone())
                .sum()
        })
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn index(&self) -> &PairIndex {
        &self.index
    }

    pub fn choice(&self) -> &[Rational] {
        &self.choice
    }

    pub fn probability(&self, y: usize, menu: u32) -> Option<&Rational> {
        self.index.row_of(y, menu).map(|i| &self.choice[i])
    }

    /// `"y|a,b,c"` for row `i`.
    pub fn pair_label(&self, i: usize) -> String {
        let (y, m) = self.index.pairs[i];
        format!("{}|{}", self.alternatives[y], menu_label(&self.alternatives, m))
    }

    pub fn menu_label(&self, menu: u32) -> String {
        menu_label(&self.alternatives, menu)
    }

    /// Number of menus `2^{N_y} − 1`.
    pub fn menu_count(&self) -> usize {
        self.index.menus.len()
    }
}

/// The 0/1 matrix `A` with `a_≻(y,Y) = 1` iff `y` is the `≻`-best element
/// of `Y`, stored by column as the chosen row of each menu.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceMatrix {
    rows: usize,
    orderings: Vec<StrictOrdering>,
    chosen: Vec<Vec<usize>>,
}

impl ChoiceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.orderings.len()
    }

    pub fn orderings(&self) -> &[StrictOrdering] {
        &self.orderings
    }

    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.chosen[col].contains(&row)
    }

    /// Rows holding a one in column `col`, one per menu.
    pub fn chosen_rows(&self, col: usize) -> &[usize] {
        &self.chosen[col]
    }

    pub fn column(&self, col: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.rows];
        for &r in &self.chosen[col] {
            v[r] = Rational::one();
        }
        v
    }

    /// `a_≻ · t` for every ordering.
    pub fn column_payoffs<T>(&self, t: &[T]) -> Vec<T>
    where
        T: Clone + Zero + for<'a> std::ops::Add<&'a T, Output = T>,
    {
        self.chosen
            .iter()
            .map(|rows| rows.iter().fold(T::zero(), |acc, &r| acc + &t[r]))
            .collect()
    }

    /// `Aπ`.
    pub fn apply(&self, pi: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows];
        for (rows, w) in self.chosen.iter().zip(pi) {
            if w.is_zero() {
                continue;
            }
            for &r in rows {
                out[r] += w;
            }
        }
        out
    }
}

pub fn build_matrix(inst: &RumInstance) -> Result<ChoiceMatrix> {
    let orderings = enumerate_orderings(inst.alternatives.len())?;
    let chosen = orderings
        .iter()
        .map(|o| {
            inst.index
                .menus
                .iter()
                .map(|&m| {
                    let y = o.choice(m).expect("menus are nonempty");
                    inst.index.row_of(y, m).expect("pair is enumerated")
                })
                .collect()
        })
        .collect();
    Ok(ChoiceMatrix {
        rows: inst.index.len(),
        orderings,
        chosen,
    })
}

/// Nonnegative integer tags, one per pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedTrialSequence {
    #[serde(serialize_with = "serialize_bigints")]
    pub tags: Vec<BigInt>,
    #[serde(serialize_with = "serialize_bigint")]
    pub width: BigInt,
}

fn serialize_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|t| t.to_string()))
}

/// Payoff comparison for a tagged trial sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagEvaluation {
    /// `Σ P₀ t`.
    pub observed: Rational,
    /// `max_≻ Σ a_≻ t`.
    pub best_ordering: Rational,
    pub width: BigInt,
    pub max_tag: BigInt,
}

impl TaggedTrialSequence {
    pub fn new(tags: Vec<BigInt>) -> Result<TaggedTrialSequence> {
        if tags.iter().any(|t| t.is_negative()) {
            return Err(Error::input("tags must be nonnegative"));
        }
        let width = tag_width(&tags);
        Ok(TaggedTrialSequence { tags, width })
    }

    pub fn from_u64(tags: &[u64]) -> TaggedTrialSequence {
        TaggedTrialSequence::new(tags.iter().map(|&t| BigInt::from(t)).collect()).expect("unsigned tags")
    }

    /// Whether the stored width matches the tags.
    pub fn is_consistent(&self) -> bool {
        self.width == tag_width(&self.tags) && self.tags.iter().all(|t| !t.is_negative())
    }

    pub fn evaluate(&self, inst: &RumInstance, matrix: &ChoiceMatrix) -> TagEvaluation {
        let observed = inst
            .choice
            .iter()
            .zip(&self.tags)
            .fold(Rational::zero(), |acc, (p, t)| acc + p * Rational::from_integer(t.clone()));
        let best = matrix
            .column_payoffs(&self.tags)
            .into_iter()
            .max()
            .unwrap_or_default();
        TagEvaluation {
            observed,
            best_ordering: Rational::from_integer(best),
            width: tag_width(&self.tags),
            max_tag: self.tags.iter().max().cloned().unwrap_or_default(),
        }
    }

    /// Strict violation of `ΣP₀t ≤ max_≻ Σa_≻t + w ε/2`; returns the margin.
    pub fn arsp_violation(&self, inst: &RumInstance, matrix: &ChoiceMatrix, eps: &Rational) -> Option<Rational> {
        if !self.is_consistent() {
            return None;
        }
        let e = self.evaluate(inst, matrix);
        let rhs = e.best_ordering + Rational::from_integer(e.width) * eps / Rational::from_integer(2.into());
        let margin = e.observed - rhs;
        margin.is_positive().then_some(margin)
    }

    /// Strict violation of
    /// `ΣP₀t ≤ (1−ε) max_≻ Σa_≻t + (2^{N_y}−1) ε max_i t_i`; returns the margin.
    pub fn arsp_star_violation(
        &self,
        inst: &RumInstance,
        matrix: &ChoiceMatrix,
        eps: &Rational,
    ) -> Option<Rational> {
        if !self.is_consistent() {
            return None;
        }
        let e = self.evaluate(inst, matrix);
        let menus = Rational::from_integer(BigInt::from(inst.menu_count()));
        let rhs = (Rational::one() - eps) * e.best_ordering + menus * eps * Rational::from_integer(e.max_tag);
        let margin = e.observed - rhs;
        margin.is_positive().then_some(margin)
    }
}

fn tag_width(tags: &[BigInt]) -> BigInt {
    match (tags.iter().max(), tags.iter().min()) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => BigInt::zero(),
    }
}

/// Scales nonnegative rationals to coprime nonnegative integers.
fn integerize(values: &[Rational]) -> Vec<BigInt> {
    let l = common_denominator(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RumKind {
    Additive,
    Residual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RumReport {
    pub kind: RumKind,
    pub epsilon_min: Rational,
    /// Distribution over [`ChoiceMatrix::orderings`]; absent for a residual
    /// report at `ε = 1`.
    pub pi: Option<Vec<Rational>>,
    /// `P₀ − Aπ` for additive reports.
    pub error: Option<Vec<Rational>>,
    /// Row-stochastic residual for residual reports with `ε > 0`.
    pub residual: Option<Vec<Rational>>,
    /// Dual payoffs `z` of the minimal-ε program.
    pub stakes: Vec<Rational>,
}

impl RumReport {
    /// Nonzero weights of `π` labelled by ordering.
    pub fn preference_support(&self, inst: &RumInstance, matrix: &ChoiceMatrix) -> Vec<(String, Rational)> {
        self.pi
            .iter()
            .flat_map(|pi| pi.iter().enumerate())
            .filter(|(_, w)| !w.is_zero())
            .map(|(j, w)| (matrix.orderings[j].label(inst.alternatives()), w.clone()))
            .collect()
    }

    pub fn verify(&self, inst: &RumInstance, matrix: &ChoiceMatrix) -> bool {
        let p0 = inst.choice();
        let is_distribution = |pi: &[Rational]| {
            pi.len() == matrix.cols() && pi.iter().all(|w| !w.is_negative()) && pi.iter().sum::<Rational>().is_one()
        };
        match self.kind {
            RumKind::Additive => {
                let (Some(pi), Some(e)) = (&self.pi, &self.error) else {
                    return false;
                };
                let api = matrix.apply(pi);
                is_distribution(pi)
                    && e.len() == p0.len()
                    && e.iter().zip(p0.iter().zip(&api)).all(|(ex, (px, ax))| ex == &(px - ax))
                    && e.iter().map(|v| v.abs()).sum::<Rational>() == self.epsilon_min
            }
            RumKind::Residual => {
                let eps = &self.epsilon_min;
                let keep = Rational::one() - eps;
                let api = match &self.pi {
                    Some(pi) if is_distribution(pi) => matrix.apply(pi),
                    Some(_) => return false,
                    None if eps.is_one() => vec![Rational::zero(); p0.len()],
                    None => return false,
                };
                let resid = match &self.residual {
                    Some(r) => {
                        let stochastic = (0..inst.menu_count()).all(|k| {
                            let rows = inst.index().menu_rows(k);
                            r[rows.clone()].iter().all(|v| !v.is_negative())
                                && r[rows].iter().sum::<Rational>().is_one()
                        });
                        if !stochastic || r.len() != p0.len() {
                            return false;
                        }
                        r.clone()
                    }
                    None if eps.is_zero() => vec![Rational::zero(); p0.len()],
                    None => return false,
                };
                p0.iter()
                    .zip(api.iter().zip(&resid))
                    .all(|(px, (ax, rx))| px == &(&keep * ax + eps * rx))
            }
        }
    }
}

/// One constraint row per pair with `value` in each ordering column that
/// chooses it; the remaining `nvars − cols` entries are zero.
fn incidence_rows(matrix: &ChoiceMatrix, nvars: usize, value: &Rational) -> Vec<Vec<Rational>> {
    let mut rows = vec![vec![Rational::zero(); nvars]; matrix.rows()];
    for (j, chosen) in matrix.chosen.iter().enumerate() {
        for &r in chosen {
            rows[r][j] = value.clone();
        }
    }
    rows
}

/// `min ‖P₀ − Aπ‖₁` over distributions `π` on orderings.
pub fn rum_min_eps(inst: &RumInstance, matrix: &ChoiceMatrix) -> Result<RumReport> {
    let m = matrix.rows();
    let n = matrix.cols();
    let (pos0, neg0) = (n, n + m);
    let nvars = n + 2 * m;
    let mut objective = vec![Rational::zero(); nvars];
    for c in objective.iter_mut().skip(pos0) {
        *c = Rational::one();
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    let rows = incidence_rows(matrix, nvars, &Rational::one());
    for (i, mut row) in rows.into_iter().enumerate() {
        row[pos0 + i] = Rational::one();
        row[neg0 + i] = -Rational::one();
        lp.add_constraint(row, Relation::Eq, inst.choice[i].clone());
    }
    let mut sum = vec![Rational::zero(); nvars];
    for c in sum.iter_mut().take(n) {
        *c = Rational::one();
    }
    lp.add_constraint(sum, Relation::Eq, Rational::one());

    let sol = expect_optimal(solve_lp(&lp)?, "random utility fit")?;
    let pi = sol.primal[..n].to_vec();
    let api = matrix.apply(&pi);
    let error = inst.choice.iter().zip(&api).map(|(p, a)| p - a).collect();
    let report = RumReport {
        kind: RumKind::Additive,
        epsilon_min: sol.objective_value,
        pi: Some(pi),
        error: Some(error),
        residual: None,
        stakes: sol.dual[..m].to_vec(),
    };
    if !report.verify(inst, matrix) {
        return Err(Error::Internal("random utility fit failed re-verification".into()));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArspCheck {
    pub holds: bool,
    pub report: RumReport,
    pub certificate: Option<TaggedTrialSequence>,
    /// Strict violation margin of the certificate.
    pub margin: Option<Rational>,
}

/// ε-ARSP: holds exactly when the additive minimal ε is at most `eps`.
pub fn check_eps_arsp(inst: &RumInstance, matrix: &ChoiceMatrix, eps: &Rational) -> Result<ArspCheck> {
    check_nonnegative(eps)?;
    let report = rum_min_eps(inst, matrix)?;
    if &report.epsilon_min <= eps {
        return Ok(ArspCheck {
            holds: true,
            report,
            certificate: None,
            margin: None,
        });
    }
    let lo = report.stakes.iter().min().cloned().unwrap_or_default();
    let shifted: Vec<Rational> = report.stakes.iter().map(|z| z - &lo).collect();
    let cert = TaggedTrialSequence::new(integerize(&shifted))?;
    let margin = cert
        .arsp_violation(inst, matrix, eps)
        .ok_or_else(|| Error::Internal("tagged trial sequence does not violate ε-ARSP".into()))?;
    Ok(ArspCheck {
        holds: false,
        report,
        certificate: Some(cert),
        margin: Some(margin),
    })
}

/// `min ε` with `P₀ = (1−ε)Aπ + εR₀` for a row-stochastic `R₀`.
pub fn rum_residual_min_eps(inst: &RumInstance, matrix: &ChoiceMatrix) -> Result<RumReport> {
    let m = matrix.rows();
    let n = matrix.cols();
    let menus = inst.menu_count();
    let (rho0, eps_var) = (n, n + m);
    let nvars = n + m + 1;
    let mut objective = vec![Rational::zero(); nvars];
    objective[eps_var] = Rational::one();
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    let rows = incidence_rows(matrix, nvars, &Rational::one());
    for (i, mut row) in rows.into_iter().enumerate() {
        row[rho0 + i] = Rational::one();
        lp.add_constraint(row, Relation::Eq, inst.choice[i].clone());
    }
    let mut sum = vec![Rational::zero(); nvars];
    for c in sum.iter_mut().take(n) {
        *c = Rational::one();
    }
    sum[eps_var] = Rational::one();
    lp.add_constraint(sum, Relation::Eq, Rational::one());
    for k in 0..menus {
        let mut row = vec![Rational::zero(); nvars];
        for i in inst.index.menu_rows(k) {
            row[rho0 + i] = Rational::one();
        }
        row[eps_var] = -Rational::one();
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }

    let sol = expect_optimal(solve_lp(&lp)?, "residual random utility fit")?;
    let eps = sol.primal[eps_var].clone();
    let keep = Rational::one() - &eps;
    let pi = (!keep.is_zero()).then(|| sol.primal[..n].iter().map(|v| v / &keep).collect());
    let residual = (!eps.is_zero()).then(|| sol.primal[rho0..eps_var].iter().map(|v| v / &eps).collect());
    let report = RumReport {
        kind: RumKind::Residual,
        epsilon_min: eps,
        pi,
        error: None,
        residual,
        stakes: sol.dual[..m].to_vec(),
    };
    if !report.verify(inst, matrix) {
        return Err(Error::Internal("residual decomposition failed re-verification".into()));
    }
    Ok(report)
}

/// ε-ARSP*: holds exactly when the residual minimal ε is at most `eps`.
pub fn check_eps_arsp_star(inst: &RumInstance, matrix: &ChoiceMatrix, eps: &Rational) -> Result<ArspCheck> {
    check_probability(eps, "epsilon")?;
    let report = rum_residual_min_eps(inst, matrix)?;
    if &report.epsilon_min <= eps {
        return Ok(ArspCheck {
            holds: true,
            report,
            certificate: None,
            margin: None,
        });
    }
    let z = residual_separator(inst, matrix, eps)?;
    // Shifting a whole menu by a constant leaves the violation unchanged, so
    // align every menu maximum at one, then shift globally to minimum zero.
    let mut aligned = z.clone();
    for k in 0..inst.menu_count() {
        let rows = inst.index.menu_rows(k);
        let top = z[rows.clone()].iter().max().cloned().unwrap_or_default();
        for i in rows {
            aligned[i] = &z[i] - &top + Rational::one();
        }
    }
    let lo = aligned.iter().min().cloned().unwrap_or_default();
    let shifted: Vec<Rational> = aligned.iter().map(|v| v - &lo).collect();
    let cert = TaggedTrialSequence::new(integerize(&shifted))?;
    let margin = cert
        .arsp_star_violation(inst, matrix, eps)
        .ok_or_else(|| Error::Internal("tagged trial sequence does not violate ε-ARSP*".into()))?;
    Ok(ArspCheck {
        holds: false,
        report,
        certificate: Some(cert),
        margin: Some(margin),
    })
}

/// Dual payoffs of the fixed-ε residual feasibility program. When the
/// decomposition is infeasible they satisfy
/// `P₀·z > (1−ε) max_≻ a_≻·z + ε Σ_Y max_{y∈Y} z(y,Y)`.
fn residual_separator(inst: &RumInstance, matrix: &ChoiceMatrix, eps: &Rational) -> Result<Vec<Rational>> {
    let m = matrix.rows();
    let n = matrix.cols();
    let keep = Rational::one() - eps;
    let (rho0, pos0, neg0) = (n, n + m, n + 2 * m);
    let nvars = n + 3 * m;
    let mut objective = vec![Rational::zero(); nvars];
    for c in objective.iter_mut().skip(pos0) {
        *c = Rational::one();
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    let rows = incidence_rows(matrix, nvars, &keep);
    for (i, mut row) in rows.into_iter().enumerate() {
        row[rho0 + i] = Rational::one();
        row[pos0 + i] = Rational::one();
        row[neg0 + i] = -Rational::one();
        lp.add_constraint(row, Relation::Eq, inst.choice[i].clone());
    }
    let mut sum = vec![Rational::zero(); nvars];
    for c in sum.iter_mut().take(n) {
        *c = Rational::one();
    }
    lp.add_constraint(sum, Relation::Eq, Rational::one());
    for k in 0..inst.menu_count() {
        let mut row = vec![Rational::zero(); nvars];
        for i in inst.index.menu_rows(k) {
            row[rho0 + i] = Rational::one();
        }
        lp.add_constraint(row, Relation::Eq, eps.clone());
    }
    let sol = expect_optimal(solve_lp(&lp)?, "fixed-level residual program")?;
    if !sol.objective_value.is_positive() {
        return Err(Error::Internal("residual program feasible above the minimal level".into()));
    }
    Ok(sol.dual[..m].to_vec())
}

/// `P = P₀ / (2^{N_y} − 1)` and `Q_≻ = a_≻ / (2^{N_y} − 1)` as probability
/// vectors over the pairs.
pub fn normalized_vectors(inst: &RumInstance, matrix: &ChoiceMatrix) -> Result<(ProbVector, CredalSet)> {
    let k = Rational::from_integer(BigInt::from(inst.menu_count()));
    let p = ProbVector::new(inst.choice.iter().map(|v| v / &k).collect())?;
    let q = (0..matrix.cols())
        .map(|j| ProbVector::new(matrix.column(j).into_iter().map(|v| v / &k).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok((p, CredalSet::new(q)?))
}

/// `P₀·z − max_≻ a_≻·z`.
pub fn stakes_gap(inst: &RumInstance, matrix: &ChoiceMatrix, z: &[Rational]) -> Rational {
    let best = matrix.column_payoffs(z).into_iter().max().unwrap_or_default();
    dot(&inst.choice, z) - best
}

/// Revealed strict preference of a deterministic choice function:
/// `relation[a][b]` when `a` is chosen from some menu containing `b ≠ a`.
pub fn revealed_preference(inst: &RumInstance) -> Option<Vec<Vec<bool>>> {
    let n = inst.alternatives.len();
    let mut rel = vec![vec![false; n]; n];
    for (k, &m) in inst.index.menus.iter().enumerate() {
        let rows = inst.index.menu_rows(k);
        let chosen: Vec<usize> = rows.filter(|&i| !inst.choice[i].is_zero()).collect();
        let [i] = chosen[..] else { return None };
        if !inst.choice[i].is_one() {
            return None;
        }
        let a = inst.index.pairs[i].0;
        for b in members(m).filter(|&b| b != a) {
            rel[a][b] = true;
        }
    }
    Some(rel)
}

/// Whether a relation given as an adjacency matrix has no directed cycle.
pub fn is_acyclic(rel: &[Vec<bool>]) -> bool {
    let n = rel.len();
    let mut indegree: Vec<usize> = (0..n).map(|b| (0..n).filter(|&a| rel[a][b]).count()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&b| indegree[b] == 0).collect();
    let mut seen = 0;
    while let Some(a) = stack.pop() {
        seen += 1;
        for b in 0..n {
            if rel[a][b] {
                indegree[b] -= 1;
                if indegree[b] == 0 {
                    stack.push(b);
                }
            }
        }
    }
    seen == n
}

impl fmt::Display for StrictOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranking.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(">"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("y{i}")).collect()
    }

    /// The four-alternative example with size-3 menus tilted toward their
    /// smallest element.
    fn tilted() -> RumInstance {
        RumInstance::from_fn(names(4), |y, m| match m.count_ones() {
            3 if y == m.trailing_zeros() as usize => rat(4, 10),
            3 => rat(3, 10),
            k => rat(1, k as i64),
        })
        .unwrap()
    }

    /// y1 from {y1,y2} but y2 from {y1,y2,y3}.
    fn warp_violation() -> RumInstance {
        RumInstance::deterministic(names(3), |m| match m {
            0b011 => 0,
            0b111 => 1,
            _ => m.trailing_zeros() as usize,
        })
        .unwrap()
    }

    #[test]
    fn orderings_and_pairs() {
        assert_eq!(enumerate_orderings(1).unwrap().len(), 1);
        assert_eq!(enumerate_orderings(3).unwrap().len(), 6);
        let four = enumerate_orderings(4).unwrap();
        assert_eq!(four.len(), 24);
        assert_eq!(four[0].ranking(), &[0, 1, 2, 3]);
        assert_eq!(four[23].ranking(), &[3, 2, 1, 0]);
        let idx = PairIndex::new(4).unwrap();
        assert_eq!(idx.len(), 32);
        assert_eq!(idx.menus()[..5], [0b0001, 0b0010, 0b0100, 0b1000, 0b0011]);
        assert_eq!(idx.menus().last(), Some(&0b1111));
    }

    #[test]
    fn matrix_structure() {
        let one = RumInstance::from_vector(names(1), vec![int(1)]).unwrap();
        let a = build_matrix(&one).unwrap();
        assert_eq!((a.rows(), a.cols()), (1, 1));
        assert!(a.entry(0, 0));

        let two = RumInstance::from_fn(names(2), |_, m| rat(1, m.count_ones() as i64)).unwrap();
        let a = build_matrix(&two).unwrap();
        let row = two.index().row_of(0, 0b11).unwrap();
        assert!(a.entry(row, 0));
        assert!(!a.entry(row, 1));

        let inst = tilted();
        let a = build_matrix(&inst).unwrap();
        for j in 0..a.cols() {
            let col = a.column(j);
            assert_eq!(col.iter().sum::<Rational>(), int(15));
            for k in 0..inst.menu_count() {
                assert_eq!(col[inst.index().menu_rows(k)].iter().sum::<Rational>(), int(1));
            }
        }
    }

    #[test]
    fn invalid_choice_functions_are_named() {
        let err = RumInstance::from_fn(names(2), |_, _| rat(1, 3)).unwrap_err().to_string();
        assert!(err.contains("{y1}"), "{err}");
        let table = BTreeMap::from([((0usize, 1u32), int(1))]);
        let err = RumInstance::from_table(names(2), &table).unwrap_err().to_string();
        assert!(err.contains("y2|y2") && err.contains("y1|y1,y2"), "{err}");
    }

    #[test]
    fn tilted_example_fit() {
        let inst = tilted();
        let a = build_matrix(&inst).unwrap();
        let r = rum_min_eps(&inst, &a).unwrap();
        assert_eq!(r.epsilon_min, rat(1, 10));
        assert!(r.verify(&inst, &a));
        assert_eq!(stakes_gap(&inst, &a, &r.stakes), rat(1, 10));

        let uniform = vec![rat(1, 24); 24];
        let dev: Rational = inst
            .choice()
            .iter()
            .zip(a.apply(&uniform))
            .map(|(p, q)| (p - q).abs())
            .sum();
        assert_eq!(dev, rat(8, 15));
    }

    #[test]
    fn tilted_example_arsp() {
        let inst = tilted();
        let a = build_matrix(&inst).unwrap();
        assert!(check_eps_arsp(&inst, &a, &rat(1, 10)).unwrap().holds);
        let r = check_eps_arsp(&inst, &a, &rat(1, 20)).unwrap();
        assert!(!r.holds);
        let cert = r.certificate.unwrap();
        assert!(cert.arsp_violation(&inst, &a, &rat(1, 20)).is_some());
        assert!(cert.tags.iter().any(|t| t.is_zero()));
    }

    #[test]
    fn warp_violation_needs_full_error() {
        let inst = warp_violation();
        let a = build_matrix(&inst).unwrap();
        let r = rum_min_eps(&inst, &a).unwrap();
        assert!(r.epsilon_min >= int(2));
        let check = check_eps_arsp(&inst, &a, &rat(3, 2)).unwrap();
        assert!(check.certificate.unwrap().arsp_violation(&inst, &a, &rat(3, 2)).is_some());

        let mut tags = vec![0u64; inst.index().len()];
        tags[inst.index().row_of(0, 0b011).unwrap()] = 1;
        tags[inst.index().row_of(1, 0b111).unwrap()] = 1;
        let t = TaggedTrialSequence::from_u64(&tags);
        let e = t.evaluate(&inst, &a);
        assert_eq!((e.observed, e.best_ordering), (int(2), int(1)));
        for eps in [int(0), int(1), rat(19, 10)] {
            assert!(t.arsp_violation(&inst, &a, &eps).is_some());
        }
        assert!(t.arsp_violation(&inst, &a, &int(2)).is_none());
    }

    #[test]
    fn rationalizable_choices_fit_exactly() {
        let pi: Vec<Rational> = (1..=6).map(|k| rat(k, 21)).collect();
        let inst = RumInstance::from_preference(names(3), &pi).unwrap();
        let a = build_matrix(&inst).unwrap();
        assert!(rum_min_eps(&inst, &a).unwrap().epsilon_min.is_zero());
        let res = rum_residual_min_eps(&inst, &a).unwrap();
        assert!(res.epsilon_min.is_zero());
        assert!(res.verify(&inst, &a));
        let det = RumInstance::deterministic(names(3), |m| m.trailing_zeros() as usize).unwrap();
        assert!(check_eps_arsp(&det, &a, &int(0)).unwrap().holds);
    }

    #[test]
    fn residual_fit_and_star_certificates() {
        let inst = tilted();
        let a = build_matrix(&inst).unwrap();
        let add = rum_min_eps(&inst, &a).unwrap();
        let res = rum_residual_min_eps(&inst, &a).unwrap();
        assert!(res.verify(&inst, &a));
        assert!(res.epsilon_min.is_positive());
        assert!(add.epsilon_min <= int(30) * &res.epsilon_min);

        assert!(check_eps_arsp_star(&inst, &a, &int(1)).unwrap().holds);
        let below = &res.epsilon_min / int(2);
        let r = check_eps_arsp_star(&inst, &a, &below).unwrap();
        assert!(!r.holds);
        assert!(r.certificate.unwrap().arsp_star_violation(&inst, &a, &below).is_some());
        assert!(check_eps_arsp_star(&inst, &a, &res.epsilon_min).unwrap().holds);
        assert!(check_eps_arsp_star(&inst, &a, &int(2)).is_err());
    }

    #[test]
    fn normalized_distance_matches() {
        let inst = tilted();
        let a = build_matrix(&inst).unwrap();
        let (p, q) = normalized_vectors(&inst, &a).unwrap();
        let d = crate::duality::min_set_distance(&CredalSet::singleton(p), &q).unwrap();
        assert_eq!(d.value * int(15), rat(1, 10));
    }

    #[test]
    fn deterministic_three_alternatives_exhaustive() {
        let index = PairIndex::new(3).unwrap();
        let sizes: Vec<usize> = index.menus().iter().map(|m| m.count_ones() as usize).collect();
        let total: usize = sizes.iter().product();
        assert_eq!(total, 24);
        let mut a = None;
        for code in 0..total {
            let mut rest = code;
            let mut picks = HashMap::new();
            for (&m, &s) in index.menus().iter().zip(&sizes) {
                let pos = rest % s;
                rest /= s;
                picks.insert(m, members(m).nth(pos).unwrap());
            }
            let inst = RumInstance::deterministic(names(3), |m| picks[&m]).unwrap();
            let a = a.get_or_insert_with(|| build_matrix(&inst).unwrap());
            let eps = rum_min_eps(&inst, a).unwrap().epsilon_min;
            let acyclic = is_acyclic(&revealed_preference(&inst).unwrap());
            if eps < int(2) {
                assert!(acyclic, "choice {code} fits within {eps} yet reveals a cycle");
            }
            assert_eq!(eps.is_zero(), acyclic);
        }
    }
}
