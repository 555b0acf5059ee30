//! Finite probability and signed vectors, the total-variation and
//! Kantorovich–Rubinstein metrics, mixtures, oscillation and Hahn splits.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{
    dot, format_rational, serde_rational_vec, solve_lp, LinearProgram, LpStatus, Rational,
    Relation, Sense, VarBounds,
};

/// The finite set `X`, optionally metrised.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpace {
    labels: Vec<String>,
    metric: Option<Vec<Vec<Rational>>>,
}

impl PointSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::input("a point space needs at least one point"));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::input(format!("duplicate point label {l:?}")));
            }
        }
        Ok(PointSpace {
            labels,
            metric: None,
        })
    }

    /// Points labelled `"1"..="n"`.
    pub fn numbered(n: usize) -> Result<Self> {
        PointSpace::new((1..=n).map(|i| i.to_string()).collect())
    }

    /// Attaches a distance matrix after checking it is a metric.
    pub fn with_metric(mut self, metric: Vec<Vec<Rational>>) -> Result<Self> {
        let n = self.len();
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(Error::input(format!("metric must be a {n}x{n} matrix")));
        }
        for i in 0..n {
            if !metric[i][i].is_zero() {
                return Err(Error::input(format!("metric has nonzero diagonal at {i}")));
            }
            for j in 0..n {
                if metric[i][j] != metric[j][i] {
                    return Err(Error::input(format!("metric is not symmetric at ({i},{j})")));
                }
                if i != j && !metric[i][j].is_positive() {
                    return Err(Error::input(format!(
                        "metric must be positive off the diagonal, found {} at ({i},{j})",
                        format_rational(&metric[i][j])
                    )));
                }
                for k in 0..n {
                    if metric[i][k] > &metric[i][j] + &metric[j][k] {
                        return Err(Error::input(format!(
                            "metric violates the triangle inequality at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        self.metric = Some(metric);
        Ok(self)
    }

    /// Points on the real line with the Euclidean distance, labelled by value.
    pub fn on_line(points: &[Rational]) -> Result<Self> {
        let labels = points.iter().map(format_rational).collect();
        let metric = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        PointSpace::new(labels)?.with_metric(metric)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn metric(&self) -> Option<&[Vec<Rational>]> {
        self.metric.as_deref()
    }
}

#[derive(Serialize, Deserialize)]
struct PointSpaceRepr {
    labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<serde_json::Value>,
}

impl Serialize for PointSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let metric = self.metric.as_ref().map(|m| {
            serde_json::Value::Array(
                m.iter()
                    .flatten()
                    .map(|v| serde_json::Value::String(format_rational(v)))
                    .collect(),
            )
        });
        PointSpaceRepr {
            labels: self.labels.clone(),
            metric,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PointSpaceRepr::deserialize(d)?;
        let space = PointSpace::new(repr.labels).map_err(D::Error::custom)?;
        match repr.metric {
            None | Some(serde_json::Value::Null) => Ok(space),
            Some(v) => {
                let metric = parse_metric(&v, space.len()).map_err(D::Error::custom)?;
                space.with_metric(metric).map_err(D::Error::custom)
            }
        }
    }
}

/// Accepts a flat row-major array of `n²` entries or an array of rows.
fn parse_metric(v: &serde_json::Value, n: usize) -> Result<Vec<Vec<Rational>>> {
    use crate::exactnum::serde_rational::from_json;
    let items = v
        .as_array()
        .ok_or_else(|| Error::input("metric must be an array"))?;
    let parse = |x: &serde_json::Value| from_json(x).map_err(|e| Error::input(format!("metric: {e}")));
    if items.iter().all(|x| x.is_array()) {
        items
            .iter()
            .map(|row| row.as_array().unwrap().iter().map(parse).collect())
            .collect()
    } else {
        if items.len() != n * n {
            return Err(Error::input(format!(
                "flat metric needs {} entries, found {}",
                n * n,
                items.len()
            )));
        }
        let flat: Vec<Rational> = items.iter().map(parse).collect::<Result<_>>()?;
        Ok(flat.chunks(n).map(|c| c.to_vec()).collect())
    }
}

/// A probability vector: nonnegative weights summing to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbVector {
    weights: Vec<Rational>,
}

impl ProbVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::input("probability vector is empty"));
        }
        if let Some(i) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::input(format!(
                "probability vector has negative weight {} at point {i}",
                format_rational(&weights[i])
            )));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::input(format!(
                "probability vector sums to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(ProbVector { weights })
    }

    /// The Dirac mass `δ_i` on an `n`-point space.
    pub fn point_mass(n: usize, i: usize) -> Self {
        let mut weights = vec![Rational::zero(); n];
        weights[i] = Rational::one();
        ProbVector { weights }
    }

    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as u64).into());
        ProbVector {
            weights: vec![w; n],
        }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ f(x) p(x)`.
    pub fn expectation(&self, f: &[Rational]) -> Rational {
        dot(f, &self.weights)
    }

    /// Probability of the event given as a bitmask over points.
    pub fn event_mass(&self, event: u64) -> Rational {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| event >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn to_signed(&self) -> SignedVector {
        SignedVector::new(self.weights.clone())
    }

    pub fn into_weights(self) -> Vec<Rational> {
        self.weights
    }
}

impl Serialize for ProbVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational_vec::serialize(&self.weights, s)
    }
}

impl<'de> Deserialize<'de> for ProbVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = serde_rational_vec::deserialize(d)?;
        ProbVector::new(w).map_err(D::Error::custom)
    }
}

/// An unconstrained finite signed measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedVector {
    pub weights: Vec<Rational>,
}

impl SignedVector {
    pub fn new(weights: Vec<Rational>) -> Self {
        SignedVector { weights }
    }

    pub fn zeros(n: usize) -> Self {
        SignedVector::new(vec![Rational::zero(); n])
    }

    /// `a - b` coordinatewise.
    pub fn difference(a: &[Rational], b: &[Rational]) -> Self {
        SignedVector::new(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn l1_norm(&self) -> Rational {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(Zero::is_zero)
    }
}

impl Serialize for SignedVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational_vec::serialize(&self.weights, s)
    }
}

/// A finite set of probability vectors on one space, standing for its
/// convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalSet {
    members: Vec<ProbVector>,
}

impl CredalSet {
    pub fn new(members: Vec<ProbVector>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::input("credal set must have at least one member"));
        };
        let n = first.len();
        if let Some(bad) = members.iter().find(|m| m.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(CredalSet { members })
    }

    pub fn singleton(p: ProbVector) -> Self {
        CredalSet { members: vec![p] }
    }

    pub fn members(&self) -> &[ProbVector] {
        &self.members
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of points of the underlying space.
    pub fn dim(&self) -> usize {
        self.members[0].len()
    }

    pub fn min_expectation(&self, f: &[Rational]) -> Rational {
        self.members
            .iter()
            .map(|m| m.expectation(f))
            .min()
            .expect("credal sets are nonempty")
    }

    pub fn max_expectation(&self, f: &[Rational]) -> Rational {
        self.members
            .iter()
            .map(|m| m.expectation(f))
            .max()
            .expect("credal sets are nonempty")
    }
}

impl Serialize for CredalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CredalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let members = Vec::<ProbVector>::deserialize(d)?;
        CredalSet::new(members).map_err(D::Error::custom)
    }
}

/// A stakes (payoff) function on the points, with its sup norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StakesVector {
    values: Vec<Rational>,
    norm: Rational,
}

impl StakesVector {
    pub fn new(values: Vec<Rational>) -> Self {
        let norm = values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        StakesVector { values, norm }
    }

    pub fn constant(n: usize, value: Rational) -> Self {
        StakesVector::new(vec![value; n])
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `‖f‖∞`.
    pub fn norm(&self) -> &Rational {
        &self.norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rescaled to unit sup norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<StakesVector> {
        if self.norm.is_zero() {
            return None;
        }
        Some(StakesVector {
            values: self.values.iter().map(|v| v / &self.norm).collect(),
            norm: Rational::one(),
        })
    }

    pub fn negated(&self) -> StakesVector {
        StakesVector {
            values: self.values.iter().map(|v| -v).collect(),
            norm: self.norm.clone(),
        }
    }

    /// `f - g` coordinatewise.
    pub fn minus(&self, other: &StakesVector) -> StakesVector {
        StakesVector::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn min_value(&self) -> Rational {
        self.values.iter().min().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }
}

impl Serialize for StakesVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational_vec::serialize(&self.values, s)
    }
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `Σ_x |p(x) - q(x)|`.
pub fn l1_distance(p: &ProbVector, q: &ProbVector) -> Result<Rational> {
    same_dim(p.len(), q.len())?;
    Ok(SignedVector::difference(p.weights(), q.weights()).l1_norm())
}

/// Kantorovich–Rubinstein distance: the largest `Σ f·(p - q)` over
/// 1-Lipschitz `f` with `‖f‖∞ ≤ 1`, returned with an optimal `f`.
pub fn kr_distance(
    space: &PointSpace,
    p: &ProbVector,
    q: &ProbVector,
) -> Result<(Rational, StakesVector)> {
    let metric = space
        .metric()
        .ok_or_else(|| Error::input("Kantorovich-Rubinstein distance needs a metric on the space"))?;
    let n = space.len();
    same_dim(n, p.len())?;
    same_dim(n, q.len())?;

    let objective = SignedVector::difference(p.weights(), q.weights()).weights;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for j in 0..n {
        lp.set_bounds(j, VarBounds::between(-Rational::one(), Rational::one()));
    }
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut row = vec![Rational::zero(); n];
            row[a] = Rational::one();
            row[b] = -Rational::one();
            lp.add_constraint(row, Relation::Le, metric[a][b].clone());
        }
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Internal(format!(
            "Lipschitz program is bounded and feasible but solved as {:?}",
            sol.status
        )));
    }
    Ok((sol.objective_value, StakesVector::new(sol.primal)))
}

/// `Σ_j weights_j · member_j`.
pub fn mixture(weights: &[Rational], set: &CredalSet) -> Result<ProbVector> {
    if weights.len() != set.len() {
        return Err(Error::input(format!(
            "{} mixture weights for {} members",
            weights.len(),
            set.len()
        )));
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::input("mixture weights must be nonnegative"));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::input(format!(
            "mixture weights sum to {}, not 1",
            format_rational(&total)
        )));
    }
    let mut out = vec![Rational::zero(); set.dim()];
    for (w, m) in weights.iter().zip(set.members()) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(m.weights()) {
            *o += w * x;
        }
    }
    ProbVector::new(out)
}

/// Coordinatewise sign split `e = pos - neg`. Zero coordinates go to the
/// positive side.
pub fn hahn_split(e: &SignedVector) -> (SignedVector, SignedVector) {
    let zero = Rational::zero();
    let pos = e.weights.iter().map(|w| w.max(&zero).clone()).collect();
    let neg = e.weights.iter().map(|w| (-w).max(zero.clone())).collect();
    (SignedVector::new(pos), SignedVector::new(neg))
}

/// `ω(f) = max f - min f`.
pub fn oscillation(f: &StakesVector) -> Rational {
    f.max_value() - f.min_value()
}
