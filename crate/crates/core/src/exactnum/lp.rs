//! Dense two-phase primal simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable among ratio ties), so the solver terminates on
//! degenerate programs and always returns the same vertex for the same input.
//!
//! Dual values are reported as shadow prices: `dual[i]` is the rate of change
//! of the optimal objective with respect to `constraints[i].rhs`. With that
//! convention `c - Aᵀy` is the vector of reduced costs, and a nonzero reduced
//! cost pins its variable to one of its finite bounds.

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq)]
pub struct VarBounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl VarBounds {
    pub fn nonnegative() -> Self {
        VarBounds {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        VarBounds {
            lower: None,
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        VarBounds {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint {row} has {found} coefficients, objective has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{found} variable bounds given for {expected} variables")]
    BoundsLength { expected: usize, found: usize },
    #[error("solution failed its optimality certificate: {0}")]
    Certificate(String),
}

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables and no rows.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBounds::nonnegative(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Appends a row and returns its index (the index of its dual value).
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, bounds: VarBounds) {
        self.bounds[var] = bounds;
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::BoundsLength {
                expected: n,
                found: self.bounds.len(),
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::RaggedRow {
                    row,
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
        }
        Ok(())
    }

    fn row_activity(&self, row: usize, x: &[Rational]) -> Rational {
        dot(&self.constraints[row].coeffs, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of [`solve_lp`]. `primal` and `dual` are empty unless optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
    pub objective_value: Rational,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        LpSolution {
            status,
            primal: Vec::new(),
            dual: Vec::new(),
            objective_value: Rational::zero(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `c - Aᵀy`.
    pub fn reduced_costs(&self, lp: &LinearProgram) -> Vec<Rational> {
        let mut r = lp.objective.clone();
        for (c, y) in lp.constraints.iter().zip(&self.dual) {
            if y.is_zero() {
                continue;
            }
            for (rj, a) in r.iter_mut().zip(&c.coeffs) {
                if !a.is_zero() {
                    *rj -= a * y;
                }
            }
        }
        r
    }

    /// Value of the dual program at `dual`; `None` when the reduced costs
    /// lean on an infinite bound (dual infeasible).
    pub fn dual_objective(&self, lp: &LinearProgram) -> Option<Rational> {
        let mut value = Rational::zero();
        for (c, y) in lp.constraints.iter().zip(&self.dual) {
            value += &c.rhs * y;
        }
        for (r, b) in self.reduced_costs(lp).iter().zip(&lp.bounds) {
            if r.is_zero() {
                continue;
            }
            let bound = active_bound(lp.sense, r, b)?;
            value += r * bound;
        }
        Some(value)
    }

    /// Re-derives primal feasibility, dual feasibility, complementary
    /// slackness and equality of objective values from scratch.
    pub fn check_optimality(&self, lp: &LinearProgram) -> Result<(), String> {
        if !self.is_optimal() {
            return Err(format!("status is {:?}", self.status));
        }
        let x = &self.primal;
        if x.len() != lp.num_vars() || self.dual.len() != lp.constraints.len() {
            return Err("solution vector lengths do not match the program".into());
        }
        for (j, (xj, b)) in x.iter().zip(&lp.bounds).enumerate() {
            if b.lower.as_ref().is_some_and(|l| xj < l) || b.upper.as_ref().is_some_and(|u| xj > u) {
                return Err(format!("variable {j} violates its bounds"));
            }
        }
        for (i, (c, y)) in lp.constraints.iter().zip(&self.dual).enumerate() {
            let act = lp.row_activity(i, x);
            let ok = match c.relation {
                Relation::Le => act <= c.rhs,
                Relation::Ge => act >= c.rhs,
                Relation::Eq => act == c.rhs,
            };
            if !ok {
                return Err(format!("row {i} is violated"));
            }
            let sign_ok = match (lp.sense, c.relation) {
                (_, Relation::Eq) => true,
                (Sense::Minimize, Relation::Le) | (Sense::Maximize, Relation::Ge) => !y.is_positive(),
                (Sense::Minimize, Relation::Ge) | (Sense::Maximize, Relation::Le) => !y.is_negative(),
            };
            if !sign_ok {
                return Err(format!("dual of row {i} has the wrong sign"));
            }
            if !y.is_zero() && act != c.rhs {
                return Err(format!("row {i} is slack but carries a nonzero dual"));
            }
        }
        for (j, (r, b)) in self.reduced_costs(lp).iter().zip(&lp.bounds).enumerate() {
            if r.is_zero() {
                continue;
            }
            match active_bound(lp.sense, r, b) {
                Some(bound) if *bound == x[j] => {}
                Some(_) => return Err(format!("variable {j} has a nonzero reduced cost off its bound")),
                None => return Err(format!("reduced cost of variable {j} is dual infeasible")),
            }
        }
        let primal_value = dot(&lp.objective, x);
        if primal_value != self.objective_value {
            return Err("reported objective differs from c·x".into());
        }
        match self.dual_objective(lp) {
            Some(v) if v == primal_value => Ok(()),
            Some(_) => Err("primal and dual objective values differ".into()),
            None => Err("dual objective is unbounded".into()),
        }
    }
}

fn active_bound<'a>(sense: Sense, r: &Rational, b: &'a VarBounds) -> Option<&'a Rational> {
    let at_lower = match sense {
        Sense::Minimize => r.is_positive(),
        Sense::Maximize => r.is_negative(),
    };
    if at_lower {
        b.lower.as_ref()
    } else {
        b.upper.as_ref()
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// How one original variable is expressed through standard-form columns.
struct VarMap {
    offset: Rational,
    terms: Vec<(usize, bool)>, // (column, negated)
}

struct StdRow {
    coeffs: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
}

struct Tableau {
    rows: Vec<Vec<Rational>>, // each row: ncols entries followed by the rhs
    basis: Vec<usize>,
    ncols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, prow: usize, pcol: usize) {
        let piv = self.rows[prow][pcol].clone();
        if piv != Rational::from_integer(1.into()) {
            for v in self.rows[prow].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        let nz: Vec<usize> = (0..=self.ncols)
            .filter(|&j| !self.rows[prow][j].is_zero())
            .collect();
        let pivot_row = self.rows[prow].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == prow || row[pcol].is_zero() {
                continue;
            }
            let factor = row[pcol].clone();
            for &j in &nz {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        self.basis[prow] = pcol;
    }

    /// Reduced costs `c_j - c_B B⁻¹ A_j` for every column.
    fn reduced_costs(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut d = costs.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row.iter()) {
                if !a.is_zero() {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Runs Bland-rule simplex iterations. Returns `false` if unbounded.
    fn optimize(&mut self, costs: &[Rational], allow_artificial: bool) -> bool {
        let limit = if allow_artificial {
            self.ncols
        } else {
            self.first_artificial
        };
        loop {
            let d = self.reduced_costs(costs);
            let Some(enter) = (0..limit).find(|&j| d[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((leave, _)) => self.pivot(leave, enter),
                None => return false,
            }
        }
    }
}

/// Solves `lp` exactly. Deterministic: identical input yields an identical
/// solution, including which optimal vertex is returned.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Change of variables onto nonnegative standard-form columns.
    let mut maps = Vec::with_capacity(n);
    let mut nstruct = 0usize;
    let mut bound_rows: Vec<StdRow> = Vec::new();
    for b in &lp.bounds {
        let map = match (&b.lower, &b.upper) {
            (Some(l), Some(u)) => {
                if u < l {
                    return Ok(LpSolution::without_point(LpStatus::Infeasible));
                }
                let col = nstruct;
                nstruct += 1;
                bound_rows.push(StdRow {
                    coeffs: vec![(col, Rational::from_integer(1.into()))],
                    relation: Relation::Le,
                    rhs: u - l,
                });
                VarMap {
                    offset: l.clone(),
                    terms: vec![(col, false)],
                }
            }
            (Some(l), None) => {
                nstruct += 1;
                VarMap {
                    offset: l.clone(),
                    terms: vec![(nstruct - 1, false)],
                }
            }
            (None, Some(u)) => {
                nstruct += 1;
                VarMap {
                    offset: u.clone(),
                    terms: vec![(nstruct - 1, true)],
                }
            }
            (None, None) => {
                nstruct += 2;
                VarMap {
                    offset: Rational::zero(),
                    terms: vec![(nstruct - 2, false), (nstruct - 1, true)],
                }
            }
        };
        maps.push(map);
    }

    let sign = |negated: bool, v: &Rational| if negated { -v } else { v.clone() };
    let mut std_costs = vec![Rational::zero(); nstruct];
    for (j, m) in maps.iter().enumerate() {
        let c = match lp.sense {
            Sense::Minimize => lp.objective[j].clone(),
            Sense::Maximize => -&lp.objective[j],
        };
        for &(col, neg) in &m.terms {
            std_costs[col] = sign(neg, &c);
        }
    }

    let mut rows: Vec<StdRow> = lp
        .constraints
        .iter()
        .map(|c| {
            let mut rhs = c.rhs.clone();
            let mut coeffs = Vec::new();
            for (a, m) in c.coeffs.iter().zip(&maps) {
                if a.is_zero() {
                    continue;
                }
                if !m.offset.is_zero() {
                    rhs -= a * &m.offset;
                }
                for &(col, neg) in &m.terms {
                    coeffs.push((col, sign(neg, a)));
                }
            }
            StdRow {
                coeffs,
                relation: c.relation,
                rhs,
            }
        })
        .collect();
    let user_rows = rows.len();
    rows.extend(bound_rows);

    // Normalise to nonnegative right-hand sides.
    let mut flipped = vec![false; rows.len()];
    for (row, f) in rows.iter_mut().zip(flipped.iter_mut()) {
        if row.rhs.is_negative() {
            *f = true;
            row.rhs = -&row.rhs;
            for (_, a) in row.coeffs.iter_mut() {
                *a = -&*a;
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let first_slack = nstruct;
    let first_artificial = nstruct + nslack;
    let ncols = first_artificial + nart;

    let one = Rational::from_integer(1.into());
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
        first_artificial,
    };
    let mut init_col = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (first_slack, first_artificial);
    for r in &rows {
        let mut t = vec![Rational::zero(); ncols + 1];
        for (col, a) in &r.coeffs {
            t[*col] += a;
        }
        t[ncols] = r.rhs.clone();
        let init = match r.relation {
            Relation::Le => {
                t[next_slack] = one.clone();
                next_slack += 1;
                next_slack - 1
            }
            Relation::Ge => {
                t[next_slack] = -&one;
                next_slack += 1;
                t[next_art] = one.clone();
                next_art += 1;
                next_art - 1
            }
            Relation::Eq => {
                t[next_art] = one.clone();
                next_art += 1;
                next_art - 1
            }
        };
        tab.rows.push(t);
        tab.basis.push(init);
        init_col.push(init);
    }

    // Phase 1: minimise the sum of artificials.
    if nart > 0 {
        let mut phase1 = vec![Rational::zero(); ncols];
        for c in phase1.iter_mut().skip(first_artificial) {
            *c = one.clone();
        }
        tab.optimize(&phase1, true);
        let infeasibility = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= first_artificial)
            .fold(Rational::zero(), |acc, (i, _)| acc + tab.rhs(i));
        if infeasibility.is_positive() {
            return Ok(LpSolution::without_point(LpStatus::Infeasible));
        }
        // Drive zero-level artificials out where a real column can replace them;
        // rows where none can are redundant and keep their artificial at zero.
        for i in 0..m {
            if tab.basis[i] < first_artificial {
                continue;
            }
            if let Some(j) = (0..first_artificial).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase 2.
    let mut costs = vec![Rational::zero(); ncols];
    costs[..nstruct].clone_from_slice(&std_costs);
    if !tab.optimize(&costs, false) {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut std_x = vec![Rational::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        std_x[b] = tab.rhs(i).clone();
    }
    let primal: Vec<Rational> = maps
        .iter()
        .map(|mp| {
            mp.terms
                .iter()
                .fold(mp.offset.clone(), |acc, &(col, neg)| acc + sign(neg, &std_x[col]))
        })
        .collect();

    // y_i = c_B B⁻¹ e_i, and B⁻¹ e_i is the current column of row i's
    // initial basic variable.
    let dual: Vec<Rational> = (0..user_rows)
        .map(|i| {
            let col = init_col[i];
            let mut y = Rational::zero();
            for (k, &b) in tab.basis.iter().enumerate() {
                let a = &tab.rows[k][col];
                if !a.is_zero() && !costs[b].is_zero() {
                    y += &costs[b] * a;
                }
            }
            if flipped[i] {
                y = -y;
            }
            match lp.sense {
                Sense::Minimize => y,
                Sense::Maximize => -y,
            }
        })
        .collect();

    let objective_value = dot(&lp.objective, &primal);
    let solution = LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective_value,
    };
    solution
        .check_optimality(lp)
        .map_err(LpError::Certificate)?;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn bound_tight_minimum() {
        // min x s.t. x >= 1/3, x <= 1
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1)]);
        lp.add_constraint(vec![int(1)], Relation::Ge, rat(1, 3));
        lp.add_constraint(vec![int(1)], Relation::Le, int(1));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.primal, vec![rat(1, 3)]);
        assert_eq!(s.objective_value, rat(1, 3));
        assert_eq!(s.dual, vec![int(1), int(0)]);
    }

    #[test]
    fn empty_feasible_set() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(0)]);
        lp.add_constraint(vec![int(1)], Relation::Ge, int(1));
        lp.add_constraint(vec![int(1)], Relation::Le, int(0));
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(0)]);
        lp.set_bounds(0, VarBounds::between(int(1), int(0)));
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![int(1), int(1)]);
        lp.add_constraint(vec![int(1), int(-1)], Relation::Le, int(1));
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1), int(1)]);
        lp.add_constraint(vec![int(1)], Relation::Le, int(1));
        assert_eq!(
            solve_lp(&lp),
            Err(LpError::RaggedRow {
                row: 0,
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // max -|x - 2| style: min t s.t. t >= x - 2, t >= 2 - x, x free, x <= 5
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(0), int(1)]);
        lp.set_bounds(0, VarBounds { lower: None, upper: Some(int(5)) });
        lp.add_constraint(vec![int(-1), int(1)], Relation::Ge, int(-2));
        lp.add_constraint(vec![int(1), int(1)], Relation::Ge, int(2));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.objective_value, int(0));
        assert_eq!(s.primal[0], int(2));

        let mut lp = LinearProgram::new(Sense::Maximize, vec![int(3), int(-1)]);
        lp.set_bounds(0, VarBounds::free());
        lp.set_bounds(1, VarBounds::between(int(-2), int(4)));
        lp.add_constraint(vec![int(1), int(1)], Relation::Le, rat(7, 2));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.primal, vec![rat(11, 2), int(-2)]);
        assert_eq!(s.objective_value, rat(37, 2));
        assert_eq!(s.dual, vec![int(3)]);
    }

    #[test]
    fn degenerate_redundant_equalities() {
        // x + y = 1 stated twice, plus x - y = 0.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1), int(2)]);
        lp.add_constraint(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.add_constraint(vec![int(2), int(2)], Relation::Eq, int(2));
        lp.add_constraint(vec![int(1), int(-1)], Relation::Eq, int(0));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.primal, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(s.objective_value, rat(3, 2));
    }

    #[test]
    fn repeated_solves_are_identical() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1), int(1), int(1)]);
        lp.add_constraint(vec![int(1), int(1), int(0)], Relation::Ge, int(1));
        lp.add_constraint(vec![int(0), int(1), int(1)], Relation::Ge, int(1));
        lp.add_constraint(vec![int(1), int(0), int(1)], Relation::Ge, int(1));
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.objective_value, rat(3, 2));
    }
}
