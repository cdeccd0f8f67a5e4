//! Exact rational linear programming.
//!
//! Dense two-phase simplex with Bland's rule. Strict constraints are
//! solved by maximizing a shared slack `ε ∈ [0, 1]`: `a·x > b` becomes
//! `a·x − ε ≥ b`, and the system is feasible iff the optimum has `ε > 0`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Ge,
    Gt,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub nonneg: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coefs: Vec<(usize, Rational)>,
    pub rel: Rel,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub direction: Direction,
    pub coefs: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Objective>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("optimization needs an objective")]
    NoObjective,
    #[error("optimization over strict constraints is not supported")]
    StrictConstraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Optimum {
    Optimal { value: Rational, witness: Vec<Rational> },
    Unbounded,
    Infeasible,
}

fn dot(coefs: &[(usize, Rational)], x: &[Rational]) -> Rational {
    coefs.iter().map(|(i, c)| c * &x[*i]).sum()
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, nonneg: bool) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            nonneg,
        });
        self.variables.len() - 1
    }

    pub fn constrain(&mut self, coefs: Vec<(usize, Rational)>, rel: Rel, rhs: Rational) {
        for (i, _) in &coefs {
            assert!(*i < self.variables.len(), "constraint refers to unknown variable {i}");
        }
        self.constraints.push(Constraint { coefs, rel, rhs });
    }

    pub fn set_objective(&mut self, direction: Direction, coefs: Vec<(usize, Rational)>) {
        for (i, _) in &coefs {
            assert!(*i < self.variables.len(), "objective refers to unknown variable {i}");
        }
        self.objective = Some(Objective { direction, coefs });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Exact substitution check of every constraint and sign restriction.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len()
            && self
                .variables
                .iter()
                .zip(x)
                .all(|(v, x)| !v.nonneg || !x.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coefs, x);
                match c.rel {
                    Rel::Ge => lhs >= c.rhs,
                    Rel::Gt => lhs > c.rhs,
                    Rel::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn objective_value(&self, x: &[Rational]) -> Option<Rational> {
        self.objective.as_ref().map(|o| dot(&o.coefs, x))
    }
}

fn write_linear(f: &mut fmt::Formatter<'_>, sys: &LinearSystem, coefs: &[(usize, Rational)]) -> fmt::Result {
    if coefs.is_empty() {
        return f.write_str("0");
    }
    for (k, (i, c)) in coefs.iter().enumerate() {
        let name = &sys.variables[*i].name;
        if k == 0 {
            write!(f, "{c} {name}")?;
        } else if c.is_negative() {
            write!(f, " - {} {name}", -c)?;
        } else {
            write!(f, " + {c} {name}")?;
        }
    }
    Ok(())
}

/// The debug dump format.
impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# {} variables, {} constraints",
            self.variables.len(),
            self.constraints.len()
        )?;
        for v in &self.variables {
            writeln!(f, "var {} {}", v.name, if v.nonneg { ">= 0" } else { "free" })?;
        }
        if let Some(o) = &self.objective {
            f.write_str(match o.direction {
                Direction::Min => "min ",
                Direction::Max => "max ",
            })?;
            write_linear(f, self, &o.coefs)?;
            writeln!(f)?;
        }
        for (k, c) in self.constraints.iter().enumerate() {
            write!(f, "c{}: ", k + 1)?;
            write_linear(f, self, &c.coefs)?;
            let rel = match c.rel {
                Rel::Ge => ">=",
                Rel::Gt => ">",
                Rel::Eq => "=",
            };
            writeln!(f, " {rel} {}", c.rhs)?;
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs and the negated objective value.
    cost: Vec<Rational>,
    value: Rational,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let nz: Vec<usize> = (0..self.rows[r].len())
            .filter(|j| !self.rows[r][*j].is_zero())
            .collect();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for &j in &nz {
                let d = &factor * &prow[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &factor * &prhs;
        }
        if !self.cost[c].is_zero() {
            let factor = self.cost[c].clone();
            for &j in &nz {
                let d = &factor * &prow[j];
                self.cost[j] -= d;
            }
            self.value -= &factor * &prhs;
        }
        self.basis[r] = c;
    }

    fn set_cost(&mut self, cost: Vec<Rational>) {
        self.cost = cost;
        self.value = Rational::zero();
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if self.cost[b].is_zero() {
                continue;
            }
            let factor = self.cost[b].clone();
            for j in 0..self.cost.len() {
                if !self.rows[r][j].is_zero() {
                    let d = &factor * &self.rows[r][j];
                    self.cost[j] -= d;
                }
            }
            self.value -= &factor * &self.rhs[r];
        }
    }

    /// Minimizes over columns `< limit` with Bland's rule.
    fn run(&mut self, limit: usize) -> Outcome {
        loop {
            let Some(c) = (0..limit).find(|j| self.cost[*j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn objective(&self) -> Rational {
        -self.value.clone()
    }
}

/// Standard-form solve: minimize `c·y` subject to `A y = b`, `y ≥ 0`.
fn solve_standard(a: Vec<Vec<Rational>>, b: Vec<Rational>, c: &[Rational]) -> Optimum {
    let n = c.len();
    let m = a.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (mut row, mut bi)) in a.into_iter().zip(b).enumerate() {
        if bi.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            bi = -bi;
        }
        row.resize(n + m, Rational::zero());
        row[n + i] = Rational::one();
        rows.push(row);
        rhs.push(bi);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        cost: vec![],
        value: Rational::zero(),
    };
    let mut phase1 = vec![Rational::zero(); n + m];
    for x in phase1.iter_mut().skip(n) {
        *x = Rational::one();
    }
    t.set_cost(phase1);
    t.run(n + m);
    if t.objective().is_positive() {
        return Optimum::Infeasible;
    }
    // drive artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|j| !t.rows[r][*j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    for row in t.rows.iter_mut() {
        row.truncate(n);
    }
    t.set_cost(c.to_vec());
    match t.run(n) {
        Outcome::Unbounded => Optimum::Unbounded,
        Outcome::Optimal => {
            let mut y = vec![Rational::zero(); n];
            for (r, &bv) in t.basis.iter().enumerate() {
                y[bv] = t.rhs[r].clone();
            }
            Optimum::Optimal {
                value: t.objective(),
                witness: y,
            }
        }
    }
}

/// Minimizes `cost·x` over the system with every strict relation read as
/// non-strict, plus optional extra columns.
fn solve(sys: &LinearSystem, cost: &[(usize, Rational)], with_eps: bool) -> Optimum {
    // column layout: per variable one or two columns, then surplus columns,
    // then optional ε column
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::new();
    let mut ncols = 0;
    for v in &sys.variables {
        if v.nonneg {
            col_of.push((ncols, None));
            ncols += 1;
        } else {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        }
    }
    let surplus_start = ncols;
    let n_surplus = sys
        .constraints
        .iter()
        .filter(|c| c.rel != Rel::Eq)
        .count()
        + usize::from(with_eps);
    ncols += n_surplus;
    let eps_col = with_eps.then(|| {
        ncols += 1;
        ncols - 1
    });

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut surplus = surplus_start;
    for c in &sys.constraints {
        let mut row = vec![Rational::zero(); ncols];
        for (i, coef) in &c.coefs {
            let (p, q) = col_of[*i];
            row[p] += coef;
            if let Some(q) = q {
                row[q] -= coef;
            }
        }
        if c.rel != Rel::Eq {
            row[surplus] = -Rational::one();
            surplus += 1;
        }
        if c.rel == Rel::Gt {
            if let Some(e) = eps_col {
                row[e] = -Rational::one();
            }
        }
        a.push(row);
        b.push(c.rhs.clone());
    }
    if let Some(e) = eps_col {
        // ε + s = 1
        let mut row = vec![Rational::zero(); ncols];
        row[e] = Rational::one();
        row[surplus] = Rational::one();
        a.push(row);
        b.push(Rational::one());
    }
    let mut c = vec![Rational::zero(); ncols];
    for (i, coef) in cost {
        let (p, q) = col_of[*i];
        c[p] += coef;
        if let Some(q) = q {
            c[q] -= coef;
        }
    }
    if let Some(e) = eps_col {
        c[e] = -Rational::one();
    }
    match solve_standard(a, b, &c) {
        Optimum::Optimal { value, witness } => {
            let mut x = Vec::with_capacity(sys.variables.len());
            for (p, q) in &col_of {
                let mut v = witness[*p].clone();
                if let Some(q) = q {
                    v -= &witness[*q];
                }
                x.push(v);
            }
            if let Some(e) = eps_col {
                x.push(witness[e].clone());
            }
            Optimum::Optimal { value, witness: x }
        }
        other => other,
    }
}

pub fn lp_feasible(sys: &LinearSystem) -> Feasibility {
    let strict = sys.constraints.iter().any(|c| c.rel == Rel::Gt);
    let result = solve(sys, &[], strict);
    let witness = match result {
        Optimum::Optimal { mut witness, .. } => {
            if strict {
                let eps = witness.pop().expect("ε column");
                if !eps.is_positive() {
                    return Feasibility::Infeasible;
                }
            }
            witness
        }
        Optimum::Infeasible => return Feasibility::Infeasible,
        Optimum::Unbounded => unreachable!("ε is bounded and the feasibility cost is zero"),
    };
    assert!(sys.satisfied_by(&witness), "LP witness failed substitution");
    Feasibility::Feasible(witness)
}

pub fn lp_optimize(sys: &LinearSystem) -> Result<Optimum, LpError> {
    let obj = sys.objective.as_ref().ok_or(LpError::NoObjective)?;
    if sys.constraints.iter().any(|c| c.rel == Rel::Gt) {
        return Err(LpError::StrictConstraint);
    }
    let cost: Vec<(usize, Rational)> = match obj.direction {
        Direction::Min => obj.coefs.clone(),
        Direction::Max => obj.coefs.iter().map(|(i, c)| (*i, -c)).collect(),
    };
    Ok(match solve(sys, &cost, false) {
        Optimum::Optimal { value, witness } => {
            assert!(sys.satisfied_by(&witness), "LP witness failed substitution");
            let value = match obj.direction {
                Direction::Min => value,
                Direction::Max => -value,
            };
            debug_assert_eq!(Some(&value), sys.objective_value(&witness).as_ref());
            Optimum::Optimal { value, witness }
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn infeasible_bounds() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x", false);
        s.constrain(vec![(x, int(1))], Rel::Ge, int(1));
        s.constrain(vec![(x, int(-1))], Rel::Ge, int(0));
        assert_eq!(lp_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn strict_interval() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x", false);
        s.constrain(vec![(x, int(1))], Rel::Gt, int(0));
        s.constrain(vec![(x, int(-1))], Rel::Gt, int(-1));
        let Feasibility::Feasible(w) = lp_feasible(&s) else { panic!() };
        assert!(w[0] > int(0) && w[0] < int(1));
        assert_eq!(w[0], ratio(1, 2));

        // x > 0 and x <= 0
        let mut s = LinearSystem::new();
        let x = s.add_var("x", true);
        s.constrain(vec![(x, int(1))], Rel::Gt, int(0));
        s.constrain(vec![(x, int(-1))], Rel::Ge, int(0));
        assert_eq!(lp_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn two_atom_probability_system() {
        // atoms p, !p; 2 w_p >= 1
        let mut s = LinearSystem::new();
        let wp = s.add_var("w_p", true);
        let wn = s.add_var("w_np", true);
        s.constrain(vec![(wp, int(1)), (wn, int(1))], Rel::Eq, int(1));
        s.constrain(vec![(wp, int(2))], Rel::Ge, int(1));
        s.set_objective(Direction::Max, vec![(wp, int(1))]);
        let Ok(Optimum::Optimal { value, witness }) = lp_optimize(&s) else { panic!() };
        assert_eq!(value, int(1));
        assert_eq!(witness, vec![int(1), int(0)]);
        assert!(matches!(lp_feasible(&s), Feasibility::Feasible(_)));
    }

    #[test]
    fn optimize_examples() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x", true);
        s.constrain(vec![(x, int(-1))], Rel::Ge, ratio(-3, 8));
        s.set_objective(Direction::Max, vec![(x, int(1))]);
        assert_eq!(
            lp_optimize(&s).unwrap(),
            Optimum::Optimal { value: ratio(3, 8), witness: vec![ratio(3, 8)] }
        );

        let mut s = LinearSystem::new();
        let x = s.add_var("x", false);
        s.set_objective(Direction::Min, vec![(x, int(1))]);
        assert_eq!(lp_optimize(&s).unwrap(), Optimum::Unbounded);

        s.constrain(vec![(x, int(1))], Rel::Gt, int(0));
        assert_eq!(lp_optimize(&s), Err(LpError::StrictConstraint));
    }

    #[test]
    fn redundant_equalities() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x", true);
        let y = s.add_var("y", true);
        s.constrain(vec![(x, int(1)), (y, int(1))], Rel::Eq, int(1));
        s.constrain(vec![(x, int(2)), (y, int(2))], Rel::Eq, int(2));
        s.set_objective(Direction::Min, vec![(x, int(1)), (y, int(3))]);
        let Ok(Optimum::Optimal { value, .. }) = lp_optimize(&s) else { panic!() };
        assert_eq!(value, int(1));
    }

    #[test]
    fn dump_format() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x", true);
        let t = s.add_var("t", false);
        s.constrain(vec![(x, int(1)), (t, int(-1))], Rel::Gt, ratio(3, 8));
        s.set_objective(Direction::Min, vec![(t, int(2))]);
        assert_eq!(
            s.to_string(),
            "# 2 variables, 1 constraints\nvar x >= 0\nvar t free\nmin 2 t\nc1: 1 x - 1 t > 3/8\n"
        );
    }
}
