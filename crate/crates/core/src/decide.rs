//! Satisfiability and validity of expectation formulas under probability,
//! credal (`lp`), belief and possibility semantics.
//!
//! Every procedure abstracts basic inequalities to Boolean variables and
//! explores the skeleton with [`search`]. Each satisfying set of literals
//! becomes a linear system over the atoms of the formula's propositions;
//! a feasible system yields a certificate structure whose worlds are atoms.
//! Certificates are always re-checked against the input formula.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::checker::{check_expectation, CheckError};
use crate::expectation::ValueProfile;
use crate::gamble::AtomSpace;
use crate::lp::{lp_feasible, lp_optimize, Direction, Feasibility, LinearSystem, Optimum, Rel};
use crate::models::{
    BeliefStructure, CredalStructure, PossibilityStructure, ProbabilityStructure, Structure,
    World, WorldMask, WorldSet,
};
use crate::rational::{denominator_lcm, Rational};
use crate::search::{search, SearchFailure, SearchStats};
use crate::syntax::{
    BoolFormula, ExpectationFormula, ExpectationIneq, Gamble, LikelihoodFormula, LinearIneq, Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    Prob,
    Lp,
    Bel,
    Poss,
}

impl Semantics {
    pub const ALL: [Semantics; 4] = [Semantics::Prob, Semantics::Lp, Semantics::Bel, Semantics::Poss];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Prob => "prob",
            Semantics::Lp => "lp",
            Semantics::Bel => "bel",
            Semantics::Poss => "poss",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "prob" => Semantics::Prob,
            "lp" | "credal" => Semantics::Lp,
            "bel" | "belief" => Semantics::Bel,
            "poss" => Semantics::Poss,
            other => return Err(format!("unknown semantics `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_props: usize,
    /// Distinct expectation terms.
    pub max_terms: usize,
    /// Boolean branches plus possibility argmax branches.
    pub max_branches: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_props: 3,
            max_terms: 4,
            max_branches: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("budget exceeded: {found} {what} (limit {limit})")]
    Budget {
        what: &'static str,
        found: u64,
        limit: u64,
    },
    #[error("assumptions are inconsistent: they entail every bound")]
    Inconsistent,
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecideStats {
    pub branches: u64,
    pub lp_solves: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Structure),
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatVerdict {
    pub outcome: SatOutcome,
    pub stats: DecideStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidOutcome {
    Valid,
    Countermodel(Structure),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidVerdict {
    pub outcome: ValidOutcome,
    pub stats: DecideStats,
}

/// An expectation formula with integer coefficients throughout.
///
/// Rational gamble coefficients are cleared by rewriting `a·e(γ)` as
/// `(a/c)·e(cγ)` for `c > 0`, which every semantics preserves; each basic
/// inequality is then multiplied by the common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerFormula {
    original: ExpectationFormula,
    scaled: ExpectationFormula,
}

fn scale_ineq(ineq: &ExpectationIneq) -> ExpectationIneq {
    let terms: Vec<Term<Gamble>> = ineq
        .terms
        .iter()
        .map(|t| {
            let c = Rational::from_integer(denominator_lcm(t.arg.terms.iter().map(|g| &g.coef)));
            Term::new(&t.coef / &c, t.arg.scaled(&c))
        })
        .collect();
    let l = Rational::from_integer(denominator_lcm(
        terms.iter().map(|t| &t.coef).chain([&ineq.bound]),
    ));
    LinearIneq::new(
        terms
            .into_iter()
            .map(|t| Term::new(t.coef * &l, t.arg))
            .collect(),
        &ineq.bound * &l,
    )
}

impl IntegerFormula {
    pub fn new(f: ExpectationFormula) -> Self {
        let scaled = f.map_atoms(&mut scale_ineq);
        debug_assert!(scaled.coefficients().iter().all(|c| c.is_integer()));
        IntegerFormula { original: f, scaled }
    }

    pub fn from_likelihood(f: &LikelihoodFormula) -> Self {
        Self::new(f.to_expectation())
    }

    /// The integer-coefficient formula the procedures work on.
    pub fn formula(&self) -> &ExpectationFormula {
        &self.scaled
    }

    pub fn original(&self) -> &ExpectationFormula {
        &self.original
    }

    pub fn negated(&self) -> Self {
        IntegerFormula {
            original: BoolFormula::not(self.original.clone()),
            scaled: BoolFormula::not(self.scaled.clone()),
        }
    }
}

impl From<ExpectationFormula> for IntegerFormula {
    fn from(f: ExpectationFormula) -> Self {
        IntegerFormula::new(f)
    }
}

/// Distinct gambles of a formula, identified by their values on atoms.
struct Terms {
    space: AtomSpace,
    values: Vec<Vec<Rational>>,
}

impl Terms {
    fn collect<'a>(
        gambles: impl IntoIterator<Item = &'a Gamble>,
        props: std::collections::BTreeSet<String>,
        budget: &Budget,
    ) -> Result<Self, DecideError> {
        if props.len() > budget.max_props {
            return Err(DecideError::Budget {
                what: "propositions",
                found: props.len() as u64,
                limit: budget.max_props as u64,
            });
        }
        let space = AtomSpace::new(props, budget.max_props)
            .map_err(|e| DecideError::Internal(e.to_string()))?;
        let mut values: Vec<Vec<Rational>> = Vec::new();
        for g in gambles {
            let v = space
                .values(g)
                .map_err(|e| DecideError::Internal(e.to_string()))?;
            if !values.contains(&v) {
                values.push(v);
            }
        }
        if values.len() > budget.max_terms {
            return Err(DecideError::Budget {
                what: "expectation terms",
                found: values.len() as u64,
                limit: budget.max_terms as u64,
            });
        }
        Ok(Terms { space, values })
    }

    fn index(&self, g: &Gamble) -> usize {
        let v = self.space.values(g).expect("gamble over the formula's propositions");
        self.values.iter().position(|x| *x == v).expect("term collected")
    }

    /// `Σ a_i t_{idx(γ_i)}` with duplicate terms merged.
    fn linear(&self, ineq: &ExpectationIneq, term_vars: &[usize]) -> Vec<(usize, Rational)> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for t in &ineq.terms {
            *acc.entry(term_vars[self.index(&t.arg)]).or_insert_with(Rational::zero) += &t.coef;
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

fn one() -> Rational {
    Rational::one()
}

fn neg_one() -> Rational {
    -Rational::one()
}

/// Base system shared by all branches, with one free variable per term.
struct Encoding {
    sys: LinearSystem,
    term_vars: Vec<usize>,
    shape: Shape,
}

enum Shape {
    Prob { weights: Vec<usize> },
    Lp { measures: Vec<Vec<usize>> },
    Bel { masses: Vec<(usize, usize)> },
    Poss { pi: Vec<usize>, sets: Vec<(usize, usize)> },
}

fn simplex(sys: &mut LinearSystem, prefix: &str, n: usize) -> Vec<usize> {
    let vars: Vec<usize> = (0..n).map(|a| sys.add_var(format!("{prefix}{a}"), true)).collect();
    sys.constrain(vars.iter().map(|v| (*v, one())).collect(), Rel::Eq, one());
    vars
}

/// `Σ_a values[a]·x_a − t` related to 0 by `rel`.
fn expectation_row(
    sys: &mut LinearSystem,
    t: usize,
    values: &[Rational],
    xs: &[usize],
    rel: Rel,
) {
    let mut coefs: Vec<(usize, Rational)> = xs
        .iter()
        .zip(values)
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, v)| (*x, v.clone()))
        .collect();
    coefs.push((t, neg_one()));
    sys.constrain(coefs, rel, Rational::zero());
}

fn encode(sem: Semantics, terms: &Terms) -> Encoding {
    let mut sys = LinearSystem::new();
    let n = terms.space.len();
    let k = terms.values.len();
    let term_vars: Vec<usize> = (0..k).map(|j| sys.add_var(format!("t{j}"), false)).collect();
    let shape = match sem {
        Semantics::Prob => {
            let weights = simplex(&mut sys, "w", n);
            for j in 0..k {
                expectation_row(&mut sys, term_vars[j], &terms.values[j], &weights, Rel::Eq);
            }
            Shape::Prob { weights }
        }
        Semantics::Lp => {
            let measures: Vec<Vec<usize>> =
                (0..k).map(|i| simplex(&mut sys, &format!("m{i}_"), n)).collect();
            for j in 0..k {
                for (i, mu) in measures.iter().enumerate() {
                    let rel = if i == j { Rel::Eq } else { Rel::Ge };
                    expectation_row(&mut sys, term_vars[j], &terms.values[j], mu, rel);
                }
            }
            Shape::Lp { measures }
        }
        Semantics::Bel => {
            let masses: Vec<(usize, usize)> = (1..(1usize << n))
                .map(|set| (set, sys.add_var(format!("m{set:b}"), true)))
                .collect();
            sys.constrain(masses.iter().map(|(_, v)| (*v, one())).collect(), Rel::Eq, one());
            for j in 0..k {
                let mins: Vec<Rational> = masses
                    .iter()
                    .map(|(set, _)| {
                        (0..n)
                            .filter(|a| set >> a & 1 == 1)
                            .map(|a| &terms.values[j][a])
                            .min()
                            .expect("nonempty set")
                            .clone()
                    })
                    .collect();
                let vars: Vec<usize> = masses.iter().map(|(_, v)| *v).collect();
                expectation_row(&mut sys, term_vars[j], &mins, &vars, Rel::Eq);
            }
            Shape::Bel { masses }
        }
        Semantics::Poss => {
            let pi: Vec<usize> = (0..n).map(|a| sys.add_var(format!("pi{a}"), true)).collect();
            for &p in &pi {
                sys.constrain(vec![(p, neg_one())], Rel::Ge, neg_one());
            }
            let mut sets: Vec<(usize, usize)> = Vec::new();
            let full = (1usize << n) - 1;
            let set_var = |sys: &mut LinearSystem, set: usize, sets: &mut Vec<(usize, usize)>| {
                if let Some((_, v)) = sets.iter().find(|(s, _)| *s == set) {
                    return *v;
                }
                let v = sys.add_var(format!("P{set:b}"), true);
                for a in (0..n).filter(|a| set >> a & 1 == 1) {
                    sys.constrain(vec![(v, one()), (pi[a], neg_one())], Rel::Ge, Rational::zero());
                }
                sys.constrain(vec![(v, neg_one())], Rel::Ge, neg_one());
                sets.push((set, v));
                v
            };
            let pw = set_var(&mut sys, full, &mut sets);
            sys.constrain(vec![(pw, one())], Rel::Eq, one());
            for j in 0..k {
                let xs = &terms.values[j];
                let profile = ValueProfile::new(xs);
                let mut coefs = vec![(term_vars[j], one())];
                for i in 0..profile.values.len() - 1 {
                    let step = &profile.values[i + 1] - &profile.values[i];
                    let set = profile.above[i].0 as usize;
                    let v = set_var(&mut sys, set, &mut sets);
                    coefs.push((v, -step));
                }
                sys.constrain(coefs, Rel::Eq, profile.values[0].clone());
            }
            Shape::Poss { pi, sets }
        }
    };
    Encoding {
        sys,
        term_vars,
        shape,
    }
}

fn add_literal(sys: &mut LinearSystem, terms: &Terms, term_vars: &[usize], ineq: &ExpectationIneq, value: bool) {
    let coefs = terms.linear(ineq, term_vars);
    if value {
        sys.constrain(coefs, Rel::Ge, ineq.bound.clone());
    } else {
        sys.constrain(
            coefs.into_iter().map(|(v, c)| (v, -c)).collect(),
            Rel::Gt,
            -ineq.bound.clone(),
        );
    }
}

fn budget_check(stats: &DecideStats, budget: &Budget) -> Result<(), DecideError> {
    if stats.branches > budget.max_branches {
        Err(DecideError::Budget {
            what: "branches",
            found: stats.branches,
            limit: budget.max_branches,
        })
    } else {
        Ok(())
    }
}

/// Solves a branch system; possibility systems are refined until every
/// threshold variable equals the maximum over its set.
fn solve_branch(
    sys: &LinearSystem,
    shape: &Shape,
    stats: &mut DecideStats,
    budget: &Budget,
) -> Result<Option<Vec<Rational>>, DecideError> {
    stats.lp_solves += 1;
    let witness = match lp_feasible(sys) {
        Feasibility::Feasible(w) => w,
        Feasibility::Infeasible => return Ok(None),
    };
    let Shape::Poss { pi, sets } = shape else {
        return Ok(Some(witness));
    };
    let violated = sets.iter().find(|(set, v)| {
        let max = pi
            .iter()
            .enumerate()
            .filter(|(a, _)| set >> a & 1 == 1)
            .map(|(_, p)| &witness[*p])
            .max()
            .expect("nonempty set");
        witness[*v] != *max
    });
    let Some(&(set, v)) = violated else {
        return Ok(Some(witness));
    };
    for (a, &p) in pi.iter().enumerate() {
        if set >> a & 1 == 0 {
            continue;
        }
        stats.branches += 1;
        budget_check(stats, budget)?;
        let mut refined = sys.clone();
        refined.constrain(vec![(p, one()), (v, neg_one())], Rel::Ge, Rational::zero());
        if let Some(w) = solve_branch(&refined, shape, stats, budget)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Greedily removes atoms from a feasible branch so certificates carry
/// few worlds.
fn sparsify(
    mut sys: LinearSystem,
    mut witness: Vec<Rational>,
    terms: &Terms,
    shape: &Shape,
    stats: &mut DecideStats,
    budget: &Budget,
) -> Result<Vec<Rational>, DecideError> {
    for a in 0..terms.space.len() {
        let vars: Vec<usize> = match shape {
            Shape::Prob { weights } => vec![weights[a]],
            Shape::Lp { measures } => measures.iter().map(|m| m[a]).collect(),
            Shape::Bel { masses } => masses
                .iter()
                .filter(|(set, _)| set >> a & 1 == 1)
                .map(|(_, v)| *v)
                .collect(),
            Shape::Poss { pi, .. } => vec![pi[a]],
        };
        if vars.iter().all(|v| witness[*v].is_zero()) {
            continue;
        }
        let mut trial = sys.clone();
        for v in vars {
            trial.constrain(vec![(v, neg_one())], Rel::Ge, Rational::zero());
        }
        if let Some(w) = solve_branch(&trial, shape, stats, budget)? {
            sys = trial;
            witness = w;
        }
    }
    Ok(witness)
}

fn atom_world(space: &AtomSpace, a: usize) -> World {
    World::new(format!("a{a}"), space.true_props(a))
}

fn worlds_for(space: &AtomSpace, keep: &[usize]) -> WorldSet {
    WorldSet::new(keep.iter().map(|&a| atom_world(space, a)).collect()).expect("distinct atom ids")
}

fn certificate(terms: &Terms, enc: &Encoding, w: &[Rational]) -> Result<Structure, DecideError> {
    let space = &terms.space;
    let n = space.len();
    let internal = |e: crate::models::ModelError| DecideError::Internal(e.to_string());
    Ok(match &enc.shape {
        Shape::Prob { weights } => {
            let keep: Vec<usize> = (0..n).filter(|a| w[weights[*a]].is_positive()).collect();
            let mu = keep.iter().map(|a| w[weights[*a]].clone()).collect();
            Structure::Prob(ProbabilityStructure::new(worlds_for(space, &keep), mu).map_err(internal)?)
        }
        Shape::Lp { measures } => {
            let keep: Vec<usize> = (0..n)
                .filter(|a| measures.iter().any(|m| w[m[*a]].is_positive()))
                .collect();
            let mut ms: Vec<Vec<Rational>> = Vec::new();
            for m in measures {
                let mu: Vec<Rational> = keep.iter().map(|a| w[m[*a]].clone()).collect();
                if !ms.contains(&mu) {
                    ms.push(mu);
                }
            }
            Structure::Credal(CredalStructure::new(worlds_for(space, &keep), ms).map_err(internal)?)
        }
        Shape::Bel { masses } => {
            let used: Vec<(usize, Rational)> = masses
                .iter()
                .filter(|(_, v)| w[*v].is_positive())
                .map(|(set, v)| (*set, w[*v].clone()))
                .collect();
            let union = used.iter().fold(0usize, |acc, (s, _)| acc | s);
            let keep: Vec<usize> = (0..n).filter(|a| union >> a & 1 == 1).collect();
            let focal = used
                .into_iter()
                .map(|(set, m)| {
                    let mut mask = WorldMask::EMPTY;
                    for (k, a) in keep.iter().enumerate() {
                        if set >> a & 1 == 1 {
                            mask.insert(k);
                        }
                    }
                    (mask, m)
                })
                .collect();
            Structure::Belief(BeliefStructure::new(worlds_for(space, &keep), focal).map_err(internal)?)
        }
        Shape::Poss { pi, .. } => {
            let keep: Vec<usize> = (0..n).filter(|a| w[pi[*a]].is_positive()).collect();
            let poss = keep.iter().map(|a| w[pi[*a]].clone()).collect();
            Structure::Poss(PossibilityStructure::new(worlds_for(space, &keep), poss).map_err(internal)?)
        }
    })
}

pub fn satisfiable(f: &IntegerFormula, sem: Semantics, budget: &Budget) -> Result<SatVerdict, DecideError> {
    let formula = f.formula();
    let terms = Terms::collect(formula.gambles(), formula.props(), budget)?;
    let enc = encode(sem, &terms);
    let mut search_stats = SearchStats::default();
    let mut stats = DecideStats::default();
    let found = search(formula, budget.max_branches, &mut search_stats, |lits| {
        let mut sys = enc.sys.clone();
        for (ineq, value) in lits {
            add_literal(&mut sys, &terms, &enc.term_vars, ineq, *value);
        }
        match solve_branch(&sys, &enc.shape, &mut stats, budget)? {
            Some(w) => {
                let w = sparsify(sys, w, &terms, &enc.shape, &mut stats, budget)?;
                certificate(&terms, &enc, &w).map(Some)
            }
            None => Ok(None),
        }
    });
    stats.branches += search_stats.branches;
    let outcome = match found {
        Ok(Some(cert)) => {
            let result = check_expectation(&cert, f.original())?;
            if !result.verdict {
                return Err(DecideError::Internal(format!(
                    "certificate does not satisfy `{}`",
                    f.original()
                )));
            }
            SatOutcome::Sat(cert)
        }
        Ok(None) => SatOutcome::Unsat,
        Err(SearchFailure::Budget { limit }) => {
            return Err(DecideError::Budget {
                what: "branches",
                found: limit + 1,
                limit,
            })
        }
        Err(SearchFailure::Theory(e)) => return Err(e),
    };
    Ok(SatVerdict { outcome, stats })
}

pub fn valid(f: &IntegerFormula, sem: Semantics, budget: &Budget) -> Result<ValidVerdict, DecideError> {
    let v = satisfiable(&f.negated(), sem, budget)?;
    Ok(ValidVerdict {
        outcome: match v.outcome {
            SatOutcome::Sat(m) => ValidOutcome::Countermodel(m),
            SatOutcome::Unsat => ValidOutcome::Valid,
        },
        stats: v.stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalExtension {
    /// Largest `b` with `assumptions ⊨ e(γ₀) ≥ b` over credal structures.
    pub bound: Rational,
    /// A credal structure satisfying the assumptions where `e(γ₀)` equals
    /// the bound.
    pub certificate: Structure,
}

/// Natural extension of a set of accepted expectation bounds to `γ₀`,
/// computed as one LP over `k + 1` witness measures.
pub fn infer_lower_bound(
    assumptions: &[ExpectationIneq],
    target: &Gamble,
    budget: &Budget,
) -> Result<NaturalExtension, DecideError> {
    let scaled: Vec<ExpectationIneq> = assumptions.iter().map(scale_ineq).collect();
    let mut props = target.props();
    for a in &scaled {
        for t in &a.terms {
            t.arg.collect_props(&mut props);
        }
    }
    let gambles = scaled
        .iter()
        .flat_map(|a| a.terms.iter().map(|t| &t.arg))
        .chain([target]);
    let terms = Terms::collect(gambles, props, &Budget {
        max_terms: budget.max_terms + 1,
        ..*budget
    })?;
    let mut enc = encode(Semantics::Lp, &terms);
    for a in &scaled {
        add_literal(&mut enc.sys, &terms, &enc.term_vars, a, true);
    }
    let t0 = enc.term_vars[terms.index(target)];
    enc.sys.set_objective(Direction::Min, vec![(t0, one())]);
    let (bound, witness) = match lp_optimize(&enc.sys).map_err(|e| DecideError::Internal(e.to_string()))? {
        Optimum::Optimal { value, witness } => (value, witness),
        Optimum::Infeasible => return Err(DecideError::Inconsistent),
        Optimum::Unbounded => {
            return Err(DecideError::Internal("lower expectation below every gamble value".into()))
        }
    };
    let cert = certificate(&terms, &enc, &witness)?;
    let exact = [
        LinearIneq::new(vec![Term::new(one(), target.clone())], bound.clone()),
        LinearIneq::new(vec![Term::new(neg_one(), target.clone())], -bound.clone()),
    ];
    let goal = assumptions
        .iter()
        .chain(&exact)
        .cloned()
        .map(BoolFormula::atom)
        .reduce(BoolFormula::and)
        .expect("nonempty conjunction");
    if !check_expectation(&cert, &goal)?.verdict {
        return Err(DecideError::Internal("natural-extension certificate failed".into()));
    }
    Ok(NaturalExtension {
        bound,
        certificate: cert,
    })
}

/// `assumptions → e(γ₀) ≥ b` as a formula.
pub fn entailment_formula(assumptions: &[ExpectationIneq], target: &Gamble, bound: &Rational, strict: bool) -> ExpectationFormula {
    let goal = LinearIneq::new(vec![Term::new(one(), target.clone())], bound.clone());
    let goal = if strict {
        // e(γ₀) > b  ≡  !(−e(γ₀) ≥ −b)
        BoolFormula::not(BoolFormula::atom(goal.negated()))
    } else {
        BoolFormula::atom(goal)
    };
    match assumptions.iter().cloned().map(BoolFormula::atom).reduce(BoolFormula::and) {
        Some(a) => BoolFormula::implies(a, goal),
        None => goal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expectation, parse_gamble};

    fn sat(text: &str, sem: Semantics) -> SatOutcome {
        let f = IntegerFormula::new(parse_expectation(text).unwrap());
        satisfiable(&f, sem, &Budget::default()).unwrap().outcome
    }

    fn is_valid(text: &str, sem: Semantics) -> bool {
        let f = IntegerFormula::new(parse_expectation(text).unwrap());
        matches!(valid(&f, sem, &Budget::default()).unwrap().outcome, ValidOutcome::Valid)
    }

    #[test]
    fn scaling_clears_denominators() {
        let f = IntegerFormula::new(parse_expectation("1/2 e(1/3 p + 1 q) >= 1/4").unwrap());
        assert_eq!(f.formula().to_string(), "2 e(1 p + 3 q) >= 3");
    }

    #[test]
    fn simple_probability_sat() {
        match sat("2 e(p) >= 1", Semantics::Prob) {
            SatOutcome::Sat(Structure::Prob(p)) => {
                assert_eq!(p.worlds.len(), 1);
                assert!(p.worlds.worlds()[0].props.contains("p"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotonicity_unsat_everywhere() {
        for sem in Semantics::ALL {
            assert_eq!(sat("e(p) - e(true) > 0", sem), SatOutcome::Unsat, "{sem}");
        }
    }

    #[test]
    fn additivity_separates_prob_from_lp() {
        assert_eq!(sat("e(p) + e(!p) < 1", Semantics::Prob), SatOutcome::Unsat);
        match sat("e(p) + e(!p) < 1", Semantics::Lp) {
            SatOutcome::Sat(Structure::Credal(c)) => assert!(c.measures.len() <= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid("e(1 p + 1 q) = e(p) + e(q)", Semantics::Prob));
        assert!(!is_valid("e(1 p + 1 q) = e(p) + e(q)", Semantics::Lp));
        assert!(is_valid("e(1 p + 1 q) >= e(p) + e(q)", Semantics::Lp));
        assert!(is_valid("(e(p) >= e(q)) -> (e(p|q) = e(p))", Semantics::Poss));
        assert!(!is_valid("(e(p) >= e(q)) -> (e(p|q) = e(p))", Semantics::Prob));
        assert!(is_valid("e(p|q) >= e(p) + e(q) - e(p&q)", Semantics::Bel));
    }

    #[test]
    fn budget_reported() {
        let f = IntegerFormula::new(parse_expectation("e(a) + e(b) + e(c) + e(d) >= 0").unwrap());
        assert!(matches!(
            satisfiable(&f, Semantics::Prob, &Budget::default()),
            Err(DecideError::Budget { what: "propositions", .. })
        ));
    }

    fn ineq(text: &str) -> ExpectationIneq {
        match parse_expectation(text).unwrap() {
            BoolFormula::Atom(a) => a,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn natural_extension_examples() {
        let b = Budget::default();
        let r = infer_lower_bound(&[], &parse_gamble("2 p - 1 q").unwrap(), &b).unwrap();
        assert_eq!(r.bound, Rational::from_integer((-1).into()));
        let a = [ineq("2 e(p) >= 1"), ineq("2 e(q) >= 1")];
        let r = infer_lower_bound(&a, &parse_gamble("1 p&q").unwrap(), &b).unwrap();
        assert_eq!(r.bound, Rational::zero());
        let r = infer_lower_bound(&a[..1], &parse_gamble("1 p|q").unwrap(), &b).unwrap();
        assert_eq!(r.bound, crate::rational::ratio(1, 2));
        assert_eq!(
            infer_lower_bound(&[ineq("e(p) >= 2")], &parse_gamble("1 p").unwrap(), &b),
            Err(DecideError::Inconsistent)
        );
    }
}
