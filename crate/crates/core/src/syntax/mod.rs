//! Abstract syntax for propositional formulas, gambles and the three
//! inequality languages (expectation, likelihood, gamble inequality).
//!
//! The concrete grammar lives in [`parser`]; [`print`] is its inverse.
//! Derived relations (`<=`, `<`, `>`, `=`) never survive parsing: they are
//! rewritten into the `>=`/`!` core.

mod lexer;
pub mod parser;
pub mod print;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::Rational;

pub use parser::{
    parse, parse_expectation, parse_gamble, parse_gamble_formula, parse_likelihood, parse_prop,
    ParseError,
};

/// Propositional formula. `false` is sugar for `!true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    True,
    Var(String),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

/// Truth assignment source for propositional evaluation.
pub trait Valuation {
    /// `None` when the proposition is not assigned.
    fn truth(&self, prop: &str) -> Option<bool>;
}

impl Prop {
    pub fn var(name: &str) -> Prop {
        Prop::Var(name.to_string())
    }

    pub fn falsum() -> Prop {
        Prop::Not(Box::new(Prop::True))
    }

    pub fn not(p: Prop) -> Prop {
        Prop::Not(Box::new(p))
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction of `parts`, `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Prop>) -> Prop {
        parts
            .into_iter()
            .reduce(Prop::and)
            .unwrap_or(Prop::True)
    }

    /// Disjunction of `parts`, `false` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Prop>) -> Prop {
        parts
            .into_iter()
            .reduce(Prop::or)
            .unwrap_or_else(Prop::falsum)
    }

    pub fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Prop::True => {}
            Prop::Var(v) => {
                out.insert(v.clone());
            }
            Prop::Not(a) => a.collect_props(out),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    /// Evaluates under `v`; the error carries the first unassigned proposition.
    pub fn eval<V: Valuation + ?Sized>(&self, v: &V) -> Result<bool, String> {
        Ok(match self {
            Prop::True => true,
            Prop::Var(name) => v.truth(name).ok_or_else(|| name.clone())?,
            Prop::Not(a) => !a.eval(v)?,
            Prop::And(a, b) => a.eval(v)? && b.eval(v)?,
            Prop::Or(a, b) => a.eval(v)? || b.eval(v)?,
            Prop::Implies(a, b) => !a.eval(v)? || b.eval(v)?,
        })
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Prop::True | Prop::Var(_) => 1,
            Prop::Not(a) => 1 + a.size(),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// A coefficient applied to an argument: `c φ` inside gambles, `c e(γ)` or
/// `c l(φ)` inside basic inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term<T> {
    pub coef: Rational,
    pub arg: T,
}

impl<T> Term<T> {
    pub fn new(coef: Rational, arg: T) -> Self {
        Term { coef, arg }
    }
}

/// Linear combination `b₁φ₁ + … + bₙφₙ` of propositional formulas.
/// The empty combination is the constant-0 gamble.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gamble {
    pub terms: Vec<Term<Prop>>,
}

impl Gamble {
    pub fn new(terms: Vec<Term<Prop>>) -> Self {
        Gamble { terms }
    }

    pub fn zero() -> Self {
        Gamble { terms: Vec::new() }
    }

    /// `1 φ`
    pub fn indicator(p: Prop) -> Self {
        Gamble {
            terms: vec![Term::new(Rational::one(), p)],
        }
    }

    /// `c true`
    pub fn constant(c: Rational) -> Self {
        Gamble {
            terms: vec![Term::new(c, Prop::True)],
        }
    }

    pub fn collect_props(&self, out: &mut BTreeSet<String>) {
        for t in &self.terms {
            t.arg.collect_props(out);
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Gamble {
        Gamble {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(&t.coef * factor, t.arg.clone()))
                .collect(),
        }
    }

    /// Term list concatenation (`γ₁ + γ₂`).
    pub fn plus(&self, other: &Gamble) -> Gamble {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Gamble { terms }
    }

    pub fn size(&self) -> usize {
        self.terms.iter().map(|t| 1 + t.arg.size()).sum()
    }
}

/// Basic inequality `Σ coefᵢ·f(argᵢ) ≥ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearIneq<T> {
    pub terms: Vec<Term<T>>,
    pub bound: Rational,
}

impl<T: Clone> LinearIneq<T> {
    pub fn new(terms: Vec<Term<T>>, bound: Rational) -> Self {
        LinearIneq { terms, bound }
    }

    /// `-Σ … ≥ -bound`, the `<=` reading of the same sum.
    pub fn negated(&self) -> Self {
        LinearIneq {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(-t.coef.clone(), t.arg.clone()))
                .collect(),
            bound: -self.bound.clone(),
        }
    }
}

pub type ExpectationIneq = LinearIneq<Gamble>;
pub type LikelihoodIneq = LinearIneq<Prop>;

/// Gamble inequality literal `left ≥ right`, true in a structure when it
/// holds at every world.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GambleLiteral {
    pub left: Gamble,
    pub right: Gamble,
}

/// Boolean combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolFormula<A> {
    Atom(A),
    Not(Box<BoolFormula<A>>),
    And(Box<BoolFormula<A>>, Box<BoolFormula<A>>),
    Or(Box<BoolFormula<A>>, Box<BoolFormula<A>>),
    Implies(Box<BoolFormula<A>>, Box<BoolFormula<A>>),
}

pub type ExpectationFormula = BoolFormula<ExpectationIneq>;
pub type LikelihoodFormula = BoolFormula<LikelihoodIneq>;
pub type GambleIneqFormula = BoolFormula<GambleLiteral>;

impl<A> BoolFormula<A> {
    pub fn atom(a: A) -> Self {
        BoolFormula::Atom(a)
    }

    pub fn not(f: Self) -> Self {
        BoolFormula::Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        BoolFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        BoolFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        BoolFormula::Implies(Box::new(a), Box::new(b))
    }

    /// Atoms in left-to-right order, repetitions included.
    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a));
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        match self {
            BoolFormula::Atom(a) => f(a),
            BoolFormula::Not(x) => x.visit_atoms(f),
            BoolFormula::And(x, y) | BoolFormula::Or(x, y) | BoolFormula::Implies(x, y) => {
                x.visit_atoms(f);
                y.visit_atoms(f);
            }
        }
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> BoolFormula<B> {
        match self {
            BoolFormula::Atom(a) => BoolFormula::Atom(f(a)),
            BoolFormula::Not(x) => BoolFormula::not(x.map_atoms(f)),
            BoolFormula::And(x, y) => {
                let x = x.map_atoms(f);
                BoolFormula::and(x, y.map_atoms(f))
            }
            BoolFormula::Or(x, y) => {
                let x = x.map_atoms(f);
                BoolFormula::or(x, y.map_atoms(f))
            }
            BoolFormula::Implies(x, y) => {
                let x = x.map_atoms(f);
                BoolFormula::implies(x, y.map_atoms(f))
            }
        }
    }

    pub fn try_map_atoms<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<B, E>,
    ) -> Result<BoolFormula<B>, E> {
        Ok(match self {
            BoolFormula::Atom(a) => BoolFormula::Atom(f(a)?),
            BoolFormula::Not(x) => BoolFormula::not(x.try_map_atoms(f)?),
            BoolFormula::And(x, y) => {
                let x = x.try_map_atoms(f)?;
                BoolFormula::and(x, y.try_map_atoms(f)?)
            }
            BoolFormula::Or(x, y) => {
                let x = x.try_map_atoms(f)?;
                BoolFormula::or(x, y.try_map_atoms(f)?)
            }
            BoolFormula::Implies(x, y) => {
                let x = x.try_map_atoms(f)?;
                BoolFormula::implies(x, y.try_map_atoms(f)?)
            }
        })
    }

    /// Classical evaluation given a truth value per atom.
    pub fn eval(&self, truth: &mut impl FnMut(&A) -> bool) -> bool {
        match self {
            BoolFormula::Atom(a) => truth(a),
            BoolFormula::Not(x) => !x.eval(truth),
            BoolFormula::And(x, y) => {
                let l = x.eval(truth);
                let r = y.eval(truth);
                l && r
            }
            BoolFormula::Or(x, y) => {
                let l = x.eval(truth);
                let r = y.eval(truth);
                l || r
            }
            BoolFormula::Implies(x, y) => {
                let l = x.eval(truth);
                let r = y.eval(truth);
                !l || r
            }
        }
    }

    /// Kleene three-valued evaluation; `None` is unknown.
    pub fn eval_partial(&self, truth: &impl Fn(&A) -> Option<bool>) -> Option<bool> {
        match self {
            BoolFormula::Atom(a) => truth(a),
            BoolFormula::Not(x) => x.eval_partial(truth).map(|v| !v),
            BoolFormula::And(x, y) => match (x.eval_partial(truth), y.eval_partial(truth)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            BoolFormula::Or(x, y) => match (x.eval_partial(truth), y.eval_partial(truth)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            BoolFormula::Implies(x, y) => match (x.eval_partial(truth), y.eval_partial(truth)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
        }
    }

    /// Connective count plus `atom_size` of every atom.
    pub fn size_with(&self, atom_size: &impl Fn(&A) -> usize) -> usize {
        match self {
            BoolFormula::Atom(a) => atom_size(a),
            BoolFormula::Not(x) => 1 + x.size_with(atom_size),
            BoolFormula::And(x, y) | BoolFormula::Or(x, y) | BoolFormula::Implies(x, y) => {
                1 + x.size_with(atom_size) + y.size_with(atom_size)
            }
        }
    }
}

impl<A: PartialEq> BoolFormula<A> {
    /// Distinct atoms in order of first occurrence.
    pub fn distinct_atoms(&self) -> Vec<&A> {
        let mut out: Vec<&A> = Vec::new();
        self.visit_atoms(&mut |a| {
            if !out.contains(&a) {
                out.push(a)
            }
        });
        out
    }
}

impl ExpectationFormula {
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |ineq| {
            for t in &ineq.terms {
                t.arg.collect_props(&mut out);
            }
        });
        out
    }

    /// Syntactically distinct gambles under `e(·)`, in first-occurrence order.
    pub fn gambles(&self) -> Vec<&Gamble> {
        let mut out: Vec<&Gamble> = Vec::new();
        self.visit_atoms(&mut |ineq| {
            for t in &ineq.terms {
                if !out.contains(&&t.arg) {
                    out.push(&t.arg);
                }
            }
        });
        out
    }

    /// Every rational occurring anywhere in the formula.
    pub fn coefficients(&self) -> Vec<&Rational> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |ineq| {
            out.push(&ineq.bound);
            for t in &ineq.terms {
                out.push(&t.coef);
                out.extend(t.arg.terms.iter().map(|g| &g.coef));
            }
        });
        out
    }

    pub fn size(&self) -> usize {
        self.size_with(&|ineq: &ExpectationIneq| {
            1 + ineq.terms.iter().map(|t| 1 + t.arg.size()).sum::<usize>()
        })
    }
}

impl LikelihoodFormula {
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |ineq| {
            for t in &ineq.terms {
                t.arg.collect_props(&mut out);
            }
        });
        out
    }

    pub fn size(&self) -> usize {
        self.size_with(&|ineq: &LikelihoodIneq| {
            1 + ineq.terms.iter().map(|t| 1 + t.arg.size()).sum::<usize>()
        })
    }

    /// `l(φ) ↦ e(1 φ)`; equivalent under every uncertainty semantics.
    pub fn to_expectation(&self) -> ExpectationFormula {
        self.map_atoms(&mut |ineq| LinearIneq {
            terms: ineq
                .terms
                .iter()
                .map(|t| Term::new(t.coef.clone(), Gamble::indicator(t.arg.clone())))
                .collect(),
            bound: ineq.bound.clone(),
        })
    }
}

impl GambleIneqFormula {
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |lit| {
            lit.left.collect_props(&mut out);
            lit.right.collect_props(&mut out);
        });
        out
    }
}

impl ExpectationIneq {
    /// True when every term coefficient is zero.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.coef.is_zero())
    }
}

/// The language a text is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lang {
    Prop,
    Gamble,
    Expectation,
    Likelihood,
    GambleIneq,
}

impl std::str::FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "prop" => Lang::Prop,
            "gamble" => Lang::Gamble,
            "expectation" | "e" => Lang::Expectation,
            "likelihood" | "l" => Lang::Likelihood,
            "gamble-ineq" | "g" => Lang::GambleIneq,
            other => return Err(format!("unknown language `{other}`")),
        })
    }
}

/// Any parsed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Prop(Prop),
    Gamble(Gamble),
    Expectation(ExpectationFormula),
    Likelihood(LikelihoodFormula),
    GambleIneq(GambleIneqFormula),
}

impl Formula {
    pub fn lang(&self) -> Lang {
        match self {
            Formula::Prop(_) => Lang::Prop,
            Formula::Gamble(_) => Lang::Gamble,
            Formula::Expectation(_) => Lang::Expectation,
            Formula::Likelihood(_) => Lang::Likelihood,
            Formula::GambleIneq(_) => Lang::GambleIneq,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prop(x) => x.fmt(f),
            Formula::Gamble(x) => x.fmt(f),
            Formula::Expectation(x) => x.fmt(f),
            Formula::Likelihood(x) => x.fmt(f),
            Formula::GambleIneq(x) => x.fmt(f),
        }
    }
}
