//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use explogic::models::{
    BeliefStructure, CredalStructure, PossibilityStructure, ProbabilityStructure, World,
    WorldMask, WorldSet,
};
use explogic::rational::ratio;
use explogic::syntax::{BoolFormula, ExpectationFormula, ExpectationIneq, Gamble, LinearIneq, Prop, Term};
use explogic::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` worlds where world `i` makes only `w{i}` true.
pub fn tagged_worlds(n: usize) -> WorldSet {
    WorldSet::new((1..=n).map(|i| World::new(format!("w{i}"), [format!("w{i}")])).collect()).unwrap()
}

/// The gamble with the given values on [`tagged_worlds`].
pub fn valued_gamble(values: &[Rational]) -> Gamble {
    Gamble::new(
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Term::new(v.clone(), Prop::var(&format!("w{}", i + 1))))
            .collect(),
    )
}

pub fn random_worlds(r: &mut (impl Rng + ?Sized), n: usize, props: &[&str]) -> WorldSet {
    WorldSet::new(
        (1..=n)
            .map(|i| World::new(format!("w{i}"), props.iter().filter(|_| r.gen_bool(0.5)).map(|p| p.to_string())))
            .collect(),
    )
    .unwrap()
}

/// Nonnegative weights on the `1/denom` grid summing to 1.
pub fn random_distribution(r: &mut (impl Rng + ?Sized), n: usize, denom: i64) -> Vec<Rational> {
    let mut cuts: Vec<i64> = (0..n - 1).map(|_| r.gen_range(0..=denom)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.into_iter().chain([denom]) {
        out.push(ratio(c - prev, denom));
        prev = c;
    }
    out
}

pub fn random_prob(r: &mut (impl Rng + ?Sized), worlds: WorldSet) -> ProbabilityStructure {
    let n = worlds.len();
    ProbabilityStructure::new(worlds, random_distribution(r, n, 12)).unwrap()
}

pub fn random_credal(r: &mut (impl Rng + ?Sized), worlds: WorldSet, k: usize) -> CredalStructure {
    let n = worlds.len();
    let measures = (0..k).map(|_| random_distribution(r, n, 12)).collect();
    CredalStructure::new(worlds, measures).unwrap()
}

pub fn random_belief(r: &mut (impl Rng + ?Sized), worlds: WorldSet) -> BeliefStructure {
    let n = worlds.len();
    let k = r.gen_range(1..=4);
    let masses = random_distribution(r, k, 12);
    let mut focal: BTreeMap<WorldMask, Rational> = BTreeMap::new();
    for m in masses {
        let mut set = WorldMask(r.gen_range(1..(1u64 << n)));
        if set.is_empty() {
            set = WorldMask::singleton(0);
        }
        *focal.entry(set).or_insert_with(Rational::zero) += m;
    }
    let focal = focal.into_iter().filter(|(_, m)| !m.is_zero()).collect();
    BeliefStructure::new(worlds, focal).unwrap()
}

pub fn random_poss(r: &mut (impl Rng + ?Sized), worlds: WorldSet) -> PossibilityStructure {
    let n = worlds.len();
    let mut poss: Vec<Rational> = (0..n).map(|_| ratio(r.gen_range(0..=6), 6)).collect();
    let top = r.gen_range(0..n);
    poss[top] = Rational::one();
    PossibilityStructure::new(worlds, poss).unwrap()
}

pub fn random_rational(r: &mut (impl Rng + ?Sized), max_abs: i64, denom: i64) -> Rational {
    ratio(r.gen_range(-max_abs * denom..=max_abs * denom), denom)
}

pub fn random_prop(r: &mut (impl Rng + ?Sized), props: &[&str], depth: usize) -> Prop {
    if depth == 0 || r.gen_bool(0.35) {
        return match r.gen_range(0..12) {
            0 => Prop::True,
            1 => Prop::falsum(),
            _ => Prop::var(props.choose(r).unwrap()),
        };
    }
    match r.gen_range(0..3) {
        0 => Prop::not(random_prop(r, props, depth - 1)),
        1 => Prop::and(random_prop(r, props, depth - 1), random_prop(r, props, depth - 1)),
        _ => Prop::or(random_prop(r, props, depth - 1), random_prop(r, props, depth - 1)),
    }
}

pub fn random_gamble(r: &mut (impl Rng + ?Sized), props: &[&str], max_terms: usize) -> Gamble {
    let k = r.gen_range(1..=max_terms);
    Gamble::new(
        (0..k)
            .map(|_| Term::new(random_rational(r, 3, 2), random_prop(r, props, 2)))
            .collect(),
    )
}

pub fn random_expectation_formula(r: &mut (impl Rng + ?Sized), props: &[&str], atoms: usize) -> ExpectationFormula {
    let ineqs: Vec<ExpectationIneq> = (0..atoms)
        .map(|_| {
            let k = r.gen_range(1..=2);
            LinearIneq::new(
                (0..k)
                    .map(|_| Term::new(ratio(r.gen_range(-2..=2), 1), random_gamble(r, props, 2)))
                    .collect(),
                random_rational(r, 2, 2),
            )
        })
        .collect();
    random_skeleton(r, &ineqs, 2)
}

fn random_skeleton<A: Clone>(r: &mut (impl Rng + ?Sized), atoms: &[A], depth: usize) -> BoolFormula<A> {
    if depth == 0 || r.gen_bool(0.3) {
        return BoolFormula::atom(atoms.choose(r).unwrap().clone());
    }
    match r.gen_range(0..4) {
        0 => BoolFormula::not(random_skeleton(r, atoms, depth - 1)),
        1 => BoolFormula::and(random_skeleton(r, atoms, depth - 1), random_skeleton(r, atoms, depth - 1)),
        2 => BoolFormula::or(random_skeleton(r, atoms, depth - 1), random_skeleton(r, atoms, depth - 1)),
        _ => BoolFormula::implies(random_skeleton(r, atoms, depth - 1), random_skeleton(r, atoms, depth - 1)),
    }
}

/// `coefs · x >= rhs`, or `>` when strict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coefs: Vec<Rational>,
    pub strict: bool,
    pub rhs: Rational,
}

impl Row {
    pub fn ge(coefs: Vec<Rational>, rhs: Rational) -> Row {
        Row { coefs, strict: false, rhs }
    }

    pub fn gt(coefs: Vec<Rational>, rhs: Rational) -> Row {
        Row { coefs, strict: true, rhs }
    }

    /// Scales so the first nonzero coefficient (or the rhs) has magnitude 1.
    fn normalized(mut self) -> Row {
        let pivot = self.coefs.iter().find(|c| !c.is_zero()).cloned().or_else(|| {
            if self.rhs.is_zero() {
                None
            } else {
                Some(self.rhs.clone())
            }
        });
        if let Some(p) = pivot {
            let s = p.abs();
            for c in &mut self.coefs {
                *c /= &s;
            }
            self.rhs /= &s;
        }
        self
    }
}

/// Fourier–Motzkin elimination over the rationals with strictness tracking.
pub fn fm_feasible(mut rows: Vec<Row>, nvars: usize) -> bool {
    for j in 0..nvars {
        let (mut pos, mut neg, mut rest) = (vec![], vec![], vec![]);
        for row in rows {
            match row.coefs[j].partial_cmp(&Rational::zero()).unwrap() {
                std::cmp::Ordering::Greater => pos.push(row),
                std::cmp::Ordering::Less => neg.push(row),
                std::cmp::Ordering::Equal => rest.push(row),
            }
        }
        for p in &pos {
            for n in &neg {
                let (a, b) = (-n.coefs[j].clone(), p.coefs[j].clone());
                let coefs: Vec<Rational> = p.coefs.iter().zip(&n.coefs).map(|(x, y)| x * &a + y * &b).collect();
                let row = Row {
                    coefs,
                    strict: p.strict || n.strict,
                    rhs: &p.rhs * &a + &n.rhs * &b,
                }
                .normalized();
                if !rest.contains(&row) {
                    rest.push(row);
                }
            }
        }
        rows = rest;
    }
    rows.iter().all(|row| {
        if row.strict {
            Rational::zero() > row.rhs
        } else {
            Rational::zero() >= row.rhs
        }
    })
}

/// Value of a gamble at a truth assignment, by direct evaluation.
pub fn value_at(g: &Gamble, v: &BTreeMap<String, bool>) -> Rational {
    g.terms
        .iter()
        .filter(|t| eval_prop(&t.arg, v))
        .map(|t| t.coef.clone())
        .sum()
}

pub fn eval_prop(p: &Prop, v: &BTreeMap<String, bool>) -> bool {
    match p {
        Prop::True => true,
        Prop::Var(x) => v.get(x).copied().unwrap_or(false),
        Prop::Not(a) => !eval_prop(a, v),
        Prop::And(a, b) => eval_prop(a, v) && eval_prop(b, v),
        Prop::Or(a, b) => eval_prop(a, v) || eval_prop(b, v),
        Prop::Implies(a, b) => !eval_prop(a, v) || eval_prop(b, v),
    }
}

/// Satisfiability under probability semantics by full DNF expansion over
/// the basic inequalities and Fourier–Motzkin on atom weights.
pub fn prob_oracle(f: &ExpectationFormula) -> bool {
    let props: Vec<String> = f.props().into_iter().collect();
    let n_atoms = 1usize << props.len();
    let atoms: Vec<BTreeMap<String, bool>> = (0..n_atoms)
        .map(|a| props.iter().enumerate().map(|(k, p)| (p.clone(), a >> k & 1 == 1)).collect())
        .collect();
    let mut basics: Vec<&ExpectationIneq> = Vec::new();
    f.visit_atoms(&mut |i| {
        if !basics.contains(&i) {
            basics.push(i);
        }
    });
    // each basic inequality as a row over atom weights
    let linear: Vec<(Vec<Rational>, Rational)> = basics
        .iter()
        .map(|ineq| {
            let coefs = atoms
                .iter()
                .map(|v| ineq.terms.iter().map(|t| &t.coef * value_at(&t.arg, v)).sum())
                .collect();
            (coefs, ineq.bound.clone())
        })
        .collect();
    for bits in 0u32..(1 << basics.len()) {
        let truth = |i: &ExpectationIneq| {
            let k = basics.iter().position(|b| *b == i).unwrap();
            bits >> k & 1 == 1
        };
        if !f.eval(&mut |i| truth(i)) {
            continue;
        }
        let mut rows = Vec::new();
        for k in 0..n_atoms {
            let mut e = vec![Rational::zero(); n_atoms];
            e[k] = Rational::one();
            rows.push(Row::ge(e, Rational::zero()));
        }
        rows.push(Row::ge(vec![Rational::one(); n_atoms], Rational::one()));
        rows.push(Row::ge(vec![-Rational::one(); n_atoms], -Rational::one()));
        for (k, (coefs, b)) in linear.iter().enumerate() {
            if bits >> k & 1 == 1 {
                rows.push(Row::ge(coefs.clone(), b.clone()));
            } else {
                rows.push(Row::gt(coefs.iter().map(|c| -c).collect(), -b.clone()));
            }
        }
        if fm_feasible(rows, n_atoms) {
            return true;
        }
    }
    false
}
