//! Translation of expectation formulas into likelihood formulas.
//!
//! Under probability, `e(Σ b_i φ_i)` is linear: `Σ b_i l(φ_i)`. Under belief
//! and possibility semantics, `e(γ)` telescopes over the distinct values
//! `x_1 < ... < x_n` of `γ` on atoms:
//! `x_1 + Σ (x_{i+1} − x_i)·l(γ > x_i)`, with each threshold event written
//! as a minimal disjunctive normal form over `γ`'s propositions.

use num_traits::Zero;
use thiserror::Error;

use crate::decide::Semantics;
use crate::gamble::{AtomSpace, GambleError};
use crate::rational::Rational;
use crate::syntax::{
    ExpectationFormula, ExpectationIneq, Gamble, LikelihoodFormula, LikelihoodIneq, LinearIneq,
    Prop, Term,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("expectation formulas have no likelihood translation under lp semantics")]
    NoTranslation,
    #[error(transparent)]
    Gamble(#[from] GambleError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationReport {
    pub output: LikelihoodFormula,
    pub input_size: usize,
    pub output_size: usize,
}

impl TranslationReport {
    pub fn blowup(&self) -> Rational {
        Rational::new(self.output_size.into(), self.input_size.max(1).into())
    }
}

pub fn translate(
    f: &ExpectationFormula,
    sem: Semantics,
    atom_cap: usize,
) -> Result<TranslationReport, TranslateError> {
    let output = match sem {
        Semantics::Lp => return Err(TranslateError::NoTranslation),
        Semantics::Prob => f.map_atoms(&mut linear_ineq),
        Semantics::Bel | Semantics::Poss => f.try_map_atoms(&mut |i| choquet_ineq(i, atom_cap))?,
    };
    let report = TranslationReport {
        input_size: f.size(),
        output_size: output.size(),
        output,
    };
    if sem == Semantics::Prob {
        assert!(
            report.output_size <= 2 * report.input_size,
            "probability translation must stay linear"
        );
    }
    Ok(report)
}

fn nonempty(mut terms: Vec<Term<Prop>>) -> Vec<Term<Prop>> {
    if terms.is_empty() {
        terms.push(Term::new(Rational::zero(), Prop::True));
    }
    terms
}

fn linear_ineq(ineq: &ExpectationIneq) -> LikelihoodIneq {
    let terms = ineq
        .terms
        .iter()
        .flat_map(|t| {
            t.arg
                .terms
                .iter()
                .map(move |g| Term::new(&t.coef * &g.coef, g.arg.clone()))
        })
        .collect();
    LinearIneq::new(nonempty(terms), ineq.bound.clone())
}

fn choquet_ineq(ineq: &ExpectationIneq, cap: usize) -> Result<LikelihoodIneq, TranslateError> {
    let mut terms = Vec::new();
    let mut bound = ineq.bound.clone();
    for t in &ineq.terms {
        let (base, steps) = telescope(&t.arg, cap)?;
        bound -= &t.coef * base;
        terms.extend(
            steps
                .into_iter()
                .map(|(step, event)| Term::new(&t.coef * step, event)),
        );
    }
    Ok(LinearIneq::new(nonempty(terms), bound))
}

/// `(x_1, [(x_{i+1} − x_i, γ > x_i)])`
pub fn telescope(g: &Gamble, cap: usize) -> Result<(Rational, Vec<(Rational, Prop)>), GambleError> {
    let space = AtomSpace::new(g.props(), cap)?;
    let values = space.values(g)?;
    let mut levels = values.clone();
    levels.sort();
    levels.dedup();
    let steps = levels
        .windows(2)
        .map(|w| {
            let above: Vec<usize> = (0..space.len()).filter(|a| values[*a] > w[0]).collect();
            (&w[1] - &w[0], minimal_dnf(&space, &above))
        })
        .collect();
    Ok((levels[0].clone(), steps))
}

/// A cube fixes the bits in `mask` to `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cube {
    mask: usize,
    bits: usize,
}

impl Cube {
    fn covers(self, m: usize) -> bool {
        m & self.mask == self.bits
    }
}

/// Minimal sum-of-products for the set of atoms `on` (Quine–McCluskey with
/// an exact cover for small prime sets and a greedy cover otherwise).
pub fn minimal_dnf(space: &AtomSpace, on: &[usize]) -> Prop {
    let n = space.props().len();
    if on.is_empty() {
        return Prop::falsum();
    }
    let full = (1usize << n) - 1;
    let mut level: Vec<Cube> = on.iter().map(|&m| Cube { mask: full, bits: m }).collect();
    let mut primes: Vec<Cube> = Vec::new();
    while !level.is_empty() {
        let mut next: Vec<Cube> = Vec::new();
        let mut merged = vec![false; level.len()];
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let (a, b) = (level[i], level[j]);
                let diff = a.bits ^ b.bits;
                if a.mask == b.mask && diff.count_ones() == 1 {
                    merged[i] = true;
                    merged[j] = true;
                    let c = Cube {
                        mask: a.mask & !diff,
                        bits: a.bits & !diff,
                    };
                    if !next.contains(&c) {
                        next.push(c);
                    }
                }
            }
        }
        for (c, m) in level.iter().zip(&merged) {
            if !m && !primes.contains(c) {
                primes.push(*c);
            }
        }
        level = next;
    }
    let cover = select_cover(&primes, on);
    let mut cubes: Vec<Cube> = cover.into_iter().map(|i| primes[i]).collect();
    cubes.sort_by_key(|c| (on.iter().position(|m| c.covers(*m)), c.mask.count_ones()));
    Prop::disjunction(cubes.into_iter().map(|c| {
        Prop::conjunction((0..n).filter(|k| c.mask >> k & 1 == 1).map(|k| {
            let p = Prop::var(&space.props()[k]);
            if c.bits >> k & 1 == 1 {
                p
            } else {
                Prop::not(p)
            }
        }))
    }))
}

fn cost(primes: &[Cube], pick: &[usize]) -> (usize, usize) {
    (
        pick.len(),
        pick.iter().map(|i| primes[*i].mask.count_ones() as usize).sum(),
    )
}

fn select_cover(primes: &[Cube], on: &[usize]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    // essential primes
    for &m in on {
        let covering: Vec<usize> = (0..primes.len()).filter(|i| primes[*i].covers(m)).collect();
        if covering.len() == 1 && !chosen.contains(&covering[0]) {
            chosen.push(covering[0]);
        }
    }
    let uncovered = |chosen: &[usize]| -> Vec<usize> {
        on.iter()
            .copied()
            .filter(|m| !chosen.iter().any(|i| primes[*i].covers(*m)))
            .collect()
    };
    let rest: Vec<usize> = (0..primes.len()).filter(|i| !chosen.contains(i)).collect();
    if uncovered(&chosen).is_empty() {
        chosen.sort_unstable();
        return chosen;
    }
    if rest.len() <= 12 {
        let mut best: Option<Vec<usize>> = None;
        for subset in 1u32..(1 << rest.len()) {
            let mut pick = chosen.clone();
            pick.extend(
                rest.iter()
                    .enumerate()
                    .filter(|(k, _)| subset >> k & 1 == 1)
                    .map(|(_, i)| *i),
            );
            if uncovered(&pick).is_empty()
                && best.as_ref().map_or(true, |b| cost(primes, &pick) < cost(primes, b))
            {
                best = Some(pick);
            }
        }
        chosen = best.expect("primes cover every minterm");
    } else {
        while !uncovered(&chosen).is_empty() {
            let left = uncovered(&chosen);
            let best = rest
                .iter()
                .copied()
                .filter(|i| !chosen.contains(i))
                .max_by_key(|i| {
                    (
                        left.iter().filter(|m| primes[*i].covers(**m)).count(),
                        std::cmp::Reverse(primes[*i].mask.count_ones()),
                        std::cmp::Reverse(*i),
                    )
                })
                .expect("primes cover every minterm");
            chosen.push(best);
        }
    }
    chosen.sort_unstable();
    chosen
}
