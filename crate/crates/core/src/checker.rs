//! Satisfaction `M ⊨ f` for expectation, likelihood and gamble-inequality
//! formulas.
//!
//! Credal structures read both `e` and `l` as lower envelopes; belief
//! structures use Bel and possibility structures use Poss.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::expectation::{expectation, gamble_values};
use crate::models::{event_weight, Kind, ModelError, Structure, WeightMode, WorldSet};
use crate::rational::Rational;
use crate::syntax::{
    ExpectationFormula, Formula, Gamble, GambleIneqFormula, Lang, LikelihoodFormula, LinearIneq,
    Prop,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("{kind} structures have no expectation or likelihood; use a gamble-inequality formula")]
    NoMeasure { kind: Kind },
    #[error("{0:?} texts have no truth value in a structure")]
    NotAFormula(Lang),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    /// Canonical text of the basic inequality.
    pub inequality: String,
    /// Left-hand side; for a gamble literal `L >= R`, `min_w (L − R)(w)`.
    pub lhs: Rational,
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: bool,
    /// One entry per distinct basic inequality, in first-occurrence order.
    pub trace: Vec<TraceEntry>,
}

fn mode_for(s: &Structure) -> Result<WeightMode, CheckError> {
    match s.kind() {
        Kind::Plain => Err(CheckError::NoMeasure { kind: Kind::Plain }),
        Kind::Credal => Ok(WeightMode::Lower),
        _ => Ok(WeightMode::Point),
    }
}

/// Value of `e(γ)` in `s`.
pub fn eval_term(s: &Structure, g: &Gamble) -> Result<Rational, CheckError> {
    Ok(expectation(s, g, mode_for(s)?)?)
}

/// Value of `l(φ)` in `s`.
pub fn eval_likelihood(s: &Structure, p: &Prop) -> Result<Rational, CheckError> {
    let mode = mode_for(s)?;
    Ok(event_weight(s, s.worlds().extension(p), mode)?)
}

fn check_linear<T: PartialEq + Clone>(
    f: &crate::syntax::BoolFormula<LinearIneq<T>>,
    mut term: impl FnMut(&T) -> Result<Rational, CheckError>,
) -> Result<CheckResult, CheckError>
where
    LinearIneq<T>: std::fmt::Display,
{
    let atoms = f.distinct_atoms();
    let mut trace = Vec::with_capacity(atoms.len());
    for ineq in &atoms {
        let mut lhs = Rational::zero();
        for t in &ineq.terms {
            lhs += &t.coef * term(&t.arg)?;
        }
        trace.push(TraceEntry {
            inequality: ineq.to_string(),
            holds: lhs >= ineq.bound,
            lhs,
            bound: ineq.bound.clone(),
        });
    }
    let verdict = f.eval(&mut |a| trace[atoms.iter().position(|b| *b == a).unwrap()].holds);
    Ok(CheckResult { verdict, trace })
}

pub fn check_expectation(s: &Structure, f: &ExpectationFormula) -> Result<CheckResult, CheckError> {
    mode_for(s)?;
    check_linear(f, |g| eval_term(s, g))
}

pub fn check_likelihood(s: &Structure, f: &LikelihoodFormula) -> Result<CheckResult, CheckError> {
    mode_for(s)?;
    check_linear(f, |p| eval_likelihood(s, p))
}

/// Gamble literals hold when they hold at every world.
pub fn check_gamble(worlds: &WorldSet, f: &GambleIneqFormula) -> Result<CheckResult, CheckError> {
    let atoms = f.distinct_atoms();
    let trace: Vec<TraceEntry> = atoms
        .iter()
        .map(|lit| {
            let l = gamble_values(worlds, &lit.left);
            let r = gamble_values(worlds, &lit.right);
            let lhs = l
                .iter()
                .zip(&r)
                .map(|(a, b)| a - b)
                .min()
                .expect("world sets are nonempty");
            TraceEntry {
                inequality: lit.to_string(),
                holds: !lhs.is_negative(),
                lhs,
                bound: Rational::zero(),
            }
        })
        .collect();
    let verdict = f.eval(&mut |a| trace[atoms.iter().position(|b| *b == a).unwrap()].holds);
    Ok(CheckResult { verdict, trace })
}

pub fn check(s: &Structure, f: &Formula) -> Result<CheckResult, CheckError> {
    match f {
        Formula::Expectation(e) => check_expectation(s, e),
        Formula::Likelihood(l) => check_likelihood(s, l),
        Formula::GambleIneq(g) => check_gamble(s.worlds(), g),
        other => Err(CheckError::NotAFormula(other.lang())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CredalStructure, ProbabilityStructure, World};
    use crate::rational::{int, ratio};
    use crate::syntax::{parse_expectation, parse_likelihood};

    fn three_measure_credal() -> Structure {
        let worlds = WorldSet::new(vec![
            World::new("1", Vec::<String>::new()),
            World::new("2", ["q2"]),
            World::new("3", ["q3"]),
        ])
        .unwrap();
        Structure::Credal(
            CredalStructure::new(
                worlds,
                vec![
                    vec![int(0), ratio(3, 8), ratio(5, 8)],
                    vec![ratio(5, 8), int(0), ratio(3, 8)],
                    vec![ratio(3, 8), ratio(5, 8), int(0)],
                ],
            )
            .unwrap(),
        )
    }

    fn holds(s: &Structure, text: &str) -> bool {
        check_expectation(s, &parse_expectation(text).unwrap())
            .unwrap()
            .verdict
    }

    #[test]
    fn credal_thresholds() {
        let s = three_measure_credal();
        let r = check_expectation(&s, &parse_expectation("8 e(1 true + 1 q2 + 2 q3) >= 13").unwrap())
            .unwrap();
        assert!(r.verdict);
        assert_eq!(r.trace[0].lhs, int(13));
        assert!(!holds(&s, "8 e(1 true + 1 q2 + 2 q3) >= 14"));
    }

    #[test]
    fn probability_additivity() {
        let w = WorldSet::new(vec![World::new("a", ["p"]), World::new("b", Vec::<String>::new())])
            .unwrap();
        let s = Structure::Prob(ProbabilityStructure::new(w, vec![ratio(1, 3), ratio(2, 3)]).unwrap());
        assert!(holds(&s, "e(p) + e(!p) = 1"));
        assert_eq!(eval_term(&s, &Gamble::constant(int(1))).unwrap(), int(1));
    }

    #[test]
    fn lower_envelopes_can_sum_to_zero() {
        let w = WorldSet::new(vec![World::new("a", ["p"]), World::new("b", Vec::<String>::new())])
            .unwrap();
        let s = Structure::Credal(
            CredalStructure::new(w, vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap(),
        );
        assert!(holds(&s, "e(p) + e(!p) = 0"));
        let l = parse_likelihood("l(p) + l(!p) = 0").unwrap();
        assert!(check_likelihood(&s, &l).unwrap().verdict);
    }

    #[test]
    fn plain_structures_reject_measures() {
        let w = WorldSet::new(vec![World::new("a", ["p"])]).unwrap();
        let s = Structure::Plain(w);
        assert!(matches!(
            check_expectation(&s, &parse_expectation("e(p) >= 0").unwrap()),
            Err(CheckError::NoMeasure { .. })
        ));
    }

    #[test]
    fn trace_has_one_entry_per_inequality() {
        let s = three_measure_credal();
        let f = parse_expectation("(e(q2) >= 0 & e(q2) >= 0) | e(q3) >= 1").unwrap();
        assert_eq!(check_expectation(&s, &f).unwrap().trace.len(), 2);
    }
}
