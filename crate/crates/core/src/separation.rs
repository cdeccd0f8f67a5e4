//! A pair of credal structures over `p`, `q` that no likelihood formula
//! tells apart but an expectation formula does.
//!
//! Worlds are `w1 = {}`, `w2 = {p}`, `w3 = {p, q}`. The first structure has
//! the three measures `(0, 3/8, 5/8)`, `(5/8, 0, 3/8)`, `(3/8, 5/8, 0)`; the
//! second adds one more measure found by [`derive_pair`].

use num_traits::Zero;

use crate::checker::check_expectation;
use crate::expectation::expect_bounds;
use crate::models::{load_structure, CredalStructure, Structure, World, WorldMask, WorldSet};
use crate::rational::{ratio, Rational};
use crate::syntax::{parse_expectation, parse_gamble, Prop};

pub const FIXTURE_P: &str = include_str!("../fixtures/separation/credal_p.json");
pub const FIXTURE_P_PRIME: &str = include_str!("../fixtures/separation/credal_p_prime.json");

/// Holds in the first structure, fails in the second.
pub const SEPARATING_FORMULA: &str = "2 e(1 p + 1 q) > 1";

pub const PROPS: [&str; 2] = ["p", "q"];

fn credal(s: Structure) -> CredalStructure {
    match s {
        Structure::Credal(c) => c,
        other => panic!("separation fixture must be credal, found {}", other.kind().name()),
    }
}

/// The stored pair.
pub fn fixture() -> (CredalStructure, CredalStructure) {
    (
        credal(load_structure(FIXTURE_P).expect("fixture parses")),
        credal(load_structure(FIXTURE_P_PRIME).expect("fixture parses")),
    )
}

pub fn base_worlds() -> WorldSet {
    WorldSet::new(vec![
        World::new("w1", Vec::<String>::new()),
        World::new("w2", ["p"]),
        World::new("w3", ["p", "q"]),
    ])
    .expect("distinct ids")
}

pub fn base_measures() -> Vec<Vec<Rational>> {
    vec![
        vec![ratio(0, 1), ratio(3, 8), ratio(5, 8)],
        vec![ratio(5, 8), ratio(0, 1), ratio(3, 8)],
        vec![ratio(3, 8), ratio(5, 8), ratio(0, 1)],
    ]
}

/// Searches measures on the `1/denominator` grid, in decreasing
/// lexicographic order, for one whose addition preserves every lower
/// event weight but flips [`SEPARATING_FORMULA`].
pub fn derive_pair(denominator: i64) -> Option<(CredalStructure, CredalStructure)> {
    let worlds = base_worlds();
    let base = CredalStructure::new(worlds.clone(), base_measures()).ok()?;
    let formula = parse_expectation(SEPARATING_FORMULA).expect("formula parses");
    let holds = |c: &CredalStructure| {
        check_expectation(&Structure::Credal(c.clone()), &formula)
            .expect("credal structures have expectations")
            .verdict
    };
    if !holds(&base) {
        return None;
    }
    for a in (0..=denominator).rev() {
        for b in (0..=denominator - a).rev() {
            let c = denominator - a - b;
            let mu = vec![ratio(a, denominator), ratio(b, denominator), ratio(c, denominator)];
            let mut measures = base_measures();
            measures.push(mu);
            let Ok(extended) = CredalStructure::new(worlds.clone(), measures) else {
                continue;
            };
            if event_agreement(&base, &extended).is_none() && !holds(&extended) {
                return Some((base, extended));
            }
        }
    }
    None
}

/// First event (as a set of worlds) whose lower weight differs.
pub fn event_agreement(a: &CredalStructure, b: &CredalStructure) -> Option<WorldMask> {
    WorldMask::all_subsets(a.worlds.len()).find(|u| a.lower(*u) != b.lower(*u))
}

/// A basic likelihood inequality on which two structures disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub inequality: String,
}

/// The sixteen propositions over `p`, `q` up to equivalence, as DNFs over
/// the four atoms.
pub fn event_classes() -> Vec<Prop> {
    let atoms = [
        Prop::and(Prop::not(Prop::var("p")), Prop::not(Prop::var("q"))),
        Prop::and(Prop::var("p"), Prop::not(Prop::var("q"))),
        Prop::and(Prop::not(Prop::var("p")), Prop::var("q")),
        Prop::and(Prop::var("p"), Prop::var("q")),
    ];
    (0..16u32)
        .map(|set| Prop::disjunction((0..4).filter(|k| set >> k & 1 == 1).map(|k| atoms[k].clone())))
        .collect()
}

/// Compares every basic likelihood inequality with at most `max_terms`
/// terms over the sixteen event classes, nonzero integer coefficients in
/// `[-coef_bound, coef_bound]` and bounds on the `1/bound_denominator` grid
/// in `[-2 coef_bound, 2 coef_bound]`. Returns the number compared.
pub fn likelihood_agreement(
    a: &CredalStructure,
    b: &CredalStructure,
    coef_bound: i64,
    max_terms: usize,
    bound_denominator: i64,
) -> Result<usize, Disagreement> {
    let events = event_classes();
    let weights = |s: &CredalStructure| -> Vec<Rational> {
        events.iter().map(|e| s.lower(s.worlds.extension(e))).collect()
    };
    let (wa, wb) = (weights(a), weights(b));
    let coefs: Vec<i64> = (-coef_bound..=coef_bound).filter(|c| *c != 0).collect();
    let reach = 2 * coef_bound * bound_denominator;
    let bounds: Vec<Rational> = (-reach..=reach).map(|n| ratio(n, bound_denominator)).collect();

    // (event index, coefficient) lists in nondecreasing event order
    let mut combos: Vec<Vec<(usize, i64)>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..max_terms {
        let mut next = Vec::new();
        for combo in &combos {
            let start = combo.last().map_or(0, |(e, _)| *e);
            for e in start..events.len() {
                for &c in &coefs {
                    let mut longer = combo.clone();
                    longer.push((e, c));
                    next.push(longer);
                }
            }
        }
        all.extend(next.iter().cloned());
        combos = next;
    }
    let mut compared = 0;
    for combo in &all {
        let lhs = |w: &[Rational]| -> Rational {
            combo.iter().fold(Rational::zero(), |acc, (e, c)| acc + &w[*e] * Rational::from_integer((*c).into()))
        };
        let (la, lb) = (lhs(&wa), lhs(&wb));
        for bound in &bounds {
            compared += 1;
            if (la >= *bound) != (lb >= *bound) {
                let terms: Vec<String> = combo
                    .iter()
                    .map(|(e, c)| format!("{c} l({})", events[*e]))
                    .collect();
                return Err(Disagreement {
                    inequality: format!("{} >= {bound}", terms.join(" + ")),
                });
            }
        }
    }
    Ok(compared)
}

/// Lower expectations of `1 p + 1 q` in both structures.
pub fn separating_values(a: &CredalStructure, b: &CredalStructure) -> (Rational, Rational) {
    let g = parse_gamble("1 p + 1 q").expect("gamble parses");
    (expect_bounds(a, &g).lower, expect_bounds(b, &g).lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::to_document_string;

    #[test]
    fn stored_pair_is_the_search_result() {
        let (p, p2) = derive_pair(8).expect("a separating measure exists on the 1/8 grid");
        let (sp, sp2) = fixture();
        assert_eq!(sp, p);
        assert_eq!(sp2, p2);
        assert_eq!(
            to_document_string(&Structure::Credal(sp2)),
            to_document_string(&Structure::Credal(p2))
        );
    }

    #[test]
    fn values() {
        let (p, p2) = fixture();
        assert_eq!(separating_values(&p, &p2), (ratio(5, 8), ratio(3, 8)));
        assert_eq!(event_agreement(&p, &p2), None);
    }

    #[test]
    fn event_classes_are_distinct() {
        let w = base_worlds();
        let classes = event_classes();
        assert_eq!(classes.len(), 16);
        assert_eq!(w.extension(&classes[15]), w.full());
        assert_eq!(w.extension(&classes[0]), WorldMask::EMPTY);
    }
}
