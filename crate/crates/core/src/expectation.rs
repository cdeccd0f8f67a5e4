//! Expectation operators over structures.

use num_traits::Zero;

use crate::gamble::gamble_value;
use crate::models::{
    event_weight, BeliefStructure, CredalStructure, ModelError, PossibilityStructure,
    ProbabilityStructure, Structure, WeightMode, WorldMask, WorldSet,
};
use crate::rational::Rational;
use crate::syntax::Gamble;

/// Value of `g` at each world.
pub fn gamble_values(worlds: &WorldSet, g: &Gamble) -> Vec<Rational> {
    worlds
        .worlds()
        .iter()
        .map(|w| gamble_value(g, w).expect("worlds assign every proposition"))
        .collect()
}

/// Distinct values `x_1 < ... < x_n` and the sets `{X > x_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueProfile {
    pub values: Vec<Rational>,
    /// `above[i] = {w : X(w) > values[i]}`; the last entry is empty.
    pub above: Vec<WorldMask>,
}

impl ValueProfile {
    pub fn new(xs: &[Rational]) -> Self {
        let mut values: Vec<Rational> = xs.to_vec();
        values.sort();
        values.dedup();
        let above = values
            .iter()
            .map(|v| {
                let mut m = WorldMask::EMPTY;
                for (i, x) in xs.iter().enumerate() {
                    if x > v {
                        m.insert(i);
                    }
                }
                m
            })
            .collect();
        ValueProfile { values, above }
    }

    pub fn of(worlds: &WorldSet, g: &Gamble) -> Self {
        Self::new(&gamble_values(worlds, g))
    }
}

/// `x_1 + Σ (x_{i+1} − x_i)·ν(X > x_i)`
pub fn choquet(profile: &ValueProfile, mut nu: impl FnMut(WorldMask) -> Rational) -> Rational {
    let Some(first) = profile.values.first() else {
        return Rational::zero();
    };
    let mut total = first.clone();
    for i in 0..profile.values.len() - 1 {
        let step = &profile.values[i + 1] - &profile.values[i];
        total += step * nu(profile.above[i]);
    }
    total
}

/// `Σ_x x·μ(X = x)`
pub fn expect_prob(s: &ProbabilityStructure, g: &Gamble) -> Rational {
    expect_measure(&s.worlds, &s.mu, g)
}

fn expect_measure(worlds: &WorldSet, mu: &[Rational], g: &Gamble) -> Rational {
    let xs = gamble_values(worlds, g);
    let mut distinct = xs.clone();
    distinct.sort();
    distinct.dedup();
    distinct
        .iter()
        .map(|x| {
            let level: Rational = xs
                .iter()
                .zip(mu)
                .filter(|(y, _)| *y == x)
                .map(|(_, m)| m)
                .sum();
            x * level
        })
        .sum()
}

pub fn expect_prob_telescoping(s: &ProbabilityStructure, g: &Gamble) -> Rational {
    choquet(&ValueProfile::of(&s.worlds, g), |u| s.weight(u))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Rational,
    pub upper: Rational,
    /// Index of the first measure attaining the lower bound.
    pub lower_witness: usize,
    pub upper_witness: usize,
}

pub fn expect_bounds(s: &CredalStructure, g: &Gamble) -> Bounds {
    let values: Vec<Rational> = s
        .measures
        .iter()
        .map(|mu| expect_measure(&s.worlds, mu, g))
        .collect();
    let mut lo = 0;
    let mut hi = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = k;
        }
        if *v > values[hi] {
            hi = k;
        }
    }
    Bounds {
        lower: values[lo].clone(),
        upper: values[hi].clone(),
        lower_witness: lo,
        upper_witness: hi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoquetMode {
    Bel,
    Plaus,
}

pub fn expect_choquet(s: &BeliefStructure, g: &Gamble, mode: ChoquetMode) -> Rational {
    let profile = ValueProfile::of(&s.worlds, g);
    match mode {
        ChoquetMode::Bel => choquet(&profile, |u| s.bel(u)),
        ChoquetMode::Plaus => choquet(&profile, |u| s.plaus(u)),
    }
}

pub fn expect_poss(s: &PossibilityStructure, g: &Gamble) -> Rational {
    choquet(&ValueProfile::of(&s.worlds, g), |u| s.poss_of(u))
}

/// Choquet expectation for the dual necessity measure.
pub fn expect_necessity(s: &PossibilityStructure, g: &Gamble) -> Rational {
    choquet(&ValueProfile::of(&s.worlds, g), |u| s.necessity(u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Min,
    Max,
}

/// `Σ_A m(A)·min_{w∈A} X(w)` (or max).
pub fn mass_min_oracle(s: &BeliefStructure, g: &Gamble, mode: OracleMode) -> Rational {
    let xs = gamble_values(&s.worlds, g);
    s.focal
        .iter()
        .map(|(set, m)| {
            let vals = set.iter().map(|i| &xs[i]);
            let v = match mode {
                OracleMode::Min => vals.min(),
                OracleMode::Max => vals.max(),
            };
            m * v.expect("focal elements are nonempty")
        })
        .sum()
}

/// Expectation matching [`event_weight`]'s conventions for each kind.
pub fn expectation(s: &Structure, g: &Gamble, mode: WeightMode) -> Result<Rational, ModelError> {
    Ok(match (s, mode) {
        (Structure::Prob(p), _) => expect_prob(p, g),
        (Structure::Credal(c), WeightMode::Lower) => expect_bounds(c, g).lower,
        (Structure::Credal(c), WeightMode::Upper) => expect_bounds(c, g).upper,
        (Structure::Belief(b), WeightMode::Point | WeightMode::Lower) => {
            expect_choquet(b, g, ChoquetMode::Bel)
        }
        (Structure::Belief(b), WeightMode::Upper) => expect_choquet(b, g, ChoquetMode::Plaus),
        (Structure::Poss(p), WeightMode::Point | WeightMode::Upper) => expect_poss(p, g),
        (Structure::Poss(p), WeightMode::Lower) => expect_necessity(p, g),
        // remaining combinations are errors; event_weight reports them
        _ => return event_weight(s, WorldMask::EMPTY, mode),
    })
}
