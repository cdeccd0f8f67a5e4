//! Structures over a finite world set: plain, probability, credal (finite
//! sets of measures), belief (mass assignments) and possibility.

mod document;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;
use crate::syntax::{Prop, Valuation};

pub use document::{load_structure, to_document, to_document_string, LoadError};

/// Worlds are addressed by bit position, so a structure has at most 64.
pub const MAX_WORLDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub id: String,
    /// Propositions true at this world; all others are false.
    pub props: BTreeSet<String>,
}

impl World {
    pub fn new(id: impl Into<String>, props: impl IntoIterator<Item = impl Into<String>>) -> Self {
        World {
            id: id.into(),
            props: props.into_iter().map(Into::into).collect(),
        }
    }
}

impl Valuation for World {
    fn truth(&self, prop: &str) -> Option<bool> {
        Some(self.props.contains(prop))
    }
}

/// Subset of a world set as a bitmask over world indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WorldMask(pub u64);

impl WorldMask {
    pub const EMPTY: WorldMask = WorldMask(0);

    pub fn full(n: usize) -> WorldMask {
        if n >= 64 {
            WorldMask(u64::MAX)
        } else {
            WorldMask((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> WorldMask {
        WorldMask(1u64 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: WorldMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: WorldMask) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: WorldMask) -> WorldMask {
        WorldMask(self.0 | other.0)
    }

    pub fn intersection(self, other: WorldMask) -> WorldMask {
        WorldMask(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> WorldMask {
        WorldMask(!self.0 & WorldMask::full(n).0)
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.contains(*i))
    }

    /// All subsets of the first `n` worlds, including the empty set.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = WorldMask> {
        assert!(n < 64, "subset enumeration needs fewer than 64 worlds");
        (0..(1u64 << n)).map(WorldMask)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSet {
    worlds: Vec<World>,
}

impl WorldSet {
    pub fn new(worlds: Vec<World>) -> Result<Self, ModelError> {
        let set = WorldSet { worlds };
        let violations = set.violations();
        if violations.is_empty() {
            Ok(set)
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.worlds.is_empty() {
            out.push(Violation::EmptyWorldSet);
        }
        if self.worlds.len() > MAX_WORLDS {
            out.push(Violation::TooManyWorlds(self.worlds.len()));
        }
        let mut seen = BTreeSet::new();
        for w in &self.worlds {
            if !seen.insert(w.id.as_str()) {
                out.push(Violation::DuplicateWorldId(w.id.clone()));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn full(&self) -> WorldMask {
        WorldMask::full(self.len())
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w.id == id)
    }

    pub fn mask_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<WorldMask, ModelError> {
        let mut mask = WorldMask::EMPTY;
        for id in ids {
            let i = self
                .index_of(id.as_ref())
                .ok_or_else(|| ModelError::UnknownWorld(id.as_ref().to_string()))?;
            mask.insert(i);
        }
        Ok(mask)
    }

    pub fn ids_of(&self, mask: WorldMask) -> Vec<&str> {
        mask.iter()
            .filter(|i| *i < self.len())
            .map(|i| self.worlds[i].id.as_str())
            .collect()
    }

    /// `[[φ]]`: the worlds where `φ` holds.
    pub fn extension(&self, p: &Prop) -> WorldMask {
        let mut mask = WorldMask::EMPTY;
        for (i, w) in self.worlds.iter().enumerate() {
            if p.eval(w).expect("worlds assign every proposition") {
                mask.insert(i);
            }
        }
        mask
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityStructure {
    pub worlds: WorldSet,
    /// Weight per world, indexed like `worlds`.
    pub mu: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredalStructure {
    pub worlds: WorldSet,
    pub measures: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefStructure {
    pub worlds: WorldSet,
    /// Focal elements with their masses.
    pub focal: Vec<(WorldMask, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilityStructure {
    pub worlds: WorldSet,
    pub poss: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Plain(WorldSet),
    Prob(ProbabilityStructure),
    Credal(CredalStructure),
    Belief(BeliefStructure),
    Poss(PossibilityStructure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Plain,
    Prob,
    Credal,
    Belief,
    Poss,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Plain => "plain",
            Kind::Prob => "prob",
            Kind::Credal => "credal",
            Kind::Belief => "belief",
            Kind::Poss => "poss",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    Point,
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("world set is empty")]
    EmptyWorldSet,
    #[error("{0} worlds exceed the limit of 64")]
    TooManyWorlds(usize),
    #[error("duplicate world id `{0}`")]
    DuplicateWorldId(String),
    #[error("{what} has {got} entries for {worlds} worlds")]
    LengthMismatch {
        what: String,
        got: usize,
        worlds: usize,
    },
    #[error("negative weight {value} on world `{world}` in {what}")]
    NegativeWeight {
        what: String,
        world: String,
        value: Rational,
    },
    #[error("mass not 1 in {what} (sum is {sum})")]
    MassNotOne { what: String, sum: Rational },
    #[error("credal set has no measures")]
    EmptyCredalSet,
    #[error("focal element empty")]
    EmptyFocal,
    #[error("focal element {0:?} listed twice")]
    DuplicateFocal(Vec<String>),
    #[error("negative mass {value} on focal element {set:?}")]
    NegativeMass { set: Vec<String>, value: Rational },
    #[error("focal element refers to worlds outside the structure")]
    FocalOutOfRange,
    #[error("possibility {value} of world `{world}` outside [0, 1]")]
    PossOutOfRange { world: String, value: Rational },
    #[error("Poss(W) ≠ 1 (largest possibility is {max})")]
    PossNotNormalized { max: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown world id `{0}`")]
    UnknownWorld(String),
    #[error("invalid structure: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{kind} structures carry no uncertainty measure")]
    NoMeasure { kind: Kind },
    #[error("weight mode {mode:?} is not defined for {kind} structures")]
    UnsupportedMode { kind: Kind, mode: WeightMode },
}

fn check_measure(worlds: &WorldSet, mu: &[Rational], what: &str, out: &mut Vec<Violation>) {
    if mu.len() != worlds.len() {
        out.push(Violation::LengthMismatch {
            what: what.to_string(),
            got: mu.len(),
            worlds: worlds.len(),
        });
        return;
    }
    for (w, v) in worlds.worlds().iter().zip(mu) {
        if v.is_negative() {
            out.push(Violation::NegativeWeight {
                what: what.to_string(),
                world: w.id.clone(),
                value: v.clone(),
            });
        }
    }
    let sum: Rational = mu.iter().sum();
    if !sum.is_one() {
        out.push(Violation::MassNotOne {
            what: what.to_string(),
            sum,
        });
    }
}

impl ProbabilityStructure {
    pub fn new(worlds: WorldSet, mu: Vec<Rational>) -> Result<Self, ModelError> {
        finish(ProbabilityStructure { worlds, mu }, Structure::Prob)
    }

    pub fn weight(&self, u: WorldMask) -> Rational {
        u.iter()
            .filter(|i| *i < self.mu.len())
            .map(|i| &self.mu[i])
            .sum()
    }
}

impl CredalStructure {
    pub fn new(worlds: WorldSet, measures: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        finish(CredalStructure { worlds, measures }, Structure::Credal)
    }

    pub fn measure_weight(&self, k: usize, u: WorldMask) -> Rational {
        u.iter()
            .filter(|i| *i < self.worlds.len())
            .map(|i| &self.measures[k][i])
            .sum()
    }

    /// `𝒫_*(U)`
    pub fn lower(&self, u: WorldMask) -> Rational {
        (0..self.measures.len())
            .map(|k| self.measure_weight(k, u))
            .min()
            .expect("credal set is nonempty")
    }

    /// `𝒫^*(U)`
    pub fn upper(&self, u: WorldMask) -> Rational {
        (0..self.measures.len())
            .map(|k| self.measure_weight(k, u))
            .max()
            .expect("credal set is nonempty")
    }
}

impl BeliefStructure {
    pub fn new(worlds: WorldSet, focal: Vec<(WorldMask, Rational)>) -> Result<Self, ModelError> {
        finish(BeliefStructure { worlds, focal }, Structure::Belief)
    }

    /// `Bel(U) = Σ_{A ⊆ U} m(A)`
    pub fn bel(&self, u: WorldMask) -> Rational {
        self.focal
            .iter()
            .filter(|(a, _)| a.is_subset(u))
            .map(|(_, m)| m)
            .sum()
    }

    /// `Plaus(U) = Σ_{A ∩ U ≠ ∅} m(A) = 1 − Bel(Ū)`
    pub fn plaus(&self, u: WorldMask) -> Rational {
        self.focal
            .iter()
            .filter(|(a, _)| a.intersects(u))
            .map(|(_, m)| m)
            .sum()
    }
}

impl PossibilityStructure {
    pub fn new(worlds: WorldSet, poss: Vec<Rational>) -> Result<Self, ModelError> {
        finish(PossibilityStructure { worlds, poss }, Structure::Poss)
    }

    /// `Poss(U) = max_{w∈U} poss(w)`, 0 on the empty set.
    pub fn poss_of(&self, u: WorldMask) -> Rational {
        u.iter()
            .filter(|i| *i < self.poss.len())
            .map(|i| &self.poss[i])
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Dual necessity `1 − Poss(Ū)`.
    pub fn necessity(&self, u: WorldMask) -> Rational {
        Rational::one() - self.poss_of(u.complement(self.worlds.len()))
    }

    /// Nested focal sets whose plausibility is exactly this possibility
    /// measure: the top-k worlds by possibility carry `π(k) − π(k+1)`.
    pub fn consonant_mass(&self) -> BeliefStructure {
        let mut order: Vec<usize> = (0..self.poss.len()).collect();
        order.sort_by(|a, b| self.poss[*b].cmp(&self.poss[*a]).then(a.cmp(b)));
        let mut focal = Vec::new();
        let mut set = WorldMask::EMPTY;
        for (k, &i) in order.iter().enumerate() {
            set.insert(i);
            let next = order
                .get(k + 1)
                .map(|j| self.poss[*j].clone())
                .unwrap_or_else(Rational::zero);
            let m = &self.poss[i] - next;
            if !m.is_zero() {
                focal.push((set, m));
            }
        }
        BeliefStructure {
            worlds: self.worlds.clone(),
            focal,
        }
    }
}

fn finish<T: Clone>(value: T, wrap: impl Fn(T) -> Structure) -> Result<T, ModelError> {
    let violations = validate(&wrap(value.clone()));
    if violations.is_empty() {
        Ok(value)
    } else {
        Err(ModelError::Invalid(violations))
    }
}

impl Structure {
    pub fn kind(&self) -> Kind {
        match self {
            Structure::Plain(_) => Kind::Plain,
            Structure::Prob(_) => Kind::Prob,
            Structure::Credal(_) => Kind::Credal,
            Structure::Belief(_) => Kind::Belief,
            Structure::Poss(_) => Kind::Poss,
        }
    }

    pub fn worlds(&self) -> &WorldSet {
        match self {
            Structure::Plain(w) => w,
            Structure::Prob(s) => &s.worlds,
            Structure::Credal(s) => &s.worlds,
            Structure::Belief(s) => &s.worlds,
            Structure::Poss(s) => &s.worlds,
        }
    }
}

/// Every violated invariant of the structure's kind; empty means valid.
///
/// Belief functions are stored as mass assignments, so B1–B3 hold whenever
/// the masses are nonnegative and sum to 1; [`belief_axioms_direct`] checks
/// B1–B3 on the induced set function independently.
pub fn validate(s: &Structure) -> Vec<Violation> {
    let worlds = s.worlds();
    let mut out = worlds.violations();
    match s {
        Structure::Plain(_) => {}
        Structure::Prob(p) => check_measure(worlds, &p.mu, "mu", &mut out),
        Structure::Credal(c) => {
            if c.measures.is_empty() {
                out.push(Violation::EmptyCredalSet);
            }
            for (k, mu) in c.measures.iter().enumerate() {
                check_measure(worlds, mu, &format!("measure {}", k + 1), &mut out);
            }
        }
        Structure::Belief(b) => {
            let full = worlds.full();
            let mut seen = BTreeSet::new();
            for (set, m) in &b.focal {
                let ids = || worlds.ids_of(*set).into_iter().map(String::from).collect();
                if set.is_empty() {
                    out.push(Violation::EmptyFocal);
                }
                if !set.is_subset(full) {
                    out.push(Violation::FocalOutOfRange);
                }
                if !seen.insert(*set) {
                    out.push(Violation::DuplicateFocal(ids()));
                }
                if m.is_negative() {
                    out.push(Violation::NegativeMass {
                        set: ids(),
                        value: m.clone(),
                    });
                }
            }
            let sum: Rational = b.focal.iter().map(|(_, m)| m).sum();
            if !sum.is_one() {
                out.push(Violation::MassNotOne {
                    what: "mass".into(),
                    sum,
                });
            }
        }
        Structure::Poss(p) => {
            if p.poss.len() != worlds.len() {
                out.push(Violation::LengthMismatch {
                    what: "poss".into(),
                    got: p.poss.len(),
                    worlds: worlds.len(),
                });
            } else {
                for (w, v) in worlds.worlds().iter().zip(&p.poss) {
                    if v.is_negative() || *v > Rational::one() {
                        out.push(Violation::PossOutOfRange {
                            world: w.id.clone(),
                            value: v.clone(),
                        });
                    }
                }
                let max = p.poss.iter().max().cloned().unwrap_or_else(Rational::zero);
                if !max.is_one() {
                    out.push(Violation::PossNotNormalized { max });
                }
            }
        }
    }
    out
}

/// Weight of an event. Probability structures ignore the mode; credal
/// structures need `Lower` or `Upper`; belief structures give Bel for
/// `Point`/`Lower` and Plaus for `Upper`; possibility structures give Poss
/// for `Point`/`Upper` and necessity for `Lower`.
pub fn event_weight(s: &Structure, u: WorldMask, mode: WeightMode) -> Result<Rational, ModelError> {
    if !u.is_subset(s.worlds().full()) {
        return Err(ModelError::UnknownWorld(format!("index mask {:#x}", u.0)));
    }
    Ok(match (s, mode) {
        (Structure::Plain(_), _) => return Err(ModelError::NoMeasure { kind: Kind::Plain }),
        (Structure::Prob(p), _) => p.weight(u),
        (Structure::Credal(c), WeightMode::Lower) => c.lower(u),
        (Structure::Credal(c), WeightMode::Upper) => c.upper(u),
        (Structure::Credal(_), WeightMode::Point) => {
            return Err(ModelError::UnsupportedMode {
                kind: Kind::Credal,
                mode,
            })
        }
        (Structure::Belief(b), WeightMode::Point | WeightMode::Lower) => b.bel(u),
        (Structure::Belief(b), WeightMode::Upper) => b.plaus(u),
        (Structure::Poss(p), WeightMode::Point | WeightMode::Upper) => p.poss_of(u),
        (Structure::Poss(p), WeightMode::Lower) => p.necessity(u),
    })
}

/// [`event_weight`] for an event given by world ids.
pub fn event_weight_ids<S: AsRef<str>>(
    s: &Structure,
    ids: &[S],
    mode: WeightMode,
) -> Result<Rational, ModelError> {
    let u = s.worlds().mask_of(ids)?;
    event_weight(s, u, mode)
}

/// Direct check of B1, B2 and B3 (families of up to `max_family` sets) on
/// the set function `Bel`. Returns the first violated family.
pub fn belief_axioms_direct(b: &BeliefStructure, max_family: usize) -> Result<(), Vec<WorldMask>> {
    let n = b.worlds.len();
    if !b.bel(WorldMask::EMPTY).is_zero() {
        return Err(vec![]);
    }
    if !b.bel(WorldMask::full(n)).is_one() {
        return Err(vec![WorldMask::full(n)]);
    }
    let subsets: Vec<WorldMask> = WorldMask::all_subsets(n).collect();
    let mut family = Vec::new();
    fn rec(
        b: &BeliefStructure,
        subsets: &[WorldMask],
        start: usize,
        max: usize,
        family: &mut Vec<WorldMask>,
    ) -> Result<(), Vec<WorldMask>> {
        if family.len() >= 2 {
            let union = family.iter().fold(WorldMask::EMPTY, |a, u| a.union(*u));
            let mut rhs = Rational::zero();
            for pick in 1u32..(1u32 << family.len()) {
                let inter = family
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| pick >> j & 1 == 1)
                    .fold(WorldMask::full(64), |a, (_, u)| a.intersection(*u));
                let term = b.bel(inter);
                if pick.count_ones() % 2 == 1 {
                    rhs += term;
                } else {
                    rhs -= term;
                }
            }
            if b.bel(union) < rhs {
                return Err(family.clone());
            }
        }
        if family.len() == max {
            return Ok(());
        }
        for k in start..subsets.len() {
            family.push(subsets[k]);
            rec(b, subsets, k + 1, max, family)?;
            family.pop();
        }
        Ok(())
    }
    rec(b, &subsets, 0, max_family, &mut family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    pub(crate) fn three_worlds() -> WorldSet {
        WorldSet::new(vec![
            World::new("1", Vec::<String>::new()),
            World::new("2", ["q2"]),
            World::new("3", ["q3"]),
        ])
        .unwrap()
    }

    fn three_measure_credal() -> CredalStructure {
        CredalStructure::new(
            three_worlds(),
            vec![
                vec![int(0), ratio(3, 8), ratio(5, 8)],
                vec![ratio(5, 8), int(0), ratio(3, 8)],
                vec![ratio(3, 8), ratio(5, 8), int(0)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn credal_lower_probabilities() {
        let c = Structure::Credal(three_measure_credal());
        for i in 0..3 {
            let w = event_weight(&c, WorldMask::singleton(i), WeightMode::Lower).unwrap();
            assert_eq!(w, int(0));
        }
        assert_eq!(
            event_weight_ids(&c, &["1", "2"], WeightMode::Lower).unwrap(),
            ratio(3, 8)
        );
        assert!(matches!(
            event_weight_ids(&c, &["9"], WeightMode::Lower),
            Err(ModelError::UnknownWorld(_))
        ));
        assert!(matches!(
            event_weight_ids(&c, &["1"], WeightMode::Point),
            Err(ModelError::UnsupportedMode { .. })
        ));
    }

    #[test]
    fn empty_event_weighs_zero() {
        let b = Structure::Belief(
            BeliefStructure::new(three_worlds(), vec![(WorldMask::full(3), int(1))]).unwrap(),
        );
        let p = Structure::Poss(
            PossibilityStructure::new(three_worlds(), vec![int(1), ratio(1, 2), int(0)]).unwrap(),
        );
        for s in [Structure::Credal(three_measure_credal()), b, p] {
            for mode in [WeightMode::Lower, WeightMode::Upper] {
                assert_eq!(event_weight(&s, WorldMask::EMPTY, mode).unwrap(), int(0));
            }
        }
    }

    #[test]
    fn belief_and_plausibility() {
        let b = BeliefStructure::new(
            three_worlds(),
            vec![
                (WorldMask::singleton(0), ratio(1, 2)),
                (WorldMask::full(3), ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(b.bel(WorldMask(0b011)), ratio(1, 2));
        assert_eq!(b.plaus(WorldMask::singleton(1)), ratio(1, 2));
        assert!(belief_axioms_direct(&b, 3).is_ok());
    }

    #[test]
    fn validation_messages() {
        let bad = ProbabilityStructure {
            worlds: three_worlds(),
            mu: vec![ratio(1, 2), ratio(3, 8), ratio(1, 4)],
        };
        let v = validate(&Structure::Prob(bad));
        assert!(v.iter().any(|x| x.to_string().starts_with("mass not 1")), "{v:?}");

        let poss = PossibilityStructure {
            worlds: three_worlds(),
            poss: vec![ratio(1, 2), int(0), int(0)],
        };
        let v = validate(&Structure::Poss(poss));
        assert!(v.iter().any(|x| x.to_string().starts_with("Poss(W) ≠ 1")), "{v:?}");

        let vacuous = BeliefStructure {
            worlds: three_worlds(),
            focal: vec![(WorldMask::full(3), int(1))],
        };
        assert!(validate(&Structure::Belief(vacuous)).is_empty());
        assert!(validate(&Structure::Credal(three_measure_credal())).is_empty());
    }

    #[test]
    fn duplicate_ids_and_empty_worlds_rejected() {
        assert!(WorldSet::new(vec![]).is_err());
        assert!(WorldSet::new(vec![World::new("a", ["p"]), World::new("a", ["q"])]).is_err());
        // equal valuations on distinct worlds are fine
        assert!(WorldSet::new(vec![World::new("a", ["p"]), World::new("b", ["p"])]).is_ok());
    }

    #[test]
    fn consonant_mass_plausibility_is_possibility() {
        let p = PossibilityStructure::new(three_worlds(), vec![int(1), ratio(1, 2), ratio(1, 4)])
            .unwrap();
        let b = p.consonant_mass();
        assert!(validate(&Structure::Belief(b.clone())).is_empty());
        for u in WorldMask::all_subsets(3) {
            assert_eq!(b.plaus(u), p.poss_of(u));
        }
    }
}
