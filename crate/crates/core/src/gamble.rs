//! Gambles as functions of truth assignments.
//!
//! An atom is a complete truth assignment to a sorted proposition list; atom
//! index bit `k` is the value of `props[k]`. The atom formulas `ρ_A` are
//! mutually exclusive and exhaustive, so any gamble is `Σ_A b_A ρ_A`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::checker;
use crate::models::{World, WorldSet};
use crate::rational::Rational;
use crate::search::{search, SearchFailure, SearchStats};
use crate::syntax::{Gamble, GambleIneqFormula, GambleLiteral, Prop, Term, Valuation};

pub const DEFAULT_ATOM_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GambleError {
    #[error("{found} propositions exceed the atom cap of {cap}")]
    AtomCap { found: usize, cap: usize },
    #[error("proposition `{0}` is not assigned")]
    Unassigned(String),
    #[error("witness needs {0} worlds, more than a structure can hold")]
    TooManyWorlds(usize),
}

/// Truth assignment by proposition name.
pub type Assignment = BTreeMap<String, bool>;

impl Valuation for Assignment {
    fn truth(&self, prop: &str) -> Option<bool> {
        self.get(prop).copied()
    }
}

/// `Σ b_i [v ⊨ φ_i]`
pub fn gamble_value<V: Valuation + ?Sized>(g: &Gamble, v: &V) -> Result<Rational, GambleError> {
    let mut total = Rational::from_integer(0.into());
    for t in &g.terms {
        if t.arg.eval(v).map_err(GambleError::Unassigned)? {
            total += &t.coef;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSpace {
    props: Vec<String>,
}

/// One atom of an [`AtomSpace`], usable as a valuation.
#[derive(Debug, Clone, Copy)]
pub struct AtomRef<'a> {
    space: &'a AtomSpace,
    index: usize,
}

impl Valuation for AtomRef<'_> {
    fn truth(&self, prop: &str) -> Option<bool> {
        self.space
            .props
            .binary_search_by(|p| p.as_str().cmp(prop))
            .ok()
            .map(|k| self.index >> k & 1 == 1)
    }
}

impl AtomSpace {
    pub fn new(props: impl IntoIterator<Item = String>, cap: usize) -> Result<Self, GambleError> {
        let props: BTreeSet<String> = props.into_iter().collect();
        if props.len() > cap || props.len() >= usize::BITS as usize {
            return Err(GambleError::AtomCap {
                found: props.len(),
                cap,
            });
        }
        Ok(AtomSpace {
            props: props.into_iter().collect(),
        })
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    /// Number of atoms, `2^|props|`.
    pub fn len(&self) -> usize {
        1 << self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn atom(&self, index: usize) -> AtomRef<'_> {
        AtomRef { space: self, index }
    }

    pub fn assignment(&self, index: usize) -> Assignment {
        self.props
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), index >> k & 1 == 1))
            .collect()
    }

    pub fn true_props(&self, index: usize) -> Vec<String> {
        self.props
            .iter()
            .enumerate()
            .filter(|(k, _)| index >> k & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect()
    }

    /// Index of the atom agreeing with `v` on every proposition.
    pub fn index_of<V: Valuation + ?Sized>(&self, v: &V) -> Result<usize, GambleError> {
        let mut index = 0;
        for (k, p) in self.props.iter().enumerate() {
            match v.truth(p) {
                Some(true) => index |= 1 << k,
                Some(false) => {}
                None => return Err(GambleError::Unassigned(p.clone())),
            }
        }
        Ok(index)
    }

    /// `ρ_A`: the conjunction of literals true exactly at this atom.
    pub fn rho(&self, index: usize) -> Prop {
        Prop::conjunction(self.props.iter().enumerate().map(|(k, p)| {
            if index >> k & 1 == 1 {
                Prop::var(p)
            } else {
                Prop::not(Prop::var(p))
            }
        }))
    }

    /// Value of `g` at every atom. `g` may only mention props of this space.
    pub fn values(&self, g: &Gamble) -> Result<Vec<Rational>, GambleError> {
        (0..self.len())
            .map(|i| gamble_value(g, &self.atom(i)))
            .collect()
    }

    /// Truth of `p` at every atom.
    pub fn truth_table(&self, p: &Prop) -> Result<Vec<bool>, GambleError> {
        (0..self.len())
            .map(|i| p.eval(&self.atom(i)).map_err(GambleError::Unassigned))
            .collect()
    }

    /// `Σ_A b_A ρ_A`, omitting zero weights.
    pub fn gamble_from_values(&self, values: &[Rational]) -> Gamble {
        use num_traits::Zero;
        Gamble::new(
            values
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_zero())
                .map(|(i, b)| Term::new(b.clone(), self.rho(i)))
                .collect(),
        )
    }
}

/// `Σ_A b_A ρ_A` with every atom's weight retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalGamble {
    pub space: AtomSpace,
    /// Indexed by atom.
    pub weights: Vec<Rational>,
}

impl CanonicalGamble {
    pub fn weight<V: Valuation + ?Sized>(&self, v: &V) -> Result<&Rational, GambleError> {
        Ok(&self.weights[self.space.index_of(v)?])
    }

    pub fn entries(&self) -> impl Iterator<Item = (Assignment, &Rational)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, b)| (self.space.assignment(i), b))
    }

    pub fn to_gamble(&self) -> Gamble {
        self.space.gamble_from_values(&self.weights)
    }
}

pub fn canonical_form(g: &Gamble, cap: usize) -> Result<CanonicalGamble, GambleError> {
    let space = AtomSpace::new(g.props(), cap)?;
    let weights = space.values(g)?;
    Ok(CanonicalGamble { space, weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinMode {
    Max,
    Min,
}

/// Pointwise max or min of the gambles, written over the atoms of the union
/// of their propositions.
pub fn gamble_join_all(gs: &[&Gamble], mode: JoinMode, cap: usize) -> Result<Gamble, GambleError> {
    let mut props = BTreeSet::new();
    for g in gs {
        g.collect_props(&mut props);
    }
    let space = AtomSpace::new(props, cap)?;
    let tables = gs
        .iter()
        .map(|g| space.values(g))
        .collect::<Result<Vec<_>, _>>()?;
    let mut joined = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        let column = tables.iter().map(|t| &t[i]);
        let v = match mode {
            JoinMode::Max => column.max(),
            JoinMode::Min => column.min(),
        };
        joined.push(v.cloned().unwrap_or_else(|| Rational::from_integer(0.into())));
    }
    Ok(space.gamble_from_values(&joined))
}

pub fn gamble_join(a: &Gamble, b: &Gamble, mode: JoinMode, cap: usize) -> Result<Gamble, GambleError> {
    gamble_join_all(&[a, b], mode, cap)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Countermodel(WorldSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    Satisfiable(WorldSet),
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GambleReport {
    pub validity: Validity,
    pub satisfiability: Satisfiability,
    pub stats: SearchStats,
}

/// Decides validity and satisfiability of a gamble-inequality formula over
/// plain structures. Certificates are minimal world sets, re-checked with
/// the model checker.
pub fn gamble_formula_check(f: &GambleIneqFormula, cap: usize) -> Result<GambleReport, GambleError> {
    let space = AtomSpace::new(f.props(), cap)?;
    let mut stats = SearchStats::default();
    let satisfiability = match gamble_sat(f, &space, &mut stats)? {
        Some(w) => Satisfiability::Satisfiable(w),
        None => Satisfiability::Unsat,
    };
    let negation = GambleIneqFormula::not(f.clone());
    let validity = match gamble_sat(&negation, &space, &mut stats)? {
        Some(w) => Validity::Countermodel(w),
        None => Validity::Valid,
    };
    Ok(GambleReport {
        validity,
        satisfiability,
        stats,
    })
}

/// Convenience: is `f` true in every plain structure?
pub fn gamble_valid(f: &GambleIneqFormula, cap: usize) -> Result<bool, GambleError> {
    let space = AtomSpace::new(f.props(), cap)?;
    let mut stats = SearchStats::default();
    Ok(gamble_sat(&GambleIneqFormula::not(f.clone()), &space, &mut stats)?.is_none())
}

fn literal_good(space: &AtomSpace, lit: &GambleLiteral) -> Result<Vec<bool>, GambleError> {
    let l = space.values(&lit.left)?;
    let r = space.values(&lit.right)?;
    Ok(l.iter().zip(&r).map(|(a, b)| a >= b).collect())
}

fn gamble_sat(
    f: &GambleIneqFormula,
    space: &AtomSpace,
    stats: &mut SearchStats,
) -> Result<Option<WorldSet>, GambleError> {
    let literals = f.distinct_atoms();
    let good: Vec<Vec<bool>> = literals
        .iter()
        .map(|l| literal_good(space, l))
        .collect::<Result<_, _>>()?;
    let result = search(f, u64::MAX, stats, |lits| {
        let mut allowed = vec![true; space.len()];
        let mut negatives = Vec::new();
        for (lit, value) in lits {
            let j = literals.iter().position(|l| l == lit).unwrap();
            if *value {
                for (a, g) in allowed.iter_mut().zip(&good[j]) {
                    *a &= *g;
                }
            } else {
                negatives.push(j);
            }
        }
        let mut chosen: Vec<usize> = Vec::new();
        for j in negatives {
            match (0..space.len()).find(|&i| allowed[i] && !good[j][i]) {
                Some(i) => {
                    if !chosen.contains(&i) {
                        chosen.push(i);
                    }
                }
                None => return Ok(None),
            }
        }
        if chosen.is_empty() {
            match allowed.iter().position(|a| *a) {
                Some(i) => chosen.push(i),
                None => return Ok(None),
            }
        }
        chosen.sort_unstable();
        if chosen.len() > crate::models::MAX_WORLDS {
            return Err(GambleError::TooManyWorlds(chosen.len()));
        }
        let worlds = chosen
            .iter()
            .enumerate()
            .map(|(k, &i)| World::new(format!("w{}", k + 1), space.true_props(i)))
            .collect();
        Ok(Some(WorldSet::new(worlds).expect("distinct witness ids")))
    });
    let found = match result {
        Ok(found) => found,
        Err(SearchFailure::Theory(e)) => return Err(e),
        Err(SearchFailure::Budget { .. }) => unreachable!("gamble search is unbudgeted"),
    };
    if let Some(w) = &found {
        let verdict = checker::check_gamble(w, f).expect("witness worlds assign every proposition");
        assert!(verdict.verdict, "gamble witness failed the model checker");
    }
    Ok(found)
}
