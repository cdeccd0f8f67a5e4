//! Branch-and-prune over the Boolean skeleton of a formula.
//!
//! Atoms are abstracted to propositional variables and assigned in order of
//! first occurrence. A branch is pruned as soon as the partial assignment
//! falsifies the formula (three-valued evaluation); once it satisfies the
//! formula, the remaining atoms are left free and the assigned literals are
//! handed to a theory check.

use crate::syntax::BoolFormula;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search-tree nodes visited.
    pub branches: u64,
    /// Theory checks performed at satisfying partial assignments.
    pub theory_calls: u64,
}

#[derive(Debug)]
pub enum SearchFailure<E> {
    Budget { limit: u64 },
    Theory(E),
}

/// Explores the assignments that make `formula` true and returns the first
/// theory witness. The theory receives `(atom, value)` pairs referring to
/// `formula.distinct_atoms()`.
pub fn search<A, T, E>(
    formula: &BoolFormula<A>,
    max_branches: u64,
    stats: &mut SearchStats,
    mut theory: impl FnMut(&[(&A, bool)]) -> Result<Option<T>, E>,
) -> Result<Option<T>, SearchFailure<E>>
where
    A: PartialEq,
{
    let atoms = formula.distinct_atoms();
    let indexed = formula.map_atoms(&mut |a| atoms.iter().position(|b| *b == a).unwrap());
    let mut assignment: Vec<Option<bool>> = vec![None; atoms.len()];

    fn dfs<A, T, E>(
        k: usize,
        atoms: &[&A],
        indexed: &BoolFormula<usize>,
        assignment: &mut Vec<Option<bool>>,
        max_branches: u64,
        stats: &mut SearchStats,
        theory: &mut impl FnMut(&[(&A, bool)]) -> Result<Option<T>, E>,
    ) -> Result<Option<T>, SearchFailure<E>> {
        stats.branches += 1;
        if stats.branches > max_branches {
            return Err(SearchFailure::Budget {
                limit: max_branches,
            });
        }
        match indexed.eval_partial(&|i: &usize| assignment[*i]) {
            Some(false) => Ok(None),
            Some(true) => {
                stats.theory_calls += 1;
                let lits: Vec<(&A, bool)> = assignment
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| v.map(|v| (atoms[i], v)))
                    .collect();
                theory(&lits).map_err(SearchFailure::Theory)
            }
            None => {
                for value in [true, false] {
                    assignment[k] = Some(value);
                    let found = dfs(
                        k + 1,
                        atoms,
                        indexed,
                        assignment,
                        max_branches,
                        stats,
                        theory,
                    )?;
                    if found.is_some() {
                        assignment[k] = None;
                        return Ok(found);
                    }
                }
                assignment[k] = None;
                Ok(None)
            }
        }
    }

    dfs(
        0,
        &atoms,
        &indexed,
        &mut assignment,
        max_branches,
        stats,
        &mut theory,
    )
}

/// Truth-table enumeration over at most `max_vars` atoms. Returns a
/// falsifying assignment (atom, value) when the formula is not a tautology.
pub fn falsifying_assignment<A: PartialEq + Clone>(
    formula: &BoolFormula<A>,
    max_vars: usize,
) -> Result<Option<Vec<(A, bool)>>, usize> {
    let atoms = formula.distinct_atoms();
    if atoms.len() > max_vars {
        return Err(atoms.len());
    }
    let indexed = formula.map_atoms(&mut |a| atoms.iter().position(|b| *b == a).unwrap());
    for bits in 0u64..(1u64 << atoms.len()) {
        if !indexed.eval(&mut |i: &usize| bits >> i & 1 == 1) {
            return Ok(Some(
                atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| ((*a).clone(), bits >> i & 1 == 1))
                    .collect(),
            ));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn v(x: u8) -> BoolFormula<u8> {
        BoolFormula::Atom(x)
    }

    #[test]
    fn finds_satisfying_branch_with_theory_filter() {
        // (a | b) & !(a & b), theory rejects a=true
        let f = BoolFormula::and(
            BoolFormula::or(v(0), v(1)),
            BoolFormula::not(BoolFormula::and(v(0), v(1))),
        );
        let mut stats = SearchStats::default();
        let got = search(&f, 100, &mut stats, |lits| {
            Ok::<_, Infallible>(if lits.contains(&(&0, true)) {
                None
            } else {
                Some(lits.iter().map(|(a, b)| (**a, *b)).collect::<Vec<_>>())
            })
        })
        .unwrap();
        assert_eq!(got, Some(vec![(0, false), (1, true)]));
        assert!(stats.theory_calls >= 2);
    }

    #[test]
    fn unsat_skeleton_never_calls_theory() {
        let f = BoolFormula::and(v(0), BoolFormula::not(v(0)));
        let mut stats = SearchStats::default();
        let got = search(&f, 100, &mut stats, |_| Ok::<Option<()>, Infallible>(Some(()))).unwrap();
        assert!(got.is_none());
        assert_eq!(stats.theory_calls, 0);
    }

    #[test]
    fn budget_is_reported() {
        let mut f = v(0);
        for i in 1..12 {
            f = BoolFormula::or(f, v(i));
        }
        let mut stats = SearchStats::default();
        let got = search(&BoolFormula::not(f), 5, &mut stats, |_| Ok::<Option<()>, Infallible>(None));
        assert!(matches!(got, Err(SearchFailure::Budget { limit: 5 })));
    }

    #[test]
    fn truth_table() {
        let taut = BoolFormula::or(v(0), BoolFormula::not(v(0)));
        assert_eq!(falsifying_assignment(&taut, 20).unwrap(), None);
        let f = BoolFormula::implies(v(0), v(1));
        assert_eq!(
            falsifying_assignment(&f, 20).unwrap(),
            Some(vec![(0, true), (1, false)])
        );
    }
}
