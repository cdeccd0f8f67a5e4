//! Simplex against Fourier–Motzkin elimination on small random systems.

mod common;

use num_traits::Zero;
use rand::Rng;

use common::*;
use explogic::lp::{lp_feasible, lp_optimize, Direction, Feasibility, LinearSystem, Optimum, Rel};
use explogic::rational::ratio;
use explogic::Rational;

struct Case {
    sys: LinearSystem,
    rows: Vec<Row>,
    nvars: usize,
}

fn random_case(r: &mut impl Rng, allow_strict: bool) -> Case {
    let nvars = r.gen_range(1..=3);
    let mut sys = LinearSystem::new();
    let mut rows = Vec::new();
    let vars: Vec<usize> = (0..nvars)
        .map(|i| {
            let nonneg = r.gen_bool(0.5);
            if nonneg {
                let mut e = vec![Rational::zero(); nvars];
                e[i] = ratio(1, 1);
                rows.push(Row::ge(e, Rational::zero()));
            }
            sys.add_var(format!("x{i}"), nonneg)
        })
        .collect();
    for _ in 0..r.gen_range(1..=4) {
        let coefs: Vec<Rational> = (0..nvars).map(|_| ratio(r.gen_range(-3..=3), 1)).collect();
        let rhs = random_rational(r, 3, 2);
        let rel = match r.gen_range(0..if allow_strict { 3 } else { 2 }) {
            0 => Rel::Ge,
            1 => Rel::Eq,
            _ => Rel::Gt,
        };
        let sparse = vars.iter().zip(&coefs).map(|(v, c)| (*v, c.clone())).collect();
        sys.constrain(sparse, rel, rhs.clone());
        match rel {
            Rel::Ge => rows.push(Row::ge(coefs, rhs)),
            Rel::Gt => rows.push(Row::gt(coefs, rhs)),
            Rel::Eq => {
                rows.push(Row::ge(coefs.iter().map(|c| -c).collect(), -rhs.clone()));
                rows.push(Row::ge(coefs, rhs));
            }
        }
    }
    Case { sys, rows, nvars }
}

#[test]
fn feasibility_matches_elimination() {
    let mut r = rng(11);
    let mut feasible = 0;
    for case in 0..2000 {
        let c = random_case(&mut r, true);
        let oracle = fm_feasible(c.rows.clone(), c.nvars);
        match lp_feasible(&c.sys) {
            Feasibility::Feasible(x) => {
                assert!(oracle, "case {case}: simplex found a point the oracle rules out\n{}", c.sys);
                assert!(c.sys.satisfied_by(&x), "case {case}: witness fails\n{}", c.sys);
                feasible += 1;
            }
            Feasibility::Infeasible => assert!(!oracle, "case {case}: simplex missed a point\n{}", c.sys),
        }
    }
    assert!(feasible > 200 && feasible < 1800, "degenerate sample: {feasible} feasible");
}

#[test]
fn optimum_matches_elimination() {
    let mut r = rng(12);
    for case in 0..1000 {
        let mut c = random_case(&mut r, false);
        let obj: Vec<Rational> = (0..c.nvars).map(|_| ratio(r.gen_range(-2..=2), 1)).collect();
        let dir = if r.gen_bool(0.5) { Direction::Min } else { Direction::Max };
        c.sys.set_objective(dir, obj.iter().cloned().enumerate().collect());
        // minimising `obj` equals maximising `-obj`
        let down: Vec<Rational> = match dir {
            Direction::Min => obj.clone(),
            Direction::Max => obj.iter().map(|x| -x).collect(),
        };
        let better = |v: &Rational| {
            let mut rows = c.rows.clone();
            rows.push(Row::gt(down.iter().map(|x| -x).collect(), -v.clone()));
            fm_feasible(rows, c.nvars)
        };
        match lp_optimize(&c.sys).unwrap() {
            Optimum::Optimal { value, witness } => {
                assert!(c.sys.satisfied_by(&witness), "case {case}");
                assert_eq!(c.sys.objective_value(&witness), Some(value.clone()), "case {case}");
                let v = match dir {
                    Direction::Min => value,
                    Direction::Max => -value,
                };
                assert!(!better(&v), "case {case}: a better point exists\n{}", c.sys);
            }
            Optimum::Infeasible => assert!(!fm_feasible(c.rows.clone(), c.nvars), "case {case}\n{}", c.sys),
            Optimum::Unbounded => {
                assert!(fm_feasible(c.rows.clone(), c.nvars), "case {case}");
                assert!(better(&ratio(-1000, 1)), "case {case}: objective is bounded\n{}", c.sys);
            }
        }
    }
}
