//! Canonical printer. `parse(print(f)) == f` for every AST.

use std::fmt::{self, Display, Formatter, Write};

use num_traits::Signed;

use super::{BoolFormula, Gamble, GambleLiteral, LinearIneq, Prop, Term};
use crate::rational::Rational;

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn prop_level(p: &Prop) -> u8 {
    match p {
        Prop::Implies(..) => IMP,
        Prop::Or(..) => OR,
        Prop::And(..) => AND,
        _ => UNARY,
    }
}

fn write_prop(f: &mut Formatter<'_>, p: &Prop, min: u8) -> fmt::Result {
    let paren = prop_level(p) < min;
    if paren {
        f.write_char('(')?;
    }
    match p {
        Prop::True => f.write_str("true")?,
        Prop::Var(v) => f.write_str(v)?,
        Prop::Not(inner) if **inner == Prop::True => f.write_str("false")?,
        Prop::Not(inner) => {
            f.write_char('!')?;
            write_prop(f, inner, UNARY)?;
        }
        Prop::And(a, b) => {
            write_prop(f, a, AND)?;
            f.write_char('&')?;
            write_prop(f, b, UNARY)?;
        }
        Prop::Or(a, b) => {
            write_prop(f, a, OR)?;
            f.write_char('|')?;
            write_prop(f, b, AND)?;
        }
        Prop::Implies(a, b) => {
            write_prop(f, a, OR)?;
            f.write_str("->")?;
            write_prop(f, b, IMP)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for Prop {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_prop(f, self, IMP)
    }
}

/// `c x + d y - k z`: the first coefficient keeps its sign, later negative
/// ones are written with a binary minus.
fn write_sum<T>(
    f: &mut Formatter<'_>,
    terms: &[Term<T>],
    mut arg: impl FnMut(&mut Formatter<'_>, &T) -> fmt::Result,
) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i == 0 {
            write!(f, "{} ", t.coef)?;
        } else if t.coef.is_negative() {
            write!(f, " - {} ", -t.coef.clone())?;
        } else {
            write!(f, " + {} ", t.coef)?;
        }
        arg(f, &t.arg)?;
    }
    Ok(())
}

impl Display for Gamble {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        write_sum(f, &self.terms, |f, p| write!(f, "{p}"))
    }
}

/// Argument types that can appear under a term keyword.
pub trait TermArg: Display {
    const KEYWORD: &'static str;
}

impl TermArg for Gamble {
    const KEYWORD: &'static str = "e";
}

impl TermArg for Prop {
    const KEYWORD: &'static str = "l";
}

impl<T: TermArg> Display for LinearIneq<T> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_sum(f, &self.terms, |f, a| write!(f, "{}({a})", T::KEYWORD))?;
        write!(f, " >= {}", self.bound)
    }
}

impl Display for GambleLiteral {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} >= {}", self.left, self.right)
    }
}

fn formula_level<A>(x: &BoolFormula<A>) -> u8 {
    match x {
        BoolFormula::Implies(..) => IMP,
        BoolFormula::Or(..) => OR,
        BoolFormula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_formula<A: Display>(f: &mut Formatter<'_>, x: &BoolFormula<A>, min: u8, top: bool) -> fmt::Result {
    if let BoolFormula::Atom(a) = x {
        return if top { write!(f, "{a}") } else { write!(f, "({a})") };
    }
    let paren = formula_level(x) < min;
    if paren {
        f.write_char('(')?;
    }
    match x {
        BoolFormula::Atom(_) => unreachable!(),
        BoolFormula::Not(inner) => {
            f.write_char('!')?;
            write_formula(f, inner, UNARY, false)?;
        }
        BoolFormula::And(a, b) => {
            write_formula(f, a, AND, false)?;
            f.write_str(" & ")?;
            write_formula(f, b, UNARY, false)?;
        }
        BoolFormula::Or(a, b) => {
            write_formula(f, a, OR, false)?;
            f.write_str(" | ")?;
            write_formula(f, b, AND, false)?;
        }
        BoolFormula::Implies(a, b) => {
            write_formula(f, a, OR, false)?;
            f.write_str(" -> ")?;
            write_formula(f, b, IMP, false)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl<A: Display> Display for BoolFormula<A> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, IMP, true)
    }
}

pub fn print_rational(r: &Rational) -> String {
    r.to_string()
}
