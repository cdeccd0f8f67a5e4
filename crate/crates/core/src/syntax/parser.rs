//! Recursive-descent parser for the concrete grammar (see `docs/grammar.md`).
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->` (right associative).
//! Inside a Boolean formula an inequality binds tighter than any
//! connective. A parenthesis in atom position is first read as the start of
//! an atom and, failing that, as a grouped formula.

use num_traits::{One, Zero};
use thiserror::Error;

use super::lexer::{tokenize, Tok};
use super::{
    BoolFormula, ExpectationFormula, Formula, Gamble, GambleIneqFormula, GambleLiteral, Lang,
    LikelihoodFormula, LinearIneq, Prop, Term,
};
use crate::rational::Rational;

const RESERVED: [&str; 4] = ["true", "false", "e", "l"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column} (offset {offset}): {message}")]
pub struct ParseError {
    /// Character offset from the start of the input.
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(text: &str, offset: usize, message: String) -> Self {
        let mut line = 1;
        let mut column = 1;
        for c in text.chars().take(offset) {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        ParseError {
            offset,
            line,
            column,
            message,
        }
    }
}

#[derive(Debug, Clone)]
struct Failure {
    offset: usize,
    message: String,
}

type PResult<T> = Result<T, Failure>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rel {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    furthest: Option<Failure>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let f = Failure {
            offset: self.offset(),
            message: message.into(),
        };
        self.note(&f);
        Err(f)
    }

    fn note(&mut self, f: &Failure) {
        if self.furthest.as_ref().map_or(true, |g| f.offset > g.offset) {
            self.furthest = Some(f.clone());
        }
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let found = self.peek().describe();
            self.fail(format!("expected {}, found {found}", want.describe()))
        }
    }

    fn is_prop_start(tok: &Tok) -> bool {
        match tok {
            Tok::Bang | Tok::LParen => true,
            Tok::Ident(s) => s != "e" && s != "l",
            _ => false,
        }
    }

    // ---- propositional formulas ----

    fn prop(&mut self) -> PResult<Prop> {
        let lhs = self.prop_or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.prop()?;
            return Ok(Prop::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn prop_or(&mut self) -> PResult<Prop> {
        let mut lhs = self.prop_and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.prop_and()?;
            lhs = Prop::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_and(&mut self) -> PResult<Prop> {
        let mut lhs = self.prop_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.prop_unary()?;
            lhs = Prop::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_unary(&mut self) -> PResult<Prop> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Prop::not(self.prop_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let p = self.prop()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Prop::True)
                }
                "false" => {
                    self.bump();
                    Ok(Prop::falsum())
                }
                "e" | "l" => self.fail(format!("`{name}` is reserved and cannot name a proposition")),
                _ => {
                    self.bump();
                    Ok(Prop::Var(name))
                }
            },
            other => self.fail(format!("expected a proposition, found {}", other.describe())),
        }
    }

    // ---- gambles ----

    fn gamble(&mut self) -> PResult<Gamble> {
        if let Tok::Num(r) = self.peek() {
            let next = self.peek_at(1);
            if r.is_zero()
                && !Self::is_prop_start(next)
                && !matches!(next, Tok::Plus | Tok::Minus)
            {
                self.bump();
                return Ok(Gamble::zero());
            }
        }
        let mut terms = Vec::new();
        let mut sign = Rational::one();
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -sign;
        }
        loop {
            terms.push(self.gamble_term(&sign)?);
            match self.peek() {
                Tok::Plus => sign = Rational::one(),
                Tok::Minus => sign = -Rational::one(),
                _ => break,
            }
            self.bump();
        }
        Ok(Gamble::new(terms))
    }

    fn gamble_term(&mut self, sign: &Rational) -> PResult<Term<Prop>> {
        if let Tok::Num(c) = self.peek().clone() {
            self.bump();
            if Self::is_prop_start(self.peek()) {
                let p = self.prop()?;
                return Ok(Term::new(sign * c, p));
            }
            return Ok(Term::new(sign * c, Prop::True));
        }
        let p = self.prop()?;
        Ok(Term::new(sign.clone(), p))
    }

    // ---- linear expressions over e(·) / l(·) ----

    fn lin_expr<T>(
        &mut self,
        keyword: &str,
        arg: fn(&mut Parser) -> PResult<T>,
    ) -> PResult<(Vec<Term<T>>, Rational)> {
        let mut terms = Vec::new();
        let mut constant = Rational::zero();
        let mut sign = Rational::one();
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -sign;
        }
        loop {
            let coef = match self.peek().clone() {
                Tok::Num(c) => {
                    self.bump();
                    Some(c)
                }
                _ => None,
            };
            let is_kw = matches!(self.peek(), Tok::Ident(s) if s == keyword);
            if is_kw {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = arg(self)?;
                self.expect(Tok::RParen)?;
                let c = coef.unwrap_or_else(Rational::one);
                terms.push(Term::new(&sign * c, a));
            } else if let Some(c) = coef {
                constant += &sign * c;
            } else {
                let found = self.peek().describe();
                return self.fail(format!(
                    "expected a number or `{keyword}(...)`, found {found}"
                ));
            }
            match self.peek() {
                Tok::Plus => sign = Rational::one(),
                Tok::Minus => sign = -Rational::one(),
                _ => break,
            }
            self.bump();
        }
        Ok((terms, constant))
    }

    fn relation(&mut self) -> PResult<Rel> {
        let rel = match self.peek() {
            Tok::Ge => Rel::Ge,
            Tok::Le => Rel::Le,
            Tok::Gt => Rel::Gt,
            Tok::Lt => Rel::Lt,
            Tok::Eq => Rel::Eq,
            other => {
                let found = other.describe();
                return self.fail(format!("expected one of >=, <=, >, <, =, found {found}"));
            }
        };
        self.bump();
        Ok(rel)
    }

    fn linear_atom<T: Clone>(
        &mut self,
        keyword: &str,
        arg: fn(&mut Parser) -> PResult<T>,
    ) -> PResult<BoolFormula<LinearIneq<T>>> {
        let start = self.offset();
        let (lt, lc) = self.lin_expr(keyword, arg)?;
        let rel = self.relation()?;
        let (rt, rc) = self.lin_expr(keyword, arg)?;
        if lt.is_empty() && rt.is_empty() {
            let f = Failure {
                offset: start,
                message: format!("a basic inequality needs at least one `{keyword}(...)` term"),
            };
            self.note(&f);
            return Err(f);
        }
        let neg = |ts: &[Term<T>]| -> Vec<Term<T>> {
            ts.iter()
                .map(|t| Term::new(-t.coef.clone(), t.arg.clone()))
                .collect()
        };
        // L >= R  ~>  L - R >= Rc - Lc;   L <= R  ~>  -L + R >= Lc - Rc
        let ge = || LinearIneq::new(lt.iter().cloned().chain(neg(&rt)).collect(), &rc - &lc);
        let le = || LinearIneq::new(neg(&lt).into_iter().chain(rt.iter().cloned()).collect(), &lc - &rc);
        Ok(match rel {
            Rel::Ge => BoolFormula::Atom(ge()),
            Rel::Le => BoolFormula::Atom(le()),
            Rel::Gt => BoolFormula::not(BoolFormula::Atom(le())),
            Rel::Lt => BoolFormula::not(BoolFormula::Atom(ge())),
            Rel::Eq => BoolFormula::and(BoolFormula::Atom(ge()), BoolFormula::Atom(le())),
        })
    }

    fn gamble_atom(&mut self) -> PResult<GambleIneqFormula> {
        let left = self.gamble()?;
        let rel = self.relation()?;
        let right = self.gamble()?;
        let lit = |l: &Gamble, r: &Gamble| {
            BoolFormula::Atom(GambleLiteral {
                left: l.clone(),
                right: r.clone(),
            })
        };
        Ok(match rel {
            Rel::Ge => lit(&left, &right),
            Rel::Le => lit(&right, &left),
            Rel::Gt => BoolFormula::not(lit(&right, &left)),
            Rel::Lt => BoolFormula::not(lit(&left, &right)),
            Rel::Eq => BoolFormula::and(lit(&left, &right), lit(&right, &left)),
        })
    }

    // ---- Boolean layer ----

    fn formula<A>(&mut self, atom: fn(&mut Parser) -> PResult<BoolFormula<A>>) -> PResult<BoolFormula<A>> {
        let lhs = self.formula_or(atom)?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula(atom)?;
            return Ok(BoolFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_or<A>(&mut self, atom: fn(&mut Parser) -> PResult<BoolFormula<A>>) -> PResult<BoolFormula<A>> {
        let mut lhs = self.formula_and(atom)?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.formula_and(atom)?;
            lhs = BoolFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn formula_and<A>(&mut self, atom: fn(&mut Parser) -> PResult<BoolFormula<A>>) -> PResult<BoolFormula<A>> {
        let mut lhs = self.formula_unary(atom)?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.formula_unary(atom)?;
            lhs = BoolFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn formula_unary<A>(&mut self, atom: fn(&mut Parser) -> PResult<BoolFormula<A>>) -> PResult<BoolFormula<A>> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(BoolFormula::not(self.formula_unary(atom)?));
        }
        let save = self.pos;
        match atom(self) {
            Ok(f) => Ok(f),
            Err(e) if self.toks[save].0 == Tok::LParen => {
                self.pos = save;
                self.bump();
                match self.formula(atom) {
                    Ok(f) => {
                        self.expect(Tok::RParen)?;
                        Ok(f)
                    }
                    Err(e2) => Err(if e2.offset >= e.offset { e2 } else { e }),
                }
            }
            Err(e) => Err(e),
        }
    }
}

fn expectation_atom(p: &mut Parser) -> PResult<ExpectationFormula> {
    p.linear_atom("e", Parser::gamble)
}

fn likelihood_atom(p: &mut Parser) -> PResult<LikelihoodFormula> {
    p.linear_atom("l", Parser::prop)
}

fn gamble_ineq_atom(p: &mut Parser) -> PResult<GambleIneqFormula> {
    p.gamble_atom()
}

fn run<T>(text: &str, body: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, ParseError> {
    let toks = tokenize(text).map_err(|e| ParseError::at(text, e.offset, e.message))?;
    let mut p = Parser {
        toks,
        pos: 0,
        furthest: None,
    };
    let result = body(&mut p).and_then(|v| {
        if *p.peek() == Tok::Eof {
            Ok(v)
        } else {
            let found = p.peek().describe();
            p.fail(format!("unexpected {found} after complete input"))
        }
    });
    result.map_err(|e| {
        let f = match p.furthest.take() {
            Some(g) if g.offset > e.offset => g,
            _ => e,
        };
        ParseError::at(text, f.offset, f.message)
    })
}

pub fn parse_prop(text: &str) -> Result<Prop, ParseError> {
    run(text, Parser::prop)
}

pub fn parse_gamble(text: &str) -> Result<Gamble, ParseError> {
    run(text, Parser::gamble)
}

pub fn parse_expectation(text: &str) -> Result<ExpectationFormula, ParseError> {
    run(text, |p| p.formula(expectation_atom))
}

pub fn parse_likelihood(text: &str) -> Result<LikelihoodFormula, ParseError> {
    run(text, |p| p.formula(likelihood_atom))
}

pub fn parse_gamble_formula(text: &str) -> Result<GambleIneqFormula, ParseError> {
    run(text, |p| p.formula(gamble_ineq_atom))
}

pub fn parse(text: &str, lang: Lang) -> Result<Formula, ParseError> {
    Ok(match lang {
        Lang::Prop => Formula::Prop(parse_prop(text)?),
        Lang::Gamble => Formula::Gamble(parse_gamble(text)?),
        Lang::Expectation => Formula::Expectation(parse_expectation(text)?),
        Lang::Likelihood => Formula::Likelihood(parse_likelihood(text)?),
        Lang::GambleIneq => Formula::GambleIneq(parse_gamble_formula(text)?),
    })
}

/// Whether `name` may be used as a proposition.
pub fn is_valid_prop_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn g(text: &str) -> Gamble {
        parse_gamble(text).unwrap()
    }

    #[test]
    fn basic_expectation_inequality() {
        let f = parse_expectation("2 e(1 p + 3 q) >= 1").unwrap();
        let BoolFormula::Atom(ineq) = f else {
            panic!("expected a basic inequality")
        };
        assert_eq!(ineq.terms.len(), 1);
        assert_eq!(ineq.terms[0].coef, int(2));
        assert_eq!(ineq.terms[0].arg.terms.len(), 2);
        assert_eq!(ineq.bound, int(1));
    }

    #[test]
    fn strict_less_is_negated_ge() {
        let f = parse_expectation("e(p) < 1").unwrap();
        let want = BoolFormula::not(BoolFormula::Atom(LinearIneq::new(
            vec![Term::new(int(1), g("1 p"))],
            int(1),
        )));
        assert_eq!(f, want);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse_expectation("e(p").unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!((err.line, err.column), (1, 4));
    }

    #[test]
    fn zero_denominator_rejected() {
        let err = parse_expectation("e(p) >= 1/0").unwrap_err();
        assert!(err.message.contains("zero denominator"), "{err}");
    }

    #[test]
    fn le_negates_coefficients() {
        let f = parse_expectation("e(p) <= 1/2").unwrap();
        let want = BoolFormula::Atom(LinearIneq::new(
            vec![Term::new(int(-1), g("1 p"))],
            ratio(-1, 2),
        ));
        assert_eq!(f, want);
    }

    #[test]
    fn equality_is_conjunction() {
        let f = parse_expectation("e(p) + e(!p) = 1").unwrap();
        let BoolFormula::And(a, b) = f else { panic!() };
        let (BoolFormula::Atom(a), BoolFormula::Atom(b)) = (*a, *b) else { panic!() };
        assert_eq!(b, a.negated());
        assert_eq!(a.bound, int(1));
    }

    #[test]
    fn terms_on_both_sides_move_left() {
        let f = parse_expectation("e(p) >= e(q) + 1").unwrap();
        let want = BoolFormula::Atom(LinearIneq::new(
            vec![Term::new(int(1), g("p")), Term::new(int(-1), g("q"))],
            int(1),
        ));
        assert_eq!(f, want);
    }

    #[test]
    fn gamble_forms() {
        assert_eq!(g("0"), Gamble::zero());
        assert_eq!(g("p - 2 q").terms[1].coef, int(-2));
        assert_eq!(g("-p").terms[0].coef, int(-1));
        assert_eq!(g("3").terms[0], Term::new(int(3), Prop::True));
        assert_eq!(g("1 p&q + 2 (p|q)").terms[1].arg, parse_prop("p|q").unwrap());
        assert_eq!(g("0 p").terms.len(), 1);
    }

    #[test]
    fn prop_precedence() {
        let p = parse_prop("!a & b | c -> d -> e1").unwrap();
        let want = Prop::implies(
            Prop::or(Prop::and(Prop::not(Prop::var("a")), Prop::var("b")), Prop::var("c")),
            Prop::implies(Prop::var("d"), Prop::var("e1")),
        );
        assert_eq!(p, want);
        assert_eq!(parse_prop("false").unwrap(), Prop::falsum());
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(parse_prop("e").is_err());
        assert!(is_valid_prop_name("p_1"));
        assert!(!is_valid_prop_name("true"));
    }

    #[test]
    fn gamble_formula_grouping() {
        let f = parse_gamble_formula("(p >= q) & ((p|q) >= q)").unwrap();
        assert!(matches!(f, BoolFormula::And(_, _)));
        let f = parse_gamble_formula("p <= p|q").unwrap();
        let BoolFormula::Atom(lit) = f else { panic!() };
        assert_eq!(lit.left, g("p|q"));
    }

    #[test]
    fn boolean_layer_over_inequalities() {
        let f = parse_expectation("(e(p) >= e(q)) -> (e(p|q) = e(p))").unwrap();
        assert!(matches!(f, BoolFormula::Implies(_, _)));
        let f = parse_expectation("!e(p) >= 1 | e(q) > 0").unwrap();
        assert!(matches!(f, BoolFormula::Or(_, _)));
    }

    #[test]
    fn likelihood_language() {
        let f = parse_likelihood("1 l(p|q) + 1 l(p&q) >= 1").unwrap();
        let BoolFormula::Atom(ineq) = f else { panic!() };
        assert_eq!(ineq.terms.len(), 2);
        assert!(parse_likelihood("e(p) >= 1").is_err());
    }

    #[test]
    fn constant_only_inequality_rejected() {
        assert!(parse_expectation("1 >= 0").is_err());
    }

    #[test]
    fn floats_rejected() {
        assert!(parse_expectation("e(p) >= 0.5").is_err());
    }
}
