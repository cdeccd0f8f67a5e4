//! Line-by-line checking of derivations in the axiom systems for
//! expectation (probability, lower probability, belief, possibility) and
//! for gamble inequalities.
//!
//! Taut, Ineq and the side conditions of E5, E10, G1 and G2 are decided
//! rather than derived. Schema matching is syntactic: an instance must be
//! written in the exact shape of its schema.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::gamble::{
    gamble_formula_check, gamble_join_all, AtomSpace, JoinMode, Validity, DEFAULT_ATOM_CAP,
};
use crate::lp::{lp_feasible, Feasibility, LinearSystem, Rel};
use crate::models::WorldSet;
use crate::rational::{parse_rational, Rational};
use crate::search::{falsifying_assignment, search, SearchFailure, SearchStats};
use crate::syntax::{
    parse_expectation, parse_gamble, parse_gamble_formula, parse_prop, BoolFormula,
    ExpectationFormula, ExpectationIneq, Formula, Gamble, GambleIneqFormula, GambleLiteral,
    LinearIneq, Prop, Term,
};

/// Largest number of distinct atoms a Taut line may abstract to.
pub const TAUT_MAX_VARS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxSystem {
    Prob,
    Lp,
    Bel,
    Poss,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
    E9,
    E10,
    E11,
    G1,
    G2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Taut,
    Ineq,
    Axiom(Axiom),
    /// 1-based line numbers of `f` and `f ⇒ g`.
    Mp(usize, usize),
}

impl AxSystem {
    pub const ALL: [AxSystem; 5] = [AxSystem::Prob, AxSystem::Lp, AxSystem::Bel, AxSystem::Poss, AxSystem::G];

    pub fn id(self) -> &'static str {
        match self {
            AxSystem::Prob => "axprob",
            AxSystem::Lp => "axlp",
            AxSystem::Bel => "axbel",
            AxSystem::Poss => "axposs",
            AxSystem::G => "axg",
        }
    }

    pub fn axioms(self) -> &'static [Axiom] {
        use Axiom::*;
        match self {
            AxSystem::Prob => &[E1, E2, E3, E4, E5],
            AxSystem::Lp => &[E5, E6, E7, E8],
            AxSystem::Bel => &[E5, E7, E8, E9, E10],
            AxSystem::Poss => &[E5, E7, E8, E10, E11],
            AxSystem::G => &[G1, G2],
        }
    }

    pub fn is_gamble_system(self) -> bool {
        self == AxSystem::G
    }
}

impl fmt::Display for AxSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxSystem::Prob => "AX^prob",
            AxSystem::Lp => "AX^lp",
            AxSystem::Bel => "AX^bel",
            AxSystem::Poss => "AX^poss",
            AxSystem::G => "AX^g",
        })
    }
}

impl FromStr for AxSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxSystem::ALL
            .into_iter()
            .find(|x| x.id() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown axiom system `{s}` (expected axprob, axlp, axbel, axposs or axg)"))
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use Axiom::*;
        Ok(match s {
            "E1" => E1,
            "E2" => E2,
            "E3" => E3,
            "E4" => E4,
            "E5" => E5,
            "E6" => E6,
            "E7" => E7,
            "E8" => E8,
            "E9" => E9,
            "E10" => E10,
            "E11" => E11,
            "G1" => G1,
            "G2" => G2,
            other => return Err(format!("unknown rule `{other}`")),
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Taut => f.write_str("Taut"),
            Rule::Ineq => f.write_str("Ineq"),
            Rule::Axiom(a) => a.fmt(f),
            Rule::Mp(i, j) => write!(f, "MP {i} {j}"),
        }
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["Taut"] => Ok(Rule::Taut),
            ["Ineq"] => Ok(Rule::Ineq),
            ["MP", i, j] => {
                let n = |x: &str| x.parse::<usize>().map_err(|_| format!("bad line number `{x}` in `{s}`"));
                Ok(Rule::Mp(n(i)?, n(j)?))
            }
            [one] => Axiom::from_str(one).map(Rule::Axiom),
            _ => Err(format!("unknown rule `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub text: String,
    pub by: Rule,
    /// Schema variable bindings as written in the proof file.
    pub bind: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub system: AxSystem,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("proof format: {0}")]
    Format(String),
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
}

/// Reads a proof document: either a list of lines, or an object with
/// `system` and `lines`. A `system` argument must agree with the document's
/// own when both are given.
pub fn load_proof(text: &str, system: Option<AxSystem>) -> Result<Derivation, ProofError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ProofError::Json(e.to_string()))?;
    let (doc_system, lines) = match &doc {
        Value::Array(lines) => (None, lines),
        Value::Object(obj) => {
            for key in obj.keys() {
                if key != "system" && key != "lines" {
                    return Err(ProofError::Format(format!("unknown field `{key}`")));
                }
            }
            let sys = match obj.get("system") {
                None => None,
                Some(Value::String(s)) => Some(AxSystem::from_str(s).map_err(ProofError::Format)?),
                Some(_) => return Err(ProofError::Format("`system` must be a string".into())),
            };
            match obj.get("lines") {
                Some(Value::Array(lines)) => (sys, lines),
                _ => return Err(ProofError::Format("`lines` must be a list".into())),
            }
        }
        _ => return Err(ProofError::Format("expected a list of lines".into())),
    };
    let system = match (system, doc_system) {
        (Some(a), Some(b)) if a != b => {
            return Err(ProofError::Format(format!(
                "document is for {} but {} was requested",
                b.id(),
                a.id()
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(ProofError::Format("no axiom system given".into())),
    };
    let mut out = Vec::new();
    for (k, item) in lines.iter().enumerate() {
        let line = k + 1;
        let bad = |message: String| ProofError::BadLine { line, message };
        let Value::Object(obj) = item else {
            return Err(bad("line must be an object".into()));
        };
        for key in obj.keys() {
            if !["formula", "by", "bind"].contains(&key.as_str()) {
                return Err(bad(format!("unknown field `{key}`")));
            }
        }
        let Some(Value::String(text)) = obj.get("formula") else {
            return Err(bad("`formula` must be a string".into()));
        };
        let Some(Value::String(by)) = obj.get("by") else {
            return Err(bad("`by` must be a string".into()));
        };
        let by = Rule::from_str(by).map_err(bad)?;
        let mut bind = BTreeMap::new();
        match obj.get("bind") {
            None => {}
            Some(Value::Object(b)) => {
                for (name, v) in b {
                    match v {
                        Value::String(s) => {
                            bind.insert(name.clone(), s.clone());
                        }
                        _ => return Err(bad(format!("binding `{name}` must be a string"))),
                    }
                }
            }
            Some(_) => return Err(bad("`bind` must be an object".into())),
        }
        out.push(Line {
            text: text.clone(),
            by,
            bind,
        });
    }
    Ok(Derivation { system, lines: out })
}

/// Why a line failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    Unparsable(String),
    WrongLanguage { system: AxSystem },
    NotInSystem { axiom: Axiom, system: AxSystem },
    SchemaMismatch { axiom: Axiom, detail: String },
    CoefficientSign { axiom: Axiom, detail: String },
    ChainBroken { axiom: Axiom, step: String, assignment: Vec<(String, bool)> },
    NotTautology { assignment: Vec<(String, bool)> },
    TooManyAtoms { found: usize },
    InvalidInequality { witness: Vec<(String, Rational)> },
    GambleInvalid { countermodel: String },
    NotDisjoint { assignment: Vec<(String, bool)> },
    NotImplied { assignment: Vec<(String, bool)> },
    JoinMismatch { detail: String },
    BadReference { line: usize },
    MpMismatch { premise: usize, implication: usize },
    BindingMismatch { name: String, bound: String, found: String },
    MalformedBinding { name: String, detail: String },
}

fn show_assignment(a: &[(String, bool)]) -> String {
    a.iter()
        .map(|(p, v)| format!("{p}={}", if *v { "T" } else { "F" }))
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::Unparsable(m) => write!(f, "formula does not parse: {m}"),
            Reason::WrongLanguage { system } => write!(f, "formula is not in the language of {system}"),
            Reason::NotInSystem { axiom, system } => write!(f, "{axiom} not in {system}"),
            Reason::SchemaMismatch { axiom, detail } => write!(f, "not an instance of {axiom}: {detail}"),
            Reason::CoefficientSign { axiom, detail } => write!(f, "{axiom} coefficient condition fails: {detail}"),
            Reason::ChainBroken { axiom, step, assignment } => write!(
                f,
                "{axiom} side condition fails: {step} is falsified by {}",
                show_assignment(assignment)
            ),
            Reason::NotTautology { assignment } => {
                write!(f, "not a tautology; falsified by {}", show_assignment(assignment))
            }
            Reason::TooManyAtoms { found } => {
                write!(f, "{found} distinct atoms exceed the truth-table limit of {TAUT_MAX_VARS}")
            }
            Reason::InvalidInequality { witness } => {
                let w: Vec<String> = witness.iter().map(|(x, v)| format!("{x} = {v}")).collect();
                write!(f, "not a valid linear inequality formula; fails at {}", w.join(", "))
            }
            Reason::GambleInvalid { countermodel } => {
                write!(f, "gamble inequality is not valid; countermodel {countermodel}")
            }
            Reason::NotDisjoint { assignment } => {
                write!(f, "G1 side condition fails: both disjuncts hold at {}", show_assignment(assignment))
            }
            Reason::NotImplied { assignment } => {
                write!(f, "G2 side condition fails: implication falsified by {}", show_assignment(assignment))
            }
            Reason::JoinMismatch { detail } => write!(f, "E9 join mismatch: {detail}"),
            Reason::BadReference { line } => write!(f, "MP refers to line {line}, which is not an earlier line"),
            Reason::MpMismatch { premise, implication } => write!(
                f,
                "line {implication} is not (line {premise}) -> (this line)"
            ),
            Reason::BindingMismatch { name, bound, found } => {
                write!(f, "binding `{name}` is `{bound}` but the formula has `{found}`")
            }
            Reason::MalformedBinding { name, detail } => write!(f, "malformed binding `{name}`: {detail}"),
        }
    }
}

impl Reason {
    /// Stable identifier for the kind of rejection.
    pub fn code(&self) -> &'static str {
        match self {
            Reason::Unparsable(_) => "unparsable",
            Reason::WrongLanguage { .. } => "wrong-language",
            Reason::NotInSystem { .. } => "not-in-system",
            Reason::SchemaMismatch { .. } => "schema-mismatch",
            Reason::CoefficientSign { .. } => "coefficient-sign",
            Reason::ChainBroken { .. } => "chain-broken",
            Reason::NotTautology { .. } => "not-tautology",
            Reason::TooManyAtoms { .. } => "too-many-atoms",
            Reason::InvalidInequality { .. } => "invalid-inequality",
            Reason::GambleInvalid { .. } => "gamble-invalid",
            Reason::NotDisjoint { .. } => "not-disjoint",
            Reason::NotImplied { .. } => "not-implied",
            Reason::JoinMismatch { .. } => "join-mismatch",
            Reason::BadReference { .. } => "bad-reference",
            Reason::MpMismatch { .. } => "mp-mismatch",
            Reason::BindingMismatch { .. } => "binding-mismatch",
            Reason::MalformedBinding { .. } => "malformed-binding",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofVerdict {
    Accepted,
    Rejected { line: usize, reason: Reason },
}

pub fn parse_line_formula(text: &str, system: AxSystem) -> Result<Formula, Reason> {
    if system.is_gamble_system() {
        match parse_gamble_formula(text) {
            Ok(f) => Ok(Formula::GambleIneq(f)),
            Err(e) if parse_expectation(text).is_ok() => {
                let _ = e;
                Err(Reason::WrongLanguage { system })
            }
            Err(e) => Err(Reason::Unparsable(e.to_string())),
        }
    } else {
        match parse_expectation(text) {
            Ok(f) => Ok(Formula::Expectation(f)),
            Err(_) if parse_gamble_formula(text).is_ok() => Err(Reason::WrongLanguage { system }),
            Err(e) => Err(Reason::Unparsable(e.to_string())),
        }
    }
}

pub fn check_proof(d: &Derivation) -> ProofVerdict {
    let mut formulas: Vec<Formula> = Vec::new();
    for (k, line) in d.lines.iter().enumerate() {
        let n = k + 1;
        let result = parse_line_formula(&line.text, d.system).and_then(|f| {
            check_line(&f, line, d.system, &formulas, n)?;
            Ok(f)
        });
        match result {
            Ok(f) => formulas.push(f),
            Err(reason) => return ProofVerdict::Rejected { line: n, reason },
        }
    }
    ProofVerdict::Accepted
}

fn no_bindings(line: &Line) -> Result<(), Reason> {
    match line.bind.keys().next() {
        Some(name) => Err(Reason::MalformedBinding {
            name: name.clone(),
            detail: format!("{} takes no bindings", line.by),
        }),
        None => Ok(()),
    }
}

fn check_line(f: &Formula, line: &Line, system: AxSystem, earlier: &[Formula], n: usize) -> Result<(), Reason> {
    match line.by {
        Rule::Taut => {
            no_bindings(line)?;
            tautology(f)
        }
        Rule::Ineq => {
            no_bindings(line)?;
            inequality(f)
        }
        Rule::Mp(i, j) => {
            no_bindings(line)?;
            for r in [i, j] {
                if r == 0 || r >= n {
                    return Err(Reason::BadReference { line: r });
                }
            }
            if mp_matches(&earlier[i - 1], &earlier[j - 1], f) {
                Ok(())
            } else {
                Err(Reason::MpMismatch {
                    premise: i,
                    implication: j,
                })
            }
        }
        Rule::Axiom(axiom) => {
            let bound = is_axiom_instance(f, axiom, system)?;
            check_bindings(&bound, &line.bind)
        }
    }
}

fn mp_matches(premise: &Formula, implication: &Formula, conclusion: &Formula) -> bool {
    fn go<A: PartialEq>(p: &BoolFormula<A>, imp: &BoolFormula<A>, c: &BoolFormula<A>) -> bool {
        matches!(imp, BoolFormula::Implies(a, b) if **a == *p && **b == *c)
    }
    match (premise, implication, conclusion) {
        (Formula::Expectation(p), Formula::Expectation(i), Formula::Expectation(c)) => go(p, i, c),
        (Formula::GambleIneq(p), Formula::GambleIneq(i), Formula::GambleIneq(c)) => go(p, i, c),
        _ => false,
    }
}

fn tautology(f: &Formula) -> Result<(), Reason> {
    fn go<A: PartialEq + Clone + fmt::Display>(f: &BoolFormula<A>) -> Result<(), Reason> {
        match falsifying_assignment(f, TAUT_MAX_VARS) {
            Ok(None) => Ok(()),
            Ok(Some(a)) => Err(Reason::NotTautology {
                assignment: a.into_iter().map(|(x, v)| (x.to_string(), v)).collect(),
            }),
            Err(found) => Err(Reason::TooManyAtoms { found }),
        }
    }
    match f {
        Formula::Expectation(e) => go(e),
        Formula::GambleIneq(g) => go(g),
        _ => unreachable!("proof lines are expectation or gamble formulas"),
    }
}

/// Validity of a Boolean combination of linear inequalities over real
/// variables, by refuting the negation branch by branch.
fn linear_valid<A: PartialEq + Clone>(
    f: &BoolFormula<A>,
    names: &[String],
    linear: impl Fn(&A) -> (Vec<(usize, Rational)>, Rational),
) -> Result<(), Reason> {
    let negation = BoolFormula::not(f.clone());
    let mut stats = SearchStats::default();
    let found = search(&negation, u64::MAX, &mut stats, |lits| {
        let mut sys = LinearSystem::new();
        for name in names {
            sys.add_var(name.clone(), false);
        }
        for (atom, value) in lits {
            let (coefs, bound) = linear(atom);
            if *value {
                sys.constrain(coefs, Rel::Ge, bound);
            } else {
                sys.constrain(coefs.into_iter().map(|(v, c)| (v, -c)).collect(), Rel::Gt, -bound);
            }
        }
        Ok::<_, ()>(match lp_feasible(&sys) {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        })
    });
    match found {
        Ok(None) => Ok(()),
        Ok(Some(w)) => Err(Reason::InvalidInequality {
            witness: names.iter().cloned().zip(w).collect(),
        }),
        Err(SearchFailure::Budget { .. } | SearchFailure::Theory(())) => unreachable!(),
    }
}

fn merge(coefs: impl IntoIterator<Item = (usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (v, c) in coefs {
        *acc.entry(v).or_insert_with(Rational::zero) += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn inequality(f: &Formula) -> Result<(), Reason> {
    match f {
        Formula::Expectation(e) => {
            let gambles = e.gambles();
            let names: Vec<String> = gambles.iter().map(|g| format!("e({g})")).collect();
            linear_valid(e, &names, |ineq: &ExpectationIneq| {
                let coefs = ineq
                    .terms
                    .iter()
                    .map(|t| (gambles.iter().position(|g| **g == t.arg).unwrap(), t.coef.clone()));
                (merge(coefs), ineq.bound.clone())
            })
        }
        Formula::GambleIneq(g) => {
            // variables are the distinct propositional formulas
            let mut props: Vec<&Prop> = Vec::new();
            g.visit_atoms(&mut |lit| {
                for t in lit.left.terms.iter().chain(&lit.right.terms) {
                    if !props.contains(&&t.arg) {
                        props.push(&t.arg);
                    }
                }
            });
            let names: Vec<String> = props.iter().map(|p| p.to_string()).collect();
            let index = |p: &Prop| props.iter().position(|q| *q == p).unwrap();
            linear_valid(g, &names, |lit: &GambleLiteral| {
                let coefs = lit
                    .left
                    .terms
                    .iter()
                    .map(|t| (index(&t.arg), t.coef.clone()))
                    .chain(lit.right.terms.iter().map(|t| (index(&t.arg), -t.coef.clone())));
                (merge(coefs), Rational::zero())
            })?;
            // linear validity alone is unsound for gamble formulas, whose
            // literals quantify over worlds
            gamble_side(g)
        }
        _ => unreachable!("proof lines are expectation or gamble formulas"),
    }
}

fn gamble_side(g: &GambleIneqFormula) -> Result<(), Reason> {
    let report = gamble_formula_check(g, DEFAULT_ATOM_CAP).map_err(|e| Reason::GambleInvalid {
        countermodel: e.to_string(),
    })?;
    match report.validity {
        Validity::Valid => Ok(()),
        Validity::Countermodel(w) => Err(Reason::GambleInvalid {
            countermodel: describe_worlds(&w),
        }),
    }
}

fn describe_worlds(w: &WorldSet) -> String {
    let parts: Vec<String> = w
        .worlds()
        .iter()
        .map(|x| format!("{}{{{}}}", x.id, x.props.iter().cloned().collect::<Vec<_>>().join(",")))
        .collect();
    parts.join(" ")
}

/// A component of a matched schema instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Number(Rational),
    Gamble(Gamble),
    Prop(Prop),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Number(r) => r.fmt(f),
            Bound::Gamble(g) => g.fmt(f),
            Bound::Prop(p) => p.fmt(f),
        }
    }
}

fn check_bindings(bound: &BTreeMap<String, Bound>, given: &BTreeMap<String, String>) -> Result<(), Reason> {
    for (name, text) in given {
        let Some(actual) = bound.get(name) else {
            let known: Vec<&str> = bound.keys().map(String::as_str).collect();
            return Err(Reason::MalformedBinding {
                name: name.clone(),
                detail: format!("not a variable of this schema (expected one of: {})", known.join(", ")),
            });
        };
        let malformed = |detail: String| Reason::MalformedBinding {
            name: name.clone(),
            detail,
        };
        let value = match actual {
            Bound::Number(_) => Bound::Number(parse_rational(text).map_err(|e| malformed(e.to_string()))?),
            Bound::Gamble(_) => Bound::Gamble(parse_gamble(text).map_err(|e| malformed(e.to_string()))?),
            Bound::Prop(_) => Bound::Prop(parse_prop(text).map_err(|e| malformed(e.to_string()))?),
        };
        if value != *actual {
            return Err(Reason::BindingMismatch {
                name: name.clone(),
                bound: value.to_string(),
                found: actual.to_string(),
            });
        }
    }
    Ok(())
}

fn mismatch(axiom: Axiom, detail: impl Into<String>) -> Reason {
    Reason::SchemaMismatch {
        axiom,
        detail: detail.into(),
    }
}

/// `I` for a formula of the form `I & I.negated()`, the parse of `L = R`.
fn as_equation(f: &ExpectationFormula) -> Option<&ExpectationIneq> {
    match f {
        BoolFormula::And(a, b) => match (&**a, &**b) {
            (BoolFormula::Atom(i), BoolFormula::Atom(j)) if *j == i.negated() => Some(i),
            _ => None,
        },
        _ => None,
    }
}

fn single(f: &ExpectationFormula) -> Option<&ExpectationIneq> {
    match f {
        BoolFormula::Atom(i) => Some(i),
        _ => None,
    }
}

/// `φ` when the gamble is exactly `1 φ`.
fn indicator(g: &Gamble) -> Option<&Prop> {
    match g.terms.as_slice() {
        [t] if t.coef == Rational::from_integer(1.into()) => Some(&t.arg),
        _ => None,
    }
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn props_assignment_failure(f: &Prop) -> Option<Vec<(String, bool)>> {
    // truth table over the formula's propositions
    let props: Vec<String> = f.props().into_iter().collect();
    let space = AtomSpace::new(props, TAUT_MAX_VARS).ok()?;
    let table = space.truth_table(f).ok()?;
    let a = table.iter().position(|v| !v)?;
    Some(space.assignment(a).into_iter().collect())
}

/// Matches `f` against the schema and returns its bound components.
pub fn is_axiom_instance(f: &Formula, axiom: Axiom, system: AxSystem) -> Result<BTreeMap<String, Bound>, Reason> {
    if !system.axioms().contains(&axiom) {
        return Err(Reason::NotInSystem { axiom, system });
    }
    let mut out = BTreeMap::new();
    match (axiom, f) {
        (Axiom::G1 | Axiom::G2, Formula::GambleIneq(g)) => {
            gamble_axiom(axiom, g, &mut out)?;
        }
        (_, Formula::Expectation(e)) if !matches!(axiom, Axiom::G1 | Axiom::G2) => {
            expectation_axiom(axiom, e, &mut out)?;
        }
        _ => return Err(Reason::WrongLanguage { system }),
    }
    Ok(out)
}

fn gamble_axiom(axiom: Axiom, g: &GambleIneqFormula, out: &mut BTreeMap<String, Bound>) -> Result<(), Reason> {
    match axiom {
        Axiom::G1 => {
            // φ|ψ = φ + ψ
            let shape = "expected `φ|ψ = φ + ψ`";
            let BoolFormula::And(a, b) = g else {
                return Err(mismatch(axiom, shape));
            };
            let (BoolFormula::Atom(x), BoolFormula::Atom(y)) = (&**a, &**b) else {
                return Err(mismatch(axiom, shape));
            };
            if x.left != y.right || x.right != y.left {
                return Err(mismatch(axiom, shape));
            }
            let one = r(1);
            let (phi, psi) = match (indicator(&x.left), x.right.terms.as_slice()) {
                (Some(Prop::Or(p, q)), [s, t]) if s.coef == one && t.coef == one && s.arg == **p && t.arg == **q => {
                    ((**p).clone(), (**q).clone())
                }
                _ => return Err(mismatch(axiom, shape)),
            };
            if let Some(a) = props_assignment_failure(&Prop::not(Prop::and(phi.clone(), psi.clone()))) {
                return Err(Reason::NotDisjoint { assignment: a });
            }
            out.insert("phi".into(), Bound::Prop(phi));
            out.insert("psi".into(), Bound::Prop(psi));
        }
        Axiom::G2 => {
            // φ <= ψ parses as ψ >= φ
            let shape = "expected `φ <= ψ`";
            let BoolFormula::Atom(lit) = g else {
                return Err(mismatch(axiom, shape));
            };
            let (Some(psi), Some(phi)) = (indicator(&lit.left), indicator(&lit.right)) else {
                return Err(mismatch(axiom, shape));
            };
            if let Some(a) = props_assignment_failure(&Prop::implies(phi.clone(), psi.clone())) {
                return Err(Reason::NotImplied { assignment: a });
            }
            out.insert("phi".into(), Bound::Prop(phi.clone()));
            out.insert("psi".into(), Bound::Prop(psi.clone()));
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn expectation_axiom(axiom: Axiom, e: &ExpectationFormula, out: &mut BTreeMap<String, Bound>) -> Result<(), Reason> {
    let one = r(1);
    match axiom {
        Axiom::E1 | Axiom::E6 => {
            let (ineq, shape) = if axiom == Axiom::E1 {
                (as_equation(e), "expected `e(γ1 + γ2) = e(γ1) + e(γ2)`")
            } else {
                (single(e), "expected `e(γ1 + γ2) >= e(γ1) + e(γ2)`")
            };
            let ineq = ineq.ok_or_else(|| mismatch(axiom, shape))?;
            let [s, a, b] = ineq.terms.as_slice() else {
                return Err(mismatch(axiom, shape));
            };
            if s.coef != one || a.coef != -one.clone() || b.coef != -one || !ineq.bound.is_zero() {
                return Err(mismatch(axiom, shape));
            }
            if s.arg != a.arg.plus(&b.arg) {
                return Err(mismatch(axiom, format!("`{}` is not `{}` followed by `{}`", s.arg, a.arg, b.arg)));
            }
            out.insert("gamma1".into(), Bound::Gamble(a.arg.clone()));
            out.insert("gamma2".into(), Bound::Gamble(b.arg.clone()));
        }
        Axiom::E2 => {
            let shape = "expected `e(a φ) = a e(φ)`";
            let ineq = as_equation(e).ok_or_else(|| mismatch(axiom, shape))?;
            let [s, t] = ineq.terms.as_slice() else {
                return Err(mismatch(axiom, shape));
            };
            let ([inner], Some(phi)) = (s.arg.terms.as_slice(), indicator(&t.arg)) else {
                return Err(mismatch(axiom, shape));
            };
            let a = &inner.coef;
            if s.coef != one || t.coef != -a.clone() || inner.arg != *phi || !ineq.bound.is_zero() {
                return Err(mismatch(axiom, shape));
            }
            out.insert("a".into(), Bound::Number(a.clone()));
            out.insert("phi".into(), Bound::Prop(phi.clone()));
        }
        Axiom::E3 | Axiom::E4 => {
            let (target, value, shape) = if axiom == Axiom::E3 {
                (Prop::falsum(), r(0), "expected `e(false) = 0`")
            } else {
                (Prop::True, r(1), "expected `e(true) = 1`")
            };
            let ineq = as_equation(e).ok_or_else(|| mismatch(axiom, shape))?;
            match ineq.terms.as_slice() {
                [s] if s.coef == one && indicator(&s.arg) == Some(&target) && ineq.bound == value => {}
                _ => return Err(mismatch(axiom, shape)),
            }
        }
        Axiom::E5 => {
            // e(γ1) <= e(γ2) parses as -e(γ1) + e(γ2) >= 0
            let shape = "expected `e(γ1) <= e(γ2)`";
            let ineq = single(e).ok_or_else(|| mismatch(axiom, shape))?;
            let [a, b] = ineq.terms.as_slice() else {
                return Err(mismatch(axiom, shape));
            };
            if a.coef != -one.clone() || b.coef != one || !ineq.bound.is_zero() {
                return Err(mismatch(axiom, shape));
            }
            let side = BoolFormula::atom(GambleLiteral {
                left: b.arg.clone(),
                right: a.arg.clone(),
            });
            gamble_side(&side)?;
            out.insert("gamma1".into(), Bound::Gamble(a.arg.clone()));
            out.insert("gamma2".into(), Bound::Gamble(b.arg.clone()));
        }
        Axiom::E7 | Axiom::E8 => {
            let (constant, shape) = if axiom == Axiom::E7 {
                (Prop::True, "expected `e(a γ + b true) = a e(γ) + b`")
            } else {
                (Prop::falsum(), "expected `e(a γ + b false) = a e(γ)`")
            };
            let ineq = as_equation(e).ok_or_else(|| mismatch(axiom, shape))?;
            let [s, t] = ineq.terms.as_slice() else {
                return Err(mismatch(axiom, shape));
            };
            let Some((last, init)) = s.arg.terms.split_last() else {
                return Err(mismatch(axiom, shape));
            };
            let a = -t.coef.clone();
            let b = last.coef.clone();
            let expected_bound = if axiom == Axiom::E7 { b.clone() } else { r(0) };
            if s.coef != one
                || last.arg != constant
                || ineq.bound != expected_bound
                || Gamble::new(init.to_vec()) != t.arg.scaled(&a)
            {
                return Err(mismatch(axiom, shape));
            }
            if a.is_negative() {
                return Err(Reason::CoefficientSign {
                    axiom,
                    detail: format!("a = {a} but a >= 0 is required"),
                });
            }
            out.insert("a".into(), Bound::Number(a));
            out.insert("b".into(), Bound::Number(b));
            out.insert("gamma".into(), Bound::Gamble(t.arg.clone()));
        }
        Axiom::E9 => e9(e, out)?,
        Axiom::E10 => {
            let shape = "expected `e(b1 φ1 + ... + bn φn) = b1 e(φ1) + ... + bn e(φn)`";
            let ineq = as_equation(e).ok_or_else(|| mismatch(axiom, shape))?;
            let Some((s, rest)) = ineq.terms.split_first() else {
                return Err(mismatch(axiom, shape));
            };
            if s.coef != one || !ineq.bound.is_zero() || rest.is_empty() || s.arg.terms.len() != rest.len() {
                return Err(mismatch(axiom, shape));
            }
            for (k, (g, t)) in s.arg.terms.iter().zip(rest).enumerate() {
                if indicator(&t.arg) != Some(&g.arg) || t.coef != -g.coef.clone() {
                    return Err(mismatch(axiom, format!("term {} does not match `{} {}`", k + 1, g.coef, g.arg)));
                }
            }
            for (k, g) in s.arg.terms.iter().enumerate() {
                if g.coef.is_negative() {
                    return Err(Reason::CoefficientSign {
                        axiom,
                        detail: format!("b{} = {} but nonnegative coefficients are required", k + 1, g.coef),
                    });
                }
                out.insert(format!("b{}", k + 1), Bound::Number(g.coef.clone()));
                out.insert(format!("phi{}", k + 1), Bound::Prop(g.arg.clone()));
            }
            for (k, w) in s.arg.terms.windows(2).enumerate() {
                let step = Prop::implies(w[1].arg.clone(), w[0].arg.clone());
                if let Some(a) = props_assignment_failure(&step) {
                    return Err(Reason::ChainBroken {
                        axiom,
                        step: format!("phi{} -> phi{}", k + 2, k + 1),
                        assignment: a,
                    });
                }
            }
        }
        Axiom::E11 => {
            let shape = "expected `(e(φ1) >= e(φ2)) -> (e(φ1|φ2) = e(φ1))`";
            let BoolFormula::Implies(h, c) = e else {
                return Err(mismatch(axiom, shape));
            };
            let hyp = single(h).ok_or_else(|| mismatch(axiom, shape))?;
            let concl = as_equation(c).ok_or_else(|| mismatch(axiom, shape))?;
            let ([a, b], [x, y]) = (hyp.terms.as_slice(), concl.terms.as_slice()) else {
                return Err(mismatch(axiom, shape));
            };
            let (Some(p1), Some(p2), Some(j), Some(p1b)) =
                (indicator(&a.arg), indicator(&b.arg), indicator(&x.arg), indicator(&y.arg))
            else {
                return Err(mismatch(axiom, shape));
            };
            let ok = a.coef == one
                && b.coef == -one.clone()
                && x.coef == one
                && y.coef == -one
                && hyp.bound.is_zero()
                && concl.bound.is_zero()
                && p1 == p1b
                && *j == Prop::or(p1.clone(), p2.clone());
            if !ok {
                return Err(mismatch(axiom, shape));
            }
            out.insert("phi1".into(), Bound::Prop(p1.clone()));
            out.insert("phi2".into(), Bound::Prop(p2.clone()));
        }
        Axiom::G1 | Axiom::G2 => unreachable!(),
    }
    Ok(())
}

/// Nonempty subsets of `{0..n}` ordered by size, then lexicographically.
pub fn e9_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

fn e9(e: &ExpectationFormula, out: &mut BTreeMap<String, Bound>) -> Result<(), Reason> {
    let axiom = Axiom::E9;
    let shape = "expected `e(γ1 ∨ ... ∨ γn) >= Σ_I (-1)^(|I|+1) e(∧_I γ)`";
    let ineq = single(e).ok_or_else(|| mismatch(axiom, shape))?;
    let count = ineq.terms.len();
    if count < 2 || !count.is_power_of_two() || !ineq.bound.is_zero() || ineq.terms[0].coef != r(1) {
        return Err(mismatch(axiom, shape));
    }
    let n = count.trailing_zeros() as usize;
    let subsets = e9_subsets(n);
    let gammas: Vec<&Gamble> = ineq.terms[1..=n].iter().map(|t| &t.arg).collect();
    for (k, (subset, term)) in subsets.iter().zip(&ineq.terms[1..]).enumerate() {
        // moved to the left: −(−1)^(|I|+1)
        let want = if subset.len() % 2 == 1 { r(-1) } else { r(1) };
        if term.coef != want {
            return Err(Reason::CoefficientSign {
                axiom,
                detail: format!("term {} has coefficient {} on the left, expected {want}", k + 2, term.coef),
            });
        }
    }
    let mut props = std::collections::BTreeSet::new();
    for t in &ineq.terms {
        t.arg.collect_props(&mut props);
    }
    let space = AtomSpace::new(props, DEFAULT_ATOM_CAP).map_err(|e| Reason::JoinMismatch { detail: e.to_string() })?;
    let values = |g: &Gamble| space.values(g).expect("props collected");
    let join = gamble_join_all(&gammas, JoinMode::Max, DEFAULT_ATOM_CAP)
        .map_err(|e| Reason::JoinMismatch { detail: e.to_string() })?;
    if values(&join) != values(&ineq.terms[0].arg) {
        return Err(Reason::JoinMismatch {
            detail: format!("`{}` is not the pointwise max of the γi", ineq.terms[0].arg),
        });
    }
    for (subset, term) in subsets.iter().zip(&ineq.terms[1..]).skip(n) {
        let members: Vec<&Gamble> = subset.iter().map(|i| gammas[*i]).collect();
        let meet = gamble_join_all(&members, JoinMode::Min, DEFAULT_ATOM_CAP)
            .map_err(|e| Reason::JoinMismatch { detail: e.to_string() })?;
        if values(&meet) != values(&term.arg) {
            let ids: Vec<String> = subset.iter().map(|i| format!("γ{}", i + 1)).collect();
            return Err(Reason::JoinMismatch {
                detail: format!("`{}` is not the pointwise min of {}", term.arg, ids.join(", ")),
            });
        }
    }
    for (i, g) in gammas.iter().enumerate() {
        out.insert(format!("gamma{}", i + 1), Bound::Gamble((*g).clone()));
    }
    Ok(())
}

/// Builds the E9 instance for the given gambles, writing joins over atoms.
pub fn e9_instance(gammas: &[Gamble]) -> Result<ExpectationFormula, crate::gamble::GambleError> {
    let refs: Vec<&Gamble> = gammas.iter().collect();
    let join = gamble_join_all(&refs, JoinMode::Max, DEFAULT_ATOM_CAP)?;
    let mut terms = vec![Term::new(r(1), join)];
    for subset in e9_subsets(gammas.len()) {
        let g = if subset.len() == 1 {
            gammas[subset[0]].clone()
        } else {
            let members: Vec<&Gamble> = subset.iter().map(|i| &gammas[*i]).collect();
            gamble_join_all(&members, JoinMode::Min, DEFAULT_ATOM_CAP)?
        };
        let c = if subset.len() % 2 == 1 { r(-1) } else { r(1) };
        terms.push(Term::new(c, g));
    }
    Ok(BoolFormula::atom(LinearIneq::new(terms, r(0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(text: &str, axiom: Axiom, system: AxSystem) -> Result<BTreeMap<String, Bound>, Reason> {
        let f = parse_line_formula(text, system).unwrap();
        is_axiom_instance(&f, axiom, system)
    }

    #[test]
    fn schema_examples() {
        assert!(instance("e(2 p) = 2 e(p)", Axiom::E2, AxSystem::Prob).is_ok());
        assert!(instance("e(true) = 1", Axiom::E4, AxSystem::Prob).is_ok());
        assert!(instance("e(false) = 0", Axiom::E3, AxSystem::Prob).is_ok());
        assert!(matches!(
            instance("e(-1 p + 0 true) = -1 e(p)", Axiom::E7, AxSystem::Lp),
            Err(Reason::CoefficientSign { .. })
        ));
        assert!(instance("e(2 p + 3 true) = 2 e(p) + 3", Axiom::E7, AxSystem::Lp).is_ok());
        assert!(instance("e(2 p + 3 false) = 2 e(p)", Axiom::E8, AxSystem::Lp).is_ok());
        assert_eq!(
            instance("e(1 p + 1 q) = e(p) + e(q)", Axiom::E1, AxSystem::Lp),
            Err(Reason::NotInSystem {
                axiom: Axiom::E1,
                system: AxSystem::Lp
            })
        );
        assert!(instance("e(1 p + 1 q) >= e(p) + e(q)", Axiom::E6, AxSystem::Lp).is_ok());
        assert!(instance("e(p) <= e(p|q)", Axiom::E5, AxSystem::Bel).is_ok());
        assert!(matches!(
            instance("e(p|q) <= e(p)", Axiom::E5, AxSystem::Bel),
            Err(Reason::GambleInvalid { .. })
        ));
        assert!(instance("(e(p) >= e(q)) -> (e(p|q) = e(p))", Axiom::E11, AxSystem::Poss).is_ok());
        assert!(instance("e(1 true + 2 p) = 1 e(true) + 2 e(p)", Axiom::E10, AxSystem::Bel).is_ok());
        assert!(instance("e(p|q) >= e(p) + e(q) - e(p&q)", Axiom::E9, AxSystem::Bel).is_ok());
        assert!(matches!(
            instance("e(p|q) = e(p) + e(q) - e(p&q)", Axiom::E9, AxSystem::Bel),
            Err(Reason::SchemaMismatch { .. })
        ));
        assert!(matches!(
            instance("e(p) >= e(p) + e(q) - e(p&q)", Axiom::E9, AxSystem::Bel),
            Err(Reason::JoinMismatch { .. })
        ));
        assert!(matches!(
            instance("e(1 p + 2 q) = 1 e(p) + 2 e(q)", Axiom::E10, AxSystem::Bel),
            Err(Reason::ChainBroken { .. })
        ));
        assert!(instance("p|q = p + q", Axiom::G1, AxSystem::G).is_err());
        assert!(instance("p&q | p&!q = p&q + p&!q", Axiom::G1, AxSystem::G).is_ok());
        assert!(instance("p&q <= p", Axiom::G2, AxSystem::G).is_ok());
    }

    #[test]
    fn e9_round_trip() {
        let gs = [parse_gamble("1 p").unwrap(), parse_gamble("1 q").unwrap()];
        let f = Formula::Expectation(e9_instance(&gs).unwrap());
        let bound = is_axiom_instance(&f, Axiom::E9, AxSystem::Bel).unwrap();
        assert_eq!(bound["gamma2"], Bound::Gamble(gs[1].clone()));
        // the printed instance parses back to the same formula
        let text = f.to_string();
        assert!(instance(&text, Axiom::E9, AxSystem::Bel).is_ok());
    }

    fn proof(system: AxSystem, lines: &[(&str, &str)]) -> ProofVerdict {
        let d = Derivation {
            system,
            lines: lines
                .iter()
                .map(|(f, by)| Line {
                    text: f.to_string(),
                    by: by.parse().unwrap(),
                    bind: BTreeMap::new(),
                })
                .collect(),
        };
        check_proof(&d)
    }

    #[test]
    fn three_line_derivation() {
        let v = proof(
            AxSystem::Prob,
            &[
                ("e(1 p + 1 q) = e(p) + e(q)", "E1"),
                (
                    "(e(1 p + 1 q) = e(p) + e(q)) -> (e(1 p + 1 q) - e(p) - e(q) >= 0)",
                    "Ineq",
                ),
                ("e(1 p + 1 q) - e(p) - e(q) >= 0", "MP 1 2"),
            ],
        );
        assert_eq!(v, ProofVerdict::Accepted);
    }

    #[test]
    fn rejections() {
        let v = proof(AxSystem::Lp, &[("e(1 p + 1 q) = e(p) + e(q)", "E1")]);
        let ProofVerdict::Rejected { line: 1, reason } = v else { panic!("{v:?}") };
        assert_eq!(reason.to_string(), "E1 not in AX^lp");

        let v = proof(AxSystem::Prob, &[("e(p) >= 0 | e(q) >= 0", "Taut")]);
        assert!(matches!(v, ProofVerdict::Rejected { reason: Reason::NotTautology { .. }, .. }));

        let v = proof(AxSystem::Prob, &[("e(p) >= 1 -> e(p) >= 2", "Ineq")]);
        assert!(matches!(v, ProofVerdict::Rejected { reason: Reason::InvalidInequality { .. }, .. }));

        let v = proof(AxSystem::Prob, &[("e(true) = 1", "MP 1 2")]);
        assert!(matches!(v, ProofVerdict::Rejected { reason: Reason::BadReference { .. }, .. }));
    }

    #[test]
    fn gamble_ineq_needs_semantic_validity() {
        // linearly valid over real variables, false with two worlds
        let v = proof(AxSystem::G, &[("(p >= q) | (q >= p)", "Ineq")]);
        assert!(matches!(v, ProofVerdict::Rejected { reason: Reason::GambleInvalid { .. }, .. }));
        let v = proof(AxSystem::G, &[("p + q >= p", "Ineq")]);
        assert!(matches!(v, ProofVerdict::Rejected { reason: Reason::InvalidInequality { .. }, .. }));
        let v = proof(AxSystem::G, &[("p >= p", "Ineq")]);
        assert_eq!(v, ProofVerdict::Accepted);
    }

    #[test]
    fn bindings_are_checked() {
        let mut d = Derivation {
            system: AxSystem::Prob,
            lines: vec![Line {
                text: "e(2 p) = 2 e(p)".into(),
                by: Rule::Axiom(Axiom::E2),
                bind: BTreeMap::from([("a".to_string(), "2".to_string()), ("phi".to_string(), "p".to_string())]),
            }],
        };
        assert_eq!(check_proof(&d), ProofVerdict::Accepted);
        d.lines[0].bind.insert("a".into(), "3".into());
        assert!(matches!(check_proof(&d), ProofVerdict::Rejected { reason: Reason::BindingMismatch { .. }, .. }));
        d.lines[0].bind.remove("a");
        d.lines[0].bind.insert("zeta".into(), "1".into());
        assert!(matches!(check_proof(&d), ProofVerdict::Rejected { reason: Reason::MalformedBinding { .. }, .. }));
    }

    #[test]
    fn loads_documents() {
        let text = r#"{"system": "axprob", "lines": [{"formula": "e(true) = 1", "by": "E4"}]}"#;
        let d = load_proof(text, None).unwrap();
        assert_eq!(check_proof(&d), ProofVerdict::Accepted);
        assert!(load_proof(text, Some(AxSystem::Lp)).is_err());
        let text = r#"[{"formula": "e(true) = 1", "by": "E99"}]"#;
        assert!(matches!(load_proof(text, Some(AxSystem::Prob)), Err(ProofError::BadLine { line: 1, .. })));
    }
}
