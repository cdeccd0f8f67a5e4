//! `explogic` command line.
//!
//! Exit codes: 0 for SAT / valid / true / accepted, 1 for UNSAT /
//! countermodel / false / rejected, 2 for usage errors, bad input and
//! exhausted budgets.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use explogic::checker::{check, CheckResult};
use explogic::decide::{
    entailment_formula, infer_lower_bound, satisfiable, valid, Budget, DecideError, DecideStats,
    IntegerFormula, SatOutcome, Semantics, ValidOutcome,
};
use explogic::expectation::expectation;
use explogic::gamble::DEFAULT_ATOM_CAP;
use explogic::models::{load_structure, to_document, to_document_string, Kind, Structure, WeightMode};
use explogic::proof::{check_proof, load_proof, AxSystem, ProofVerdict};
use explogic::rational::parse_rational;
use explogic::syntax::{
    parse, parse_expectation, parse_gamble, parse_gamble_formula, parse_likelihood, BoolFormula,
    ExpectationFormula, Formula, Lang,
};
use explogic::translate::translate;

#[derive(Debug, Parser)]
#[command(name = "explogic", version, about = "Logic of expectation: evaluation, model checking, decision and proof checking")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Point,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LangArg {
    Prop,
    Gamble,
    Expectation,
    Likelihood,
    GambleIneq,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Largest number of propositions.
    #[arg(long, default_value_t = Budget::default().max_props)]
    max_props: usize,
    /// Largest number of distinct expectation terms.
    #[arg(long, default_value_t = Budget::default().max_terms)]
    max_terms: usize,
    /// Largest number of search branches.
    #[arg(long, default_value_t = Budget::default().max_branches)]
    max_branches: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_props: self.max_props,
            max_terms: self.max_terms,
            max_branches: self.max_branches,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a text and print its canonical form.
    Parse {
        #[arg(long, value_enum, default_value_t = LangArg::Expectation)]
        lang: LangArg,
        text: String,
    },
    /// Expectation of a gamble in a structure.
    Expect {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        gamble: String,
        /// Defaults to lower for credal structures and point otherwise.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Model-check a formula against a structure.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// Language of the formula; guessed when omitted.
        #[arg(long, value_enum)]
        lang: Option<LangArg>,
    },
    /// Decide satisfiability of an expectation or likelihood formula.
    Sat {
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide validity of an expectation or likelihood formula.
    Valid {
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Natural extension of accepted bounds over credal structures.
    Entail {
        /// An accepted basic expectation inequality; repeatable.
        #[arg(long = "assume")]
        assumptions: Vec<String>,
        /// The gamble to bound from below.
        #[arg(long)]
        target: String,
        /// Also decide whether the assumptions entail `e(target) >= BOUND`.
        #[arg(long)]
        bound: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Translate an expectation formula into a likelihood formula.
    Translate {
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        formula: String,
        #[arg(long, default_value_t = DEFAULT_ATOM_CAP)]
        atom_cap: usize,
    },
    /// Check a derivation.
    ProveCheck {
        /// One of axprob, axlp, axbel, axposs, axg; read from the file when omitted.
        #[arg(long, value_parser = parse_system)]
        system: Option<AxSystem>,
        file: PathBuf,
    },
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

fn parse_system(s: &str) -> Result<AxSystem, String> {
    s.parse()
}

/// A failure that ends the run with exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Output<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    /// Prints `human` or `json` depending on the format.
    fn emit(&mut self, human: &str, json: Value) -> Result<(), Failure> {
        match self.format {
            Format::Human => writeln!(self.out, "{human}")?,
            Format::Json => writeln!(self.out, "{}", serde_json::to_string_pretty(&json)?)?,
        }
        Ok(())
    }
}

/// Runs the command line `argv` (including the program name) and returns
/// the exit code.
pub fn run<S: Into<std::ffi::OsString> + Clone>(
    argv: impl IntoIterator<Item = S>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let mut o = Output {
        format: cli.format,
        out,
    };
    match dispatch(cli.command, &mut o) {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

fn dispatch(command: Command, o: &mut Output<'_>) -> Result<i32, Failure> {
    match command {
        Command::Parse { lang, text } => cmd_parse(lang, &text, o),
        Command::Expect {
            structure,
            gamble,
            mode,
        } => cmd_expect(&structure, &gamble, mode, o),
        Command::Check {
            structure,
            formula,
            lang,
        } => cmd_check(&structure, &formula, lang, o),
        Command::Sat {
            semantics,
            formula,
            budget,
        } => cmd_sat(semantics, &formula, &budget.budget(), o),
        Command::Valid {
            semantics,
            formula,
            budget,
        } => cmd_valid(semantics, &formula, &budget.budget(), o),
        Command::Entail {
            assumptions,
            target,
            bound,
            budget,
        } => cmd_entail(&assumptions, &target, bound.as_deref(), &budget.budget(), o),
        Command::Translate {
            semantics,
            formula,
            atom_cap,
        } => cmd_translate(semantics, &formula, atom_cap, o),
        Command::ProveCheck { system, file } => cmd_prove_check(system, &file, o),
    }
}

fn lang_of(l: LangArg) -> Lang {
    match l {
        LangArg::Prop => Lang::Prop,
        LangArg::Gamble => Lang::Gamble,
        LangArg::Expectation => Lang::Expectation,
        LangArg::Likelihood => Lang::Likelihood,
        LangArg::GambleIneq => Lang::GambleIneq,
    }
}

fn lang_name(l: Lang) -> &'static str {
    match l {
        Lang::Prop => "prop",
        Lang::Gamble => "gamble",
        Lang::Expectation => "expectation",
        Lang::Likelihood => "likelihood",
        Lang::GambleIneq => "gamble-ineq",
    }
}

fn cmd_parse(lang: LangArg, text: &str, o: &mut Output<'_>) -> Result<i32, Failure> {
    let f = parse(text, lang_of(lang))?;
    let printed = f.to_string();
    o.emit(&printed, json!({"lang": lang_name(f.lang()), "formula": printed}))?;
    Ok(0)
}

fn read_structure(path: &Path) -> Result<Structure, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    load_structure(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn default_mode(s: &Structure) -> WeightMode {
    match s.kind() {
        Kind::Credal => WeightMode::Lower,
        _ => WeightMode::Point,
    }
}

fn mode_name(m: WeightMode) -> &'static str {
    match m {
        WeightMode::Point => "point",
        WeightMode::Lower => "lower",
        WeightMode::Upper => "upper",
    }
}

fn cmd_expect(path: &Path, gamble: &str, mode: Option<Mode>, o: &mut Output<'_>) -> Result<i32, Failure> {
    let s = read_structure(path)?;
    let g = parse_gamble(gamble)?;
    let mode = match mode {
        None => default_mode(&s),
        Some(Mode::Point) => WeightMode::Point,
        Some(Mode::Lower) => WeightMode::Lower,
        Some(Mode::Upper) => WeightMode::Upper,
    };
    let value = expectation(&s, &g, mode)?;
    o.emit(
        &value.to_string(),
        json!({"gamble": g.to_string(), "mode": mode_name(mode), "value": value.to_string()}),
    )?;
    Ok(0)
}

/// Reads a formula, trying expectation, likelihood and gamble-inequality
/// syntax in turn.
fn parse_any(text: &str) -> Result<Formula, Failure> {
    let first = match parse_expectation(text) {
        Ok(f) => return Ok(Formula::Expectation(f)),
        Err(e) => e,
    };
    if let Ok(f) = parse_likelihood(text) {
        return Ok(Formula::Likelihood(f));
    }
    if let Ok(f) = parse_gamble_formula(text) {
        return Ok(Formula::GambleIneq(f));
    }
    Err(Failure(first.to_string()))
}

fn trace_json(r: &CheckResult) -> Value {
    Value::Array(
        r.trace
            .iter()
            .map(|t| {
                json!({
                    "inequality": t.inequality,
                    "lhs": t.lhs.to_string(),
                    "bound": t.bound.to_string(),
                    "holds": t.holds,
                })
            })
            .collect(),
    )
}

fn cmd_check(path: &Path, text: &str, lang: Option<LangArg>, o: &mut Output<'_>) -> Result<i32, Failure> {
    let s = read_structure(path)?;
    let f = match lang {
        Some(l) => parse(text, lang_of(l))?,
        None => parse_any(text)?,
    };
    let r = check(&s, &f)?;
    let mut human = String::from(if r.verdict { "true" } else { "false" });
    for t in &r.trace {
        human.push_str(&format!(
            "\n  [{}] {}    lhs = {}, bound = {}",
            if t.holds { "holds" } else { "fails" },
            t.inequality,
            t.lhs,
            t.bound
        ));
    }
    o.emit(
        &human,
        json!({"formula": f.to_string(), "verdict": r.verdict, "trace": trace_json(&r)}),
    )?;
    Ok(if r.verdict { 0 } else { 1 })
}

/// Expectation or likelihood text as an integer formula.
fn decision_input(text: &str) -> Result<IntegerFormula, Failure> {
    match parse_any(text)? {
        Formula::Expectation(f) => Ok(IntegerFormula::new(f)),
        Formula::Likelihood(f) => Ok(IntegerFormula::from_likelihood(&f)),
        other => Err(Failure(format!(
            "decision procedures take expectation or likelihood formulas, not {}",
            lang_name(other.lang())
        ))),
    }
}

fn stats_json(s: &DecideStats) -> Value {
    json!({"branches": s.branches, "lp_solves": s.lp_solves})
}

fn decide_failure(e: DecideError) -> Failure {
    Failure(e.to_string())
}

fn cmd_sat(sem: Semantics, text: &str, budget: &Budget, o: &mut Output<'_>) -> Result<i32, Failure> {
    let f = decision_input(text)?;
    let v = satisfiable(&f, sem, budget).map_err(decide_failure)?;
    match v.outcome {
        SatOutcome::Sat(cert) => {
            o.emit(
                &format!("SAT\n{}", to_document_string(&cert)),
                json!({"verdict": "SAT", "semantics": sem.name(), "certificate": to_document(&cert), "stats": stats_json(&v.stats)}),
            )?;
            Ok(0)
        }
        SatOutcome::Unsat => {
            o.emit(
                "UNSAT",
                json!({"verdict": "UNSAT", "semantics": sem.name(), "stats": stats_json(&v.stats)}),
            )?;
            Ok(1)
        }
    }
}

fn cmd_valid(sem: Semantics, text: &str, budget: &Budget, o: &mut Output<'_>) -> Result<i32, Failure> {
    let f = decision_input(text)?;
    let v = valid(&f, sem, budget).map_err(decide_failure)?;
    match v.outcome {
        ValidOutcome::Valid => {
            o.emit(
                "VALID",
                json!({"verdict": "VALID", "semantics": sem.name(), "stats": stats_json(&v.stats)}),
            )?;
            Ok(0)
        }
        ValidOutcome::Countermodel(m) => {
            o.emit(
                &format!("COUNTERMODEL\n{}", to_document_string(&m)),
                json!({"verdict": "COUNTERMODEL", "semantics": sem.name(), "countermodel": to_document(&m), "stats": stats_json(&v.stats)}),
            )?;
            Ok(1)
        }
    }
}

fn cmd_entail(
    assumptions: &[String],
    target: &str,
    bound: Option<&str>,
    budget: &Budget,
    o: &mut Output<'_>,
) -> Result<i32, Failure> {
    let mut ineqs = Vec::new();
    for text in assumptions {
        match parse_expectation(text)? {
            BoolFormula::Atom(i) => ineqs.push(i),
            _ => {
                return Err(Failure(format!(
                    "assumption `{text}` must be a single inequality written with >= or <="
                )))
            }
        }
    }
    let target = parse_gamble(target)?;
    let extension = match infer_lower_bound(&ineqs, &target, budget) {
        Ok(x) => Some(x),
        Err(DecideError::Inconsistent) => None,
        Err(e) => return Err(decide_failure(e)),
    };
    let Some(extension) = extension else {
        o.emit(
            "INCONSISTENT\nthe assumptions have no credal model and entail every bound",
            json!({"verdict": "INCONSISTENT"}),
        )?;
        return Ok(0);
    };
    let mut human = format!("lower bound: {}", extension.bound);
    let mut doc = json!({
        "target": target.to_string(),
        "bound": extension.bound.to_string(),
        "certificate": to_document(&extension.certificate),
    });
    let mut code = 0;
    if let Some(b) = bound {
        let b = parse_rational(b)?;
        let f = IntegerFormula::new(entailment_formula(&ineqs, &target, &b, false));
        let entailed = match valid(&f, Semantics::Lp, budget).map_err(decide_failure)?.outcome {
            ValidOutcome::Valid => true,
            ValidOutcome::Countermodel(m) => {
                doc["countermodel"] = to_document(&m);
                false
            }
        };
        human.push_str(&format!(
            "\n{}: e({}) >= {}",
            if entailed { "ENTAILED" } else { "NOT ENTAILED" },
            target,
            b
        ));
        doc["query"] = Value::String(b.to_string());
        doc["entailed"] = Value::Bool(entailed);
        code = if entailed { 0 } else { 1 };
    }
    human.push_str(&format!("\nattained in\n{}", to_document_string(&extension.certificate)));
    o.emit(&human, doc)?;
    Ok(code)
}

fn cmd_translate(sem: Semantics, text: &str, atom_cap: usize, o: &mut Output<'_>) -> Result<i32, Failure> {
    let f: ExpectationFormula = parse_expectation(text)?;
    let report = translate(&f, sem, atom_cap)?;
    let printed = report.output.to_string();
    o.emit(
        &printed,
        json!({
            "semantics": sem.name(),
            "output": printed,
            "input_size": report.input_size,
            "output_size": report.output_size,
            "blowup": report.blowup().to_string(),
        }),
    )?;
    Ok(0)
}

fn cmd_prove_check(system: Option<AxSystem>, path: &Path, o: &mut Output<'_>) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let d = load_proof(&text, system).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    match check_proof(&d) {
        ProofVerdict::Accepted => {
            o.emit(
                &format!("ACCEPTED ({} lines, {})", d.lines.len(), d.system),
                json!({"verdict": "ACCEPTED", "system": d.system.id(), "lines": d.lines.len()}),
            )?;
            Ok(0)
        }
        ProofVerdict::Rejected { line, reason } => {
            o.emit(
                &format!("REJECTED line {line}: {reason}"),
                json!({"verdict": "REJECTED", "system": d.system.id(), "line": line, "code": reason.code(), "reason": reason.to_string()}),
            )?;
            Ok(1)
        }
    }
}
