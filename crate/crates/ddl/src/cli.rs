//! Command execution behind the `ddl` binary.
//!
//! Each command returns its exit code together with the rendered report, so
//! tests can drive commands without spawning processes. Exit codes: 0 for
//! success (or a `yes` answer), 1 for a `no` answer or failed property run,
//! 2 for usage, parse or oracle errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use serde_json::{json, Value};

use crate::compiler::compile;
use crate::engine::{
    consequence, strong_answer_sets, EngineError, Evaluator, GroundLiteral, Interpretation, Mode,
};
use crate::kb::{parse_kb, ConceptExpr, KnowledgeBase, ParseError};
use crate::postulates::{check_postulates, HarnessReport};
use crate::program::{DlProgram, Predicate, UpdateSpec};
use crate::ranking::{compute_ranking, rational_closure_entails_ranked, RankedKb};
use crate::tableau::{ExternalOracle, Oracle, DEFAULT_TIMEOUT};

pub const ORACLE_ENV_VAR: &str = "DDL_ORACLE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Shared command configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub oracle_command: Option<String>,
    pub timeout_secs: u64,
    pub seed: u64,
    pub cases: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            output: None,
            format: OutputFormat::Text,
            oracle_command: None,
            timeout_secs: DEFAULT_TIMEOUT.as_secs(),
            seed: 1,
            cases: 100,
        }
    }
}

/// A finished command: exit status plus the report in both renderings.
#[derive(Debug)]
pub struct CmdOutput {
    pub exit_code: i32,
    pub text: String,
    pub json: Value,
}

impl CmdOutput {
    pub fn rendered(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.text.clone(),
            OutputFormat::Json => format!("{:#}\n", self.json),
        }
    }

    fn error(message: String) -> Self {
        CmdOutput {
            exit_code: 2,
            text: format!("error: {message}\n"),
            json: json!({ "error": message }),
        }
    }
}

fn build_oracle(cfg: &RunConfig) -> Oracle {
    let command = cfg
        .oracle_command
        .clone()
        .or_else(|| std::env::var(ORACLE_ENV_VAR).ok().filter(|s| !s.is_empty()));
    match command {
        Some(cmd) => {
            Oracle::with_external(ExternalOracle::new(cmd, Duration::from_secs(cfg.timeout_secs)))
        }
        None => Oracle::internal(),
    }
}

fn load_kb(cfg: &RunConfig) -> Result<KnowledgeBase, CmdOutput> {
    let path = cfg.input.as_ref().ok_or_else(|| CmdOutput::error("no input file".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdOutput::error(format!("cannot read {}: {e}", path.display())))?;
    let kb = parse_kb(&text).map_err(|e| CmdOutput::error(format!("{}: {e}", path.display())))?;
    Ok(kb)
}

fn validated(cfg: &RunConfig) -> Result<(), CmdOutput> {
    if cfg.timeout_secs == 0 {
        return Err(CmdOutput::error("timeout must be positive".into()));
    }
    if cfg.cases == 0 {
        return Err(CmdOutput::error("case count must be at least 1".into()));
    }
    Ok(())
}

fn ranked(cfg: &RunConfig, oracle: &Oracle) -> Result<(KnowledgeBase, RankedKb), CmdOutput> {
    let kb = load_kb(cfg)?;
    let rkb = compute_ranking(oracle, &kb).map_err(|e| CmdOutput::error(e.to_string()))?;
    Ok((kb, rkb))
}

/// `ddl rank FILE`: each defeasible axiom with its rank, the axioms promoted
/// to strict ones, and the sizes of the exceptionality sequence.
pub fn cmd_rank(cfg: &RunConfig) -> CmdOutput {
    if let Err(e) = validated(cfg) {
        return e;
    }
    let oracle = build_oracle(cfg);
    let (kb, rkb) = match ranked(cfg, &oracle) {
        Ok(r) => r,
        Err(e) => return e,
    };
    let promoted: Vec<String> = rkb
        .tbox_star
        .difference(&kb.tbox)
        .map(|ax| ax.to_string())
        .collect();
    let sizes: Vec<usize> = rkb.exceptionality_seq.iter().map(|s| s.len()).collect();

    let mut by_rank: Vec<(&crate::kb::DefeasibleAxiom, &usize)> = rkb.rank.iter().collect();
    by_rank.sort_by_key(|(axiom, rank)| (**rank, axiom.to_string()));

    let mut text = String::new();
    if rkb.rank.is_empty() && promoted.is_empty() {
        text.push_str("no defeasible axioms\n");
    }
    for (axiom, rank) in &by_rank {
        let _ = writeln!(text, "rank {rank}: {axiom}");
    }
    for ax in &promoted {
        let _ = writeln!(text, "strict (infinite rank): {ax}");
    }
    let _ = writeln!(text, "exceptionality sequence sizes: {sizes:?}");

    let json = json!({
        "ranks": by_rank.iter().map(|(axiom, rank)| json!({
            "antecedent": axiom.antecedent.to_string(),
            "consequent": axiom.consequent.to_string(),
            "rank": rank,
        })).collect::<Vec<_>>(),
        "promoted": promoted,
        "sequence_sizes": sizes,
    });
    CmdOutput { exit_code: 0, text, json }
}

fn lambda_json(lambda: &[UpdateSpec]) -> Vec<Value> {
    lambda
        .iter()
        .map(|u| match u {
            UpdateSpec::Concept { negated, concept, predicate } => json!({
                "concept": concept.to_string(),
                "negated": negated,
                "predicate": predicate.as_str(),
            }),
            UpdateSpec::Role { role, predicate } => json!({
                "role": role.to_string(),
                "predicate": predicate.as_str(),
            }),
        })
        .collect()
}

/// `ddl compile FILE [-o OUT]`: the compiled dl-program in its text format.
pub fn cmd_compile(cfg: &RunConfig) -> CmdOutput {
    if let Err(e) = validated(cfg) {
        return e;
    }
    let oracle = build_oracle(cfg);
    let (_, rkb) = match ranked(cfg, &oracle) {
        Ok(r) => r,
        Err(e) => return e,
    };
    let program = match compile(&rkb) {
        Ok(p) => p,
        Err(e) => return CmdOutput::error(e.to_string()),
    };
    let mut text = program.to_text();
    if let Some(path) = &cfg.output {
        if let Err(e) = std::fs::write(path, &text) {
            return CmdOutput::error(format!("cannot write {}: {e}", path.display()));
        }
        text = format!("wrote {} rules to {}\n", program.rules.len(), path.display());
    }
    let json = json!({
        "lambda": lambda_json(&program.lambda),
        "rules": program.rules.iter().map(|r| program.render_rule(r)).collect::<Vec<_>>(),
    });
    CmdOutput { exit_code: 0, text, json }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    All,
    Cautious,
    Brave,
}

fn literal_json(lit: &GroundLiteral) -> Value {
    json!({
        "predicate": lit.predicate.as_str(),
        "args": lit.args.iter().map(|a| a.as_str()).collect::<Vec<_>>(),
        "positive": lit.positive,
    })
}

fn interpretation_json(i: &Interpretation) -> Value {
    Value::Array(i.iter().map(literal_json).collect())
}

/// Parses a ground literal such as `-f(a)` or `c(a,b)`.
pub fn parse_ground_literal(text: &str) -> Result<GroundLiteral, String> {
    let text = text.trim();
    let (positive, rest) = match text.strip_prefix('-') {
        Some(rest) => (false, rest),
        None => (true, text),
    };
    let is_word = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    let (name, args) = match rest.find('(') {
        Some(open) => {
            let inner = rest[open..]
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| format!("malformed literal: {text}"))?;
            let args: Vec<&str> = inner.split(',').map(|s| s.trim()).collect();
            if args.iter().any(|a| !is_word(a)) {
                return Err(format!("malformed literal: {text}"));
            }
            (&rest[..open], args)
        }
        None => (rest, Vec::new()),
    };
    if !is_word(name) {
        return Err(format!("malformed literal: {text}"));
    }
    Ok(GroundLiteral {
        predicate: Predicate(name.to_string()),
        args: args.into_iter().map(crate::kb::Individual::from).collect(),
        positive,
    })
}

fn solve_pipeline(cfg: &RunConfig, oracle: &Oracle) -> Result<(RankedKb, DlProgram), CmdOutput> {
    let (_, rkb) = ranked(cfg, oracle)?;
    let program = compile(&rkb).map_err(|e| CmdOutput::error(e.to_string()))?;
    Ok((rkb, program))
}

/// `ddl solve FILE [--query LIT] [--mode all|cautious|brave]`.
pub fn cmd_solve(cfg: &RunConfig, query: Option<&str>, mode: SolveMode) -> CmdOutput {
    if let Err(e) = validated(cfg) {
        return e;
    }
    let oracle = build_oracle(cfg);
    let (rkb, program) = match solve_pipeline(cfg, &oracle) {
        Ok(x) => x,
        Err(e) => return e,
    };
    let classical = rkb.classical_kb();
    let ev = Evaluator::new(&oracle, &classical);

    match (query, mode) {
        (None, _) => {
            let sets = match strong_answer_sets(&ev, &program) {
                Ok(s) => s,
                Err(e) => return CmdOutput::error(e.to_string()),
            };
            let mut text = String::new();
            for s in &sets {
                let _ = writeln!(text, "{s}");
            }
            if sets.is_empty() {
                text.push_str("no strong answer sets\n");
            }
            let json = json!({
                "answer_sets": sets.iter().map(interpretation_json).collect::<Vec<_>>(),
            });
            CmdOutput { exit_code: 0, text, json }
        }
        (Some(query), mode) => {
            let literal = match parse_ground_literal(query) {
                Ok(l) => l,
                Err(e) => return CmdOutput::error(e),
            };
            let engine_mode = match mode {
                SolveMode::Brave => Mode::Brave,
                // a bare `--query` defaults to the sceptical reading
                SolveMode::Cautious | SolveMode::All => Mode::Cautious,
            };
            match consequence(&ev, &program, &literal, engine_mode) {
                Ok(answer) => {
                    let text = format!("{}\n", if answer { "yes" } else { "no" });
                    let json = json!({
                        "query": literal.to_string(),
                        "mode": match engine_mode { Mode::Cautious => "cautious", Mode::Brave => "brave" },
                        "answer": answer,
                    });
                    CmdOutput { exit_code: if answer { 0 } else { 1 }, text, json }
                }
                Err(EngineError::NoAnswerSets) => {
                    CmdOutput::error("the program has no strong answer sets".into())
                }
                Err(e) => CmdOutput::error(e.to_string()),
            }
        }
    }
}

/// Parses an entailment query: `C ~[= D` (defeasible) or `C [= D` (strict).
/// Query sides may be arbitrary concepts; rational closure is closed under
/// them even though stored defeasible axioms are restricted to atoms. A `-`
/// in front of a name negates it, as in the program syntax, alongside `!`.
pub fn parse_entail_query(text: &str) -> Result<(ConceptExpr, ConceptExpr, bool), ParseError> {
    let defeasible = text.contains("~[=");
    // piggyback on the tbox statement grammar, which admits any concepts
    let normalized = dashes_to_bangs(&text.replacen("~[=", "[=", 1));
    let mut kb = KnowledgeBase::new();
    // stash every identifier as declared so the name check passes; the
    // caller re-checks names against the real knowledge base
    for word in normalized.split(|c: char| !c.is_ascii_alphanumeric() && c != '_') {
        if ["TOP", "BOT", "U", "exists", "forall", "self", "o"].contains(&word) {
            continue;
        }
        if word.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            kb.declare_concepts([word]);
            kb.declare_roles([word]);
        } else if word.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
            kb.declare_individuals([word]);
        }
    }
    let decls = crate::kb::serialize_kb(&kb);
    let parsed = parse_kb(&format!("{decls}tbox: {normalized}.\n"))?;
    match parsed.tbox.into_iter().next().expect("one tbox axiom") {
        crate::kb::Axiom::ConceptInclusion { lhs, rhs }
        | crate::kb::Axiom::ConceptEquality { lhs, rhs } => Ok((lhs, rhs, defeasible)),
        _ => unreachable!("tbox lines parse to concept axioms"),
    }
}

/// Rewrites prefix `-` negation into the KB grammar's `!`, leaving the
/// postfix role-inverse dash of forms like `R-` alone.
fn dashes_to_bangs(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        let prev_is_word = i > 0 && (chars[i - 1].is_ascii_alphanumeric() || chars[i - 1] == '_');
        let next_starts_concept = chars.get(i + 1).is_some_and(|n| n.is_ascii_uppercase() || *n == '(');
        if c == '-' && !prev_is_word && next_starts_concept {
            out.push('!');
        } else {
            out.push(c);
        }
    }
    out
}

/// `ddl entail FILE --query "C ~[= D"`: defeasible queries via rational
/// closure, strict ones via the classical oracle over the ranked base.
pub fn cmd_entail(cfg: &RunConfig, query: &str) -> CmdOutput {
    if let Err(e) = validated(cfg) {
        return e;
    }
    let oracle = build_oracle(cfg);
    let kb = match load_kb(cfg) {
        Ok(kb) => kb,
        Err(e) => return e,
    };
    let (lhs, rhs, defeasible) = match parse_entail_query(query) {
        Ok(q) => q,
        Err(e) => return CmdOutput::error(format!("query: {e}")),
    };
    for side in [&lhs, &rhs] {
        if let Err(msg) = kb.check_concept_names(side) {
            return CmdOutput::error(format!("query: {msg}"));
        }
    }
    let rkb = match compute_ranking(&oracle, &kb) {
        Ok(r) => r,
        Err(e) => return CmdOutput::error(e.to_string()),
    };
    let answer = if defeasible {
        rational_closure_entails_ranked(&oracle, &rkb, &lhs, &rhs)
    } else {
        oracle.entails(&rkb.tbox_star, &rkb.rbox, &lhs, &rhs)
    };
    match answer {
        Ok(answer) => {
            let text = format!("{}\n", if answer { "yes" } else { "no" });
            let json = json!({
                "query": format!("{lhs} {} {rhs}", if defeasible { "~[=" } else { "[=" }),
                "defeasible": defeasible,
                "answer": answer,
            });
            CmdOutput { exit_code: if answer { 0 } else { 1 }, text, json }
        }
        Err(e) => CmdOutput::error(e.to_string()),
    }
}

/// `ddl check-postulates [--seed N] [--cases M]`: both postulate suites over
/// generated knowledge bases; failing cases are written out for replay.
pub fn cmd_check_postulates(cfg: &RunConfig) -> CmdOutput {
    if let Err(e) = validated(cfg) {
        return e;
    }
    let oracle = build_oracle(cfg);
    let report = match check_postulates(&oracle, cfg.seed, cfg.cases) {
        Ok(r) => r,
        Err(e) => return CmdOutput::error(e.to_string()),
    };
    let text = render_postulate_report(cfg, &report);
    let json = json!({
        "seed": cfg.seed,
        "cases": report.cases,
        "rational": report.rational.iter().map(|(name, c)| json!({
            "postulate": name, "checks": c.checks, "failures": c.failures,
        })).collect::<Vec<_>>(),
        "answer_set": report.answer_set.iter().map(|(name, c)| json!({
            "postulate": name, "checks": c.checks, "failures": c.failures,
        })).collect::<Vec<_>>(),
        "discarded": report.discarded,
        "failures": report.failures.iter().map(|f| json!({
            "postulate": f.postulate,
            "case": f.case_index,
            "detail": f.detail,
        })).collect::<Vec<_>>(),
    });
    let exit_code = if report.total_failures() == 0 { 0 } else { 1 };
    CmdOutput { exit_code, text, json }
}

fn render_postulate_report(cfg: &RunConfig, report: &HarnessReport) -> String {
    let mut text = format!("seed {}, {} cases\n", cfg.seed, report.cases);
    for (name, c) in report.rational.iter().chain(report.answer_set.iter()) {
        let _ = writeln!(text, "{name}: {} checks, {} failures", c.checks, c.failures);
    }
    let _ = writeln!(text, "discarded shared-answer-set combinations: {}", report.discarded);
    for f in &report.failures {
        let file = format!("postulate-failure-{}-case{}.kb", f.postulate.to_lowercase(), f.case_index);
        let _ = std::fs::write(&file, &f.kb_text);
        let _ = writeln!(text, "FAIL {} (case {}): {} [replay: {file}]", f.postulate, f.case_index, f.detail);
    }
    if report.total_failures() == 0 {
        text.push_str("all postulates hold\n");
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_literal_parsing() {
        let l = parse_ground_literal("-f(a)").unwrap();
        assert_eq!(l.to_string(), "-f(a)");
        let l = parse_ground_literal("prey(a, b)").unwrap();
        assert_eq!(l.to_string(), "prey(a,b)");
        let l = parse_ground_literal("p").unwrap();
        assert_eq!(l.to_string(), "p");
        assert!(parse_ground_literal("f(").is_err());
        assert!(parse_ground_literal("-").is_err());
        assert!(parse_ground_literal("f(a)(b)").is_err());
        assert!(parse_ground_literal("f(a))").is_err());
    }

    #[test]
    fn entail_query_parsing() {
        let (lhs, rhs, defeasible) = parse_entail_query("Cat ~[= !Tiger").unwrap();
        assert_eq!(lhs, ConceptExpr::atom("Cat"));
        assert_eq!(rhs, ConceptExpr::not(ConceptExpr::atom("Tiger")));
        assert!(defeasible);
        let (_, _, defeasible) = parse_entail_query("Cat [= Feline").unwrap();
        assert!(!defeasible);
        let (lhs, _, _) = parse_entail_query("Feline & Big ~[= !Docile").unwrap();
        assert_eq!(
            lhs,
            ConceptExpr::and(vec![ConceptExpr::atom("Feline"), ConceptExpr::atom("Big")])
        );
    }

    #[test]
    fn entail_query_accepts_dash_negation() {
        let (_, rhs, _) = parse_entail_query("Cat ~[= -Tiger").unwrap();
        assert_eq!(rhs, ConceptExpr::not(ConceptExpr::atom("Tiger")));
        // the role-inverse dash survives the rewrite
        let (lhs, _, _) = parse_entail_query("exists R- . Cat [= Cat").unwrap();
        assert_eq!(
            lhs,
            ConceptExpr::exists(
                crate::kb::RoleExpr::Inverse(crate::kb::RoleName::from("R")),
                ConceptExpr::atom("Cat")
            )
        );
    }
}
