//! Dl-program representation: rules over predicate literals and `DL[...]`
//! atoms, plus the shared update list lambda.
//!
//! Program predicates are the DL concept names with a lowercased initial
//! (`Male` becomes `male`), which keeps the two vocabularies disjoint. The
//! text format uses `-` for classical negation, `not` for negation as
//! failure, `:-` between head and body and `+` inside update lists.

use std::collections::BTreeSet;
use std::fmt;

use crate::kb::{ConceptExpr, ConceptName, DefeasibleAxiom, Individual, RoleExpr, RoleName};

/// A rule term: a variable or an individual constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(Individual),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c.as_str()),
        }
    }
}

/// A program predicate name (lowercase initial).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate(pub String);

impl Predicate {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Maps a concept name to its program predicate: `Male` to `male`.
pub fn predicate_for_concept(name: &ConceptName) -> Predicate {
    Predicate(lower_initial(name.as_str()))
}

/// Maps a role name to its binary program predicate.
pub fn predicate_for_role(name: &RoleName) -> Predicate {
    Predicate(lower_initial(name.as_str()))
}

/// Inverse of the case convention: `male` back to `Male`.
pub fn concept_for_predicate(p: &Predicate) -> ConceptName {
    ConceptName(upper_initial(p.as_str()))
}

fn lower_initial(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_ascii_lowercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

fn upper_initial(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

/// A possibly classically-negated atom `p(t1,...,tn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateLiteral {
    pub positive: bool,
    pub predicate: Predicate,
    pub terms: Vec<Term>,
}

impl PredicateLiteral {
    pub fn positive(predicate: Predicate, terms: Vec<Term>) -> Self {
        PredicateLiteral { positive: true, predicate, terms }
    }

    pub fn negative(predicate: Predicate, terms: Vec<Term>) -> Self {
        PredicateLiteral { positive: false, predicate, terms }
    }

    /// The classically complementary literal; `--f` never appears because the
    /// flag just flips.
    pub fn complement(&self) -> Self {
        PredicateLiteral { positive: !self.positive, ..self.clone() }
    }
}

impl fmt::Display for PredicateLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "-")?;
        }
        write!(f, "{}", self.predicate)?;
        if !self.terms.is_empty() {
            let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// One `S + p` entry of an update list: the extension of the DL side `S`
/// grows by the extension of the program predicate `p`. A negated entry
/// `-E + -e` feeds `-e`-literals into `!E`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpdateSpec {
    Concept { negated: bool, concept: ConceptExpr, predicate: Predicate },
    Role { role: RoleName, predicate: Predicate },
}

impl fmt::Display for UpdateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateSpec::Concept { negated, concept, predicate } => {
                let sign = if *negated { "-" } else { "" };
                write!(f, "{sign}{}", program_concept(concept))?;
                write!(f, " + {sign}{predicate}")
            }
            UpdateSpec::Role { role, predicate } => write!(f, "{role} + {predicate}"),
        }
    }
}

/// A query against the DL base.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DlQuery {
    Concept(ConceptExpr),
    Role(RoleExpr),
}

impl DlQuery {
    pub fn arity(&self) -> usize {
        match self {
            DlQuery::Concept(_) => 1,
            DlQuery::Role(_) => 2,
        }
    }
}

impl fmt::Display for DlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DlQuery::Concept(c) => f.write_str(&program_concept(c)),
            DlQuery::Role(r) => write!(f, "{r}"),
        }
    }
}

/// Concept rendering inside program text: `-` for a top-level negation and
/// `|` between disjuncts, matching the program-side negation syntax.
fn program_concept(c: &ConceptExpr) -> String {
    match c {
        ConceptExpr::Top => "TOP".to_string(),
        ConceptExpr::Bottom => "BOT".to_string(),
        ConceptExpr::Atom(n) => n.to_string(),
        ConceptExpr::Not(inner) => match inner.as_ref() {
            ConceptExpr::Atom(n) => format!("-{n}"),
            other => format!("-({other})"),
        },
        ConceptExpr::Or(cs) => {
            let parts: Vec<String> = cs.iter().map(program_concept).collect();
            parts.join(" | ")
        }
        other => other.to_string(),
    }
}

/// A `DL[updates; query](terms)` body atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DlAtom {
    pub updates: Vec<UpdateSpec>,
    pub query: DlQuery,
    pub terms: Vec<Term>,
}

impl DlAtom {
    pub fn new(updates: Vec<UpdateSpec>, query: DlQuery, terms: Vec<Term>) -> Self {
        debug_assert_eq!(query.arity(), terms.len());
        DlAtom { updates, query, terms }
    }
}

/// A rule body member: a plain literal or a dl-atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyElem {
    Literal(PredicateLiteral),
    Dl(DlAtom),
}

/// Where a compiled rule comes from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleOrigin {
    /// The default-application rule of a defeasible axiom.
    DefaultApplication(DefeasibleAxiom),
    /// The blocking companion deriving the negated consequent.
    DefaultBlocking(DefeasibleAxiom),
    /// The typicality assumption for an exceptional antecedent.
    TypicalityAssumption(ConceptExpr),
    Handwritten,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DlRule {
    pub head: PredicateLiteral,
    pub positive: Vec<BodyElem>,
    pub negative: Vec<BodyElem>,
    pub origin: RuleOrigin,
}

impl DlRule {
    pub fn fact(head: PredicateLiteral) -> Self {
        DlRule { head, positive: Vec::new(), negative: Vec::new(), origin: RuleOrigin::Handwritten }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        let visit_terms = |terms: &[Term], vars: &mut BTreeSet<String>| {
            for t in terms {
                if let Term::Var(v) = t {
                    vars.insert(v.clone());
                }
            }
        };
        visit_terms(&self.head.terms, &mut vars);
        for elem in self.positive.iter().chain(self.negative.iter()) {
            match elem {
                BodyElem::Literal(l) => visit_terms(&l.terms, &mut vars),
                BodyElem::Dl(a) => visit_terms(&a.terms, &mut vars),
            }
        }
        vars
    }
}

/// A dl-program: rules, the shared update list lambda, and the constants the
/// rules are grounded over (the individuals of the source knowledge base).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DlProgram {
    pub rules: Vec<DlRule>,
    pub lambda: Vec<UpdateSpec>,
    pub constants: BTreeSet<Individual>,
}

impl DlProgram {
    /// Every predicate occurring in a head, a body literal or an update list,
    /// with its arity.
    pub fn predicates(&self) -> BTreeSet<(Predicate, usize)> {
        let mut out = BTreeSet::new();
        let visit_updates = |updates: &[UpdateSpec], out: &mut BTreeSet<(Predicate, usize)>| {
            for u in updates {
                match u {
                    UpdateSpec::Concept { predicate, .. } => {
                        out.insert((predicate.clone(), 1));
                    }
                    UpdateSpec::Role { predicate, .. } => {
                        out.insert((predicate.clone(), 2));
                    }
                }
            }
        };
        for rule in &self.rules {
            out.insert((rule.head.predicate.clone(), rule.head.terms.len()));
            for elem in rule.positive.iter().chain(rule.negative.iter()) {
                match elem {
                    BodyElem::Literal(l) => {
                        out.insert((l.predicate.clone(), l.terms.len()));
                    }
                    BodyElem::Dl(a) => visit_updates(&a.updates, &mut out),
                }
            }
        }
        visit_updates(&self.lambda, &mut out);
        out
    }

    fn render_body_elem(&self, elem: &BodyElem) -> String {
        match elem {
            BodyElem::Literal(l) => l.to_string(),
            BodyElem::Dl(atom) => {
                let updates = if !atom.updates.is_empty() && atom.updates == self.lambda {
                    "lambda".to_string()
                } else {
                    let parts: Vec<String> = atom.updates.iter().map(|u| u.to_string()).collect();
                    parts.join(", ")
                };
                let terms: Vec<String> = atom.terms.iter().map(|t| t.to_string()).collect();
                format!("DL[{updates}; {}]({})", atom.query, terms.join(","))
            }
        }
    }

    pub fn render_rule(&self, rule: &DlRule) -> String {
        let mut parts: Vec<String> = rule.positive.iter().map(|e| self.render_body_elem(e)).collect();
        parts.extend(rule.negative.iter().map(|e| format!("not {}", self.render_body_elem(e))));
        if parts.is_empty() {
            format!("{}.", rule.head)
        } else {
            format!("{} :- {}.", rule.head, parts.join(", "))
        }
    }

    /// The full program text: a lambda header followed by one rule per line.
    pub fn to_text(&self) -> String {
        let lambda: Vec<String> = self.lambda.iter().map(|u| u.to_string()).collect();
        let mut out = format!("lambda = {{{}}}\n", lambda.join(", "));
        for rule in &self.rules {
            out.push_str(&self.render_rule(rule));
            out.push('\n');
        }
        out
    }
}
