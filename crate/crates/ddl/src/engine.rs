//! Evaluation of dl-programs: grounding, satisfaction of dl-atoms under
//! update lists, the Gelfond-Lifschitz and strong dl-transforms, least
//! models, strong answer-set enumeration, and consequence relations.
//!
//! The answer-set search collects the ground NAF conditions (literals and
//! dl-atoms under `not`), assigns them truth values depth-first, and checks
//! each resulting reduct's least model for stability. Because every class of
//! condition is monotone in the interpretation, least models of the two
//! extreme reducts of a partial assignment bound every candidate below, which
//! prunes and propagates most branches away; the final stability check alone
//! decides membership, so pruning never changes the result.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::kb::{Assertion, ConceptExpr, Individual, KnowledgeBase};
use crate::program::{
    concept_for_predicate, BodyElem, DlProgram, DlQuery, DlRule, Predicate, Term,
    UpdateSpec,
};
use crate::tableau::{Oracle, OracleError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot ground a rule with variables over an empty universe")]
    EmptyUniverse,
    #[error("the Gelfond-Lifschitz path handles normal programs only; found a dl-atom")]
    DlAtomInNormalProgram,
    #[error("the program has no strong answer sets")]
    NoAnswerSets,
    #[error("literal has no update-list or concept counterpart: {0}")]
    NoUpdateCounterpart(GroundLiteral),
    #[error("interpretation is not a strong answer set of the program")]
    NotAnAnswerSet,
    #[error("too many NAF conditions to search ({0})")]
    SearchSpace(usize),
}

/// A ground literal `p(c1,...,cn)` or its classical negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub predicate: Predicate,
    pub args: Vec<Individual>,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn pos(predicate: &str, args: &[&str]) -> Self {
        GroundLiteral {
            predicate: Predicate(predicate.to_string()),
            args: args.iter().map(|a| Individual::from(*a)).collect(),
            positive: true,
        }
    }

    pub fn neg(predicate: &str, args: &[&str]) -> Self {
        GroundLiteral { positive: false, ..Self::pos(predicate, args) }
    }

    pub fn complement(&self) -> Self {
        GroundLiteral { positive: !self.positive, ..self.clone() }
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "-")?;
        }
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            let parts: Vec<&str> = self.args.iter().map(|a| a.as_str()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// A consistent set of ground literals.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interpretation(pub BTreeSet<GroundLiteral>);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_literals<I: IntoIterator<Item = GroundLiteral>>(lits: I) -> Self {
        Interpretation(lits.into_iter().collect())
    }

    pub fn contains(&self, lit: &GroundLiteral) -> bool {
        self.0.contains(lit)
    }

    pub fn is_consistent(&self) -> bool {
        self.0.iter().all(|l| !self.0.contains(&l.complement()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundLiteral> {
        self.0.iter()
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A ground `DL[updates; query](args)` atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundDlAtom {
    pub updates: Vec<UpdateSpec>,
    pub query: DlQuery,
    pub args: Vec<Individual>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundBodyElem {
    Literal(GroundLiteral),
    Dl(GroundDlAtom),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: GroundLiteral,
    pub positive: Vec<GroundBodyElem>,
    pub negative: Vec<GroundBodyElem>,
}

/// A variable-free program together with its Herbrand universe and base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub universe: BTreeSet<Individual>,
    pub herbrand_base: BTreeSet<GroundLiteral>,
}

fn substitute(term: &Term, binding: &BTreeMap<String, Individual>) -> Individual {
    match term {
        Term::Const(c) => c.clone(),
        Term::Var(v) => binding[v].clone(),
    }
}

fn ground_body_elem(elem: &BodyElem, binding: &BTreeMap<String, Individual>) -> GroundBodyElem {
    match elem {
        BodyElem::Literal(l) => GroundBodyElem::Literal(GroundLiteral {
            predicate: l.predicate.clone(),
            args: l.terms.iter().map(|t| substitute(t, binding)).collect(),
            positive: l.positive,
        }),
        BodyElem::Dl(a) => GroundBodyElem::Dl(GroundDlAtom {
            updates: a.updates.clone(),
            query: a.query.clone(),
            args: a.terms.iter().map(|t| substitute(t, binding)).collect(),
        }),
    }
}

/// Instantiates every rule with every combination of constants and closes the
/// Herbrand base under classical negation.
pub fn ground(program: &DlProgram) -> Result<GroundProgram, EngineError> {
    let mut universe = program.constants.clone();
    for rule in &program.rules {
        let mut visit = |terms: &[Term]| {
            for t in terms {
                if let Term::Const(c) = t {
                    universe.insert(c.clone());
                }
            }
        };
        visit(&rule.head.terms);
        for elem in rule.positive.iter().chain(rule.negative.iter()) {
            match elem {
                BodyElem::Literal(l) => visit(&l.terms),
                BodyElem::Dl(a) => visit(&a.terms),
            }
        }
    }

    let mut rules = Vec::new();
    for rule in &program.rules {
        let vars: Vec<String> = rule.variables().into_iter().collect();
        if vars.is_empty() {
            rules.push(instantiate(rule, &BTreeMap::new()));
            continue;
        }
        if universe.is_empty() {
            return Err(EngineError::EmptyUniverse);
        }
        let mut bindings = vec![BTreeMap::new()];
        for v in &vars {
            let mut next = Vec::new();
            for b in &bindings {
                for c in &universe {
                    let mut b2: BTreeMap<String, Individual> = b.clone();
                    b2.insert(v.clone(), c.clone());
                    next.push(b2);
                }
            }
            bindings = next;
        }
        for b in &bindings {
            rules.push(instantiate(rule, b));
        }
    }

    let mut herbrand_base = BTreeSet::new();
    for (predicate, arity) in program.predicates() {
        for args in tuples(&universe, arity) {
            for positive in [true, false] {
                herbrand_base.insert(GroundLiteral {
                    predicate: predicate.clone(),
                    args: args.clone(),
                    positive,
                });
            }
        }
    }

    Ok(GroundProgram { rules, universe, herbrand_base })
}

fn instantiate(rule: &DlRule, binding: &BTreeMap<String, Individual>) -> GroundRule {
    GroundRule {
        head: GroundLiteral {
            predicate: rule.head.predicate.clone(),
            args: rule.head.terms.iter().map(|t| substitute(t, binding)).collect(),
            positive: rule.head.positive,
        },
        positive: rule.positive.iter().map(|e| ground_body_elem(e, binding)).collect(),
        negative: rule.negative.iter().map(|e| ground_body_elem(e, binding)).collect(),
    }
}

fn tuples(universe: &BTreeSet<Individual>, arity: usize) -> Vec<Vec<Individual>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &out {
            for c in universe {
                let mut t2 = t.clone();
                t2.push(c.clone());
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Evaluates dl-atoms against a DL base, memoizing on the part of the
/// interpretation the atom's update list can see.
pub struct Evaluator<'a> {
    pub oracle: &'a Oracle,
    pub kb: &'a KnowledgeBase,
    memo: Mutex<HashMap<(Vec<GroundLiteral>, GroundDlAtom), bool>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(oracle: &'a Oracle, kb: &'a KnowledgeBase) -> Self {
        Evaluator { oracle, kb, memo: Mutex::new(HashMap::new()) }
    }

    /// `I ⊨_L DL[updates; Q](args)`: the base augmented with the update-fed
    /// membership axioms entails the query.
    pub fn eval_dl_atom(&self, interp: &Interpretation, atom: &GroundDlAtom) -> Result<bool, EngineError> {
        let relevant: BTreeSet<&Predicate> = atom
            .updates
            .iter()
            .map(|u| match u {
                UpdateSpec::Concept { predicate, .. } => predicate,
                UpdateSpec::Role { predicate, .. } => predicate,
            })
            .collect();
        let restricted: Vec<GroundLiteral> = interp
            .iter()
            .filter(|l| relevant.contains(&l.predicate))
            .cloned()
            .collect();
        let key = (restricted, atom.clone());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(*v);
        }

        let mut tbox = self.kb.tbox.clone();
        for update in &atom.updates {
            match update {
                UpdateSpec::Concept { negated, concept, predicate } => {
                    let side = if *negated {
                        ConceptExpr::not(concept.clone()).nnf()
                    } else {
                        concept.clone()
                    };
                    for lit in interp.iter() {
                        if lit.predicate == *predicate && lit.positive != *negated && lit.args.len() == 1 {
                            tbox.insert(
                                crate::kb::abox_to_tbox(&Assertion::Concept(lit.args[0].clone(), side.clone()))
                                    .expect("concept assertions always rewrite"),
                            );
                        }
                    }
                }
                UpdateSpec::Role { role, predicate } => {
                    for lit in interp.iter() {
                        if lit.predicate == *predicate && lit.positive && lit.args.len() == 2 {
                            tbox.insert(
                                crate::kb::abox_to_tbox(&Assertion::Role(
                                    lit.args[0].clone(),
                                    role.clone(),
                                    lit.args[1].clone(),
                                ))
                                .expect("role assertions over named roles rewrite"),
                            );
                        }
                    }
                }
            }
        }

        let answer = match &atom.query {
            DlQuery::Concept(c) => {
                let subject = ConceptExpr::Nominals(vec![atom.args[0].clone()]);
                self.oracle.entails(&tbox, &self.kb.rbox, &subject, c)?
            }
            DlQuery::Role(r) => {
                let subject = ConceptExpr::Nominals(vec![atom.args[0].clone()]);
                let target = ConceptExpr::exists(
                    r.clone(),
                    ConceptExpr::Nominals(vec![atom.args[1].clone()]),
                );
                self.oracle.entails(&tbox, &self.kb.rbox, &subject, &target)?
            }
        };
        self.memo.lock().unwrap().insert(key, answer);
        Ok(answer)
    }

    /// `I ⊨_L l` for a body element: literal membership or dl-atom truth.
    pub fn holds(&self, interp: &Interpretation, elem: &GroundBodyElem) -> Result<bool, EngineError> {
        match elem {
            GroundBodyElem::Literal(l) => Ok(interp.contains(l)),
            GroundBodyElem::Dl(a) => self.eval_dl_atom(interp, a),
        }
    }
}

/// The Gelfond-Lifschitz transformation for plain normal programs: drop every
/// rule whose negative body meets `interp`, then strip negative bodies.
pub fn gelfond_lifschitz(gp: &GroundProgram, interp: &Interpretation) -> Result<GroundProgram, EngineError> {
    let has_dl = gp.rules.iter().any(|r| {
        r.positive.iter().chain(r.negative.iter()).any(|e| matches!(e, GroundBodyElem::Dl(_)))
    });
    if has_dl {
        return Err(EngineError::DlAtomInNormalProgram);
    }
    let rules = gp
        .rules
        .iter()
        .filter(|r| {
            !r.negative.iter().any(|e| match e {
                GroundBodyElem::Literal(l) => interp.contains(l),
                GroundBodyElem::Dl(_) => unreachable!(),
            })
        })
        .map(|r| GroundRule { negative: Vec::new(), ..r.clone() })
        .collect();
    Ok(GroundProgram { rules, universe: gp.universe.clone(), herbrand_base: gp.herbrand_base.clone() })
}

/// The strong dl-transform: drop every rule with a negative body member
/// satisfied under `⊨_L` w.r.t. `interp`, then strip negative bodies.
pub fn strong_dl_transform(
    ev: &Evaluator,
    gp: &GroundProgram,
    interp: &Interpretation,
) -> Result<GroundProgram, EngineError> {
    let mut rules = Vec::new();
    'rules: for rule in &gp.rules {
        for elem in &rule.negative {
            if ev.holds(interp, elem)? {
                continue 'rules;
            }
        }
        rules.push(GroundRule { negative: Vec::new(), ..rule.clone() });
    }
    Ok(GroundProgram { rules, universe: gp.universe.clone(), herbrand_base: gp.herbrand_base.clone() })
}

/// Result of a least-model computation: positive programs have a least model
/// unless the fixpoint derives both a literal and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeastModel {
    Model(Interpretation),
    Inconsistent,
}

/// Least model of a positive program: the fixpoint of firing every rule whose
/// positive body holds under `⊨_L` w.r.t. the set built so far.
pub fn least_model(ev: &Evaluator, positive: &GroundProgram) -> Result<LeastModel, EngineError> {
    debug_assert!(positive.rules.iter().all(|r| r.negative.is_empty()));
    let mut interp = Interpretation::new();
    loop {
        let mut changed = false;
        for rule in &positive.rules {
            if interp.contains(&rule.head) {
                continue;
            }
            let mut fires = true;
            for elem in &rule.positive {
                if !ev.holds(&interp, elem)? {
                    fires = false;
                    break;
                }
            }
            if fires {
                if interp.contains(&rule.head.complement()) {
                    return Ok(LeastModel::Inconsistent);
                }
                interp.0.insert(rule.head.clone());
                changed = true;
            }
        }
        if !changed {
            return Ok(LeastModel::Model(interp));
        }
    }
}

/// `interp` is a model of the ground program: every rule whose positive body
/// holds and whose negative body fails under `⊨_L` has its head in `interp`.
pub fn is_model(ev: &Evaluator, gp: &GroundProgram, interp: &Interpretation) -> Result<bool, EngineError> {
    for rule in &gp.rules {
        let mut applicable = true;
        for elem in &rule.positive {
            if !ev.holds(interp, elem)? {
                applicable = false;
                break;
            }
        }
        if applicable {
            for elem in &rule.negative {
                if ev.holds(interp, elem)? {
                    applicable = false;
                    break;
                }
            }
        }
        if applicable && !interp.contains(&rule.head) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The defining test: `interp` equals the least model of its own strong
/// dl-transform.
pub fn is_strong_answer_set(
    ev: &Evaluator,
    gp: &GroundProgram,
    interp: &Interpretation,
) -> Result<bool, EngineError> {
    if !interp.is_consistent() {
        return Ok(false);
    }
    let reduct = strong_dl_transform(ev, gp, interp)?;
    Ok(least_model(ev, &reduct)? == LeastModel::Model(interp.clone()))
}

/// All strong answer sets, in canonical order.
pub fn strong_answer_sets(ev: &Evaluator, program: &DlProgram) -> Result<Vec<Interpretation>, EngineError> {
    let gp = ground(program)?;
    strong_answer_sets_ground(ev, &gp)
}

pub fn strong_answer_sets_ground(
    ev: &Evaluator,
    gp: &GroundProgram,
) -> Result<Vec<Interpretation>, EngineError> {
    let conditions: Vec<GroundBodyElem> = gp
        .rules
        .iter()
        .flat_map(|r| r.negative.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if conditions.len() > 64 {
        return Err(EngineError::SearchSpace(conditions.len()));
    }
    let mut found = BTreeSet::new();
    let mut ctx = SearchCtx { lm_cache: HashMap::new() };
    search(ev, gp, &conditions, &vec![None; conditions.len()], &mut ctx, &mut found)?;
    Ok(found.into_iter().collect())
}

/// Per-search cache of least models, keyed by the set of surviving rules.
/// Propagation rounds and sibling branches revisit the same reducts often.
struct SearchCtx {
    lm_cache: HashMap<Vec<bool>, LeastModel>,
}

fn kept_rules(gp: &GroundProgram, conditions: &[GroundBodyElem], assignment: &[Option<bool>], pessimistic: bool) -> Vec<bool> {
    let value = |elem: &GroundBodyElem| -> bool {
        match conditions.iter().position(|c| c == elem) {
            Some(i) => assignment[i].unwrap_or(pessimistic),
            None => unreachable!("negative body members are all conditions"),
        }
    };
    gp.rules.iter().map(|r| !r.negative.iter().any(&value)).collect()
}

fn reduct_model(
    ev: &Evaluator,
    gp: &GroundProgram,
    ctx: &mut SearchCtx,
    kept: Vec<bool>,
) -> Result<LeastModel, EngineError> {
    if let Some(m) = ctx.lm_cache.get(&kept) {
        return Ok(m.clone());
    }
    let rules = gp
        .rules
        .iter()
        .zip(kept.iter())
        .filter(|(_, keep)| **keep)
        .map(|(r, _)| GroundRule { negative: Vec::new(), ..r.clone() })
        .collect();
    let reduct = GroundProgram {
        rules,
        universe: gp.universe.clone(),
        herbrand_base: gp.herbrand_base.clone(),
    };
    let lm = least_model(ev, &reduct)?;
    ctx.lm_cache.insert(kept, lm.clone());
    Ok(lm)
}

fn search(
    ev: &Evaluator,
    gp: &GroundProgram,
    conditions: &[GroundBodyElem],
    assignment: &[Option<bool>],
    ctx: &mut SearchCtx,
    found: &mut BTreeSet<Interpretation>,
) -> Result<(), EngineError> {
    // least models of the extreme reducts bound every candidate below this
    // partial assignment: lower ⊆ candidate ⊆ upper
    let lower = match reduct_model(ev, gp, ctx, kept_rules(gp, conditions, assignment, true))? {
        LeastModel::Model(m) => m,
        // even the fewest rules force a contradiction; no candidate survives
        LeastModel::Inconsistent => return Ok(()),
    };
    let upper = match reduct_model(ev, gp, ctx, kept_rules(gp, conditions, assignment, false))? {
        LeastModel::Model(m) => Some(m),
        LeastModel::Inconsistent => None,
    };

    let mut next: Vec<Option<bool>> = assignment.to_vec();
    let mut progressed = false;
    for (i, cond) in conditions.iter().enumerate() {
        let low = ev.holds(&lower, cond)?;
        let up = match &upper {
            Some(u) => Some(ev.holds(u, cond)?),
            None => None,
        };
        match assignment[i] {
            // conditions are monotone in the interpretation, so a value
            // incompatible with the bounds kills the whole subtree
            Some(true) => {
                if up == Some(false) {
                    return Ok(());
                }
            }
            Some(false) => {
                if low {
                    return Ok(());
                }
            }
            None => {
                if low {
                    next[i] = Some(true);
                    progressed = true;
                } else if up == Some(false) {
                    next[i] = Some(false);
                    progressed = true;
                }
            }
        }
    }
    if progressed {
        return search(ev, gp, conditions, &next, ctx, found);
    }

    match next.iter().position(|v| v.is_none()) {
        None => {
            if let LeastModel::Model(candidate) =
                reduct_model(ev, gp, ctx, kept_rules(gp, conditions, &next, false))?
            {
                if is_strong_answer_set(ev, gp, &candidate)? {
                    found.insert(candidate);
                }
            }
            Ok(())
        }
        Some(i) => {
            for choice in [true, false] {
                next[i] = Some(choice);
                search(ev, gp, conditions, &next, ctx, found)?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cautious,
    Brave,
}

/// Truth of `literal` across the strong answer sets: in all of them
/// (cautious) or in at least one (brave). Having no answer set at all is
/// reported as an error rather than a truth value.
pub fn consequence(
    ev: &Evaluator,
    program: &DlProgram,
    literal: &GroundLiteral,
    mode: Mode,
) -> Result<bool, EngineError> {
    let sets = strong_answer_sets(ev, program)?;
    if sets.is_empty() {
        return Err(EngineError::NoAnswerSets);
    }
    Ok(match mode {
        Mode::Cautious => sets.iter().all(|s| s.contains(literal)),
        Mode::Brave => sets.iter().any(|s| s.contains(literal)),
    })
}

/// `⟨L, P⟩ ⊨_{P^I} C(a)`: the DL base augmented with the answer set's
/// literals entails the assertion. Literals translate through the update
/// list when they have a pair there, and through the predicate-to-concept
/// case convention otherwise (the translation the update list itself uses).
pub fn entails_under_answer_set(
    ev: &Evaluator,
    program: &DlProgram,
    answer_set: &Interpretation,
    individual: &Individual,
    concept: &ConceptExpr,
) -> Result<bool, EngineError> {
    let gp = ground(program)?;
    if !is_strong_answer_set(ev, &gp, answer_set)? {
        return Err(EngineError::NotAnAnswerSet);
    }
    let mut tbox = ev.kb.tbox.clone();
    for lit in answer_set.iter() {
        tbox.insert(translate_literal(ev.kb, program, lit)?);
    }
    Ok(ev.oracle.entails(
        &tbox,
        &ev.kb.rbox,
        &ConceptExpr::Nominals(vec![individual.clone()]),
        concept,
    )?)
}

fn translate_literal(
    kb: &KnowledgeBase,
    program: &DlProgram,
    lit: &GroundLiteral,
) -> Result<crate::kb::Axiom, EngineError> {
    for update in &program.lambda {
        match update {
            UpdateSpec::Concept { negated, concept, predicate }
                if *predicate == lit.predicate && *negated != lit.positive && lit.args.len() == 1 =>
            {
                let side = if *negated {
                    ConceptExpr::not(concept.clone()).nnf()
                } else {
                    concept.clone()
                };
                return Ok(crate::kb::abox_to_tbox(&Assertion::Concept(lit.args[0].clone(), side))
                    .expect("concept assertions always rewrite"));
            }
            UpdateSpec::Role { role, predicate }
                if *predicate == lit.predicate && lit.positive && lit.args.len() == 2 =>
            {
                return Ok(crate::kb::abox_to_tbox(&Assertion::Role(
                    lit.args[0].clone(),
                    role.clone(),
                    lit.args[1].clone(),
                ))
                .expect("role assertions over named roles rewrite"));
            }
            _ => {}
        }
    }
    if lit.args.len() == 1 {
        let concept_name = concept_for_predicate(&lit.predicate);
        if kb.concepts.contains(&concept_name) {
            let side = if lit.positive {
                ConceptExpr::Atom(concept_name)
            } else {
                ConceptExpr::not(ConceptExpr::Atom(concept_name))
            };
            return Ok(crate::kb::abox_to_tbox(&Assertion::Concept(lit.args[0].clone(), side))
                .expect("concept assertions always rewrite"));
        }
    }
    Err(EngineError::NoUpdateCounterpart(lit.clone()))
}
