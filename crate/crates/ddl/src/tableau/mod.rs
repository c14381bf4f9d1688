//! Classical entailment oracle.
//!
//! Queries in the ALCO fragment (booleans, nominals, existential and
//! universal restrictions over named roles, empty RBox) are decided by the
//! built-in tableau. Anything richer is delegated to an external reasoner
//! process when one is configured, and rejected otherwise, so the fragment
//! boundary never silently weakens an answer.
//!
//! Verdicts are memoized per query, so repeated checks against the same
//! axiom set (the ranking procedure issues many) hit the cache.

mod alco;
mod external;

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use thiserror::Error;

use crate::kb::{Axiom, ConceptExpr, KnowledgeBase, RoleExpr};

pub use alco::TableauStats;
pub use external::{ExternalOracle, ExternalOracleError, DEFAULT_TIMEOUT};

/// What is being asked of the classical reasoner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OracleGoal {
    Subsumption { lhs: ConceptExpr, rhs: ConceptExpr },
    ConceptSatisfiable(ConceptExpr),
}

/// A self-contained classical query: equality-expanded TBox, RBox and goal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OracleQuery {
    pub tbox: BTreeSet<Axiom>,
    pub rbox: BTreeSet<Axiom>,
    pub goal: OracleGoal,
}

impl OracleQuery {
    pub fn new<'a>(
        tbox: impl IntoIterator<Item = &'a Axiom>,
        rbox: impl IntoIterator<Item = &'a Axiom>,
        goal: OracleGoal,
    ) -> Self {
        let tbox = tbox.into_iter().flat_map(|a| a.expand_equality()).collect();
        let rbox = rbox.into_iter().cloned().collect();
        OracleQuery { tbox, rbox, goal }
    }

    fn in_alco(&self) -> bool {
        self.rbox.is_empty()
            && self.tbox.iter().all(axiom_in_alco)
            && match &self.goal {
                OracleGoal::Subsumption { lhs, rhs } => concept_in_alco(lhs) && concept_in_alco(rhs),
                OracleGoal::ConceptSatisfiable(c) => concept_in_alco(c),
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictSource {
    Internal,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdict {
    pub answer: bool,
    pub source: VerdictSource,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("query leaves the ALCO fragment and no external oracle is configured: {0}")]
    UnsupportedConstruct(String),
    #[error("tableau search limit exceeded")]
    SearchLimit,
    #[error("external oracle: {0}")]
    External(#[from] ExternalOracleError),
}

fn axiom_in_alco(ax: &Axiom) -> bool {
    match ax {
        Axiom::ConceptInclusion { lhs, rhs } | Axiom::ConceptEquality { lhs, rhs } => {
            concept_in_alco(lhs) && concept_in_alco(rhs)
        }
        _ => false,
    }
}

fn concept_in_alco(c: &ConceptExpr) -> bool {
    match c {
        ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Atom(_) | ConceptExpr::Nominals(_) => true,
        ConceptExpr::Not(c) => concept_in_alco(c),
        ConceptExpr::And(cs) | ConceptExpr::Or(cs) => cs.iter().all(concept_in_alco),
        ConceptExpr::Exists(r, c) | ConceptExpr::Forall(r, c) => r.is_named() && concept_in_alco(c),
        ConceptExpr::AtLeast(..) | ConceptExpr::AtMost(..) | ConceptExpr::SelfRestriction(_) => false,
    }
}

/// Entailment oracle with memoization and optional external fallback.
pub struct Oracle {
    external: Option<ExternalOracle>,
    memo: Mutex<HashMap<OracleQuery, OracleVerdict>>,
}

impl Oracle {
    /// Oracle using only the built-in ALCO tableau.
    pub fn internal() -> Self {
        Oracle { external: None, memo: Mutex::new(HashMap::new()) }
    }

    /// Oracle that answers beyond-ALCO queries through an external process.
    pub fn with_external(external: ExternalOracle) -> Self {
        Oracle { external: Some(external), memo: Mutex::new(HashMap::new()) }
    }

    /// `tbox ∪ rbox ⊨ lhs [= rhs`
    pub fn entails<'a>(
        &self,
        tbox: impl IntoIterator<Item = &'a Axiom>,
        rbox: impl IntoIterator<Item = &'a Axiom>,
        lhs: &ConceptExpr,
        rhs: &ConceptExpr,
    ) -> Result<bool, OracleError> {
        let q = OracleQuery::new(tbox, rbox, OracleGoal::Subsumption { lhs: lhs.clone(), rhs: rhs.clone() });
        Ok(self.verdict(q)?.answer)
    }

    /// Is `c` satisfiable w.r.t. `tbox ∪ rbox`?
    pub fn is_satisfiable<'a>(
        &self,
        tbox: impl IntoIterator<Item = &'a Axiom>,
        rbox: impl IntoIterator<Item = &'a Axiom>,
        c: &ConceptExpr,
    ) -> Result<bool, OracleError> {
        let q = OracleQuery::new(tbox, rbox, OracleGoal::ConceptSatisfiable(c.clone()));
        Ok(self.verdict(q)?.answer)
    }

    pub fn verdict(&self, query: OracleQuery) -> Result<OracleVerdict, OracleError> {
        if let Some(v) = self.memo.lock().unwrap().get(&query) {
            return Ok(*v);
        }
        let verdict = self.decide(&query)?;
        self.memo.lock().unwrap().insert(query, verdict);
        Ok(verdict)
    }

    fn decide(&self, query: &OracleQuery) -> Result<OracleVerdict, OracleError> {
        if query.in_alco() {
            let answer = match &query.goal {
                OracleGoal::Subsumption { lhs, rhs } => {
                    let counter = ConceptExpr::And(vec![lhs.clone(), ConceptExpr::not(rhs.clone())]);
                    !alco::satisfiable(&query.tbox, &counter)?.0
                }
                OracleGoal::ConceptSatisfiable(c) => alco::satisfiable(&query.tbox, c)?.0,
            };
            return Ok(OracleVerdict { answer, source: VerdictSource::Internal });
        }
        match &self.external {
            Some(ext) => {
                let answer = ext.decide(query)?;
                Ok(OracleVerdict { answer, source: VerdictSource::External })
            }
            None => Err(OracleError::UnsupportedConstruct(describe_query(query))),
        }
    }
}

fn describe_query(q: &OracleQuery) -> String {
    match &q.goal {
        OracleGoal::Subsumption { lhs, rhs } => format!("{lhs} [= {rhs}"),
        OracleGoal::ConceptSatisfiable(c) => format!("sat({c})"),
    }
}

/// Direct entry to the internal tableau, exposing its step counter. Used by
/// tests that bound the search.
pub fn alco_satisfiable_with_stats(
    tbox: &BTreeSet<Axiom>,
    c: &ConceptExpr,
) -> Result<(bool, TableauStats), OracleError> {
    let expanded: BTreeSet<Axiom> = tbox.iter().flat_map(|a| a.expand_equality()).collect();
    alco::satisfiable(&expanded, c)
}

/// Builds a knowledge base whose signature covers every name used by the
/// query, for serialization towards an external reasoner.
pub(crate) fn query_to_kb(q: &OracleQuery) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    kb.tbox = q.tbox.clone();
    kb.rbox = q.rbox.clone();
    for ax in q.tbox.iter().chain(q.rbox.iter()) {
        harvest_axiom(ax, &mut kb);
    }
    let goal_concepts = match &q.goal {
        OracleGoal::Subsumption { lhs, rhs } => vec![lhs.clone(), rhs.clone()],
        OracleGoal::ConceptSatisfiable(c) => vec![c.clone()],
    };
    for c in &goal_concepts {
        harvest_concept(c, &mut kb);
    }
    kb
}

fn harvest_axiom(ax: &Axiom, kb: &mut KnowledgeBase) {
    match ax {
        Axiom::ConceptInclusion { lhs, rhs } | Axiom::ConceptEquality { lhs, rhs } => {
            harvest_concept(lhs, kb);
            harvest_concept(rhs, kb);
        }
        Axiom::RoleInclusion { lhs, rhs } => {
            harvest_role(lhs, kb);
            harvest_role(rhs, kb);
        }
        Axiom::RoleProperty { role, .. } => harvest_role(role, kb),
        Axiom::RoleDisjointness(r, s) => {
            harvest_role(r, kb);
            harvest_role(s, kb);
        }
    }
}

fn harvest_concept(c: &ConceptExpr, kb: &mut KnowledgeBase) {
    match c {
        ConceptExpr::Top | ConceptExpr::Bottom => {}
        ConceptExpr::Atom(n) => {
            kb.concepts.insert(n.clone());
        }
        ConceptExpr::Nominals(inds) => kb.individuals.extend(inds.iter().cloned()),
        ConceptExpr::Not(c) => harvest_concept(c, kb),
        ConceptExpr::And(cs) | ConceptExpr::Or(cs) => cs.iter().for_each(|c| harvest_concept(c, kb)),
        ConceptExpr::Exists(r, c) | ConceptExpr::Forall(r, c) => {
            harvest_role(r, kb);
            harvest_concept(c, kb);
        }
        ConceptExpr::AtLeast(_, r, c) | ConceptExpr::AtMost(_, r, c) => {
            harvest_role(r, kb);
            harvest_concept(c, kb);
        }
        ConceptExpr::SelfRestriction(r) => harvest_role(r, kb),
    }
}

fn harvest_role(r: &RoleExpr, kb: &mut KnowledgeBase) {
    match r {
        RoleExpr::Named(n) | RoleExpr::Inverse(n) => {
            kb.roles.insert(n.clone());
        }
        RoleExpr::Universal => {}
        RoleExpr::Chain(rs) => rs.iter().for_each(|r| harvest_role(r, kb)),
    }
}
