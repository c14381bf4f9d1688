//! Exceptionality ranking and rational closure.
//!
//! An antecedent is exceptional when the materialised DBox together with the
//! strict axioms forces its negation. Iterating exceptionality yields a
//! shrinking sequence `E_0 ⊇ E_1 ⊇ ...`; axioms stuck in the fixpoint hold
//! strictly and move to the TBox, the rest get the index of the last set
//! containing them as their rank. Defeasible queries are then answered by
//! rank comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kb::{Axiom, ConceptExpr, ConceptName, DefeasibleAxiom, Individual, KnowledgeBase, RoleName};
use crate::tableau::{Oracle, OracleError};

/// Rank of a concept: its exceptionality level, or infinite when the concept
/// is unsatisfiable under the strict axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinite => write!(f, "inf"),
        }
    }
}

/// Output of the ranking step: the promoted TBox `T*`, the untouched RBox,
/// the remaining defeasible axioms `D*` with their ranks, and the final
/// exceptionality sequence `(E_0, ..., E_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedKb {
    pub concepts: BTreeSet<ConceptName>,
    pub roles: BTreeSet<RoleName>,
    pub individuals: BTreeSet<Individual>,
    pub tbox_star: BTreeSet<Axiom>,
    pub rbox: BTreeSet<Axiom>,
    pub dbox_star: BTreeSet<DefeasibleAxiom>,
    pub rank: BTreeMap<DefeasibleAxiom, usize>,
    pub exceptionality_seq: Vec<BTreeSet<DefeasibleAxiom>>,
}

impl RankedKb {
    /// The classical projection `⟨T*, R⟩`, used as the DL side of compiled
    /// dl-programs.
    pub fn classical_kb(&self) -> KnowledgeBase {
        KnowledgeBase {
            concepts: self.concepts.clone(),
            roles: self.roles.clone(),
            individuals: self.individuals.clone(),
            tbox: self.tbox_star.clone(),
            rbox: self.rbox.clone(),
            dbox: BTreeSet::new(),
        }
    }

    /// Axioms of rank `k`.
    pub fn axioms_of_rank(&self, k: usize) -> BTreeSet<DefeasibleAxiom> {
        self.rank
            .iter()
            .filter(|(_, r)| **r == k)
            .map(|(d, _)| d.clone())
            .collect()
    }
}

/// The materialisation `{!C | D : C ~[= D}` of a set of defeasible axioms,
/// each in negation normal form.
pub fn materialize<'a>(dbox: impl IntoIterator<Item = &'a DefeasibleAxiom>) -> Vec<ConceptExpr> {
    let set: BTreeSet<ConceptExpr> = dbox.into_iter().map(|d| d.materialization()).collect();
    set.into_iter().collect()
}

fn materialized_conjunction<'a>(dbox: impl IntoIterator<Item = &'a DefeasibleAxiom>) -> ConceptExpr {
    ConceptExpr::intersection_of(materialize(dbox))
}

/// The axioms of `dbox` whose antecedent is exceptional:
/// `tbox ∪ rbox ⊨ ⊓mat(dbox) [= !C`.
pub fn exceptional(
    oracle: &Oracle,
    tbox: &BTreeSet<Axiom>,
    rbox: &BTreeSet<Axiom>,
    dbox: &BTreeSet<DefeasibleAxiom>,
) -> Result<BTreeSet<DefeasibleAxiom>, OracleError> {
    let conj = materialized_conjunction(dbox);
    let mut out = BTreeSet::new();
    for d in dbox {
        let negated = ConceptExpr::not(d.antecedent.clone());
        if oracle.entails(tbox, rbox, &conj, &negated)? {
            out.insert(d.clone());
        }
    }
    Ok(out)
}

/// Ranks a knowledge base by repeated exceptionality.
///
/// Axioms that stay exceptional at every level form the fixpoint `D*_inf`;
/// their strict forms join `T*` and the process restarts on the remainder
/// until the fixpoint is empty. The sequence recorded is the one produced by
/// the final round, so `E_0` equals the surviving `D*`.
pub fn compute_ranking(oracle: &Oracle, kb: &KnowledgeBase) -> Result<RankedKb, OracleError> {
    let mut tbox_star = kb.tbox.clone();
    let mut dbox_star = kb.dbox.clone();
    let mut seq: Vec<BTreeSet<DefeasibleAxiom>>;
    loop {
        seq = vec![dbox_star.clone()];
        seq.push(exceptional(oracle, &tbox_star, &kb.rbox, &seq[0])?);
        let mut i = 0;
        while seq[i + 1] != seq[i] {
            i += 1;
            let next = exceptional(oracle, &tbox_star, &kb.rbox, &seq[i])?;
            seq.push(next);
        }
        let fixpoint = seq[i].clone();
        seq.truncate(i);
        if fixpoint.is_empty() {
            break;
        }
        tbox_star.extend(fixpoint.iter().map(|d| d.to_strict()));
        dbox_star = dbox_star.difference(&fixpoint).cloned().collect();
    }

    let mut rank = BTreeMap::new();
    for d in &dbox_star {
        let r = seq
            .iter()
            .enumerate()
            .rev()
            .find(|(_, level)| level.contains(d))
            .map(|(j, _)| j)
            .expect("every surviving axiom appears in E_0");
        rank.insert(d.clone(), r);
    }

    Ok(RankedKb {
        concepts: kb.concepts.clone(),
        roles: kb.roles.clone(),
        individuals: kb.individuals.clone(),
        tbox_star,
        rbox: kb.rbox.clone(),
        dbox_star,
        rank,
        exceptionality_seq: seq,
    })
}

/// Rank of a concept: the smallest `j` such that `T* ∪ R` does not force
/// `!c` under the materialised `E_j`, where the sequence is extended by the
/// empty set (whose materialised conjunction is `TOP`). Infinite when `c` is
/// unsatisfiable even classically.
pub fn rank_of_concept(oracle: &Oracle, rkb: &RankedKb, c: &ConceptExpr) -> Result<Rank, OracleError> {
    let negated = ConceptExpr::not(c.clone());
    for (j, level) in rkb.exceptionality_seq.iter().enumerate() {
        let conj = materialized_conjunction(level);
        if !oracle.entails(&rkb.tbox_star, &rkb.rbox, &conj, &negated)? {
            return Ok(Rank::Finite(j));
        }
    }
    if !oracle.entails(&rkb.tbox_star, &rkb.rbox, &ConceptExpr::Top, &negated)? {
        return Ok(Rank::Finite(rkb.exceptionality_seq.len()));
    }
    Ok(Rank::Infinite)
}

/// Rational-closure entailment of `C ~[= D` against an already ranked base:
/// advance past the levels incompatible with `C`, then check the conditional
/// under the first compatible level, falling back to classical entailment
/// when every level is exhausted.
pub fn rational_closure_entails_ranked(
    oracle: &Oracle,
    rkb: &RankedKb,
    antecedent: &ConceptExpr,
    consequent: &ConceptExpr,
) -> Result<bool, OracleError> {
    let seq = &rkb.exceptionality_seq;
    let mut i = 0;
    while i < seq.len() {
        let guarded = ConceptExpr::And(vec![materialized_conjunction(&seq[i]), antecedent.clone()]);
        if oracle.entails(&rkb.tbox_star, &rkb.rbox, &guarded, &ConceptExpr::Bottom)? {
            i += 1;
        } else {
            break;
        }
    }
    if i < seq.len() {
        let guarded = ConceptExpr::And(vec![materialized_conjunction(&seq[i]), antecedent.clone()]);
        oracle.entails(&rkb.tbox_star, &rkb.rbox, &guarded, consequent)
    } else {
        oracle.entails(&rkb.tbox_star, &rkb.rbox, antecedent, consequent)
    }
}

/// Ranks `kb` and answers the defeasible query `antecedent ~[= consequent`.
pub fn rational_closure_entails(
    oracle: &Oracle,
    kb: &KnowledgeBase,
    antecedent: &ConceptExpr,
    consequent: &ConceptExpr,
) -> Result<bool, OracleError> {
    let rkb = compute_ranking(oracle, kb)?;
    rational_closure_entails_ranked(oracle, &rkb, antecedent, consequent)
}
