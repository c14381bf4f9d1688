//! Compilation of a ranked knowledge base into a dl-program.
//!
//! Every defeasible axiom `C ~[= D` of rank `k` yields two rules: the
//! default application
//!
//! ```text
//! d(X) :- DL[lambda; C](X), not DL[lambda; A1 | ... | An](X), not -d(X).
//! ```
//!
//! where `A1..An` are the antecedents of strictly higher rank (the guard is
//! dropped when there are none, since an empty disjunction is `BOT` and the
//! NAF literal would hold vacuously), and the blocking companion
//!
//! ```text
//! -d(X) :- DL[lambda; -D](X).
//! ```
//!
//! Double negation is simplified on both: an axiom with consequent `!F` gets
//! head `-f` and companion head `f`. Each antecedent of rank one or higher
//! additionally yields a typicality rule `-c(X) :- not DL[lambda; C](X)`,
//! presuming individuals non-exceptional unless known otherwise. The shared
//! update list pairs every consequent atom `E` as `E + e, -E + -e`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kb::{ConceptExpr, DefeasibleAxiom};
use crate::program::{
    predicate_for_concept, BodyElem, DlAtom, DlProgram, DlQuery, DlRule, PredicateLiteral,
    RuleOrigin, Term, UpdateSpec,
};
use crate::ranking::RankedKb;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("defeasible consequent has no program predicate (must be an atom or negated atom): {0}")]
    NonAtomicConsequent(DefeasibleAxiom),
}

/// The antecedents of the rank-`k` axioms.
pub fn antecedents_by_rank(rkb: &RankedKb, k: usize) -> BTreeSet<ConceptExpr> {
    rkb.axioms_of_rank(k).iter().map(|d| d.antecedent.clone()).collect()
}

/// The consequents of all surviving defeasible axioms.
pub fn consequents(rkb: &RankedKb) -> BTreeSet<ConceptExpr> {
    rkb.dbox_star.iter().map(|d| d.consequent.clone()).collect()
}

/// The update list: for every atom `E` under a consequent (possibly under a
/// negation), the pair `E + e, -E + -e`. `TOP`/`BOT` consequents contribute
/// nothing.
pub fn build_lambda(rkb: &RankedKb) -> Vec<UpdateSpec> {
    let mut atoms = BTreeSet::new();
    for c in consequents(rkb) {
        match c {
            ConceptExpr::Atom(n) => {
                atoms.insert(n);
            }
            ConceptExpr::Not(inner) => {
                if let ConceptExpr::Atom(n) = *inner {
                    atoms.insert(n);
                }
            }
            _ => {}
        }
    }
    let mut lambda = Vec::new();
    for name in atoms {
        let predicate = predicate_for_concept(&name);
        for negated in [false, true] {
            lambda.push(UpdateSpec::Concept {
                negated,
                concept: ConceptExpr::Atom(name.clone()),
                predicate: predicate.clone(),
            });
        }
    }
    lambda
}

/// The program literal standing for an atomic side: `A` maps to `a(terms)`
/// and `!A` to `-a(terms)`. `TOP`/`BOT` have no literal.
fn side_literal(side: &ConceptExpr, terms: Vec<Term>) -> Option<PredicateLiteral> {
    match side {
        ConceptExpr::Atom(n) => Some(PredicateLiteral::positive(predicate_for_concept(n), terms)),
        ConceptExpr::Not(inner) => match inner.as_ref() {
            ConceptExpr::Atom(n) => Some(PredicateLiteral::negative(predicate_for_concept(n), terms)),
            _ => None,
        },
        _ => None,
    }
}

/// Compiles a ranked knowledge base into a dl-program over its individuals.
pub fn compile(rkb: &RankedKb) -> Result<DlProgram, CompileError> {
    let lambda = build_lambda(rkb);
    let var = || Term::Var("X".to_string());
    let dl = |query: ConceptExpr| {
        BodyElem::Dl(DlAtom::new(lambda.clone(), DlQuery::Concept(query), vec![var()]))
    };

    let mut axioms: Vec<(&DefeasibleAxiom, usize)> =
        rkb.dbox_star.iter().map(|d| (d, rkb.rank[d])).collect();
    axioms.sort_by_key(|(d, r)| (*r, d.to_string()));

    let mut rules = Vec::new();
    for (axiom, k) in &axioms {
        let head = side_literal(&axiom.consequent, vec![var()])
            .ok_or_else(|| CompileError::NonAtomicConsequent((*axiom).clone()))?;

        let higher: BTreeSet<ConceptExpr> = rkb
            .rank
            .iter()
            .filter(|(_, r)| **r > *k)
            .map(|(d, _)| d.antecedent.clone())
            .collect();
        let mut negative = Vec::new();
        if !higher.is_empty() {
            negative.push(dl(ConceptExpr::union_of(higher.into_iter().collect())));
        }
        negative.push(BodyElem::Literal(head.complement()));
        rules.push(DlRule {
            head: head.clone(),
            positive: vec![dl(axiom.antecedent.clone())],
            negative,
            origin: RuleOrigin::DefaultApplication((*axiom).clone()),
        });

        rules.push(DlRule {
            head: head.complement(),
            positive: vec![dl(ConceptExpr::not(axiom.consequent.clone()).nnf())],
            negative: Vec::new(),
            origin: RuleOrigin::DefaultBlocking((*axiom).clone()),
        });
    }

    let mut exceptional_antecedents: Vec<ConceptExpr> = rkb
        .rank
        .iter()
        .filter(|(_, r)| **r >= 1)
        .map(|(d, _)| d.antecedent.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    exceptional_antecedents.sort_by_key(|c| c.to_string());
    for antecedent in exceptional_antecedents {
        // TOP/BOT antecedents have no predicate; their typicality rule could
        // never fire anyway (the NAF body of a TOP query is never satisfied)
        let Some(lit) = side_literal(&antecedent, vec![var()]) else { continue };
        rules.push(DlRule {
            head: lit.complement(),
            positive: Vec::new(),
            negative: vec![dl(antecedent.clone())],
            origin: RuleOrigin::TypicalityAssumption(antecedent),
        });
    }

    Ok(DlProgram { rules, lambda, constants: rkb.individuals.clone() })
}
