//! Shared test support: an independent brute-force answer-set oracle and a
//! generator of small random ground normal programs.
// not every test target uses every helper
#![allow(dead_code)]
//!
//! The brute-force path re-implements the semantics directly from the
//! definitions: enumerate every consistent subset of the Herbrand base,
//! build the reduct by hand, take its least model by naive iteration. It
//! never calls the engine's transform or search code, so it can serve as an
//! oracle for them.

use std::collections::BTreeSet;

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ddl::engine::{GroundBodyElem, GroundLiteral, GroundProgram, Interpretation};
use ddl::program::{BodyElem, DlProgram, DlRule, Predicate, PredicateLiteral, RuleOrigin};

fn literal_of(elem: &GroundBodyElem) -> &GroundLiteral {
    match elem {
        GroundBodyElem::Literal(l) => l,
        GroundBodyElem::Dl(_) => panic!("brute force handles normal programs only"),
    }
}

/// Least model of a positive ground normal program, straight from the fixpoint
/// definition; `None` when it would contain a literal and its complement.
fn naive_least_model(rules: &[(GroundLiteral, Vec<GroundLiteral>)]) -> Option<BTreeSet<GroundLiteral>> {
    let mut model: BTreeSet<GroundLiteral> = BTreeSet::new();
    loop {
        let mut additions: Vec<GroundLiteral> = Vec::new();
        for (head, body) in rules {
            if !model.contains(head) && body.iter().all(|b| model.contains(b)) {
                additions.push(head.clone());
            }
        }
        if additions.is_empty() {
            return Some(model);
        }
        for head in additions {
            if model.contains(&head.complement()) {
                return None;
            }
            model.insert(head);
        }
    }
}

/// Is `candidate` a strong answer set by definition: equal to the least model
/// of the program reduced relative to it?
fn is_answer_set_by_definition(gp: &GroundProgram, candidate: &BTreeSet<GroundLiteral>) -> bool {
    let mut reduct: Vec<(GroundLiteral, Vec<GroundLiteral>)> = Vec::new();
    for rule in &gp.rules {
        if rule.negative.iter().any(|e| candidate.contains(literal_of(e))) {
            continue;
        }
        reduct.push((rule.head.clone(), rule.positive.iter().map(|e| literal_of(e).clone()).collect()));
    }
    naive_least_model(&reduct).as_ref() == Some(candidate)
}

/// Every strong answer set of a ground normal program, found by checking all
/// consistent subsets of the Herbrand base against the definition.
pub fn brute_force_answer_sets(gp: &GroundProgram) -> Vec<Interpretation> {
    let atoms: Vec<GroundLiteral> =
        gp.herbrand_base.iter().filter(|l| l.positive).cloned().collect();
    let mut found = Vec::new();
    // each atom is in the candidate positively, negatively, or not at all
    let mut states = vec![0u8; atoms.len()];
    loop {
        let candidate: BTreeSet<GroundLiteral> = atoms
            .iter()
            .zip(states.iter())
            .filter_map(|(atom, s)| match s {
                0 => None,
                1 => Some(atom.clone()),
                _ => Some(atom.complement()),
            })
            .collect();
        if is_answer_set_by_definition(gp, &candidate) {
            found.push(Interpretation::from_literals(candidate));
        }
        let mut i = 0;
        loop {
            if i == states.len() {
                found.sort();
                return found;
            }
            states[i] += 1;
            if states[i] < 3 {
                break;
            }
            states[i] = 0;
            i += 1;
        }
    }
}

/// A random ground normal program over at most seven propositional atoms,
/// so the Herbrand base stays within fourteen literals.
pub fn random_ground_program(rng: &mut ChaCha8Rng) -> DlProgram {
    let n_atoms = rng.random_range(2..=7);
    let preds: Vec<Predicate> = (0..n_atoms).map(|i| Predicate(format!("p{i}"))).collect();
    let literal = |rng: &mut ChaCha8Rng| {
        let predicate = preds.choose(rng).unwrap().clone();
        if rng.random_bool(0.3) {
            PredicateLiteral::negative(predicate, Vec::new())
        } else {
            PredicateLiteral::positive(predicate, Vec::new())
        }
    };
    let n_rules = rng.random_range(1..=6);
    let mut rules = Vec::new();
    for _ in 0..n_rules {
        let head = literal(rng);
        let positive: Vec<BodyElem> =
            (0..rng.random_range(0..=2)).map(|_| BodyElem::Literal(literal(rng))).collect();
        let negative: Vec<BodyElem> =
            (0..rng.random_range(0..=2)).map(|_| BodyElem::Literal(literal(rng))).collect();
        rules.push(DlRule { head, positive, negative, origin: RuleOrigin::Handwritten });
    }
    DlProgram { rules, lambda: Vec::new(), constants: BTreeSet::new() }
}
