//! Knowledge-base model: signature, concept/axiom ASTs, parser and printer.

mod axiom;
mod concept;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

pub use axiom::{abox_to_tbox, Assertion, Axiom, DefeasibleAxiom, RolePropertyKind};
pub use concept::{ConceptExpr, RoleExpr};
pub use parser::{parse_kb, ParseError, ParseErrorKind};
pub use printer::serialize_kb;

/// A concept name. Always starts with an uppercase ASCII letter, so that the
/// predicate vocabulary obtained by lowercasing the initial stays disjoint
/// from the concept vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptName(pub String);

/// A role name. Starts with an uppercase ASCII letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleName(pub String);

/// An individual name. Starts with a lowercase ASCII letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Individual(pub String);

macro_rules! name_impls {
    ($t:ident) => {
        impl $t {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

name_impls!(ConceptName);
name_impls!(RoleName);
name_impls!(Individual);

/// A defeasible DL knowledge base: a signature plus TBox, RBox and DBox.
///
/// ABox assertions are not stored separately; they are rewritten into TBox
/// axioms over nominals (see [`abox_to_tbox`]).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub concepts: BTreeSet<ConceptName>,
    pub roles: BTreeSet<RoleName>,
    pub individuals: BTreeSet<Individual>,
    /// Concept axioms (inclusions and equalities).
    pub tbox: BTreeSet<Axiom>,
    /// Role axioms only.
    pub rbox: BTreeSet<Axiom>,
    /// Defeasible concept inclusions.
    pub dbox: BTreeSet<DefeasibleAxiom>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_concepts<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, names: I) {
        self.concepts.extend(names.into_iter().map(|s| ConceptName(s.into())));
    }

    pub fn declare_roles<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, names: I) {
        self.roles.extend(names.into_iter().map(|s| RoleName(s.into())));
    }

    pub fn declare_individuals<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, names: I) {
        self.individuals.extend(names.into_iter().map(|s| Individual(s.into())));
    }

    /// The knowledge base with one extra concept membership `C(a)`, TBox-ized.
    pub fn with_assertion(&self, individual: &Individual, concept: &ConceptExpr) -> Self {
        let mut kb = self.clone();
        kb.tbox.insert(abox_to_tbox(&Assertion::Concept(individual.clone(), concept.clone())).expect("concept assertions always rewrite"));
        kb
    }

    /// Checks the signature and placement invariants: every name used in an
    /// axiom is declared, the TBox holds only concept axioms, the RBox only
    /// role axioms, and every DBox side is atomic (an atom, a negated atom,
    /// `TOP` or `BOT`).
    pub fn validate(&self) -> Result<(), String> {
        for ax in &self.tbox {
            if !ax.is_concept_axiom() {
                return Err(format!("role axiom in tbox: {ax}"));
            }
            self.check_axiom_names(ax)?;
        }
        for ax in &self.rbox {
            if ax.is_concept_axiom() {
                return Err(format!("concept axiom in rbox: {ax}"));
            }
            self.check_axiom_names(ax)?;
        }
        for d in &self.dbox {
            if !d.antecedent.is_defeasible_side() || !d.consequent.is_defeasible_side() {
                return Err(format!("non-atomic defeasible axiom side: {d}"));
            }
            self.check_concept_names(&d.antecedent)?;
            self.check_concept_names(&d.consequent)?;
        }
        Ok(())
    }

    fn check_axiom_names(&self, ax: &Axiom) -> Result<(), String> {
        match ax {
            Axiom::ConceptInclusion { lhs, rhs } | Axiom::ConceptEquality { lhs, rhs } => {
                self.check_concept_names(lhs)?;
                self.check_concept_names(rhs)
            }
            Axiom::RoleInclusion { lhs, rhs } => {
                self.check_role_names(lhs)?;
                self.check_role_names(rhs)
            }
            Axiom::RoleProperty { role, .. } => self.check_role_names(role),
            Axiom::RoleDisjointness(r, s) => {
                self.check_role_names(r)?;
                self.check_role_names(s)
            }
        }
    }

    pub(crate) fn check_concept_names(&self, c: &ConceptExpr) -> Result<(), String> {
        match c {
            ConceptExpr::Top | ConceptExpr::Bottom => Ok(()),
            ConceptExpr::Atom(n) => {
                if self.concepts.contains(n) {
                    Ok(())
                } else {
                    Err(format!("undeclared concept name: {n}"))
                }
            }
            ConceptExpr::Nominals(inds) => {
                for i in inds {
                    if !self.individuals.contains(i) {
                        return Err(format!("undeclared individual: {i}"));
                    }
                }
                Ok(())
            }
            ConceptExpr::Not(c) => self.check_concept_names(c),
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
                cs.iter().try_for_each(|c| self.check_concept_names(c))
            }
            ConceptExpr::Exists(r, c) | ConceptExpr::Forall(r, c) => {
                self.check_role_names(r)?;
                self.check_concept_names(c)
            }
            ConceptExpr::AtLeast(_, r, c) | ConceptExpr::AtMost(_, r, c) => {
                self.check_role_names(r)?;
                self.check_concept_names(c)
            }
            ConceptExpr::SelfRestriction(r) => self.check_role_names(r),
        }
    }

    fn check_role_names(&self, r: &RoleExpr) -> Result<(), String> {
        match r {
            RoleExpr::Named(n) | RoleExpr::Inverse(n) => {
                if self.roles.contains(n) {
                    Ok(())
                } else {
                    Err(format!("undeclared role name: {n}"))
                }
            }
            RoleExpr::Universal => Ok(()),
            RoleExpr::Chain(rs) => rs.iter().try_for_each(|r| self.check_role_names(r)),
        }
    }
}
