//! Strict axioms, defeasible axioms, and ABox-to-TBox rewriting.

use super::{ConceptExpr, Individual, RoleExpr, RoleName};

/// A strict axiom: a TBox concept axiom or an RBox role axiom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    ConceptInclusion { lhs: ConceptExpr, rhs: ConceptExpr },
    ConceptEquality { lhs: ConceptExpr, rhs: ConceptExpr },
    RoleInclusion { lhs: RoleExpr, rhs: RoleExpr },
    RoleProperty { kind: RolePropertyKind, role: RoleExpr },
    RoleDisjointness(RoleExpr, RoleExpr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RolePropertyKind {
    Trans,
    Fun,
    Ref,
    Irr,
    Sym,
    Asy,
}

impl RolePropertyKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RolePropertyKind::Trans => "trans",
            RolePropertyKind::Fun => "fun",
            RolePropertyKind::Ref => "ref",
            RolePropertyKind::Irr => "irr",
            RolePropertyKind::Sym => "sym",
            RolePropertyKind::Asy => "asy",
        }
    }
}

impl Axiom {
    pub fn inclusion(lhs: ConceptExpr, rhs: ConceptExpr) -> Self {
        Axiom::ConceptInclusion { lhs, rhs }
    }

    pub fn equality(lhs: ConceptExpr, rhs: ConceptExpr) -> Self {
        Axiom::ConceptEquality { lhs, rhs }
    }

    pub fn is_concept_axiom(&self) -> bool {
        matches!(self, Axiom::ConceptInclusion { .. } | Axiom::ConceptEquality { .. })
    }

    /// Expands `C == D` into the pair of inclusions it abbreviates; plain
    /// inclusions pass through unchanged. Role axioms have no expansion.
    pub fn expand_equality(&self) -> Vec<Axiom> {
        match self {
            Axiom::ConceptEquality { lhs, rhs } => vec![
                Axiom::inclusion(lhs.clone(), rhs.clone()),
                Axiom::inclusion(rhs.clone(), lhs.clone()),
            ],
            other => vec![other.clone()],
        }
    }
}

/// A defeasible concept inclusion `C ~[= D`: "if an individual falls under C,
/// typically it also falls under D". Both sides are atomic (an atom, a negated
/// atom, `TOP` or `BOT`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefeasibleAxiom {
    pub antecedent: ConceptExpr,
    pub consequent: ConceptExpr,
}

impl DefeasibleAxiom {
    pub fn new(antecedent: ConceptExpr, consequent: ConceptExpr) -> Self {
        debug_assert!(antecedent.is_defeasible_side() && consequent.is_defeasible_side());
        Self { antecedent, consequent }
    }

    /// The classical counterpart `!C | D`, simplified to negation normal form.
    pub fn materialization(&self) -> ConceptExpr {
        ConceptExpr::or(vec![
            ConceptExpr::not(self.antecedent.clone()),
            self.consequent.clone(),
        ])
        .nnf()
    }

    /// The strict form `C [= D`.
    pub fn to_strict(&self) -> Axiom {
        Axiom::inclusion(self.antecedent.clone(), self.consequent.clone())
    }
}

/// An ABox assertion, prior to TBox rewriting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assertion {
    /// `C(a)`
    Concept(Individual, ConceptExpr),
    /// `R(a, b)` for a named role R
    Role(Individual, RoleName, Individual),
}

/// Rewrites an ABox assertion as an equivalent TBox axiom:
/// `C(a)` becomes `{a} [= C` and `R(a,b)` becomes `{a} [= exists R . {b}`.
pub fn abox_to_tbox(assertion: &Assertion) -> Result<Axiom, String> {
    match assertion {
        Assertion::Concept(a, c) => Ok(Axiom::inclusion(
            ConceptExpr::Nominals(vec![a.clone()]),
            c.clone(),
        )),
        Assertion::Role(a, r, b) => Ok(Axiom::inclusion(
            ConceptExpr::Nominals(vec![a.clone()]),
            ConceptExpr::exists(RoleExpr::Named(r.clone()), ConceptExpr::Nominals(vec![b.clone()])),
        )),
    }
}
