//! Rendering of concepts, axioms and knowledge bases in the KB file grammar.
//!
//! `serialize_kb` emits the canonical form: declarations first, then one axiom
//! per line with each section sorted lexicographically. Parsing the output
//! yields a structurally equal knowledge base.

use std::fmt;

use super::{Axiom, ConceptExpr, DefeasibleAxiom, KnowledgeBase, RoleExpr};

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleExpr::Named(n) => write!(f, "{n}"),
            RoleExpr::Inverse(n) => write!(f, "{n}-"),
            RoleExpr::Universal => write!(f, "U"),
            RoleExpr::Chain(rs) => {
                let parts: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
                write!(f, "{}", parts.join(" o "))
            }
        }
    }
}

impl ConceptExpr {
    /// Binding strength of the outermost operator, used to decide parentheses.
    fn precedence(&self) -> u8 {
        match self {
            ConceptExpr::Or(_) => 0,
            ConceptExpr::And(_) => 1,
            // prefix and quantifier forms
            ConceptExpr::Not(_)
            | ConceptExpr::Exists(..)
            | ConceptExpr::Forall(..)
            | ConceptExpr::AtLeast(..)
            | ConceptExpr::AtMost(..)
            | ConceptExpr::SelfRestriction(_) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            ConceptExpr::Top => write!(f, "TOP"),
            ConceptExpr::Bottom => write!(f, "BOT"),
            ConceptExpr::Atom(n) => write!(f, "{n}"),
            ConceptExpr::Nominals(inds) => {
                let parts: Vec<&str> = inds.iter().map(|i| i.as_str()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            ConceptExpr::Not(c) => {
                write!(f, "!")?;
                c.fmt_at(f, 3)
            }
            ConceptExpr::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    c.fmt_at(f, 2)?;
                }
                Ok(())
            }
            ConceptExpr::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    c.fmt_at(f, 1)?;
                }
                Ok(())
            }
            ConceptExpr::Exists(r, c) => {
                write!(f, "exists {r} . ")?;
                c.fmt_at(f, 2)
            }
            ConceptExpr::Forall(r, c) => {
                write!(f, "forall {r} . ")?;
                c.fmt_at(f, 2)
            }
            ConceptExpr::AtLeast(n, r, c) => {
                write!(f, ">= {n} {r} . ")?;
                c.fmt_at(f, 2)
            }
            ConceptExpr::AtMost(n, r, c) => {
                write!(f, "<= {n} {r} . ")?;
                c.fmt_at(f, 2)
            }
            ConceptExpr::SelfRestriction(r) => write!(f, "self {r}"),
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::ConceptInclusion { lhs, rhs } => write!(f, "{lhs} [= {rhs}"),
            Axiom::ConceptEquality { lhs, rhs } => write!(f, "{lhs} == {rhs}"),
            Axiom::RoleInclusion { lhs, rhs } => write!(f, "{lhs} [= {rhs}"),
            Axiom::RoleProperty { kind, role } => write!(f, "{}({role})", kind.keyword()),
            Axiom::RoleDisjointness(r, s) => write!(f, "disjoint({r}, {s})"),
        }
    }
}

impl fmt::Display for DefeasibleAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~[= {}", self.antecedent, self.consequent)
    }
}

/// Canonical textual form of a knowledge base.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    let join = |names: Vec<String>| names.join(", ");
    if !kb.concepts.is_empty() {
        out.push_str(&format!(
            "concept {}.\n",
            join(kb.concepts.iter().map(|n| n.to_string()).collect())
        ));
    }
    if !kb.roles.is_empty() {
        out.push_str(&format!(
            "role {}.\n",
            join(kb.roles.iter().map(|n| n.to_string()).collect())
        ));
    }
    if !kb.individuals.is_empty() {
        out.push_str(&format!(
            "individual {}.\n",
            join(kb.individuals.iter().map(|n| n.to_string()).collect())
        ));
    }
    let mut section = |prefix: &str, lines: Vec<String>| {
        let mut lines = lines;
        lines.sort();
        for l in lines {
            out.push_str(&format!("{prefix}: {l}.\n"));
        }
    };
    section("tbox", kb.tbox.iter().map(|a| a.to_string()).collect());
    section("rbox", kb.rbox.iter().map(|a| a.to_string()).collect());
    section("dbox", kb.dbox.iter().map(|a| a.to_string()).collect());
    out
}
