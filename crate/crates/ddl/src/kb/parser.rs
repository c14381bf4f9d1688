//! Parser for the KB file grammar.
//!
//! A file is a sequence of `.`-terminated statements. Line comments start
//! with `#`. Declarations (`concept`, `role`, `individual`) introduce names;
//! every name must be declared, and concept/role names start uppercase while
//! individuals start lowercase. Axiom statements:
//!
//! ```text
//! tbox: <concept> [= <concept>.      tbox: <concept> == <concept>.
//! rbox: R o S [= T.                  rbox: trans(R).   rbox: disjoint(R, S).
//! dbox: <concept> ~[= <concept>.
//! ```
//!
//! Concept syntax: `TOP`, `BOT`, names, `{a,b}`, `!C`, `C & D`, `C | D`,
//! `exists R . C`, `forall R . C`, `>= n R . C`, `<= n R . C`, `self R`,
//! with precedence `!` > `&` > `|` and quantifier bodies binding as tightly
//! as `!`. `R-` is the inverse of `R` and `U` the universal role.



use thiserror::Error;

use super::{
    Axiom, ConceptExpr, ConceptName, DefeasibleAxiom, Individual, KnowledgeBase, RoleExpr,
    RoleName, RolePropertyKind,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared name: {0}")]
    UndeclaredName(String),
    #[error("{0} names must start with an {1} letter: {2}")]
    InvalidName(&'static str, &'static str, String),
    #[error("defeasible axiom side must be an atom, a negated atom, TOP or BOT: {0}")]
    MalformedDefeasibleSide(String),
    #[error("role chains are only allowed on the left of a role inclusion")]
    ChainNotAllowedHere,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Colon,
    Comma,
    Dot,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Amp,
    Pipe,
    Bang,
    Dash,
    Incl,    // [=
    Eq,      // ==
    DefIncl, // ~[=
    Geq,     // >=
    Leq,     // <=
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, col, kind }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    bump(&mut chars);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                toks.push(Spanned { tok: Tok::Ident(word), line: tline, col: tcol });
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        num.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let n: u32 = num.parse().map_err(|_| {
                    err(tline, tcol, ParseErrorKind::Syntax(format!("number out of range: {num}")))
                })?;
                toks.push(Spanned { tok: Tok::Nat(n), line: tline, col: tcol });
            }
            _ => {
                let c = bump(&mut chars);
                let tok = match c {
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    '!' => Tok::Bang,
                    '-' => Tok::Dash,
                    '[' => {
                        if chars.peek() == Some(&'=') {
                            bump(&mut chars);
                            Tok::Incl
                        } else {
                            return Err(err(tline, tcol, ParseErrorKind::Syntax("expected `[=`".into())));
                        }
                    }
                    '~' => {
                        if chars.peek() == Some(&'[') {
                            bump(&mut chars);
                            if chars.peek() == Some(&'=') {
                                bump(&mut chars);
                                Tok::DefIncl
                            } else {
                                return Err(err(tline, tcol, ParseErrorKind::Syntax("expected `~[=`".into())));
                            }
                        } else {
                            return Err(err(tline, tcol, ParseErrorKind::Syntax("expected `~[=`".into())));
                        }
                    }
                    '=' => {
                        if chars.peek() == Some(&'=') {
                            bump(&mut chars);
                            Tok::Eq
                        } else {
                            return Err(err(tline, tcol, ParseErrorKind::Syntax("expected `==`".into())));
                        }
                    }
                    '>' => {
                        if chars.peek() == Some(&'=') {
                            bump(&mut chars);
                            Tok::Geq
                        } else {
                            return Err(err(tline, tcol, ParseErrorKind::Syntax("expected `>=`".into())));
                        }
                    }
                    '<' => {
                        if chars.peek() == Some(&'=') {
                            bump(&mut chars);
                            Tok::Leq
                        } else {
                            return Err(err(tline, tcol, ParseErrorKind::Syntax("expected `<=`".into())));
                        }
                    }
                    other => {
                        return Err(err(
                            tline,
                            tcol,
                            ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                        ))
                    }
                };
                toks.push(Spanned { tok, line: tline, col: tcol });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(err(line, col, ParseErrorKind::Syntax(msg.into())))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.next();
                Ok(())
            }
            _ => self.syntax(format!("expected {what}")),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next().unwrap().tok {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => self.syntax(format!("expected {what}")),
        }
    }

    fn parse_name_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut names = vec![self.expect_ident("a name")?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            names.push(self.expect_ident("a name")?);
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(names)
    }

    /// role := ("U" | ident) "-"* ; each trailing dash inverts.
    fn parse_role(&mut self) -> Result<RoleExpr, ParseError> {
        let name = self.expect_ident("a role name")?;
        let mut role = if name == "U" {
            RoleExpr::Universal
        } else {
            RoleExpr::Named(RoleName(name))
        };
        while self.peek() == Some(&Tok::Dash) {
            let (line, col) = self.here();
            self.next();
            if role == RoleExpr::Universal {
                return Err(err(line, col, ParseErrorKind::Syntax("the universal role has no inverse".into())));
            }
            role = RoleExpr::inverse_of(role);
        }
        Ok(role)
    }

    fn parse_concept(&mut self) -> Result<ConceptExpr, ParseError> {
        let mut parts = vec![self.parse_and()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.next();
            parts.push(self.parse_and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { ConceptExpr::Or(parts) })
    }

    fn parse_and(&mut self) -> Result<ConceptExpr, ParseError> {
        let mut parts = vec![self.parse_unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.next();
            parts.push(self.parse_unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { ConceptExpr::And(parts) })
    }

    fn parse_unary(&mut self) -> Result<ConceptExpr, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.next();
                Ok(ConceptExpr::not(self.parse_unary()?))
            }
            Some(Tok::Geq) | Some(Tok::Leq) => {
                let at_least = self.peek() == Some(&Tok::Geq);
                self.next();
                let n = match self.peek() {
                    Some(Tok::Nat(_)) => match self.next().unwrap().tok {
                        Tok::Nat(n) => n,
                        _ => unreachable!(),
                    },
                    _ => return self.syntax("expected a number"),
                };
                let role = self.parse_restriction_role()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.parse_unary()?;
                Ok(if at_least {
                    ConceptExpr::AtLeast(n, role, Box::new(body))
                } else {
                    ConceptExpr::AtMost(n, role, Box::new(body))
                })
            }
            Some(Tok::Ident(w)) if w == "exists" || w == "forall" => {
                let existential = w == "exists";
                self.next();
                let role = self.parse_restriction_role()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.parse_unary()?;
                Ok(if existential {
                    ConceptExpr::exists(role, body)
                } else {
                    ConceptExpr::forall(role, body)
                })
            }
            Some(Tok::Ident(w)) if w == "self" => {
                self.next();
                let role = self.parse_restriction_role()?;
                Ok(ConceptExpr::SelfRestriction(role))
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_restriction_role(&mut self) -> Result<RoleExpr, ParseError> {
        let (line, col) = self.here();
        let role = self.parse_role()?;
        // `R o S` would start a chain here, which is only legal in role inclusions
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "o") {
            return Err(err(line, col, ParseErrorKind::ChainNotAllowedHere));
        }
        Ok(role)
    }

    fn parse_primary(&mut self) -> Result<ConceptExpr, ParseError> {
        match self.peek() {
            Some(Tok::Ident(w)) if w == "TOP" => {
                self.next();
                Ok(ConceptExpr::Top)
            }
            Some(Tok::Ident(w)) if w == "BOT" => {
                self.next();
                Ok(ConceptExpr::Bottom)
            }
            Some(Tok::Ident(_)) => Ok(ConceptExpr::Atom(ConceptName(self.expect_ident("")?))),
            Some(Tok::LBrace) => {
                self.next();
                let mut inds = vec![Individual(self.expect_ident("an individual")?)];
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    inds.push(Individual(self.expect_ident("an individual")?));
                }
                self.expect(Tok::RBrace, "`}`")?;
                inds.sort();
                inds.dedup();
                Ok(ConceptExpr::Nominals(inds))
            }
            Some(Tok::LParen) => {
                self.next();
                let c = self.parse_concept()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            _ => self.syntax("expected a concept"),
        }
    }
}

fn check_case(name: &str, kind: &'static str, upper: bool, line: usize, col: usize) -> Result<(), ParseError> {
    let ok = name
        .chars()
        .next()
        .map(|c| if upper { c.is_ascii_uppercase() } else { c.is_ascii_lowercase() })
        .unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(err(
            line,
            col,
            ParseErrorKind::InvalidName(kind, if upper { "uppercase" } else { "lowercase" }, name.to_string()),
        ))
    }
}

/// Parses a knowledge base from a character stream.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut kb = KnowledgeBase::new();
    // axiom statements are name-checked after the whole file is read, so
    // declarations may appear anywhere
    let mut pending: Vec<(usize, usize, Stmt)> = Vec::new();

    enum Stmt {
        Tbox(Axiom),
        Rbox(Axiom),
        Dbox(DefeasibleAxiom),
    }

    while p.peek().is_some() {
        let (line, col) = p.here();
        let head = p.expect_ident("a statement keyword")?;
        match head.as_str() {
            "concept" => {
                for n in p.parse_name_list()? {
                    check_case(&n, "concept", true, line, col)?;
                    kb.concepts.insert(ConceptName(n));
                }
            }
            "role" => {
                for n in p.parse_name_list()? {
                    check_case(&n, "role", true, line, col)?;
                    if n == "U" {
                        return Err(err(line, col, ParseErrorKind::Syntax("`U` is reserved for the universal role".into())));
                    }
                    kb.roles.insert(RoleName(n));
                }
            }
            "individual" => {
                for n in p.parse_name_list()? {
                    check_case(&n, "individual", false, line, col)?;
                    kb.individuals.insert(Individual(n));
                }
            }
            "tbox" => {
                p.expect(Tok::Colon, "`:`")?;
                let lhs = p.parse_concept()?;
                let ax = match p.peek() {
                    Some(Tok::Incl) => {
                        p.next();
                        Axiom::inclusion(lhs, p.parse_concept()?)
                    }
                    Some(Tok::Eq) => {
                        p.next();
                        Axiom::equality(lhs, p.parse_concept()?)
                    }
                    _ => return p.syntax("expected `[=` or `==`"),
                };
                p.expect(Tok::Dot, "`.`")?;
                pending.push((line, col, Stmt::Tbox(ax)));
            }
            "rbox" => {
                p.expect(Tok::Colon, "`:`")?;
                let ax = parse_rbox_axiom(&mut p)?;
                p.expect(Tok::Dot, "`.`")?;
                pending.push((line, col, Stmt::Rbox(ax)));
            }
            "dbox" => {
                p.expect(Tok::Colon, "`:`")?;
                let ante = p.parse_concept()?;
                p.expect(Tok::DefIncl, "`~[=`")?;
                let cons = p.parse_concept()?;
                p.expect(Tok::Dot, "`.`")?;
                for side in [&ante, &cons] {
                    if !side.is_defeasible_side() {
                        return Err(err(line, col, ParseErrorKind::MalformedDefeasibleSide(side.to_string())));
                    }
                }
                pending.push((line, col, Stmt::Dbox(DefeasibleAxiom::new(ante, cons))));
            }
            other => {
                return Err(err(line, col, ParseErrorKind::Syntax(format!("unknown statement `{other}`"))))
            }
        }
    }

    for (line, col, stmt) in pending {
        let res = match &stmt {
            Stmt::Tbox(ax) | Stmt::Rbox(ax) => kb.check_axiom_names(ax),
            Stmt::Dbox(d) => kb
                .check_concept_names(&d.antecedent)
                .and_then(|_| kb.check_concept_names(&d.consequent)),
        };
        if let Err(msg) = res {
            let name = msg.rsplit(": ").next().unwrap_or(&msg).to_string();
            return Err(err(line, col, ParseErrorKind::UndeclaredName(name)));
        }
        match stmt {
            Stmt::Tbox(ax) => {
                kb.tbox.insert(ax);
            }
            Stmt::Rbox(ax) => {
                kb.rbox.insert(ax);
            }
            Stmt::Dbox(d) => {
                kb.dbox.insert(d);
            }
        }
    }
    Ok(kb)
}

fn parse_rbox_axiom(p: &mut Parser) -> Result<Axiom, ParseError> {
    if let Some(Tok::Ident(w)) = p.peek() {
        let prop = match w.as_str() {
            "trans" => Some(RolePropertyKind::Trans),
            "fun" => Some(RolePropertyKind::Fun),
            "ref" => Some(RolePropertyKind::Ref),
            "irr" => Some(RolePropertyKind::Irr),
            "sym" => Some(RolePropertyKind::Sym),
            "asy" => Some(RolePropertyKind::Asy),
            _ => None,
        };
        if let Some(kind) = prop {
            p.next();
            p.expect(Tok::LParen, "`(`")?;
            let role = p.parse_role()?;
            p.expect(Tok::RParen, "`)`")?;
            return Ok(Axiom::RoleProperty { kind, role });
        }
        if w == "disjoint" {
            p.next();
            p.expect(Tok::LParen, "`(`")?;
            let r = p.parse_role()?;
            p.expect(Tok::Comma, "`,`")?;
            let s = p.parse_role()?;
            p.expect(Tok::RParen, "`)`")?;
            return Ok(Axiom::RoleDisjointness(r, s));
        }
    }
    // role inclusion, possibly with a chain on the left
    let mut chain = vec![p.parse_role()?];
    while matches!(p.peek(), Some(Tok::Ident(w)) if w == "o") {
        p.next();
        chain.push(p.parse_role()?);
    }
    let lhs = if chain.len() == 1 { chain.pop().unwrap() } else { RoleExpr::Chain(chain) };
    p.expect(Tok::Incl, "`[=`")?;
    let rhs = p.parse_role()?;
    if matches!(rhs, RoleExpr::Chain(_)) {
        let (line, col) = p.here();
        return Err(err(line, col, ParseErrorKind::ChainNotAllowedHere));
    }
    Ok(Axiom::RoleInclusion { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::serialize_kb;

    const BIRDS: &str = "
        concept B, P, F, I, Fi, W, Preyins, Preyfish.
        role Prey.
        individual a, b.
        tbox: {a} [= B.
        tbox: {b} [= P.
        tbox: P [= B.
        tbox: I [= !Fi.
        tbox: Preyins == forall Prey . I & exists Prey . TOP.
        tbox: Preyfish == forall Prey . Fi & exists Prey . TOP.
        dbox: B ~[= F.
        dbox: P ~[= !F.
        dbox: B ~[= Preyins.
        dbox: P ~[= Preyfish.
        dbox: B ~[= W.
    ";

    #[test]
    fn parses_bird_penguin_kb() {
        let kb = parse_kb(BIRDS).unwrap();
        assert_eq!(kb.tbox.len(), 6);
        assert_eq!(kb.dbox.len(), 5);
        assert_eq!(kb.rbox.len(), 0);
        assert!(kb.validate().is_ok());
    }

    #[test]
    fn empty_file_with_declarations_only() {
        let kb = parse_kb("concept A.\nrole R.\nindividual x.\n").unwrap();
        assert!(kb.tbox.is_empty() && kb.rbox.is_empty() && kb.dbox.is_empty());
        assert_eq!(kb.concepts.len(), 1);
    }

    #[test]
    fn rejects_compound_defeasible_side() {
        let e = parse_kb("concept A, B, C.\ndbox: (A & B) ~[= C.\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MalformedDefeasibleSide(_)));
        assert_eq!(e.line, 2);
    }

    #[test]
    fn rejects_undeclared_names() {
        let e = parse_kb("concept A.\ntbox: A [= B.\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UndeclaredName(ref n) if n == "B"));
    }

    #[test]
    fn declarations_may_follow_use() {
        let kb = parse_kb("tbox: A [= B.\nconcept A, B.\n").unwrap();
        assert_eq!(kb.tbox.len(), 1);
    }

    #[test]
    fn rejects_lowercase_concept() {
        let e = parse_kb("concept cat.\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::InvalidName("concept", _, _)));
    }

    #[test]
    fn syntax_error_carries_position() {
        let e = parse_kb("concept A.\ntbox: A [= .\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.line, 2);
    }

    #[test]
    fn parses_rbox_forms() {
        let kb = parse_kb(
            "role R, S, T.\nrbox: R o S [= T.\nrbox: trans(R).\nrbox: disjoint(R, S).\nrbox: R- [= S.\n",
        )
        .unwrap();
        assert_eq!(kb.rbox.len(), 4);
    }

    #[test]
    fn rejects_chain_in_restriction() {
        let e = parse_kb("concept A.\nrole R, S.\ntbox: exists R o S . A [= A.\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ChainNotAllowedHere));
    }

    #[test]
    fn double_inverse_normalizes() {
        let kb = parse_kb("role R, S.\nrbox: R-- [= S.\n").unwrap();
        let ax = kb.rbox.iter().next().unwrap();
        assert_eq!(
            *ax,
            Axiom::RoleInclusion { lhs: RoleExpr::named("R"), rhs: RoleExpr::named("S") }
        );
    }

    #[test]
    fn round_trip_is_identity() {
        let kb = parse_kb(BIRDS).unwrap();
        let text = serialize_kb(&kb);
        let kb2 = parse_kb(&text).unwrap();
        assert_eq!(kb, kb2);
    }

    #[test]
    fn number_restrictions_round_trip() {
        let src = "concept A.\nrole R.\ntbox: >= 2 R . A [= <= 5 R- . A.\ntbox: self R [= exists U . A.\n";
        let kb = parse_kb(src).unwrap();
        let kb2 = parse_kb(&serialize_kb(&kb)).unwrap();
        assert_eq!(kb, kb2);
    }
}
