//! Abstract syntax, parser, and printer for an ASP-Core-2 subset.
//!
//! The language covers what the grounding analyzer needs and nothing more:
//! facts, normal rules, constraints, single-element choice rules
//! `{p(X)} :- body`, disjunctive heads `a | b :- body`, default negation
//! `not p(X)`, comparison builtins (`<`, `<=`, `>`, `>=`, `=`, `!=`), weak
//! constraints `:~ body. [w,t]` (pass-through), and `%` line comments.
//! Aggregates, arithmetic, and intervals are rejected with an explicit
//! error rather than silently skipped.
//!
//! Parsing enforces two global well-formedness rules so that nothing
//! downstream has to re-check them: rule safety (every variable of a head,
//! negative literal, comparison, or weak annotation occurs in a positive
//! body literal) and arity consistency (one arity per predicate name).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

/// A constant: plain integer or lowercase symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Const {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(n) => write!(f, "{n}"),
            Const::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// A term: variable (uppercase start) or constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Var(String),
    Const(Const),
}

impl Term {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// An atom `p(t1,...,tn)`; propositional atoms have zero arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal { predicate: predicate.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Variables in argument order, with duplicates.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_var)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Comparison operator of a builtin body literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

/// A comparison builtin `lhs op rhs`; only ever appears in bodies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Comparison {
    pub op: CmpOp,
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

/// Syntactic rule class, decided at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HeadKind {
    /// Exactly one head atom.
    Normal,
    /// Empty head, `:- body.`
    Constraint,
    /// Single-element choice head, `{p(X)} :- body.`
    Choice,
    /// Two or more head atoms joined by `|`.
    Disjunctive,
    /// Weak constraint `:~ body. [w,t]`, carried through unchanged.
    Weak,
}

/// The `[w,t1,...,tk]` annotation of a weak constraint, kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WeakAnnotation {
    pub terms: Vec<Term>,
}

/// One rule with its body split into the three parts every later stage
/// consumes separately: positive literals, negative literals, comparisons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule {
    /// Stable index in source order (re-assigned for rewritten rules).
    pub id: usize,
    pub head: Vec<Literal>,
    pub head_kind: HeadKind,
    pub body_pos: Vec<Literal>,
    pub body_neg: Vec<Literal>,
    pub body_cmp: Vec<Comparison>,
    pub weak: Option<WeakAnnotation>,
}

impl Rule {
    /// Distinct variables in first-occurrence order (head, then positive,
    /// negative, comparison body parts).
    pub fn variables(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |v: &str| {
            if seen.insert(v.to_string()) {
                out.push(v.to_string());
            }
        };
        for lit in self.head.iter().chain(&self.body_pos).chain(&self.body_neg) {
            for v in lit.variables() {
                push(v);
            }
        }
        for cmp in &self.body_cmp {
            for t in [&cmp.lhs, &cmp.rhs] {
                if let Term::Var(v) = t {
                    push(v);
                }
            }
        }
        if let Some(w) = &self.weak {
            for t in &w.terms {
                if let Term::Var(v) = t {
                    push(v);
                }
            }
        }
        out
    }

    /// All head and body atoms (comparisons are builtins, not atoms).
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.head.iter().chain(&self.body_pos).chain(&self.body_neg)
    }

    /// Rule size: number of head and body atoms.
    pub fn size(&self) -> usize {
        self.head.len() + self.body_pos.len() + self.body_neg.len()
    }

    /// Maximum arity over head and body atoms (0 for a fully propositional rule).
    pub fn max_arity(&self) -> usize {
        self.literals().map(Literal::arity).max().unwrap_or(0)
    }

    pub fn is_constraint(&self) -> bool {
        self.head_kind == HeadKind::Constraint
    }

    /// A fact: ground singleton normal head, empty body.
    pub fn is_fact(&self) -> bool {
        self.head_kind == HeadKind::Normal
            && self.head.len() == 1
            && self.head[0].is_ground()
            && self.body_pos.is_empty()
            && self.body_neg.is_empty()
            && self.body_cmp.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.head_kind {
            HeadKind::Constraint => write!(f, ":-")?,
            HeadKind::Weak => write!(f, ":~")?,
            HeadKind::Choice => write!(f, "{{{}}}", self.head[0])?,
            HeadKind::Normal => write!(f, "{}", self.head[0])?,
            HeadKind::Disjunctive => {
                for (i, h) in self.head.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{h}")?;
                }
            }
        }
        let has_body =
            !self.body_pos.is_empty() || !self.body_neg.is_empty() || !self.body_cmp.is_empty();
        if has_body {
            match self.head_kind {
                HeadKind::Constraint | HeadKind::Weak => write!(f, " ")?,
                _ => write!(f, " :- ")?,
            }
            let mut first = true;
            let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
                if first {
                    first = false;
                    Ok(())
                } else {
                    write!(f, ", ")
                }
            };
            for lit in &self.body_pos {
                sep(f)?;
                write!(f, "{lit}")?;
            }
            for lit in &self.body_neg {
                sep(f)?;
                write!(f, "not {lit}")?;
            }
            for cmp in &self.body_cmp {
                sep(f)?;
                write!(f, "{cmp}")?;
            }
        }
        write!(f, ".")?;
        if let Some(w) = &self.weak {
            write!(f, " [")?;
            for (i, t) in w.terms.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// A parsed program. `facts` stays empty until fact splitting
/// ([`crate::analysis::split_facts`]) moves ground unit rules there.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub facts: Vec<Literal>,
}

impl Program {
    /// Program size: sum of rule sizes plus one per fact.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Rule::size).sum::<usize>() + self.facts.len()
    }

    /// All predicate names occurring anywhere.
    pub fn predicates(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        for r in &self.rules {
            for lit in r.literals() {
                out.insert(lit.predicate.clone());
            }
        }
        for f in &self.facts {
            out.insert(f.predicate.clone());
        }
        out
    }
}

/// Parse failure. `Syntax`, `Safety`, and `ArityClash` are malformed-input
/// errors; `Unsupported` flags well-formed ASP the analyzer does not cover.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsafe rule at line {line}: variable {variable} does not occur in any positive body literal")]
    Safety { line: usize, variable: String },
    #[error("predicate {predicate} used with arity {first} and arity {second}")]
    ArityClash { predicate: String, first: usize, second: usize },
    #[error("unsupported construct at line {line}, column {col}: {what}")]
    Unsupported { line: usize, col: usize, what: String },
}

impl ParseError {
    /// True for constructs outside the supported subset (exit code 3), as
    /// opposed to malformed input (exit code 2).
    pub fn is_unsupported(&self) -> bool {
        matches!(self, ParseError::Unsupported { .. })
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    If,    // :-
    WeakIf, // :~
    Dot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Pipe,
    Cmp(CmpOp),
    Not,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn unsupported(&self, what: impl Into<String>) -> ParseError {
        ParseError::Unsupported { line: self.line, col: self.col, what: what.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            // Skip whitespace and % comments.
            loop {
                match self.peek() {
                    Some(c) if c.is_ascii_whitespace() => {
                        self.bump();
                    }
                    Some(b'%') => {
                        while let Some(c) = self.peek() {
                            if c == b'\n' {
                                break;
                            }
                            self.bump();
                        }
                    }
                    _ => break,
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' {
                            s.push(c as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if s == "not" {
                        Tok::Not
                    } else {
                        // Identifiers may carry leading underscores (the
                        // rewriter's fresh predicates do); the first letter
                        // decides variable vs symbol.
                        match s.bytes().find(|b| b.is_ascii_alphabetic()) {
                            Some(b) if b.is_ascii_uppercase() => Tok::Var(s),
                            Some(_) => Tok::Ident(s),
                            None => {
                                return Err(ParseError::Syntax {
                                    line,
                                    col,
                                    msg: format!("bare `{s}` is not a valid term"),
                                })
                            }
                        }
                    }
                }
                b'0'..=b'9' => {
                    let mut n: i64 = 0;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            n = n
                                .checked_mul(10)
                                .and_then(|n| n.checked_add((c - b'0') as i64))
                                .ok_or_else(|| self.err("integer literal out of range"))?;
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if self.peek() == Some(b'.') && self.src.get(self.pos + 1) == Some(&b'.') {
                        return Err(self.unsupported("interval `..`"));
                    }
                    Tok::Int(n)
                }
                b':' => {
                    self.bump();
                    match self.peek() {
                        Some(b'-') => {
                            self.bump();
                            Tok::If
                        }
                        Some(b'~') => {
                            self.bump();
                            Tok::WeakIf
                        }
                        _ => return Err(self.err("expected `:-` or `:~`")),
                    }
                }
                b'.' => {
                    self.bump();
                    if self.peek() == Some(b'.') {
                        return Err(self.unsupported("interval `..`"));
                    }
                    Tok::Dot
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'{' => {
                    self.bump();
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    Tok::RBrace
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Cmp(CmpOp::Le)
                    } else {
                        Tok::Cmp(CmpOp::Lt)
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Cmp(CmpOp::Ge)
                    } else {
                        Tok::Cmp(CmpOp::Gt)
                    }
                }
                b'=' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                    }
                    Tok::Cmp(CmpOp::Eq)
                }
                b'!' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Cmp(CmpOp::Ne)
                    } else {
                        return Err(self.err("expected `!=`"));
                    }
                }
                b'#' => return Err(self.unsupported("`#` directive or aggregate")),
                b';' => return Err(self.unsupported("`;` (multi-element choice or disjunction)")),
                other => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{}`", other as char),
                    })
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn at(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.at();
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Tok::Var(v)) => Ok(Term::Var(v)),
            Some(Tok::Ident(s)) => Ok(Term::Const(Const::Sym(s))),
            Some(Tok::Int(n)) => Ok(Term::Const(Const::Int(n))),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected a term"))
            }
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let name = match self.bump() {
            Some(Tok::Ident(s)) => s,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err("expected a predicate name"));
            }
        };
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.bump() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        return Err(self.err("expected `,` or `)` in argument list"));
                    }
                }
            }
        }
        Ok(Literal::new(name, args))
    }

    /// One body element: positive literal, `not` literal, or comparison.
    fn body_element(&mut self, rule: &mut Rule) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                rule.body_neg.push(self.literal()?);
                Ok(())
            }
            Some(Tok::Var(_)) | Some(Tok::Int(_)) => {
                let lhs = self.term()?;
                self.comparison(rule, lhs)
            }
            Some(Tok::Ident(_)) => {
                let lit = self.literal()?;
                if let Some(Tok::Cmp(_)) = self.peek() {
                    if lit.args.is_empty() {
                        let lhs = Term::Const(Const::Sym(lit.predicate));
                        return self.comparison(rule, lhs);
                    }
                    return Err(self.err("comparison operand must be a term, not an atom"));
                }
                rule.body_pos.push(lit);
                Ok(())
            }
            _ => Err(self.err("expected a body literal")),
        }
    }

    fn comparison(&mut self, rule: &mut Rule, lhs: Term) -> Result<(), ParseError> {
        let op = match self.bump() {
            Some(Tok::Cmp(op)) => op,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err("expected a comparison operator"));
            }
        };
        let rhs = self.term()?;
        rule.body_cmp.push(Comparison { op, lhs, rhs });
        Ok(())
    }

    fn body(&mut self, rule: &mut Rule) -> Result<(), ParseError> {
        loop {
            self.body_element(rule)?;
            match self.peek() {
                Some(Tok::Comma) => {
                    self.bump();
                }
                _ => return Ok(()),
            }
        }
    }

    fn rule(&mut self, id: usize) -> Result<Rule, ParseError> {
        let mut rule = Rule {
            id,
            head: Vec::new(),
            head_kind: HeadKind::Normal,
            body_pos: Vec::new(),
            body_neg: Vec::new(),
            body_cmp: Vec::new(),
            weak: None,
        };
        let mut has_if = false;
        match self.peek() {
            Some(Tok::If) => {
                self.bump();
                rule.head_kind = HeadKind::Constraint;
                has_if = true;
            }
            Some(Tok::WeakIf) => {
                self.bump();
                rule.head_kind = HeadKind::Weak;
                rule.weak = Some(WeakAnnotation { terms: Vec::new() });
                has_if = true;
            }
            Some(Tok::LBrace) => {
                self.bump();
                rule.head_kind = HeadKind::Choice;
                rule.head.push(self.literal()?);
                if self.peek() == Some(&Tok::Comma) {
                    let (line, col) = self.at();
                    return Err(ParseError::Unsupported {
                        line,
                        col,
                        what: "multi-element choice head".into(),
                    });
                }
                self.expect(&Tok::RBrace, "`}` after choice element")?;
                if let Some(Tok::Cmp(_)) | Some(Tok::Int(_)) = self.peek() {
                    let (line, col) = self.at();
                    return Err(ParseError::Unsupported {
                        line,
                        col,
                        what: "choice cardinality bounds".into(),
                    });
                }
            }
            Some(Tok::Int(_)) => {
                let (line, col) = self.at();
                return Err(ParseError::Unsupported {
                    line,
                    col,
                    what: "choice cardinality bounds".into(),
                });
            }
            _ => {
                rule.head.push(self.literal()?);
                while self.peek() == Some(&Tok::Pipe) {
                    self.bump();
                    rule.head.push(self.literal()?);
                }
                if rule.head.len() > 1 {
                    rule.head_kind = HeadKind::Disjunctive;
                }
            }
        }
        // Optional body.
        match self.peek() {
            Some(Tok::If) if !has_if => {
                self.bump();
                self.body(&mut rule)?;
            }
            Some(Tok::Dot) => {}
            _ if has_if => self.body(&mut rule)?,
            _ => return Err(self.err("expected `:-` or `.` after rule head")),
        }
        self.expect(&Tok::Dot, "`.` at end of rule")?;
        if rule.head_kind == HeadKind::Weak {
            self.expect(&Tok::LBracket, "`[` weak-constraint annotation")?;
            let mut terms = Vec::new();
            loop {
                terms.push(self.term()?);
                match self.bump() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBracket) => break,
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        return Err(self.err("expected `,` or `]` in weak annotation"));
                    }
                }
            }
            rule.weak = Some(WeakAnnotation { terms });
        }
        Ok(rule)
    }
}

fn check_safety(rule: &Rule, line: usize) -> Result<(), ParseError> {
    let bound: HashSet<&str> = rule.body_pos.iter().flat_map(Literal::variables).collect();
    let check = |v: &str| {
        if bound.contains(v) {
            Ok(())
        } else {
            Err(ParseError::Safety { line, variable: v.to_string() })
        }
    };
    for lit in rule.head.iter().chain(&rule.body_neg) {
        for v in lit.variables() {
            check(v)?;
        }
    }
    for cmp in &rule.body_cmp {
        for t in [&cmp.lhs, &cmp.rhs] {
            if let Term::Var(v) = t {
                check(v)?;
            }
        }
    }
    if let Some(w) = &rule.weak {
        for t in &w.terms {
            if let Term::Var(v) = t {
                check(v)?;
            }
        }
    }
    Ok(())
}

/// Parse a program; rules get ids in source order. Rejects unsafe rules,
/// arity clashes, and unsupported constructs.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser { toks, pos: 0 };
    let mut program = Program::default();
    let mut arities: HashMap<String, (usize, usize)> = HashMap::new();
    while parser.peek().is_some() {
        let (line, _) = parser.at();
        let rule = parser.rule(program.rules.len())?;
        check_safety(&rule, line)?;
        for lit in rule.literals() {
            let entry = arities.entry(lit.predicate.clone()).or_insert((lit.arity(), line));
            if entry.0 != lit.arity() {
                return Err(ParseError::ArityClash {
                    predicate: lit.predicate.clone(),
                    first: entry.0,
                    second: lit.arity(),
                });
            }
        }
        program.rules.push(rule);
    }
    Ok(program)
}

/// Print a program in the same surface syntax `parse_program` accepts:
/// facts first, then rules in id order, one statement per line.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for fact in &program.facts {
        out.push_str(&format!("{fact}.\n"));
    }
    for rule in &program.rules {
        out.push_str(&format!("{rule}\n"));
    }
    out
}
