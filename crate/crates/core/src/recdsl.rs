//! A small textual language for nested recurrence definitions.
//!
//! The grammar is line-oriented (`#` starts a comment, `;` also separates
//! directives, so a whole definition fits on one line):
//!
//! ```text
//! name <identifier>
//! start <nonneg-int>
//! init <idx>=<int> [, <idx>=<int> ...]
//! initrange <lo>..<hi> default <int>
//! def  A(n) = <expr>                       # single-case form
//! case n % <m> == <r> : A(n) = <expr>      # multi-case form
//! expr := int | n | expr + expr | expr - expr | int * expr | A(expr) | (expr)
//! ```
//!
//! `A` is always the self-application symbol; the `name` directive is
//! display metadata. The leading `def` keyword may be omitted.

use std::fmt::Write as _;

use thiserror::Error;

use crate::seq::{InitError, InitialConditions, SeqValue};

/// An expression over the single free variable `n`, with self-application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expression {
    Const(SeqValue),
    N,
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    /// Multiplication by an integer literal; general products are not part
    /// of the language.
    Scale(SeqValue, Box<Expression>),
    /// Application of the sequence being defined to the inner expression.
    SelfApp(Box<Expression>),
}

/// One residue case: the body applies when `n % modulus == residue`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseDef {
    pub modulus: u64,
    pub residue: u64,
    pub body: Expression,
}

/// A recurrence definition: residue-cased bodies, initial conditions, and
/// the first index the recurrence is defined on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceDef {
    pub name: String,
    pub start: u64,
    pub initial: InitialConditions,
    pub cases: Vec<CaseDef>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefError {
    #[error("a recurrence needs at least one case")]
    NoCases,
    #[error("residue {residue} is not below modulus {modulus}")]
    BadResidue { modulus: u64, residue: u64 },
    #[error("residue {residue} mod {modulus} is covered by {count} cases; each class must be covered exactly once")]
    ResidueCoverage { residue: u64, modulus: u64, count: usize },
    #[error("combined modulus {0} is too large")]
    ModulusTooLarge(u64),
    #[error("integer literals in a definition body must be nonnegative")]
    NegativeLiteral,
    #[error("initial conditions leave index {0} uncovered below the first computed index")]
    InitGap(u64),
    #[error("index {0} is too large for the evaluator")]
    IndexTooLarge(u64),
    #[error(transparent)]
    Init(#[from] InitError),
}

impl RecurrenceDef {
    /// A single-case definition (modulus 1).
    pub fn single(
        name: impl Into<String>,
        start: u64,
        initial: InitialConditions,
        body: Expression,
    ) -> Result<RecurrenceDef, DefError> {
        RecurrenceDef::with_cases(
            name,
            start,
            initial,
            vec![CaseDef { modulus: 1, residue: 0, body }],
        )
    }

    pub fn with_cases(
        name: impl Into<String>,
        start: u64,
        initial: InitialConditions,
        cases: Vec<CaseDef>,
    ) -> Result<RecurrenceDef, DefError> {
        let def = RecurrenceDef { name: name.into(), start, initial, cases };
        def.validate()?;
        Ok(def)
    }

    /// Replaces the initial conditions, revalidating coverage.
    pub fn replace_initial(mut self, initial: InitialConditions) -> Result<RecurrenceDef, DefError> {
        self.initial = initial;
        self.validate()?;
        Ok(self)
    }

    /// First index whose value comes from the recurrence body rather than
    /// the initial conditions.
    pub fn compute_start(&self) -> u64 {
        match self.initial.covered_max() {
            Some(m) => self.start.max(m + 1),
            None => self.start,
        }
    }

    /// The case whose residue class contains `n`.
    pub fn case_for(&self, n: u64) -> &CaseDef {
        self.cases
            .iter()
            .find(|c| n % c.modulus == c.residue)
            .expect("validated cases partition all residues")
    }

    fn validate(&self) -> Result<(), DefError> {
        if self.cases.is_empty() {
            return Err(DefError::NoCases);
        }
        let mut lcm: u64 = 1;
        for case in &self.cases {
            if case.modulus == 0 || case.residue >= case.modulus {
                return Err(DefError::BadResidue { modulus: case.modulus, residue: case.residue });
            }
            lcm = lcm / gcd(lcm, case.modulus) * case.modulus;
            if lcm > 1 << 16 {
                return Err(DefError::ModulusTooLarge(lcm));
            }
            check_literals(&case.body)?;
        }
        for r in 0..lcm {
            let count = self.cases.iter().filter(|c| r % c.modulus == c.residue).count();
            if count != 1 {
                let modulus = lcm;
                return Err(DefError::ResidueCoverage { residue: r, modulus, count });
            }
        }
        if self.start > i64::MAX as u64 {
            return Err(DefError::IndexTooLarge(self.start));
        }
        if let Some(max) = self.initial.covered_max() {
            if max >= i64::MAX as u64 {
                return Err(DefError::IndexTooLarge(max));
            }
            if max >= self.start {
                match self.initial.span() {
                    Some(span) => {
                        if span.lo > self.start {
                            return Err(DefError::InitGap(self.start));
                        }
                    }
                    None => {
                        let mut expected = self.start;
                        for (idx, _) in self.initial.exceptions() {
                            if idx < self.start {
                                continue;
                            }
                            if idx != expected {
                                return Err(DefError::InitGap(expected));
                            }
                            expected += 1;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_literals(e: &Expression) -> Result<(), DefError> {
    match e {
        Expression::Const(c) => {
            if *c < 0 {
                return Err(DefError::NegativeLiteral);
            }
        }
        Expression::N => {}
        Expression::Add(l, r) | Expression::Sub(l, r) => {
            check_literals(l)?;
            check_literals(r)?;
        }
        Expression::Scale(k, inner) => {
            if *k < 0 {
                return Err(DefError::NegativeLiteral);
            }
            check_literals(inner)?;
        }
        Expression::SelfApp(inner) => check_literals(inner)?,
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Printing

/// Canonical rendering of an expression; parses back to the same tree.
pub fn print_expr(e: &Expression) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn write_expr(out: &mut String, e: &Expression, min_prec: u8) {
    match e {
        Expression::Const(c) => {
            let _ = write!(out, "{c}");
        }
        Expression::N => out.push('n'),
        Expression::Add(l, r) => {
            let parens = min_prec > 1;
            if parens {
                out.push('(');
            }
            write_expr(out, l, 1);
            out.push_str(" + ");
            write_expr(out, r, 2);
            if parens {
                out.push(')');
            }
        }
        Expression::Sub(l, r) => {
            let parens = min_prec > 1;
            if parens {
                out.push('(');
            }
            write_expr(out, l, 1);
            out.push_str(" - ");
            write_expr(out, r, 2);
            if parens {
                out.push(')');
            }
        }
        Expression::Scale(k, inner) => {
            let _ = write!(out, "{k}*");
            write_expr(out, inner, 2);
        }
        Expression::SelfApp(inner) => {
            out.push_str("A(");
            write_expr(out, inner, 0);
            out.push(')');
        }
    }
}

/// Canonical multi-line rendering of a definition.
pub fn print_recurrence(def: &RecurrenceDef) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name {}", def.name);
    let _ = writeln!(out, "start {}", def.start);
    if let Some(span) = def.initial.span() {
        let _ = writeln!(out, "initrange {}..{} default {}", span.lo, span.hi, span.value);
    }
    let entries: Vec<String> =
        def.initial.exceptions().map(|(i, v)| format!("{i}={v}")).collect();
    if !entries.is_empty() {
        let _ = writeln!(out, "init {}", entries.join(", "));
    }
    if def.cases.len() == 1 && def.cases[0].modulus == 1 {
        let _ = writeln!(out, "def A(n) = {}", print_expr(&def.cases[0].body));
    } else {
        for case in &def.cases {
            let _ = writeln!(
                out,
                "case n % {} == {} : A(n) = {}",
                case.modulus,
                case.residue,
                print_expr(&case.body)
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, col {col}: multiplier must be an integer literal")]
    NonIntegerCoefficient { line: usize, col: usize },
    #[error(transparent)]
    Def(#[from] DefError),
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Percent,
    EqEq,
    Eq,
    Colon,
    Comma,
    DotDot,
}

struct SpTok {
    tok: Tok,
    col: usize,
}

fn lex(segment: &str, line: usize) -> Result<Vec<SpTok>, ParseError> {
    let mut toks = Vec::new();
    let bytes = segment.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let col = i + 1;
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '0'..='9' => {
                let begin = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &segment[begin..i];
                let value = text
                    .parse::<i64>()
                    .map_err(|_| syntax(line, col, format!("integer literal `{text}` is too large")))?;
                toks.push(SpTok { tok: Tok::Int(value), col });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let begin = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(SpTok { tok: Tok::Ident(segment[begin..i].to_string()), col });
            }
            '+' => {
                toks.push(SpTok { tok: Tok::Plus, col });
                i += 1;
            }
            '-' => {
                toks.push(SpTok { tok: Tok::Minus, col });
                i += 1;
            }
            '*' => {
                toks.push(SpTok { tok: Tok::Star, col });
                i += 1;
            }
            '(' => {
                toks.push(SpTok { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                toks.push(SpTok { tok: Tok::RParen, col });
                i += 1;
            }
            '%' => {
                toks.push(SpTok { tok: Tok::Percent, col });
                i += 1;
            }
            ':' => {
                toks.push(SpTok { tok: Tok::Colon, col });
                i += 1;
            }
            ',' => {
                toks.push(SpTok { tok: Tok::Comma, col });
                i += 1;
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push(SpTok { tok: Tok::EqEq, col });
                    i += 2;
                } else {
                    toks.push(SpTok { tok: Tok::Eq, col });
                    i += 1;
                }
            }
            '.' => {
                if bytes.get(i + 1) == Some(&b'.') {
                    toks.push(SpTok { tok: Tok::DotDot, col });
                    i += 2;
                } else {
                    return Err(syntax(line, col, "expected `..`"));
                }
            }
            other => {
                return Err(syntax(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<SpTok>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    fn new(toks: Vec<SpTok>, line: usize, end_col: usize) -> Cursor {
        Cursor { toks, pos: 0, line, end_col }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        let col = self.col();
        match self.next() {
            Some(t) if t == *want => Ok(()),
            _ => Err(syntax(self.line, col, format!("expected {what}"))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<i64, ParseError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            _ => Err(syntax(self.line, col, format!("expected {what}"))),
        }
    }

    /// A nonnegative integer, as an index/modulus/count.
    fn expect_index(&mut self, what: &str) -> Result<u64, ParseError> {
        let col = self.col();
        if self.peek() == Some(&Tok::Minus) {
            return Err(syntax(self.line, col, format!("expected {what} (nonnegative)")));
        }
        Ok(self.expect_int(what)? as u64)
    }

    fn expect_ident(&mut self, want: &str) -> Result<(), ParseError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Ident(id)) if id == want => Ok(()),
            _ => Err(syntax(self.line, col, format!("expected `{want}`"))),
        }
    }

    /// `<int>` or `-<int>`, for initial-condition values.
    fn expect_signed(&mut self, what: &str) -> Result<i64, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            let v = self.expect_int(what)?;
            Ok(-v)
        } else {
            self.expect_int(what)
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(syntax(self.line, self.col(), "unexpected trailing tokens"))
        }
    }
}

fn parse_expr(c: &mut Cursor) -> Result<Expression, ParseError> {
    let mut e = parse_term(c)?;
    loop {
        match c.peek() {
            Some(Tok::Plus) => {
                c.next();
                let rhs = parse_term(c)?;
                e = Expression::Add(Box::new(e), Box::new(rhs));
            }
            Some(Tok::Minus) => {
                c.next();
                let rhs = parse_term(c)?;
                e = Expression::Sub(Box::new(e), Box::new(rhs));
            }
            _ => break,
        }
    }
    Ok(e)
}

fn parse_term(c: &mut Cursor) -> Result<Expression, ParseError> {
    if let (Some(Tok::Int(_)), Some(Tok::Star)) = (c.peek(), c.peek2()) {
        let k = c.expect_int("an integer")?;
        c.expect(&Tok::Star, "`*`")?;
        let inner = parse_term(c)?;
        return Ok(Expression::Scale(k, Box::new(inner)));
    }
    let e = parse_primary(c)?;
    if c.peek() == Some(&Tok::Star) {
        return Err(ParseError::NonIntegerCoefficient { line: c.line, col: c.col() });
    }
    Ok(e)
}

fn parse_primary(c: &mut Cursor) -> Result<Expression, ParseError> {
    let col = c.col();
    match c.next() {
        Some(Tok::Int(v)) => Ok(Expression::Const(v)),
        Some(Tok::Ident(id)) if id == "n" => Ok(Expression::N),
        Some(Tok::Ident(id)) if id == "A" => {
            c.expect(&Tok::LParen, "`(` after `A`")?;
            let inner = parse_expr(c)?;
            c.expect(&Tok::RParen, "`)`")?;
            Ok(Expression::SelfApp(Box::new(inner)))
        }
        Some(Tok::LParen) => {
            let inner = parse_expr(c)?;
            c.expect(&Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Some(Tok::Ident(id)) => Err(syntax(
            c.line,
            col,
            format!("unknown identifier `{id}`; expected `n` or `A(...)`"),
        )),
        _ => Err(syntax(c.line, col, "expected an expression")),
    }
}

/// `A(n) = <expr>` with the head tokens still unconsumed.
fn parse_defhead_body(c: &mut Cursor) -> Result<Expression, ParseError> {
    c.expect_ident("A")?;
    c.expect(&Tok::LParen, "`(`")?;
    c.expect_ident("n")?;
    c.expect(&Tok::RParen, "`)`")?;
    c.expect(&Tok::Eq, "`=`")?;
    let body = parse_expr(c)?;
    c.expect_end()?;
    Ok(body)
}

/// Parses a full definition from text.
pub fn parse_recurrence(text: &str) -> Result<RecurrenceDef, ParseError> {
    let mut name: Option<String> = None;
    let mut start: Option<u64> = None;
    let mut span: Option<(u64, u64, SeqValue)> = None;
    let mut inits: Vec<(usize, u64, SeqValue)> = Vec::new();
    let mut single_body: Option<Expression> = None;
    let mut cases: Vec<CaseDef> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let without_comment = crate::tag::strip_comment(raw);
        for segment in without_comment.split(';') {
            if segment.trim().is_empty() {
                continue;
            }
            let toks = lex(segment, line_no)?;
            let end_col = segment.len() + 1;
            let mut c = Cursor::new(toks, line_no, end_col);
            let head_col = c.col();
            let head = match c.peek() {
                Some(Tok::Ident(id)) => id.clone(),
                _ => return Err(syntax(line_no, head_col, "expected a directive")),
            };
            match head.as_str() {
                "name" => {
                    c.next();
                    let col = c.col();
                    let id = match c.next() {
                        Some(Tok::Ident(id)) => id,
                        _ => return Err(syntax(line_no, col, "expected an identifier")),
                    };
                    c.expect_end()?;
                    if name.replace(id).is_some() {
                        return Err(syntax(line_no, head_col, "duplicate `name` directive"));
                    }
                }
                "start" => {
                    c.next();
                    let v = c.expect_index("a nonnegative integer")?;
                    c.expect_end()?;
                    if start.replace(v).is_some() {
                        return Err(syntax(line_no, head_col, "duplicate `start` directive"));
                    }
                }
                "init" => {
                    c.next();
                    loop {
                        let col = c.col();
                        let index = c.expect_int("an index")?;
                        if index < 0 {
                            return Err(syntax(line_no, col, "indices are nonnegative"));
                        }
                        c.expect(&Tok::Eq, "`=`")?;
                        let value = c.expect_signed("a value")?;
                        inits.push((line_no, index as u64, value));
                        if c.peek() == Some(&Tok::Comma) {
                            c.next();
                        } else {
                            break;
                        }
                    }
                    c.expect_end()?;
                }
                "initrange" => {
                    c.next();
                    let lo = c.expect_index("a lower index")?;
                    c.expect(&Tok::DotDot, "`..`")?;
                    let hi = c.expect_index("an upper index")?;
                    c.expect_ident("default")?;
                    let value = c.expect_signed("a default value")?;
                    c.expect_end()?;
                    if span.replace((lo, hi, value)).is_some() {
                        return Err(syntax(line_no, head_col, "duplicate `initrange` directive"));
                    }
                }
                "case" => {
                    c.next();
                    c.expect_ident("n")?;
                    c.expect(&Tok::Percent, "`%`")?;
                    let modulus = c.expect_index("a modulus")?;
                    c.expect(&Tok::EqEq, "`==`")?;
                    let residue = c.expect_index("a residue")?;
                    c.expect(&Tok::Colon, "`:`")?;
                    let body = parse_defhead_body(&mut c)?;
                    if single_body.is_some() {
                        return Err(syntax(line_no, head_col, "cannot mix `def` and `case`"));
                    }
                    cases.push(CaseDef { modulus, residue, body });
                }
                "def" => {
                    c.next();
                    let body = parse_defhead_body(&mut c)?;
                    if !cases.is_empty() {
                        return Err(syntax(line_no, head_col, "cannot mix `def` and `case`"));
                    }
                    if single_body.replace(body).is_some() {
                        return Err(syntax(line_no, head_col, "duplicate definition"));
                    }
                }
                "A" => {
                    let body = parse_defhead_body(&mut c)?;
                    if !cases.is_empty() {
                        return Err(syntax(line_no, head_col, "cannot mix `def` and `case`"));
                    }
                    if single_body.replace(body).is_some() {
                        return Err(syntax(line_no, head_col, "duplicate definition"));
                    }
                }
                other => {
                    return Err(syntax(line_no, head_col, format!("unknown directive `{other}`")));
                }
            }
        }
    }

    let mut initial = match span {
        Some((lo, hi, value)) => {
            InitialConditions::with_span(lo, hi, value).map_err(DefError::from)?
        }
        None => InitialConditions::new(),
    };
    for (line_no, index, value) in inits {
        match initial.set(index, value) {
            Ok(None) => {}
            Ok(Some(_)) => {
                return Err(syntax(line_no, 1, format!("duplicate initial condition for index {index}")));
            }
            Err(e) => return Err(ParseError::Def(DefError::from(e))),
        }
    }

    let name = name.unwrap_or_else(|| "A".to_string());
    let start = start.unwrap_or(0);
    let def = match (single_body, cases) {
        (Some(body), _) => RecurrenceDef::single(name, start, initial, body)?,
        (None, cases) if !cases.is_empty() => {
            RecurrenceDef::with_cases(name, start, initial, cases)?
        }
        _ => return Err(syntax(1, 1, "missing definition (`def` or `case` lines)")),
    };
    Ok(def)
}

// ---------------------------------------------------------------------------
// Builtins

pub const BUILTINS: &[&str] = &["Q", "C", "V", "G", "golomb"];

const Q_SRC: &str = "name Q\nstart 1\ninit 1=1, 2=1\ndef A(n) = A(n - A(n - 1)) + A(n - A(n - 2))\n";
const C_SRC: &str = "name C\nstart 1\ninit 1=1, 2=1\ndef A(n) = A(A(n - 1)) + A(n - A(n - 1))\n";
const V_SRC: &str =
    "name V\nstart 1\ninit 1=1, 2=1, 3=1, 4=1\ndef A(n) = A(n - A(n - 1)) + A(n - A(n - 4))\n";
const G_SRC: &str = "name G\nstart 0\ninit 0=0\ndef A(n) = n - A(A(n - 1))\n";
const GOLOMB_SRC: &str = "name golomb\nstart 1\ninit 1=1\ndef A(n) = A(n - A(n - 1)) + 1\n";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown builtin `{0}`; expected one of Q, C, V, G, golomb")]
pub struct UnknownBuiltin(pub String);

/// The named recurrences with their standard initial conditions.
pub fn builtin(name: &str) -> Result<RecurrenceDef, UnknownBuiltin> {
    let src = match name {
        "Q" => Q_SRC,
        "C" => C_SRC,
        "V" => V_SRC,
        "G" => G_SRC,
        "golomb" => GOLOMB_SRC,
        other => return Err(UnknownBuiltin(other.to_string())),
    };
    Ok(parse_recurrence(src).expect("builtin sources are valid"))
}
