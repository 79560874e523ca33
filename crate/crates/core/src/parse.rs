//! Text syntax for words, group elements, equations, systems and group
//! descriptions.
//!
//! Words: identifiers for generators, `?name` for unknowns, `^` with an
//! integer (or `^(p/q)` for rational factors), `*` or whitespace for
//! products, `[u,v,...]` for left-normed commutators, `(u,v)` for the
//! product of the components of a pair, and `1` for the identity.

use std::collections::HashMap;

use num::{BigInt, BigRational};

use crate::eqsys::{Equation, EquationSystem, Item, MixedWord, VarId};
use crate::error::{Error, Result};
use crate::freewords::Word;
use crate::groups::{Element, Group};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    Caret,
    Star,
    Slash,
    Minus,
    Comma,
    Eq,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(text: &str, line: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '^' => Some(Tok::Caret),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, col });
            i += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    col,
                });
                i += 2;
            } else {
                out.push(Token {
                    tok: Tok::Minus,
                    col,
                });
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s
                .parse::<i64>()
                .map_err(|_| Error::parse(line, col, format!("integer {s} out of range")))?;
            out.push(Token {
                tok: Tok::Int(n),
                col,
            });
            continue;
        }
        let is_var = c == '?';
        let start = if is_var { i + 1 } else { i };
        let mut j = start;
        while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
            j += 1;
        }
        if j == start || !(chars[start].is_alphabetic() || chars[start] == '_') {
            return Err(Error::parse(
                line,
                col,
                if is_var {
                    "expected a variable name after '?'".to_string()
                } else {
                    format!("unexpected character '{c}'")
                },
            ));
        }
        let name: String = chars[start..j].iter().collect();
        out.push(Token {
            tok: if is_var {
                Tok::Var(name)
            } else {
                Tok::Ident(name)
            },
            col,
        });
        i = j;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Exponent {
    Int(i64),
    Frac(i64, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    One,
    Gen(String, usize),
    Var(String, usize),
    Pow(Box<Expr>, Exponent, usize),
    Product(Vec<Expr>),
    Comm(Vec<Expr>),
    Tuple(Vec<Expr>),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], line: usize, text: &str) -> Self {
        Parser {
            toks,
            pos: 0,
            line,
            end_col: text.chars().count() + 1,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col(), msg)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn starts_term(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Var(_) | Tok::Int(_) | Tok::LParen | Tok::LBracket)
        )
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                terms.push(self.term()?);
            } else if self.starts_term() {
                terms.push(self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Product(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            let caret_col = self.col();
            self.pos += 1;
            let exp = self.exponent().map_err(|_| {
                Error::parse(self.line, caret_col, "expected an exponent after '^'")
            })?;
            base = Expr::Pow(Box::new(base), exp, caret_col);
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Int(n)) => Ok(if neg { -n } else { n }),
            _ => Err(self.err("expected an integer")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let p = self.signed_int()?;
            let e = if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                let q = self.signed_int()?;
                if q == 0 {
                    return Err(self.err("zero denominator"));
                }
                Exponent::Frac(p, q)
            } else {
                Exponent::Int(p)
            };
            self.expect(Tok::RParen, "')'")?;
            Ok(e)
        } else {
            Ok(Exponent::Int(self.signed_int()?))
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Ident(name)) => Ok(Expr::Gen(name, col)),
            Some(Tok::Var(name)) => Ok(Expr::Var(name, col)),
            Some(Tok::Int(1)) => Ok(Expr::One),
            Some(Tok::Int(n)) => Err(Error::parse(
                self.line,
                col,
                format!("unexpected integer {n}; only 1 denotes an element"),
            )),
            Some(Tok::LParen) => {
                let mut items = vec![self.expr()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen, "')'")?;
                Ok(if items.len() == 1 {
                    items.pop().unwrap()
                } else {
                    Expr::Tuple(items)
                })
            }
            Some(Tok::LBracket) => {
                let mut items = vec![self.expr()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    items.push(self.expr()?);
                }
                self.expect(Tok::RBracket, "']'")?;
                if items.len() < 2 {
                    return Err(Error::parse(
                        self.line,
                        col,
                        "a commutator needs at least two entries",
                    ));
                }
                Ok(Expr::Comm(items))
            }
            _ => {
                self.pos -= 1;
                Err(Error::parse(self.line, col, "expected a word"))
            }
        }
    }
}

/// Target of expression evaluation.
trait Algebra {
    type V: Clone;
    fn one(&self) -> Self::V;
    fn gen(&mut self, name: &str, col: usize) -> Result<Self::V>;
    fn var(&mut self, name: &str, col: usize) -> Result<Self::V>;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn inv(&self, a: &Self::V) -> Result<Self::V>;
    fn pow(&self, a: &Self::V, k: i64) -> Result<Self::V>;
    fn frac_pow(&self, a: &Self::V, p: i64, q: i64, col: usize) -> Result<Self::V>;
}

fn eval<A: Algebra>(alg: &mut A, e: &Expr) -> Result<A::V> {
    match e {
        Expr::One => Ok(alg.one()),
        Expr::Gen(n, col) => alg.gen(n, *col),
        Expr::Var(n, col) => alg.var(n, *col),
        Expr::Pow(base, exp, col) => {
            let b = eval(alg, base)?;
            match exp {
                Exponent::Int(k) => alg.pow(&b, *k),
                Exponent::Frac(p, q) => alg.frac_pow(&b, *p, *q, *col),
            }
        }
        Expr::Product(items) | Expr::Tuple(items) => {
            let mut acc = alg.one();
            for it in items {
                let v = eval(alg, it)?;
                acc = alg.mul(&acc, &v)?;
            }
            Ok(acc)
        }
        Expr::Comm(items) => {
            let mut acc = eval(alg, &items[0])?;
            for it in &items[1..] {
                let v = eval(alg, it)?;
                let comm = alg.mul(
                    &alg.mul(&alg.mul(&alg.inv(&acc)?, &alg.inv(&v)?)?, &acc)?,
                    &v,
                )?;
                acc = comm;
            }
            Ok(acc)
        }
    }
}

/// Generator names for free words; new names are interned on first use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let mut a = Alphabet::default();
        for n in names {
            a.intern(n.as_ref());
        }
        a
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, g: u32) -> String {
        self.names
            .get(g as usize)
            .cloned()
            .unwrap_or_else(|| format!("g{g}"))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn format(&self, w: &Word) -> String {
        crate::groups::format_word(w, |g| self.name(g))
    }
}

/// Parses a word over letters `p1, p2, ...` for a one-letter prefix `p`
/// (a bare `p` means `p1`). Returns the word over generators `0, 1, ...`
/// and the largest index used.
pub fn parse_indexed_word(text: &str, prefix: char) -> Result<(Word, usize)> {
    let mut alphabet = Alphabet::default();
    let w = parse_word(text, &mut alphabet)?;
    let mut index = Vec::new();
    for name in alphabet.names() {
        let k = match name.strip_prefix(prefix) {
            Some("") => 1,
            Some(d) => d.parse::<u32>().ok().filter(|&k| k >= 1).ok_or_else(|| {
                Error::parse(
                    1,
                    1,
                    format!("expected letters {prefix}1, {prefix}2, ...; found {name}"),
                )
            })?,
            None => {
                return Err(Error::parse(
                    1,
                    1,
                    format!("expected letters {prefix}1, {prefix}2, ...; found {name}"),
                ))
            }
        };
        index.push(k - 1);
    }
    let word = w.substitute(|g| Word::gen(index[g.0 as usize]));
    let arity = index.iter().map(|&k| k as usize + 1).max().unwrap_or(0);
    Ok((word, arity))
}

struct FreeAlgebra<'a> {
    alphabet: &'a mut Alphabet,
    line: usize,
}

impl Algebra for FreeAlgebra<'_> {
    type V = Word;
    fn one(&self) -> Word {
        Word::identity()
    }
    fn gen(&mut self, name: &str, _col: usize) -> Result<Word> {
        Ok(Word::gen(self.alphabet.intern(name)))
    }
    fn var(&mut self, name: &str, col: usize) -> Result<Word> {
        Err(Error::parse(
            self.line,
            col,
            format!("unknown ?{name} is not allowed in a free word"),
        ))
    }
    fn mul(&self, a: &Word, b: &Word) -> Result<Word> {
        Ok(a.mul(b))
    }
    fn inv(&self, a: &Word) -> Result<Word> {
        Ok(a.inverse())
    }
    fn pow(&self, a: &Word, k: i64) -> Result<Word> {
        Ok(a.pow(k))
    }
    fn frac_pow(&self, _a: &Word, _p: i64, _q: i64, col: usize) -> Result<Word> {
        Err(Error::parse(
            self.line,
            col,
            "fractional exponents need a rational factor",
        ))
    }
}

struct MixedAlgebra<'a> {
    group: &'a Group,
    vars: &'a mut Vec<String>,
    allow_vars: bool,
    line: usize,
}

impl Algebra for MixedAlgebra<'_> {
    type V = MixedWord;
    fn one(&self) -> MixedWord {
        MixedWord::identity()
    }
    fn gen(&mut self, name: &str, col: usize) -> Result<MixedWord> {
        let g = self.group.generator(name).ok_or_else(|| {
            Error::parse(
                self.line,
                col,
                format!("unknown generator {name} of {}", self.group),
            )
        })?;
        MixedWord::constant(self.group, g)
    }
    fn var(&mut self, name: &str, col: usize) -> Result<MixedWord> {
        if !self.allow_vars {
            return Err(Error::parse(
                self.line,
                col,
                format!("unknown ?{name} is not allowed here"),
            ));
        }
        let idx = match self.vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.vars.push(name.to_string());
                self.vars.len() - 1
            }
        };
        Ok(MixedWord::var(VarId(idx)))
    }
    fn mul(&self, a: &MixedWord, b: &MixedWord) -> Result<MixedWord> {
        a.mul(self.group, b)
    }
    fn inv(&self, a: &MixedWord) -> Result<MixedWord> {
        a.inverse(self.group)
    }
    fn pow(&self, a: &MixedWord, k: i64) -> Result<MixedWord> {
        // constants are powered in the group so b^4000 stays cheap
        match a.items() {
            [Item::Const(x)] => MixedWord::constant(self.group, self.group.power(x, k)?),
            [Item::Var(v, e)] => Ok(MixedWord::var_power(*v, e * k)),
            _ => a.pow(self.group, k),
        }
    }
    fn frac_pow(&self, a: &MixedWord, p: i64, q: i64, col: usize) -> Result<MixedWord> {
        match a.items() {
            [Item::Const(x)] => {
                let r = BigRational::new(BigInt::from(p), BigInt::from(q));
                let y = self
                    .group
                    .rational_power(x, &r)
                    .map_err(|e| Error::parse(self.line, col, e.to_string()))?;
                MixedWord::constant(self.group, y)
            }
            _ => Err(Error::parse(
                self.line,
                col,
                "fractional exponents apply to rational generators only",
            )),
        }
    }
}

fn parse_expr(text: &str, line: usize) -> Result<Expr> {
    let toks = lex(text, line)?;
    let mut p = Parser::new(&toks, line, text);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a free word, interning unseen generator names.
pub fn parse_word(text: &str, alphabet: &mut Alphabet) -> Result<Word> {
    let e = parse_expr(text, 1)?;
    eval(&mut FreeAlgebra { alphabet, line: 1 }, &e)
}

/// Parses a mixed word; unknowns are looked up in (or appended to) `vars`.
pub fn parse_mixed(text: &str, group: &Group, vars: &mut Vec<String>) -> Result<MixedWord> {
    parse_mixed_at(text, group, vars, 1)
}

fn parse_mixed_at(
    text: &str,
    group: &Group,
    vars: &mut Vec<String>,
    line: usize,
) -> Result<MixedWord> {
    let e = parse_expr(text, line)?;
    eval(
        &mut MixedAlgebra {
            group,
            vars,
            allow_vars: true,
            line,
        },
        &e,
    )
}

/// Parses a group element written over the group's named generators.
pub fn parse_element(text: &str, group: &Group) -> Result<Element> {
    parse_element_at(text, group, 1)
}

fn parse_element_at(text: &str, group: &Group, line: usize) -> Result<Element> {
    let e = parse_expr(text, line)?;
    let mut vars = Vec::new();
    let w = eval(
        &mut MixedAlgebra {
            group,
            vars: &mut vars,
            allow_vars: false,
            line,
        },
        &e,
    )?;
    w.evaluate(group, &[])
}

/// Parses `lhs = rhs`.
pub fn parse_equation(text: &str, group: &Group, vars: &mut Vec<String>) -> Result<Equation> {
    parse_equation_at(text, group, vars, 1)
}

fn parse_equation_at(
    text: &str,
    group: &Group,
    vars: &mut Vec<String>,
    line: usize,
) -> Result<Equation> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            '=' if depth == 0 => {
                if split.is_some() {
                    return Err(Error::parse(
                        line,
                        text[..i].chars().count() + 1,
                        "more than one '='",
                    ));
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    let Some(at) = split else {
        return Err(Error::parse(line, 1, "expected an equation 'lhs = rhs'"));
    };
    let offset = text[..=at].chars().count();
    let lhs = parse_mixed_at(&text[..at], group, vars, line)?;
    let rhs = parse_element_at(&text[at + 1..], group, line).map_err(|e| match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column: column + offset,
            message,
        },
        other => other,
    })?;
    Ok(Equation { lhs, rhs })
}

/// Parses a system file: an optional `group:` header line followed by one
/// equation per line; `#` starts a comment. Without a header the group
/// must be supplied.
pub fn parse_system(text: &str, default_group: Option<&Group>) -> Result<EquationSystem> {
    let mut group = default_group.cloned();
    let mut vars = Vec::new();
    let mut equations = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let trimmed = content.trim_start();
        if let Some(desc) = trimmed.strip_prefix("group:") {
            if !equations.is_empty() {
                return Err(Error::parse(line, 1, "group header after equations"));
            }
            let col = content.len() - trimmed.len() + "group:".len();
            group = Some(parse_group_at(desc, line).map_err(|e| shift_col(e, col))?);
            continue;
        }
        let g = group
            .as_ref()
            .ok_or_else(|| Error::parse(line, 1, "missing 'group:' header"))?;
        equations.push(parse_equation_at(content, g, &mut vars, line)?);
    }
    let group = group.ok_or_else(|| Error::parse(1, 1, "missing 'group:' header"))?;
    EquationSystem::new(group, vars, equations)
}

fn shift_col(e: Error, by: usize) -> Error {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column: column + by,
            message,
        },
        other => other,
    }
}

/// Prints a system in the file format read by [`parse_system`].
pub fn format_system(sys: &EquationSystem) -> String {
    let mut out = format!("group: {}\n", sys.group);
    for eq in &sys.equations {
        out.push_str(&sys.format_equation(eq));
        out.push('\n');
    }
    out
}

/// Parses a group description such as
/// `semidirect(free(b,c), cyclic(a,2), action{b->b^-1, c->c})`.
pub fn parse_group(text: &str) -> Result<Group> {
    parse_group_at(text, 1)
}

fn parse_group_at(text: &str, line: usize) -> Result<Group> {
    let toks = lex(text, line)?;
    let mut p = Parser::new(&toks, line, text);
    let g = group_expr(&mut p)?;
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(g)
}

fn ident(p: &mut Parser) -> Result<String> {
    match p.bump() {
        Some(Tok::Ident(s)) => Ok(s),
        _ => {
            p.pos -= 1;
            Err(p.err("expected a name"))
        }
    }
}

fn uint(p: &mut Parser) -> Result<u64> {
    match p.bump() {
        Some(Tok::Int(n)) if n >= 0 => Ok(n as u64),
        _ => {
            p.pos -= 1;
            Err(p.err("expected a nonnegative integer"))
        }
    }
}

fn name_list(p: &mut Parser) -> Result<Vec<String>> {
    let mut names = vec![ident(p)?];
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        names.push(ident(p)?);
    }
    Ok(names)
}

fn group_list(p: &mut Parser) -> Result<Vec<Group>> {
    let mut gs = vec![group_expr(p)?];
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        gs.push(group_expr(p)?);
    }
    Ok(gs)
}

fn at(p: &Parser, col: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(p.line, col, other.to_string()),
    }
}

fn group_expr(p: &mut Parser) -> Result<Group> {
    let col = p.col();
    let kind = ident(p)?;
    p.expect(Tok::LParen, "'('")?;
    let g = match kind.as_str() {
        "free" => Group::free(&name_list(p)?),
        "cyclic" => {
            let name = ident(p)?;
            p.expect(Tok::Comma, "','")?;
            let n = uint(p)?;
            Group::cyclic(&name, n).map_err(|e| at(p, col, e))?
        }
        "symmetric" => Group::symmetric(uint(p)? as usize).map_err(|e| at(p, col, e))?,
        "rational" => Group::rational(uint(p)? as usize),
        "surface" => {
            let orient = ident(p)?;
            let orientable = match orient.as_str() {
                "orientable" => true,
                "nonorientable" => false,
                _ => return Err(p.err("expected orientable or nonorientable")),
            };
            p.expect(Tok::Comma, "','")?;
            let key = ident(p)?;
            if key != "genus" {
                return Err(p.err("expected genus=<n>"));
            }
            p.expect(Tok::Eq, "'='")?;
            Group::surface(orientable, uint(p)? as usize)
        }
        "direct" => Group::direct(group_list(p)?).map_err(|e| at(p, col, e))?,
        "freeproduct" => Group::free_product(group_list(p)?).map_err(|e| at(p, col, e))?,
        "semidirect" => {
            let base = match group_expr(p)? {
                Group::Free { names } => names,
                _ => return Err(Error::parse(p.line, col, "semidirect base must be free")),
            };
            p.expect(Tok::Comma, "','")?;
            let (acting, order) = match group_expr(p)? {
                Group::Cyclic { name, order } => (name, order),
                _ => return Err(Error::parse(p.line, col, "acting group must be cyclic")),
            };
            p.expect(Tok::Comma, "','")?;
            let kw = ident(p)?;
            if kw != "action" {
                return Err(p.err("expected action{...}"));
            }
            p.expect(Tok::LBrace, "'{'")?;
            let mut alphabet = Alphabet::new(&base);
            let mut images: Vec<Option<Word>> = vec![None; base.len()];
            loop {
                let gcol = p.col();
                let g = ident(p)?;
                let idx = alphabet
                    .lookup(&g)
                    .filter(|&i| (i as usize) < base.len())
                    .ok_or_else(|| Error::parse(p.line, gcol, format!("unknown generator {g}")))?;
                p.expect(Tok::Arrow, "'->'")?;
                let e = p.expr()?;
                let w = eval(
                    &mut FreeAlgebra {
                        alphabet: &mut alphabet,
                        line: p.line,
                    },
                    &e,
                )?;
                images[idx as usize] = Some(w);
                if p.peek() == Some(&Tok::Comma) {
                    p.pos += 1;
                } else {
                    break;
                }
            }
            p.expect(Tok::RBrace, "'}'")?;
            if alphabet.names().len() > base.len() {
                return Err(Error::parse(
                    p.line,
                    col,
                    "action uses an unknown generator",
                ));
            }
            // unlisted generators are fixed
            let images = images
                .into_iter()
                .enumerate()
                .map(|(i, w)| w.unwrap_or_else(|| Word::gen(i as u32)))
                .collect();
            Group::semidirect(&base, &acting, order, images).map_err(|e| at(p, col, e))?
        }
        other => {
            return Err(Error::parse(
                p.line,
                col,
                format!("unknown group kind {other}"),
            ))
        }
    };
    p.expect(Tok::RParen, "')'")?;
    Ok(g)
}
