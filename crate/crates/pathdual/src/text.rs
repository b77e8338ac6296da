//! Text formats for structures, path decompositions, Datalog programs,
//! SNP sentences, and formulas.
//!
//! All formats share one tokenizer: whitespace-insensitive, `#` starts a
//! line comment, identifiers are runs of letters, digits, `_`, `@`, `-`,
//! and interior `.` (a dot directly before another identifier character
//! continues the token, so `0.x` is one name while the rule terminator in
//! `E(x,y).` stays its own token).
//!
//! Formats:
//! - structure: `vocab E/2` then `structure NAME { universe a b ; E (a b) ; }`
//! - decomposition: `decomp { (a b) (b c) () }`
//! - program: `program NAME { idb P/2 Q/0 ; goal Q ; P(x,y) :- E(x,y). ; }`
//!   (input relations are inferred from body atoms; an empty body prints
//!   as `P() :- .`)
//! - sentence: `snp NAME { so S/1 ; vars x y ; clause S(x) | !E(x,y) ; }`
//!   with `!` for negation and `x = y` for equality literals
//! - formula: S-expressions `(exists x (and (E x y) (= x y)))`, with
//!   `(and)` for truth and `(or)` for falsity

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::datalog::{DatalogAtom, DatalogRule, LinearDatalogProgram};
use crate::error::{Error, Result};
use crate::logic::EPFormula;
use crate::pathwidth::PathDecomposition;
use crate::snp::{KromSNPSentence, SNPClause, SNPLiteral};
use crate::structure::{RelationalStructure, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Dot,
    Pipe,
    Bang,
    Turnstile,
    Equals,
    Slash,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Semi => write!(f, "';'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Pipe => write!(f, "'|'"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Turnstile => write!(f, "':-'"),
            Tok::Equals => write!(f, "'='"),
            Tok::Slash => write!(f, "'/'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '@' | '-')
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for k in 0..n {
                if chars[*i + k] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
            }
            *i += n;
        };
        if c == '#' {
            let mut n = 0;
            while i + n < chars.len() && chars[i + n] != '\n' {
                n += 1;
            }
            advance(n, &mut i, &mut line, &mut col);
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut line, &mut col);
            continue;
        }
        if ident_char(c) {
            let mut n = 1;
            while i + n < chars.len() {
                let d = chars[i + n];
                if ident_char(d) {
                    n += 1;
                } else if d == '.'
                    && i + n + 1 < chars.len()
                    && ident_char(chars[i + n + 1])
                {
                    n += 2;
                } else {
                    break;
                }
            }
            let word: String = chars[i..i + n].iter().collect();
            advance(n, &mut i, &mut line, &mut col);
            tokens.push(Token {
                tok: Tok::Ident(word),
                line: tl,
                col: tc,
            });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '|' => Tok::Pipe,
            '!' => Tok::Bang,
            '=' => Tok::Equals,
            '/' => Tok::Slash,
            ':' => {
                if chars.get(i + 1) == Some(&'-') {
                    advance(1, &mut i, &mut line, &mut col);
                    Tok::Turnstile
                } else {
                    return Err(Error::Parse {
                        line: tl,
                        col: tc,
                        msg: "expected ':-'".to_string(),
                    });
                }
            }
            other => {
                return Err(Error::Parse {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        };
        advance(1, &mut i, &mut line, &mut col);
        tokens.push(Token {
            tok,
            line: tl,
            col: tc,
        });
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self
            .tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or_else(|| {
                self.tokens
                    .last()
                    .map(|t| (t.line, t.col + 1))
                    .unwrap_or((1, 1))
            });
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Result<Tok> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| self.err("unexpected end of input"))?
            .tok
            .clone();
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &Tok) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Tok::Ident(s) = self.bump()? else {
                    unreachable!()
                };
                Ok(s)
            }
            Some(t) => Err(self.err(format!("expected a name, found {t}"))),
            None => Err(self.err("expected a name, found end of input")),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let got = self.ident()?;
        if got == word {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(format!("expected '{word}', found '{got}'")))
        }
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == Some(tok)
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == word)
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.err("trailing input after the document"))
        }
    }

    /// `name/arity` pairs until the stream stops looking like one.
    fn vocab_pairs(&mut self) -> Result<Vec<(String, usize)>> {
        let mut pairs = Vec::new();
        while matches!(self.peek(), Some(Tok::Ident(_)))
            && self.tokens.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Slash)
        {
            let sym = self.ident()?;
            self.expect(&Tok::Slash)?;
            let arity_word = self.ident()?;
            let arity = arity_word.parse::<usize>().map_err(|_| {
                self.err(format!("bad arity '{arity_word}' for symbol '{sym}'"))
            })?;
            pairs.push((sym, arity));
        }
        Ok(pairs)
    }

    /// `(a b c)` as a list of names.
    fn paren_group(&mut self) -> Result<Vec<String>> {
        self.expect(&Tok::LParen)?;
        let mut elems = Vec::new();
        while !self.at(&Tok::RParen) {
            elems.push(self.ident()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(elems)
    }

    /// `P(x,y)` with a possibly empty argument list.
    fn call_atom(&mut self) -> Result<(String, Vec<String>)> {
        let name = self.ident()?;
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            args.push(self.ident()?);
            while self.at(&Tok::Comma) {
                self.bump()?;
                args.push(self.ident()?);
            }
        }
        self.expect(&Tok::RParen)?;
        Ok((name, args))
    }
}

/// `vocab E/2` then `structure NAME { universe a b ; E (a b) ; }`.
pub fn format_structure(name: &str, s: &RelationalStructure) -> String {
    let mut out = String::from("vocab");
    for (sym, arity) in s.vocab().symbols() {
        write!(out, " {sym}/{arity}").unwrap();
    }
    write!(out, "\nstructure {name} {{ universe").unwrap();
    for e in s.universe() {
        write!(out, " {e}").unwrap();
    }
    out.push_str(" ;");
    for (sym, _) in s.vocab().symbols() {
        let rel = s.relation(sym).unwrap();
        if rel.is_empty() {
            continue;
        }
        write!(out, " {sym}").unwrap();
        for tuple in rel {
            write!(out, " ({})", tuple.join(" ")).unwrap();
        }
        out.push_str(" ;");
    }
    out.push_str(" }\n");
    out
}

/// Parses the output of [`format_structure`]; returns the name and the
/// structure.
pub fn parse_structure(text: &str) -> Result<(String, RelationalStructure)> {
    let mut p = Parser::new(text)?;
    p.keyword("vocab")?;
    let pairs = p.vocab_pairs()?;
    let vocab = Vocabulary::new(pairs)?;
    p.keyword("structure")?;
    let name = p.ident()?;
    p.expect(&Tok::LBrace)?;
    p.keyword("universe")?;
    let mut universe = Vec::new();
    while !p.at(&Tok::Semi) {
        universe.push(p.ident()?);
    }
    p.expect(&Tok::Semi)?;
    let mut s = RelationalStructure::new(vocab, universe)?;
    while !p.at(&Tok::RBrace) {
        let sym = p.ident()?;
        while p.at(&Tok::LParen) {
            let tuple = p.paren_group()?;
            s.add_tuple(&sym, tuple)?;
        }
        p.expect(&Tok::Semi)?;
    }
    p.expect(&Tok::RBrace)?;
    p.finish()?;
    Ok((name, s))
}

/// `decomp { (a b) (b c) () }`.
pub fn format_decomposition(d: &PathDecomposition) -> String {
    let mut out = String::from("decomp {");
    for bag in d.bags() {
        let elems: Vec<&str> = bag.iter().map(|s| s.as_str()).collect();
        write!(out, " ({})", elems.join(" ")).unwrap();
    }
    out.push_str(" }\n");
    out
}

pub fn parse_decomposition(text: &str) -> Result<PathDecomposition> {
    let mut p = Parser::new(text)?;
    p.keyword("decomp")?;
    p.expect(&Tok::LBrace)?;
    let mut bags: Vec<BTreeSet<String>> = Vec::new();
    while p.at(&Tok::LParen) {
        bags.push(p.paren_group()?.into_iter().collect());
    }
    p.expect(&Tok::RBrace)?;
    p.finish()?;
    Ok(PathDecomposition::new(bags))
}

fn format_datalog_atom(atom: &DatalogAtom) -> String {
    format!("{}({})", atom.pred, atom.args.join(","))
}

/// `program NAME { idb P/2 Q/0 ; goal Q ; P(x,y) :- E(x,y). ; }`. Input
/// relations are not written; they are inferred from body atoms.
pub fn format_program(name: &str, prog: &LinearDatalogProgram) -> String {
    let mut out = format!("program {name} {{ idb");
    for (sym, arity) in prog.idb().symbols() {
        write!(out, " {sym}/{arity}").unwrap();
    }
    write!(out, " ; goal {} ;", prog.goal()).unwrap();
    for rule in prog.rules() {
        write!(out, " {} :-", format_datalog_atom(&rule.head)).unwrap();
        let body: Vec<String> = rule.body.iter().map(format_datalog_atom).collect();
        if body.is_empty() {
            out.push_str(" . ;");
        } else {
            write!(out, " {}. ;", body.join(", ")).unwrap();
        }
    }
    out.push_str(" }\n");
    out
}

/// Parses the output of [`format_program`]. Symbols in rule bodies that
/// are not declared IDB become input relations, with arities taken from
/// their first occurrence.
pub fn parse_program(text: &str) -> Result<(String, LinearDatalogProgram)> {
    let mut p = Parser::new(text)?;
    p.keyword("program")?;
    let name = p.ident()?;
    p.expect(&Tok::LBrace)?;
    p.keyword("idb")?;
    let idb_pairs = p.vocab_pairs()?;
    p.expect(&Tok::Semi)?;
    p.keyword("goal")?;
    let goal = p.ident()?;
    p.expect(&Tok::Semi)?;
    let idb_syms: BTreeSet<&str> = idb_pairs.iter().map(|(s, _)| s.as_str()).collect();
    let mut rules = Vec::new();
    let mut edb_pairs: Vec<(String, usize)> = Vec::new();
    while !p.at(&Tok::RBrace) {
        let (pred, args) = p.call_atom()?;
        let head = DatalogAtom {
            pred,
            args,
        };
        p.expect(&Tok::Turnstile)?;
        let mut body = Vec::new();
        if !p.at(&Tok::Dot) {
            loop {
                let (pred, args) = p.call_atom()?;
                if !idb_syms.contains(pred.as_str())
                    && !edb_pairs.iter().any(|(s, _)| s == &pred)
                {
                    edb_pairs.push((pred.clone(), args.len()));
                }
                body.push(DatalogAtom { pred, args });
                if p.at(&Tok::Comma) {
                    p.bump()?;
                } else {
                    break;
                }
            }
        }
        p.expect(&Tok::Dot)?;
        p.expect(&Tok::Semi)?;
        rules.push(DatalogRule { head, body });
    }
    p.expect(&Tok::RBrace)?;
    p.finish()?;
    let prog = LinearDatalogProgram::new(
        Vocabulary::new(edb_pairs)?,
        Vocabulary::new(idb_pairs)?,
        rules,
        goal,
    )?;
    Ok((name, prog))
}

fn format_snp_literal(lit: &SNPLiteral) -> String {
    match lit {
        SNPLiteral::Edb { neg, rel, args } | SNPLiteral::So { neg, rel, args } => {
            format!(
                "{}{}({})",
                if *neg { "!" } else { "" },
                rel,
                args.join(",")
            )
        }
        SNPLiteral::Eq { neg, left, right } => {
            format!("{}{} = {}", if *neg { "!" } else { "" }, left, right)
        }
    }
}

/// `snp NAME { so S/1 ; vars x y ; clause S(x) | !E(x,y) | !S(y) ; }`.
/// Input relations are inferred from atoms outside the `so` declarations.
pub fn format_sentence(name: &str, f: &KromSNPSentence) -> String {
    let mut out = format!("snp {name} {{ so");
    for (sym, arity) in f.so().symbols() {
        write!(out, " {sym}/{arity}").unwrap();
    }
    out.push_str(" ; vars");
    for v in f.fo_vars() {
        write!(out, " {v}").unwrap();
    }
    out.push_str(" ;");
    for clause in f.clauses() {
        out.push_str(" clause");
        let lits: Vec<String> = clause.iter().map(format_snp_literal).collect();
        if !lits.is_empty() {
            write!(out, " {}", lits.join(" | ")).unwrap();
        }
        out.push_str(" ;");
    }
    out.push_str(" }\n");
    out
}

/// Parses the output of [`format_sentence`].
pub fn parse_sentence(text: &str) -> Result<(String, KromSNPSentence)> {
    let mut p = Parser::new(text)?;
    p.keyword("snp")?;
    let name = p.ident()?;
    p.expect(&Tok::LBrace)?;
    p.keyword("so")?;
    let so_pairs = p.vocab_pairs()?;
    p.expect(&Tok::Semi)?;
    p.keyword("vars")?;
    let mut fo_vars = Vec::new();
    while !p.at(&Tok::Semi) {
        fo_vars.push(p.ident()?);
    }
    p.expect(&Tok::Semi)?;
    let so_syms: BTreeSet<&str> = so_pairs.iter().map(|(s, _)| s.as_str()).collect();
    let mut edb_pairs: Vec<(String, usize)> = Vec::new();
    let mut clauses: Vec<SNPClause> = Vec::new();
    while p.at_keyword("clause") {
        p.keyword("clause")?;
        let mut clause: SNPClause = Vec::new();
        while !p.at(&Tok::Semi) {
            if !clause.is_empty() {
                p.expect(&Tok::Pipe)?;
            }
            let neg = if p.at(&Tok::Bang) {
                p.bump()?;
                true
            } else {
                false
            };
            let first = p.ident()?;
            if p.at(&Tok::Equals) {
                p.bump()?;
                let right = p.ident()?;
                clause.push(SNPLiteral::Eq {
                    neg,
                    left: first,
                    right,
                });
                continue;
            }
            p.pos -= 1;
            let (rel, args) = p.call_atom()?;
            if so_syms.contains(rel.as_str()) {
                clause.push(SNPLiteral::So { neg, rel, args });
            } else {
                if !edb_pairs.iter().any(|(s, _)| s == &rel) {
                    edb_pairs.push((rel.clone(), args.len()));
                }
                clause.push(SNPLiteral::Edb { neg, rel, args });
            }
        }
        p.expect(&Tok::Semi)?;
        clauses.push(clause);
    }
    p.expect(&Tok::RBrace)?;
    p.finish()?;
    let sentence = KromSNPSentence::new(
        Vocabulary::new(edb_pairs)?,
        Vocabulary::new(so_pairs)?,
        fo_vars,
        clauses,
    )?;
    Ok((name, sentence))
}

/// S-expression form: `(and ...)`, `(or ...)`, `(exists x body)`,
/// `(= x y)`, `(E x y)`; truth is `(and)` and falsity `(or)`.
pub fn format_formula(f: &EPFormula) -> String {
    match f {
        EPFormula::True => "(and)".to_string(),
        EPFormula::False => "(or)".to_string(),
        EPFormula::Atom { rel, args } => {
            let mut out = format!("({rel}");
            for a in args {
                write!(out, " {a}").unwrap();
            }
            out.push(')');
            out
        }
        EPFormula::Eq(a, b) => format!("(= {a} {b})"),
        EPFormula::And(fs) | EPFormula::Or(fs) => {
            let head = if matches!(f, EPFormula::And(_)) {
                "and"
            } else {
                "or"
            };
            let mut out = format!("({head}");
            for g in fs {
                write!(out, " {}", format_formula(g)).unwrap();
            }
            out.push(')');
            out
        }
        EPFormula::Exists(v, g) => format!("(exists {v} {})", format_formula(g)),
    }
}

pub fn parse_formula(text: &str) -> Result<EPFormula> {
    let mut p = Parser::new(text)?;
    let f = parse_formula_inner(&mut p)?;
    p.finish()?;
    Ok(f)
}

fn parse_formula_inner(p: &mut Parser) -> Result<EPFormula> {
    p.expect(&Tok::LParen)?;
    if p.at(&Tok::Equals) {
        p.bump()?;
        let a = p.ident()?;
        let b = p.ident()?;
        p.expect(&Tok::RParen)?;
        return Ok(EPFormula::Eq(a, b));
    }
    let head = p.ident()?;
    let f = match head.as_str() {
        "and" | "or" => {
            let mut parts = Vec::new();
            while p.at(&Tok::LParen) {
                parts.push(parse_formula_inner(p)?);
            }
            match (head.as_str(), parts.is_empty()) {
                ("and", true) => EPFormula::True,
                ("or", true) => EPFormula::False,
                ("and", false) => EPFormula::And(parts),
                _ => EPFormula::Or(parts),
            }
        }
        "exists" => {
            let v = p.ident()?;
            let body = parse_formula_inner(p)?;
            EPFormula::Exists(v, Box::new(body))
        }
        _ => {
            let mut args = Vec::new();
            while !p.at(&Tok::RParen) {
                args.push(p.ident()?);
            }
            EPFormula::Atom { rel: head, args }
        }
    };
    p.expect(&Tok::RParen)?;
    Ok(f)
}
