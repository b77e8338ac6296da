//! Encoding 2-CNF formulas as structures over the three-relation Boolean
//! template.
//!
//! A clause with two positive literals (x | y) becomes a tuple of the
//! relation missing (0, 0); a mixed clause, normalized positive literal
//! first, becomes a tuple of the relation missing (0, 1); a clause with
//! two negative literals becomes a tuple of the relation missing (1, 1).
//! Assignments of the formula then correspond exactly to homomorphisms
//! into the template.
//!
//! Input is DIMACS-like: optional comment lines starting with `c`, a
//! `p cnf <vars> <clauses>` header, then one clause per line with exactly
//! two literals and an optional terminating 0.

use crate::error::{Error, Result};
use crate::generators::b_2sat;
use crate::structure::RelationalStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    /// 1-based variable index.
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        Literal { var, positive }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoClause(pub Literal, pub Literal);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwoCnf {
    pub num_vars: u32,
    pub clauses: Vec<TwoClause>,
}

impl TwoCnf {
    /// Truth-table satisfiability check, for cross-checking the encoding.
    pub fn brute_force_satisfiable(&self) -> bool {
        assert!(self.num_vars < 24, "truth table too large");
        (0u32..(1 << self.num_vars)).any(|m| {
            self.clauses.iter().all(|TwoClause(l1, l2)| {
                [l1, l2]
                    .iter()
                    .any(|l| ((m >> (l.var - 1)) & 1 == 1) == l.positive)
            })
        })
    }
}

/// Parses a DIMACS-like 2-CNF. Every clause line must hold exactly two
/// literals.
pub fn parse_dimacs(text: &str) -> Result<TwoCnf> {
    let mut cnf: Option<TwoCnf> = None;
    for (li, line) in text.lines().enumerate() {
        let lineno = li + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if cnf.is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    col: 1,
                    msg: "duplicate problem header".to_string(),
                });
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(Error::Parse {
                    line: lineno,
                    col: 1,
                    msg: format!("expected 'p cnf <vars> <clauses>', got '{trimmed}'"),
                });
            }
            let num_vars = fields[2].parse::<u32>().map_err(|_| Error::Parse {
                line: lineno,
                col: 1,
                msg: format!("bad variable count '{}'", fields[2]),
            })?;
            cnf = Some(TwoCnf {
                num_vars,
                clauses: Vec::new(),
            });
            continue;
        }
        let Some(cnf) = cnf.as_mut() else {
            return Err(Error::Parse {
                line: lineno,
                col: 1,
                msg: "clause before the problem header".to_string(),
            });
        };
        let mut lits = Vec::new();
        for tok in trimmed.split_whitespace() {
            let col = line.find(tok).unwrap_or(0) + 1;
            let v = tok.parse::<i64>().map_err(|_| Error::Parse {
                line: lineno,
                col,
                msg: format!("bad literal '{tok}'"),
            })?;
            lits.push((v, col));
        }
        if let Some(&(0, _)) = lits.last() {
            lits.pop();
        }
        if lits.len() != 2 {
            return Err(Error::NotTwoSat(lits.len()));
        }
        let mut clause = Vec::new();
        for (v, col) in lits {
            let var = v.unsigned_abs() as u32;
            if v == 0 || var > cnf.num_vars {
                return Err(Error::Parse {
                    line: lineno,
                    col,
                    msg: format!("literal {v} out of range for {} variables", cnf.num_vars),
                });
            }
            clause.push(Literal::new(var, v > 0));
        }
        cnf.clauses.push(TwoClause(clause[0], clause[1]));
    }
    cnf.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        col: 1,
        msg: "missing problem header".to_string(),
    })
}

/// Encodes a 2-CNF as a structure over the Boolean template's vocabulary.
/// The universe is the declared variables "1".."num_vars"; each clause
/// adds one tuple, with mixed clauses normalized positive-first.
pub fn encode_2sat(cnf: &TwoCnf) -> Result<RelationalStructure> {
    let universe: Vec<String> = (1..=cnf.num_vars).map(|v| v.to_string()).collect();
    let mut a = RelationalStructure::new(b_2sat().vocab().clone(), universe)?;
    for TwoClause(l1, l2) in &cnf.clauses {
        for l in [l1, l2] {
            if l.var == 0 || l.var > cnf.num_vars {
                return Err(Error::UnknownElement(format!("variable {}", l.var)));
            }
        }
        let (sym, x, y) = match (l1.positive, l2.positive) {
            (true, true) => ("P0", l1.var, l2.var),
            (true, false) => ("P1", l1.var, l2.var),
            (false, true) => ("P1", l2.var, l1.var),
            (false, false) => ("P2", l1.var, l2.var),
        };
        a.add_tuple(sym, vec![x.to_string(), y.to_string()])?;
    }
    Ok(a)
}
