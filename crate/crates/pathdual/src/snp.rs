//! Existential second-order sentences with a universal CNF first-order
//! part, over an input vocabulary plus second-order (SO) predicates.
//!
//! The flags that matter:
//! - Krom: at most two SO literals per clause.
//! - restricted: at most one positive and at most one negative SO literal
//!   per clause.
//! - monotone: input relations occur only negated.
//!
//! Restricted monotone sentences without equality translate to and from
//! linear Datalog (`datalog_to_snp` / `snp_to_datalog`); a sentence is true
//! on an input exactly when the corresponding program rejects it.
//! Evaluation grounds the first-order part against the input, simplifies
//! input and equality literals away, and solves the residual clauses (at
//! most two SO literals each) as a 2-SAT instance.

use std::collections::{BTreeMap, HashMap};

use crate::datalog::{DatalogAtom, DatalogRule, LinearDatalogProgram};
use crate::error::{Error, Result};
use crate::structure::{RelationalStructure, Vocabulary};
use crate::twosat::TwoSat;

/// One literal of a clause. `neg` is the polarity; `Edb` atoms refer to the
/// input vocabulary, `So` atoms to the existential predicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SNPLiteral {
    Edb {
        neg: bool,
        rel: String,
        args: Vec<String>,
    },
    So {
        neg: bool,
        rel: String,
        args: Vec<String>,
    },
    Eq {
        neg: bool,
        left: String,
        right: String,
    },
}

impl SNPLiteral {
    pub fn edb(neg: bool, rel: impl Into<String>, args: &[&str]) -> Self {
        SNPLiteral::Edb {
            neg,
            rel: rel.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn so(neg: bool, rel: impl Into<String>, args: &[&str]) -> Self {
        SNPLiteral::So {
            neg,
            rel: rel.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn eq(neg: bool, left: impl Into<String>, right: impl Into<String>) -> Self {
        SNPLiteral::Eq {
            neg,
            left: left.into(),
            right: right.into(),
        }
    }
}

pub type SNPClause = Vec<SNPLiteral>;

/// Sentence: existential SO predicates, universally quantified first-order
/// variables, CNF matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KromSNPSentence {
    edb: Vocabulary,
    so: Vocabulary,
    fo_vars: Vec<String>,
    clauses: Vec<SNPClause>,
}

impl KromSNPSentence {
    pub fn new(
        edb: Vocabulary,
        so: Vocabulary,
        fo_vars: Vec<String>,
        clauses: Vec<SNPClause>,
    ) -> Result<Self> {
        for (name, _) in edb.symbols() {
            if so.index_of(name).is_some() {
                return Err(Error::DuplicateSymbol(name.to_string()));
            }
        }
        for (i, v) in fo_vars.iter().enumerate() {
            if fo_vars[..i].contains(v) {
                return Err(Error::DuplicateElement(v.clone()));
            }
        }
        let check_var = |v: &String| -> Result<()> {
            if fo_vars.contains(v) {
                Ok(())
            } else {
                Err(Error::UnboundVariable(v.clone()))
            }
        };
        for clause in &clauses {
            for lit in clause {
                match lit {
                    SNPLiteral::Edb { rel, args, .. } => {
                        let declared = edb.arity(rel)?;
                        if args.len() != declared {
                            return Err(Error::ArityMismatch {
                                symbol: rel.clone(),
                                declared,
                                found: args.len(),
                            });
                        }
                        args.iter().try_for_each(check_var)?;
                    }
                    SNPLiteral::So { rel, args, .. } => {
                        let declared = so.arity(rel)?;
                        if args.len() != declared {
                            return Err(Error::ArityMismatch {
                                symbol: rel.clone(),
                                declared,
                                found: args.len(),
                            });
                        }
                        args.iter().try_for_each(check_var)?;
                    }
                    SNPLiteral::Eq { left, right, .. } => {
                        check_var(left)?;
                        check_var(right)?;
                    }
                }
            }
        }
        Ok(KromSNPSentence {
            edb,
            so,
            fo_vars,
            clauses,
        })
    }

    pub fn edb(&self) -> &Vocabulary {
        &self.edb
    }

    pub fn so(&self) -> &Vocabulary {
        &self.so
    }

    pub fn fo_vars(&self) -> &[String] {
        &self.fo_vars
    }

    pub fn clauses(&self) -> &[SNPClause] {
        &self.clauses
    }

    /// Largest SO predicate arity (the sentence is `adicity()`-adic).
    pub fn adicity(&self) -> usize {
        self.so.symbols().map(|(_, a)| a).max().unwrap_or(0)
    }

    /// The index of the first clause with more than two SO literals.
    pub fn first_non_krom(&self) -> Option<usize> {
        self.clauses.iter().position(|c| {
            c.iter()
                .filter(|l| matches!(l, SNPLiteral::So { .. }))
                .count()
                > 2
        })
    }

    pub fn is_krom(&self) -> bool {
        self.first_non_krom().is_none()
    }

    pub fn is_restricted(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| so_polarity_counts(c).0 <= 1 && so_polarity_counts(c).1 <= 1)
    }

    pub fn is_monotone(&self) -> bool {
        !self.clauses.iter().flatten().any(
            |l| matches!(l, SNPLiteral::Edb { neg: false, .. }),
        )
    }

    pub fn has_equality(&self) -> bool {
        self.clauses
            .iter()
            .flatten()
            .any(|l| matches!(l, SNPLiteral::Eq { .. }))
    }

    /// The flag set `snp_to_datalog` needs, reported with clause indexes.
    pub fn require_translatable(&self) -> Result<()> {
        for (i, clause) in self.clauses.iter().enumerate() {
            if clause.iter().any(|l| matches!(l, SNPLiteral::Eq { .. })) {
                return Err(Error::HasEquality(i));
            }
            if clause
                .iter()
                .any(|l| matches!(l, SNPLiteral::Edb { neg: false, .. }))
            {
                return Err(Error::NotMonotone(i));
            }
            let (pos, neg) = so_polarity_counts(clause);
            if pos > 1 {
                return Err(Error::NotRestricted(
                    i,
                    format!("has {pos} positive SO literals"),
                ));
            }
            if neg > 1 {
                return Err(Error::NotRestricted(
                    i,
                    format!("has {neg} negative SO literals"),
                ));
            }
        }
        Ok(())
    }
}

fn so_polarity_counts(clause: &SNPClause) -> (usize, usize) {
    let mut pos = 0;
    let mut neg = 0;
    for lit in clause {
        if let SNPLiteral::So { neg: n, .. } = lit {
            if *n {
                neg += 1;
            } else {
                pos += 1;
            }
        }
    }
    (pos, neg)
}

/// A ground SO atom: the propositional variables of the grounded sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub rel: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundClauseStatus {
    /// Input/equality literals all false; the SO residual must be satisfied.
    Open,
    /// Some input/equality literal already true under this grounding.
    Satisfied,
    /// No literal can be satisfied: the sentence is false on this input.
    Violated,
}

/// One grounded clause. `literals` are (positive?, atom index) over the
/// formula's atom table; `source_clause` and `assignment` record which
/// clause and first-order grounding produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundClause {
    pub literals: Vec<(bool, usize)>,
    pub status: GroundClauseStatus,
    pub source_clause: usize,
    pub assignment: BTreeMap<String, String>,
}

/// The grounded first-order part: residual propositional clauses over
/// ground SO atoms. Duplicate residuals are kept once (first grounding
/// wins); satisfied and violated clauses keep one exemplar per source
/// clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundKromFormula {
    pub atoms: Vec<GroundAtom>,
    pub clauses: Vec<GroundClause>,
}

impl GroundKromFormula {
    /// 2-SAT over the open clauses; false immediately on any violated one.
    pub fn is_satisfiable(&self) -> bool {
        if self
            .clauses
            .iter()
            .any(|c| c.status == GroundClauseStatus::Violated)
        {
            return false;
        }
        let mut solver = TwoSat::new(self.atoms.len());
        for clause in &self.clauses {
            if clause.status == GroundClauseStatus::Open {
                let lits: Vec<(usize, bool)> =
                    clause.literals.iter().map(|&(pos, id)| (id, pos)).collect();
                solver.add_clause(&lits);
            }
        }
        solver.solve().is_some()
    }
}

/// Grounds the universal part of `f` against `a`. Requires `f` Krom so the
/// residual clauses fit the 2-SAT solver.
pub fn ground_snp(f: &KromSNPSentence, a: &RelationalStructure) -> Result<GroundKromFormula> {
    if a.vocab() != &f.edb {
        return Err(Error::VocabularyMismatch(
            "input must be over the sentence's input vocabulary".to_string(),
        ));
    }
    if let Some(i) = f.first_non_krom() {
        return Err(Error::NotKrom(i));
    }

    let universe = a.universe();
    let mut atoms: Vec<GroundAtom> = Vec::new();
    let mut atom_id: HashMap<GroundAtom, usize> = HashMap::new();
    let mut clauses: Vec<GroundClause> = Vec::new();
    let mut open_seen: HashMap<Vec<(bool, usize)>, ()> = HashMap::new();
    let mut satisfied_seen = vec![false; f.clauses.len()];
    let mut violated_seen = vec![false; f.clauses.len()];

    for (ci, clause) in f.clauses.iter().enumerate() {
        // Variables actually used by this clause, first occurrence first.
        let mut vars: Vec<&String> = Vec::new();
        for lit in clause {
            let names: Vec<&String> = match lit {
                SNPLiteral::Edb { args, .. } | SNPLiteral::So { args, .. } => {
                    args.iter().collect()
                }
                SNPLiteral::Eq { left, right, .. } => vec![left, right],
            };
            for v in names {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let m = vars.len();
        if m > 0 && universe.is_empty() {
            continue; // universally quantified over an empty domain
        }
        // Odometer over universe^m, rightmost position fastest.
        let mut idx = vec![0usize; m];
        loop {
            let assignment: BTreeMap<String, String> = vars
                .iter()
                .zip(&idx)
                .map(|(v, &i)| ((*v).clone(), universe[i].clone()))
                .collect();
            let mut satisfied = false;
            let mut residual: Vec<(bool, usize)> = Vec::new();
            for lit in clause {
                match lit {
                    SNPLiteral::Eq { neg, left, right } => {
                        if (assignment[left] == assignment[right]) != *neg {
                            satisfied = true;
                            break;
                        }
                    }
                    SNPLiteral::Edb { neg, rel, args } => {
                        let tuple: Vec<String> =
                            args.iter().map(|v| assignment[v].clone()).collect();
                        if a.relation(rel)?.contains(&tuple) != *neg {
                            satisfied = true;
                            break;
                        }
                    }
                    SNPLiteral::So { neg, rel, args } => {
                        let atom = GroundAtom {
                            rel: rel.clone(),
                            args: args.iter().map(|v| assignment[v].clone()).collect(),
                        };
                        let id = *atom_id.entry(atom.clone()).or_insert_with(|| {
                            atoms.push(atom);
                            atoms.len() - 1
                        });
                        residual.push((!neg, id));
                    }
                }
            }
            if !satisfied {
                residual.sort();
                residual.dedup();
                // A residual holding an atom with both signs is a tautology.
                if residual
                    .windows(2)
                    .any(|w| w[0].1 == w[1].1 && w[0].0 != w[1].0)
                {
                    satisfied = true;
                }
            }
            let status = if satisfied {
                GroundClauseStatus::Satisfied
            } else if residual.is_empty() {
                GroundClauseStatus::Violated
            } else {
                GroundClauseStatus::Open
            };
            let keep = match status {
                GroundClauseStatus::Satisfied => !std::mem::replace(&mut satisfied_seen[ci], true),
                GroundClauseStatus::Violated => !std::mem::replace(&mut violated_seen[ci], true),
                GroundClauseStatus::Open => {
                    open_seen.insert(residual.clone(), ()).is_none()
                }
            };
            if keep {
                clauses.push(GroundClause {
                    literals: if satisfied { Vec::new() } else { residual },
                    status,
                    source_clause: ci,
                    assignment,
                });
            }
            // Advance the odometer.
            let mut pos = m;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < universe.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(GroundKromFormula { atoms, clauses })
}

/// True iff some interpretation of the SO predicates over `a`'s universe
/// satisfies every clause under every grounding of the first-order
/// variables.
pub fn evaluate_snp(f: &KromSNPSentence, a: &RelationalStructure) -> Result<bool> {
    Ok(ground_snp(f, a)?.is_satisfiable())
}

/// Translates a linear program into a sentence true exactly on the inputs
/// the program rejects: one clause forbidding the goal, plus one clause per
/// rule (head positively, body atoms negated), each rule's variables
/// renamed to v1, v2, ... in head-then-body first-occurrence order.
pub fn datalog_to_snp(p: &LinearDatalogProgram) -> KromSNPSentence {
    let goal_arity = p.idb().arity(p.goal()).unwrap();
    let n_vars = p.bounds().1.max(goal_arity);
    let fo_vars: Vec<String> = (1..=n_vars).map(|i| format!("v{i}")).collect();

    let mut clauses = Vec::new();
    let goal_args: Vec<&str> = fo_vars[..goal_arity].iter().map(|s| s.as_str()).collect();
    clauses.push(vec![SNPLiteral::so(true, p.goal(), &goal_args)]);

    for rule in p.rules() {
        let order = rule.variables();
        let rename: BTreeMap<&String, String> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v, format!("v{}", i + 1)))
            .collect();
        let renamed = |args: &[String]| -> Vec<String> {
            args.iter().map(|v| rename[v].clone()).collect()
        };
        let mut clause = vec![SNPLiteral::So {
            neg: false,
            rel: rule.head.pred.clone(),
            args: renamed(&rule.head.args),
        }];
        for atom in &rule.body {
            let args = renamed(&atom.args);
            let lit = if p.idb().index_of(&atom.pred).is_some() {
                SNPLiteral::So {
                    neg: true,
                    rel: atom.pred.clone(),
                    args,
                }
            } else {
                SNPLiteral::Edb {
                    neg: true,
                    rel: atom.pred.clone(),
                    args,
                }
            };
            clause.push(lit);
        }
        clauses.push(clause);
    }
    KromSNPSentence::new(p.edb().clone(), p.idb().clone(), fo_vars, clauses)
        .expect("translation of a valid program is a valid sentence")
}

/// Translates a restricted monotone equality-free sentence into a linear
/// program accepting exactly the inputs falsifying it. Each clause becomes
/// a rule: the positive SO literal (if any) is the head, otherwise a fresh
/// nullary goal; every negated literal becomes a body atom.
pub fn snp_to_datalog(f: &KromSNPSentence) -> Result<LinearDatalogProgram> {
    f.require_translatable()?;

    let mut goal = "P".to_string();
    let mut i = 0;
    while f.so.index_of(&goal).is_some() || f.edb.index_of(&goal).is_some() {
        goal = format!("P{i}");
        i += 1;
    }
    let mut idb_symbols: Vec<(String, usize)> =
        f.so.symbols().map(|(s, a)| (s.to_string(), a)).collect();
    idb_symbols.push((goal.clone(), 0));
    let idb = Vocabulary::new(idb_symbols).unwrap();

    let mut rules = Vec::new();
    for clause in &f.clauses {
        let mut head = None;
        let mut body = Vec::new();
        for lit in clause {
            match lit {
                SNPLiteral::So {
                    neg: false,
                    rel,
                    args,
                } => {
                    head = Some(DatalogAtom {
                        pred: rel.clone(),
                        args: args.clone(),
                    });
                }
                SNPLiteral::So {
                    neg: true,
                    rel,
                    args,
                }
                | SNPLiteral::Edb {
                    neg: true,
                    rel,
                    args,
                } => {
                    body.push(DatalogAtom {
                        pred: rel.clone(),
                        args: args.clone(),
                    });
                }
                _ => unreachable!("rejected by require_translatable"),
            }
        }
        rules.push(DatalogRule {
            head: head.unwrap_or(DatalogAtom {
                pred: goal.clone(),
                args: Vec::new(),
            }),
            body,
        });
    }
    LinearDatalogProgram::new(f.edb.clone(), idb, rules, goal)
}
