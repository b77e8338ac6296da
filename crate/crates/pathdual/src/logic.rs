//! Existential-positive formulas with finite variable budgets.
//!
//! The fragment: relational atoms, equalities, finite conjunction and
//! disjunction, existential quantification, and explicit truth constants.
//! Negation and universal quantification are absent by construction.
//!
//! A conjunction is `j`-restricted when (a) every conjunct with more than
//! `j` free variables is quantifier-free, and (b) at most one conjunct that
//! contains a quantifier has free variables. Together with a budget of `k`
//! distinct variable names overall, these formulas are exactly expressive
//! enough to describe mapping into a target along a path decomposition of
//! width `(j, k)`, which is what [`compile_decomposition_to_formula`]
//! produces.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::pathwidth::{check_path_decomposition, is_canonical, PathDecomposition};
use crate::structure::{induced_substructure, RelationalStructure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EPFormula {
    True,
    False,
    /// Relational atom `rel(args...)`; args are variable names.
    Atom { rel: String, args: Vec<String> },
    /// Variable equality.
    Eq(String, String),
    And(Vec<EPFormula>),
    Or(Vec<EPFormula>),
    Exists(String, Box<EPFormula>),
}

impl EPFormula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            EPFormula::True | EPFormula::False => BTreeSet::new(),
            EPFormula::Atom { args, .. } => args.iter().cloned().collect(),
            EPFormula::Eq(a, b) => [a.clone(), b.clone()].into(),
            EPFormula::And(fs) | EPFormula::Or(fs) => {
                fs.iter().flat_map(|f| f.free_vars()).collect()
            }
            EPFormula::Exists(v, f) => {
                let mut vars = f.free_vars();
                vars.remove(v);
                vars
            }
        }
    }

    /// All variable names appearing anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        match self {
            EPFormula::True | EPFormula::False => BTreeSet::new(),
            EPFormula::Atom { args, .. } => args.iter().cloned().collect(),
            EPFormula::Eq(a, b) => [a.clone(), b.clone()].into(),
            EPFormula::And(fs) | EPFormula::Or(fs) => {
                fs.iter().flat_map(|f| f.all_vars()).collect()
            }
            EPFormula::Exists(v, f) => {
                let mut vars = f.all_vars();
                vars.insert(v.clone());
                vars
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            EPFormula::True | EPFormula::False | EPFormula::Atom { .. } | EPFormula::Eq(..) => {
                true
            }
            EPFormula::And(fs) | EPFormula::Or(fs) => fs.iter().all(|f| f.is_quantifier_free()),
            EPFormula::Exists(..) => false,
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }
}

/// Outcome of checking a formula against the budget `k` (distinct variable
/// names) and the conjunction bound `j`. When `ok` is false,
/// `offending_path` holds child indices from the root to the node that
/// breaks the rules (an empty path blames the whole formula, e.g. for a
/// blown variable budget).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionReport {
    pub budget_k: usize,
    pub conj_bound_j: usize,
    pub ok: bool,
    pub offending_path: Option<Vec<usize>>,
}

pub fn check_restriction(f: &EPFormula, j: usize, k: usize) -> RestrictionReport {
    let report = |path: Option<Vec<usize>>| RestrictionReport {
        budget_k: k,
        conj_bound_j: j,
        ok: path.is_none(),
        offending_path: path,
    };
    if f.all_vars().len() > k {
        return report(Some(Vec::new()));
    }
    fn walk(f: &EPFormula, j: usize, path: &mut Vec<usize>) -> Option<Vec<usize>> {
        match f {
            EPFormula::True | EPFormula::False | EPFormula::Atom { .. } | EPFormula::Eq(..) => {
                None
            }
            EPFormula::Or(fs) => {
                for (i, child) in fs.iter().enumerate() {
                    path.push(i);
                    if let Some(p) = walk(child, j, path) {
                        return Some(p);
                    }
                    path.pop();
                }
                None
            }
            EPFormula::Exists(_, inner) => {
                path.push(0);
                let r = walk(inner, j, path);
                if r.is_none() {
                    path.pop();
                }
                r
            }
            EPFormula::And(fs) => {
                let mut open_quantified = 0usize;
                for (i, child) in fs.iter().enumerate() {
                    let quantified = !child.is_quantifier_free();
                    if quantified && child.free_vars().len() > j {
                        path.push(i);
                        return Some(path.clone());
                    }
                    if quantified && !child.is_sentence() {
                        open_quantified += 1;
                        if open_quantified > 1 {
                            path.push(i);
                            return Some(path.clone());
                        }
                    }
                }
                for (i, child) in fs.iter().enumerate() {
                    path.push(i);
                    if let Some(p) = walk(child, j, path) {
                        return Some(p);
                    }
                    path.pop();
                }
                None
            }
        }
    }
    report(walk(f, j, &mut Vec::new()))
}

/// Tarskian evaluation of `f` over `d` under `assignment`. Every free
/// variable must be assigned (to a universe element); bound variables may
/// shadow assigned ones.
pub fn evaluate(
    d: &RelationalStructure,
    f: &EPFormula,
    assignment: &BTreeMap<String, String>,
) -> Result<bool> {
    for v in f.free_vars() {
        match assignment.get(&v) {
            None => return Err(Error::UnboundVariable(v)),
            Some(e) if d.elem_index(e).is_none() => {
                return Err(Error::UnknownElement(e.clone()))
            }
            _ => {}
        }
    }
    fn eval(
        d: &RelationalStructure,
        f: &EPFormula,
        env: &mut BTreeMap<String, String>,
    ) -> Result<bool> {
        Ok(match f {
            EPFormula::True => true,
            EPFormula::False => false,
            EPFormula::Atom { rel, args } => {
                let mut tuple = Vec::with_capacity(args.len());
                for a in args {
                    tuple.push(
                        env.get(a)
                            .ok_or_else(|| Error::UnboundVariable(a.clone()))?
                            .clone(),
                    );
                }
                d.relation(rel)?.contains(&tuple)
            }
            EPFormula::Eq(a, b) => {
                let ea = env.get(a).ok_or_else(|| Error::UnboundVariable(a.clone()))?;
                let eb = env.get(b).ok_or_else(|| Error::UnboundVariable(b.clone()))?;
                ea == eb
            }
            EPFormula::And(fs) => {
                for child in fs {
                    if !eval(d, child, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            EPFormula::Or(fs) => {
                for child in fs {
                    if eval(d, child, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            EPFormula::Exists(v, inner) => {
                let shadowed = env.get(v).cloned();
                let mut hit = false;
                for e in d.universe() {
                    env.insert(v.clone(), e.clone());
                    if eval(d, inner, env)? {
                        hit = true;
                        break;
                    }
                }
                match shadowed {
                    Some(old) => {
                        env.insert(v.clone(), old);
                    }
                    None => {
                        env.remove(v);
                    }
                }
                hit
            }
        })
    }
    let mut env = assignment.clone();
    eval(d, f, &mut env)
}

/// The canonical quantifier-free query of `a` restricted to `elems`, with
/// variable `v{i+1}` standing for `elems[i]`. One atom per tuple of the
/// restriction, plus an equality `v_i = v_j` for each repeated element pair.
/// An empty element list yields `TRUE`.
///
/// Evaluating the result in `b` under `v_i -> b_i` holds exactly when
/// `elems[i] -> b_i` is a well-defined partial homomorphism.
pub fn theta_query(a: &RelationalStructure, elems: &[String]) -> Result<EPFormula> {
    let names: Vec<String> = (1..=elems.len()).map(|i| format!("v{i}")).collect();
    theta_with_names(a, elems, &names)
}

/// [`theta_query`] with caller-chosen variable names (parallel to `elems`).
pub fn theta_with_names(
    a: &RelationalStructure,
    elems: &[String],
    names: &[String],
) -> Result<EPFormula> {
    assert_eq!(elems.len(), names.len());
    for e in elems {
        if a.elem_index(e).is_none() {
            return Err(Error::UnknownElement(e.clone()));
        }
    }
    // First variable name for each element; later repeats equate to it.
    let mut first: BTreeMap<&String, &String> = BTreeMap::new();
    let mut conjuncts = Vec::new();
    for (e, n) in elems.iter().zip(names) {
        match first.get(e) {
            None => {
                first.insert(e, n);
            }
            Some(&prev) => conjuncts.push(EPFormula::Eq(prev.clone(), n.clone())),
        }
    }
    let sub = induced_substructure(a, elems)?;
    for (symbol, t) in sub.tuples() {
        let args: Vec<String> = t.iter().map(|e| first[e].clone()).collect();
        conjuncts.push(EPFormula::Atom {
            rel: symbol.to_string(),
            args,
        });
    }
    Ok(match conjuncts.len() {
        0 => EPFormula::True,
        1 => conjuncts.pop().unwrap(),
        _ => EPFormula::And(conjuncts),
    })
}

/// Conjunction that absorbs `TRUE` instead of nesting it.
fn and2(a: EPFormula, b: EPFormula) -> EPFormula {
    match (a, b) {
        (EPFormula::True, f) | (f, EPFormula::True) => f,
        (a, b) => EPFormula::And(vec![a, b]),
    }
}

/// Compiles a canonical path decomposition of `p` into a formula whose free
/// variables represent the first bag: `d_target` satisfies the formula under
/// `first-bag-element -> target-element` exactly when that partial map
/// extends to a full homomorphism `p -> d_target`.
///
/// Returns the formula and the (element, variable) binding for the first
/// bag, in universe order. Variable names are drawn from a pool `v1..vK`
/// with `K` the maximum bag size; a growing step binds the departing names
/// existentially, a shrinking step conjoins the canonical query of the new
/// bag, reusing the lowest-index free names.
pub fn compile_decomposition_open(
    p: &RelationalStructure,
    d: &PathDecomposition,
) -> Result<(EPFormula, Vec<(String, String)>)> {
    if !is_canonical(d) {
        return Err(Error::NotCanonical(
            "compile requires comparable consecutive bags and a trailing empty bag".to_string(),
        ));
    }
    check_path_decomposition(p, d)?;

    let pool_size = d.bags().iter().map(|b| b.len()).max().unwrap_or(0);
    let pool: Vec<String> = (1..=pool_size).map(|i| format!("v{i}")).collect();
    let bag_order = |bag: &BTreeSet<String>| -> Vec<String> {
        p.universe()
            .iter()
            .filter(|e| bag.contains(*e))
            .cloned()
            .collect()
    };

    // Walk back to front. `binding` maps the elements of the bag currently
    // at the frontier to their variable names.
    let bags = d.bags();
    let mut formula = EPFormula::True;
    let mut binding: Vec<(String, String)> = Vec::new(); // (element, name)
    for i in (0..bags.len() - 1).rev() {
        let cur = &bags[i];
        let next = &bags[i + 1];
        if cur == next {
            continue;
        }
        if cur.is_subset(next) {
            // Growing step seen forward; backward we bind the extra names.
            let (keep, drop): (Vec<_>, Vec<_>) =
                binding.iter().cloned().partition(|(e, _)| cur.contains(e));
            let mut names: Vec<String> = drop.into_iter().map(|(_, n)| n).collect();
            names.sort_by_key(|n| pool.iter().position(|p| p == n));
            for n in names.into_iter().rev() {
                formula = EPFormula::Exists(n, Box::new(formula));
            }
            binding = keep;
        } else {
            // Shrinking step seen forward; backward the bag gains elements,
            // which take the lowest-index pool names not already in use.
            let used: BTreeSet<String> = binding.iter().map(|(_, n)| n.clone()).collect();
            let mut fresh = pool.iter().filter(|n| !used.contains(*n));
            for e in bag_order(cur) {
                if !binding.iter().any(|(b, _)| *b == e) {
                    let name = fresh.next().expect("pool sized to max bag").clone();
                    binding.push((e, name));
                }
            }
            // Order binding by universe order for the canonical query.
            binding.sort_by_key(|(e, _)| p.elem_index(e).unwrap());
            let elems: Vec<String> = binding.iter().map(|(e, _)| e.clone()).collect();
            let names: Vec<String> = binding.iter().map(|(_, n)| n.clone()).collect();
            let theta = theta_with_names(p, &elems, &names)?;
            formula = and2(theta, formula);
        }
    }
    Ok((formula, binding))
}

/// Sentence form of [`compile_decomposition_open`]: the first-bag variables
/// are closed existentially, so for every target `d_target` (empty targets
/// included) the sentence holds exactly when `p` maps homomorphically into
/// `d_target`.
pub fn compile_decomposition_to_formula(
    p: &RelationalStructure,
    d: &PathDecomposition,
) -> Result<EPFormula> {
    let (mut formula, binding) = compile_decomposition_open(p, d)?;
    let mut names: Vec<String> = binding.into_iter().map(|(_, n)| n).collect();
    // Pool names are v1..vK; order numerically so v10 follows v9.
    names.sort_by_key(|n| (n.len(), n.clone()));
    for n in names.into_iter().rev() {
        formula = EPFormula::Exists(n, Box::new(formula));
    }
    Ok(formula)
}
