//! Implicative hitting-set bounded constraints over the Boolean domain.
//!
//! A Boolean relation is k-IHS-B+ when it is the model set of a CNF whose
//! clauses are negative units, implications, or disjunctions of at most k
//! positive literals (repeats pad shorter ones to length k); k-IHS-B-
//! mirrors this with positive units and negative wide clauses. A structure
//! carries a single sign for all its relations.
//!
//! Solving a positive-sign instance: collect the elements forced to 0 by
//! unit clauses, close backward under implications (a forced consequent
//! forces its antecedent), and accept iff every wide clause keeps a free
//! element; setting exactly the free elements to 1 then satisfies
//! everything. The negative sign is solved by flipping 0 and 1, which
//! swaps the two clause families and reverses implications.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::structure::{RelationalStructure, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IHSBSign {
    Plus,
    Minus,
}

/// One clause over the coordinates of a relation. The sign of the class
/// fixes the reading: for plus, `Unit(i)` is the negative literal on
/// coordinate i and `Wide` is a positive disjunction; for minus, `Unit`
/// is positive and `Wide` negative. `Implication(i, j)` is the clause
/// (not i or j) under both signs. `Wide` stores the sorted support, at
/// most k coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum IHSBClause {
    Unit(usize),
    Implication(usize, usize),
    Wide(Vec<usize>),
}

/// A successful classification: per-relation clause lists whose
/// conjunction defines each relation exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IHSBClass {
    sign: IHSBSign,
    k: usize,
    clauses: BTreeMap<String, Vec<IHSBClause>>,
    vocab: Vocabulary,
}

impl IHSBClass {
    pub fn sign(&self) -> IHSBSign {
        self.sign
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &BTreeMap<String, Vec<IHSBClause>> {
        &self.clauses
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }
}

fn tuple_bits(tuple: &[String]) -> Vec<bool> {
    tuple.iter().map(|e| e == "1").collect()
}

fn satisfies(clause: &IHSBClause, bits: &[bool], sign: IHSBSign) -> bool {
    match (clause, sign) {
        (IHSBClause::Unit(i), IHSBSign::Plus) => !bits[*i],
        (IHSBClause::Unit(i), IHSBSign::Minus) => bits[*i],
        (IHSBClause::Implication(i, j), _) => !bits[*i] || bits[*j],
        (IHSBClause::Wide(s), IHSBSign::Plus) => s.iter().any(|&i| bits[i]),
        (IHSBClause::Wide(s), IHSBSign::Minus) => s.iter().any(|&i| !bits[i]),
    }
}

/// Tries to express every relation of `b` with clauses of the `sign`
/// family, wide clauses touching at most `k` coordinates. Keeps each
/// candidate clause satisfied by all tuples and succeeds iff the kept
/// conjunction has exactly the relation as models. The universe must be
/// {0, 1} and `k` at least 2.
pub fn classify_ihsb(
    b: &RelationalStructure,
    k: usize,
    sign: IHSBSign,
) -> Result<Option<IHSBClass>> {
    let dom: BTreeSet<&str> = b.universe().iter().map(|s| s.as_str()).collect();
    if dom != BTreeSet::from(["0", "1"]) {
        return Err(Error::NotBoolean(format!(
            "universe {:?} is not {{0, 1}}",
            b.universe()
        )));
    }
    if k < 2 {
        return Err(Error::NotExpressible(format!(
            "wide clauses need k >= 2, got {k}"
        )));
    }
    let mut clauses = BTreeMap::new();
    for (sym, arity) in b.vocab().symbols() {
        let mut candidates = Vec::new();
        for i in 0..arity {
            candidates.push(IHSBClause::Unit(i));
            for j in 0..arity {
                if i != j {
                    candidates.push(IHSBClause::Implication(i, j));
                }
            }
        }
        for mask in 1u32..(1 << arity) {
            if (mask.count_ones() as usize) <= k {
                let support: Vec<usize> =
                    (0..arity).filter(|i| (mask >> i) & 1 == 1).collect();
                candidates.push(IHSBClause::Wide(support));
            }
        }
        let rel = b.relation(sym)?;
        let tuples: Vec<Vec<bool>> = rel.iter().map(|t| tuple_bits(t)).collect();
        let kept: Vec<IHSBClause> = candidates
            .into_iter()
            .filter(|c| tuples.iter().all(|bits| satisfies(c, bits, sign)))
            .collect();
        let model_count = (0u32..(1 << arity))
            .filter(|m| {
                let bits: Vec<bool> = (0..arity).map(|i| (m >> i) & 1 == 1).collect();
                kept.iter().all(|c| satisfies(c, &bits, sign))
            })
            .count();
        // Every tuple satisfies every kept clause, so equality of counts
        // is equality of sets.
        if model_count != rel.len() {
            return Ok(None);
        }
        clauses.insert(sym.to_string(), kept);
    }
    Ok(Some(IHSBClass {
        sign,
        k,
        clauses,
        vocab: b.vocab().clone(),
    }))
}

/// Decides whether `a` maps into the structure behind `class`. Grounds
/// the clause lists over the tuples of `a` (after dualization for the
/// minus sign), closes the forced-zero set backward under implications,
/// and accepts iff every wide clause retains a free element.
pub fn solve_ihsb(a: &RelationalStructure, class: &IHSBClass) -> Result<bool> {
    if a.vocab() != &class.vocab {
        return Err(Error::VocabularyMismatch(
            "instance vocabulary differs from the classified target".to_string(),
        ));
    }
    let mut forced: BTreeSet<String> = BTreeSet::new();
    // antecedents[w] = elements v with a ground clause (not v or w).
    let mut antecedents: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut wides: Vec<BTreeSet<String>> = Vec::new();
    for (sym, tuple) in a.tuples() {
        for clause in &class.clauses[sym] {
            match (clause, class.sign) {
                (IHSBClause::Unit(i), _) => {
                    forced.insert(tuple[*i].clone());
                }
                (IHSBClause::Implication(i, j), IHSBSign::Plus) => {
                    antecedents
                        .entry(tuple[*j].clone())
                        .or_default()
                        .push(tuple[*i].clone());
                }
                // Dualized: (not v or w) over flipped values reverses.
                (IHSBClause::Implication(i, j), IHSBSign::Minus) => {
                    antecedents
                        .entry(tuple[*i].clone())
                        .or_default()
                        .push(tuple[*j].clone());
                }
                (IHSBClause::Wide(s), _) => {
                    wides.push(s.iter().map(|&i| tuple[i].clone()).collect());
                }
            }
        }
    }
    let mut queue: VecDeque<String> = forced.iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        for v in antecedents.get(&w).into_iter().flatten() {
            if forced.insert(v.clone()) {
                queue.push_back(v.clone());
            }
        }
    }
    Ok(wides.iter().all(|s| s.iter().any(|e| !forced.contains(e))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::find_homomorphism;
    use crate::structure::PartialMap;

    fn boolean_structure(
        symbols: Vec<(&str, usize)>,
        tuples: Vec<(&str, Vec<&str>)>,
    ) -> RelationalStructure {
        let vocab = Vocabulary::new(symbols).unwrap();
        let mut s = RelationalStructure::new(vocab, vec!["0", "1"]).unwrap();
        for (sym, t) in tuples {
            s.add_tuple(sym, t).unwrap();
        }
        s
    }

    /// Implication, forced-zero, and forced-one relations: classifiable
    /// under both signs.
    fn imp_zero_one() -> RelationalStructure {
        boolean_structure(
            vec![("Imp", 2), ("One", 1), ("Zero", 1)],
            vec![
                ("Imp", vec!["0", "0"]),
                ("Imp", vec!["0", "1"]),
                ("Imp", vec!["1", "1"]),
                ("One", vec!["1"]),
                ("Zero", vec!["0"]),
            ],
        )
    }

    fn instance(
        vars: &[&str],
        imps: &[(&str, &str)],
        ones: &[&str],
        zeros: &[&str],
    ) -> RelationalStructure {
        let mut a =
            RelationalStructure::new(imp_zero_one().vocab().clone(), vars.to_vec()).unwrap();
        for (x, y) in imps {
            a.add_tuple("Imp", vec![*x, *y]).unwrap();
        }
        for x in ones {
            a.add_tuple("One", vec![*x]).unwrap();
        }
        for x in zeros {
            a.add_tuple("Zero", vec![*x]).unwrap();
        }
        a
    }

    #[test]
    fn all_but_origin_is_plus_via_one_wide_clause() {
        let b = boolean_structure(
            vec![("P0", 2)],
            vec![
                ("P0", vec!["0", "1"]),
                ("P0", vec!["1", "0"]),
                ("P0", vec!["1", "1"]),
            ],
        );
        let class = classify_ihsb(&b, 2, IHSBSign::Plus).unwrap().unwrap();
        assert!(class.clauses()["P0"].contains(&IHSBClause::Wide(vec![0, 1])));
        assert!(classify_ihsb(&b, 2, IHSBSign::Minus).unwrap().is_none());
    }

    #[test]
    fn point_relation_is_plus_via_two_units() {
        let b = boolean_structure(vec![("R", 2)], vec![("R", vec!["0", "0"])]);
        let class = classify_ihsb(&b, 2, IHSBSign::Plus).unwrap().unwrap();
        assert!(class.clauses()["R"].contains(&IHSBClause::Unit(0)));
        assert!(class.clauses()["R"].contains(&IHSBClause::Unit(1)));
    }

    #[test]
    fn xor_fits_neither_sign() {
        let b = boolean_structure(
            vec![("X", 2)],
            vec![("X", vec!["0", "1"]), ("X", vec!["1", "0"])],
        );
        for k in [2, 3] {
            assert!(classify_ihsb(&b, k, IHSBSign::Plus).unwrap().is_none());
            assert!(classify_ihsb(&b, k, IHSBSign::Minus).unwrap().is_none());
        }
    }

    #[test]
    fn non_boolean_universe_is_rejected() {
        let vocab = Vocabulary::new(vec![("R", 1)]).unwrap();
        let b = RelationalStructure::new(vocab, vec!["0", "1", "2"]).unwrap();
        assert!(matches!(
            classify_ihsb(&b, 2, IHSBSign::Plus),
            Err(Error::NotBoolean(_))
        ));
    }

    #[test]
    fn small_k_is_rejected() {
        let b = boolean_structure(vec![("R", 1)], vec![("R", vec!["1"])]);
        assert!(classify_ihsb(&b, 1, IHSBSign::Plus).is_err());
    }

    #[test]
    fn no_units_means_all_ones_works() {
        let class = classify_ihsb(&imp_zero_one(), 2, IHSBSign::Plus)
            .unwrap()
            .unwrap();
        let a = instance(
            &["x", "y", "z"],
            &[("x", "y"), ("y", "z")],
            &["x", "z"],
            &[],
        );
        assert!(solve_ihsb(&a, &class).unwrap());
    }

    #[test]
    fn implication_chain_to_forced_zero_fails() {
        let class = classify_ihsb(&imp_zero_one(), 2, IHSBSign::Plus)
            .unwrap()
            .unwrap();
        let a = instance(
            &["w", "v1", "v2", "v3"],
            &[("w", "v1"), ("v1", "v2"), ("v2", "v3")],
            &["w"],
            &["v3"],
        );
        assert!(!solve_ihsb(&a, &class).unwrap());
        // Dropping the forced zero restores satisfiability.
        let a2 = instance(
            &["w", "v1", "v2", "v3"],
            &[("w", "v1"), ("v1", "v2"), ("v2", "v3")],
            &["w"],
            &[],
        );
        assert!(solve_ihsb(&a2, &class).unwrap());
    }

    #[test]
    fn both_signs_agree_with_brute_force() {
        let b = imp_zero_one();
        let plus = classify_ihsb(&b, 2, IHSBSign::Plus).unwrap().unwrap();
        let minus = classify_ihsb(&b, 2, IHSBSign::Minus).unwrap().unwrap();
        let cases = [
            instance(&["x"], &[], &["x"], &["x"]),
            instance(&["x"], &[], &["x"], &[]),
            instance(&["x", "y"], &[("x", "y"), ("y", "x")], &["x"], &["y"]),
            instance(&["x", "y"], &[("x", "y")], &["x"], &["y"]),
            instance(&["x", "y", "z"], &[("x", "y"), ("y", "z")], &["x"], &["z"]),
            instance(&["x", "y", "z"], &[("z", "y")], &["x"], &["z"]),
        ];
        for a in &cases {
            let brute = find_homomorphism(a, &b, &PartialMap::new())
                .unwrap()
                .is_some();
            assert_eq!(solve_ihsb(a, &plus).unwrap(), brute);
            assert_eq!(solve_ihsb(a, &minus).unwrap(), brute);
        }
    }
}
