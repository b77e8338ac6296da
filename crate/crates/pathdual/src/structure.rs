//! Finite relational structures over finite vocabularies.
//!
//! Element ids are strings. The universe is an ordered set: order matters for
//! deterministic tie-breaking in searches and for printing, but structure
//! equality is literal (same vocabulary, same universe sequence, same tuple
//! sets). Isomorphism is deliberately not an equality notion here.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// A finite relational vocabulary: an ordered list of (symbol, arity) pairs.
/// Symbols are unique; arity 0 is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<(String, usize)>,
}

impl Vocabulary {
    pub fn new<S: Into<String>>(symbols: Vec<(S, usize)>) -> Result<Self> {
        let symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(s, a)| (s.into(), a)).collect();
        let mut seen = BTreeSet::new();
        for (name, _) in &symbols {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Vocabulary { symbols })
    }

    pub fn arity(&self, symbol: &str) -> Result<usize> {
        self.symbols
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|&(_, a)| a)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|(s, _)| s == symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(s, a)| (s.as_str(), *a))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Vocabulary of plain graphs: one binary symbol `E`.
    pub fn binary() -> Self {
        Vocabulary::new(vec![("E", 2)]).unwrap()
    }
}

/// A partial map between element ids. The empty map is the unique partial
/// homomorphism out of the empty structure.
pub type PartialMap = BTreeMap<String, String>;

/// A finite relational structure. Tuples are kept in sorted sets so that
/// iteration order, printing, and equality are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalStructure {
    vocab: Vocabulary,
    universe: Vec<String>,
    relations: Vec<BTreeSet<Vec<String>>>,
}

impl RelationalStructure {
    pub fn new<S: Into<String>>(vocab: Vocabulary, universe: Vec<S>) -> Result<Self> {
        let universe: Vec<String> = universe.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for e in &universe {
            if !seen.insert(e.clone()) {
                return Err(Error::DuplicateElement(e.clone()));
            }
        }
        let relations = vec![BTreeSet::new(); vocab.len()];
        Ok(RelationalStructure {
            vocab,
            universe,
            relations,
        })
    }

    /// Builds from raw parts, validating every tuple against the vocabulary
    /// and universe.
    pub fn from_parts(
        vocab: Vocabulary,
        universe: Vec<String>,
        relations: Vec<(String, Vec<Vec<String>>)>,
    ) -> Result<Self> {
        let mut s = RelationalStructure::new(vocab, universe)?;
        for (symbol, tuples) in relations {
            for t in tuples {
                s.add_tuple(&symbol, t)?;
            }
        }
        Ok(s)
    }

    pub fn add_tuple<S: Into<String>>(&mut self, symbol: &str, tuple: Vec<S>) -> Result<()> {
        let tuple: Vec<String> = tuple.into_iter().map(Into::into).collect();
        let arity = self.vocab.arity(symbol)?;
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                declared: arity,
                found: tuple.len(),
            });
        }
        for e in &tuple {
            if !self.universe.contains(e) {
                return Err(Error::UnknownElement(e.clone()));
            }
        }
        let idx = self.vocab.index_of(symbol).unwrap();
        self.relations[idx].insert(tuple);
        Ok(())
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn elem_index(&self, e: &str) -> Option<usize> {
        self.universe.iter().position(|u| u == e)
    }

    pub fn relation(&self, symbol: &str) -> Result<&BTreeSet<Vec<String>>> {
        let idx = self
            .vocab
            .index_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        Ok(&self.relations[idx])
    }

    pub fn relation_by_index(&self, idx: usize) -> &BTreeSet<Vec<String>> {
        &self.relations[idx]
    }

    /// All tuples of all relations, tagged with their symbol.
    pub fn tuples(&self) -> impl Iterator<Item = (&str, &Vec<String>)> {
        self.vocab
            .symbols
            .iter()
            .zip(&self.relations)
            .flat_map(|((s, _), rel)| rel.iter().map(move |t| (s.as_str(), t)))
    }

    pub fn total_tuple_count(&self) -> usize {
        self.relations.iter().map(|r| r.len()).sum()
    }
}

/// Checks all representation invariants: tuple arities match the vocabulary
/// and every tuple entry is a universe element. Useful after deserialization.
pub fn validate_structure(s: &RelationalStructure) -> Result<()> {
    let elems: BTreeSet<&String> = s.universe.iter().collect();
    if elems.len() != s.universe.len() {
        let dup = s
            .universe
            .iter()
            .find(|e| s.universe.iter().filter(|x| x == e).count() > 1)
            .unwrap();
        return Err(Error::DuplicateElement(dup.clone()));
    }
    for ((symbol, arity), rel) in s.vocab.symbols().zip(&s.relations) {
        for t in rel {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    symbol: symbol.to_string(),
                    declared: arity,
                    found: t.len(),
                });
            }
            for e in t {
                if !elems.contains(e) {
                    return Err(Error::UnknownElement(e.clone()));
                }
            }
        }
    }
    Ok(())
}

/// Restriction of `s` to the given elements: the universe keeps `s`'s order,
/// and a tuple survives iff all its entries lie in `elems`. Duplicates in
/// `elems` are ignored; unknown elements are an error.
pub fn induced_substructure(s: &RelationalStructure, elems: &[String]) -> Result<RelationalStructure> {
    let mut keep = BTreeSet::new();
    for e in elems {
        if s.elem_index(e).is_none() {
            return Err(Error::UnknownElement(e.clone()));
        }
        keep.insert(e.clone());
    }
    let universe: Vec<String> = s
        .universe
        .iter()
        .filter(|e| keep.contains(*e))
        .cloned()
        .collect();
    let mut out = RelationalStructure::new(s.vocab.clone(), universe)?;
    for (idx, rel) in s.relations.iter().enumerate() {
        for t in rel {
            if t.iter().all(|e| keep.contains(e)) {
                out.relations[idx].insert(t.clone());
            }
        }
    }
    Ok(out)
}

/// Disjoint union over a shared vocabulary. Elements are tagged
/// `"<part-index>.<id>"` so unions of structures with overlapping ids stay
/// disjoint. The universe lists part 0 first, then part 1, and so on.
pub fn disjoint_union(parts: &[RelationalStructure]) -> Result<RelationalStructure> {
    if parts.is_empty() {
        return Err(Error::VocabularyMismatch(
            "disjoint union of zero structures has no vocabulary".to_string(),
        ));
    }
    let vocab = parts[0].vocab.clone();
    for p in &parts[1..] {
        if p.vocab != vocab {
            return Err(Error::VocabularyMismatch(
                "disjoint union requires identical vocabularies".to_string(),
            ));
        }
    }
    let tag = |i: usize, e: &str| format!("{i}.{e}");
    let mut universe = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for e in &p.universe {
            universe.push(tag(i, e));
        }
    }
    let mut out = RelationalStructure::new(vocab, universe)?;
    for (i, p) in parts.iter().enumerate() {
        for (idx, rel) in p.relations.iter().enumerate() {
            for t in rel {
                let tagged: Vec<String> = t.iter().map(|e| tag(i, e)).collect();
                out.relations[idx].insert(tagged);
            }
        }
    }
    Ok(out)
}

/// Gaifman (primal) graph: vocabulary `{adj/2}`, same universe, with a
/// symmetric irreflexive edge between every two distinct elements that share
/// a tuple.
pub fn gaifman_graph(s: &RelationalStructure) -> RelationalStructure {
    let vocab = Vocabulary::new(vec![("adj", 2)]).unwrap();
    let mut out = RelationalStructure::new(vocab, s.universe.clone()).unwrap();
    for (_, t) in s.tuples() {
        for a in t {
            for b in t {
                if a != b {
                    out.relations[0].insert(vec![a.clone(), b.clone()]);
                }
            }
        }
    }
    out
}
