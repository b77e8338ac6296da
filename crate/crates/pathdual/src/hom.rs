//! Homomorphism search between relational structures.
//!
//! `find_homomorphism` runs backtracking with a most-constrained-variable
//! order. All tie-breaks follow universe order, so results are deterministic
//! and independent of any hash state.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::structure::{PartialMap, RelationalStructure};

/// Index form of a structure against a fixed universe numbering. Tuples are
/// stored per element so consistency checks touch only affected constraints.
struct Indexed {
    n: usize,
    // tuples[r] = tuples of relation r as index vectors
    tuples: Vec<Vec<Vec<usize>>>,
    // occurs[v] = list of (relation, tuple index) pairs whose tuple mentions v
    occurs: Vec<Vec<(usize, usize)>>,
}

fn index_structure(s: &RelationalStructure) -> Indexed {
    let n = s.size();
    let pos = |e: &str| s.elem_index(e).unwrap();
    let mut tuples = Vec::new();
    let mut occurs = vec![Vec::new(); n];
    for r in 0..s.vocab().len() {
        let mut rel = Vec::new();
        for t in s.relation_by_index(r) {
            let it: Vec<usize> = t.iter().map(|e| pos(e)).collect();
            let idx = rel.len();
            let mut seen = BTreeSet::new();
            for &v in &it {
                if seen.insert(v) {
                    occurs[v].push((r, idx));
                }
            }
            rel.push(it);
        }
        tuples.push(rel);
    }
    Indexed { n, tuples, occurs }
}

fn target_sets(b: &RelationalStructure) -> Vec<BTreeSet<Vec<usize>>> {
    let pos = |e: &str| b.elem_index(e).unwrap();
    (0..b.vocab().len())
        .map(|r| {
            b.relation_by_index(r)
                .iter()
                .map(|t| t.iter().map(|e| pos(e)).collect())
                .collect()
        })
        .collect()
}

/// True iff every tuple of `a` whose entries are all assigned (treating `v`
/// as mapped to `img`) lands inside the corresponding relation of `b`.
fn consistent(
    a: &Indexed,
    b_rels: &[BTreeSet<Vec<usize>>],
    assign: &[Option<usize>],
    v: usize,
    img: usize,
) -> bool {
    let lookup = |x: usize| -> Option<usize> {
        if x == v {
            Some(img)
        } else {
            assign[x]
        }
    };
    for &(r, ti) in &a.occurs[v] {
        let t = &a.tuples[r][ti];
        let mut image = Vec::with_capacity(t.len());
        let mut complete = true;
        for &x in t {
            match lookup(x) {
                Some(y) => image.push(y),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete && !b_rels[r].contains(&image) {
            return false;
        }
    }
    true
}

/// Nullary relations involve no elements, so they gate the search up front:
/// a homomorphism exists only if every nullary fact of `a` holds in `b`.
fn nullary_ok(a: &RelationalStructure, b: &RelationalStructure) -> bool {
    for (r, (_, arity)) in a.vocab().symbols().enumerate() {
        if arity == 0 && !a.relation_by_index(r).is_empty() && b.relation_by_index(r).is_empty() {
            return false;
        }
    }
    true
}

fn check_vocabs(a: &RelationalStructure, b: &RelationalStructure) -> Result<()> {
    if a.vocab() != b.vocab() {
        return Err(Error::VocabularyMismatch(
            "homomorphism requires identical vocabularies".to_string(),
        ));
    }
    Ok(())
}

/// Checks that `map` is a total homomorphism from `a` to `b`.
pub fn is_homomorphism(
    a: &RelationalStructure,
    b: &RelationalStructure,
    map: &PartialMap,
) -> Result<bool> {
    check_vocabs(a, b)?;
    for e in a.universe() {
        let img = map.get(e).ok_or_else(|| Error::MapNotTotal(e.clone()))?;
        if b.elem_index(img).is_none() {
            return Err(Error::UnknownElement(img.clone()));
        }
    }
    if !nullary_ok(a, b) {
        return Ok(false);
    }
    for (symbol, t) in a.tuples() {
        let image: Vec<String> = t.iter().map(|e| map[e].clone()).collect();
        if !b.relation(symbol)?.contains(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches for a homomorphism from `a` to `b` extending `pins`. Returns the
/// first map found under the deterministic search order, or `None` when no
/// homomorphism extends the pins.
pub fn find_homomorphism(
    a: &RelationalStructure,
    b: &RelationalStructure,
    pins: &PartialMap,
) -> Result<Option<PartialMap>> {
    search(a, b, pins, true).map(|found| found.into_iter().next())
}

/// Enumerates every homomorphism from `a` to `b`, sorted.
pub fn all_homomorphisms(
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<Vec<PartialMap>> {
    search(a, b, &PartialMap::new(), false)
}

fn search(
    a: &RelationalStructure,
    b: &RelationalStructure,
    pins: &PartialMap,
    first_only: bool,
) -> Result<Vec<PartialMap>> {
    check_vocabs(a, b)?;
    let ai = index_structure(a);
    let b_rels = target_sets(b);
    let nb = b.size();

    let mut assign: Vec<Option<usize>> = vec![None; ai.n];
    for (src, dst) in pins {
        let si = a
            .elem_index(src)
            .ok_or_else(|| Error::BadPinSource(src.clone()))?;
        let di = b
            .elem_index(dst)
            .ok_or_else(|| Error::BadPinTarget(dst.clone()))?;
        assign[si] = Some(di);
    }
    if !nullary_ok(a, b) {
        return Ok(Vec::new());
    }
    // Pins must already be consistent among themselves.
    for v in 0..ai.n {
        if let Some(img) = assign[v] {
            if !consistent(&ai, &b_rels, &assign, v, img) {
                return Ok(Vec::new());
            }
        }
    }

    // Recursive backtracking; depth is bounded by |universe(a)|. The
    // most-constrained-variable choice recomputes candidate counts per node,
    // which is fine at the sizes this search is used for.
    fn go(
        ai: &Indexed,
        b_rels: &[BTreeSet<Vec<usize>>],
        nb: usize,
        assign: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<usize>>,
        first_only: bool,
    ) {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..ai.n {
            if assign[v].is_none() {
                let count = (0..nb)
                    .filter(|&img| consistent(ai, b_rels, assign, v, img))
                    .count();
                if best.map_or(true, |(c, _)| count < c) {
                    best = Some((count, v));
                }
            }
        }
        let Some((count, v)) = best else {
            out.push(assign.iter().map(|x| x.unwrap()).collect());
            return;
        };
        if count == 0 {
            return;
        }
        for img in 0..nb {
            if consistent(ai, b_rels, assign, v, img) {
                assign[v] = Some(img);
                go(ai, b_rels, nb, assign, out, first_only);
                assign[v] = None;
                if first_only && !out.is_empty() {
                    return;
                }
            }
        }
    }

    let mut raw: Vec<Vec<usize>> = Vec::new();
    go(&ai, &b_rels, nb, &mut assign, &mut raw, first_only);

    let mut out: Vec<PartialMap> = raw
        .into_iter()
        .map(|solution| {
            solution
                .iter()
                .enumerate()
                .map(|(v, &img)| (a.universe()[v].clone(), b.universe()[img].clone()))
                .collect()
        })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;

    fn graph(universe: &[&str], edges: &[(&str, &str)]) -> RelationalStructure {
        let mut s =
            RelationalStructure::new(Vocabulary::binary(), universe.to_vec()).unwrap();
        for (a, b) in edges {
            s.add_tuple("E", vec![*a, *b]).unwrap();
        }
        s
    }

    fn k2() -> RelationalStructure {
        graph(&["0", "1"], &[("0", "1"), ("1", "0")])
    }

    fn c3() -> RelationalStructure {
        graph(
            &["a", "b", "c"],
            &[
                ("a", "b"),
                ("b", "a"),
                ("b", "c"),
                ("c", "b"),
                ("c", "a"),
                ("a", "c"),
            ],
        )
    }

    #[test]
    fn empty_source_has_exactly_the_empty_hom() {
        let a = graph(&[], &[]);
        let b = k2();
        let all = all_homomorphisms(&a, &b).unwrap();
        assert_eq!(all, vec![PartialMap::new()]);
        assert_eq!(
            find_homomorphism(&a, &b, &PartialMap::new()).unwrap(),
            Some(PartialMap::new())
        );
    }

    #[test]
    fn path_maps_to_edge() {
        let a = graph(&["x", "y", "z"], &[("x", "y"), ("y", "z")]);
        let b = graph(&["0", "1"], &[("0", "1"), ("1", "0")]);
        let h = find_homomorphism(&a, &b, &PartialMap::new())
            .unwrap()
            .unwrap();
        assert!(is_homomorphism(&a, &b, &h).unwrap());
    }

    #[test]
    fn odd_cycle_does_not_map_to_k2() {
        assert_eq!(find_homomorphism(&c3(), &k2(), &PartialMap::new()).unwrap(), None);
    }

    #[test]
    fn pins_are_respected() {
        let a = graph(&["x", "y"], &[("x", "y")]);
        let b = graph(&["0", "1"], &[("0", "1")]);
        let pins: PartialMap = [("x".to_string(), "0".to_string())].into();
        let h = find_homomorphism(&a, &b, &pins).unwrap().unwrap();
        assert_eq!(h["x"], "0");
        assert_eq!(h["y"], "1");
        let pins_bad: PartialMap = [("x".to_string(), "1".to_string())].into();
        assert_eq!(find_homomorphism(&a, &b, &pins_bad).unwrap(), None);
        let pins_unknown: PartialMap = [("w".to_string(), "1".to_string())].into();
        assert!(find_homomorphism(&a, &b, &pins_unknown).is_err());
    }

    #[test]
    fn all_homomorphisms_k2_to_k2() {
        let maps = all_homomorphisms(&k2(), &k2()).unwrap();
        assert_eq!(maps.len(), 2, "the two proper colorings");
    }

    #[test]
    fn loop_in_target_absorbs_everything() {
        let b = graph(&["u"], &[("u", "u")]);
        let h = find_homomorphism(&c3(), &b, &PartialMap::new()).unwrap();
        assert!(h.is_some());
    }

    #[test]
    fn nullary_fact_requires_target_fact() {
        let vocab = Vocabulary::new(vec![("Q", 0)]).unwrap();
        let mut a = RelationalStructure::new(vocab.clone(), Vec::<String>::new()).unwrap();
        a.add_tuple("Q", Vec::<String>::new()).unwrap();
        let b = RelationalStructure::new(vocab, Vec::<String>::new()).unwrap();
        assert_eq!(find_homomorphism(&a, &b, &PartialMap::new()).unwrap(), None);
        assert!(all_homomorphisms(&a, &b).unwrap().is_empty());
    }
}
