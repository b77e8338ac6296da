//! The two-parameter pebble-relation game between Spoiler and Duplicator
//! on structures `a` and `b`.
//!
//! A configuration is a pebbled set `I` of at most `k` elements of `a` plus
//! a set `T` of homomorphisms from the induced substructure on `I` into
//! `b`. Spoiler either shrinks `I` (projecting `T`) or, when `|I| <= j`,
//! blows it up to a superset of size at most `k`; Duplicator answers a blow
//! with consistent extensions. Spoiler wins when `T` empties.
//!
//! Only the canonical (maximal) Duplicator response is explored: every
//! legal response is a subset of it, and Spoiler can only profit from
//! Duplicator discarding maps, so the canonical play decides the game.
//! Spoiler's shrink targets are capped at size `j`: emptiness can appear
//! only at a blow, and any blow is legal exactly from sets of size at most
//! `j`, so deeper intermediate shrinks never help. A unit test compares
//! against unrestricted shrinks.
//!
//! A winning Spoiler play unfolds in time into an obstruction witness: one
//! copy of each pebbled element per round, merged while the pebble stays on
//! the board, with the round-`t` tuples of `a` restricted to the pebbled
//! set. The bag sequence of pebbled sets is a path decomposition of width
//! at most `(j, k)`, the witness maps into `a` by construction, and it
//! admits no homomorphism into `b` because such a map would hand Duplicator
//! a survivor in every round.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::hom::{all_homomorphisms, find_homomorphism, is_homomorphism};
use crate::pathwidth::{check_path_decomposition, PathDecomposition, WidthPair};
use crate::structure::{induced_substructure, PartialMap, RelationalStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Spoiler,
    Duplicator,
}

/// One Spoiler move, naming the pebbled set it moves to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameMove {
    Shrink(BTreeSet<String>),
    Blow(BTreeSet<String>),
}

/// A sequence of Spoiler moves from the initial configuration. `terminal`
/// marks a play whose final blow empties the canonical response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpoilerPlay {
    pub moves: Vec<GameMove>,
    pub terminal: bool,
}

/// Pebbled set plus Duplicator's surviving maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameConfiguration {
    pub pebbled: BTreeSet<String>,
    pub relation: BTreeSet<PartialMap>,
}

impl GameConfiguration {
    /// The game starts at (empty set, {empty map}).
    pub fn initial() -> Self {
        GameConfiguration {
            pebbled: BTreeSet::new(),
            relation: std::iter::once(PartialMap::new()).collect(),
        }
    }

    pub fn is_lost(&self) -> bool {
        self.relation.is_empty()
    }
}

/// Projects every surviving map onto `to`. Never empties a nonempty
/// relation.
pub fn canonical_shrink(
    c: &GameConfiguration,
    to: &BTreeSet<String>,
) -> Result<GameConfiguration> {
    if !to.is_subset(&c.pebbled) {
        return Err(Error::BadMove(format!(
            "shrink target {:?} is not a subset of the pebbled set",
            to
        )));
    }
    let relation = c
        .relation
        .iter()
        .map(|h| {
            h.iter()
                .filter(|(x, _)| to.contains(*x))
                .map(|(x, y)| (x.clone(), y.clone()))
                .collect::<PartialMap>()
        })
        .collect();
    Ok(GameConfiguration {
        pebbled: to.clone(),
        relation,
    })
}

/// The maximal legal Duplicator response to a blow: all homomorphisms of
/// the induced substructure on `to` whose restriction to the old pebbled
/// set survives in `c`. Empty means Spoiler wins.
pub fn canonical_blow(
    c: &GameConfiguration,
    to: &BTreeSet<String>,
    a: &RelationalStructure,
    b: &RelationalStructure,
    j: usize,
    k: usize,
) -> Result<GameConfiguration> {
    if c.pebbled.len() > j {
        return Err(Error::BadMove(format!(
            "blow from a set of size {} exceeds the bound {j}",
            c.pebbled.len()
        )));
    }
    if !c.pebbled.is_subset(to) {
        return Err(Error::BadMove(format!(
            "blow target {:?} does not contain the pebbled set",
            to
        )));
    }
    if to.len() > k {
        return Err(Error::BadMove(format!(
            "blow target of size {} exceeds the bound {k}",
            to.len()
        )));
    }
    let elems: Vec<String> = to.iter().cloned().collect();
    let restricted = induced_substructure(a, &elems)?;
    let relation = all_homomorphisms(&restricted, b)?
        .into_iter()
        .filter(|h| {
            c.relation.iter().any(|old| {
                old.iter().all(|(x, y)| h.get(x) == Some(y))
            })
        })
        .collect();
    Ok(GameConfiguration {
        pebbled: to.clone(),
        relation,
    })
}

/// A surviving map in integer form: its values as `b` universe indexes,
/// listed by ascending pebbled index of `a`. Relations are kept sorted and
/// deduplicated so that equality is set equality.
type IntMap = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct IntConfig {
    pebbled: u64,
    relation: Vec<IntMap>,
}

/// Restricts a map on the index set `from` to the subset `to`.
fn project(map: &IntMap, from: u64, to: u64) -> IntMap {
    let mut out = Vec::with_capacity(to.count_ones() as usize);
    let mut pos = 0;
    let mut m = from;
    while m != 0 {
        let i = m.trailing_zeros();
        if to >> i & 1 == 1 {
            out.push(map[pos]);
        }
        pos += 1;
        m &= m - 1;
    }
    out
}

fn decide_with(
    a: &RelationalStructure,
    b: &RelationalStructure,
    j: usize,
    k: usize,
    shrink_cap: usize,
) -> Result<(Winner, Option<SpoilerPlay>)> {
    if j > k {
        return Err(Error::BadMove(format!("j = {j} exceeds k = {k}")));
    }
    // The search runs on integer images of configurations: pebbled sets as
    // bit masks over `a`'s universe, maps as value vectors. Move targets are
    // enumerated as ascending masks, shrinks over the name-sorted pebbled
    // elements and blows over the free elements in universe order.
    let ua = a.universe();
    let na = ua.len();
    assert!(na < 64, "game search is limited to structures under 64 elements");
    assert!(b.size() <= u16::MAX as usize);
    let b_index: HashMap<&str, u16> = b
        .universe()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_str(), i as u16))
        .collect();
    let mut by_lex: Vec<usize> = (0..na).collect();
    by_lex.sort_by(|&x, &y| ua[x].cmp(&ua[y]));
    let mask_set = |mask: u64| -> BTreeSet<String> {
        (0..na).filter(|i| mask >> i & 1 == 1).map(|i| ua[i].clone()).collect()
    };

    // Hom sets of induced substructures depend only on the blow target;
    // `proj_cache` additionally keys their restrictions by the source set.
    let mut hom_cache: HashMap<u64, Vec<IntMap>> = HashMap::new();
    let mut proj_cache: HashMap<(u64, u64), Vec<IntMap>> = HashMap::new();

    #[derive(Clone, Copy)]
    enum IntMove {
        Shrink(u64),
        Blow(u64),
    }

    // Discovered configurations live in an arena; `seen` keys them to their
    // ids and `parent` records each id's discovery edge.
    let initial = IntConfig {
        pebbled: 0,
        relation: vec![IntMap::new()],
    };
    let mut arena: Vec<IntConfig> = vec![initial.clone()];
    let mut seen: HashMap<IntConfig, usize> = std::iter::once((initial, 0)).collect();
    let mut parent: Vec<Option<(usize, IntMove)>> = vec![None];
    let mut queue: VecDeque<usize> = std::iter::once(0).collect();

    let reconstruct = |parent: &[Option<(usize, IntMove)>], mut id: usize| {
        let mut moves = Vec::new();
        while let Some((prev, mv)) = &parent[id] {
            moves.push(match mv {
                IntMove::Shrink(to) => GameMove::Shrink(mask_set(*to)),
                IntMove::Blow(to) => GameMove::Blow(mask_set(*to)),
            });
            id = *prev;
        }
        moves.reverse();
        SpoilerPlay {
            moves,
            terminal: true,
        }
    };

    while let Some(id) = queue.pop_front() {
        let config = arena[id].clone();
        let psize = config.pebbled.count_ones() as usize;
        let mut nexts: Vec<(IntConfig, IntMove)> = Vec::new();
        // Shrink moves.
        let positions: Vec<usize> = by_lex
            .iter()
            .copied()
            .filter(|&i| config.pebbled >> i & 1 == 1)
            .collect();
        for mask in 0u64..(1 << positions.len()) {
            let picked = mask.count_ones() as usize;
            if picked > shrink_cap || picked == psize {
                continue;
            }
            let mut to = 0u64;
            for (p, &i) in positions.iter().enumerate() {
                if mask >> p & 1 == 1 {
                    to |= 1 << i;
                }
            }
            let mut relation: Vec<IntMap> = config
                .relation
                .iter()
                .map(|m| project(m, config.pebbled, to))
                .collect();
            relation.sort_unstable();
            relation.dedup();
            nexts.push((IntConfig { pebbled: to, relation }, IntMove::Shrink(to)));
        }
        // Blow moves (target may equal the current set: relevant only at
        // the start, where T is {empty map} by definition rather than the
        // hom set, which may be empty when a nullary fact has no match).
        if psize <= j {
            let free: Vec<usize> =
                (0..na).filter(|&i| config.pebbled >> i & 1 == 0).collect();
            for mask in 0u64..(1 << free.len()) {
                if mask.count_ones() as usize > k - psize {
                    continue;
                }
                let mut to = config.pebbled;
                for (p, &i) in free.iter().enumerate() {
                    if mask >> p & 1 == 1 {
                        to |= 1 << i;
                    }
                }
                if let Entry::Vacant(slot) = hom_cache.entry(to) {
                    let elems: Vec<String> =
                        (0..na).filter(|i| to >> i & 1 == 1).map(|i| ua[i].clone()).collect();
                    let homs = all_homomorphisms(&induced_substructure(a, &elems)?, b)?;
                    let mut ints: Vec<IntMap> = homs
                        .iter()
                        .map(|h| {
                            (0..na)
                                .filter(|i| to >> i & 1 == 1)
                                .map(|i| b_index[h[&ua[i]].as_str()])
                                .collect()
                        })
                        .collect();
                    ints.sort_unstable();
                    slot.insert(ints);
                }
                let projs = proj_cache.entry((to, config.pebbled)).or_insert_with(|| {
                    hom_cache[&to]
                        .iter()
                        .map(|h| project(h, to, config.pebbled))
                        .collect()
                });
                let relation: Vec<IntMap> = hom_cache[&to]
                    .iter()
                    .zip(projs.iter())
                    .filter(|(_, p)| config.relation.binary_search(p).is_ok())
                    .map(|(h, _)| h.clone())
                    .collect();
                nexts.push((IntConfig { pebbled: to, relation }, IntMove::Blow(to)));
            }
        }
        for (next, mv) in nexts {
            if seen.contains_key(&next) {
                continue;
            }
            let nid = arena.len();
            let lost = next.relation.is_empty();
            seen.insert(next.clone(), nid);
            arena.push(next);
            parent.push(Some((id, mv)));
            if lost {
                return Ok((Winner::Spoiler, Some(reconstruct(&parent, nid))));
            }
            queue.push_back(nid);
        }
    }
    Ok((Winner::Duplicator, None))
}

/// Decides the game by breadth-first search over canonical configurations.
/// On a Spoiler win the returned play is shortest.
pub fn decide_game(
    a: &RelationalStructure,
    b: &RelationalStructure,
    j: usize,
    k: usize,
) -> Result<(Winner, Option<SpoilerPlay>)> {
    decide_with(a, b, j, k, j)
}

/// Replays `play` from the initial configuration, checking legality, and
/// returns the visited pebbled sets (starting with the empty set).
fn replay(
    a: &RelationalStructure,
    b: &RelationalStructure,
    j: usize,
    k: usize,
    play: &SpoilerPlay,
) -> Result<Vec<BTreeSet<String>>> {
    let mut config = GameConfiguration::initial();
    let mut rounds = vec![config.pebbled.clone()];
    for mv in &play.moves {
        if config.is_lost() {
            return Err(Error::BadMove("move after the game ended".to_string()));
        }
        config = match mv {
            GameMove::Shrink(to) => canonical_shrink(&config, to)?,
            GameMove::Blow(to) => canonical_blow(&config, to, a, b, j, k)?,
        };
        rounds.push(config.pebbled.clone());
    }
    if !config.is_lost() {
        return Err(Error::NotWinning(
            "canonical responses survive the whole play".to_string(),
        ));
    }
    Ok(rounds)
}

/// Unfolds a winning Spoiler play into a structure `P` of width at most
/// `(j, k)` together with its decomposition and its projection into `a`.
/// `P` admits no homomorphism into `b`; all three guarantees are
/// re-verified before returning.
pub fn extract_obstruction(
    a: &RelationalStructure,
    b: &RelationalStructure,
    j: usize,
    k: usize,
    play: &SpoilerPlay,
) -> Result<(RelationalStructure, PathDecomposition, PartialMap)> {
    let rounds = replay(a, b, j, k, play)?;

    // (round, element) nodes, merged while the pebble persists.
    let mut nodes: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for (t, pebbled) in rounds.iter().enumerate() {
        for e in pebbled {
            let next = nodes.len();
            nodes.entry((t, e.clone())).or_insert(next);
        }
    }
    let mut uf: Vec<usize> = (0..nodes.len()).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let root = find(uf, uf[x]);
            uf[x] = root;
        }
        uf[x]
    }
    for t in 1..rounds.len() {
        for e in rounds[t].intersection(&rounds[t - 1]) {
            let here = nodes[&(t, e.clone())];
            let there = nodes[&(t - 1, e.clone())];
            let (ra, rb) = (find(&mut uf, here), find(&mut uf, there));
            if ra != rb {
                uf[ra] = rb;
            }
        }
    }
    // Class names "element@firstRound", ordered by (first round, element).
    let mut first: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (&(t, ref e), &node) in &nodes {
        let root = find(&mut uf, node);
        let ei = a.elem_index(e).unwrap();
        let entry = first.entry(root).or_insert((t, ei));
        if (t, ei) < *entry {
            *entry = (t, ei);
        }
    }
    let mut order: Vec<(usize, usize, usize)> = first
        .iter()
        .map(|(&root, &(t, ei))| (t, ei, root))
        .collect();
    order.sort();
    let class_name: BTreeMap<usize, String> = order
        .iter()
        .map(|&(t, ei, root)| (root, format!("{}@{}", a.universe()[ei], t)))
        .collect();
    let universe: Vec<String> = order.iter().map(|&(_, _, r)| class_name[&r].clone()).collect();

    let mut witness = RelationalStructure::new(a.vocab().clone(), universe)?;
    for (t, pebbled) in rounds.iter().enumerate() {
        let elems: Vec<String> = pebbled.iter().cloned().collect();
        let slice = induced_substructure(a, &elems)?;
        for (sym, tuple) in slice.tuples() {
            let renamed: Vec<String> = tuple
                .iter()
                .map(|e| class_name[&find(&mut uf, nodes[&(t, e.clone())])].clone())
                .collect();
            witness.add_tuple(sym, renamed)?;
        }
    }
    let bags: Vec<BTreeSet<String>> = rounds
        .iter()
        .enumerate()
        .map(|(t, pebbled)| {
            pebbled
                .iter()
                .map(|e| class_name[&find(&mut uf, nodes[&(t, e.clone())])].clone())
                .collect()
        })
        .collect();
    let decomposition = PathDecomposition::new(bags);
    let map: PartialMap = order
        .iter()
        .map(|&(_, ei, root)| (class_name[&root].clone(), a.universe()[ei].clone()))
        .collect();

    let w = check_path_decomposition(&witness, &decomposition)
        .map_err(|e| Error::CrossCheck(format!("witness decomposition invalid: {e}")))?;
    if !w.le(&WidthPair::new(j, k)) {
        return Err(Error::CrossCheck(format!(
            "witness width {w} exceeds ({j}, {k})"
        )));
    }
    if !is_homomorphism(&witness, a, &map)? {
        return Err(Error::CrossCheck(
            "witness projection is not a homomorphism".to_string(),
        ));
    }
    if find_homomorphism(&witness, b, &PartialMap::new())?.is_some() {
        return Err(Error::CrossCheck(
            "witness maps into the target after all".to_string(),
        ));
    }
    Ok((witness, decomposition, map))
}

/// Enumerates structures over `b`'s vocabulary with at most `n_max`
/// elements (one representative per isomorphism class) and reports every
/// one where Duplicator wins the `(j, k)` game yet no homomorphism into
/// `b` exists. Each entry refutes `(j, k)`-path duality of `b`; an empty
/// report is evidence only up to this size.
pub fn check_path_duality_bounded(
    b: &RelationalStructure,
    j: usize,
    k: usize,
    n_max: usize,
) -> Result<Vec<RelationalStructure>> {
    let mut counterexamples = Vec::new();
    for a in enumerate_up_to_iso(b, n_max) {
        if find_homomorphism(&a, b, &PartialMap::new())?.is_some() {
            continue;
        }
        if decide_game(&a, b, j, k)?.0 == Winner::Duplicator {
            counterexamples.push(a);
        }
    }
    Ok(counterexamples)
}

/// One representative per isomorphism class of structures over `b`'s
/// vocabulary with 0..=n_max elements. Ascending-mask sweep: the first
/// unseen tuple mask is its orbit's minimum; all its permuted images are
/// then marked seen.
fn enumerate_up_to_iso(b: &RelationalStructure, n_max: usize) -> Vec<RelationalStructure> {
    let vocab = b.vocab().clone();
    let mut out = Vec::new();
    for n in 0..=n_max {
        let universe: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        // Tuple table: (symbol index, tuple of element indexes), symbol by
        // symbol, tuples in lexicographic order.
        let mut tuples: Vec<(usize, Vec<usize>)> = Vec::new();
        for (si, (_, arity)) in vocab.symbols().enumerate() {
            if n == 0 && arity > 0 {
                continue;
            }
            let count = n.pow(arity as u32);
            for code in 0..count {
                let mut t = Vec::with_capacity(arity);
                let mut c = code;
                for _ in 0..arity {
                    t.push(c % n);
                    c /= n;
                }
                t.reverse();
                tuples.push((si, t));
            }
        }
        let bits = tuples.len();
        assert!(bits < 63, "tuple space too large to sweep");
        let index_of: HashMap<(usize, Vec<usize>), usize> = tuples
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();

        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            perms.push(p.clone());
            // Next lexicographic permutation.
            let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1])
            else {
                break;
            };
            let jx = (i + 1..p.len()).rev().find(|&jx| p[jx] > p[i]).unwrap();
            p.swap(i, jx);
            p[i + 1..].reverse();
        }

        let words = (1usize << bits).div_ceil(64);
        let mut seen = vec![0u64; words];
        for mask in 0u64..(1 << bits) {
            if seen[(mask >> 6) as usize] >> (mask & 63) & 1 == 1 {
                continue;
            }
            for perm in &perms {
                let mut image = 0u64;
                for (i, (si, t)) in tuples.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        let mapped: Vec<usize> = t.iter().map(|&e| perm[e]).collect();
                        image |= 1 << index_of[&(*si, mapped)];
                    }
                }
                seen[(image >> 6) as usize] |= 1 << (image & 63);
            }
            let mut s = RelationalStructure::new(vocab.clone(), universe.clone()).unwrap();
            for (i, (si, t)) in tuples.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    let sym = vocab.symbols().nth(*si).unwrap().0.to_string();
                    let named: Vec<String> =
                        t.iter().map(|&e| universe[e].clone()).collect();
                    s.add_tuple(&sym, named).unwrap();
                }
            }
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{k_clique, sym_cycle};
    use crate::structure::Vocabulary;

    fn k2() -> RelationalStructure {
        k_clique(2)
    }

    #[test]
    fn shrink_projects_and_never_empties() {
        let a = sym_cycle(3);
        let b = k2();
        let to: BTreeSet<String> = ["0", "1"].iter().map(|s| s.to_string()).collect();
        let c = canonical_blow(&GameConfiguration::initial(), &to, &a, &b, 2, 3).unwrap();
        assert_eq!(c.relation.len(), 2, "an edge has two maps into K2");
        let down: BTreeSet<String> = std::iter::once("0".to_string()).collect();
        let s = canonical_shrink(&c, &down).unwrap();
        assert_eq!(s.relation.len(), 2);
        assert!(s.relation.iter().all(|h| h.len() == 1));
        let empty = canonical_shrink(&c, &BTreeSet::new()).unwrap();
        assert_eq!(empty.relation.len(), 1, "projection to the empty map");
        let full = canonical_shrink(&c, &c.pebbled.clone()).unwrap();
        assert_eq!(full, c);
    }

    #[test]
    fn shrink_to_non_subset_is_rejected() {
        let c = GameConfiguration::initial();
        let to: BTreeSet<String> = std::iter::once("0".to_string()).collect();
        assert!(matches!(
            canonical_shrink(&c, &to),
            Err(Error::BadMove(_))
        ));
    }

    #[test]
    fn blow_from_initial_yields_all_homomorphisms() {
        let a = sym_cycle(4);
        let b = k2();
        let to: BTreeSet<String> =
            ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
        let c = canonical_blow(&GameConfiguration::initial(), &to, &a, &b, 2, 3).unwrap();
        let elems: Vec<String> = to.iter().cloned().collect();
        let oracle = all_homomorphisms(&induced_substructure(&a, &elems).unwrap(), &b).unwrap();
        assert_eq!(c.relation.len(), oracle.len());
        for h in &oracle {
            assert!(c.relation.contains(h));
        }
    }

    #[test]
    fn blow_bounds_are_enforced() {
        let a = sym_cycle(4);
        let b = k2();
        let big: BTreeSet<String> =
            ["0", "1", "2", "3"].iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            canonical_blow(&GameConfiguration::initial(), &big, &a, &b, 2, 3),
            Err(Error::BadMove(_))
        ));
        let to: BTreeSet<String> = ["0", "1"].iter().map(|s| s.to_string()).collect();
        let c = canonical_blow(&GameConfiguration::initial(), &to, &a, &b, 2, 3).unwrap();
        let wider: BTreeSet<String> =
            ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
        // |I| = 2 > j = 1: blow refused.
        assert!(matches!(
            canonical_blow(&c, &wider, &a, &b, 1, 3),
            Err(Error::BadMove(_))
        ));
    }

    #[test]
    fn homomorphic_pairs_are_duplicator_wins() {
        let pairs = [
            (sym_cycle(4), k2()),
            (sym_cycle(6), k2()),
            (k2(), k2()),
            (sym_cycle(3), k_clique(3)),
        ];
        for (a, b) in &pairs {
            for (j, k) in [(1, 2), (2, 2), (2, 3), (3, 4)] {
                let (w, play) = decide_game(a, b, j, k).unwrap();
                assert_eq!(w, Winner::Duplicator);
                assert!(play.is_none());
            }
        }
    }

    #[test]
    fn odd_cycle_versus_edge() {
        let a = sym_cycle(3);
        let b = k2();
        let (w, play) = decide_game(&a, &b, 2, 3).unwrap();
        assert_eq!(w, Winner::Spoiler);
        assert!(play.unwrap().terminal);
        let (w, _) = decide_game(&a, &b, 1, 2).unwrap();
        assert_eq!(w, Winner::Duplicator);
    }

    #[test]
    fn j_larger_than_k_is_rejected() {
        assert!(decide_game(&k2(), &k2(), 3, 2).is_err());
    }

    #[test]
    fn obstruction_from_odd_cycle_play() {
        let a = sym_cycle(3);
        let b = k2();
        let (w, play) = decide_game(&a, &b, 2, 3).unwrap();
        assert_eq!(w, Winner::Spoiler);
        let (p, d, h) = extract_obstruction(&a, &b, 2, 3, &play.unwrap()).unwrap();
        let width = check_path_decomposition(&p, &d).unwrap();
        assert!(width.le(&WidthPair::new(2, 3)));
        assert!(is_homomorphism(&p, &a, &h).unwrap());
        assert!(find_homomorphism(&p, &b, &PartialMap::new())
            .unwrap()
            .is_none());
    }

    #[test]
    fn non_winning_play_is_rejected() {
        let a = sym_cycle(4);
        let b = k2();
        let play = SpoilerPlay {
            moves: vec![],
            terminal: false,
        };
        assert!(matches!(
            extract_obstruction(&a, &b, 2, 3, &play),
            Err(Error::NotWinning(_))
        ));
    }

    #[test]
    fn restricted_shrinks_agree_with_unrestricted() {
        // Shrinks capped at j versus shrinks to any proper subset.
        let cases = [
            (sym_cycle(3), k2(), 2, 3),
            (sym_cycle(3), k2(), 1, 2),
            (sym_cycle(5), k2(), 2, 3),
            (sym_cycle(4), k_clique(3), 1, 3),
            (k_clique(3), k2(), 2, 3),
            (k_clique(4), k_clique(3), 2, 4),
        ];
        for (a, b, j, k) in &cases {
            let restricted = decide_game(a, b, *j, *k).unwrap().0;
            let unrestricted = decide_with(a, b, *j, *k, *k).unwrap().0;
            assert_eq!(restricted, unrestricted);
        }
    }

    #[test]
    fn resource_monotonicity_on_fixed_pairs() {
        let grid = [(1usize, 2usize), (1, 3), (2, 2), (2, 3), (2, 4), (3, 3)];
        for (a, b) in [
            (sym_cycle(3), k2()),
            (sym_cycle(5), k2()),
            (sym_cycle(4), k2()),
            (k_clique(3), k_clique(3)),
        ] {
            for &(j, k) in &grid {
                if decide_game(&a, &b, j, k).unwrap().0 == Winner::Duplicator {
                    for &(j2, k2v) in &grid {
                        if j2 <= j && k2v <= k {
                            assert_eq!(
                                decide_game(&a, &b, j2, k2v).unwrap().0,
                                Winner::Duplicator,
                                "({j},{k}) -> ({j2},{k2v})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unmatched_nullary_fact_loses_immediately() {
        let vocab = Vocabulary::new(vec![("N", 0), ("E", 2)]).unwrap();
        let mut a = RelationalStructure::new(vocab.clone(), vec!["x"]).unwrap();
        a.add_tuple("N", Vec::<String>::new()).unwrap();
        let b = RelationalStructure::new(vocab, vec!["y"]).unwrap();
        let (w, play) = decide_game(&a, &b, 0, 0).unwrap();
        assert_eq!(w, Winner::Spoiler);
        let (p, _, _) = extract_obstruction(&a, &b, 0, 0, &play.unwrap()).unwrap();
        assert_eq!(p.size(), 0);
        assert_eq!(p.relation("N").unwrap().len(), 1);
    }

    #[test]
    fn duality_report_small() {
        // (1,2) misses the odd cycles; (2,3) does not, at this size.
        let b = k2();
        let bad = check_path_duality_bounded(&b, 1, 2, 3).unwrap();
        assert!(!bad.is_empty());
        assert!(bad
            .iter()
            .any(|a| a.size() == 3 && a.relation("E").unwrap().len() == 6));
        for a in &bad {
            assert!(find_homomorphism(a, &b, &PartialMap::new())
                .unwrap()
                .is_none());
        }
        let good = check_path_duality_bounded(&b, 2, 3, 3).unwrap();
        assert!(good.is_empty());
    }

    #[test]
    fn iso_enumeration_counts_digraphs() {
        // Digraphs with loops on 0..=2 vertices: 1 + 2 + 10 classes.
        let b = k2();
        assert_eq!(enumerate_up_to_iso(&b, 2).len(), 13);
    }
}
