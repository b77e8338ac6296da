//! Path decompositions of relational structures and their two-component
//! width.
//!
//! A path decomposition is a sequence of bags (element sets) such that every
//! tuple of the structure is contained in some bag, every element appears in
//! some bag, and the bags containing a fixed element form a contiguous run.
//! Its width is the pair `(j, k)` where `j` is the largest intersection of
//! consecutive bags and `k` is the largest bag. No `-1` normalization is
//! applied anywhere: a single bag of size 3 has width `(0, 3)`.
//!
//! The exact search below rests on the fact that decompositions are exactly
//! interval systems: connectivity forces each element's bag membership to be
//! an interval, so a decomposition is determined by per-element entry and
//! exit positions. That turns width search into a dynamic program over
//! (finished set, current bag) pairs.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::structure::{RelationalStructure, Vocabulary};

/// Two-component width: `j` bounds consecutive-bag intersections, `k` bounds
/// bag size. Always `j <= k` for widths of actual decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WidthPair {
    pub j: usize,
    pub k: usize,
}

impl WidthPair {
    pub fn new(j: usize, k: usize) -> Self {
        WidthPair { j, k }
    }

    /// Componentwise dominance: `self` fits within the budget `other`.
    pub fn le(&self, other: &WidthPair) -> bool {
        self.j <= other.j && self.k <= other.k
    }
}

impl std::fmt::Display for WidthPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.j, self.k)
    }
}

/// An ordered sequence of bags. Bags may be empty; the sequence may be empty
/// (only the empty structure has a valid empty decomposition).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<BTreeSet<String>>,
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<String>>) -> Self {
        PathDecomposition { bags }
    }

    pub fn from_slices<S: AsRef<str>>(bags: &[&[S]]) -> Self {
        PathDecomposition {
            bags: bags
                .iter()
                .map(|bag| bag.iter().map(|e| e.as_ref().to_string()).collect())
                .collect(),
        }
    }

    pub fn bags(&self) -> &[BTreeSet<String>] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Width of the bag sequence itself, with no validity checking. The
    /// empty sequence has width (0, 0); so does `[{}]`.
    pub fn width(&self) -> WidthPair {
        let k = self.bags.iter().map(|b| b.len()).max().unwrap_or(0);
        let j = self
            .bags
            .windows(2)
            .map(|w| w[0].intersection(&w[1]).count())
            .max()
            .unwrap_or(0);
        WidthPair { j, k }
    }
}

/// Validates `d` against `s` and returns its width.
///
/// Requirements checked, in order: bags contain only universe elements;
/// every element's bag run is contiguous; every element appears in some bag;
/// every tuple of positive arity fits inside one bag. Nullary tuples involve
/// no elements and need no bag.
pub fn check_path_decomposition(
    s: &RelationalStructure,
    d: &PathDecomposition,
) -> Result<WidthPair> {
    for bag in &d.bags {
        for e in bag {
            if s.elem_index(e).is_none() {
                return Err(Error::UnknownElement(e.clone()));
            }
        }
    }
    for e in s.universe() {
        let positions: Vec<usize> = d
            .bags
            .iter()
            .enumerate()
            .filter(|(_, bag)| bag.contains(e))
            .map(|(i, _)| i)
            .collect();
        match (positions.first(), positions.last()) {
            (None, _) => return Err(Error::UncoveredElement(e.clone())),
            (Some(&first), Some(&last)) => {
                if positions.len() != last - first + 1 {
                    return Err(Error::IntervalViolation(e.clone()));
                }
            }
            _ => unreachable!(),
        }
    }
    for (symbol, t) in s.tuples() {
        if t.is_empty() {
            continue;
        }
        let covered = d
            .bags
            .iter()
            .any(|bag| t.iter().all(|e| bag.contains(e)));
        if !covered {
            return Err(Error::UncoveredTuple {
                symbol: symbol.to_string(),
                tuple: t.clone(),
            });
        }
    }
    Ok(d.width())
}

/// Rewrites `d` so that consecutive bags are always comparable (one contains
/// the other) by inserting the intersection between incomparable neighbors,
/// and ensures the sequence ends with an empty bag. Width is preserved.
/// The result is a fixed point: canonicalizing twice changes nothing.
pub fn canonicalize_decomposition(d: &PathDecomposition) -> PathDecomposition {
    let mut bags: Vec<BTreeSet<String>> = Vec::new();
    for bag in &d.bags {
        if let Some(prev) = bags.last() {
            if !(prev.is_subset(bag) || bag.is_subset(prev)) {
                bags.push(prev.intersection(bag).cloned().collect());
            }
        }
        bags.push(bag.clone());
    }
    if bags.last().map_or(true, |b| !b.is_empty()) {
        bags.push(BTreeSet::new());
    }
    PathDecomposition { bags }
}

/// True iff consecutive bags are comparable and the last bag is empty: the
/// shape produced by [`canonicalize_decomposition`] and consumed by the
/// formula compiler.
pub fn is_canonical(d: &PathDecomposition) -> bool {
    if d.bags.last().map_or(true, |b| !b.is_empty()) {
        return false;
    }
    d.bags
        .windows(2)
        .all(|w| w[0].is_subset(&w[1]) || w[1].is_subset(&w[0]))
}

// ---------------------------------------------------------------------------
// Exact width search.
//
// States are (finished, current-bag) bitmask pairs. A transition drops every
// element whose covering constraints are all discharged and then adds a
// nonempty set of fresh elements. Dropping all droppable elements is safe:
// an element with an undischarged constraint is not droppable, and a
// droppable one can never be needed by a later bag, so eager dropping only
// shrinks bags and intersections. Acceptance is up-closed in (j, k), which
// is all the width search needs.
// ---------------------------------------------------------------------------

type Mask = u32;

/// Decides whether the constraint hypergraph (element count `n`, covering
/// sets `cover`, each of size >= 2) admits a decomposition of width <=
/// `(j, k)`, returning the bag masks of one if so.
fn solve_masks(n: usize, cover: &[Mask], j: usize, k: usize) -> Option<Vec<Mask>> {
    assert!(n < 32);
    let full: Mask = if n == 0 { 0 } else { (1 << n) - 1 };
    let accepts = |f: Mask, c: Mask| {
        (f | c) == full && cover.iter().all(|&m| m & !c == 0 || m & f != 0)
    };
    if accepts(0, 0) {
        return Some(Vec::new());
    }
    let key = |f: Mask, c: Mask| ((f as u64) << 32) | c as u64;
    let mut parent: HashMap<u64, u64> = HashMap::new();
    parent.insert(key(0, 0), u64::MAX);
    let mut queue = VecDeque::new();
    queue.push_back((0 as Mask, 0 as Mask));
    let mut goal: Option<u64> = None;

    'bfs: while let Some((f, c)) = queue.pop_front() {
        let mut droppable: Mask = 0;
        for v in 0..n {
            let bit = 1 << v;
            if c & bit != 0
                && cover
                    .iter()
                    .all(|&m| m & bit == 0 || m & !c == 0 || m & f != 0)
            {
                droppable |= bit;
            }
        }
        let keep = c & !droppable;
        let keep_size = keep.count_ones() as usize;
        if keep_size > j || keep_size > k {
            continue;
        }
        let f2 = f | droppable;
        let free = full & !(f2 | keep);
        let room = k - keep_size;

        // Standard submask walk over the free elements.
        let mut sub = free;
        while sub != 0 {
            if (sub.count_ones() as usize) <= room {
                let c2 = keep | sub;
                let k2 = key(f2, c2);
                if let Entry::Vacant(slot) = parent.entry(k2) {
                    slot.insert(key(f, c));
                    if accepts(f2, c2) {
                        goal = Some(k2);
                        break 'bfs;
                    }
                    queue.push_back((f2, c2));
                }
            }
            sub = (sub - 1) & free;
        }
    }

    let goal = goal?;
    let mut bags = Vec::new();
    let mut cur = goal;
    while cur != key(0, 0) {
        bags.push((cur & 0xffff_ffff) as Mask);
        cur = parent[&cur];
    }
    bags.reverse();
    Some(bags)
}

/// Covering sets of `s` as masks over universe indices: one per distinct
/// tuple element set of size >= 2 (smaller sets are subsumed by the
/// every-element-in-a-bag requirement). Sorted and deduplicated, so the
/// result doubles as a memoization key.
fn cover_masks(s: &RelationalStructure) -> Vec<Mask> {
    let mut out = BTreeSet::new();
    for (_, t) in s.tuples() {
        let mut m: Mask = 0;
        for e in t {
            m |= 1 << s.elem_index(e).unwrap();
        }
        if m.count_ones() >= 2 {
            out.insert(m);
        }
    }
    out.into_iter().collect()
}

fn bags_from_masks(universe: &[String], masks: &[Mask]) -> PathDecomposition {
    let bags = masks
        .iter()
        .map(|&m| {
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect();
    PathDecomposition { bags }
}

/// Finds a path decomposition of `s` of width at most `(j, k)`, if any.
pub fn find_path_decomposition(
    s: &RelationalStructure,
    j: usize,
    k: usize,
) -> Option<PathDecomposition> {
    let masks = solve_masks(s.size(), &cover_masks(s), j, k)?;
    let d = bags_from_masks(s.universe(), &masks);
    debug_assert!(check_path_decomposition(s, &d).is_ok());
    Some(d)
}

/// The set of Pareto-minimal achievable widths of `s` among widths with
/// `k <= k_cap`, sorted by `j`. Empty when even `(k_cap, k_cap)` is not
/// achievable.
pub fn minimal_widths(s: &RelationalStructure, k_cap: usize) -> Vec<WidthPair> {
    let n = s.size();
    let cover = cover_masks(s);
    let mut frontier: Vec<WidthPair> = Vec::new();
    let mut best_j_so_far = usize::MAX;
    for k in 0..=k_cap {
        // Smallest j achievable at this k, if any.
        let mut found: Option<usize> = None;
        for j in 0..=k {
            if frontier.iter().any(|w| w.le(&WidthPair::new(j, k))) {
                found = Some(j);
                break;
            }
            if solve_masks(n, &cover, j, k).is_some() {
                found = Some(j);
                break;
            }
        }
        if let Some(j) = found {
            if j < best_j_so_far {
                frontier.push(WidthPair::new(j, k));
                best_j_so_far = j;
            }
        }
    }
    frontier.sort();
    frontier
}

// ---------------------------------------------------------------------------
// Bounded-width structure enumeration.
// ---------------------------------------------------------------------------

/// Streams every structure over `vocab` with universe `"1".."n"` for each
/// `1 <= n <= n_max` that admits a decomposition of width `(j, k)`, paired
/// with a witness decomposition. Structures are emitted by universe size and
/// then lexicographically on the relation bitmap (tuples in sorted order,
/// first tuple most significant; the all-empty structure comes first).
///
/// The width filter is memoized on the covering-set key, so sweeping all
/// bitmaps of one universe size costs one dynamic program per distinct
/// Gaifman pattern, not per structure.
pub fn enumerate_structures(
    vocab: &Vocabulary,
    n_max: usize,
    j: usize,
    k: usize,
) -> StructureEnumeration {
    StructureEnumeration {
        vocab: vocab.clone(),
        n_max,
        j,
        k,
        n: 0,
        mask: 0,
        mask_count: 0,
        tuple_space: Vec::new(),
        universe: Vec::new(),
        memo: HashMap::new(),
    }
}

pub struct StructureEnumeration {
    vocab: Vocabulary,
    n_max: usize,
    j: usize,
    k: usize,
    // Position within size class `n`: next bitmap value to consider.
    n: usize,
    mask: u64,
    mask_count: u64,
    // All tuples over the current universe, in emission bit order: entry i is
    // (symbol index, tuple of element indices) for bit (T-1-i) of the mask.
    tuple_space: Vec<(usize, Vec<usize>)>,
    universe: Vec<String>,
    memo: HashMap<(usize, Vec<Mask>), MemoizedBags>,
}

/// Bag masks of a decomposition solving one (universe size, cover) key, or
/// `None` when none fits the budget.
type MemoizedBags = Option<Rc<Vec<Mask>>>;

impl StructureEnumeration {
    fn enter_size(&mut self, n: usize) -> bool {
        self.n = n;
        self.universe = (1..=n).map(|i| i.to_string()).collect();
        self.tuple_space.clear();
        for (sym_idx, (_, arity)) in self.vocab.symbols().enumerate() {
            let mut t = vec![0usize; arity];
            loop {
                self.tuple_space.push((sym_idx, t.clone()));
                // Advance t lexicographically, rightmost position fastest.
                let mut pos = arity;
                while pos > 0 {
                    pos -= 1;
                    t[pos] += 1;
                    if t[pos] < n {
                        break;
                    }
                    t[pos] = 0;
                }
                if t.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
        // The bitmap sweep is only sensible while it fits a u64; callers use
        // small universes or few symbols.
        let bits = self.tuple_space.len();
        if bits >= 63 {
            return false;
        }
        self.mask = 0;
        self.mask_count = 1u64 << bits;
        true
    }

    fn build(&mut self) -> Option<(RelationalStructure, PathDecomposition)> {
        let bits = self.tuple_space.len();
        // Covering key straight from the bitmap.
        let mut cover_set: BTreeSet<Mask> = BTreeSet::new();
        for i in 0..bits {
            if self.mask & (1 << (bits - 1 - i)) != 0 {
                let (_, t) = &self.tuple_space[i];
                let mut m: Mask = 0;
                for &e in t {
                    m |= 1 << e;
                }
                if m.count_ones() >= 2 {
                    cover_set.insert(m);
                }
            }
        }
        let cover: Vec<Mask> = cover_set.into_iter().collect();
        let memo_key = (self.n, cover.clone());
        let entry = self
            .memo
            .entry(memo_key)
            .or_insert_with(|| solve_masks(self.n, &cover, self.j, self.k).map(Rc::new))
            .clone();
        let bag_masks = entry?;

        let mut s = RelationalStructure::new(self.vocab.clone(), self.universe.clone()).unwrap();
        for i in 0..bits {
            if self.mask & (1 << (bits - 1 - i)) != 0 {
                let (sym_idx, t) = &self.tuple_space[i];
                let symbol: String = self
                    .vocab
                    .symbols()
                    .nth(*sym_idx)
                    .map(|(name, _)| name.to_string())
                    .unwrap();
                let tuple: Vec<String> =
                    t.iter().map(|&e| self.universe[e].clone()).collect();
                s.add_tuple(&symbol, tuple).unwrap();
            }
        }
        let d = bags_from_masks(&self.universe, &bag_masks);
        Some((s, d))
    }
}

impl Iterator for StructureEnumeration {
    type Item = (RelationalStructure, PathDecomposition);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.n == 0 || self.mask >= self.mask_count {
                let next_n = self.n + 1;
                if next_n > self.n_max {
                    return None;
                }
                if !self.enter_size(next_n) {
                    return None;
                }
            }
            let item = self.build();
            self.mask += 1;
            if let Some(item) = item {
                return Some(item);
            }
        }
    }
}
