//! Shared oracles and random generators for the integration suites. The
//! oracles deliberately avoid the library's search routines: homomorphism
//! existence is decided by enumerating all maps, colorability by
//! enumerating all assignments, and walk reachability by breadth-first
//! search over a doubled vertex set.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathdual::datalog::{DatalogAtom, DatalogRule, LinearDatalogProgram};
use pathdual::{PartialMap, RelationalStructure, Vocabulary};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // Next permutation; stop after the descending one.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

/// Structure over one binary symbol with universe "1".."n" and edge set
/// given by `mask` bit x*n+y for the pair (x, y) of 0-based indices.
pub fn structure_from_mask(n: usize, mask: u64) -> RelationalStructure {
    let universe: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut s = RelationalStructure::new(Vocabulary::binary(), universe).unwrap();
    for x in 0..n {
        for y in 0..n {
            if mask >> (x * n + y) & 1 == 1 {
                s.add_tuple("E", vec![(x + 1).to_string(), (y + 1).to_string()])
                    .unwrap();
            }
        }
    }
    s
}

/// The edge bitmap of a single-binary-symbol structure (inverse of
/// [`structure_from_mask`] up to element naming).
pub fn edge_mask(s: &RelationalStructure) -> u64 {
    let n = s.size();
    let mut mask = 0u64;
    for t in s.relation("E").unwrap() {
        let x = s.elem_index(&t[0]).unwrap();
        let y = s.elem_index(&t[1]).unwrap();
        mask |= 1 << (x * n + y);
    }
    mask
}

/// One representative per isomorphism class of single-binary-symbol
/// structures with exactly `n` elements (loops allowed). The
/// representative is the lexicographically least edge bitmap of its class.
pub fn digraphs_up_to_iso(n: usize) -> Vec<RelationalStructure> {
    let bits = n * n;
    assert!(bits <= 16, "dense sweep only supports n <= 4");
    let perms = permutations(n);
    let mut seen = vec![false; 1usize << bits];
    let mut out = Vec::new();
    for mask in 0..(1u64 << bits) {
        if seen[mask as usize] {
            continue;
        }
        for p in &perms {
            let mut pm = 0u64;
            for x in 0..n {
                for y in 0..n {
                    if mask >> (x * n + y) & 1 == 1 {
                        pm |= 1 << (p[x] * n + p[y]);
                    }
                }
            }
            seen[pm as usize] = true;
        }
        out.push(structure_from_mask(n, mask));
    }
    out
}

/// One representative per isomorphism class of loopless undirected graphs
/// with exactly `n` vertices, as symmetric structures (both directions of
/// every edge).
pub fn simple_graphs_up_to_iso(n: usize) -> Vec<RelationalStructure> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    let bits = pairs.len();
    assert!(bits <= 20, "pair sweep only supports n <= 6 or so");
    let pair_index = |x: usize, y: usize| {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    let perms = permutations(n);
    let mut seen = vec![false; 1usize << bits];
    let mut out = Vec::new();
    for mask in 0..(1u64 << bits) {
        if seen[mask as usize] {
            continue;
        }
        for p in &perms {
            let mut pm = 0u64;
            for (i, &(x, y)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    pm |= 1 << pair_index(p[x], p[y]);
                }
            }
            seen[pm as usize] = true;
        }
        let universe: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let mut s = RelationalStructure::new(Vocabulary::binary(), universe).unwrap();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.add_tuple("E", vec![(x + 1).to_string(), (y + 1).to_string()])
                    .unwrap();
                s.add_tuple("E", vec![(y + 1).to_string(), (x + 1).to_string()])
                    .unwrap();
            }
        }
        out.push(s);
    }
    out
}

/// Homomorphism existence by enumerating all |B|^|A| maps and checking
/// tuple preservation directly against the relation sets.
pub fn oracle_hom_exists(a: &RelationalStructure, b: &RelationalStructure) -> bool {
    let tuples: Vec<(&str, &Vec<String>)> = a.tuples().collect();
    for (sym, t) in &tuples {
        if t.is_empty() && !b.relation(sym).unwrap().contains(*t) {
            return false;
        }
    }
    let na = a.size();
    let nb = b.size();
    if na == 0 {
        return true;
    }
    if nb == 0 {
        return false;
    }
    let mut m = vec![0usize; na];
    loop {
        let ok = tuples.iter().all(|(sym, t)| {
            let image: Vec<String> = t
                .iter()
                .map(|e| b.universe()[m[a.elem_index(e).unwrap()]].clone())
                .collect();
            b.relation(sym).unwrap().contains(&image)
        });
        if ok {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == na {
                return false;
            }
            m[pos] += 1;
            if m[pos] < nb {
                break;
            }
            m[pos] = 0;
            pos += 1;
        }
    }
}

/// Bitmask form of the exhaustive oracle for single-binary-symbol
/// structures, fast enough for full small-size sweeps.
pub fn oracle_hom_exists_binary(na: usize, amask: u64, nb: usize, bmask: u64) -> bool {
    if na == 0 {
        return true;
    }
    if nb == 0 {
        return false;
    }
    let mut m = vec![0usize; na];
    'maps: loop {
        let mut ok = true;
        'check: for x in 0..na {
            for y in 0..na {
                if amask >> (x * na + y) & 1 == 1 && bmask >> (m[x] * nb + m[y]) & 1 == 0 {
                    ok = false;
                    break 'check;
                }
            }
        }
        if ok {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == na {
                break 'maps;
            }
            m[pos] += 1;
            if m[pos] < nb {
                continue 'maps;
            }
            m[pos] = 0;
            pos += 1;
        }
    }
    false
}

/// Random structure over `vocab` with universe "1".."n"; each possible
/// tuple is present independently with probability `density`.
pub fn random_structure(
    rng: &mut ChaCha8Rng,
    vocab: &Vocabulary,
    n: usize,
    density: f64,
) -> RelationalStructure {
    let universe: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut s = RelationalStructure::new(vocab.clone(), universe).unwrap();
    let arities: Vec<(String, usize)> = vocab
        .symbols()
        .map(|(name, ar)| (name.to_string(), ar))
        .collect();
    for (sym, arity) in arities {
        let count = n.pow(arity as u32);
        for code in 0..count {
            if rng.gen_bool(density) {
                let mut c = code;
                let mut tuple = Vec::with_capacity(arity);
                for _ in 0..arity {
                    tuple.push(((c % n) + 1).to_string());
                    c /= n;
                }
                s.add_tuple(&sym, tuple).unwrap();
            }
        }
    }
    s
}

/// Random single-binary-symbol structure.
pub fn random_binary(rng: &mut ChaCha8Rng, n: usize, density: f64) -> RelationalStructure {
    random_structure(rng, &Vocabulary::binary(), n, density)
}

/// A random homomorphic image of `a`: every element of `a` is sent to a
/// random element of a fresh universe "1".."m", tuple images are added,
/// and independent noise tuples are sprinkled on top. Returns the image
/// structure and the witnessing map.
pub fn random_image(
    rng: &mut ChaCha8Rng,
    a: &RelationalStructure,
    m: usize,
    noise: f64,
) -> (RelationalStructure, PartialMap) {
    assert!(m >= 1);
    let universe: Vec<String> = (1..=m).map(|i| i.to_string()).collect();
    let mut out = RelationalStructure::new(a.vocab().clone(), universe).unwrap();
    let map: PartialMap = a
        .universe()
        .iter()
        .map(|e| (e.clone(), (rng.gen_range(0..m) + 1).to_string()))
        .collect();
    let tuples: Vec<(String, Vec<String>)> = a
        .tuples()
        .map(|(sym, t)| (sym.to_string(), t.clone()))
        .collect();
    for (sym, t) in tuples {
        let image: Vec<String> = t.iter().map(|e| map[e].clone()).collect();
        out.add_tuple(&sym, image).unwrap();
    }
    let arities: Vec<(String, usize)> = a
        .vocab()
        .symbols()
        .map(|(name, ar)| (name.to_string(), ar))
        .collect();
    for (sym, arity) in arities {
        let count = m.pow(arity as u32);
        for code in 0..count {
            if rng.gen_bool(noise) {
                let mut c = code;
                let mut tuple = Vec::with_capacity(arity);
                for _ in 0..arity {
                    tuple.push(((c % m) + 1).to_string());
                    c /= m;
                }
                out.add_tuple(&sym, tuple).unwrap();
            }
        }
    }
    (out, map)
}

/// True iff the vertices can be 2-colored with every edge bichromatic
/// (loops make this fail), by enumerating all assignments.
pub fn oracle_two_colorable(s: &RelationalStructure) -> bool {
    let n = s.size();
    assert!(n <= 16);
    let edges: Vec<(usize, usize)> = s
        .relation("E")
        .unwrap()
        .iter()
        .map(|t| (s.elem_index(&t[0]).unwrap(), s.elem_index(&t[1]).unwrap()))
        .collect();
    (0..(1u32 << n)).any(|coloring| {
        edges
            .iter()
            .all(|&(x, y)| (coloring >> x & 1) != (coloring >> y & 1))
    })
}

/// Ordered pairs (x, y) joined by a directed walk of odd length, by
/// breadth-first search over (vertex, parity) states.
pub fn oracle_odd_walk_pairs(s: &RelationalStructure) -> BTreeSet<(String, String)> {
    let n = s.size();
    let mut adj = vec![Vec::new(); n];
    for t in s.relation("E").unwrap() {
        adj[s.elem_index(&t[0]).unwrap()].push(s.elem_index(&t[1]).unwrap());
    }
    let mut out = BTreeSet::new();
    for start in 0..n {
        let mut seen = vec![[false; 2]; n];
        let mut queue = VecDeque::new();
        seen[start][0] = true;
        queue.push_back((start, 0usize));
        while let Some((v, parity)) = queue.pop_front() {
            for &w in &adj[v] {
                let flipped = 1 - parity;
                if !seen[w][flipped] {
                    seen[w][flipped] = true;
                    queue.push_back((w, flipped));
                }
            }
        }
        for (end, state) in seen.iter().enumerate() {
            if state[1] {
                out.insert((
                    s.universe()[start].clone(),
                    s.universe()[end].clone(),
                ));
            }
        }
    }
    out
}

/// Random linear Datalog program with inferred bounds within (2, 3):
/// input symbol E/2, derived symbols P/2 and the nullary goal Q, two to
/// four derivation rules (at most one derived atom per body, at most
/// three variables per rule) plus one goal rule.
pub fn random_linear_program(rng: &mut ChaCha8Rng) -> LinearDatalogProgram {
    let vars = ["x", "y", "z"];
    let pick2 = |rng: &mut ChaCha8Rng| {
        [
            vars[rng.gen_range(0..vars.len())],
            vars[rng.gen_range(0..vars.len())],
        ]
    };
    let edb = Vocabulary::binary();
    let idb = Vocabulary::new(vec![("P", 2), ("Q", 0)]).unwrap();

    let mut rules = Vec::new();
    // Base rule: P from one or two input atoms.
    let base_atoms = 1 + rng.gen_range(0..2);
    let mut body: Vec<DatalogAtom> = (0..base_atoms)
        .map(|_| {
            let [u, v] = pick2(rng);
            DatalogAtom::new("E", &[u, v])
        })
        .collect();
    let head = head_from_body(rng, "P", 2, &body);
    rules.push(DatalogRule {
        head,
        body: body.clone(),
    });
    // Zero to two recursive rules: one P atom plus one input atom.
    for _ in 0..rng.gen_range(0..3) {
        let [u, v] = pick2(rng);
        let [w, t] = pick2(rng);
        body = vec![
            DatalogAtom::new("P", &[u, v]),
            DatalogAtom::new("E", &[w, t]),
        ];
        let head = head_from_body(rng, "P", 2, &body);
        rules.push(DatalogRule {
            head,
            body: body.clone(),
        });
    }
    // Goal rule from either symbol.
    let [u, v] = pick2(rng);
    let goal_body = if rng.gen_bool(0.7) {
        vec![DatalogAtom::new("P", &[u, v])]
    } else {
        vec![DatalogAtom::new("E", &[u, v])]
    };
    rules.push(DatalogRule {
        head: DatalogAtom::new("Q", &[]),
        body: goal_body,
    });

    let p = LinearDatalogProgram::new(edb, idb, rules, "Q").unwrap();
    let (j, k) = p.bounds();
    assert!(j <= 2 && k <= 3, "generator stays within (2, 3)");
    p
}

/// A head atom whose arguments are drawn from the body's variables.
fn head_from_body(
    rng: &mut ChaCha8Rng,
    pred: &str,
    arity: usize,
    body: &[DatalogAtom],
) -> DatalogAtom {
    let pool: Vec<&str> = {
        let mut seen = Vec::new();
        for atom in body {
            for v in &atom.args {
                if !seen.contains(&v.as_str()) {
                    seen.push(v.as_str());
                }
            }
        }
        seen
    };
    let args: Vec<&str> = (0..arity)
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect();
    DatalogAtom::new(pred, &args)
}

/// A random target whose every relation is a rectangle, the graph of an
/// injective partial function, or a cross, over at most three elements.
/// The classifier is asserted to recognize each relation.
pub fn random_implicational(r: &mut ChaCha8Rng, syms: &[&str]) -> RelationalStructure {
    use pathdual::implicational::{classify_implicational, ImplicationalForm};

    let n = r.gen_range(1..=3);
    let universe: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let vocab = Vocabulary::new(syms.iter().map(|s| (*s, 2)).collect::<Vec<_>>()).unwrap();
    let mut b = RelationalStructure::new(vocab, universe.clone()).unwrap();
    for sym in syms {
        match r.gen_range(0..3) {
            0 => {
                let rows: Vec<String> =
                    universe.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
                let cols: Vec<String> =
                    universe.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
                for x in &rows {
                    for y in &cols {
                        b.add_tuple(sym, vec![x.clone(), y.clone()]).unwrap();
                    }
                }
            }
            1 => {
                let mut targets: Vec<usize> = (0..n).collect();
                for i in (1..targets.len()).rev() {
                    let jx = r.gen_range(0..=i);
                    targets.swap(i, jx);
                }
                for (i, &t) in targets.iter().enumerate() {
                    if r.gen_bool(0.7) {
                        b.add_tuple(sym, vec![universe[i].clone(), universe[t].clone()])
                            .unwrap();
                    }
                }
            }
            _ => {
                let p = r.gen_range(0..n);
                let q = r.gen_range(0..n);
                let mut rows: BTreeSet<usize> = std::iter::once(p).collect();
                let mut cols: BTreeSet<usize> = std::iter::once(q).collect();
                for i in 0..n {
                    if r.gen_bool(0.5) {
                        rows.insert(i);
                    }
                    if r.gen_bool(0.5) {
                        cols.insert(i);
                    }
                }
                for &x in &rows {
                    b.add_tuple(sym, vec![universe[x].clone(), universe[q].clone()])
                        .unwrap();
                }
                for &y in &cols {
                    b.add_tuple(sym, vec![universe[p].clone(), universe[y].clone()])
                        .unwrap();
                }
            }
        }
    }
    for (sym, form) in classify_implicational(&b).unwrap() {
        assert_ne!(
            form,
            ImplicationalForm::NotImplicational,
            "constructed relation {sym} should match a form"
        );
    }
    b
}

/// Implication, forced-one, and forced-zero relations over {0, 1}:
/// expressible as hitting-set clauses under both signs.
pub fn imp_zero_one() -> RelationalStructure {
    let vocab = Vocabulary::new(vec![("Imp", 2), ("One", 1), ("Zero", 1)]).unwrap();
    let mut b = RelationalStructure::new(vocab, vec!["0", "1"]).unwrap();
    for (x, y) in [("0", "0"), ("0", "1"), ("1", "1")] {
        b.add_tuple("Imp", vec![x, y]).unwrap();
    }
    b.add_tuple("One", vec!["1"]).unwrap();
    b.add_tuple("Zero", vec!["0"]).unwrap();
    b
}
