//! Stock structures and programs used across tests, examples, and the CLI:
//! cliques, cycles, oriented paths, the three-relation 2-SAT template, and
//! the odd-closed-walk Datalog program.

use crate::datalog::{DatalogAtom, DatalogRule, LinearDatalogProgram};
use crate::structure::{RelationalStructure, Vocabulary};

/// Complete loopless digraph on `k` vertices `0..k` (both edge directions).
pub fn k_clique(k: usize) -> RelationalStructure {
    assert!(k >= 1);
    let universe: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let mut s = RelationalStructure::new(Vocabulary::binary(), universe).unwrap();
    for i in 0..k {
        for j in 0..k {
            if i != j {
                s.add_tuple("E", vec![i.to_string(), j.to_string()]).unwrap();
            }
        }
    }
    s
}

/// Undirected cycle on `0..n`: edges (i, i±1 mod n). `sym_cycle(1)` is a
/// single loop; `sym_cycle(2)` equals `k_clique(2)`.
pub fn sym_cycle(n: usize) -> RelationalStructure {
    assert!(n >= 1);
    let universe: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut s = RelationalStructure::new(Vocabulary::binary(), universe).unwrap();
    for i in 0..n {
        let a = i.to_string();
        let b = ((i + 1) % n).to_string();
        s.add_tuple("E", vec![a.clone(), b.clone()]).unwrap();
        s.add_tuple("E", vec![b, a]).unwrap();
    }
    s
}

/// Directed cycle on `0..n`: edges (i, i+1 mod n).
pub fn directed_cycle(n: usize) -> RelationalStructure {
    assert!(n >= 1);
    let universe: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut s = RelationalStructure::new(Vocabulary::binary(), universe).unwrap();
    for i in 0..n {
        s.add_tuple("E", vec![i.to_string(), ((i + 1) % n).to_string()])
            .unwrap();
    }
    s
}

/// Oriented path on vertices `0..=pattern.len()`. Character `i` of the
/// pattern orients the edge between `i` and `i+1`: `F` forward (i -> i+1),
/// `B` backward (i+1 -> i). The empty pattern gives a single vertex.
pub fn oriented_path(pattern: &str) -> RelationalStructure {
    let m = pattern.len();
    let universe: Vec<String> = (0..=m).map(|i| i.to_string()).collect();
    let mut s = RelationalStructure::new(Vocabulary::binary(), universe).unwrap();
    for (i, c) in pattern.chars().enumerate() {
        let (from, to) = match c {
            'F' => (i, i + 1),
            'B' => (i + 1, i),
            _ => panic!("oriented_path pattern must be over {{F, B}}, got `{c}`"),
        };
        s.add_tuple("E", vec![from.to_string(), to.to_string()])
            .unwrap();
    }
    s
}

/// The Boolean 2-SAT template: universe {0, 1} with
/// P0 = {0,1}^2 minus (0,0), P1 = minus (0,1), P2 = minus (1,1).
/// Homomorphisms into it are exactly the satisfying assignments of the
/// 2-CNF a structure encodes (P0 positive, P1 mixed positive-first, P2
/// negative clauses).
pub fn b_2sat() -> RelationalStructure {
    let vocab = Vocabulary::new(vec![("P0", 2), ("P1", 2), ("P2", 2)]).unwrap();
    let mut s = RelationalStructure::new(vocab, vec!["0", "1"]).unwrap();
    for x in ["0", "1"] {
        for y in ["0", "1"] {
            if (x, y) != ("0", "0") {
                s.add_tuple("P0", vec![x, y]).unwrap();
            }
            if (x, y) != ("0", "1") {
                s.add_tuple("P1", vec![x, y]).unwrap();
            }
            if (x, y) != ("1", "1") {
                s.add_tuple("P2", vec![x, y]).unwrap();
            }
        }
    }
    s
}

/// Linear Datalog program accepting exactly the digraphs that contain a
/// closed walk of odd length; on symmetric graphs this is
/// non-2-colorability. P(x,y) holds when an odd walk runs from x to y.
/// Inferred bounds: (2, 4).
pub fn odd_closed_walk_program() -> LinearDatalogProgram {
    let edb = Vocabulary::binary();
    let idb = Vocabulary::new(vec![("P", 2), ("Q", 0)]).unwrap();
    let rules = vec![
        DatalogRule {
            head: DatalogAtom::new("P", &["x", "y"]),
            body: vec![DatalogAtom::new("E", &["x", "y"])],
        },
        DatalogRule {
            head: DatalogAtom::new("P", &["x", "y"]),
            body: vec![
                DatalogAtom::new("P", &["x", "z"]),
                DatalogAtom::new("E", &["z", "u"]),
                DatalogAtom::new("E", &["u", "y"]),
            ],
        },
        DatalogRule {
            head: DatalogAtom::new("Q", &[]),
            body: vec![DatalogAtom::new("P", &["x", "x"])],
        },
    ];
    LinearDatalogProgram::new(edb, idb, rules, "Q").unwrap()
}
