//! The canonical query against a direct partial-homomorphism oracle, and the
//! decomposition compiler against brute-force homomorphism existence, swept
//! exhaustively over small structures up to renaming of elements.

mod common;

use std::collections::BTreeMap;

use common::{
    digraphs_up_to_iso, edge_mask, oracle_hom_exists_binary, permutations, random_binary,
    random_image, rng,
};
use pathdual::logic::{
    check_restriction, compile_decomposition_to_formula, evaluate, theta_query,
};
use pathdual::pathwidth::{
    canonicalize_decomposition, enumerate_structures, find_path_decomposition,
};
use pathdual::{RelationalStructure, Vocabulary};
use rand::Rng;

/// Decodes `code` into an m-tuple of indices below `n`, least significant
/// position first.
fn decode(mut code: usize, m: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(code % n);
        code /= n;
    }
    out
}

/// Direct check that `elems[i] -> bs[i]` (as indices) is well defined and
/// sends every fully covered tuple of `a` into `bmask`.
fn oracle_partial_hom(
    na: usize,
    atuples: &[(usize, usize)],
    elems: &[usize],
    nb: usize,
    bmask: u64,
    bs: &[usize],
) -> bool {
    let mut map = vec![usize::MAX; na];
    for (&e, &b) in elems.iter().zip(bs) {
        if map[e] != usize::MAX && map[e] != b {
            return false;
        }
        map[e] = b;
    }
    atuples.iter().all(|&(x, y)| {
        map[x] == usize::MAX || map[y] == usize::MAX || bmask >> (map[x] * nb + map[y]) & 1 == 1
    })
}

#[test]
fn theta_matches_the_partial_homomorphism_oracle_exhaustively() {
    let classes: Vec<RelationalStructure> = (0..=3).flat_map(digraphs_up_to_iso).collect();
    assert_eq!(classes.len(), 117);
    let mut agreements = 0usize;
    for a in &classes {
        let na = a.size();
        let atuples: Vec<(usize, usize)> = a
            .relation("E")
            .unwrap()
            .iter()
            .map(|t| (a.elem_index(&t[0]).unwrap(), a.elem_index(&t[1]).unwrap()))
            .collect();
        for m in 0..=3usize {
            for ecode in 0..na.pow(m as u32) {
                let elems_idx = decode(ecode, m, na.max(1));
                let elems: Vec<String> = elems_idx
                    .iter()
                    .map(|&i| a.universe()[i].clone())
                    .collect();
                let theta = theta_query(a, &elems).unwrap();
                assert!(theta.is_quantifier_free());
                for b in &classes {
                    let nb = b.size();
                    let bmask = edge_mask(b);
                    for bcode in 0..nb.pow(m as u32) {
                        let bs_idx = decode(bcode, m, nb.max(1));
                        let assignment: BTreeMap<String, String> = bs_idx
                            .iter()
                            .enumerate()
                            .map(|(i, &bi)| (format!("v{}", i + 1), b.universe()[bi].clone()))
                            .collect();
                        let via_theta = evaluate(b, &theta, &assignment).unwrap();
                        let via_oracle =
                            oracle_partial_hom(na, &atuples, &elems_idx, nb, bmask, &bs_idx);
                        assert_eq!(via_theta, via_oracle);
                        agreements += 1;
                    }
                }
            }
        }
    }
    // 117^2 + 334^2 + 978^2 + 2890^2: class count times index tuples per m.
    assert_eq!(agreements, 9_433_829);
}

#[test]
fn compiled_sentences_decide_mapping_into_every_small_target() {
    let vocab = Vocabulary::binary();
    let perms: Vec<Vec<Vec<usize>>> = (0..=4).map(permutations).collect();
    let mut seen: Vec<Vec<bool>> = (0..=4).map(|n| vec![false; 1usize << (n * n)]).collect();
    let mut reps = Vec::new();
    let mut emitted = 0usize;
    for (s, d) in enumerate_structures(&vocab, 4, 2, 3) {
        emitted += 1;
        let n = s.size();
        let mask = edge_mask(&s);
        if seen[n][mask as usize] {
            continue;
        }
        for p in &perms[n] {
            let mut pm = 0u64;
            for x in 0..n {
                for y in 0..n {
                    if mask >> (x * n + y) & 1 == 1 {
                        pm |= 1 << (p[x] * n + p[y]);
                    }
                }
            }
            seen[n][pm as usize] = true;
        }
        reps.push((s, d));
    }
    assert_eq!(emitted, 54_402);
    assert!(reps.len() > 500, "kept {} class representatives", reps.len());

    let targets: Vec<RelationalStructure> = (0..=3).flat_map(digraphs_up_to_iso).collect();
    let empty = BTreeMap::new();
    for (s, d) in &reps {
        let sentence =
            compile_decomposition_to_formula(s, &canonicalize_decomposition(d)).unwrap();
        assert!(sentence.is_sentence());
        assert!(check_restriction(&sentence, 2, 3).ok);
        let (ns, smask) = (s.size(), edge_mask(s));
        for t in &targets {
            let holds = evaluate(t, &sentence, &empty).unwrap();
            let maps = oracle_hom_exists_binary(ns, smask, t.size(), edge_mask(t));
            assert_eq!(holds, maps, "sentence of {s:?} misjudged target {t:?}");
        }
    }
}

#[test]
fn homomorphisms_preserve_compiled_sentences() {
    let mut r = rng(0xC0F1);
    let empty = BTreeMap::new();
    let mut tried = 0usize;
    let mut preserved = 0usize;
    while tried < 100 {
        let np = r.gen_range(1..=3);
        let p = random_binary(&mut r, np, 0.25);
        let Some(d) = find_path_decomposition(&p, 2, 3) else {
            continue;
        };
        let sentence =
            compile_decomposition_to_formula(&p, &canonicalize_decomposition(&d)).unwrap();
        let (na, mb) = (r.gen_range(2..=4), r.gen_range(1..=3));
        let a = random_binary(&mut r, na, 0.5);
        let (b, _) = random_image(&mut r, &a, mb, 0.2);
        if evaluate(&a, &sentence, &empty).unwrap() {
            assert!(
                evaluate(&b, &sentence, &empty).unwrap(),
                "sentence lost along a homomorphism"
            );
            preserved += 1;
        }
        tried += 1;
    }
    assert!(preserved >= 10, "only {preserved} positive cases");
}
