//! Homomorphism search against the exhaustive map-enumeration oracle,
//! plus the order-theoretic properties of the homomorphism relation.

mod common;

use common::{
    digraphs_up_to_iso, edge_mask, oracle_hom_exists, oracle_hom_exists_binary, random_binary,
    random_image, rng,
};
use pathdual::{
    all_homomorphisms, disjoint_union, find_homomorphism, induced_substructure, is_homomorphism,
    PartialMap,
};
use rand::Rng;

#[test]
fn search_matches_exhaustive_oracle_on_all_three_element_pairs() {
    let classes: Vec<_> = (0..=3).flat_map(digraphs_up_to_iso).collect();
    let mut checked = 0usize;
    for a in &classes {
        let (na, am) = (a.size(), edge_mask(a));
        for b in &classes {
            let (nb, bm) = (b.size(), edge_mask(b));
            let searched = find_homomorphism(a, b, &PartialMap::new())
                .unwrap()
                .is_some();
            assert_eq!(
                searched,
                oracle_hom_exists_binary(na, am, nb, bm),
                "disagreement on masks a={am:#b} ({na} elems), b={bm:#b} ({nb} elems)"
            );
            checked += 1;
        }
    }
    assert!(checked > 10_000, "swept {checked} pairs");
}

#[test]
fn found_witnesses_always_verify() {
    let mut r = rng(0xA1F1);
    for _ in 0..200 {
        let (na, nb) = (r.gen_range(1..=4), r.gen_range(1..=3));
        let a = random_binary(&mut r, na, 0.3);
        let b = random_binary(&mut r, nb, 0.5);
        if let Some(h) = find_homomorphism(&a, &b, &PartialMap::new()).unwrap() {
            assert!(is_homomorphism(&a, &b, &h).unwrap());
        } else {
            assert!(!oracle_hom_exists(&a, &b));
        }
    }
}

#[test]
fn enumeration_agrees_with_search_and_oracle_counts() {
    let mut r = rng(0xA1F2);
    for _ in 0..100 {
        let (na, nb) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_binary(&mut r, na, 0.35);
        let b = random_binary(&mut r, nb, 0.5);
        let all = all_homomorphisms(&a, &b).unwrap();
        assert_eq!(!all.is_empty(), oracle_hom_exists(&a, &b));
        for h in &all {
            assert!(is_homomorphism(&a, &b, h).unwrap());
        }
    }
}

#[test]
fn composition_of_homomorphisms_is_a_homomorphism() {
    let mut r = rng(0xA1F3);
    for _ in 0..100 {
        let (na, mb, mc) = (r.gen_range(1..=4), r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_binary(&mut r, na, 0.4);
        let (b, h) = random_image(&mut r, &a, mb, 0.2);
        let (c, g) = random_image(&mut r, &b, mc, 0.2);
        assert!(is_homomorphism(&a, &b, &h).unwrap());
        assert!(is_homomorphism(&b, &c, &g).unwrap());
        let composed: PartialMap = h.iter().map(|(x, y)| (x.clone(), g[y].clone())).collect();
        assert!(is_homomorphism(&a, &c, &composed).unwrap());
    }
}

#[test]
fn restriction_to_an_induced_substructure_remains_a_homomorphism() {
    let mut r = rng(0xA1F4);
    for _ in 0..100 {
        let (na, mb) = (r.gen_range(2..=4), r.gen_range(1..=3));
        let a = random_binary(&mut r, na, 0.4);
        let (b, h) = random_image(&mut r, &a, mb, 0.2);
        let keep: Vec<String> = a
            .universe()
            .iter()
            .filter(|_| r.gen_bool(0.6))
            .cloned()
            .collect();
        let sub = induced_substructure(&a, &keep).unwrap();
        let restricted: PartialMap = keep.iter().map(|e| (e.clone(), h[e].clone())).collect();
        assert!(is_homomorphism(&sub, &b, &restricted).unwrap());
    }
}

#[test]
fn disjoint_union_maps_iff_both_parts_map() {
    let mut r = rng(0xA1F5);
    for _ in 0..60 {
        let (n1, n2, nb) = (r.gen_range(1..=3), r.gen_range(1..=3), r.gen_range(1..=3));
        let a1 = random_binary(&mut r, n1, 0.4);
        let a2 = random_binary(&mut r, n2, 0.4);
        let b = random_binary(&mut r, nb, 0.5);
        let both = disjoint_union(&[a1.clone(), a2.clone()]).unwrap();
        let left = find_homomorphism(&a1, &b, &PartialMap::new()).unwrap().is_some();
        let right = find_homomorphism(&a2, &b, &PartialMap::new()).unwrap().is_some();
        let union = find_homomorphism(&both, &b, &PartialMap::new()).unwrap().is_some();
        assert_eq!(union, left && right);
    }
}
