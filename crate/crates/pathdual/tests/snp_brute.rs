//! The sentence evaluator against a brute-force sweep over second-order
//! interpretations, the grounding solver against a truth table, and the
//! semantic halves of the program/sentence translations.

mod common;

use common::{random_binary, random_image, random_linear_program, rng, simple_graphs_up_to_iso};
use pathdual::datalog::accepts;
use pathdual::generators::odd_closed_walk_program;
use pathdual::snp::{
    datalog_to_snp, evaluate_snp, ground_snp, snp_to_datalog, GroundClauseStatus,
    GroundKromFormula, KromSNPSentence, SNPClause, SNPLiteral,
};
use pathdual::{RelationalStructure, Vocabulary};
use rand::Rng;

/// Every second-order interpretation (one bit per possible ground atom),
/// checked against every grounding of each clause's own variables. Clauses
/// without variables are grounded once even on the empty universe, matching
/// the evaluator's per-clause closure.
fn oracle_evaluate_snp(f: &KromSNPSentence, a: &RelationalStructure) -> bool {
    let n = a.size();
    let so: Vec<(String, usize)> = f
        .so()
        .symbols()
        .map(|(s, ar)| (s.to_string(), ar))
        .collect();
    let spaces: Vec<usize> = so.iter().map(|&(_, ar)| n.pow(ar as u32)).collect();
    let offsets: Vec<usize> = spaces
        .iter()
        .scan(0usize, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total: usize = spaces.iter().sum();
    assert!(total <= 16, "interpretation space sized for small inputs");

    let clause_vars = |clause: &SNPClause| -> Vec<String> {
        let mut vars: Vec<String> = Vec::new();
        for lit in clause {
            let names: Vec<&String> = match lit {
                SNPLiteral::Edb { args, .. } | SNPLiteral::So { args, .. } => args.iter().collect(),
                SNPLiteral::Eq { left, right, .. } => vec![left, right],
            };
            for v in names {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        vars
    };

    'interps: for interp in 0u64..(1u64 << total) {
        for clause in f.clauses() {
            let vars = clause_vars(clause);
            let m = vars.len();
            if m > 0 && n == 0 {
                continue;
            }
            for gcode in 0..n.pow(m as u32).max(1) {
                let assign: Vec<usize> = {
                    let mut c = gcode;
                    (0..m)
                        .map(|_| {
                            let e = c % n.max(1);
                            c /= n.max(1);
                            e
                        })
                        .collect()
                };
                let elem = |v: &String| assign[vars.iter().position(|x| x == v).unwrap()];
                let sat = clause.iter().any(|lit| match lit {
                    SNPLiteral::Edb { neg, rel, args } => {
                        let tuple: Vec<String> = args
                            .iter()
                            .map(|v| a.universe()[elem(v)].clone())
                            .collect();
                        a.relation(rel).unwrap().contains(&tuple) != *neg
                    }
                    SNPLiteral::Eq { neg, left, right } => (elem(left) == elem(right)) != *neg,
                    SNPLiteral::So { neg, rel, args } => {
                        let p = so.iter().position(|(s, _)| s == rel).unwrap();
                        let code: usize = args.iter().rev().fold(0, |acc, v| acc * n + elem(v));
                        (interp >> (offsets[p] + code) & 1 == 1) != *neg
                    }
                });
                if !sat {
                    continue 'interps;
                }
            }
        }
        return true;
    }
    false
}

/// Truth table over the ground atoms; the independent route below the
/// implication-graph solver.
fn oracle_ground_sat(g: &GroundKromFormula) -> bool {
    if g.clauses
        .iter()
        .any(|c| c.status == GroundClauseStatus::Violated)
    {
        return false;
    }
    let n = g.atoms.len();
    assert!(n <= 12);
    (0..(1u32 << n)).any(|assign| {
        g.clauses.iter().all(|c| {
            c.status != GroundClauseStatus::Open
                || c.literals
                    .iter()
                    .any(|&(pos, id)| (assign >> id & 1 == 1) == pos)
        })
    })
}

/// Sentence with a unary predicate that must spread along edges and is
/// forbidden on loop vertices.
fn spreading_sentence() -> KromSNPSentence {
    KromSNPSentence::new(
        Vocabulary::binary(),
        Vocabulary::new(vec![("S", 1)]).unwrap(),
        vec!["x".to_string(), "y".to_string()],
        vec![
            vec![
                SNPLiteral::so(false, "S", &["x"]),
                SNPLiteral::edb(true, "E", &["x", "y"]),
                SNPLiteral::so(true, "S", &["y"]),
            ],
            vec![
                SNPLiteral::so(true, "S", &["x"]),
                SNPLiteral::edb(true, "E", &["x", "x"]),
            ],
        ],
    )
    .unwrap()
}

/// Sentence with no second-order part: every edge must be a loop, and every
/// pair of equal endpoints must carry an edge.
fn loops_only_sentence() -> KromSNPSentence {
    KromSNPSentence::new(
        Vocabulary::binary(),
        Vocabulary::new(Vec::<(&str, usize)>::new()).unwrap(),
        vec!["x".to_string(), "y".to_string()],
        vec![
            vec![
                SNPLiteral::edb(true, "E", &["x", "y"]),
                SNPLiteral::eq(false, "x", "y"),
            ],
            vec![
                SNPLiteral::eq(true, "x", "y"),
                SNPLiteral::edb(false, "E", &["x", "y"]),
            ],
        ],
    )
    .unwrap()
}

fn empty_graph() -> RelationalStructure {
    RelationalStructure::new(Vocabulary::binary(), Vec::<String>::new()).unwrap()
}

#[test]
fn evaluator_matches_the_interpretation_sweep() {
    let mut r = rng(0xE1A1);
    let mut sentences: Vec<KromSNPSentence> = (0..12)
        .map(|_| datalog_to_snp(&random_linear_program(&mut r)))
        .collect();
    sentences.push(datalog_to_snp(&odd_closed_walk_program()));
    sentences.push(spreading_sentence());
    sentences.push(loops_only_sentence());
    for f in &sentences {
        assert_eq!(
            evaluate_snp(f, &empty_graph()).unwrap(),
            oracle_evaluate_snp(f, &empty_graph())
        );
        for _ in 0..10 {
            let n = r.gen_range(1..=3);
            let density = r.gen_range(0.1..0.7);
            let a = random_binary(&mut r, n, density);
            assert_eq!(
                evaluate_snp(f, &a).unwrap(),
                oracle_evaluate_snp(f, &a),
                "evaluator disagreement on {a:?}"
            );
        }
    }
}

#[test]
fn grounding_solver_matches_the_truth_table() {
    let mut r = rng(0xE1A2);
    let mut compared = 0usize;
    for _ in 0..20 {
        let f = datalog_to_snp(&random_linear_program(&mut r));
        for _ in 0..10 {
            let n = r.gen_range(1..=3);
            let a = random_binary(&mut r, n, 0.3);
            let g = ground_snp(&f, &a).unwrap();
            if g.atoms.len() <= 12 {
                assert_eq!(g.is_satisfiable(), oracle_ground_sat(&g));
                compared += 1;
            }
        }
    }
    assert!(compared >= 100, "only {compared} residuals were small enough");
}

#[test]
fn sentence_value_is_program_rejection() {
    let mut r = rng(0xE1A3);
    for _ in 0..10 {
        let p = random_linear_program(&mut r);
        let f = datalog_to_snp(&p);
        assert_eq!(
            evaluate_snp(&f, &empty_graph()).unwrap(),
            !accepts(&p, &empty_graph()).unwrap()
        );
        for _ in 0..5 {
            let n = r.gen_range(1..=4);
            let a = random_binary(&mut r, n, 0.35);
            assert_eq!(
                evaluate_snp(&f, &a).unwrap(),
                !accepts(&p, &a).unwrap(),
                "translation semantics broken on {a:?}"
            );
        }
    }
}

#[test]
fn translation_round_trip_accepts_the_same_structures() {
    // The walk program, swept over every loopless undirected graph with at
    // most five vertices.
    let p = odd_closed_walk_program();
    let q = snp_to_datalog(&datalog_to_snp(&p)).unwrap();
    let mut graphs = 0usize;
    for n in 0..=5 {
        for g in simple_graphs_up_to_iso(n) {
            assert_eq!(
                accepts(&p, &g).unwrap(),
                accepts(&q, &g).unwrap(),
                "round trip diverged on {g:?}"
            );
            graphs += 1;
        }
    }
    assert_eq!(graphs, 53);

    // Random programs on random digraphs.
    let mut r = rng(0xE1A4);
    for _ in 0..15 {
        let p = random_linear_program(&mut r);
        let q = snp_to_datalog(&datalog_to_snp(&p)).unwrap();
        for _ in 0..6 {
            let n = r.gen_range(1..=4);
            let a = random_binary(&mut r, n, 0.35);
            assert_eq!(accepts(&p, &a).unwrap(), accepts(&q, &a).unwrap());
        }
    }
}

#[test]
fn monotone_sentences_pull_back_along_homomorphisms() {
    let mut r = rng(0xE1A5);
    let mut pulled = 0usize;
    for round in 0..100 {
        let f = if round % 2 == 0 {
            datalog_to_snp(&odd_closed_walk_program())
        } else {
            datalog_to_snp(&random_linear_program(&mut r))
        };
        assert!(f.is_monotone());
        let (na, m) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let a = random_binary(&mut r, na, 0.3);
        let (bigger, _) = random_image(&mut r, &a, m, 0.25);
        if evaluate_snp(&f, &bigger).unwrap() {
            assert!(
                evaluate_snp(&f, &a).unwrap(),
                "monotone sentence failed to pull back"
            );
            pulled += 1;
        }
    }
    assert!(pulled >= 15, "only {pulled} positive cases");
}
