//! Implicational (0/1/all) constraints: classification of binary
//! relations, the conflict-graph solver, and the width-(2, 3) obstruction
//! construction behind their path duality.
//!
//! A binary relation is implicational when it is a rectangle B x C, the
//! graph of an injective partial function, or a cross
//! ({b} x C) u (B x {c}) with b in B and c in C. For such targets the
//! instance is solvable iff every instance element has some target value
//! whose conflict-graph node reaches neither a rival value of the same
//! element nor the failure sink. An unsolvable instance yields, per target
//! value, a conflict path out of one failing element; gluing those paths
//! at their shared start gives a structure of pathwidth at most (2, 3)
//! that maps into the instance but not into the target.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::hom::{find_homomorphism, is_homomorphism};
use crate::pathwidth::{check_path_decomposition, PathDecomposition, WidthPair};
use crate::structure::{PartialMap, RelationalStructure};

/// Shape of one binary relation, with its defining data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImplicationalForm {
    /// B x C.
    Rectangle(BTreeSet<String>, BTreeSet<String>),
    /// {(a, f(a))} for an injective partial function f.
    InjectiveGraph(BTreeMap<String, String>),
    /// ({b} x C) u (B x {c}) with b in B and c in C; fields (B, C, b, c).
    Cross(BTreeSet<String>, BTreeSet<String>, String, String),
    NotImplicational,
}

/// Tags every relation of `b` with the first matching form, trying
/// rectangle, then injective graph, then cross. Every symbol must be
/// binary.
pub fn classify_implicational(
    b: &RelationalStructure,
) -> Result<Vec<(String, ImplicationalForm)>> {
    let mut out = Vec::new();
    for (sym, arity) in b.vocab().symbols() {
        if arity != 2 {
            return Err(Error::NotImplicational(format!(
                "symbol {sym} has arity {arity}, implicational structures are binary"
            )));
        }
        let rel = b.relation(sym)?;
        out.push((sym.to_string(), classify_relation(rel)));
    }
    Ok(out)
}

fn classify_relation(rel: &BTreeSet<Vec<String>>) -> ImplicationalForm {
    let dom: BTreeSet<String> = rel.iter().map(|t| t[0].clone()).collect();
    let rng: BTreeSet<String> = rel.iter().map(|t| t[1].clone()).collect();
    if rel.len() == dom.len() * rng.len() {
        return ImplicationalForm::Rectangle(dom, rng);
    }
    if rel.len() == dom.len() && rel.len() == rng.len() {
        let f: BTreeMap<String, String> = rel
            .iter()
            .map(|t| (t[0].clone(), t[1].clone()))
            .collect();
        return ImplicationalForm::InjectiveGraph(f);
    }
    // Cross pivots: the center (b, c) must itself be in the relation.
    for center in rel {
        let (b, c) = (&center[0], &center[1]);
        let row: BTreeSet<String> = rel
            .iter()
            .filter(|t| &t[0] == b)
            .map(|t| t[1].clone())
            .collect();
        let col: BTreeSet<String> = rel
            .iter()
            .filter(|t| &t[1] == c)
            .map(|t| t[0].clone())
            .collect();
        let rebuilt: BTreeSet<Vec<String>> = row
            .iter()
            .map(|y| vec![b.clone(), y.clone()])
            .chain(col.iter().map(|x| vec![x.clone(), c.clone()]))
            .collect();
        if &rebuilt == rel {
            return ImplicationalForm::Cross(col, row, b.clone(), c.clone());
        }
    }
    ImplicationalForm::NotImplicational
}

fn require_implicational(b: &RelationalStructure) -> Result<()> {
    for (sym, form) in classify_implicational(b)? {
        if form == ImplicationalForm::NotImplicational {
            return Err(Error::NotImplicational(format!(
                "relation {sym} fits none of the three forms"
            )));
        }
    }
    Ok(())
}

/// A conflict-graph node: a (instance element, target value) pair or the
/// failure sink.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConflictNode {
    Pair(String, String),
    Sink,
}

/// Which rule added an arc: unique row, unique column, empty row, empty
/// column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ArcCase {
    UniqueRow,
    UniqueColumn,
    EmptyRow,
    EmptyColumn,
}

/// An arc of the conflict graph, tail to head.
type ConflictArc = (ConflictNode, ConflictNode);

/// Why an arc exists: (symbol, rule, instance tuple).
type ArcWitness = (String, ArcCase, (String, String));

/// Directed graph on (element, value) pairs plus a sink.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    pairs: Vec<(String, String)>,
    arcs: BTreeSet<ConflictArc>,
    // One witness per arc.
    just: BTreeMap<ConflictArc, ArcWitness>,
}

impl ConflictGraph {
    /// All pair nodes, element-major; the sink is implicit.
    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn arcs(&self) -> &BTreeSet<(ConflictNode, ConflictNode)> {
        &self.arcs
    }

    pub fn has_arc(&self, from: &ConflictNode, to: &ConflictNode) -> bool {
        self.arcs.contains(&(from.clone(), to.clone()))
    }

    fn successors(&self) -> BTreeMap<ConflictNode, Vec<ConflictNode>> {
        let mut adj: BTreeMap<ConflictNode, Vec<ConflictNode>> = BTreeMap::new();
        for (from, to) in &self.arcs {
            adj.entry(from.clone()).or_default().push(to.clone());
        }
        adj
    }
}

/// Builds the conflict graph of instance `a` against implicational target
/// `b`. For each binary symbol R and instance tuple (x, x'):
/// a row of R in `b` with a single entry (b, b') yields (x, b) -> (x', b');
/// a column with a single entry yields (x', b') -> (x, b); an empty row
/// yields (x, b) -> sink; an empty column yields (x', b') -> sink.
pub fn build_conflict_graph(
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<ConflictGraph> {
    if a.vocab() != b.vocab() {
        return Err(Error::VocabularyMismatch(
            "instance and target use different vocabularies".to_string(),
        ));
    }
    require_implicational(b)?;
    let mut pairs = Vec::new();
    for x in a.universe() {
        for y in b.universe() {
            pairs.push((x.clone(), y.clone()));
        }
    }
    let mut arcs = BTreeSet::new();
    let mut just = BTreeMap::new();
    let add = |from: ConflictNode,
               to: ConflictNode,
               sym: &str,
               case: ArcCase,
               tuple: (String, String),
               arcs: &mut BTreeSet<ConflictArc>,
               just: &mut BTreeMap<ConflictArc, ArcWitness>| {
        arcs.insert((from.clone(), to.clone()));
        just.entry((from, to))
            .or_insert((sym.to_string(), case, tuple));
    };
    for (sym, _) in b.vocab().symbols() {
        let rb = b.relation(sym)?;
        let ra = a.relation(sym)?;
        for bv in b.universe() {
            let row: Vec<&Vec<String>> = rb.iter().filter(|t| &t[0] == bv).collect();
            match row.as_slice() {
                [single] => {
                    for t in ra {
                        add(
                            ConflictNode::Pair(t[0].clone(), bv.clone()),
                            ConflictNode::Pair(t[1].clone(), single[1].clone()),
                            sym,
                            ArcCase::UniqueRow,
                            (t[0].clone(), t[1].clone()),
                            &mut arcs,
                            &mut just,
                        );
                    }
                }
                [] => {
                    for t in ra {
                        add(
                            ConflictNode::Pair(t[0].clone(), bv.clone()),
                            ConflictNode::Sink,
                            sym,
                            ArcCase::EmptyRow,
                            (t[0].clone(), t[1].clone()),
                            &mut arcs,
                            &mut just,
                        );
                    }
                }
                _ => {}
            }
            let col: Vec<&Vec<String>> = rb.iter().filter(|t| &t[1] == bv).collect();
            match col.as_slice() {
                [single] => {
                    for t in ra {
                        add(
                            ConflictNode::Pair(t[1].clone(), bv.clone()),
                            ConflictNode::Pair(t[0].clone(), single[0].clone()),
                            sym,
                            ArcCase::UniqueColumn,
                            (t[0].clone(), t[1].clone()),
                            &mut arcs,
                            &mut just,
                        );
                    }
                }
                [] => {
                    for t in ra {
                        add(
                            ConflictNode::Pair(t[1].clone(), bv.clone()),
                            ConflictNode::Sink,
                            sym,
                            ArcCase::EmptyColumn,
                            (t[0].clone(), t[1].clone()),
                            &mut arcs,
                            &mut just,
                        );
                    }
                }
                _ => {}
            }
        }
    }
    Ok(ConflictGraph { pairs, arcs, just })
}

/// Nodes reachable from `start`, including `start`.
fn reachable(
    adj: &BTreeMap<ConflictNode, Vec<ConflictNode>>,
    start: &ConflictNode,
) -> BTreeSet<ConflictNode> {
    let mut seen: BTreeSet<ConflictNode> = std::iter::once(start.clone()).collect();
    let mut queue: VecDeque<ConflictNode> = std::iter::once(start.clone()).collect();
    while let Some(n) = queue.pop_front() {
        for m in adj.get(&n).into_iter().flatten() {
            if seen.insert(m.clone()) {
                queue.push_back(m.clone());
            }
        }
    }
    seen
}

/// True when `(x, y)` reaches the sink or a node pairing `x` with a
/// different value.
fn value_is_bad(
    adj: &BTreeMap<ConflictNode, Vec<ConflictNode>>,
    x: &str,
    y: &str,
) -> bool {
    let start = ConflictNode::Pair(x.to_string(), y.to_string());
    reachable(adj, &start).iter().any(|n| match n {
        ConflictNode::Sink => true,
        ConflictNode::Pair(x2, y2) => x2 == x && y2 != y,
    })
}

/// Decides whether `a` maps into implicational `b`: true iff every
/// element keeps some value whose conflict node reaches neither the sink
/// nor a rival value. A positive answer carries a homomorphism found by
/// independent search.
pub fn solve_implicational(
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<(bool, Option<PartialMap>)> {
    let graph = build_conflict_graph(a, b)?;
    let adj = graph.successors();
    for x in a.universe() {
        let ok = b.universe().iter().any(|y| !value_is_bad(&adj, x, y));
        if !ok {
            return Ok((false, None));
        }
    }
    match find_homomorphism(a, b, &PartialMap::new())? {
        Some(h) => Ok((true, Some(h))),
        None => Err(Error::CrossCheck(
            "conflict graph clears every element yet no homomorphism exists".to_string(),
        )),
    }
}

/// Shortest conflict path from `(x, y)` to the sink or a rival pair of
/// `x`, as a node list starting at `(x, y)`.
fn shortest_bad_path(
    graph: &ConflictGraph,
    x: &str,
    y: &str,
) -> Option<Vec<ConflictNode>> {
    let adj = graph.successors();
    let start = ConflictNode::Pair(x.to_string(), y.to_string());
    let is_target = |n: &ConflictNode| match n {
        ConflictNode::Sink => true,
        ConflictNode::Pair(x2, y2) => x2 == x && y2 != y,
    };
    let mut parent: BTreeMap<ConflictNode, ConflictNode> = BTreeMap::new();
    let mut seen: BTreeSet<ConflictNode> = std::iter::once(start.clone()).collect();
    let mut queue: VecDeque<ConflictNode> = std::iter::once(start.clone()).collect();
    while let Some(n) = queue.pop_front() {
        for m in adj.get(&n).into_iter().flatten() {
            if !seen.insert((*m).clone()) {
                continue;
            }
            parent.insert((*m).clone(), n.clone());
            if is_target(m) {
                let mut path = vec![(*m).clone()];
                let mut cur = (*m).clone();
                while let Some(p) = parent.get(&cur) {
                    path.push(p.clone());
                    cur = p.clone();
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back((*m).clone());
        }
    }
    None
}

/// Builds, for an unsolvable instance, a structure of pathwidth at most
/// (2, 3) mapping into `a` but not into `b`. One conflict path per target
/// value leaves the failing element; path nodes become fresh elements
/// except that every pair carrying the failing element collapses into the
/// shared hub, and each arc contributes the instance tuple that induced
/// it. Bags are the hub plus each consecutive node pair. All three
/// guarantees are re-verified.
pub fn implicational_obstruction(
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<(RelationalStructure, PathDecomposition, PartialMap)> {
    let graph = build_conflict_graph(a, b)?;
    let adj = graph.successors();
    let failing = a
        .universe()
        .iter()
        .find(|x| b.universe().iter().all(|y| value_is_bad(&adj, x, y)));
    let Some(star) = failing else {
        return Err(Error::NoObstruction);
    };

    let hub = "w".to_string();
    let mut universe = vec![hub.clone()];
    let mut map: PartialMap = std::iter::once((hub.clone(), star.clone())).collect();
    let mut witness_tuples: Vec<(String, Vec<String>)> = Vec::new();
    let mut bags: Vec<BTreeSet<String>> = Vec::new();

    for (i, y) in b.universe().iter().enumerate() {
        let path = shortest_bad_path(&graph, star, y)
            .expect("a failing element has a bad path for every value");
        // Element names per path position; pairs on the failing element
        // collapse into the hub.
        let names: Vec<String> = path
            .iter()
            .enumerate()
            .map(|(k, n)| match n {
                ConflictNode::Pair(x, _) if x == star => hub.clone(),
                _ => format!("p{}_{}", i + 1, k + 1),
            })
            .collect();
        for (k, name) in names.iter().enumerate() {
            if name != &hub {
                universe.push(name.clone());
                let image = match &path[k] {
                    ConflictNode::Pair(x, _) => x.clone(),
                    ConflictNode::Sink => {
                        let arc = (path[k - 1].clone(), path[k].clone());
                        let (_, case, tuple) = &graph.just[&arc];
                        match case {
                            ArcCase::EmptyRow => tuple.1.clone(),
                            ArcCase::EmptyColumn => tuple.0.clone(),
                            _ => unreachable!("sink arcs come from empty rows or columns"),
                        }
                    }
                };
                map.insert(name.clone(), image);
            }
        }
        for k in 0..path.len() - 1 {
            let arc = (path[k].clone(), path[k + 1].clone());
            let (sym, case, _) = &graph.just[&arc];
            let tuple = match case {
                ArcCase::UniqueRow | ArcCase::EmptyRow => {
                    vec![names[k].clone(), names[k + 1].clone()]
                }
                ArcCase::UniqueColumn | ArcCase::EmptyColumn => {
                    vec![names[k + 1].clone(), names[k].clone()]
                }
            };
            witness_tuples.push((sym.clone(), tuple));
            bags.push(
                [hub.clone(), names[k].clone(), names[k + 1].clone()]
                    .into_iter()
                    .collect(),
            );
        }
    }
    // Empty target: the bare hub already maps nowhere.
    if bags.is_empty() {
        bags.push(std::iter::once(hub.clone()).collect());
    }

    let mut witness = RelationalStructure::new(a.vocab().clone(), universe)?;
    for (sym, tuple) in witness_tuples {
        witness.add_tuple(&sym, tuple)?;
    }
    let decomposition = PathDecomposition::new(bags);

    let w = check_path_decomposition(&witness, &decomposition)
        .map_err(|e| Error::CrossCheck(format!("obstruction decomposition invalid: {e}")))?;
    if !w.le(&WidthPair::new(2, 3)) {
        return Err(Error::CrossCheck(format!(
            "obstruction width {w} exceeds (2, 3)"
        )));
    }
    if !is_homomorphism(&witness, a, &map)? {
        return Err(Error::CrossCheck(
            "obstruction projection is not a homomorphism".to_string(),
        ));
    }
    if find_homomorphism(&witness, b, &PartialMap::new())?.is_some() {
        return Err(Error::CrossCheck(
            "obstruction maps into the target after all".to_string(),
        ));
    }
    Ok((witness, decomposition, map))
}
