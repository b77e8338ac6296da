//! Linear Datalog: programs whose rule bodies contain at most one
//! intensional atom, evaluated bottom-up.
//!
//! `least_fixpoint` runs semi-naive (delta-driven) evaluation;
//! `least_fixpoint_naive` recomputes every rule against the full database
//! each round and exists as an independent route for cross-checking. Both
//! are deterministic: iteration always follows insertion lists, never hash
//! order.
//!
//! An accepted input has a derivation chain, and because the program is
//! linear the chain unfolds into a structure shaped like a path: one bag per
//! derivation step, consecutive bags overlapping in the linking fact's
//! elements. `derivation_witness` builds that structure together with its
//! decomposition and its projection back to the input, re-verifying all
//! three guarantees before returning.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::hom::is_homomorphism;
use crate::pathwidth::{check_path_decomposition, PathDecomposition, WidthPair};
use crate::structure::{PartialMap, RelationalStructure, Vocabulary};

/// A predicate applied to variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatalogAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl DatalogAtom {
    pub fn new(pred: impl Into<String>, args: &[&str]) -> Self {
        DatalogAtom {
            pred: pred.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// `head :- body`. An empty body means the head holds for every grounding
/// of its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatalogRule {
    pub head: DatalogAtom,
    pub body: Vec<DatalogAtom>,
}

impl DatalogRule {
    /// All variables, head first, then body atoms left to right, each in
    /// first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for atom in std::iter::once(&self.head).chain(&self.body) {
            for v in &atom.args {
                if !seen.contains(v) {
                    seen.push(v.clone());
                }
            }
        }
        seen
    }

    pub fn distinct_head_vars(&self) -> usize {
        self.head.args.iter().collect::<BTreeSet<_>>().len()
    }
}

/// A linear Datalog program over disjoint EDB and IDB vocabularies, with a
/// distinguished goal IDB. An input is accepted when the goal relation is
/// nonempty in the least fixpoint (for a nullary goal: the empty tuple has
/// been derived).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearDatalogProgram {
    edb: Vocabulary,
    idb: Vocabulary,
    rules: Vec<DatalogRule>,
    goal: String,
}

impl LinearDatalogProgram {
    pub fn new(
        edb: Vocabulary,
        idb: Vocabulary,
        rules: Vec<DatalogRule>,
        goal: impl Into<String>,
    ) -> Result<Self> {
        let goal = goal.into();
        for (name, _) in edb.symbols() {
            if idb.index_of(name).is_some() {
                return Err(Error::DuplicateSymbol(name.to_string()));
            }
        }
        if idb.index_of(&goal).is_none() {
            return Err(Error::BadGoal(goal));
        }
        for (i, rule) in rules.iter().enumerate() {
            if idb.index_of(&rule.head.pred).is_none() {
                return Err(Error::BadRule(format!(
                    "rule {i}: head `{}` is not an IDB",
                    rule.head.pred
                )));
            }
            for atom in std::iter::once(&rule.head).chain(&rule.body) {
                let arity = idb
                    .arity(&atom.pred)
                    .or_else(|_| edb.arity(&atom.pred))
                    .map_err(|_| {
                        Error::BadRule(format!("rule {i}: unknown predicate `{}`", atom.pred))
                    })?;
                if atom.args.len() != arity {
                    return Err(Error::BadRule(format!(
                        "rule {i}: `{}` used with {} arguments, declared {}",
                        atom.pred,
                        atom.args.len(),
                        arity
                    )));
                }
            }
            let idb_atoms = rule
                .body
                .iter()
                .filter(|a| idb.index_of(&a.pred).is_some())
                .count();
            if idb_atoms > 1 {
                return Err(Error::NotLinear(format!(
                    "rule {i} has {idb_atoms} IDB body atoms"
                )));
            }
        }
        Ok(LinearDatalogProgram {
            edb,
            idb,
            rules,
            goal,
        })
    }

    pub fn edb(&self) -> &Vocabulary {
        &self.edb
    }

    pub fn idb(&self) -> &Vocabulary {
        &self.idb
    }

    pub fn rules(&self) -> &[DatalogRule] {
        &self.rules
    }

    pub fn goal(&self) -> &str {
        &self.goal
    }

    /// Inferred bounds `(j, k)`: `j` is the largest number of distinct head
    /// variables in any rule, `k` the largest number of distinct variables
    /// in any rule.
    pub fn bounds(&self) -> (usize, usize) {
        let j = self
            .rules
            .iter()
            .map(|r| r.distinct_head_vars())
            .max()
            .unwrap_or(0);
        let k = self
            .rules
            .iter()
            .map(|r| r.variables().len())
            .max()
            .unwrap_or(0);
        (j, k)
    }

    /// True when every rule fits the budget: at most `k` distinct variables
    /// and at most `j` distinct head variables.
    pub fn check_bounds(&self, j: usize, k: usize) -> bool {
        let (pj, pk) = self.bounds();
        pj <= j && pk <= k
    }

    /// EDB symbols followed by IDB symbols: the vocabulary of fixpoints.
    pub fn joint_vocab(&self) -> Vocabulary {
        let mut symbols: Vec<(String, usize)> = self
            .edb
            .symbols()
            .map(|(s, a)| (s.to_string(), a))
            .collect();
        symbols.extend(self.idb.symbols().map(|(s, a)| (s.to_string(), a)));
        Vocabulary::new(symbols).unwrap()
    }
}

/// One step of a derivation chain: which rule fired and how its variables
/// were grounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: usize,
    pub grounding: BTreeMap<String, String>,
}

/// A chain of steps. Step 0 fires a rule with no IDB body atom, each later
/// step consumes the fact derived by its predecessor, and the final step
/// derives a goal fact.
pub type DerivationTrace = Vec<DerivationStep>;

// ---------------------------------------------------------------------------
// Dense engine. Elements are interned to u32 and joins run over on-demand
// hash indexes keyed by bound positions.
// ---------------------------------------------------------------------------

/// Provenance of a derived fact: rule, full grounding (by the rule's
/// variable order), and the predecessor fact (IDB relation, list index).
type Prov = (usize, Vec<u32>, Option<(usize, usize)>);

#[derive(Default, Clone)]
struct Rel {
    set: HashSet<Vec<u32>>,
    list: Vec<Vec<u32>>,
    prov: Vec<Option<Prov>>,
}

impl Rel {
    fn insert(&mut self, t: Vec<u32>, prov: Option<Prov>) -> bool {
        if self.set.insert(t.clone()) {
            self.list.push(t);
            self.prov.push(prov);
            true
        } else {
            false
        }
    }
}

struct CompiledRule {
    head_pred: usize,
    head_args: Vec<usize>,
    edb_atoms: Vec<(usize, Vec<usize>)>,
    idb_atom: Option<(usize, Vec<usize>)>,
    nvars: usize,
    var_names: Vec<String>,
}

/// A rule grounding by variable order, with the consumed IDB fact as
/// (relation, index) when the rule is recursive.
type SourcedGrounding = (Vec<u32>, Option<(usize, usize)>);

/// A fact emitted by one rule firing, before deduplication.
struct Emit {
    pred: usize,
    fact: Vec<u32>,
    rule: usize,
    grounding: Vec<u32>,
    parent: Option<(usize, usize)>,
}

struct Engine<'a> {
    program: &'a LinearDatalogProgram,
    universe: Vec<String>,
    edb_rels: Vec<Rel>,
    idb_rels: Vec<Rel>,
    rules: Vec<CompiledRule>,
    edb_index: HashMap<(usize, u64), HashMap<Vec<u32>, Vec<usize>>>,
}

impl<'a> Engine<'a> {
    fn new(program: &'a LinearDatalogProgram, input: &RelationalStructure) -> Result<Self> {
        if input.vocab() != &program.edb {
            return Err(Error::VocabularyMismatch(
                "input must be over the program's EDB vocabulary".to_string(),
            ));
        }
        let universe: Vec<String> = input.universe().to_vec();
        let elem_id: HashMap<&str, u32> = universe
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i as u32))
            .collect();
        let mut edb_rels = vec![Rel::default(); program.edb.len()];
        for (r, rel) in edb_rels.iter_mut().enumerate() {
            for t in input.relation_by_index(r) {
                rel.insert(t.iter().map(|e| elem_id[e.as_str()]).collect(), None);
            }
        }
        let idb_rels = vec![Rel::default(); program.idb.len()];

        let rules = program
            .rules
            .iter()
            .map(|rule| {
                let var_names = rule.variables();
                let var_id =
                    |v: &str| var_names.iter().position(|x| x == v).unwrap();
                let mut edb_atoms = Vec::new();
                let mut idb_atom = None;
                for atom in &rule.body {
                    let args: Vec<usize> = atom.args.iter().map(|v| var_id(v)).collect();
                    match program.idb.index_of(&atom.pred) {
                        Some(r) => idb_atom = Some((r, args)),
                        None => {
                            edb_atoms.push((program.edb.index_of(&atom.pred).unwrap(), args))
                        }
                    }
                }
                CompiledRule {
                    head_pred: program.idb.index_of(&rule.head.pred).unwrap(),
                    head_args: rule.head.args.iter().map(|v| var_id(v)).collect(),
                    edb_atoms,
                    idb_atom,
                    nvars: var_names.len(),
                    var_names,
                }
            })
            .collect();
        Ok(Engine {
            program,
            universe,
            edb_rels,
            idb_rels,
            rules,
            edb_index: HashMap::new(),
        })
    }

    fn edb_candidates(
        &mut self,
        rel: usize,
        args: &[usize],
        binding: &[Option<u32>],
    ) -> Vec<usize> {
        let bound_positions: Vec<usize> = (0..args.len())
            .filter(|&p| binding[args[p]].is_some())
            .collect();
        if bound_positions.is_empty() {
            return (0..self.edb_rels[rel].list.len()).collect();
        }
        let mask: u64 = bound_positions.iter().fold(0, |m, &p| m | (1 << p));
        let key: Vec<u32> = bound_positions
            .iter()
            .map(|&p| binding[args[p]].unwrap())
            .collect();
        if !self.edb_index.contains_key(&(rel, mask)) {
            let mut index: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
            for (i, t) in self.edb_rels[rel].list.iter().enumerate() {
                let k: Vec<u32> = bound_positions.iter().map(|&p| t[p]).collect();
                index.entry(k).or_default().push(i);
            }
            self.edb_index.insert((rel, mask), index);
        }
        self.edb_index[&(rel, mask)]
            .get(&key)
            .cloned()
            .unwrap_or_default()
    }

    /// Extends `binding` over the rule's EDB atoms listed in `remaining`
    /// (indexes into `edb_atoms`), then over any leftover unbound variables,
    /// pushing every complete grounding into `out`.
    fn join_edb(
        &mut self,
        rule_idx: usize,
        remaining: &mut Vec<usize>,
        binding: &mut Vec<Option<u32>>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if remaining.is_empty() {
            if let Some(v) = binding.iter().position(|b| b.is_none()) {
                for e in 0..self.universe.len() as u32 {
                    binding[v] = Some(e);
                    self.join_edb(rule_idx, remaining, binding, out);
                }
                binding[v] = None;
                return;
            }
            out.push(binding.iter().map(|b| b.unwrap()).collect());
            return;
        }
        // Most-bound atom next; ties go to the earliest atom.
        let pick = (0..remaining.len())
            .max_by_key(|&pos| {
                let (_, args) = &self.rules[rule_idx].edb_atoms[remaining[pos]];
                let bound = args.iter().filter(|&&v| binding[v].is_some()).count();
                (bound, usize::MAX - remaining[pos])
            })
            .unwrap();
        let atom = remaining.swap_remove(pick);
        let (rel, args) = self.rules[rule_idx].edb_atoms[atom].clone();

        for ti in self.edb_candidates(rel, &args, binding) {
            let tuple = self.edb_rels[rel].list[ti].clone();
            let mut assigned = Vec::new();
            let mut ok = true;
            for (p, &v) in args.iter().enumerate() {
                match binding[v] {
                    Some(x) if x == tuple[p] => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        binding[v] = Some(tuple[p]);
                        assigned.push(v);
                    }
                }
            }
            if ok {
                self.join_edb(rule_idx, remaining, binding, out);
            }
            for v in assigned {
                binding[v] = None;
            }
        }
        // Restore `remaining` exactly: put `atom` back where it was taken.
        remaining.push(atom);
        let last = remaining.len() - 1;
        remaining.swap(pick, last);
    }

    /// Fires one rule. Base rules (no IDB atom) run when `source` is `None`;
    /// recursive rules consume the given slice of their IDB relation's list.
    fn fire(&mut self, rule_idx: usize, source: Option<Range<usize>>, out: &mut Vec<Emit>) {
        let rule = &self.rules[rule_idx];
        let nvars = rule.nvars;
        let head_pred = rule.head_pred;
        let head_args = rule.head_args.clone();
        let n_edb = rule.edb_atoms.len();
        let idb_atom = rule.idb_atom.clone();

        let mut groundings: Vec<SourcedGrounding> = Vec::new();
        match (&idb_atom, source) {
            (None, None) => {
                let mut binding = vec![None; nvars];
                let mut remaining: Vec<usize> = (0..n_edb).collect();
                let mut collected = Vec::new();
                self.join_edb(rule_idx, &mut remaining, &mut binding, &mut collected);
                groundings.extend(collected.into_iter().map(|g| (g, None)));
            }
            (Some((pred, args)), Some(range)) => {
                let pred = *pred;
                let args = args.clone();
                for fi in range {
                    let fact = self.idb_rels[pred].list[fi].clone();
                    let mut binding: Vec<Option<u32>> = vec![None; nvars];
                    let mut ok = true;
                    for (p, &v) in args.iter().enumerate() {
                        match binding[v] {
                            Some(x) if x == fact[p] => {}
                            Some(_) => {
                                ok = false;
                                break;
                            }
                            None => binding[v] = Some(fact[p]),
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let mut remaining: Vec<usize> = (0..n_edb).collect();
                    let mut collected = Vec::new();
                    self.join_edb(rule_idx, &mut remaining, &mut binding, &mut collected);
                    groundings
                        .extend(collected.into_iter().map(|g| (g, Some((pred, fi)))));
                }
            }
            _ => {}
        }
        for (grounding, parent) in groundings {
            let fact: Vec<u32> = head_args.iter().map(|&v| grounding[v]).collect();
            out.push(Emit {
                pred: head_pred,
                fact,
                rule: rule_idx,
                grounding,
                parent,
            });
        }
    }

    /// Semi-naive rounds. Stops early once the goal is nonempty when
    /// `stop_at_goal` is set.
    fn run_semi_naive(&mut self, stop_at_goal: bool) {
        let goal_rel = self.program.idb.index_of(&self.program.goal).unwrap();
        let mut emits = Vec::new();
        for r in 0..self.rules.len() {
            if self.rules[r].idb_atom.is_none() {
                self.fire(r, None, &mut emits);
            }
        }
        let mut delta: Vec<Range<usize>> = self.absorb(emits);
        loop {
            if stop_at_goal && !self.idb_rels[goal_rel].list.is_empty() {
                return;
            }
            if delta.iter().all(|r| r.is_empty()) {
                return;
            }
            let mut emits = Vec::new();
            for r in 0..self.rules.len() {
                if let Some((pred, _)) = self.rules[r].idb_atom {
                    let range = delta[pred].clone();
                    if !range.is_empty() {
                        self.fire(r, Some(range), &mut emits);
                    }
                }
            }
            delta = self.absorb(emits);
        }
    }

    /// Naive rounds: every rule re-fires against the full database until a
    /// round adds nothing.
    fn run_naive(&mut self) {
        loop {
            let mut emits = Vec::new();
            for r in 0..self.rules.len() {
                match self.rules[r].idb_atom {
                    None => self.fire(r, None, &mut emits),
                    Some((pred, _)) => {
                        let full = 0..self.idb_rels[pred].list.len();
                        self.fire(r, Some(full), &mut emits);
                    }
                }
            }
            let added = self.absorb(emits);
            if added.iter().all(|r| r.is_empty()) {
                return;
            }
        }
    }

    /// Dedup-inserts emitted facts; returns the per-relation ranges of the
    /// newly added entries.
    fn absorb(&mut self, emits: Vec<Emit>) -> Vec<Range<usize>> {
        let starts: Vec<usize> = self.idb_rels.iter().map(|r| r.list.len()).collect();
        for e in emits {
            self.idb_rels[e.pred]
                .insert(e.fact, Some((e.rule, e.grounding, e.parent)));
        }
        self.idb_rels
            .iter()
            .zip(starts)
            .map(|(rel, s)| s..rel.list.len())
            .collect()
    }

    fn elem_name(&self, id: u32) -> &str {
        &self.universe[id as usize]
    }

    /// Snapshot as a structure over the joint vocabulary.
    fn to_structure(&self) -> RelationalStructure {
        let mut s = RelationalStructure::new(
            self.program.joint_vocab(),
            self.universe.clone(),
        )
        .unwrap();
        let n_edb = self.program.edb.len();
        let symbol = |i: usize| -> String {
            if i < n_edb {
                self.program.edb.symbols().nth(i).unwrap().0.to_string()
            } else {
                self.program
                    .idb
                    .symbols()
                    .nth(i - n_edb)
                    .unwrap()
                    .0
                    .to_string()
            }
        };
        for (r, rel) in self.edb_rels.iter().chain(&self.idb_rels).enumerate() {
            let sym = symbol(r);
            for t in &rel.list {
                let named: Vec<String> =
                    t.iter().map(|&e| self.elem_name(e).to_string()).collect();
                s.add_tuple(&sym, named).unwrap();
            }
        }
        s
    }
}

/// One application of every rule to `s`, which must be over the program's
/// joint vocabulary. Returns `s` plus all facts derivable in a single step.
pub fn immediate_consequence(
    p: &LinearDatalogProgram,
    s: &RelationalStructure,
) -> Result<RelationalStructure> {
    if s.vocab() != &p.joint_vocab() {
        return Err(Error::VocabularyMismatch(
            "immediate consequence expects the joint EDB+IDB vocabulary".to_string(),
        ));
    }
    // Split s into EDB input and IDB seed.
    let edb_input = project(s, &p.edb)?;
    let mut engine = Engine::new(p, &edb_input)?;
    for (r, (sym, _)) in p.idb.symbols().enumerate() {
        for t in s.relation(sym)? {
            let t: Vec<u32> = t
                .iter()
                .map(|e| s.elem_index(e).unwrap() as u32)
                .collect();
            engine.idb_rels[r].insert(t, None);
        }
    }
    let mut emits = Vec::new();
    for r in 0..engine.rules.len() {
        match engine.rules[r].idb_atom {
            None => engine.fire(r, None, &mut emits),
            Some((pred, _)) => {
                let full = 0..engine.idb_rels[pred].list.len();
                engine.fire(r, Some(full), &mut emits);
            }
        }
    }
    engine.absorb(emits);
    Ok(engine.to_structure())
}

fn project(s: &RelationalStructure, vocab: &Vocabulary) -> Result<RelationalStructure> {
    let mut out = RelationalStructure::new(vocab.clone(), s.universe().to_vec())?;
    for (sym, _) in vocab.symbols() {
        for t in s.relation(sym)? {
            out.add_tuple(sym, t.clone())?;
        }
    }
    Ok(out)
}

/// Least fixpoint by semi-naive evaluation. `a` is over the EDB vocabulary;
/// the result is over the joint vocabulary and contains `a` unchanged.
pub fn least_fixpoint(
    p: &LinearDatalogProgram,
    a: &RelationalStructure,
) -> Result<RelationalStructure> {
    let mut engine = Engine::new(p, a)?;
    engine.run_semi_naive(false);
    Ok(engine.to_structure())
}

/// Least fixpoint by naive iteration: the cross-check route.
pub fn least_fixpoint_naive(
    p: &LinearDatalogProgram,
    a: &RelationalStructure,
) -> Result<RelationalStructure> {
    let mut engine = Engine::new(p, a)?;
    engine.run_naive();
    Ok(engine.to_structure())
}

/// True iff the goal relation is nonempty in the least fixpoint over `a`.
pub fn accepts(p: &LinearDatalogProgram, a: &RelationalStructure) -> Result<bool> {
    let mut engine = Engine::new(p, a)?;
    engine.run_semi_naive(true);
    let goal_rel = p.idb.index_of(&p.goal).unwrap();
    Ok(!engine.idb_rels[goal_rel].list.is_empty())
}

/// The derivation chain of the first goal fact, if the input is accepted.
pub fn goal_derivation(
    p: &LinearDatalogProgram,
    a: &RelationalStructure,
) -> Result<Option<DerivationTrace>> {
    Ok(chain(p, a)?.map(|(engine_steps, engine)| {
        engine_steps
            .iter()
            .map(|(rule, grounding)| DerivationStep {
                rule: *rule,
                grounding: engine.rules[*rule]
                    .var_names
                    .iter()
                    .cloned()
                    .zip(grounding.iter().map(|&e| engine.elem_name(e).to_string()))
                    .collect(),
            })
            .collect()
    }))
}

/// Steps of a derivation as (rule index, grounding by the rule's variable
/// order), base step first.
type RawChain = Vec<(usize, Vec<u32>)>;

/// Runs the tracing engine and extracts the raw chain of the first goal
/// fact.
fn chain<'a>(
    p: &'a LinearDatalogProgram,
    a: &RelationalStructure,
) -> Result<Option<(RawChain, Engine<'a>)>> {
    let mut engine = Engine::new(p, a)?;
    engine.run_semi_naive(true);
    let goal_rel = p.idb.index_of(&p.goal).unwrap();
    if engine.idb_rels[goal_rel].list.is_empty() {
        return Ok(None);
    }
    let mut steps = Vec::new();
    let mut cursor = Some((goal_rel, 0usize));
    while let Some((rel, fi)) = cursor {
        let (rule, grounding, parent) = engine.idb_rels[rel].prov[fi]
            .clone()
            .expect("derived facts carry provenance");
        steps.push((rule, grounding));
        cursor = parent;
    }
    steps.reverse();
    Ok(Some((steps, engine)))
}

/// For an accepted input, unfolds the derivation chain into a structure `P`
/// over the EDB vocabulary together with a path decomposition of `P` and a
/// homomorphism `P -> a`.
///
/// Elements of `P` are (input element, step) pairs, merged when the element
/// is passed from one step to the next through the linking fact; the bag of
/// step `t` holds the classes of all elements the step's rule touches.
/// Guarantees re-verified before returning: the decomposition is valid with
/// width within the program's bounds, the map is a homomorphism into `a`,
/// and the program accepts `P` itself.
pub fn derivation_witness(
    p: &LinearDatalogProgram,
    a: &RelationalStructure,
) -> Result<Option<(RelationalStructure, PathDecomposition, PartialMap)>> {
    let Some((steps, engine)) = chain(p, a)? else {
        return Ok(None);
    };
    let s = steps.len();

    // Union-find over (step, element) nodes.
    let mut nodes: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for (t, (_, grounding)) in steps.iter().enumerate() {
        for &e in grounding {
            let next = nodes.len();
            nodes.entry((t, e)).or_insert(next);
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
    for t in 1..s {
        let (rule_t, ref g_t) = steps[t];
        let Some((_, ref link_args)) = engine.rules[rule_t].idb_atom else {
            continue;
        };
        // The linking fact equals the previous head, positionally.
        let (rule_prev, ref g_prev) = steps[t - 1];
        let head_args = &engine.rules[rule_prev].head_args;
        for (pos, &v) in link_args.iter().enumerate() {
            let here = nodes[&(t, g_t[v])];
            let there = nodes[&(t - 1, g_prev[head_args[pos]])];
            let (ra, rb) = (find(&mut uf, here), find(&mut uf, there));
            if ra != rb {
                uf[ra] = rb;
            }
        }
    }

    // Name classes "elem@firstStep"; the suffix disambiguates element reuse
    // in disjoint step ranges.
    let mut class_info: BTreeMap<usize, (u32, usize)> = BTreeMap::new();
    for (&(t, e), &node) in &nodes {
        let root = find(&mut uf, node);
        let entry = class_info.entry(root).or_insert((e, t));
        if t < entry.1 {
            *entry = (e, t);
        }
    }
    let mut class_order: Vec<(usize, u32, usize)> = class_info
        .iter()
        .map(|(&root, &(e, t))| (root, e, t))
        .collect();
    class_order.sort_by_key(|&(_, e, t)| (t, e));
    let class_name: BTreeMap<usize, String> = class_order
        .iter()
        .map(|&(root, e, t)| (root, format!("{}@{}", engine.elem_name(e), t + 1)))
        .collect();
    let universe: Vec<String> = class_order
        .iter()
        .map(|&(root, _, _)| class_name[&root].clone())
        .collect();

    let mut witness = RelationalStructure::new(p.edb.clone(), universe)?;
    let node_class = |t: usize, e: u32, uf: &mut Vec<usize>| -> String {
        class_name[&find(uf, nodes[&(t, e)])].clone()
    };
    for (t, (rule_t, g_t)) in steps.iter().enumerate() {
        for (rel, args) in &engine.rules[*rule_t].edb_atoms {
            let sym = p.edb.symbols().nth(*rel).unwrap().0.to_string();
            let tuple: Vec<String> = args
                .iter()
                .map(|&v| node_class(t, g_t[v], &mut uf))
                .collect();
            witness.add_tuple(&sym, tuple)?;
        }
    }
    let bags: Vec<BTreeSet<String>> = steps
        .iter()
        .enumerate()
        .map(|(t, (_, g_t))| {
            g_t.iter()
                .map(|&e| class_name[&find(&mut uf, nodes[&(t, e)])].clone())
                .collect()
        })
        .collect();
    let decomposition = PathDecomposition::new(bags);

    let mut map = PartialMap::new();
    for &(root, e, _) in &class_order {
        map.insert(
            class_name[&root].clone(),
            engine.elem_name(e).to_string(),
        );
    }

    // Re-verify all three guarantees.
    let (bj, bk) = p.bounds();
    if witness.size() > 0 || !decomposition.is_empty() {
        let w = check_path_decomposition(&witness, &decomposition)
            .map_err(|e| Error::CrossCheck(format!("witness decomposition invalid: {e}")))?;
        if !w.le(&WidthPair::new(bj, bk)) {
            return Err(Error::CrossCheck(format!(
                "witness width {w} exceeds program bounds ({bj}, {bk})"
            )));
        }
    }
    if !is_homomorphism(&witness, a, &map)? {
        return Err(Error::CrossCheck(
            "witness projection is not a homomorphism".to_string(),
        ));
    }
    if !accepts(p, &witness)? {
        return Err(Error::CrossCheck(
            "program does not accept its own witness".to_string(),
        ));
    }
    Ok(Some((witness, decomposition, map)))
}
