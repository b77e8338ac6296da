//! Implication-graph 2-SAT over numbered variables.
//!
//! Clauses hold zero, one, or two literals. Satisfiability is decided by
//! strongly connected components: unsatisfiable iff some variable shares a
//! component with its negation. When satisfiable, an assignment is read off
//! the reverse topological order of the components.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Literal: (variable index, polarity). `true` is the positive literal.
pub(crate) type Lit = (usize, bool);

pub(crate) struct TwoSat {
    n_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl TwoSat {
    pub(crate) fn new(n_vars: usize) -> Self {
        TwoSat {
            n_vars,
            clauses: Vec::new(),
        }
    }

    /// Accepts clauses of length 0 (contradiction), 1, or 2.
    pub(crate) fn add_clause(&mut self, lits: &[Lit]) {
        assert!(lits.len() <= 2, "clauses carry at most two literals");
        for &(v, _) in lits {
            assert!(v < self.n_vars);
        }
        self.clauses.push(lits.to_vec());
    }

    /// A satisfying assignment, or `None` when unsatisfiable.
    pub(crate) fn solve(&self) -> Option<Vec<bool>> {
        if self.clauses.iter().any(|c| c.is_empty()) {
            return None;
        }
        // Node 2v is the positive literal of v, node 2v+1 its negation.
        let node = |(v, pos): Lit| NodeIndex::new(2 * v + usize::from(!pos));
        let negated = |(v, pos): Lit| (v, !pos);
        let mut graph: DiGraph<(), ()> = DiGraph::new();
        for _ in 0..2 * self.n_vars {
            graph.add_node(());
        }
        for clause in &self.clauses {
            match clause[..] {
                [l] => {
                    graph.add_edge(node(negated(l)), node(l), ());
                }
                [l1, l2] => {
                    graph.add_edge(node(negated(l1)), node(l2), ());
                    graph.add_edge(node(negated(l2)), node(l1), ());
                }
                _ => unreachable!(),
            }
        }
        let sccs = tarjan_scc(&graph);
        let mut comp = vec![0usize; 2 * self.n_vars];
        for (i, scc) in sccs.iter().enumerate() {
            for &nx in scc {
                comp[nx.index()] = i;
            }
        }
        // tarjan_scc yields reverse topological order, so a literal is true
        // exactly when its component index is smaller than its negation's.
        let mut assignment = Vec::with_capacity(self.n_vars);
        for v in 0..self.n_vars {
            let (pos, neg) = (comp[2 * v], comp[2 * v + 1]);
            if pos == neg {
                return None;
            }
            assignment.push(pos < neg);
        }
        Some(assignment)
    }
}
