//! Explicit reachability graphs of bounded systems.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Event, State, System};
use crate::error::{Error, Result};
use crate::model::Model;

#[derive(Debug, Clone)]
pub struct Graph {
    /// States in breadth-first discovery order; index 0 is the initial state.
    pub states: Vec<State>,
    pub edges: Vec<Vec<(Event, usize)>>,
    index: HashMap<State, usize>,
}

impl Graph {
    /// Breadth-first exploration of the whole bounded space.
    pub fn explore(sys: &System<'_>, budget: usize) -> Result<Graph> {
        let init = sys.initial();
        let mut g = Graph {
            states: vec![init.clone()],
            edges: Vec::new(),
            index: HashMap::from([(init, 0)]),
        };
        let mut next = 0;
        while next < g.states.len() {
            let succs = sys.successors(&g.states[next])?;
            let mut out = Vec::with_capacity(succs.len());
            for (e, s) in succs {
                let id = match g.index.get(&s) {
                    Some(&id) => id,
                    None => {
                        if g.states.len() >= budget {
                            return Err(Error::BudgetExceeded(budget));
                        }
                        let id = g.states.len();
                        g.index.insert(s.clone(), id);
                        g.states.push(s);
                        id
                    }
                };
                out.push((e, id));
            }
            g.edges.push(out);
            next += 1;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn is_final(&self, id: usize) -> bool {
        self.edges[id].is_empty()
    }

    /// Predecessor lists, used by backward labelling.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (src, out) in self.edges.iter().enumerate() {
            for &(_, dst) in out {
                pred[dst].push(src);
            }
        }
        pred
    }

    /// Graphviz rendering; refuses graphs with more than `cap` states.
    pub fn to_dot(&self, m: &Model, cap: usize) -> Result<String> {
        if self.len() > cap {
            return Err(Error::BudgetExceeded(cap));
        }
        let mut out = String::from("digraph states {\n  node [shape=box, fontsize=10];\n");
        for (i, s) in self.states.iter().enumerate() {
            let style = if self.is_final(i) { ", peripheries=2" } else { "" };
            let _ = writeln!(out, "  s{i} [label=\"{}\"{style}];", s.display(m));
        }
        for (i, out_edges) in self.edges.iter().enumerate() {
            for (e, j) in out_edges {
                let _ = writeln!(out, "  s{i} -> s{j} [label=\"{}\"];", e.label(m).replace('"', "\\\""));
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}
