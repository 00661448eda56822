//! Operational semantics of CCS as a finitely branching LTS.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Limits, Result};
use crate::partition::{coarsest_bisimulation, Partition};
use crate::syntax::{Channel, Process};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    In(Channel),
    Out(Channel),
    Tau,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::In(c) => write!(f, "{c}"),
            Label::Out(c) => write!(f, "'{c}"),
            Label::Tau => f.write_str("tau"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All transitions derivable for `p` by the rules (in), (tau), (out),
/// (par), (par'), (syn), (sum) and (sum').
///
/// Synchronization fires in both orientations: left input with right output
/// and left output with right input.
pub fn step(p: &Process) -> BTreeSet<(Label, Process)> {
    let mut out = BTreeSet::new();
    match p {
        Process::Nil => {}
        Process::Tau(cont) => {
            out.insert((Label::Tau, (**cont).clone()));
        }
        Process::Input(c, cont) => {
            out.insert((Label::In(c.clone()), (**cont).clone()));
        }
        Process::Output(c) => {
            out.insert((Label::Out(c.clone()), Process::Nil));
        }
        Process::Par(l, r) => {
            let left = step(l);
            let right = step(r);
            for (a, l2) in &left {
                out.insert((a.clone(), Process::par(l2.clone(), (**r).clone())));
            }
            for (a, r2) in &right {
                out.insert((a.clone(), Process::par((**l).clone(), r2.clone())));
            }
            for (a, l2) in &left {
                for (b, r2) in &right {
                    let complementary = match (a, b) {
                        (Label::In(c), Label::Out(d)) | (Label::Out(c), Label::In(d)) => c == d,
                        _ => false,
                    };
                    if complementary {
                        out.insert((Label::Tau, Process::par(l2.clone(), r2.clone())));
                    }
                }
            }
        }
        Process::Sum(l, r) => {
            out.extend(step(l));
            out.extend(step(r));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
}

/// A finite LTS over CCS terms. States are numbered in breadth-first
/// discovery order from the roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtsGraph {
    pub states: Vec<Process>,
    pub transitions: Vec<Transition>,
}

impl LtsGraph {
    pub fn index_of(&self, p: &Process) -> Option<usize> {
        self.states.iter().position(|s| s == p)
    }

    pub fn edges(&self) -> Vec<(usize, Label, usize)> {
        self.transitions
            .iter()
            .map(|t| (t.src, t.label.clone(), t.dst))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let names: Vec<String> = self.states.iter().map(Process::render).collect();
        let labels: Vec<String> = self.transitions.iter().map(|t| t.label.to_string()).collect();
        let edges: Vec<(usize, &str, usize)> = self
            .transitions
            .iter()
            .zip(&labels)
            .map(|(t, l)| (t.src, l.as_str(), t.dst))
            .collect();
        dot(&names, &edges)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Edge {
            src: usize,
            label: String,
            dst: usize,
        }
        #[derive(Serialize)]
        struct Graph {
            states: Vec<String>,
            transitions: Vec<Edge>,
        }
        let g = Graph {
            states: self.states.iter().map(Process::render).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Edge { src: t.src, label: t.label.to_string(), dst: t.dst })
                .collect(),
        };
        serde_json::to_value(g).expect("graph serializes")
    }

    /// The LTS on the blocks of `p`, each block represented by its least
    /// member. Parallel edges collapse.
    pub fn quotient(&self, p: &Partition) -> LtsGraph {
        let states = p.blocks().iter().map(|b| self.states[b[0]].clone()).collect();
        let mut seen = BTreeSet::new();
        let mut transitions = Vec::new();
        for t in &self.transitions {
            let key = (p.block_of(t.src), t.label.clone(), p.block_of(t.dst));
            if seen.insert(key.clone()) {
                transitions.push(Transition { src: key.0, label: key.1, dst: key.2 });
            }
        }
        transitions.sort_by(|a, b| (a.src, &a.label, a.dst).cmp(&(b.src, &b.label, b.dst)));
        LtsGraph { states, transitions }
    }
}

pub(crate) fn dot(names: &[String], edges: &[(usize, &str, usize)]) -> String {
    let mut s = String::from("digraph lts {\n");
    for (i, n) in names.iter().enumerate() {
        s.push_str(&format!("  {i} [label=\"{}\"];\n", escape(n)));
    }
    for (src, l, dst) in edges {
        s.push_str(&format!("  {src} -> {dst} [label=\"{}\"];\n", escape(l)));
    }
    s.push_str("}\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The smallest LTS containing `p` and closed under [`step`].
pub fn reachable(p: &Process, limits: Limits) -> Result<LtsGraph> {
    reachable_from(std::slice::from_ref(p), limits)
}

/// Joint reachable LTS of several roots; roots occupy the first indices
/// (duplicates collapse).
pub fn reachable_from(roots: &[Process], limits: Limits) -> Result<LtsGraph> {
    let mut index: HashMap<Process, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if !index.contains_key(r) {
            index.insert(r.clone(), states.len());
            states.push(r.clone());
            queue.push_back(states.len() - 1);
        }
    }
    limits.check(states.len())?;
    let mut transitions = Vec::new();
    while let Some(src) = queue.pop_front() {
        let succ = step(&states[src]);
        for (label, target) in succ {
            let dst = match index.get(&target) {
                Some(&i) => i,
                None => {
                    let i = states.len();
                    index.insert(target.clone(), i);
                    states.push(target);
                    limits.check(states.len())?;
                    queue.push_back(i);
                    i
                }
            };
            transitions.push(Transition { src, label, dst });
        }
    }
    Ok(LtsGraph { states, transitions })
}

/// Outcome of a strong-bisimilarity query.
#[derive(Debug, Clone)]
pub struct StrongBisim {
    pub equivalent: bool,
    /// Joint reachable LTS; `p` is state 0.
    pub graph: LtsGraph,
    pub partition: Partition,
    pub q_index: usize,
}

/// Strong (synchronous) bisimilarity by partition refinement on
/// `reachable(p) ∪ reachable(q)`.
pub fn strong_bisim(p: &Process, q: &Process, limits: Limits) -> Result<StrongBisim> {
    let graph = reachable_from(&[p.clone(), q.clone()], limits)?;
    let partition = coarsest_bisimulation(graph.states.len(), &graph.edges());
    let q_index = if p == q { 0 } else { 1 };
    Ok(StrongBisim {
        equivalent: partition.same_block(0, q_index),
        graph,
        partition,
        q_index,
    })
}
