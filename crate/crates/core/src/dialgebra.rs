//! Finite dialgebras `f : F X -> B X` for unary polynomial interaction
//! functors `F X = Σ_i (A_i × X)` and the observation functor
//! `B X = P_fin(O × X)`.
//!
//! An experiment picks a shape `i`, a parameter `a ∈ A_i` and one state `x`.
//! The result of running it is a finite set of `(observation, successor)`
//! pairs. A shape with the single parameter [`UNIT_PARAM`] stands for the
//! identity summand `X`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{coarsest_bisimulation, Partition};

/// Parameter name used by shapes that denote the identity summand.
pub const UNIT_PARAM: &str = "·";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub id: String,
    pub params: Vec<String>,
}

impl Shape {
    pub fn unit(id: &str) -> Self {
        Shape { id: id.to_string(), params: vec![UNIT_PARAM.to_string()] }
    }

    pub fn with_params<I, S>(id: &str, params: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Shape { id: id.to_string(), params: params.into_iter().map(Into::into).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionSignature {
    shapes: Vec<Shape>,
}

impl InteractionSignature {
    pub fn new(shapes: Vec<Shape>) -> Result<Self> {
        let mut ids = HashSet::new();
        for s in &shapes {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::Structure(format!("duplicate shape id {:?}", s.id)));
            }
            let mut params = HashSet::new();
            for p in &s.params {
                if !params.insert(p.as_str()) {
                    return Err(Error::Structure(format!("duplicate parameter {p:?} in shape {:?}", s.id)));
                }
            }
        }
        Ok(InteractionSignature { shapes })
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn shape_index(&self, id: &str) -> Option<usize> {
        self.shapes.iter().position(|s| s.id == id)
    }

    /// Every `(shape, param)` pair, shape-major.
    fn slots(&self) -> Vec<(usize, usize)> {
        self.shapes
            .iter()
            .enumerate()
            .flat_map(|(i, s)| (0..s.params.len()).map(move |a| (i, a)))
            .collect()
    }
}

/// An element of `F X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Experiment {
    pub shape: usize,
    pub param: usize,
    pub state: usize,
}

/// `(observation index, successor state)`.
pub type Outcome = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDialgebra {
    payloads: Vec<String>,
    signature: InteractionSignature,
    obs: Vec<String>,
    slots: Vec<(usize, usize)>,
    slot_of: HashMap<(usize, usize), usize>,
    // rows[state][slot], each sorted and deduplicated
    rows: Vec<Vec<Vec<Outcome>>>,
}

/// Accumulates transitions; experiments never mentioned have empty results.
#[derive(Debug, Clone)]
pub struct DialgebraBuilder {
    inner: FiniteDialgebra,
}

impl DialgebraBuilder {
    pub fn insert(&mut self, e: Experiment, obs: usize, next: usize) -> Result<&mut Self> {
        let slot = self.inner.slot(e)?;
        if obs >= self.inner.obs.len() {
            return Err(Error::Structure(format!("observation index {obs} out of range")));
        }
        if next >= self.inner.payloads.len() {
            return Err(Error::Structure(format!("successor state {next} out of range")));
        }
        self.inner.rows[e.state][slot].push((obs, next));
        Ok(self)
    }

    pub fn build(mut self) -> FiniteDialgebra {
        for row in self.inner.rows.iter_mut().flatten() {
            row.sort_unstable();
            row.dedup();
        }
        self.inner
    }
}

impl FiniteDialgebra {
    pub fn builder(payloads: Vec<String>, signature: InteractionSignature, obs: Vec<String>) -> DialgebraBuilder {
        let slots = signature.slots();
        let slot_of = slots.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let rows = vec![vec![Vec::new(); slots.len()]; payloads.len()];
        DialgebraBuilder {
            inner: FiniteDialgebra { payloads, signature, obs, slots, slot_of, rows },
        }
    }

    pub fn num_states(&self) -> usize {
        self.payloads.len()
    }

    pub fn payload(&self, state: usize) -> &str {
        &self.payloads[state]
    }

    pub fn payloads(&self) -> &[String] {
        &self.payloads
    }

    pub fn signature(&self) -> &InteractionSignature {
        &self.signature
    }

    pub fn obs_alphabet(&self) -> &[String] {
        &self.obs
    }

    fn slot(&self, e: Experiment) -> Result<usize> {
        if e.state >= self.payloads.len() {
            return Err(Error::Structure(format!("state {} out of range", e.state)));
        }
        self.slot_of
            .get(&(e.shape, e.param))
            .copied()
            .ok_or_else(|| Error::Structure(format!("no experiment shape {} with parameter {}", e.shape, e.param)))
    }

    /// Result of running `e`. Panics when `e` is not an experiment of this
    /// dialgebra.
    pub fn trans(&self, e: Experiment) -> &[Outcome] {
        let slot = self.slot(e).expect("experiment within signature");
        &self.rows[e.state][slot]
    }

    /// All experiments on `state`, in signature order.
    pub fn experiments(&self, state: usize) -> impl Iterator<Item = Experiment> + '_ {
        self.slots.iter().map(move |&(shape, param)| Experiment { shape, param, state })
    }

    pub fn transition_count(&self) -> usize {
        self.rows.iter().flatten().map(Vec::len).sum()
    }

    fn row_slots(&self, state: usize) -> &[Vec<Outcome>] {
        &self.rows[state]
    }

    fn describe_slot(&self, slot: usize) -> (String, String) {
        let (s, a) = self.slots[slot];
        let shape = &self.signature.shapes[s];
        (shape.id.clone(), shape.params[a].clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut trans = Vec::new();
        for state in 0..self.num_states() {
            for (slot, row) in self.rows[state].iter().enumerate() {
                if row.is_empty() {
                    continue;
                }
                let (shape, param) = self.describe_slot(slot);
                trans.push(TransJson {
                    shape,
                    param,
                    state,
                    out: row
                        .iter()
                        .map(|&(o, next)| OutJson { obs: self.obs[o].clone(), next })
                        .collect(),
                });
            }
        }
        let doc = DialgebraJson {
            states: self.payloads.clone(),
            shapes: self.signature.shapes.clone(),
            obs: self.obs.clone(),
            trans,
        };
        serde_json::to_value(doc).expect("dialgebra serializes")
    }

    /// Reads the JSON form written by [`FiniteDialgebra::to_json`]. Rows that
    /// are absent are empty; a row listed twice is an error.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DialgebraJson = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let signature = InteractionSignature::new(doc.shapes)?;
        let obs_index: HashMap<&str, usize> = doc.obs.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        if obs_index.len() != doc.obs.len() {
            return Err(Error::Malformed("duplicate observation label".into()));
        }
        let mut b = FiniteDialgebra::builder(doc.states, signature.clone(), doc.obs.clone());
        let mut seen = HashSet::new();
        for (i, t) in doc.trans.iter().enumerate() {
            let shape = signature
                .shape_index(&t.shape)
                .ok_or_else(|| Error::Malformed(format!("trans[{i}]: unknown shape {:?}", t.shape)))?;
            let param = signature.shapes[shape]
                .params
                .iter()
                .position(|p| *p == t.param)
                .ok_or_else(|| Error::Malformed(format!("trans[{i}]: unknown parameter {:?}", t.param)))?;
            if !seen.insert((shape, param, t.state)) {
                return Err(Error::Malformed(format!("trans[{i}]: experiment listed twice")));
            }
            let e = Experiment { shape, param, state: t.state };
            for out in &t.out {
                let o = *obs_index
                    .get(out.obs.as_str())
                    .ok_or_else(|| Error::Malformed(format!("trans[{i}]: unknown observation {:?}", out.obs)))?;
                b.insert(e, o, out.next)
                    .map_err(|e| Error::Malformed(format!("trans[{i}]: {e}")))?;
            }
        }
        Ok(b.build())
    }
}

#[derive(Serialize, Deserialize)]
struct DialgebraJson {
    states: Vec<String>,
    shapes: Vec<Shape>,
    obs: Vec<String>,
    trans: Vec<TransJson>,
}

#[derive(Serialize, Deserialize)]
struct TransJson {
    shape: String,
    param: String,
    state: usize,
    out: Vec<OutJson>,
}

#[derive(Serialize, Deserialize)]
struct OutJson {
    obs: String,
    next: usize,
}

/// Label of the LTS induced by a dialgebra: the experiment that was run and
/// the observation it produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InducedLabel {
    pub shape: usize,
    pub param: usize,
    pub obs: usize,
}

/// `F X -> B X` transported to `X -> P_fin(Σ_i A_i × O × X)`.
#[derive(Debug, Clone)]
pub struct InducedLts {
    pub num_states: usize,
    pub transitions: Vec<(usize, InducedLabel, usize)>,
}

impl InducedLts {
    pub fn to_dot(&self, d: &FiniteDialgebra) -> String {
        let labels: Vec<String> = self
            .transitions
            .iter()
            .map(|(_, l, _)| {
                let shape = &d.signature.shapes[l.shape];
                format!("{}({}) {}", shape.id, shape.params[l.param], d.obs[l.obs])
            })
            .collect();
        let edges: Vec<(usize, &str, usize)> = self
            .transitions
            .iter()
            .zip(&labels)
            .map(|(&(s, _, t), l)| (s, l.as_str(), t))
            .collect();
        crate::lts::dot(&d.payloads, &edges)
    }
}

pub fn induced_lts(d: &FiniteDialgebra) -> InducedLts {
    let mut transitions = Vec::with_capacity(d.transition_count());
    for x in 0..d.num_states() {
        for (slot, row) in d.row_slots(x).iter().enumerate() {
            let (shape, param) = d.slots[slot];
            for &(obs, next) in row {
                transitions.push((x, InducedLabel { shape, param, obs }, next));
            }
        }
    }
    InducedLts { num_states: d.num_states(), transitions }
}

/// A binary relation on `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn full(n: usize) -> Self {
        Relation { n, bits: vec![true; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.n + y]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| (0..self.n).filter(move |&y| self.contains(x, y)).map(move |y| (x, y)))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Back-and-forth bisimilarity as a relation, by greatest-fixpoint iteration
/// from the total relation.
///
/// Each round keeps `(x, y)` only if, for every experiment shape and
/// parameter, the results of `x` and `y` match each other in both directions
/// up to the previous round's relation.
pub fn bff_bisim_relation(d: &FiniteDialgebra) -> Relation {
    let n = d.num_states();
    let mut r = Relation::full(n);
    loop {
        let mut next = r.clone();
        for x in 0..n {
            for y in 0..n {
                if !r.contains(x, y) {
                    continue;
                }
                let rx = d.row_slots(x);
                let ry = d.row_slots(y);
                let ok = rx
                    .iter()
                    .zip(ry)
                    .all(|(a, b)| simulated(a, b, &r) && simulated(b, a, &r.transposed()));
                if !ok {
                    next.bits[x * n + y] = false;
                }
            }
        }
        if next == r {
            return r;
        }
        r = next;
    }
}

impl Relation {
    fn transposed(&self) -> TransposedView<'_> {
        TransposedView(self)
    }
}

struct TransposedView<'a>(&'a Relation);

trait Related {
    fn contains(&self, x: usize, y: usize) -> bool;
}

impl Related for TransposedView<'_> {
    fn contains(&self, x: usize, y: usize) -> bool {
        self.0.contains(y, x)
    }
}

impl Related for Relation {
    fn contains(&self, x: usize, y: usize) -> bool {
        Relation::contains(self, x, y)
    }
}

/// Whether every outcome of `a` is matched by an outcome of `b` with the
/// same observation and an `r`-related successor.
fn simulated<R: Related>(a: &[Outcome], b: &[Outcome], r: &R) -> bool {
    a.iter()
        .all(|&(o, x2)| b.iter().any(|&(o2, y2)| o == o2 && r.contains(x2, y2)))
}

/// Back-and-forth bisimilarity by the naive fixpoint, as a partition.
pub fn bff_bisim_naive(d: &FiniteDialgebra) -> Partition {
    let r = bff_bisim_relation(d);
    let keys: Vec<usize> = (0..d.num_states())
        .map(|x| (0..d.num_states()).find(|&y| r.contains(x, y)).unwrap_or(x))
        .collect();
    Partition::from_keys(&keys)
}

/// Back-and-forth bisimilarity by partition refinement on the induced LTS.
pub fn bff_bisim_pr(d: &FiniteDialgebra) -> Partition {
    let lts = induced_lts(d);
    coarsest_bisimulation(lts.num_states, &lts.transitions)
}

/// A quotient dialgebra together with its projection `x ↦ [x]`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub dialgebra: FiniteDialgebra,
    pub projection: Vec<usize>,
}

impl Quotient {
    pub fn projection_map<'a>(&'a self, domain: &'a FiniteDialgebra) -> StateMap<'a> {
        StateMap { domain, codomain: &self.dialgebra, map: self.projection.clone() }
    }
}

fn lifted(row: &[Outcome], p: &Partition) -> Vec<Outcome> {
    let set: BTreeSet<Outcome> = row.iter().map(|&(o, x)| (o, p.block_of(x))).collect();
    set.into_iter().collect()
}

/// The dialgebra on the blocks of `p`, with `f/p(e, [x]) = {(o, [x']) | (o, x') ∈ f(e, x)}`.
///
/// Fails when two states in one block lift to different results for some
/// experiment, i.e. when `p` is not a back-and-forth bisimulation. Each block
/// keeps the payload of its least member.
pub fn quotient(d: &FiniteDialgebra, p: &Partition) -> Result<Quotient> {
    if p.num_states() != d.num_states() {
        return Err(Error::Structure(format!(
            "partition covers {} states, dialgebra has {}",
            p.num_states(),
            d.num_states()
        )));
    }
    let payloads = p.blocks().iter().map(|b| d.payloads[b[0]].clone()).collect();
    let mut rows = Vec::with_capacity(p.num_blocks());
    for block in p.blocks() {
        let rep = block[0];
        let rep_rows: Vec<Vec<Outcome>> = d.rows[rep].iter().map(|r| lifted(r, p)).collect();
        for &y in &block[1..] {
            for (slot, rep_row) in rep_rows.iter().enumerate() {
                if lifted(&d.rows[y][slot], p) != *rep_row {
                    let (shape, param) = d.describe_slot(slot);
                    return Err(Error::IllDefinedQuotient { x: rep, y, shape, param });
                }
            }
        }
        rows.push(rep_rows);
    }
    let dialgebra = FiniteDialgebra {
        payloads,
        signature: d.signature.clone(),
        obs: d.obs.clone(),
        slots: d.slots.clone(),
        slot_of: d.slot_of.clone(),
        rows,
    };
    Ok(Quotient { dialgebra, projection: p.block_map().to_vec() })
}

/// A function between the state sets of two dialgebras.
#[derive(Debug, Clone)]
pub struct StateMap<'a> {
    pub domain: &'a FiniteDialgebra,
    pub codomain: &'a FiniteDialgebra,
    map: Vec<usize>,
}

impl<'a> StateMap<'a> {
    pub fn new(domain: &'a FiniteDialgebra, codomain: &'a FiniteDialgebra, map: Vec<usize>) -> Result<Self> {
        if map.len() != domain.num_states() {
            return Err(Error::Structure("state map is not total on the domain".into()));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= codomain.num_states()) {
            return Err(Error::Structure(format!("state map image {bad} outside the codomain")));
        }
        Ok(StateMap { domain, codomain, map })
    }

    pub fn identity(d: &'a FiniteDialgebra) -> Self {
        StateMap { domain: d, codomain: d, map: (0..d.num_states()).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }
}

/// First experiment on which `g ∘ F h` and `B h ∘ f` differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomCounterexample {
    pub experiment: Experiment,
    /// `B h (f e)`
    pub mapped_domain: Vec<Outcome>,
    /// `g (F h e)`
    pub codomain: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomomorphismCheck {
    Holds,
    Fails(HomCounterexample),
}

impl HomomorphismCheck {
    pub fn holds(&self) -> bool {
        matches!(self, HomomorphismCheck::Holds)
    }
}

/// Checks `g ∘ F h = B h ∘ f` on every experiment of the domain.
pub fn is_homomorphism(h: &StateMap<'_>) -> Result<HomomorphismCheck> {
    let (dom, cod) = (h.domain, h.codomain);
    if dom.signature != cod.signature || dom.obs != cod.obs {
        return Err(Error::Structure(
            "domain and codomain have different interaction signatures or observation alphabets".into(),
        ));
    }
    for x in 0..dom.num_states() {
        for (slot, row) in dom.rows[x].iter().enumerate() {
            let mapped: BTreeSet<Outcome> = row.iter().map(|&(o, x2)| (o, h.apply(x2))).collect();
            let mapped: Vec<Outcome> = mapped.into_iter().collect();
            let target = &cod.rows[h.apply(x)][slot];
            if mapped != *target {
                let (shape, param) = dom.slots[slot];
                return Ok(HomomorphismCheck::Fails(HomCounterexample {
                    experiment: Experiment { shape, param, state: x },
                    mapped_domain: mapped,
                    codomain: target.clone(),
                }));
            }
        }
    }
    Ok(HomomorphismCheck::Holds)
}

/// `{(x, y) | h(x) = h(y)}` as a partition of the domain.
pub fn kernel(h: &StateMap<'_>) -> Partition {
    Partition::from_keys(h.as_slice())
}
