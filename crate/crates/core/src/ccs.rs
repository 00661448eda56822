//! The CCS dialgebra for `F X = X + L_o × X` and
//! `B X = P_fin((L_o ∪ {τ}) × X)`.
//!
//! An experiment either watches a process run or sends it a signal on a
//! channel. Three rules define the observations:
//!
//! * run: `x -α-> x'` with `α` an output or `τ` gives `x -α->_f x'`;
//! * in: `x -c-> x'` gives `(c̄, x) -τ->_f x'`;
//! * store: `x -τ-> x'` gives `(c̄, x) -τ->_f c̄ | x'`.
//!
//! Input never shows up as an observation: the environment's signal is the
//! argument of the experiment.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::dialgebra::{bff_bisim_pr, Experiment, FiniteDialgebra, InteractionSignature, Shape};
use crate::error::{Limits, Result};
use crate::lts::{step, Label};
use crate::partition::Partition;
use crate::syntax::{Channel, Process};

pub const RUN_SHAPE: &str = "run";
pub const SEND_SHAPE: &str = "send";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CcsExperiment {
    Run(Process),
    Send(Channel, Process),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObsLabel {
    Out(Channel),
    Tau,
}

impl fmt::Display for ObsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsLabel::Out(c) => write!(f, "'{c}"),
            ObsLabel::Tau => f.write_str("tau"),
        }
    }
}

impl fmt::Debug for ObsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn dialgebra_step(e: &CcsExperiment) -> BTreeSet<(ObsLabel, Process)> {
    let mut out = BTreeSet::new();
    match e {
        CcsExperiment::Run(x) => {
            for (label, next) in step(x) {
                match label {
                    Label::Tau => {
                        out.insert((ObsLabel::Tau, next));
                    }
                    Label::Out(c) => {
                        out.insert((ObsLabel::Out(c), next));
                    }
                    Label::In(_) => {}
                }
            }
        }
        CcsExperiment::Send(c, x) => {
            for (label, next) in step(x) {
                match label {
                    Label::In(d) if d == *c => {
                        out.insert((ObsLabel::Tau, next));
                    }
                    Label::Tau => {
                        out.insert((ObsLabel::Tau, Process::par(Process::output(c.clone()), next)));
                    }
                    _ => {}
                }
            }
        }
    }
    out
}

/// Channels of both terms plus `extra_fresh` channels occurring in neither,
/// named `fresh_0`, `fresh_1`, ... (skipping names already taken).
pub fn experiment_channels(p: &Process, q: &Process, extra_fresh: usize) -> BTreeSet<Channel> {
    let mut chans = p.channels();
    chans.extend(q.channels());
    let taken = chans.clone();
    let mut added = 0;
    let mut i = 0;
    while added < extra_fresh {
        let c = Channel::new(&format!("fresh_{i}")).expect("valid channel name");
        if !taken.contains(&c) {
            chans.insert(c);
            added += 1;
        }
        i += 1;
    }
    chans
}

/// A CCS dialgebra closure: the generic dialgebra plus the process behind
/// each state.
#[derive(Debug, Clone)]
pub struct CcsDialgebra {
    pub dialgebra: FiniteDialgebra,
    pub processes: Vec<Process>,
    pub channels: Vec<Channel>,
    index: HashMap<Process, usize>,
}

impl CcsDialgebra {
    pub fn index_of(&self, p: &Process) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// The smallest set of processes containing `roots` and closed under the
/// successors of `Run(x)` and of `Send(c, x)` for `c ∈ chans`.
///
/// States are numbered in breadth-first order; roots come first.
pub fn build_ccs_dialgebra(roots: &[Process], chans: &BTreeSet<Channel>, limits: Limits) -> Result<CcsDialgebra> {
    let channels: Vec<Channel> = chans.iter().cloned().collect();
    let mut index: HashMap<Process, usize> = HashMap::new();
    let mut processes: Vec<Process> = Vec::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if !index.contains_key(r) {
            index.insert(r.clone(), processes.len());
            processes.push(r.clone());
            queue.push_back(processes.len() - 1);
        }
    }
    limits.check(processes.len())?;

    // (experiment, observation, successor)
    let mut raw: Vec<(Experiment, ObsLabel, usize)> = Vec::new();
    while let Some(x) = queue.pop_front() {
        let state = processes[x].clone();
        let experiments = std::iter::once((0, 0, CcsExperiment::Run(state.clone()))).chain(
            channels
                .iter()
                .enumerate()
                .map(|(i, c)| (1, i, CcsExperiment::Send(c.clone(), state.clone()))),
        );
        for (shape, param, e) in experiments {
            for (obs, next) in dialgebra_step(&e) {
                let n = match index.get(&next) {
                    Some(&n) => n,
                    None => {
                        let n = processes.len();
                        index.insert(next.clone(), n);
                        processes.push(next);
                        limits.check(processes.len())?;
                        queue.push_back(n);
                        n
                    }
                };
                raw.push((Experiment { shape, param, state: x }, obs, n));
            }
        }
    }

    let mut alphabet: BTreeSet<ObsLabel> = raw.iter().map(|(_, o, _)| o.clone()).collect();
    alphabet.insert(ObsLabel::Tau);
    alphabet.extend(channels.iter().map(|c| ObsLabel::Out(c.clone())));
    let alphabet: Vec<ObsLabel> = alphabet.into_iter().collect();
    let obs_index: HashMap<&ObsLabel, usize> = alphabet.iter().enumerate().map(|(i, o)| (o, i)).collect();

    let signature = InteractionSignature::new(vec![
        Shape::unit(RUN_SHAPE),
        Shape::with_params(SEND_SHAPE, channels.iter().map(|c| c.to_string())),
    ])?;
    let mut b = FiniteDialgebra::builder(
        processes.iter().map(Process::render).collect(),
        signature,
        alphabet.iter().map(ToString::to_string).collect(),
    );
    for (e, obs, next) in &raw {
        b.insert(*e, obs_index[obs], *next)?;
    }
    Ok(CcsDialgebra { dialgebra: b.build(), processes, channels, index })
}

/// Result of the dialgebraic asynchronous-bisimilarity check.
#[derive(Debug, Clone)]
pub struct AsyncDialgebraic {
    pub equivalent: bool,
    pub closure: CcsDialgebra,
    pub partition: Partition,
}

/// Asynchronous bisimilarity decided as back-and-forth bisimilarity of the
/// CCS dialgebra, with send experiments over the channels of `p` and `q`
/// plus `extra_fresh` unused ones.
pub fn check_async_dialgebraic(p: &Process, q: &Process, extra_fresh: usize, limits: Limits) -> Result<AsyncDialgebraic> {
    let chans = experiment_channels(p, q, extra_fresh);
    let closure = build_ccs_dialgebra(&[p.clone(), q.clone()], &chans, limits)?;
    let partition = bff_bisim_pr(&closure.dialgebra);
    let (i, j) = (closure.index_of(p).unwrap(), closure.index_of(q).unwrap());
    Ok(AsyncDialgebraic { equivalent: partition.same_block(i, j), closure, partition })
}

pub fn async_bisim_dialgebraic(p: &Process, q: &Process, limits: Limits) -> Result<bool> {
    Ok(check_async_dialgebraic(p, q, 0, limits)?.equivalent)
}
