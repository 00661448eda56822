//! Asynchronous bisimilarity computed directly on the operational semantics.
//!
//! A relation `R` is an asynchronous simulation when, for `(x, y) ∈ R` and
//! `x -α-> x'`:
//!
//! * for `α = τ` or an output, `y -α-> y'` with `(x', y') ∈ R`;
//! * for an input `α = c`, `c̄ | y -τ-> y'` with `(x', y') ∈ R`. Equivalently
//!   `y -c-> y'`, or `y -τ-> y''` and `y' = c̄ | y''`.
//!
//! The two forms of the input clause are both available as [`InputClause`].
//! This module depends on nothing but [`step`]; it is the independent
//! cross-check for the dialgebraic checker in [`crate::ccs`].

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::lts::{step, Label};
use crate::syntax::Process;

/// How an input move of the attacker is answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InputClause {
    /// `c̄ | y -τ-> y'`.
    #[default]
    ParallelTau,
    /// `y -c-> y'`, or `y -τ-> y''` with `y' = c̄ | y''`.
    Disjunctive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Which clause of the definition a challenge falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    Tau,
    Output,
    Input,
}

impl Clause {
    fn of(label: &Label) -> Self {
        match label {
            Label::Tau => Clause::Tau,
            Label::Out(_) => Clause::Output,
            Label::In(_) => Clause::Input,
        }
    }
}

/// The ways `y` may answer the move `label` of its partner.
pub fn responses(y: &Process, label: &Label, clause: InputClause) -> BTreeSet<Process> {
    match label {
        Label::Tau | Label::Out(_) => step(y)
            .into_iter()
            .filter(|(l, _)| l == label)
            .map(|(_, y2)| y2)
            .collect(),
        Label::In(c) => match clause {
            InputClause::ParallelTau => step(&Process::par(Process::output(c.clone()), y.clone()))
                .into_iter()
                .filter(|(l, _)| *l == Label::Tau)
                .map(|(_, y2)| y2)
                .collect(),
            InputClause::Disjunctive => step(y)
                .into_iter()
                .filter_map(|(l, y2)| match l {
                    Label::In(d) if d == *c => Some(y2),
                    Label::Tau => Some(Process::par(Process::output(c.clone()), y2)),
                    _ => None,
                })
                .collect(),
        },
    }
}

struct Challenge {
    side: Side,
    label: Label,
    target: Process,
    responses: Vec<usize>,
}

struct Game {
    pairs: Vec<(Process, Process)>,
    challenges: Vec<Vec<Challenge>>,
}

fn explore(p: &Process, q: &Process, clause: InputClause, limits: Limits) -> Result<Game> {
    let mut index: HashMap<(Process, Process), usize> = HashMap::new();
    let mut pairs = vec![(p.clone(), q.clone())];
    index.insert((p.clone(), q.clone()), 0);
    let mut challenges: Vec<Vec<Challenge>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut intern = |pair: (Process, Process), pairs: &mut Vec<(Process, Process)>, queue: &mut VecDeque<usize>| {
        if let Some(&i) = index.get(&pair) {
            return Ok(i);
        }
        let i = pairs.len();
        index.insert(pair.clone(), i);
        pairs.push(pair);
        limits.check(pairs.len())?;
        queue.push_back(i);
        Ok::<usize, Error>(i)
    };
    while let Some(i) = queue.pop_front() {
        let (x, y) = pairs[i].clone();
        let mut here = Vec::new();
        for (label, x2) in step(&x) {
            let mut ids = Vec::new();
            for y2 in responses(&y, &label, clause) {
                ids.push(intern((x2.clone(), y2), &mut pairs, &mut queue)?);
            }
            here.push(Challenge { side: Side::Left, label, target: x2, responses: ids });
        }
        for (label, y2) in step(&y) {
            let mut ids = Vec::new();
            for x2 in responses(&x, &label, clause) {
                ids.push(intern((x2, y2.clone()), &mut pairs, &mut queue)?);
            }
            here.push(Challenge { side: Side::Right, label, target: y2, responses: ids });
        }
        challenges.resize_with(pairs.len().max(challenges.len()), Vec::new);
        challenges[i] = here;
    }
    challenges.resize_with(pairs.len(), Vec::new);
    Ok(Game { pairs, challenges })
}

/// Greatest fixpoint by backward propagation of refutations. Returns, per
/// pair, `None` if it survives, or the order of its refutation and the
/// challenge that refuted it.
fn solve(game: &Game) -> Vec<Option<(usize, usize)>> {
    let n = game.pairs.len();
    let mut parents: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut alive_responses: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (i, cs) in game.challenges.iter().enumerate() {
        let mut counts = Vec::with_capacity(cs.len());
        for (k, c) in cs.iter().enumerate() {
            let distinct: HashSet<usize> = c.responses.iter().copied().collect();
            for &r in &distinct {
                parents[r].push((i, k));
            }
            counts.push(distinct.len());
        }
        alive_responses.push(counts);
    }

    let mut refuted: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order = 0;
    let mut queue = VecDeque::new();
    for i in 0..n {
        if let Some(k) = alive_responses[i].iter().position(|&c| c == 0) {
            refuted[i] = Some((order, k));
            order += 1;
            queue.push_back(i);
        }
    }
    while let Some(dead) = queue.pop_front() {
        for &(i, k) in &parents[dead] {
            alive_responses[i][k] -= 1;
            if alive_responses[i][k] == 0 && refuted[i].is_none() {
                refuted[i] = Some((order, k));
                order += 1;
                queue.push_back(i);
            }
        }
    }
    refuted
}

/// One move of a distinguishing play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// The pair under attack, rendered.
    pub pair: (String, String),
    /// Which process moves.
    pub side: Side,
    /// `label -> target`.
    #[serde(rename = "move")]
    pub mv: String,
    pub clause: Clause,
    /// The defender's answer, if it has one; the play continues from it.
    pub response: Option<String>,
    #[serde(skip)]
    pub(crate) label: Label,
    #[serde(skip)]
    pub(crate) target: Process,
    #[serde(skip)]
    pub(crate) response_term: Option<Process>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// An asynchronous bisimulation containing the queried pair.
    Equivalent { pairs: Vec<(Process, Process)> },
    /// A play in which the defender is eventually left without an answer.
    Distinguished { trace: Vec<TraceStep> },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::Equivalent { pairs } => serde_json::json!({
                "verdict": "equivalent",
                "pairs": pairs.iter().map(|(x, y)| [x.render(), y.render()]).collect::<Vec<_>>(),
            }),
            Verdict::Distinguished { trace } => serde_json::json!({
                "verdict": "distinguished",
                "trace": trace,
            }),
        }
    }
}

/// Decides asynchronous bisimilarity and produces a certificate or a
/// distinguishing trace.
pub fn async_check_pair_trace(p: &Process, q: &Process, clause: InputClause, limits: Limits) -> Result<Verdict> {
    let game = explore(p, q, clause, limits)?;
    let refuted = solve(&game);
    if refuted[0].is_none() {
        // surviving pairs reachable from the root through surviving answers
        let mut seen = vec![false; game.pairs.len()];
        seen[0] = true;
        let mut stack = vec![0];
        let mut pairs = Vec::new();
        while let Some(i) = stack.pop() {
            pairs.push(game.pairs[i].clone());
            for c in &game.challenges[i] {
                for &r in &c.responses {
                    if refuted[r].is_none() && !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
        }
        pairs.sort();
        return Ok(Verdict::Equivalent { pairs });
    }

    let mut trace = Vec::new();
    let mut at = 0;
    while let Some((_, k)) = refuted[at] {
        let c = &game.challenges[at][k];
        // every answer was refuted earlier; follow the earliest
        let next = c.responses.iter().copied().min_by_key(|&r| refuted[r].map(|(o, _)| o));
        let (x, y) = &game.pairs[at];
        let response_term = next.map(|r| match c.side {
            Side::Left => game.pairs[r].1.clone(),
            Side::Right => game.pairs[r].0.clone(),
        });
        trace.push(TraceStep {
            pair: (x.render(), y.render()),
            side: c.side,
            mv: format!("{} -> {}", c.label, c.target.render()),
            clause: Clause::of(&c.label),
            response: response_term.as_ref().map(Process::render),
            label: c.label.clone(),
            target: c.target.clone(),
            response_term,
        });
        match next {
            Some(r) => at = r,
            None => break,
        }
    }
    Ok(Verdict::Distinguished { trace })
}

pub fn async_bisim_oracle_with(p: &Process, q: &Process, clause: InputClause, limits: Limits) -> Result<bool> {
    let game = explore(p, q, clause, limits)?;
    Ok(solve(&game)[0].is_none())
}

pub fn async_bisim_oracle(p: &Process, q: &Process, limits: Limits) -> Result<bool> {
    async_bisim_oracle_with(p, q, InputClause::ParallelTau, limits)
}

/// A clause of the definition that a certificate fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateViolation {
    pub pair: (Process, Process),
    pub side: Side,
    pub label: Label,
    pub target: Process,
}

/// Replays a certificate: `(p, q)` must be listed, and every listed pair must
/// satisfy both clauses in both directions within the listed set.
pub fn check_certificate(
    p: &Process,
    q: &Process,
    pairs: &[(Process, Process)],
    clause: InputClause,
) -> std::result::Result<(), Option<Box<CertificateViolation>>> {
    let set: HashSet<(&Process, &Process)> = pairs.iter().map(|(x, y)| (x, y)).collect();
    if !set.contains(&(p, q)) {
        return Err(None);
    }
    for (x, y) in pairs {
        for (label, x2) in step(x) {
            if !responses(y, &label, clause).iter().any(|y2| set.contains(&(&x2, y2))) {
                return Err(Some(Box::new(CertificateViolation { pair: (x.clone(), y.clone()), side: Side::Left, label, target: x2 })));
            }
        }
        for (label, y2) in step(y) {
            if !responses(x, &label, clause).iter().any(|x2| set.contains(&(x2, &y2))) {
                return Err(Some(Box::new(CertificateViolation { pair: (x.clone(), y.clone()), side: Side::Right, label, target: y2 })));
            }
        }
    }
    Ok(())
}

/// Replays a distinguishing trace from `(p, q)`: every attack must be a real
/// move, every recorded answer a legal one, and the final attack must have
/// no answer at all.
pub fn check_trace(p: &Process, q: &Process, trace: &[TraceStep], clause: InputClause) -> bool {
    let (mut x, mut y) = (p.clone(), q.clone());
    for (i, s) in trace.iter().enumerate() {
        let (mover, defender) = match s.side {
            Side::Left => (&x, &y),
            Side::Right => (&y, &x),
        };
        if !step(mover).contains(&(s.label.clone(), s.target.clone())) {
            return false;
        }
        let answers = responses(defender, &s.label, clause);
        let last = i + 1 == trace.len();
        match (&s.response_term, last) {
            (None, true) => return answers.is_empty(),
            (Some(r), false) if answers.contains(r) => {
                (x, y) = match s.side {
                    Side::Left => (s.target.clone(), r.clone()),
                    Side::Right => (r.clone(), s.target.clone()),
                };
            }
            _ => return false,
        }
    }
    false
}
