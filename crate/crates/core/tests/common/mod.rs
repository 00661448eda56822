//! Independent oracles and corpus builders shared by the integration tests.
//!
//! Nothing here calls the partition-refinement code: the oracles are the
//! textbook definitions, evaluated by brute force.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use dialgebra::ccs::{build_ccs_dialgebra, experiment_channels};
use dialgebra::dialgebra::{Experiment, FiniteDialgebra, InteractionSignature, Shape};
use dialgebra::gen::TermGenerator;
use dialgebra::lts::{step, Label};
use dialgebra::mealy::{mealy_to_dialgebra, MealyMachine};
use dialgebra::{Channel, Limits, Process};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn pr(s: &str) -> Process {
    dialgebra::parse(s).unwrap()
}

pub fn ch(s: &str) -> Channel {
    Channel::new(s).unwrap()
}

/// Reachable states of `roots` under `step`, with explicit successor lists.
pub fn explore(roots: &[Process]) -> (Vec<Process>, Vec<Vec<(Label, usize)>>) {
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
    let mut succ: Vec<Vec<(Label, usize)>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let mut here = Vec::new();
        for (l, t) in step(&states[i]) {
            let j = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            here.push((l, j));
        }
        if succ.len() <= i {
            succ.resize_with(i + 1, Vec::new);
        }
        succ[i] = here;
    }
    succ.resize_with(states.len(), Vec::new);
    (states, succ)
}

/// Greatest fixpoint of the strong-bisimulation functional, starting from
/// the total relation on the joint state space.
pub fn naive_strong_bisim(p: &Process, q: &Process) -> bool {
    let (states, succ) = explore(&[p.clone(), q.clone()]);
    let n = states.len();
    let mut r = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        let prev = r.clone();
        for x in 0..n {
            for y in 0..n {
                if !prev[x][y] {
                    continue;
                }
                let fwd = succ[x]
                    .iter()
                    .all(|(a, x2)| succ[y].iter().any(|(b, y2)| a == b && prev[*x2][*y2]));
                let bwd = succ[y]
                    .iter()
                    .all(|(b, y2)| succ[x].iter().any(|(a, x2)| a == b && prev[*x2][*y2]));
                if !(fwd && bwd) {
                    r[x][y] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let qi = states.iter().position(|s| s == q).unwrap();
    r[0][qi]
}

/// All terms with exactly `size` constructors over the given channels.
pub fn terms_of_size(size: usize, chans: &[Channel]) -> Vec<Process> {
    let mut by_size: Vec<Vec<Process>> = vec![Vec::new(); size + 1];
    for n in 1..=size {
        let mut out = Vec::new();
        if n == 1 {
            out.push(Process::Nil);
            out.extend(chans.iter().map(|c| Process::output(c.clone())));
        } else {
            for p in &by_size[n - 1] {
                out.push(Process::tau(p.clone()));
                for c in chans {
                    out.push(Process::input(c.clone(), p.clone()));
                }
            }
            for k in 1..n - 1 {
                for l in &by_size[k] {
                    for r in &by_size[n - 1 - k] {
                        out.push(Process::par(l.clone(), r.clone()));
                        out.push(Process::sum(l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size[n] = out;
    }
    std::mem::take(&mut by_size[size])
}

/// Moore-style table filling for deterministic machines: mark pairs whose
/// outputs differ on some input, then propagate marks backwards through
/// the successor function until nothing changes. Returns the class of each
/// state (least unmarked partner).
pub fn table_filling(m: &MealyMachine) -> Vec<usize> {
    let n = m.states.len();
    let k = m.inputs.len();
    let det = |s: usize, i: usize| -> (usize, usize) {
        let set = m.trans(i, s);
        assert_eq!(set.len(), 1, "machine must be deterministic");
        *set.iter().next().unwrap()
    };
    let mut marked: Vec<Vec<bool>> = (0..n)
        .map(|s| (0..n).map(|t| (0..k).any(|i| det(s, i).0 != det(t, i).0)).collect())
        .collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if !marked[s][t] && (0..k).any(|i| marked[det(s, i).1][det(t, i).1]) {
                    marked[s][t] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).map(|s| (0..n).find(|&t| !marked[s][t]).unwrap()).collect()
}

/// Every deterministic machine with `n` states over `I = O = {0, 1}`.
pub fn all_deterministic_machines(n: usize) -> impl Iterator<Item = MealyMachine> {
    let entries = 2 * n;
    let choices = 2 * n; // (output, next)
    let total = (choices as u64).pow(entries as u32);
    (0..total).map(move |mut code| {
        let mut m = MealyMachine::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
        );
        for s in 0..n {
            for i in 0..2 {
                let c = (code % choices as u64) as usize;
                code /= choices as u64;
                m.add(s, i, c % 2, c / 2).unwrap();
            }
        }
        m
    })
}

pub fn random_deterministic_machine(rng: &mut ChaCha8Rng, n: usize) -> MealyMachine {
    let mut m = MealyMachine::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        vec!["0".into(), "1".into()],
        vec!["0".into(), "1".into()],
    );
    for s in 0..n {
        for i in 0..2 {
            m.add(s, i, rng.random_range(0..2), rng.random_range(0..n)).unwrap();
        }
    }
    m
}

/// A random dialgebra with a unit shape and a parametric shape.
pub fn random_dialgebra(rng: &mut ChaCha8Rng, max_states: usize) -> FiniteDialgebra {
    let n = rng.random_range(1..=max_states);
    let params = rng.random_range(1..=3);
    let n_obs = rng.random_range(1..=2);
    let sig = InteractionSignature::new(vec![
        Shape::unit("run"),
        Shape::with_params("send", (0..params).map(|i| format!("p{i}"))),
    ])
    .unwrap();
    let mut b = FiniteDialgebra::builder(
        (0..n).map(|i| format!("x{i}")).collect(),
        sig,
        (0..n_obs).map(|i| format!("o{i}")).collect(),
    );
    let density = rng.random_range(0.05..0.6);
    let prob = (2.0 * density / n as f64).min(1.0);
    for state in 0..n {
        for (shape, np) in [(0, 1), (1, params)] {
            for param in 0..np {
                for next in 0..n {
                    for obs in 0..n_obs {
                        if rng.random_bool(prob) {
                            b.insert(Experiment { shape, param, state }, obs, next).unwrap();
                        }
                    }
                }
            }
        }
    }
    b.build()
}

/// Dialgebras from CCS closures of random pairs and from random
/// non-deterministic Mealy machines, alternating, all with at most
/// `max_states` states.
pub fn dialgebra_corpus(seed: u64, count: usize, max_states: usize) -> Vec<FiniteDialgebra> {
    let mut g = TermGenerator::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if out.len() % 2 == 0 {
            let (p, q) = g.pair(6);
            let chans = experiment_channels(&p, &q, 0);
            let closure = build_ccs_dialgebra(&[p, q], &chans, Limits::default()).unwrap();
            if closure.dialgebra.num_states() <= max_states {
                out.push(closure.dialgebra);
            }
        } else {
            let states = rng.random_range(2..=8.min(max_states.max(2)));
            let inputs = rng.random_range(1..=3);
            let outputs = rng.random_range(1..=3);
            out.push(mealy_to_dialgebra(&g.mealy(states, inputs, outputs, 2)));
        }
    }
    out
}
