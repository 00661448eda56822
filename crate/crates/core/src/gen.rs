//! Seeded random terms, term pairs and Mealy machines, plus shrinking.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mealy::MealyMachine;
use crate::syntax::{Channel, Process};

pub const DEFAULT_SEED: u64 = 2011;

/// Channel pool used by the generator.
pub const CHANNEL_POOL: [&str; 3] = ["a", "b", "c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctor {
    Nil,
    Tau,
    Input,
    Output,
    Par,
    Sum,
}

pub struct TermGenerator {
    rng: ChaCha8Rng,
    channels: Vec<Channel>,
}

impl TermGenerator {
    pub fn new(seed: u64) -> Self {
        TermGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            channels: CHANNEL_POOL.iter().map(|c| Channel::new(c).unwrap()).collect(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn channel(&mut self) -> Channel {
        self.channels.choose(&mut self.rng).unwrap().clone()
    }

    /// A term with at most `max_size` constructors, choosing uniformly among
    /// the constructors that still fit the budget.
    pub fn term(&mut self, max_size: usize) -> Process {
        let budget = max_size.max(1);
        let choices: &[Ctor] = match budget {
            1 => &[Ctor::Nil, Ctor::Output],
            2 => &[Ctor::Nil, Ctor::Output, Ctor::Tau, Ctor::Input],
            _ => &[Ctor::Nil, Ctor::Output, Ctor::Tau, Ctor::Input, Ctor::Par, Ctor::Sum],
        };
        match *choices.choose(&mut self.rng).unwrap() {
            Ctor::Nil => Process::Nil,
            Ctor::Output => Process::output(self.channel()),
            Ctor::Tau => Process::tau(self.term(budget - 1)),
            Ctor::Input => {
                let c = self.channel();
                Process::input(c, self.term(budget - 1))
            }
            ctor @ (Ctor::Par | Ctor::Sum) => {
                let left_budget = self.rng.random_range(1..budget - 1);
                let l = self.term(left_budget);
                let r = self.term(budget - 1 - l.size());
                if ctor == Ctor::Par {
                    Process::par(l, r)
                } else {
                    Process::sum(l, r)
                }
            }
        }
    }

    /// A pair of terms, each of at most `max_size` constructors.
    ///
    /// Independent pairs are almost never equivalent, so half of the pairs
    /// relate the second term to the first: a local mutation, a swap of
    /// operands, padding with `0`, or a `c.'c + tau.0` / `tau.0` exchange.
    pub fn pair(&mut self, max_size: usize) -> (Process, Process) {
        loop {
            let p = self.term(max_size);
            let q = match self.rng.random_range(0..6) {
                0..=2 => self.term(max_size),
                3 => self.mutate(&p),
                4 => self.rewrite(&p),
                _ => self.graft_example(&p),
            };
            if q.size() <= max_size {
                return (p, q);
            }
        }
    }

    fn pick_position(&mut self, p: &Process) -> usize {
        self.rng.random_range(0..p.size())
    }

    fn mutate(&mut self, p: &Process) -> Process {
        let at = self.pick_position(p);
        let size = 1 + self.rng.random_range(0..3);
        let replacement = self.term(size);
        replace_at(p, at, &mut |_| replacement.clone())
    }

    fn rewrite(&mut self, p: &Process) -> Process {
        let at = self.pick_position(p);
        let kind = self.rng.random_range(0..3);
        replace_at(p, at, &mut |t| match (kind, t) {
            (0, Process::Par(l, r)) => Process::Par(r.clone(), l.clone()),
            (0, Process::Sum(l, r)) => Process::Sum(r.clone(), l.clone()),
            (1, t) => Process::par(t.clone(), Process::Nil),
            (_, t) => Process::sum(t.clone(), t.clone()),
        })
    }

    fn graft_example(&mut self, p: &Process) -> Process {
        let c = self.channel();
        let example = Process::sum(
            Process::input(c.clone(), Process::output(c)),
            Process::tau(Process::Nil),
        );
        let at = self.pick_position(p);
        replace_at(p, at, &mut |t| match t {
            Process::Tau(k) if **k == Process::Nil => example.clone(),
            Process::Sum(l, r) if matches!(**l, Process::Input(..)) && **r == Process::tau(Process::Nil) => {
                Process::tau(Process::Nil)
            }
            _ => Process::sum(t.clone(), Process::tau(Process::Nil)),
        })
    }

    /// A random non-deterministic machine; each `trans(i, s)` gets up to
    /// `max_branching` outcomes.
    pub fn mealy(&mut self, states: usize, inputs: usize, outputs: usize, max_branching: usize) -> MealyMachine {
        let mut m = MealyMachine::new(
            (0..states).map(|i| format!("s{i}")).collect(),
            (0..inputs).map(|i| format!("i{i}")).collect(),
            (0..outputs).map(|i| format!("o{i}")).collect(),
        );
        for s in 0..states {
            for a in 0..inputs {
                let k = self.rng.random_range(0..=max_branching);
                for _ in 0..k {
                    let o = self.rng.random_range(0..outputs);
                    let n = self.rng.random_range(0..states);
                    m.add(s, a, o, n).unwrap();
                }
            }
        }
        m
    }
}

/// Replaces the subterm at pre-order position `at` by `f(subterm)`.
pub fn replace_at(p: &Process, at: usize, f: &mut dyn FnMut(&Process) -> Process) -> Process {
    fn go(p: &Process, at: &mut isize, f: &mut dyn FnMut(&Process) -> Process) -> Process {
        if *at == 0 {
            *at = -1;
            return f(p);
        }
        *at -= 1;
        match p {
            Process::Nil | Process::Output(_) => p.clone(),
            Process::Tau(k) => Process::tau(go(k, at, f)),
            Process::Input(c, k) => Process::input(c.clone(), go(k, at, f)),
            Process::Par(l, r) => {
                let l = go(l, at, f);
                Process::par(l, go(r, at, f))
            }
            Process::Sum(l, r) => {
                let l = go(l, at, f);
                Process::sum(l, go(r, at, f))
            }
        }
    }
    let mut counter = at as isize;
    go(p, &mut counter, f)
}

/// Every term obtained from `p` by replacing one non-`0` subterm with `0`,
/// largest subterms first.
pub fn nil_replacements(p: &Process) -> Vec<Process> {
    let mut out: Vec<Process> = (0..p.size())
        .map(|i| replace_at(p, i, &mut |_| Process::Nil))
        .filter(|q| q != p)
        .collect();
    out.sort_by_key(Process::size);
    out.dedup();
    out
}

/// Greedily shrinks a failing pair by replacing subterms with `0` for as
/// long as `fails` keeps holding.
pub fn shrink_pair(
    mut p: Process,
    mut q: Process,
    mut fails: impl FnMut(&Process, &Process) -> bool,
) -> (Process, Process) {
    'outer: loop {
        for p2 in nil_replacements(&p) {
            if fails(&p2, &q) {
                p = p2;
                continue 'outer;
            }
        }
        for q2 in nil_replacements(&q) {
            if fails(&p, &q2) {
                q = q2;
                continue 'outer;
            }
        }
        return (p, q);
    }
}
