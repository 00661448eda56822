//! Non-deterministic Mealy machines, the dialgebras for `F X = I × X` and
//! `B X = P_fin(O × X)`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::dialgebra::{bff_bisim_pr, Experiment, FiniteDialgebra, InteractionSignature, Shape};
use crate::error::{Error, Result};

pub const INPUT_SHAPE: &str = "in";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// `trans[state][input]`: sorted `(output, next)` pairs.
    trans: Vec<Vec<BTreeSet<(usize, usize)>>>,
}

impl MealyMachine {
    /// A machine with every `trans(i, s)` empty.
    pub fn new(states: Vec<String>, inputs: Vec<String>, outputs: Vec<String>) -> Self {
        let trans = vec![vec![BTreeSet::new(); inputs.len()]; states.len()];
        MealyMachine { states, inputs, outputs, trans }
    }

    /// Adds `(output, next)` to `trans(input, state)`, all by index.
    pub fn add(&mut self, state: usize, input: usize, output: usize, next: usize) -> Result<()> {
        if state >= self.states.len() || next >= self.states.len() {
            return Err(Error::Structure("state index out of range".into()));
        }
        if input >= self.inputs.len() || output >= self.outputs.len() {
            return Err(Error::Structure("input or output index out of range".into()));
        }
        self.trans[state][input].insert((output, next));
        Ok(())
    }

    pub fn trans(&self, input: usize, state: usize) -> &BTreeSet<(usize, usize)> {
        &self.trans[state][input]
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().flatten().map(BTreeSet::len).sum()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Reads the machine description format
    /// `{states, inputs, outputs, trans: [{in, state, out: [{o, next}]}]}`.
    /// Entries not listed are empty.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MealyJson = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(e.to_string()))?;
        let lookup = |names: &[String], what: &str| -> Result<HashMap<String, usize>> {
            let map: HashMap<String, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
            if map.len() != names.len() {
                return Err(Error::Malformed(format!("duplicate name in {what}")));
            }
            Ok(map)
        };
        let states = lookup(&doc.states, "states")?;
        let inputs = lookup(&doc.inputs, "inputs")?;
        let outputs = lookup(&doc.outputs, "outputs")?;
        let mut m = MealyMachine::new(doc.states.clone(), doc.inputs.clone(), doc.outputs.clone());
        let find = |map: &HashMap<String, usize>, name: &str, at: String| {
            map.get(name)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("{at}: unknown name {name:?}")))
        };
        for (i, t) in doc.trans.iter().enumerate() {
            let s = find(&states, &t.state, format!("trans[{i}].state"))?;
            let a = find(&inputs, &t.input, format!("trans[{i}].in"))?;
            for (j, out) in t.out.iter().enumerate() {
                let o = find(&outputs, &out.o, format!("trans[{i}].out[{j}].o"))?;
                let n = find(&states, &out.next, format!("trans[{i}].out[{j}].next"))?;
                m.add(s, a, o, n)?;
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut trans = Vec::new();
        for (s, row) in self.trans.iter().enumerate() {
            for (a, set) in row.iter().enumerate() {
                if set.is_empty() {
                    continue;
                }
                trans.push(MealyTransJson {
                    input: self.inputs[a].clone(),
                    state: self.states[s].clone(),
                    out: set
                        .iter()
                        .map(|&(o, n)| MealyOutJson { o: self.outputs[o].clone(), next: self.states[n].clone() })
                        .collect(),
                });
            }
        }
        serde_json::to_value(MealyJson {
            states: self.states.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            trans,
        })
        .expect("machine serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MealyJson {
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    #[serde(default)]
    trans: Vec<MealyTransJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MealyTransJson {
    #[serde(rename = "in")]
    input: String,
    state: String,
    out: Vec<MealyOutJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MealyOutJson {
    o: String,
    next: String,
}

/// One shape `in` whose parameters are the inputs; observations are the
/// outputs. States and transitions carry over unchanged.
pub fn mealy_to_dialgebra(m: &MealyMachine) -> FiniteDialgebra {
    let signature = InteractionSignature::new(vec![Shape::with_params(INPUT_SHAPE, m.inputs.iter().cloned())])
        .expect("single shape");
    let mut b = FiniteDialgebra::builder(m.states.clone(), signature, m.outputs.clone());
    for (state, row) in m.trans.iter().enumerate() {
        for (param, set) in row.iter().enumerate() {
            for &(o, next) in set {
                b.insert(Experiment { shape: 0, param, state }, o, next)
                    .expect("indices validated on insertion");
            }
        }
    }
    b.build()
}

pub fn mealy_bisim(m: &MealyMachine, s1: &str, s2: &str) -> Result<bool> {
    let find = |s: &str| {
        m.state_index(s)
            .ok_or_else(|| Error::Structure(format!("unknown state {s:?}")))
    };
    let (i, j) = (find(s1)?, find(s2)?);
    Ok(bff_bisim_pr(&mealy_to_dialgebra(m)).same_block(i, j))
}

/// Deterministic machine over `I = O = {0, 1}` whose output is the parity
/// of the inputs read so far, including the current one.
pub fn parity_machine() -> MealyMachine {
    let bits = vec!["0".to_string(), "1".to_string()];
    let mut m = MealyMachine::new(vec!["even".into(), "odd".into()], bits.clone(), bits);
    for s in 0..2 {
        for i in 0..2 {
            let next = s ^ i;
            m.add(s, i, next, next).unwrap();
        }
    }
    m
}
