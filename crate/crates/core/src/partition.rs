//! Partitions of finite state sets and splitter-based partition refinement.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// An equivalence relation on `0..n`, stored as disjoint blocks.
///
/// Blocks are numbered by their least member, so two partitions describing
/// the same relation compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds the partition whose blocks are the classes of `key`.
    pub fn from_keys<K: Eq + Hash>(keys: &[K]) -> Self {
        let mut index: HashMap<&K, usize> = HashMap::new();
        let mut block_of = Vec::with_capacity(keys.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (state, key) in keys.iter().enumerate() {
            let b = *index.entry(key).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(state);
            block_of.push(b);
        }
        Partition { block_of, blocks }
    }

    /// Returns `None` when the blocks are not a partition of `0..n`.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Option<Self> {
        let mut keys = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return None;
            }
            for &s in block {
                if s >= n || keys[s] != usize::MAX {
                    return None;
                }
                keys[s] = b;
            }
        }
        if keys.contains(&usize::MAX) {
            return None;
        }
        Some(Partition::from_keys(&keys))
    }

    pub fn discrete(n: usize) -> Self {
        Partition::from_keys(&(0..n).collect::<Vec<_>>())
    }

    pub fn total(n: usize) -> Self {
        Partition::from_keys(&vec![(); n])
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, state: usize) -> usize {
        self.block_of[state]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_map(&self) -> &[usize] {
        &self.block_of
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    /// True when every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.num_states() == other.num_states()
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&s| other.same_block(s, b[0])))
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(d)?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, blocks)
            .ok_or_else(|| serde::de::Error::custom("blocks do not partition 0..n"))
    }
}

/// Coarsest strong bisimulation of a labelled transition system on `0..n`.
///
/// Kanellakis–Smolka style: every block is used in turn as a splitter (in
/// ascending block order) and every block is split by "has an `l`-edge into
/// the splitter" for each label `l`, until a full pass splits nothing.
pub fn coarsest_bisimulation<L: Clone + Eq + Hash + Ord>(n: usize, edges: &[(usize, L, usize)]) -> Partition {
    // Incoming edges per target, labels interned in sorted order.
    let mut labels: Vec<L> = edges.iter().map(|(_, l, _)| l.clone()).collect();
    labels.sort();
    labels.dedup();
    let label_id: HashMap<&L, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut incoming: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (src, l, dst) in edges {
        incoming[*dst].push((label_id[l], *src));
    }
    for inc in &mut incoming {
        inc.sort_unstable();
        inc.dedup();
    }

    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
    let mut mark = vec![usize::MAX; n];
    let mut stamp = 0usize;

    loop {
        let mut changed = false;
        let mut splitter = 0;
        while splitter < blocks.len() {
            // predecessors of the splitter, grouped by label
            let mut pre: Vec<(usize, usize)> = blocks[splitter]
                .iter()
                .flat_map(|&t| incoming[t].iter().copied())
                .collect();
            pre.sort_unstable();
            pre.dedup();
            for group in pre.chunk_by(|a, b| a.0 == b.0) {
                stamp += 1;
                let mut touched: Vec<usize> = Vec::new();
                for &(_, s) in group {
                    mark[s] = stamp;
                    touched.push(block_of[s]);
                }
                touched.sort_unstable();
                touched.dedup();
                for b in touched {
                    let (inside, outside): (Vec<usize>, Vec<usize>) =
                        blocks[b].iter().partition(|&&s| mark[s] == stamp);
                    if outside.is_empty() {
                        continue;
                    }
                    changed = true;
                    let fresh = blocks.len();
                    for &s in &outside {
                        block_of[s] = fresh;
                    }
                    blocks[b] = inside;
                    blocks.push(outside);
                }
            }
            splitter += 1;
        }
        if !changed {
            break;
        }
    }
    Partition::from_keys(&block_of)
}
