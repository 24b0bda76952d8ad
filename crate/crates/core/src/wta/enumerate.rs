use std::ops::Range;

use super::tree::{RankedAlphabet, Tree};
use super::Wta;
use crate::error::{Error, Result};
use crate::linalg::{kron_vectors, vecmat_raw};
use crate::semiring::Value;

#[derive(Debug, Clone)]
struct Node {
    symbol: usize,
    children: Vec<usize>,
}

/// All trees up to a size bound, stored with shared subtrees.
///
/// Ids follow the enumeration order: by size, then root symbol name, then
/// children left to right. A subtree always has a smaller id than its parent,
/// so per-tree quantities can be computed in one forward pass.
#[derive(Debug, Clone)]
pub struct TreeBank {
    alphabet: RankedAlphabet,
    nodes: Vec<Node>,
    by_size: Vec<Range<usize>>,
}

impl TreeBank {
    pub fn new(alphabet: &RankedAlphabet, max_size: usize) -> Self {
        let mut bank = TreeBank {
            alphabet: alphabet.clone(),
            nodes: Vec::new(),
            by_size: vec![0..0],
        };
        while bank.max_size() < max_size {
            bank.grow();
        }
        bank
    }

    pub fn max_size(&self) -> usize {
        self.by_size.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Ids of the trees with exactly `size` nodes.
    pub fn ids_of_size(&self, size: usize) -> Range<usize> {
        self.by_size.get(size).cloned().unwrap_or(0..0)
    }

    /// Adds every tree of the next size.
    pub fn grow(&mut self) {
        let n = self.by_size.len();
        let start = self.nodes.len();
        for sym in self.alphabet.by_name() {
            let k = self.alphabet.rank_at(sym);
            if k == 0 {
                if n == 1 {
                    self.nodes.push(Node { symbol: sym, children: Vec::new() });
                }
                continue;
            }
            if n - 1 < k {
                continue;
            }
            let mut seqs = Vec::new();
            self.child_sequences(k, n - 1, &mut Vec::new(), &mut seqs);
            self.nodes.extend(seqs.into_iter().map(|children| Node { symbol: sym, children }));
        }
        self.by_size.push(start..self.nodes.len());
    }

    fn child_sequences(&self, k: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if total < k {
            return;
        }
        for first in 1..=total - (k - 1) {
            for id in self.ids_of_size(first) {
                prefix.push(id);
                self.child_sequences(k - 1, total - first, prefix, out);
                prefix.pop();
            }
        }
    }

    pub fn tree(&self, id: usize) -> Tree {
        let node = &self.nodes[id];
        Tree::new(
            self.alphabet.name(node.symbol),
            node.children.iter().map(|&c| self.tree(c)).collect(),
        )
    }

    pub fn trees(&self) -> Vec<Tree> {
        (0..self.len()).map(|id| self.tree(id)).collect()
    }
}

/// The vectors `h_μ(t)` for every tree of a bank, grown alongside it.
#[derive(Debug, Clone)]
pub struct BankEvaluator<'a> {
    wta: &'a Wta,
    vectors: Vec<Vec<Value>>,
}

impl<'a> BankEvaluator<'a> {
    /// The bank must be built over the automaton's alphabet (same symbol order).
    pub fn new(wta: &'a Wta) -> Self {
        BankEvaluator { wta, vectors: Vec::new() }
    }

    /// Computes the vectors of every tree in `bank` not seen yet.
    pub fn extend(&mut self, bank: &TreeBank) {
        let s = self.wta.semiring();
        for id in self.vectors.len()..bank.len() {
            let node = &bank.nodes[id];
            let parts: Vec<&[Value]> = node.children.iter().map(|&c| self.vectors[c].as_slice()).collect();
            let v = vecmat_raw(&kron_vectors(&parts, s), self.wta.transition_at(node.symbol));
            self.vectors.push(v);
        }
    }

    pub fn vector(&self, id: usize) -> &[Value] {
        &self.vectors[id]
    }

    pub fn weight(&self, id: usize) -> Value {
        self.wta.weight_of_vector(&self.vectors[id])
    }
}

/// All trees over `alphabet` with at most `max_size` nodes, in enumeration order.
pub fn enumerate_trees(alphabet: &RankedAlphabet, max_size: usize) -> Result<Vec<Tree>> {
    if max_size == 0 {
        return Err(Error::Input("tree size bound must be at least 1".into()));
    }
    Ok(TreeBank::new(alphabet, max_size).trees())
}

/// The series of an automaton restricted to trees up to a size bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable {
    entries: Vec<(Tree, Value)>,
}

impl SeriesTable {
    pub fn new(wta: &Wta, max_size: usize) -> Self {
        let bank = TreeBank::new(wta.alphabet(), max_size);
        let mut ev = BankEvaluator::new(wta);
        ev.extend(&bank);
        SeriesTable {
            entries: (0..bank.len()).map(|id| (bank.tree(id), ev.weight(id))).collect(),
        }
    }

    pub fn entries(&self) -> &[(Tree, Value)] {
        &self.entries
    }

    pub fn get(&self, t: &Tree) -> Option<&Value> {
        self.entries.iter().find(|(u, _)| u == t).map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(trees: &[Tree]) -> Vec<String> {
        trees.iter().map(Tree::to_string).collect()
    }

    #[test]
    fn small_enumerations() {
        let a = RankedAlphabet::new([("alpha", 0)]).unwrap();
        assert_eq!(names(&enumerate_trees(&a, 3).unwrap()), ["alpha"]);
        let a = RankedAlphabet::new([("sigma", 2), ("alpha", 0)]).unwrap();
        assert_eq!(names(&enumerate_trees(&a, 3).unwrap()), ["alpha", "sigma(alpha,alpha)"]);
        let a = RankedAlphabet::new([("alpha", 0), ("gamma", 1)]).unwrap();
        assert_eq!(names(&enumerate_trees(&a, 2).unwrap()), ["alpha", "gamma(alpha)"]);
        assert!(enumerate_trees(&a, 0).is_err());
    }

    /// Independent count: number of trees of each size by the recurrence over
    /// root symbols and compositions of the remaining size.
    fn count(alphabet: &RankedAlphabet, size: usize, memo: &mut Vec<Option<u64>>) -> u64 {
        fn seqs(alphabet: &RankedAlphabet, k: usize, total: usize, memo: &mut Vec<Option<u64>>) -> u64 {
            if k == 0 {
                return (total == 0) as u64;
            }
            (1..=total).map(|s| count(alphabet, s, memo) * seqs(alphabet, k - 1, total - s, memo)).sum()
        }
        if let Some(c) = memo[size] {
            return c;
        }
        let c = alphabet
            .symbols()
            .map(|(_, k)| if k == 0 { (size == 1) as u64 } else { seqs(alphabet, k, size - 1, memo) })
            .sum();
        memo[size] = Some(c);
        c
    }

    #[test]
    fn enumeration_is_complete_sorted_and_duplicate_free() {
        let a = RankedAlphabet::new([("sigma", 2), ("alpha", 0), ("gamma", 1), ("beta", 0)]).unwrap();
        let max = 7;
        let trees = enumerate_trees(&a, max).unwrap();
        let mut memo = vec![None; max + 1];
        let expected: u64 = (1..=max).map(|s| count(&a, s, &mut memo)).sum();
        assert_eq!(trees.len() as u64, expected);
        assert!(trees.windows(2).all(|w| w[0] < w[1]), "strictly increasing, hence no duplicates");
        assert!(trees.iter().all(|t| t.validate(&a).is_ok() && t.size() <= max));
    }
}
