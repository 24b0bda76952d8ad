//! Weighted tree automata: definition, bottom-up semantics, support and trimming.

mod enumerate;
mod tree;

pub use enumerate::{enumerate_trees, BankEvaluator, SeriesTable, TreeBank};
pub use tree::{RankedAlphabet, Tree};

use crate::error::{Error, Result};
use crate::linalg::{dot_raw, kron_vectors, tuple_digits, vecmat_raw, IndexSet, Matrix, Vector};
use crate::semiring::{Semiring, Value};

/// A weighted tree automaton `(Σ, Q, μ, F)`.
///
/// `μ(σ)` for a symbol of rank `k` is a `Q^k × Q` matrix whose rows are the
/// k-tuples of states in lexicographic order of the state declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wta {
    alphabet: RankedAlphabet,
    states: IndexSet,
    transitions: Vec<Matrix>,
    final_weights: Vector,
    semiring: Semiring,
}

impl Wta {
    pub fn new(
        alphabet: RankedAlphabet,
        states: IndexSet,
        transitions: Vec<Matrix>,
        final_weights: Vector,
        semiring: Semiring,
    ) -> Result<Self> {
        if transitions.len() != alphabet.len() {
            return Err(Error::Shape(format!(
                "{} transition matrices for {} symbols",
                transitions.len(),
                alphabet.len()
            )));
        }
        if states.labels().iter().any(|l| l.len() != 1) {
            return Err(Error::Input("states must be plain names".into()));
        }
        for (i, m) in transitions.iter().enumerate() {
            let k = alphabet.rank_at(i);
            if m.semiring() != semiring {
                return Err(Error::Shape(format!("transition of `{}` is over another semiring", alphabet.name(i))));
            }
            if m.rows() != &states.power(k) || m.cols() != &states {
                return Err(Error::Shape(format!(
                    "transition of `{}` must be indexed by Q^{k} x Q",
                    alphabet.name(i)
                )));
            }
        }
        if final_weights.index() != &states {
            return Err(Error::Shape("final vector must be indexed by the states".into()));
        }
        for v in final_weights.entries() {
            semiring.check_member(v)?;
        }
        Ok(Wta {
            alphabet,
            states,
            transitions,
            final_weights,
            semiring,
        })
    }

    /// Zero-weight automaton with the given states, to be filled in.
    pub fn builder<I, S>(semiring: Semiring, alphabet: RankedAlphabet, states: I) -> Result<WtaBuilder>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let states = IndexSet::from_names(states)?;
        let transitions = (0..alphabet.len())
            .map(|i| Matrix::zeros(states.power(alphabet.rank_at(i)), states.clone(), semiring))
            .collect();
        let final_weights = Vector::zeros(states.clone(), semiring);
        Ok(WtaBuilder {
            wta: Wta {
                alphabet,
                states,
                transitions,
                final_weights,
                semiring,
            },
        })
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &IndexSet {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> Vec<String> {
        self.states.names()
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn final_weights(&self) -> &Vector {
        &self.final_weights
    }

    pub fn transition(&self, symbol: &str) -> Option<&Matrix> {
        self.alphabet.index_of(symbol).map(|i| &self.transitions[i])
    }

    pub fn transition_at(&self, symbol: usize) -> &Matrix {
        &self.transitions[symbol]
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.transitions
    }

    /// Same automaton with its states renamed (order kept).
    pub fn rename_states<F: Fn(&str) -> String>(&self, f: F) -> Result<Wta> {
        let names: Vec<String> = self.state_names().iter().map(|n| f(n)).collect();
        let states = IndexSet::from_names(names)?;
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .map(|(i, m)| m.clone().relabel(states.power(self.alphabet.rank_at(i)), states.clone()))
            .collect::<Result<_>>()?;
        let final_weights = Vector::new(states.clone(), self.final_weights.entries().to_vec())?;
        Wta::new(self.alphabet.clone(), states, transitions, final_weights, self.semiring)
    }

    /// `h_μ(t)`: the state vector reached bottom-up on `t`.
    pub fn eval_vector(&self, t: &Tree) -> Result<Vector> {
        t.validate(&self.alphabet)?;
        Vector::new(self.states.clone(), self.run(t))
    }

    /// `(⟦M⟧, t) = h_μ(t) · F`.
    pub fn eval(&self, t: &Tree) -> Result<Value> {
        t.validate(&self.alphabet)?;
        Ok(self.weight_of_vector(&self.run(t)))
    }

    pub(crate) fn weight_of_vector(&self, h: &[Value]) -> Value {
        dot_raw(h, self.final_weights.entries(), self.semiring)
    }

    fn run(&self, t: &Tree) -> Vec<Value> {
        let sym = self.alphabet.index_of(t.symbol()).expect("validated");
        let parts: Vec<Vec<Value>> = t.children().iter().map(|c| self.run(c)).collect();
        let refs: Vec<&[Value]> = parts.iter().map(Vec::as_slice).collect();
        vecmat_raw(&kron_vectors(&refs, self.semiring), &self.transitions[sym])
    }

    /// The Boolean automaton `f(M)`: every nonzero weight becomes `1`.
    pub fn support(&self) -> Wta {
        let b = Semiring::Bool;
        let f = |v: &Value| Value::Bool(!v.is_zero());
        let transitions = self
            .transitions
            .iter()
            .map(|m| Matrix::from_parts(m.rows().clone(), m.cols().clone(), m.entries().iter().map(f).collect(), b))
            .collect();
        let final_weights = Vector::new(self.states.clone(), self.final_weights.entries().iter().map(f).collect())
            .expect("same index");
        Wta {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            transitions,
            final_weights,
            semiring: b,
        }
    }

    /// The same automaton with every weight read in `target`.
    /// Booleans become `0`/`1`; fails when a weight lies outside `target`.
    pub fn embed(&self, target: Semiring) -> Result<Wta> {
        let conv = |v: &Value| target.from_rational(v.to_rational());
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for m in &self.transitions {
            let data = m.entries().iter().map(conv).collect::<Result<Vec<_>>>()?;
            transitions.push(Matrix::new(m.rows().clone(), m.cols().clone(), data, target)?);
        }
        let finals = self.final_weights.entries().iter().map(conv).collect::<Result<Vec<_>>>()?;
        Wta::new(
            self.alphabet.clone(),
            self.states.clone(),
            transitions,
            Vector::new(self.states.clone(), finals)?,
            target,
        )
    }

    /// States reachable bottom-up through nonzero transitions.
    pub fn accessible_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut acc = vec![false; n];
        let mut digits = vec![0; self.alphabet.max_rank()];
        let mut changed = true;
        while changed {
            changed = false;
            for (sym, m) in self.transitions.iter().enumerate() {
                let k = self.alphabet.rank_at(sym);
                for row in 0..m.nrows() {
                    tuple_digits(row, n, k, &mut digits);
                    if !digits[..k].iter().all(|&q| acc[q]) {
                        continue;
                    }
                    for (q, v) in m.row(row).iter().enumerate() {
                        if !acc[q] && !v.is_zero() {
                            acc[q] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        acc
    }

    /// States with a nonzero final weight, or occurring as a child of a
    /// nonzero transition into a co-accessible state whose other children are
    /// accessible.
    pub fn coaccessible_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let acc = self.accessible_states();
        let mut co: Vec<bool> = self.final_weights.entries().iter().map(|v| !v.is_zero()).collect();
        let mut digits = vec![0; self.alphabet.max_rank()];
        let mut changed = true;
        while changed {
            changed = false;
            for (sym, m) in self.transitions.iter().enumerate() {
                let k = self.alphabet.rank_at(sym);
                if k == 0 {
                    continue;
                }
                for row in 0..m.nrows() {
                    let feeds_coaccessible = m.row(row).iter().enumerate().any(|(q, v)| co[q] && !v.is_zero());
                    if !feeds_coaccessible {
                        continue;
                    }
                    tuple_digits(row, n, k, &mut digits);
                    for l in 0..k {
                        let others_ok = (0..k).all(|j| j == l || acc[digits[j]]);
                        if others_ok && !co[digits[l]] {
                            co[digits[l]] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        co
    }

    pub fn is_trim(&self) -> bool {
        let acc = self.accessible_states();
        let co = self.coaccessible_states();
        acc.iter().zip(&co).all(|(a, c)| *a && *c)
    }

    /// Removes every state that is not both accessible and co-accessible.
    /// Returns the trimmed automaton and the names of the removed states.
    pub fn trim(&self) -> (Wta, Vec<String>) {
        let acc = self.accessible_states();
        let co = self.coaccessible_states();
        let keep: Vec<usize> = (0..self.num_states()).filter(|&q| acc[q] && co[q]).collect();
        let removed = (0..self.num_states())
            .filter(|&q| !(acc[q] && co[q]))
            .map(|q| self.states.label(q)[0].clone())
            .collect();
        (self.restrict(&keep), removed)
    }

    /// The automaton on the listed states (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Wta {
        let n = self.num_states();
        let states = IndexSet::new(keep.iter().map(|&q| self.states.label(q).clone()).collect()).expect("distinct");
        let m = keep.len();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (sym, mat) in self.transitions.iter().enumerate() {
            let k = self.alphabet.rank_at(sym);
            let rows = states.power(k);
            let mut data = Vec::with_capacity(rows.len() * m);
            let mut digits = vec![0; k];
            for r in 0..rows.len() {
                tuple_digits(r, m, k, &mut digits);
                let old_row = digits.iter().fold(0, |acc, &d| acc * n + keep[d]);
                for &q in keep {
                    data.push(mat.get(old_row, q).clone());
                }
            }
            transitions.push(Matrix::from_parts(rows, states.clone(), data, self.semiring));
        }
        let final_weights = Vector::new(
            states.clone(),
            keep.iter().map(|&q| self.final_weights.get(q).clone()).collect(),
        )
        .expect("same size");
        Wta {
            alphabet: self.alphabet.clone(),
            states,
            transitions,
            final_weights,
            semiring: self.semiring,
        }
    }
}

/// Mutable construction of a [`Wta`]; omitted weights are zero.
#[derive(Debug, Clone)]
pub struct WtaBuilder {
    wta: Wta,
}

impl WtaBuilder {
    fn state(&self, name: &str) -> Result<usize> {
        self.wta
            .states
            .position_of(name)
            .ok_or_else(|| Error::Input(format!("unknown state `{name}`")))
    }

    pub fn transition(&mut self, symbol: &str, children: &[&str], target: &str, weight: Value) -> Result<&mut Self> {
        let sym = self
            .wta
            .alphabet
            .index_of(symbol)
            .ok_or_else(|| Error::Input(format!("unknown symbol `{symbol}`")))?;
        let k = self.wta.alphabet.rank_at(sym);
        if children.len() != k {
            return Err(Error::Input(format!(
                "`{symbol}` has rank {k} but the transition lists {} states",
                children.len()
            )));
        }
        self.wta.semiring.check_member(&weight)?;
        let n = self.wta.num_states();
        let mut row = 0;
        for c in children {
            row = row * n + self.state(c)?;
        }
        let q = self.state(target)?;
        self.wta.transitions[sym].set(row, q, weight);
        Ok(self)
    }

    pub fn final_weight(&mut self, state: &str, weight: Value) -> Result<&mut Self> {
        self.wta.semiring.check_member(&weight)?;
        let q = self.state(state)?;
        let mut entries = self.wta.final_weights.entries().to_vec();
        entries[q] = weight;
        self.wta.final_weights = Vector::new(self.wta.states.clone(), entries)?;
        Ok(self)
    }

    /// Sets a transition from integer literals.
    pub fn trans_i64(&mut self, symbol: &str, children: &[&str], target: &str, weight: i64) -> Result<&mut Self> {
        let w = self.wta.semiring.from_i64(weight)?;
        self.transition(symbol, children, target, w)
    }

    pub fn final_i64(&mut self, state: &str, weight: i64) -> Result<&mut Self> {
        let w = self.wta.semiring.from_i64(weight)?;
        self.final_weight(state, w)
    }

    pub fn build(&self) -> Wta {
        self.wta.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> RankedAlphabet {
        RankedAlphabet::new([("alpha", 0), ("sigma", 2)]).unwrap()
    }

    fn m_with_sigma(weight: i64) -> Wta {
        let mut b = Wta::builder(Semiring::Nat, alphabet(), ["q"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", weight).unwrap();
        b.final_i64("q", 1).unwrap();
        b.build()
    }

    fn count_sigma(t: &Tree) -> u32 {
        (t.symbol() == "sigma") as u32 + t.children().iter().map(count_sigma).sum::<u32>()
    }

    #[test]
    fn evaluation_examples() {
        let m_one = m_with_sigma(1);
        let t: Tree = "sigma(alpha,alpha)".parse().unwrap();
        assert!(m_one.eval(&t).unwrap().is_one());

        let m_two = m_with_sigma(2);
        for t in enumerate_trees(m_two.alphabet(), 7).unwrap() {
            let expected = Value::Nat((1u64 << count_sigma(&t)).into());
            assert_eq!(m_two.eval(&t).unwrap(), expected, "{t}");
        }
        let t: Tree = "sigma(alpha,sigma(alpha,alpha))".parse().unwrap();
        assert_eq!(m_two.eval(&t).unwrap(), Value::Nat(4.into()));

        let h = m_two.eval_vector(&Tree::leaf("alpha")).unwrap();
        assert_eq!(h.entries(), m_two.transition("alpha").unwrap().row(0));

        assert!(matches!(m_two.eval(&Tree::leaf("beta")), Err(Error::Tree(_))));
        assert!(matches!(m_two.eval(&"sigma(alpha)".parse().unwrap()), Err(Error::Tree(_))));
    }

    #[test]
    fn support_automaton() {
        let s = m_with_sigma(2).support();
        assert_eq!(s.semiring(), Semiring::Bool);
        assert!(s.transitions().iter().all(|m| m.entries().iter().all(Value::is_one)));
        assert!(s.final_weights().get(0).is_one());

        let zero = Wta::builder(Semiring::Int, alphabet(), ["p", "q"]).unwrap().build().support();
        assert!(zero.transitions().iter().all(|m| m.entries().iter().all(Value::is_zero)));

        let mut b = Wta::builder(Semiring::Int, alphabet(), ["p"]).unwrap();
        b.trans_i64("alpha", &[], "p", -3).unwrap();
        let s = b.build().support();
        assert_eq!(s.transition("alpha").unwrap().entries(), &[Value::Bool(true)]);
        assert_eq!(s.transition("sigma").unwrap().entries(), &[Value::Bool(false)]);
    }

    #[test]
    fn trimming() {
        let m_two = m_with_sigma(2);
        let (t, removed) = m_two.trim();
        assert!(removed.is_empty());
        assert_eq!(t, m_two);
        assert!(m_two.is_trim());

        // r is never produced; d is produced but feeds nothing and is not final
        let mut b = Wta::builder(Semiring::Int, alphabet(), ["q", "r", "d"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 2).unwrap();
        b.trans_i64("sigma", &["r", "q"], "q", 5).unwrap();
        b.trans_i64("alpha", &[], "d", 3).unwrap();
        b.final_i64("q", 1).unwrap();
        let m = b.build();
        assert!(!m.is_trim());
        let (t, removed) = m.trim();
        assert_eq!(removed, ["r", "d"]);
        assert_eq!(t.state_names(), ["q"]);
        assert!(t.is_trim());
        for tree in enumerate_trees(m.alphabet(), 7).unwrap() {
            assert_eq!(m.eval(&tree).unwrap(), t.eval(&tree).unwrap());
        }
    }

    #[test]
    fn builder_validation() {
        let mut b = Wta::builder(Semiring::Nat, alphabet(), ["q"]).unwrap();
        assert!(b.trans_i64("sigma", &["q"], "q", 1).is_err());
        assert!(b.trans_i64("alpha", &[], "x", 1).is_err());
        assert!(b.final_i64("q", -1).is_err());
        assert!(Wta::builder(Semiring::Nat, alphabet(), ["q", "q"]).is_err());
    }
}
