//! Joint reduction: a single automaton simulating both `M` and `N`, and the
//! equivalence decision built on it.
//!
//! Over `M + N = (Σ, Q ∪ P, μ', F')` a finite set `V ⊆ A^{Q∪P}` is closed
//! under `(v_1, ..., v_k) ↦ (v_1 ⊗ ... ⊗ v_k) μ'(σ)` up to the generated
//! semimodule. When every `v = (v_1 | v_2)` satisfies `v_1 F = v_2 G` the
//! rows of `V` form transfer matrices from a joining automaton `M''` into
//! `M` and `N`.

mod membership;

pub use membership::{nat_membership, nat_membership_within, nat_order, reduce_nat, EchelonBasis, NAT_SEARCH_LIMIT};

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};

use num_traits::Zero;
use serde::Serialize;

use crate::constructions::sum_wta;
use crate::error::{Error, Result};
use crate::linalg::{dot_raw, kron_vectors, tuple_digits, vecmat_raw, IndexSet, Matrix, Vector};
use crate::semiring::{Semiring, Value};
use crate::simulation::{check_compatible, check_simulation};
use crate::wta::{BankEvaluator, Tree, TreeBank, Wta};

/// Default cap on closure rounds.
pub const ROUND_LIMIT: usize = 10_000;
/// Cap on `|V|^k` products per symbol and round.
pub const PRODUCT_LIMIT: usize = 1_000_000;
/// Node budget of one membership search during the natural-number closure.
pub const CLOSURE_SEARCH_LIMIT: usize = 20_000;
/// Trees kept in memory by the witness search.
pub const WITNESS_TREE_LIMIT: usize = 400_000;

/// The closed generator set `V` of a sum automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub vectors: Vec<Vec<Value>>,
    pub semiring: Semiring,
    pub closed: bool,
    pub iterations: usize,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coefficients expressing `target` over `V` in the carrier.
    pub fn membership(&self, target: &[Value]) -> Result<Option<Vec<Value>>> {
        membership(target, &self.vectors, self.semiring)
    }
}

/// Coefficients `c` with `Σ c_v v = target`, ranging over the carrier.
///
/// Over `rat` and `int` the generators are extended by an identity block,
/// `[v_i | e_i]`, and brought to echelon form. Rows with a nonzero left part
/// then form an echelon basis of the span of the generators whose right
/// parts record how each row was combined.
pub fn membership(target: &[Value], vectors: &[Vec<Value>], s: Semiring) -> Result<Option<Vec<Value>>> {
    let dim = target.len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Shape("generators and target differ in length".into()));
    }
    match s {
        Semiring::Bool => Err(Error::capability(s, "semimodule membership")),
        Semiring::Nat => nat_membership(target, vectors),
        Semiring::Int | Semiring::Rat => {
            let n = vectors.len();
            let mut tracked = EchelonBasis::new(s, dim + n)?;
            for (i, v) in vectors.iter().enumerate() {
                let mut ext = v.clone();
                ext.extend((0..n).map(|j| if i == j { s.one() } else { s.zero() }));
                tracked.insert(&ext);
            }
            let mut rest = target.to_vec();
            let mut coeffs = vec![s.zero(); n];
            for r in tracked.rows() {
                let Some(col) = r[..dim].iter().position(|x| !x.is_zero()) else {
                    continue;
                };
                if rest[col].is_zero() {
                    continue;
                }
                let f = match s {
                    Semiring::Rat => rest[col].mul(&r[col].inverse()?),
                    _ => {
                        let (a, b) = (rest[col].to_integer().expect("int"), r[col].to_integer().expect("int"));
                        if !(&a % &b).is_zero() {
                            return Ok(None);
                        }
                        Value::Int(a / b)
                    }
                };
                for (x, y) in rest.iter_mut().zip(&r[..dim]) {
                    *x = x.sub(&f.mul(y))?;
                }
                for (c, t) in coeffs.iter_mut().zip(&r[dim..]) {
                    *c = c.add(&f.mul(t));
                }
            }
            Ok(rest.iter().all(Value::is_zero).then_some(coeffs))
        }
    }
}

/// All products `(v_1 ⊗ ... ⊗ v_k) μ'(σ)` over tuples of `vs`, in symbol
/// order and then lexicographic tuple order.
fn products(mn: &Wta, vs: &[Vec<Value>]) -> Result<Vec<Vec<Value>>> {
    let s = mn.semiring();
    let mut out = Vec::new();
    let mut digits = vec![0; mn.alphabet().max_rank()];
    for sym in 0..mn.alphabet().len() {
        let k = mn.alphabet().rank_at(sym);
        let count = (vs.len() as u128).pow(k as u32);
        if count > PRODUCT_LIMIT as u128 {
            return Err(Error::Budget(format!(
                "{count} generator tuples for a rank-{k} symbol exceed {PRODUCT_LIMIT}; shrink the inputs"
            )));
        }
        for flat in 0..count as usize {
            tuple_digits(flat, vs.len(), k, &mut digits);
            let parts: Vec<&[Value]> = digits[..k].iter().map(|&i| vs[i].as_slice()).collect();
            out.push(vecmat_raw(&kron_vectors(&parts, s), mn.transition_at(sym)));
        }
    }
    Ok(out)
}

/// Closes `V` for the sum automaton `mn`.
pub fn closure(mn: &Wta) -> Result<GeneratorSet> {
    closure_with(mn, ROUND_LIMIT, &AtomicBool::new(false))
}

fn cancelled() -> Error {
    Error::Budget("cancelled".into())
}

/// [`closure`] with an explicit round cap and cancellation flag.
pub fn closure_with(mn: &Wta, max_rounds: usize, cancel: &AtomicBool) -> Result<GeneratorSet> {
    let s = mn.semiring();
    let dim = mn.num_states();
    let leaves: Vec<Vec<Value>> = (0..mn.alphabet().len())
        .filter(|&sym| mn.alphabet().rank_at(sym) == 0)
        .map(|sym| mn.transition_at(sym).row(0).to_vec())
        .collect();
    match s {
        Semiring::Bool => Err(Error::capability(s, "joint reduction")),
        Semiring::Int | Semiring::Rat => {
            let mut basis = EchelonBasis::new(s, dim)?;
            for v in &leaves {
                basis.insert(v);
            }
            let mut rounds = 0;
            loop {
                if cancel.load(Ordering::Relaxed) {
                    return Err(cancelled());
                }
                if rounds == max_rounds {
                    return Err(cap_hit(max_rounds, basis.rows()));
                }
                rounds += 1;
                let snapshot = basis.rows().to_vec();
                let mut grew = false;
                for p in products(mn, &snapshot)? {
                    grew |= basis.insert(&p);
                }
                if !grew {
                    return Ok(GeneratorSet {
                        vectors: basis.rows().to_vec(),
                        semiring: s,
                        closed: true,
                        iterations: rounds,
                    });
                }
            }
        }
        Semiring::Nat => {
            let mut vs: Vec<Vec<Value>> = Vec::new();
            for v in leaves {
                if !v.iter().all(Value::is_zero) && !vs.contains(&v) {
                    vs.push(v);
                }
            }
            // the generated semimodule only grows, so members stay members
            let mut members: HashSet<Vec<Value>> = HashSet::new();
            let mut rounds = 0;
            loop {
                if cancel.load(Ordering::Relaxed) {
                    return Err(cancelled());
                }
                if rounds == max_rounds {
                    return Err(cap_hit(max_rounds, &vs));
                }
                rounds += 1;
                vs = reduce_nat(vs);
                let snapshot = vs.clone();
                let mut grew = false;
                for p in products(mn, &snapshot)? {
                    if p.iter().all(Value::is_zero) || members.contains(&p) {
                        continue;
                    }
                    if cancel.load(Ordering::Relaxed) {
                        return Err(cancelled());
                    }
                    // a search that runs out of budget adds the product; the
                    // round with no additions has proven every product a member
                    match nat_membership_within(&p, &vs, CLOSURE_SEARCH_LIMIT) {
                        Ok(Some(_)) => {
                            members.insert(p);
                        }
                        Ok(None) | Err(Error::Budget(_)) => {
                            vs.push(p);
                            vs = reduce_nat(vs);
                            grew = true;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if !grew {
                    return Ok(GeneratorSet {
                        vectors: vs,
                        semiring: s,
                        closed: true,
                        iterations: rounds,
                    });
                }
            }
        }
    }
}

fn cap_hit(rounds: usize, vs: &[Vec<Value>]) -> Error {
    let dump: Vec<String> = vs
        .iter()
        .map(|v| format!("({})", v.iter().map(Value::to_string).collect::<Vec<_>>().join(" ")))
        .collect();
    Error::Budget(format!(
        "closure did not stabilize within {rounds} rounds; current generators: {}",
        dump.join(", ")
    ))
}

/// `M''` with `M'' →X1 M` and `M'' →X2 N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Joiner {
    pub wta: Wta,
    pub x1: Matrix,
    pub x2: Matrix,
}

/// Outcome of [`decide_equiv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent { witness: Option<Tree> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JointStats {
    pub closure_iterations: usize,
    pub generators: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointResult {
    pub verdict: Verdict,
    pub joiner: Option<Joiner>,
    pub stats: Option<JointStats>,
    /// Set when the verdict carries no witness.
    pub note: Option<String>,
}

/// First `v ∈ V` with `v_1 F ≠ v_2 G`, if any.
pub fn property_ii_violation(v: &GeneratorSet, m: &Wta, n: &Wta) -> Option<usize> {
    let s = m.semiring();
    let qn = m.num_states();
    v.vectors.iter().position(|v| {
        dot_raw(&v[..qn], m.final_weights().entries(), s) != dot_raw(&v[qn..], n.final_weights().entries(), s)
    })
}

/// Builds `M'' = (Σ, V, ν', G'')` from a closed `V` of `M + N`, or returns
/// `None` when property (ii) fails.
///
/// Panics if a product of generators is not a member of `⟨V⟩`, since that
/// means `V` was not closed.
pub fn build_joiner(mn: &Wta, v: &GeneratorSet, m: &Wta, n: &Wta) -> Result<Option<Joiner>> {
    check_compatible(m, n)?;
    if mn.num_states() != m.num_states() + n.num_states() {
        return Err(Error::Input("the first automaton must be the sum of the other two".into()));
    }
    if !v.closed {
        return Err(Error::Precondition("generator set is not closed".into()));
    }
    if property_ii_violation(v, m, n).is_some() {
        return Ok(None);
    }
    let s = m.semiring();
    let qn = m.num_states();
    let states = IndexSet::from_names((0..v.len()).map(|i| format!("v{i}")))?;
    let mut digits = vec![0; m.alphabet().max_rank()];
    let mut transitions = Vec::with_capacity(m.alphabet().len());
    for sym in 0..m.alphabet().len() {
        let k = m.alphabet().rank_at(sym);
        let rows = states.power(k);
        let mut data = Vec::with_capacity(rows.len() * v.len());
        for flat in 0..rows.len() {
            tuple_digits(flat, v.len(), k, &mut digits);
            let parts: Vec<&[Value]> = digits[..k].iter().map(|&i| v.vectors[i].as_slice()).collect();
            let target = vecmat_raw(&kron_vectors(&parts, s), mn.transition_at(sym));
            let coeffs = v
                .membership(&target)?
                .unwrap_or_else(|| panic!("product of generators for `{}` left the closed set", m.alphabet().name(sym)));
            data.extend(coeffs);
        }
        transitions.push(Matrix::new(rows, states.clone(), data, s)?);
    }
    let finals = v
        .vectors
        .iter()
        .map(|x| dot_raw(&x[..qn], m.final_weights().entries(), s))
        .collect();
    let wta = Wta::new(m.alphabet().clone(), states.clone(), transitions, Vector::new(states.clone(), finals)?, s)?;
    let x1 = Matrix::new(
        states.clone(),
        m.states().clone(),
        v.vectors.iter().flat_map(|x| x[..qn].to_vec()).collect(),
        s,
    )?;
    let x2 = Matrix::new(
        states,
        n.states().clone(),
        v.vectors.iter().flat_map(|x| x[qn..].to_vec()).collect(),
        s,
    )?;
    for (target, x, name) in [(m, &x1, "M"), (n, &x2, "N")] {
        if let Some(violation) = check_simulation(&wta, target, x)?.violation {
            panic!("joiner does not simulate {name}: {violation}");
        }
    }
    Ok(Some(Joiner { wta, x1, x2 }))
}

/// Smallest tree (in enumeration order) on which `m` and `n` differ, looking
/// at sizes up to `max_size`; the second value is the largest size searched.
pub fn find_witness(m: &Wta, n: &Wta, max_size: usize, cancel: &AtomicBool) -> (Option<Tree>, usize) {
    let mut bank = TreeBank::new(m.alphabet(), 0);
    let mut em = BankEvaluator::new(m);
    let mut en = BankEvaluator::new(n);
    while bank.max_size() < max_size {
        if cancel.load(Ordering::Relaxed) {
            break;
        }
        let mut next = bank.clone();
        next.grow();
        if next.len() > WITNESS_TREE_LIMIT {
            break;
        }
        bank = next;
        em.extend(&bank);
        en.extend(&bank);
        for id in bank.ids_of_size(bank.max_size()) {
            if em.weight(id) != en.weight(id) {
                return (Some(bank.tree(id)), bank.max_size());
            }
        }
    }
    (None, bank.max_size())
}

/// Joint reduction of `M + N` followed by the joiner construction.
pub fn joint_reduce(m: &Wta, n: &Wta) -> Result<(GeneratorSet, Option<Joiner>)> {
    joint_reduce_with(m, n, &AtomicBool::new(false))
}

fn joint_reduce_with(m: &Wta, n: &Wta, cancel: &AtomicBool) -> Result<(GeneratorSet, Option<Joiner>)> {
    check_compatible(m, n)?;
    let s = m.semiring();
    if s == Semiring::Bool {
        return Err(Error::capability(s, "joint reduction"));
    }
    let mn = sum_wta(m, n)?;
    let v = closure_with(&mn, ROUND_LIMIT, cancel)?;
    let joiner = build_joiner(&mn, &v, m, n)?;
    Ok((v, joiner))
}

/// Decides `⟦M⟧ = ⟦N⟧` by running joint reduction and a witness search side
/// by side.
///
/// The witness search covers trees up to `|Q| + |P| + 2` nodes. A witness is
/// always the first differing tree in enumeration order, so the result does
/// not depend on thread timing.
pub fn decide_equiv(m: &Wta, n: &Wta) -> Result<JointResult> {
    check_compatible(m, n)?;
    let s = m.semiring();
    if s == Semiring::Bool {
        return Err(Error::capability(s, "equivalence by joint reduction"));
    }
    let cap = m.num_states() + n.num_states() + 2;
    let stop_witness = AtomicBool::new(false);
    let stop_reduction = AtomicBool::new(false);
    let (reduced, (witness, searched)) = std::thread::scope(|scope| {
        let reduction = scope.spawn(|| {
            let out = joint_reduce_with(m, n, &stop_reduction);
            if matches!(out, Ok((_, Some(_)))) {
                stop_witness.store(true, Ordering::Relaxed);
            }
            out
        });
        let search = scope.spawn(|| {
            let found = find_witness(m, n, cap, &stop_witness);
            if found.0.is_some() {
                stop_reduction.store(true, Ordering::Relaxed);
            }
            found
        });
        (
            reduction.join().expect("reduction task panicked"),
            search.join().expect("witness task panicked"),
        )
    });
    if let Some(t) = witness {
        return Ok(JointResult {
            verdict: Verdict::NotEquivalent { witness: Some(t) },
            joiner: None,
            stats: None,
            note: None,
        });
    }
    let (v, joiner) = reduced?;
    Ok(match joiner {
        Some(j) => JointResult {
            verdict: Verdict::Equivalent,
            joiner: Some(j),
            stats: Some(JointStats {
                closure_iterations: v.iterations,
                generators: v.len(),
            }),
            note: None,
        },
        None => JointResult {
            verdict: Verdict::NotEquivalent { witness: None },
            joiner: None,
            stats: None,
            note: Some(format!(
                "a generator violates v1·F = v2·G, but no differing tree has at most {searched} nodes"
            )),
        },
    })
}
