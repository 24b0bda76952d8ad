//! Random automata and simulations for tests and benchmarks.
//!
//! Simulations are produced from their simplest shapes: forward splits
//! (`M →X_ρ N`), backward splits (`N →X_ρ^T M`) and invertible diagonal
//! rescalings. Chains of these give general transfer matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::{tuple_digits, IndexSet, Matrix, Vector};
use crate::semiring::{Semiring, Value};
use crate::wta::{RankedAlphabet, Wta};

/// `{alpha: 0, sigma: 2}`.
pub fn binary_alphabet() -> RankedAlphabet {
    RankedAlphabet::new([("alpha", 0), ("sigma", 2)]).expect("distinct symbols")
}

/// `{alpha: 0, beta: 0, gamma: 1, sigma: 2}`.
pub fn mixed_alphabet() -> RankedAlphabet {
    RankedAlphabet::new([("alpha", 0), ("beta", 0), ("gamma", 1), ("sigma", 2)]).expect("distinct symbols")
}

/// A small random scalar; zero is possible.
pub fn random_value<R: Rng>(rng: &mut R, s: Semiring) -> Value {
    match s {
        Semiring::Bool => Value::Bool(rng.gen()),
        Semiring::Nat => Value::Nat(BigInt::from(rng.gen_range(0..=3))),
        Semiring::Int => Value::Int(BigInt::from(rng.gen_range(-3..=3))),
        Semiring::Rat => Value::Rat(BigRational::new(
            BigInt::from(rng.gen_range(-3..=3)),
            BigInt::from(rng.gen_range(1..=3)),
        )),
    }
}

/// A small random nonzero scalar.
pub fn random_nonzero<R: Rng>(rng: &mut R, s: Semiring) -> Value {
    loop {
        let v = random_value(rng, s);
        if !v.is_zero() {
            return v;
        }
    }
}

/// A random multiplicative unit.
pub fn random_unit<R: Rng>(rng: &mut R, s: Semiring) -> Value {
    match s {
        Semiring::Bool | Semiring::Nat => s.one(),
        Semiring::Int => Value::Int(BigInt::from(if rng.gen() { 1 } else { -1 })),
        Semiring::Rat => random_nonzero(rng, s),
    }
}

/// Each entry of each transition is nonzero with probability `density`.
pub fn random_wta<R: Rng>(rng: &mut R, s: Semiring, alphabet: &RankedAlphabet, states: usize, density: f64) -> Wta {
    let names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let index = IndexSet::from_names(names).expect("distinct names");
    let pick = |rng: &mut R| {
        if rng.gen_bool(density) {
            random_nonzero(rng, s)
        } else {
            s.zero()
        }
    };
    let transitions = (0..alphabet.len())
        .map(|i| {
            let rows = index.power(alphabet.rank_at(i));
            let data = (0..rows.len() * states).map(|_| pick(rng)).collect();
            Matrix::new(rows, index.clone(), data, s).expect("shape")
        })
        .collect();
    let finals = (0..states).map(|_| pick(rng)).collect();
    Wta::new(
        alphabet.clone(),
        index.clone(),
        transitions,
        Vector::new(index, finals).expect("shape"),
        s,
    )
    .expect("consistent automaton")
}

/// Random `x_1 + ... + x_parts = v`, with every part in the carrier.
pub fn random_split<R: Rng>(rng: &mut R, v: &Value, parts: usize) -> Vec<Value> {
    let s = v.semiring();
    assert!(parts > 0);
    match v {
        Value::Bool(b) => {
            let mut out: Vec<Value> = (0..parts).map(|_| Value::Bool(*b && rng.gen())).collect();
            if *b && out.iter().all(Value::is_zero) {
                out[rng.gen_range(0..parts)] = Value::Bool(true);
            }
            out
        }
        Value::Nat(n) => {
            let mut rest = n.to_u64().expect("small generator values");
            let mut out = Vec::with_capacity(parts);
            for _ in 1..parts {
                let x = rng.gen_range(0..=rest);
                rest -= x;
                out.push(Value::Nat(BigInt::from(x)));
            }
            out.push(Value::Nat(BigInt::from(rest)));
            out.shuffle(rng);
            out
        }
        Value::Int(_) | Value::Rat(_) => {
            let mut out: Vec<Value> = (1..parts)
                .map(|_| if rng.gen_bool(0.5) { s.zero() } else { random_value(rng, s) })
                .collect();
            let sum = out.iter().fold(s.zero(), |acc, x| acc.add(x));
            out.push(v.sub(&sum).expect("ring"));
            out.shuffle(rng);
            out
        }
    }
}

/// A surjection `Q → P` with `|Q| = |P| + extra`.
pub fn random_surjection<R: Rng>(rng: &mut R, p: usize, extra: usize) -> Vec<usize> {
    let mut rho: Vec<usize> = (0..p).collect();
    rho.extend((0..extra).map(|_| rng.gen_range(0..p)));
    rho.shuffle(rng);
    rho
}

fn split_names(n: &Wta, rho: &[usize]) -> IndexSet {
    let mut seen = vec![0usize; n.num_states()];
    let names: Vec<String> = rho
        .iter()
        .map(|&p| {
            seen[p] += 1;
            format!("{}_{}", n.states().names()[p], seen[p])
        })
        .collect();
    IndexSet::from_names(names).expect("distinct names")
}

fn image_row(row: usize, qn: usize, pn: usize, k: usize, rho: &[usize], digits: &mut [usize]) -> usize {
    tuple_digits(row, qn, k, digits);
    digits[..k].iter().fold(0, |acc, &q| acc * pn + rho[q])
}

/// `M` with `M →X_ρ N` a forward simulation; `|Q| = |P| + extra`.
///
/// Every row of `μ(σ)` distributes `ν(σ)_{ρ(w), p}` over the preimages of `p`.
pub fn forward_split<R: Rng>(rng: &mut R, n: &Wta, extra: usize) -> (Wta, Vec<usize>) {
    let s = n.semiring();
    let pn = n.num_states();
    let rho = random_surjection(rng, pn, extra);
    let qn = rho.len();
    let states = split_names(n, &rho);
    let pre: Vec<Vec<usize>> = (0..pn).map(|p| (0..qn).filter(|&q| rho[q] == p).collect()).collect();
    let mut digits = vec![0; n.alphabet().max_rank()];
    let transitions = (0..n.alphabet().len())
        .map(|sym| {
            let k = n.alphabet().rank_at(sym);
            let nu = n.transition_at(sym);
            let rows = states.power(k);
            let mut mu = Matrix::zeros(rows.clone(), states.clone(), s);
            for row in 0..rows.len() {
                let prow = image_row(row, qn, pn, k, &rho, &mut digits);
                for (p, qs) in pre.iter().enumerate() {
                    for (&q, v) in qs.iter().zip(random_split(rng, nu.get(prow, p), qs.len())) {
                        mu.set(row, q, v);
                    }
                }
            }
            mu
        })
        .collect();
    let finals = rho.iter().map(|&p| n.final_weights().get(p).clone()).collect();
    let m = Wta::new(
        n.alphabet().clone(),
        states.clone(),
        transitions,
        Vector::new(states, finals).expect("shape"),
        s,
    )
    .expect("consistent automaton");
    (m, rho)
}

/// `M` with `N →X_ρ^T M`, i.e. `ρ` is a backward simulation from `M` to `N`.
///
/// Every column of `μ(σ)` distributes `ν(σ)_{v, ρ(q)}` over the rows `w`
/// with `ρ(w) = v`.
pub fn backward_split<R: Rng>(rng: &mut R, n: &Wta, extra: usize) -> (Wta, Vec<usize>) {
    let s = n.semiring();
    let pn = n.num_states();
    let rho = random_surjection(rng, pn, extra);
    let qn = rho.len();
    let states = split_names(n, &rho);
    let mut digits = vec![0; n.alphabet().max_rank()];
    let transitions = (0..n.alphabet().len())
        .map(|sym| {
            let k = n.alphabet().rank_at(sym);
            let nu = n.transition_at(sym);
            let rows = states.power(k);
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); nu.nrows()];
            for row in 0..rows.len() {
                groups[image_row(row, qn, pn, k, &rho, &mut digits)].push(row);
            }
            let mut mu = Matrix::zeros(rows, states.clone(), s);
            for (v, ws) in groups.iter().enumerate() {
                for q in 0..qn {
                    for (&w, x) in ws.iter().zip(random_split(rng, nu.get(v, rho[q]), ws.len())) {
                        mu.set(w, q, x);
                    }
                }
            }
            mu
        })
        .collect();
    let mut finals = vec![s.zero(); qn];
    let pre: Vec<Vec<usize>> = (0..pn).map(|p| (0..qn).filter(|&q| rho[q] == p).collect()).collect();
    for (p, qs) in pre.iter().enumerate() {
        for (&q, x) in qs.iter().zip(random_split(rng, n.final_weights().get(p), qs.len())) {
            finals[q] = x;
        }
    }
    let m = Wta::new(
        n.alphabet().clone(),
        states.clone(),
        transitions,
        Vector::new(states, finals).expect("shape"),
        s,
    )
    .expect("consistent automaton");
    (m, rho)
}

/// `M'` and `E` with `M →E M'`: `F' = E^{-1}F` and `μ' = (E^{k,⊗})^{-1} μ E`.
pub fn diagonal_scaling<R: Rng>(rng: &mut R, m: &Wta) -> (Wta, Matrix) {
    let s = m.semiring();
    let qn = m.num_states();
    let diag: Vec<Value> = (0..qn).map(|_| random_unit(rng, s)).collect();
    let inv: Vec<Value> = diag.iter().map(|d| d.inverse().expect("unit")).collect();
    let mut e = Matrix::zeros(m.states().clone(), m.states().clone(), s);
    for (i, d) in diag.iter().enumerate() {
        e.set(i, i, d.clone());
    }
    let mut digits = vec![0; m.alphabet().max_rank()];
    let transitions = (0..m.alphabet().len())
        .map(|sym| {
            let k = m.alphabet().rank_at(sym);
            let mu = m.transition_at(sym);
            let mut out = mu.clone();
            for row in 0..mu.nrows() {
                tuple_digits(row, qn, k, &mut digits);
                let left = digits[..k].iter().fold(s.one(), |acc, &i| acc.mul(&inv[i]));
                for q in 0..qn {
                    out.set(row, q, left.mul(mu.get(row, q)).mul(&diag[q]));
                }
            }
            out
        })
        .collect();
    let finals = (0..qn).map(|q| inv[q].mul(m.final_weights().get(q))).collect();
    let scaled = Wta::new(
        m.alphabet().clone(),
        m.states().clone(),
        transitions,
        Vector::new(m.states().clone(), finals).expect("shape"),
        s,
    )
    .expect("consistent automaton");
    (scaled, e)
}

/// A random simulation `M →X N` built from one to three elementary steps
/// ending at `n`. The returned `M` has at most `n.num_states() + 2` states.
pub fn random_simulation_into<R: Rng>(rng: &mut R, n: &Wta) -> (Wta, Matrix) {
    let s = n.semiring();
    let mut target = n.clone();
    let mut x = Matrix::identity(n.states().clone(), s);
    let steps = rng.gen_range(1..=3);
    let mut budget = 2;
    for _ in 0..steps {
        match rng.gen_range(0..2) {
            0 if budget > 0 => {
                let extra = rng.gen_range(1..=budget);
                budget -= extra;
                let (m, rho) = forward_split(rng, &target, extra);
                let step = Matrix::from_function(m.states().clone(), target.states().clone(), &rho, s).expect("map");
                x = step.matmul(&x).expect("composable");
                target = m;
            }
            _ if s != Semiring::Bool => {
                let (scaled, e) = diagonal_scaling(rng, &target);
                // target →E scaled, so use scaled as the new source via E^{-1}
                let inv = e.invert_diagonal().expect("units");
                let inv = inv.relabel(scaled.states().clone(), target.states().clone()).expect("square");
                x = inv.matmul(&x).expect("composable");
                target = scaled;
            }
            _ => {}
        }
    }
    (target, x)
}

/// A random simulation `N →X M` out of `n`, via backward splits and rescalings.
pub fn random_simulation_from<R: Rng>(rng: &mut R, n: &Wta) -> (Wta, Matrix) {
    let s = n.semiring();
    let mut source = n.clone();
    let mut x = Matrix::identity(n.states().clone(), s);
    let mut budget = 2;
    for _ in 0..rng.gen_range(1..=3) {
        if budget > 0 && rng.gen_bool(0.6) {
            let extra = rng.gen_range(1..=budget);
            budget -= extra;
            let (m, rho) = backward_split(rng, &source, extra);
            let step = Matrix::from_function(m.states().clone(), source.states().clone(), &rho, s)
                .expect("map")
                .transpose();
            x = x.matmul(&step).expect("composable");
            source = m;
        } else if s != Semiring::Bool {
            let (scaled, e) = diagonal_scaling(rng, &source);
            let e = e.relabel(source.states().clone(), scaled.states().clone()).expect("square");
            x = x.matmul(&e).expect("composable");
            source = scaled;
        }
    }
    (source, x)
}

/// `M →X N` where `X` mixes both directions: `M → N0 → N`.
pub fn random_simulation<R: Rng>(rng: &mut R, s: Semiring, alphabet: &RankedAlphabet, states: usize) -> (Wta, Wta, Matrix) {
    let base = random_wta(rng, s, alphabet, states, 0.5);
    let (n, y) = random_simulation_from(rng, &base);
    let (m, x) = random_simulation_into(rng, &base);
    let x = x.matmul(&y).expect("composable");
    (m, n, x)
}

/// Changes one transition or final weight to a different value.
pub fn perturb<R: Rng>(rng: &mut R, m: &Wta) -> Wta {
    let s = m.semiring();
    let mut transitions = m.transitions().to_vec();
    let mut finals = m.final_weights().entries().to_vec();
    let slots: usize = transitions.iter().map(|t| t.entries().len()).sum::<usize>() + finals.len();
    let mut pick = rng.gen_range(0..slots);
    let fresh = |rng: &mut R, old: &Value| loop {
        let v = random_value(rng, s);
        if &v != old {
            return v;
        }
    };
    for t in transitions.iter_mut() {
        if pick < t.entries().len() {
            let (i, j) = (pick / t.ncols(), pick % t.ncols());
            let v = fresh(rng, t.get(i, j));
            t.set(i, j, v);
            return Wta::new(m.alphabet().clone(), m.states().clone(), transitions, m.final_weights().clone(), s)
                .expect("same shape");
        }
        pick -= t.entries().len();
    }
    finals[pick] = fresh(rng, &finals[pick]);
    Wta::new(
        m.alphabet().clone(),
        m.states().clone(),
        transitions,
        Vector::new(m.states().clone(), finals).expect("shape"),
        s,
    )
    .expect("same shape")
}

/// Random row and column sums with equal totals, `n × m`.
pub fn random_margins<R: Rng>(rng: &mut R, s: Semiring, n: usize, m: usize) -> (Vec<Value>, Vec<Value>) {
    let rows: Vec<Value> = (0..n).map(|_| random_value(rng, s)).collect();
    let total = rows.iter().fold(s.zero(), |acc, x| acc.add(x));
    let cols = random_split(rng, &total, m);
    (rows, cols)
}

/// Random matrix with entries in `[-5, 5]` (rings) or `[0, 5]` (nat).
pub fn random_matrix<R: Rng>(rng: &mut R, s: Semiring, n: usize, m: usize) -> Matrix {
    let data = (0..n * m)
        .map(|_| match s {
            Semiring::Bool => Value::Bool(rng.gen()),
            Semiring::Nat => Value::Nat(BigInt::from(rng.gen_range(0..=5))),
            Semiring::Int => Value::Int(BigInt::from(rng.gen_range(-5..=5))),
            Semiring::Rat => {
                let r = BigRational::new(BigInt::from(rng.gen_range(-5..=5)), BigInt::from(rng.gen_range(1..=4)));
                Value::Rat(if r.abs() > BigRational::from_integer(5.into()) { r.trunc() } else { r })
            }
        })
        .collect();
    let rows = IndexSet::from_names((0..n).map(|i| format!("r{i}"))).expect("distinct");
    let cols = IndexSet::from_names((0..m).map(|j| format!("c{j}"))).expect("distinct");
    Matrix::new(rows, cols, data, s).expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::{check_backward, check_forward, check_simulation};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn splits_sum_back() {
        let mut rng = StdRng::seed_from_u64(1);
        for s in [Semiring::Bool, Semiring::Nat, Semiring::Int, Semiring::Rat] {
            for _ in 0..50 {
                let v = random_value(&mut rng, s);
                let k = rng.gen_range(1..4);
                let parts = random_split(&mut rng, &v, k);
                assert_eq!(parts.iter().fold(s.zero(), |a, x| a.add(x)), v);
            }
        }
    }

    #[test]
    fn generated_steps_are_simulations() {
        let mut rng = StdRng::seed_from_u64(2);
        let a = mixed_alphabet();
        for s in [Semiring::Nat, Semiring::Int, Semiring::Rat] {
            for _ in 0..10 {
                let n = random_wta(&mut rng, s, &a, 2, 0.6);
                let (m, rho) = forward_split(&mut rng, &n, 1);
                assert!(check_forward(&m, &n, &rho).unwrap());
                let (m, rho) = backward_split(&mut rng, &n, 2);
                assert!(check_backward(&m, &n, &rho).unwrap());
                let (scaled, e) = diagonal_scaling(&mut rng, &n);
                assert!(check_simulation(&n, &scaled, &e).unwrap().holds());
                let (m, n2, x) = random_simulation(&mut rng, s, &a, 2);
                assert!(check_simulation(&m, &n2, &x).unwrap().holds());
            }
        }
    }
}
