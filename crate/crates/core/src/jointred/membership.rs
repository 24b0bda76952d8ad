//! Semimodule membership over `rat`, `int` and `nat`.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::semiring::{Semiring, Value};

/// Upper bound on search nodes for one `nat` membership query.
pub const NAT_SEARCH_LIMIT: usize = 2_000_000;

/// Row-echelon basis over `rat`, Hermite basis over `int`.
///
/// Rows are kept sorted by pivot column; every row is zero left of its
/// pivot and over `int` the pivot is positive. Membership is decided and
/// coefficients recovered by eliminating the target left to right.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    semiring: Semiring,
    dim: usize,
    rows: Vec<Vec<Value>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(semiring: Semiring, dim: usize) -> Result<Self> {
        if !matches!(semiring, Semiring::Rat | Semiring::Int) {
            return Err(Error::capability(semiring, "echelon bases"));
        }
        Ok(EchelonBasis {
            semiring,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        })
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients `c` with `Σ c_i rows[i] = target`, if any.
    pub fn solve(&self, target: &[Value]) -> Option<Vec<Value>> {
        assert_eq!(target.len(), self.dim, "target has the wrong dimension");
        let s = self.semiring;
        let mut rest = target.to_vec();
        let mut coeffs = vec![s.zero(); self.rows.len()];
        let mut next = 0;
        for col in 0..self.dim {
            while next < self.pivots.len() && self.pivots[next] < col {
                next += 1;
            }
            if rest[col].is_zero() {
                continue;
            }
            if next == self.pivots.len() || self.pivots[next] != col {
                return None;
            }
            let f = exact_quotient(&rest[col], &self.rows[next][col])?;
            for (r, b) in rest.iter_mut().zip(&self.rows[next]) {
                *r = r.sub(&f.mul(b)).expect("ring");
            }
            coeffs[next] = f;
        }
        Some(coeffs)
    }

    pub fn contains(&self, target: &[Value]) -> bool {
        self.solve(target).is_some()
    }

    /// Adds `v` to the generated space or lattice; returns whether it grew.
    pub fn insert(&mut self, v: &[Value]) -> bool {
        assert_eq!(v.len(), self.dim, "vector has the wrong dimension");
        if self.contains(v) {
            return false;
        }
        let mut v = v.to_vec();
        let mut col = 0;
        while col < self.dim {
            if v[col].is_zero() {
                col += 1;
                continue;
            }
            match self.pivots.iter().position(|&p| p == col) {
                None => {
                    if self.semiring == Semiring::Int && v[col].to_rational().is_negative() {
                        v = v.iter().map(|x| x.neg().expect("ring")).collect();
                    }
                    let at = self.pivots.iter().position(|&p| p > col).unwrap_or(self.pivots.len());
                    self.pivots.insert(at, col);
                    self.rows.insert(at, v);
                    self.normalize(at);
                    return true;
                }
                Some(i) => {
                    let (merged, rest) = self.merge(&self.rows[i], &v, col);
                    self.rows[i] = merged;
                    self.normalize(i);
                    v = rest;
                    col += 1;
                }
            }
        }
        true
    }

    /// Combines `r` and `v`, both zero left of `col` with `r[col] ≠ 0`, into
    /// a row with pivot `col` and a remainder vanishing at `col`.
    fn merge(&self, r: &[Value], v: &[Value], col: usize) -> (Vec<Value>, Vec<Value>) {
        match self.semiring {
            Semiring::Rat => {
                let f = v[col].mul(&r[col].inverse().expect("nonzero pivot"));
                let rest = v.iter().zip(r).map(|(a, b)| a.sub(&f.mul(b)).expect("ring")).collect();
                (r.to_vec(), rest)
            }
            _ => {
                let (x, y) = (int(&r[col]), int(&v[col]));
                let e = x.extended_gcd(&y);
                let g = e.gcd;
                let (a, b) = (Value::Int(e.x), Value::Int(e.y));
                let (rx, vy) = (Value::Int(&x / &g), Value::Int(&y / &g));
                let merged = r.iter().zip(v).map(|(p, q)| a.mul(p).add(&b.mul(q))).collect();
                let rest = r.iter().zip(v).map(|(p, q)| vy.mul(p).sub(&rx.mul(q)).expect("ring")).collect();
                (merged, rest)
            }
        }
    }

    /// Makes an `int` pivot positive and reduces the entries above it.
    fn normalize(&mut self, i: usize) {
        if self.semiring != Semiring::Int {
            return;
        }
        let col = self.pivots[i];
        if self.rows[i][col].to_rational().is_negative() {
            self.rows[i] = self.rows[i].iter().map(|x| x.neg().expect("ring")).collect();
        }
        let pivot = int(&self.rows[i][col]);
        for j in 0..i {
            let q = Value::Int(int(&self.rows[j][col]).div_floor(&pivot));
            if q.is_zero() {
                continue;
            }
            let row = self.rows[i].clone();
            for (a, b) in self.rows[j].iter_mut().zip(&row) {
                *a = a.sub(&q.mul(b)).expect("ring");
            }
        }
    }
}

fn int(v: &Value) -> BigInt {
    v.to_integer().expect("integer entry")
}

/// `a / b` when it lies in the carrier.
fn exact_quotient(a: &Value, b: &Value) -> Option<Value> {
    match (a, b) {
        (Value::Rat(_), Value::Rat(_)) => Some(a.mul(&b.inverse().ok()?)),
        (Value::Int(x), Value::Int(y)) => {
            let (q, r) = x.div_rem(y);
            r.is_zero().then_some(Value::Int(q))
        }
        _ => None,
    }
}

fn nat(v: &Value) -> &BigInt {
    match v {
        Value::Nat(n) => n,
        _ => panic!("expected a natural number"),
    }
}

/// `(component sum, lexicographic)` order used by [`reduce_nat`].
pub fn nat_order(a: &[Value], b: &[Value]) -> Ordering {
    let sa: BigInt = a.iter().map(nat).sum();
    let sb: BigInt = b.iter().map(nat).sum();
    sa.cmp(&sb).then_with(|| a.iter().map(nat).cmp(b.iter().map(nat)))
}

fn leq(a: &[Value], b: &[Value]) -> bool {
    a.iter().zip(b).all(|(x, y)| nat(x) <= nat(y))
}

/// Replaces `v'` by `v' - v` whenever `v ≤ v'` until no two vectors are
/// comparable; zero vectors are dropped.
///
/// Each pass sorts ascending by component sum, then lexicographically, and
/// rewrites the first comparable pair `(v, v')` found in that order.
pub fn reduce_nat(vectors: Vec<Vec<Value>>) -> Vec<Vec<Value>> {
    let mut vs: Vec<Vec<Value>> = vectors.into_iter().filter(|v| !v.iter().all(Value::is_zero)).collect();
    loop {
        vs.sort_by(|a, b| nat_order(a, b));
        let pair = (0..vs.len())
            .flat_map(|i| (0..vs.len()).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && leq(&vs[i], &vs[j]));
        let Some((i, j)) = pair else {
            return vs;
        };
        let smaller = vs[i].clone();
        for (a, b) in vs[j].iter_mut().zip(&smaller) {
            *a = a.monus(b);
        }
        if vs[j].iter().all(Value::is_zero) {
            vs.remove(j);
        }
    }
}

/// Natural coefficients `c` with `Σ c_v v = target`, or `None`.
///
/// Only generators `v ≤ target` can take part, and targets outside their
/// rational span are rejected at once. The search then repeatedly picks the
/// positive coordinate of the remainder met by the fewest usable generators,
/// enumerates the coefficients of exactly those generators that hit the
/// coordinate on the nose, and recurses without them. Dead
/// `(remainder, generators left)` states are memoized.
pub fn nat_membership(target: &[Value], vectors: &[Vec<Value>]) -> Result<Option<Vec<Value>>> {
    nat_membership_within(target, vectors, NAT_SEARCH_LIMIT)
}

/// [`nat_membership`] with an explicit node budget.
pub fn nat_membership_within(target: &[Value], vectors: &[Vec<Value>], limit: usize) -> Result<Option<Vec<Value>>> {
    if vectors.iter().any(|v| v.iter().all(Value::is_zero)) {
        return Err(Error::Input("generators must be nonzero".into()));
    }
    let zero = || Value::Nat(BigInt::zero());
    let t: Vec<BigInt> = target.iter().map(|v| nat(v).clone()).collect();
    if t.iter().all(Zero::is_zero) {
        return Ok(Some(vec![zero(); vectors.len()]));
    }
    let mut candidates: Vec<usize> = (0..vectors.len()).filter(|&i| leq(&vectors[i], target)).collect();

    let as_rat = |v: &[Value]| -> Vec<Value> { v.iter().map(|x| Value::Rat(x.to_rational())).collect() };
    let mut span = EchelonBasis::new(Semiring::Rat, t.len())?;
    for &i in &candidates {
        span.insert(&as_rat(&vectors[i]));
    }
    if !span.contains(&as_rat(target)) {
        return Ok(None);
    }

    candidates.sort_by(|&a, &b| nat_order(&vectors[b], &vectors[a]).then(a.cmp(&b)));
    let vs: Vec<Vec<BigInt>> = candidates
        .iter()
        .map(|&i| vectors[i].iter().map(|x| nat(x).clone()).collect())
        .collect();
    let mut search = NatSearch {
        vs: &vs,
        coeffs: vec![BigInt::zero(); vs.len()],
        dead: HashSet::new(),
        nodes: 0,
        limit,
    };
    let alive = vec![true; vs.len()];
    if !search.run(&t, &alive)? {
        return Ok(None);
    }
    let mut out = vec![zero(); vectors.len()];
    for (&i, c) in candidates.iter().zip(search.coeffs) {
        out[i] = Value::Nat(c);
    }
    Ok(Some(out))
}

struct NatSearch<'a> {
    vs: &'a [Vec<BigInt>],
    coeffs: Vec<BigInt>,
    dead: HashSet<(Vec<BigInt>, Vec<bool>)>,
    nodes: usize,
    limit: usize,
}

impl NatSearch<'_> {
    fn fits(v: &[BigInt], rest: &[BigInt]) -> bool {
        v.iter().zip(rest).all(|(x, r)| x <= r)
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Budget(format!(
                "natural membership search exceeded {} nodes",
                self.limit
            )));
        }
        Ok(())
    }

    /// Solves `rest` with the generators flagged in `alive`; on success their
    /// entries of `coeffs` hold the solution.
    fn run(&mut self, rest: &[BigInt], alive: &[bool]) -> Result<bool> {
        for (c, _) in self.coeffs.iter_mut().zip(alive).filter(|(_, a)| **a) {
            *c = BigInt::zero();
        }
        if rest.iter().all(Zero::is_zero) {
            return Ok(true);
        }
        let alive: Vec<bool> = (0..self.vs.len()).map(|j| alive[j] && Self::fits(&self.vs[j], rest)).collect();
        let key = (rest.to_vec(), alive.clone());
        if self.dead.contains(&key) {
            return Ok(false);
        }
        self.tick()?;
        // the positive coordinate met by the fewest generators, then the smallest
        let mut best: Option<(usize, usize)> = None;
        for (c, r) in rest.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let count = (0..self.vs.len()).filter(|&j| alive[j] && !self.vs[j][c].is_zero()).count();
            if count == 0 {
                self.dead.insert(key);
                return Ok(false);
            }
            let better = match best {
                None => true,
                Some((bc, bn)) => count < bn || (count == bn && r < &rest[bc]),
            };
            if better {
                best = Some((c, count));
            }
        }
        let (coord, _) = best.expect("a positive coordinate");
        let group: Vec<usize> = (0..self.vs.len()).filter(|&j| alive[j] && !self.vs[j][coord].is_zero()).collect();
        let mut next_alive = alive.clone();
        for &j in &group {
            next_alive[j] = false;
        }
        let found = self.assign(coord, &group, 0, rest.to_vec(), &next_alive)?;
        if !found {
            self.dead.insert(key);
        }
        Ok(found)
    }

    /// Chooses coefficients for `group[g..]` so that coordinate `coord` of
    /// `rest` reaches zero, then solves what remains with `alive`.
    fn assign(&mut self, coord: usize, group: &[usize], g: usize, rest: Vec<BigInt>, alive: &[bool]) -> Result<bool> {
        if g == group.len() {
            return if rest[coord].is_zero() { self.run(&rest, alive) } else { Ok(false) };
        }
        let j = group[g];
        let v = &self.vs[j];
        let mut c = v
            .iter()
            .zip(&rest)
            .filter(|(x, _)| !x.is_zero())
            .map(|(x, r)| r / x)
            .min()
            .expect("nonzero generator");
        if g + 1 == group.len() {
            // the last generator must close the coordinate exactly
            let (q, r) = rest[coord].div_rem(&v[coord]);
            if !r.is_zero() || q > c {
                return Ok(false);
            }
            c = q;
        }
        loop {
            self.tick()?;
            let next: Vec<BigInt> = rest.iter().zip(v).map(|(r, x)| r - &c * x).collect();
            self.coeffs[j] = c.clone();
            if self.assign(coord, group, g + 1, next, alive)? {
                return Ok(true);
            }
            if c.is_zero() || g + 1 == group.len() {
                break;
            }
            c -= BigInt::one();
        }
        Ok(false)
    }
}
