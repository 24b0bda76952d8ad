//! Splitting a simulation `M →X N` into `M →C M' →E N' →D N` with `C^T`
//! functional, `E` invertible diagonal and `D` functional.

use super::{check_simulation, conform};
use crate::error::{Error, Result};
use crate::linalg::{tuple_digits, IndexSet, Matrix, Vector};
use crate::semiring::{Semiring, Value};
use crate::wta::Wta;

/// `X = C·E·D` over the index set `J = {(q, i, p)}` of unit summands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitDecomposition {
    /// `Q × J`, with `C^T` functional.
    pub c: Matrix,
    /// `J × J`, invertible diagonal.
    pub e: Matrix,
    /// `J × P`, functional.
    pub d: Matrix,
    /// `φ: J → Q`.
    pub phi: Vec<usize>,
    /// `ψ: J → P`.
    pub psi: Vec<usize>,
}

/// Writes every entry `x_qp` as a sum of units `u_{qp1} + ... + u_{qpℓ}`.
///
/// Nonzero entries use [`Semiring::unit_decompose`]. Zero entries get no
/// summand, except over rings when their whole row or column is zero: then
/// they are written as `1 + (-1)` so that `C^T` and `D` stay surjective.
pub fn decompose_units(x: &Matrix) -> Result<UnitDecomposition> {
    let s = x.semiring();
    s.require_arithmetic("unit decomposition")?;
    let (n, m) = (x.nrows(), x.ncols());
    let zero_row: Vec<bool> = (0..n).map(|q| x.row(q).iter().all(Value::is_zero)).collect();
    let zero_col: Vec<bool> = (0..m).map(|p| (0..n).all(|q| x.get(q, p).is_zero())).collect();

    let mut names = Vec::new();
    let mut units = Vec::new();
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    for q in 0..n {
        for p in 0..m {
            let v = x.get(q, p);
            let parts = if !v.is_zero() || (s.is_ring() && (zero_row[q] || zero_col[p])) {
                s.unit_decompose(v)?
            } else {
                Vec::new()
            };
            for (i, u) in parts.into_iter().enumerate() {
                names.push(format!("{}/{}/{}", x.rows().names()[q], i + 1, x.cols().names()[p]));
                units.push(u);
                phi.push(q);
                psi.push(p);
            }
        }
    }
    let j = IndexSet::from_names(names)?;
    let ct = Matrix::from_function(j.clone(), x.rows().clone(), &phi, s)?;
    let d = Matrix::from_function(j.clone(), x.cols().clone(), &psi, s)?;
    let mut e = Matrix::zeros(j.clone(), j, s);
    for (i, u) in units.into_iter().enumerate() {
        e.set(i, i, u);
    }
    Ok(UnitDecomposition {
        c: ct.transpose(),
        e,
        d,
        phi,
        psi,
    })
}

/// Splits `v` into `v' + y` with `Σv' = a` and `Σy = b`, given `Σv = a + b`.
fn split_sum(s: Semiring, v: &[Value], a: &Value, b: &Value) -> Result<(Vec<Value>, Vec<Value>)> {
    let mut first = Vec::with_capacity(v.len());
    let mut second = Vec::with_capacity(v.len());
    let (mut rem_a, mut rem_b) = (a.clone(), b.clone());
    for (idx, x) in v.iter().enumerate() {
        if idx + 1 == v.len() {
            first.push(rem_a.clone());
            second.push(rem_b.clone());
            break;
        }
        let rest = sum(s, &v[idx + 1..]);
        let (c1, c2, d1, d2) = s.equisubtract(x, &rest, &rem_a, &rem_b)?;
        first.push(c1);
        second.push(d1);
        rem_a = c2;
        rem_b = d2;
    }
    Ok((first, second))
}

fn sum(s: Semiring, v: &[Value]) -> Value {
    v.iter().fold(s.zero(), |acc, x| acc.add(x))
}

/// Row-major `|r| × |c|` matrix with row sums `r` and column sums `c`.
///
/// Peels off the last row and column with one equisubtraction, splits the
/// remaining row and column sums accordingly, and recurses on the inner block.
pub fn fill_raw(s: Semiring, r: &[Value], c: &[Value]) -> Result<Vec<Value>> {
    if !s.capabilities().is_equisubtractive {
        return Err(Error::capability(s, "matrices with prescribed row and column sums"));
    }
    if sum(s, r) != sum(s, c) {
        return Err(Error::Precondition("row sums and column sums have different totals".into()));
    }
    fill_rec(s, r, c)
}

fn fill_rec(s: Semiring, r: &[Value], c: &[Value]) -> Result<Vec<Value>> {
    let (n, m) = (r.len(), c.len());
    if n == 0 || m == 0 {
        if r.iter().chain(c).any(|v| !v.is_zero()) {
            return Err(Error::Precondition("no matrix without rows or columns has nonzero line sums".into()));
        }
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(c.to_vec());
    }
    if m == 1 {
        return Ok(r.to_vec());
    }
    let (r_inner, r_last) = (&r[..n - 1], &r[n - 1]);
    let (c_inner, c_last) = (&c[..m - 1], &c[m - 1]);
    // Σr_inner = a + c'_j, r_i = r'_i + x_ij, Σc_inner = a + r'_i, c_j = c'_j + x_ij
    let (a, r_last_rest, c_last_rest, corner) = s.equisubtract(&sum(s, r_inner), r_last, &sum(s, c_inner), c_last)?;
    let (r_inner_rest, last_col) = split_sum(s, r_inner, &a, &c_last_rest)?;
    let (c_inner_rest, last_row) = split_sum(s, c_inner, &a, &r_last_rest)?;
    let inner = fill_rec(s, &r_inner_rest, &c_inner_rest)?;
    let mut out = Vec::with_capacity(n * m);
    for q in 0..n - 1 {
        out.extend_from_slice(&inner[q * (m - 1)..(q + 1) * (m - 1)]);
        out.push(last_col[q].clone());
    }
    out.extend(last_row);
    out.push(corner);
    Ok(out)
}

/// A matrix indexed by `r`'s and `c`'s index sets with those row and column sums.
pub fn fill_matrix(r: &Vector, c: &Vector) -> Result<Matrix> {
    let s = r
        .entries()
        .first()
        .or(c.entries().first())
        .map(Value::semiring)
        .ok_or_else(|| Error::Input("cannot infer the carrier of two empty vectors".into()))?;
    let data = fill_raw(s, r.entries(), c.entries())?;
    Matrix::new(r.index().clone(), c.index().clone(), data, s)
}

/// The intermediate automata and matrices of a decomposed simulation.
#[derive(Debug, Clone)]
pub struct SimulationDecomposition {
    /// `M' = (Σ, J, μ', EDG)`.
    pub m_prime: Wta,
    /// `N' = (Σ, J, ν', DG)`.
    pub n_prime: Wta,
    pub c: Matrix,
    pub e: Matrix,
    pub d: Matrix,
}

/// Splits `M →X N` into `M →C M' →E N' →D N`.
///
/// For each symbol a matrix `Y ∈ A^{J^k×J}` is assembled block by block:
/// the block of `(q_1..q_k, p)` has rows `φ^{-1}(q_1) × ... × φ^{-1}(q_k)` and
/// columns `ψ^{-1}(p)`, column sums `μ(σ)_{q_1..q_k, φ(i)} e_ii` and row sums
/// `Π e_{i_j i_j} · ν(σ)_{ψ(i_1)..ψ(i_k), p}`. Then `μ'(σ) = Y E^{-1}` and
/// `ν'(σ) = (E^{k,⊗})^{-1} Y`.
pub fn decompose_simulation(m: &Wta, n: &Wta, x: &Matrix) -> Result<SimulationDecomposition> {
    let s = m.semiring();
    let caps = s.capabilities();
    if s == Semiring::Bool || !caps.is_equisubtractive || !caps.is_unit_generated {
        return Err(Error::capability(s, "simulation decomposition"));
    }
    let x = conform(m, n, x)?;
    if let Some(v) = check_simulation(m, n, &x)?.violation {
        return Err(Error::Precondition(format!("not a simulation: {v}")));
    }
    let UnitDecomposition { c, e, d, phi, psi } = decompose_units(&x)?;
    let jset = e.rows().clone();
    let jn = jset.len();
    let (qn, pn) = (m.num_states(), n.num_states());
    let diag: Vec<Value> = (0..jn).map(|i| e.get(i, i).clone()).collect();
    let diag_inv: Vec<Value> = diag.iter().map(Value::inverse).collect::<Result<_>>()?;

    let alphabet = m.alphabet();
    let mut mu_prime = Vec::with_capacity(alphabet.len());
    let mut nu_prime = Vec::with_capacity(alphabet.len());
    let mut digits = vec![0; alphabet.max_rank()];
    for sym in 0..alphabet.len() {
        let k = alphabet.rank_at(sym);
        let mu = m.transition_at(sym);
        let nu = n.transition_at(sym);
        let rows = jset.power(k);
        let mut y = vec![s.zero(); rows.len() * jn];

        // row tuples of J^k grouped by their image under φ, with Π e and ψ-image
        let mut groups: Vec<Vec<(usize, Value, usize)>> = vec![Vec::new(); qn.pow(k as u32)];
        for row in 0..rows.len() {
            tuple_digits(row, jn, k, &mut digits);
            let qrow = digits[..k].iter().fold(0, |acc, &i| acc * qn + phi[i]);
            let prow = digits[..k].iter().fold(0, |acc, &i| acc * pn + psi[i]);
            let weight = digits[..k].iter().fold(s.one(), |acc, &i| acc.mul(&diag[i]));
            groups[qrow].push((row, weight, prow));
        }
        let cols_of: Vec<Vec<usize>> = (0..pn).map(|p| (0..jn).filter(|&i| psi[i] == p).collect()).collect();

        for (qrow, group) in groups.iter().enumerate() {
            for (p, cols) in cols_of.iter().enumerate() {
                let col_sums: Vec<Value> = cols.iter().map(|&i| mu.get(qrow, phi[i]).mul(&diag[i])).collect();
                let row_sums: Vec<Value> = group.iter().map(|(_, w, prow)| w.mul(nu.get(*prow, p))).collect();
                assert_eq!(
                    sum(s, &col_sums),
                    sum(s, &row_sums),
                    "block sums disagree although X is a simulation"
                );
                let block = fill_rec(s, &row_sums, &col_sums)?;
                for (bi, (row, _, _)) in group.iter().enumerate() {
                    for (bj, &col) in cols.iter().enumerate() {
                        y[row * jn + col] = block[bi * cols.len() + bj].clone();
                    }
                }
            }
        }

        let mut mu_p = Vec::with_capacity(y.len());
        let mut nu_p = Vec::with_capacity(y.len());
        for row in 0..rows.len() {
            tuple_digits(row, jn, k, &mut digits);
            let row_inv = digits[..k].iter().fold(s.one(), |acc, &i| acc.mul(&diag_inv[i]));
            for col in 0..jn {
                let v = &y[row * jn + col];
                mu_p.push(v.mul(&diag_inv[col]));
                nu_p.push(row_inv.mul(v));
            }
        }
        mu_prime.push(Matrix::from_parts(rows.clone(), jset.clone(), mu_p, s));
        nu_prime.push(Matrix::from_parts(rows, jset.clone(), nu_p, s));
    }

    let g_prime = Vector::matvec(&d, n.final_weights())?;
    let f_prime = Vector::matvec(&e, &g_prime)?;
    let m_prime = Wta::new(alphabet.clone(), jset.clone(), mu_prime, f_prime, s)?;
    let n_prime = Wta::new(alphabet.clone(), jset, nu_prime, g_prime, s)?;

    for (from, to, t, what) in [(m, &m_prime, &c, "C"), (&m_prime, &n_prime, &e, "E"), (&n_prime, n, &d, "D")] {
        if let Some(v) = check_simulation(from, to, t)?.violation {
            panic!("decomposition step {what} is not a simulation: {v}");
        }
    }
    Ok(SimulationDecomposition {
        m_prime,
        n_prime,
        c,
        e,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wta::RankedAlphabet;

    fn v(s: Semiring, xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| s.from_i64(x).unwrap()).collect()
    }

    fn sums(s: Semiring, data: &[Value], n: usize, m: usize) -> (Vec<Value>, Vec<Value>) {
        let rows = (0..n).map(|i| sum(s, &data[i * m..(i + 1) * m])).collect();
        let cols = (0..m).map(|j| (0..n).fold(s.zero(), |acc, i| acc.add(&data[i * m + j]))).collect();
        (rows, cols)
    }

    #[test]
    fn fill_examples() {
        let s = Semiring::Nat;
        assert_eq!(fill_raw(s, &v(s, &[5]), &v(s, &[5])).unwrap(), v(s, &[5]));
        let x = fill_raw(s, &v(s, &[1, 2]), &v(s, &[2, 1])).unwrap();
        assert_eq!(sums(s, &x, 2, 2), (v(s, &[1, 2]), v(s, &[2, 1])));
        assert_eq!(fill_raw(s, &v(s, &[0, 0]), &v(s, &[0, 0])).unwrap(), v(s, &[0, 0, 0, 0]));
        assert!(matches!(fill_raw(s, &v(s, &[1]), &v(s, &[2])), Err(Error::Precondition(_))));
        assert!(matches!(
            fill_raw(Semiring::Bool, &[Value::Bool(true)], &[Value::Bool(true)]),
            Err(Error::Capability { .. })
        ));
        let i = Semiring::Int;
        assert!(fill_raw(i, &[], &v(i, &[1, -1])).is_err());
        let x = fill_raw(i, &v(i, &[3, -1, 0]), &v(i, &[4, -2])).unwrap();
        assert_eq!(sums(i, &x, 3, 2), (v(i, &[3, -1, 0]), v(i, &[4, -2])));
    }

    fn int(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64_rows(Semiring::Int, rows).unwrap()
    }

    fn check_ced(x: &Matrix, dec: &UnitDecomposition) {
        let back = dec.c.matmul(&dec.e).unwrap().matmul(&dec.d).unwrap();
        assert_eq!(back, *x);
        assert!(dec.c.transpose().classify().functional);
        assert!(dec.d.classify().functional);
        assert!(dec.e.classify().invertible_diagonal);
    }

    #[test]
    fn unit_decomposition_examples() {
        let zero = int(&[&[0]]);
        let dec = decompose_units(&zero).unwrap();
        assert_eq!(dec.e.nrows(), 2);
        assert_eq!(dec.e.get(0, 0), &Value::Int(1.into()));
        assert_eq!(dec.e.get(1, 1), &Value::Int((-1).into()));
        check_ced(&zero, &dec);
        assert!(dec.c.transpose().classify().surjective && dec.d.classify().surjective);

        let three = Matrix::from_i64_rows(Semiring::Nat, &[&[3]]).unwrap();
        let dec = decompose_units(&three).unwrap();
        assert_eq!(dec.e, Matrix::identity(dec.e.rows().clone(), Semiring::Nat));
        assert_eq!(dec.c.entries(), &v(Semiring::Nat, &[1, 1, 1]));
        assert_eq!(dec.d.entries(), &v(Semiring::Nat, &[1, 1, 1]));
        check_ced(&three, &dec);

        let x = int(&[&[1, -1], &[0, 2]]);
        check_ced(&x, &decompose_units(&x).unwrap());

        let b = Matrix::from_i64_rows(Semiring::Bool, &[&[1]]).unwrap();
        assert!(matches!(decompose_units(&b), Err(Error::Capability { .. })));
    }

    fn m_two(s: Semiring) -> Wta {
        let a = RankedAlphabet::new([("alpha", 0), ("sigma", 2)]).unwrap();
        let mut b = Wta::builder(s, a, ["q", "r"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 2).unwrap();
        b.trans_i64("sigma", &["q", "r"], "r", 1).unwrap();
        b.trans_i64("alpha", &[], "r", 1).unwrap();
        b.final_i64("q", 1).unwrap();
        b.final_i64("r", 3).unwrap();
        b.build()
    }

    #[test]
    fn identity_decomposes_trivially() {
        for s in [Semiring::Nat, Semiring::Int, Semiring::Rat] {
            let m = m_two(s);
            let id = Matrix::identity(m.states().clone(), s);
            let dec = decompose_simulation(&m, &m, &id).unwrap();
            assert_eq!(dec.e.nrows(), 2);
            assert!(dec.e.classify().invertible_diagonal);
            assert!(dec.c.classify().functional && dec.d.classify().functional);
            assert_eq!(dec.c.matmul(&dec.e).unwrap().matmul(&dec.d).unwrap(), id);
            assert_eq!(dec.m_prime.transitions()[1].entries(), m.transitions()[1].entries());
        }
    }

    #[test]
    fn scaled_simulation_over_nat() {
        // M = 2-scaled copy: M →(2) N where N has final weight 2·F... use X = (2)
        let a = RankedAlphabet::new([("alpha", 0), ("gamma", 1)]).unwrap();
        let s = Semiring::Nat;
        let mut b = Wta::builder(s, a.clone(), ["q"]).unwrap();
        b.trans_i64("alpha", &[], "q", 2).unwrap();
        b.trans_i64("gamma", &["q"], "q", 3).unwrap();
        b.final_i64("q", 4).unwrap();
        let m = b.build();
        let mut b = Wta::builder(s, a, ["p"]).unwrap();
        b.trans_i64("alpha", &[], "p", 4).unwrap();
        b.trans_i64("gamma", &["p"], "p", 3).unwrap();
        b.final_i64("p", 2).unwrap();
        let n = b.build();
        let x = Matrix::from_i64_rows(s, &[&[2]]).unwrap();
        assert!(check_simulation(&m, &n, &x).unwrap().holds());
        let dec = decompose_simulation(&m, &n, &x).unwrap();
        assert_eq!(dec.m_prime.num_states(), 2);
        assert_eq!(dec.c.matmul(&dec.e).unwrap().matmul(&dec.d).unwrap().entries(), x.entries());
    }

    #[test]
    fn rejects_non_simulations_and_bool() {
        let m = m_two(Semiring::Int);
        let x = int(&[&[1, 0], &[0, 2]]);
        assert!(matches!(decompose_simulation(&m, &m, &x), Err(Error::Precondition(_))));
        let b = m.support();
        let id = Matrix::identity(b.states().clone(), Semiring::Bool);
        assert!(matches!(decompose_simulation(&b, &b, &id), Err(Error::Capability { .. })));
    }
}
