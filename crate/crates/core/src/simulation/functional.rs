//! Forward and backward simulations: surjective state maps `ρ: Q → P`.

use super::check_compatible;
use crate::error::{Error, Result};
use crate::linalg::{tuple_digits, Matrix};
use crate::semiring::Value;
use crate::wta::Wta;

/// Largest `|Q|` accepted by the exhaustive searches.
pub const FIND_STATE_LIMIT: usize = 8;

fn check_map(m: &Wta, n: &Wta, rho: &[usize]) -> Result<()> {
    check_compatible(m, n)?;
    if rho.len() != m.num_states() || rho.iter().any(|&p| p >= n.num_states()) {
        return Err(Error::Input("state map must send every state of M to a state of N".into()));
    }
    let mut hit = vec![false; n.num_states()];
    for &p in rho {
        hit[p] = true;
    }
    if hit.iter().any(|h| !h) {
        return Err(Error::Input("state map must be surjective".into()));
    }
    Ok(())
}

/// The functional 0/1 matrix `X_ρ ∈ A^{Q×P}`.
pub fn function_matrix(m: &Wta, n: &Wta, rho: &[usize]) -> Result<Matrix> {
    Matrix::from_function(m.states().clone(), n.states().clone(), rho, m.semiring())
}

fn image_row(row: usize, q_count: usize, p_count: usize, k: usize, rho: &[usize], digits: &mut [usize]) -> usize {
    tuple_digits(row, q_count, k, digits);
    digits[..k].iter().fold(0, |acc, &q| acc * p_count + rho[q])
}

/// `F_q = G_{ρ(q)}` and `Σ_{ρ(q)=p} μ(σ)_{w,q} = ν(σ)_{ρ(w),p}`.
pub fn check_forward(m: &Wta, n: &Wta, rho: &[usize]) -> Result<bool> {
    check_map(m, n, rho)?;
    let (qn, pn) = (m.num_states(), n.num_states());
    let s = m.semiring();
    let f = m.final_weights().entries();
    let g = n.final_weights().entries();
    if (0..qn).any(|q| f[q] != g[rho[q]]) {
        return Ok(false);
    }
    let mut digits = vec![0; m.alphabet().max_rank()];
    for sym in 0..m.alphabet().len() {
        let k = m.alphabet().rank_at(sym);
        let mu = m.transition_at(sym);
        let nu = n.transition_at(sym);
        for row in 0..mu.nrows() {
            let mut sums = vec![s.zero(); pn];
            for (q, v) in mu.row(row).iter().enumerate() {
                sums[rho[q]].add_assign(v);
            }
            let prow = image_row(row, qn, pn, k, rho, &mut digits);
            if sums.as_slice() != nu.row(prow) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Σ_{ρ(q)=p} F_q = G_p` and `Σ_{ρ(w)=v} μ(σ)_{w,q} = ν(σ)_{v,ρ(q)}`.
pub fn check_backward(m: &Wta, n: &Wta, rho: &[usize]) -> Result<bool> {
    check_map(m, n, rho)?;
    let (qn, pn) = (m.num_states(), n.num_states());
    let s = m.semiring();
    let mut fsum = vec![s.zero(); pn];
    for (q, v) in m.final_weights().entries().iter().enumerate() {
        fsum[rho[q]].add_assign(v);
    }
    if fsum.as_slice() != n.final_weights().entries() {
        return Ok(false);
    }
    let mut digits = vec![0; m.alphabet().max_rank()];
    for sym in 0..m.alphabet().len() {
        let k = m.alphabet().rank_at(sym);
        let mu = m.transition_at(sym);
        let nu = n.transition_at(sym);
        let mut acc: Vec<Vec<Value>> = vec![vec![s.zero(); qn]; nu.nrows()];
        for row in 0..mu.nrows() {
            let prow = image_row(row, qn, pn, k, rho, &mut digits);
            for (a, v) in acc[prow].iter_mut().zip(mu.row(row)) {
                a.add_assign(v);
            }
        }
        for (prow, sums) in acc.iter().enumerate() {
            if (0..qn).any(|q| &sums[q] != nu.get(prow, rho[q])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Surjections `Q → P` as `|Q|`-digit base-`|P|` words in lexicographic order.
fn surjections(q: usize, p: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if p == 0 { (q == 0) as usize } else { p.pow(q as u32) };
    (0..total).filter_map(move |mut code| {
        let mut word = vec![0; q];
        for slot in word.iter_mut().rev() {
            *slot = code % p.max(1);
            code /= p.max(1);
        }
        let mut hit = vec![false; p];
        word.iter().for_each(|&d| hit[d] = true);
        hit.iter().all(|&h| h).then_some(word)
    })
}

fn search(m: &Wta, n: &Wta, check: fn(&Wta, &Wta, &[usize]) -> Result<bool>) -> Result<Option<Vec<usize>>> {
    check_compatible(m, n)?;
    if m.num_states() > FIND_STATE_LIMIT {
        return Err(Error::Budget(format!(
            "exhaustive search is limited to {FIND_STATE_LIMIT} states, M has {}",
            m.num_states()
        )));
    }
    if n.num_states() > m.num_states() {
        return Ok(None);
    }
    for rho in surjections(m.num_states(), n.num_states()) {
        if check(m, n, &rho)? {
            return Ok(Some(rho));
        }
    }
    Ok(None)
}

/// First forward simulation `M ↠ N` in lexicographic order, if any.
pub fn find_forward(m: &Wta, n: &Wta) -> Result<Option<Vec<usize>>> {
    search(m, n, check_forward)
}

/// First backward simulation `M ↞ N` in lexicographic order, if any.
pub fn find_backward(m: &Wta, n: &Wta) -> Result<Option<Vec<usize>>> {
    search(m, n, check_backward)
}
