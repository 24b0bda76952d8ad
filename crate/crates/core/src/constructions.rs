//! Sum, Hadamard product, σ₀-product and σ₀-iteration, on automata and on
//! transfer matrices.
//!
//! Each construction comes as a pair: the automaton operation and the map on
//! transfer matrices, so that `M →X M'` and `N →Y N'` give
//! `op(M, N) →op(X, Y) op(M', N')`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{tuple_digits, IndexSet, Matrix, Vector};
use crate::semiring::Value;
use crate::simulation::check_compatible;
use crate::wta::Wta;

/// The four constructions, with the distinguished nullary symbol where needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionTag {
    Sum,
    SigmaProduct(String),
    Hadamard,
    SigmaStar(String),
}

impl ConstructionTag {
    pub fn validate(&self, m: &Wta) -> Result<()> {
        match self {
            ConstructionTag::SigmaProduct(s0) | ConstructionTag::SigmaStar(s0) => nullary(m, s0).map(|_| ()),
            _ => Ok(()),
        }
    }
}

fn nullary(m: &Wta, s0: &str) -> Result<usize> {
    match m.alphabet().index_of(s0) {
        None => Err(Error::Input(format!("unknown symbol `{s0}`"))),
        Some(i) if m.alphabet().rank_at(i) != 0 => {
            Err(Error::Input(format!("`{s0}` has rank {}, expected a nullary symbol", m.alphabet().rank_at(i))))
        }
        Some(i) => Ok(i),
    }
}

fn require_commutative(m: &Wta, op: &'static str) -> Result<()> {
    if !m.semiring().is_commutative() {
        return Err(Error::capability(m.semiring(), op));
    }
    Ok(())
}

/// `A ∪ B` as a disjoint union, suffixing `.L`/`.R` when the names collide.
fn disjoint_union(a: &IndexSet, b: &IndexSet) -> IndexSet {
    let left: HashSet<&[String]> = a.labels().iter().map(|l| l.as_slice()).collect();
    let clash = b.labels().iter().any(|l| left.contains(l.as_slice()));
    let tag = |l: &[String], suffix: &str| {
        if clash {
            vec![format!("{}{suffix}", l.join(","))]
        } else {
            l.to_vec()
        }
    };
    let labels = a
        .labels()
        .iter()
        .map(|l| tag(l, ".L"))
        .chain(b.labels().iter().map(|l| tag(l, ".R")))
        .collect();
    IndexSet::new(labels).expect("suffixes keep the union disjoint")
}

/// Where a row tuple of `(Q ∪ P)^k` lives.
#[derive(Clone, Copy)]
enum Row {
    /// The empty tuple, shared by both blocks.
    Leaf,
    /// A tuple over `Q`, with its row in `Q^k`.
    Left(usize),
    /// A tuple over `P`, with its row in `P^k`.
    Right(usize),
    Mixed,
}

fn split_row(row: usize, qn: usize, pn: usize, k: usize, digits: &mut [usize]) -> Row {
    tuple_digits(row, qn + pn, k, digits);
    let tuple = &digits[..k];
    if k == 0 {
        Row::Leaf
    } else if tuple.iter().all(|&d| d < qn) {
        Row::Left(tuple.iter().fold(0, |acc, &d| acc * qn + d))
    } else if tuple.iter().all(|&d| d >= qn) {
        Row::Right(tuple.iter().fold(0, |acc, &d| acc * pn + d - qn))
    } else {
        Row::Mixed
    }
}

/// Shared skeleton of the sum and the σ₀-product: `fill(sym, row, out)` writes
/// one row of `κ(σ)` given the classification of the row tuple.
fn block_automaton<F>(m: &Wta, n: &Wta, finals: Vec<Value>, mut fill: F) -> Result<Wta>
where
    F: FnMut(usize, Row, &mut [Value]),
{
    check_compatible(m, n)?;
    let s = m.semiring();
    let (qn, pn) = (m.num_states(), n.num_states());
    let states = disjoint_union(m.states(), n.states());
    let mut digits = vec![0; m.alphabet().max_rank()];
    let mut transitions = Vec::with_capacity(m.alphabet().len());
    for sym in 0..m.alphabet().len() {
        let k = m.alphabet().rank_at(sym);
        let rows = states.power(k);
        let mut data = vec![s.zero(); rows.len() * (qn + pn)];
        for (row, out) in data.chunks_mut(qn + pn).enumerate() {
            fill(sym, split_row(row, qn, pn, k, &mut digits), out);
        }
        transitions.push(Matrix::new(rows, states.clone(), data, s)?);
    }
    Wta::new(
        m.alphabet().clone(),
        states.clone(),
        transitions,
        Vector::new(states, finals)?,
        s,
    )
}

/// `M + N`: block-diagonal transitions and `H = ⟨F, G⟩`.
pub fn sum_wta(m: &Wta, n: &Wta) -> Result<Wta> {
    let qn = m.num_states();
    let finals = m.final_weights().entries().iter().chain(n.final_weights().entries()).cloned().collect();
    block_automaton(m, n, finals, |sym, class, out| match class {
        Row::Leaf => {
            out[..qn].clone_from_slice(m.transition_at(sym).row(0));
            out[qn..].clone_from_slice(n.transition_at(sym).row(0));
        }
        Row::Left(w) => out[..qn].clone_from_slice(m.transition_at(sym).row(w)),
        Row::Right(w) => out[qn..].clone_from_slice(n.transition_at(sym).row(w)),
        Row::Mixed => {}
    })
}

/// `X + Y = [[X, 0], [0, Y]]`.
pub fn sum_tm(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    if x.semiring() != y.semiring() {
        return Err(Error::Input("transfer matrices over different semirings".into()));
    }
    let s = x.semiring();
    let rows = disjoint_union(x.rows(), y.rows());
    let cols = disjoint_union(x.cols(), y.cols());
    let mut out = Matrix::zeros(rows, cols, s);
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            out.set(i, j, x.get(i, j).clone());
        }
    }
    for i in 0..y.nrows() {
        for j in 0..y.ncols() {
            out.set(x.nrows() + i, x.ncols() + j, y.get(i, j).clone());
        }
    }
    Ok(out)
}

fn pair_names(a: &IndexSet, b: &IndexSet) -> IndexSet {
    let names = a
        .labels()
        .iter()
        .flat_map(|x| b.labels().iter().map(move |y| format!("{}*{}", x.join(","), y.join(","))));
    IndexSet::from_names(names).expect("pairs of distinct labels are distinct")
}

/// `M ·_H N` over `Q × P`: `H = F ⊗ G` and `κ(σ) = μ(σ) ⊗ ν(σ)` with rows
/// reordered from `Q^k × P^k` to `(Q × P)^k`.
pub fn hadamard_wta(m: &Wta, n: &Wta) -> Result<Wta> {
    check_compatible(m, n)?;
    require_commutative(m, "the Hadamard product")?;
    let s = m.semiring();
    let (qn, pn) = (m.num_states(), n.num_states());
    let states = pair_names(m.states(), n.states());
    let width = qn * pn;
    let mut digits = vec![0; m.alphabet().max_rank()];
    let mut transitions = Vec::with_capacity(m.alphabet().len());
    for sym in 0..m.alphabet().len() {
        let k = m.alphabet().rank_at(sym);
        let (mu, nu) = (m.transition_at(sym), n.transition_at(sym));
        let rows = states.power(k);
        let mut data = Vec::with_capacity(rows.len() * width);
        for row in 0..rows.len() {
            tuple_digits(row, width, k, &mut digits);
            let qrow = digits[..k].iter().fold(0, |acc, &d| acc * qn + d / pn.max(1));
            let prow = digits[..k].iter().fold(0, |acc, &d| acc * pn + d % pn.max(1));
            for q in 0..qn {
                for p in 0..pn {
                    data.push(mu.get(qrow, q).mul(nu.get(prow, p)));
                }
            }
        }
        transitions.push(Matrix::new(rows, states.clone(), data, s)?);
    }
    let finals = m
        .final_weights()
        .entries()
        .iter()
        .flat_map(|f| n.final_weights().entries().iter().map(move |g| f.mul(g)))
        .collect();
    Wta::new(
        m.alphabet().clone(),
        states.clone(),
        transitions,
        Vector::new(states, finals)?,
        s,
    )
}

/// `X ·_H Y = X ⊗ Y`, relabelled to the product states.
pub fn hadamard_tm(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    x.kron(y)?.relabel(pair_names(x.rows(), y.rows()), pair_names(x.cols(), y.cols()))
}

/// `M ·σ₀ N` over `Q ∪ P` with `H = ⟨F, 0⟩`.
///
/// Every `σ₀`-leaf of an `M`-run is replaced by a complete `N`-run: a
/// transition whose children are `N`-states may switch to the `M`-state `q`
/// with weight `μ₀(σ₀)_q · Σ_p ν(σ)_{w,p} G_p`. For a nullary `σ ≠ σ₀` the
/// `M`-leaf weight `μ₀(σ)_q` and the switching weight are both available and
/// are added.
pub fn sigma_product_wta(m: &Wta, n: &Wta, s0: &str) -> Result<Wta> {
    check_compatible(m, n)?;
    require_commutative(m, "the σ₀-product")?;
    let s0 = nullary(m, s0)?;
    let s = m.semiring();
    let qn = m.num_states();
    let leaf = m.transition_at(s0).row(0).to_vec();
    let g = n.final_weights().entries();
    // (ν(σ) G)_w for every σ and every row w
    let closes: Vec<Vec<Value>> = n
        .transitions()
        .iter()
        .map(|nu| (0..nu.nrows()).map(|w| crate::linalg::dot_raw(nu.row(w), g, s)).collect())
        .collect();
    let mut finals = m.final_weights().entries().to_vec();
    finals.extend(std::iter::repeat_n(s.zero(), n.num_states()));
    block_automaton(m, n, finals, |sym, class, out| {
        match class {
            Row::Left(w) => out[..qn].clone_from_slice(m.transition_at(sym).row(w)),
            Row::Right(w) => {
                for (o, l) in out[..qn].iter_mut().zip(&leaf) {
                    *o = l.mul(&closes[sym][w]);
                }
                out[qn..].clone_from_slice(n.transition_at(sym).row(w));
            }
            Row::Leaf => {
                for (q, (o, l)) in out[..qn].iter_mut().zip(&leaf).enumerate() {
                    let switch = l.mul(&closes[sym][0]);
                    *o = if sym == s0 { switch } else { m.transition_at(sym).get(0, q).add(&switch) };
                }
                out[qn..].clone_from_slice(n.transition_at(sym).row(0));
            }
            Row::Mixed => {}
        }
    })
}

/// `X ·σ₀ Y = X + Y`.
pub fn sigma_product_tm(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    sum_tm(x, y)
}

/// `M^{*σ₀}` over `Q` with final weights `F`.
///
/// For `σ ≠ σ₀`, `κ(σ)_{w,q} = μ(σ)_{w,q} + μ₀(σ₀)_q · ⟦M⟧(σ₀)^* ·
/// Σ_p μ(σ)_{w,p} F_p`; `κ₀(σ₀) = μ₀(σ₀)`. The star must converge: always
/// over `bool`, over `rat` when `|⟦M⟧(σ₀)| < 1`.
pub fn sigma_star_wta(m: &Wta, s0: &str) -> Result<Wta> {
    let s0i = nullary(m, s0)?;
    let s = m.semiring();
    let qn = m.num_states();
    let at_s0 = m.eval(&crate::wta::Tree::leaf(s0))?;
    let star = s.star(&at_s0)?;
    let leaf: Vec<Value> = m.transition_at(s0i).row(0).iter().map(|l| l.mul(&star)).collect();
    let f = m.final_weights().entries();
    let transitions = m
        .transitions()
        .iter()
        .enumerate()
        .map(|(sym, mu)| {
            if sym == s0i {
                return mu.clone();
            }
            let mut out = mu.clone();
            for w in 0..mu.nrows() {
                let close = crate::linalg::dot_raw(mu.row(w), f, s);
                for q in 0..qn {
                    out.set(w, q, mu.get(w, q).add(&leaf[q].mul(&close)));
                }
            }
            out
        })
        .collect();
    Wta::new(m.alphabet().clone(), m.states().clone(), transitions, m.final_weights().clone(), s)
}

/// `X^{*σ₀} = X`.
pub fn sigma_star_tm(x: &Matrix) -> Matrix {
    x.clone()
}

/// Applies a binary construction to automata.
pub fn apply_wta(tag: &ConstructionTag, m: &Wta, n: &Wta) -> Result<Wta> {
    match tag {
        ConstructionTag::Sum => sum_wta(m, n),
        ConstructionTag::Hadamard => hadamard_wta(m, n),
        ConstructionTag::SigmaProduct(s0) => sigma_product_wta(m, n, s0),
        ConstructionTag::SigmaStar(s0) => sigma_star_wta(m, s0),
    }
}

/// Applies a construction to transfer matrices; `σ₀`-iteration ignores `y`.
pub fn apply_tm(tag: &ConstructionTag, x: &Matrix, y: &Matrix) -> Result<Matrix> {
    match tag {
        ConstructionTag::Sum => sum_tm(x, y),
        ConstructionTag::Hadamard => hadamard_tm(x, y),
        ConstructionTag::SigmaProduct(_) => sigma_product_tm(x, y),
        ConstructionTag::SigmaStar(_) => Ok(sigma_star_tm(x)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{
        binary_alphabet, mixed_alphabet, random_simulation, random_simulation_from, random_simulation_into, random_wta,
    };
    use crate::semiring::Semiring;
    use crate::simulation::check_simulation;
    use crate::wta::{enumerate_trees, RankedAlphabet, Tree};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn m_one(s: Semiring) -> Wta {
        let mut b = Wta::builder(s, binary_alphabet(), ["q"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 1).unwrap();
        b.final_i64("q", 1).unwrap();
        b.build()
    }

    fn m_two(s: Semiring) -> Wta {
        let mut b = Wta::builder(s, binary_alphabet(), ["q"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 2).unwrap();
        b.final_i64("q", 1).unwrap();
        b.build()
    }

    fn erase(x: &Matrix) -> Vec<Value> {
        x.entries().to_vec()
    }

    fn same_up_to_labels(a: &Wta, b: &Wta) -> bool {
        a.num_states() == b.num_states()
            && a.final_weights().entries() == b.final_weights().entries()
            && a.transitions().iter().zip(b.transitions()).all(|(x, y)| erase(x) == erase(y))
    }

    /// `t` cut along an antichain: the outer tree (cuts become `σ₀` leaves) and
    /// the removed subtrees; outer trees with an uncut `σ₀` leaf are dropped.
    fn cuts(t: &Tree, s0: &str) -> Vec<(Tree, Vec<Tree>)> {
        let mut out = vec![(Tree::leaf(s0), vec![t.clone()])];
        if t.symbol() == s0 {
            return out;
        }
        let mut partial: Vec<(Vec<Tree>, Vec<Tree>)> = vec![(Vec::new(), Vec::new())];
        for c in t.children() {
            let options = cuts(c, s0);
            partial = partial
                .into_iter()
                .flat_map(|(kids, subs)| {
                    options.iter().map(move |(o, u)| {
                        let mut kids = kids.clone();
                        kids.push(o.clone());
                        let mut subs = subs.clone();
                        subs.extend(u.iter().cloned());
                        (kids, subs)
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(|(kids, subs)| (Tree::new(t.symbol(), kids), subs)));
        out
    }

    fn oi_oracle(m: &Wta, n: &Wta, s0: &str, t: &Tree) -> Value {
        let s = m.semiring();
        cuts(t, s0).into_iter().fold(s.zero(), |acc, (outer, subs)| {
            let w = subs.iter().fold(m.eval(&outer).unwrap(), |w, u| w.mul(&n.eval(u).unwrap()));
            acc.add(&w)
        })
    }

    #[test]
    fn sum_examples() {
        let s = Semiring::Nat;
        let empty = Wta::builder(s, binary_alphabet(), Vec::<String>::new()).unwrap().build();
        assert!(same_up_to_labels(&sum_wta(&m_one(s), &empty).unwrap(), &m_one(s)));
        let sum = sum_wta(&m_two(s), &m_one(s)).unwrap();
        assert_eq!(sum.state_names(), vec!["q.L", "q.R"]);
        for t in enumerate_trees(&binary_alphabet(), 6).unwrap() {
            assert_eq!(sum.eval(&t).unwrap(), m_two(s).eval(&t).unwrap().add(&m_one(s).eval(&t).unwrap()));
        }
        let i = Matrix::identity(IndexSet::from_names(["a", "b"]).unwrap(), s);
        let j = Matrix::identity(IndexSet::from_names(["c"]).unwrap(), s);
        let ij = sum_tm(&i, &j).unwrap();
        assert_eq!(ij, Matrix::identity(IndexSet::from_names(["a", "b", "c"]).unwrap(), s));
    }

    #[test]
    fn sum_rejects_other_alphabets() {
        let s = Semiring::Int;
        let other = Wta::builder(s, RankedAlphabet::new([("alpha", 0)]).unwrap(), ["q"]).unwrap().build();
        assert!(matches!(sum_wta(&m_one(s), &other), Err(Error::Input(_))));
    }

    #[test]
    fn hadamard_examples() {
        let s = Semiring::Int;
        let sq = hadamard_wta(&m_two(s), &m_two(s)).unwrap();
        for t in enumerate_trees(&binary_alphabet(), 5).unwrap() {
            let v = m_two(s).eval(&t).unwrap();
            assert_eq!(sq.eval(&t).unwrap(), v.mul(&v));
        }
        let mut rng = StdRng::seed_from_u64(7);
        let m = random_wta(&mut rng, s, &binary_alphabet(), 2, 0.7);
        assert!(same_up_to_labels(&hadamard_wta(&m, &m_one(s)).unwrap(), &m));
    }

    #[test]
    fn hadamard_pointwise_on_random_pairs() {
        let mut rng = StdRng::seed_from_u64(8);
        let a = mixed_alphabet();
        for s in [Semiring::Nat, Semiring::Int, Semiring::Rat] {
            let m = random_wta(&mut rng, s, &a, 2, 0.6);
            let n = random_wta(&mut rng, s, &a, 3, 0.6);
            let h = hadamard_wta(&m, &n).unwrap();
            let p = sum_wta(&m, &n).unwrap();
            for t in enumerate_trees(&a, 4).unwrap() {
                let (x, y) = (m.eval(&t).unwrap(), n.eval(&t).unwrap());
                assert_eq!(h.eval(&t).unwrap(), x.mul(&y));
                assert_eq!(p.eval(&t).unwrap(), x.add(&y));
            }
        }
    }

    #[test]
    fn sigma_product_counts_cuts() {
        let s = Semiring::Nat;
        let (m, n) = (m_one(s), m_one(s));
        let p = sigma_product_wta(&m, &n, "alpha").unwrap();
        assert_eq!(p.eval(&Tree::leaf("alpha")).unwrap(), s.one());
        for t in enumerate_trees(&binary_alphabet(), 5).unwrap() {
            let cuts_covering = oi_oracle(&m, &n, "alpha", &t);
            assert_eq!(p.eval(&t).unwrap(), cuts_covering, "{t}");
        }
    }

    #[test]
    fn sigma_product_matches_oi_oracle() {
        let mut rng = StdRng::seed_from_u64(9);
        let a = mixed_alphabet();
        for s in [Semiring::Nat, Semiring::Int, Semiring::Rat] {
            for _ in 0..3 {
                let m = random_wta(&mut rng, s, &a, 2, 0.6);
                let n = random_wta(&mut rng, s, &a, 2, 0.6);
                let p = sigma_product_wta(&m, &n, "alpha").unwrap();
                for t in enumerate_trees(&a, 4).unwrap() {
                    assert_eq!(p.eval(&t).unwrap(), oi_oracle(&m, &n, "alpha", &t), "{t}");
                }
            }
        }
    }

    #[test]
    fn sigma_product_with_zero_finals() {
        let s = Semiring::Int;
        let zero_n = Wta::builder(s, binary_alphabet(), ["p"]).unwrap().build();
        let p = sigma_product_wta(&m_two(s), &zero_n, "alpha").unwrap();
        for t in enumerate_trees(&binary_alphabet(), 5).unwrap() {
            assert!(p.eval(&t).unwrap().is_zero());
        }
        assert!(matches!(sigma_product_wta(&m_two(s), &zero_n, "sigma"), Err(Error::Input(_))));
        assert!(matches!(sigma_product_wta(&m_two(s), &zero_n, "beta"), Err(Error::Input(_))));
    }

    #[test]
    fn sigma_star_factors() {
        // ⟦M⟧(α) = 0: star factor 1, κ = μ + μ₀(α) · μF
        let s = Semiring::Rat;
        let mut b = Wta::builder(s, mixed_alphabet(), ["q", "r"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("beta", &[], "r", 1).unwrap();
        b.trans_i64("gamma", &["r"], "q", 1).unwrap();
        b.final_i64("r", 1).unwrap();
        let m = b.build();
        let star = sigma_star_wta(&m, "alpha").unwrap();
        // γ(r → q) closes with weight 1·F_q = 0; β(→ r) closes with F_r = 1
        assert_eq!(star.transition("beta").unwrap().row(0), &[s.one(), s.one()]);
        assert_eq!(star.transition("alpha").unwrap(), m.transition("alpha").unwrap());

        let mut b = Wta::builder(s, mixed_alphabet(), ["q"]).unwrap();
        b.transition("alpha", &[], "q", s.parse_value("1/2").unwrap()).unwrap();
        b.trans_i64("beta", &[], "q", 1).unwrap();
        b.final_i64("q", 1).unwrap();
        let m = b.build();
        let star = sigma_star_wta(&m, "alpha").unwrap();
        // 1 + (1/2)·2·1 = 2
        assert_eq!(star.transition("beta").unwrap().row(0), &[s.from_i64(2).unwrap()]);

        let boolean = m_one(Semiring::Bool);
        assert!(sigma_star_wta(&boolean, "alpha").is_ok());
        assert!(matches!(sigma_star_wta(&m_one(Semiring::Rat), "alpha"), Err(Error::DivergentStar { .. })));
        assert!(matches!(sigma_star_wta(&m_one(Semiring::Nat), "alpha"), Err(Error::Capability { .. })));
    }

    fn check_functor(tag: ConstructionTag, s: Semiring, seed: u64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = mixed_alphabet();
        for _ in 0..6 {
            let (m1, m2, x) = match &tag {
                ConstructionTag::SigmaStar(_) => {
                    let base = rescale_alpha(&random_wta(&mut rng, s, &a, 2, 0.5));
                    let (m2, y) = random_simulation_from(&mut rng, &base);
                    let (m1, x) = random_simulation_into(&mut rng, &base);
                    (m1, m2, x.matmul(&y).unwrap())
                }
                _ => random_simulation(&mut rng, s, &a, 2),
            };
            let (n1, n2, y) = random_simulation(&mut rng, s, &a, 2);
            let left = apply_wta(&tag, &m1, &n1).unwrap();
            let right = apply_wta(&tag, &m2, &n2).unwrap();
            let z = apply_tm(&tag, &x, &y).unwrap();
            assert!(check_simulation(&left, &right, &z).unwrap().holds(), "{tag:?}");
            let id_m = Matrix::identity(m1.states().clone(), s);
            let id_n = Matrix::identity(n1.states().clone(), s);
            let id = apply_tm(&tag, &id_m, &id_n).unwrap();
            assert_eq!(id, Matrix::identity(id.rows().clone(), s));
        }
    }

    /// Scales `alpha` so that ⟦M⟧(alpha) has a convergent star.
    fn rescale_alpha(m: &Wta) -> Wta {
        let s = m.semiring();
        let alpha = m.alphabet().index_of("alpha").unwrap();
        let at = m.eval(&Tree::leaf("alpha")).unwrap().to_rational();
        if at.abs() < num_rational::BigRational::from_integer(1.into()) {
            return m.clone();
        }
        let factor = s.from_rational(num_rational::BigRational::new(1.into(), 2.into()) / at).unwrap();
        let mut ts = m.transitions().to_vec();
        let scaled: Vec<Value> = ts[alpha].entries().iter().map(|v| v.mul(&factor)).collect();
        ts[alpha] = Matrix::new(ts[alpha].rows().clone(), ts[alpha].cols().clone(), scaled, s).unwrap();
        Wta::new(m.alphabet().clone(), m.states().clone(), ts, m.final_weights().clone(), s).unwrap()
    }

    use num_traits::Signed;

    #[test]
    fn constructions_are_functorial() {
        for s in [Semiring::Nat, Semiring::Int, Semiring::Rat] {
            check_functor(ConstructionTag::Sum, s, 10);
            check_functor(ConstructionTag::Hadamard, s, 11);
            check_functor(ConstructionTag::SigmaProduct("alpha".into()), s, 12);
        }
        check_functor(ConstructionTag::SigmaStar("alpha".into()), Semiring::Rat, 13);
    }

    #[test]
    fn composition_laws() {
        let mut rng = StdRng::seed_from_u64(14);
        let s = Semiring::Int;
        let x = crate::generate::random_matrix(&mut rng, s, 2, 3);
        let x2 = crate::generate::random_matrix(&mut rng, s, 3, 2).relabel(x.cols().clone(), IndexSet::from_names(["u", "v"]).unwrap()).unwrap();
        let y = crate::generate::random_matrix(&mut rng, s, 1, 2);
        let y2 = crate::generate::random_matrix(&mut rng, s, 2, 2).relabel(y.cols().clone(), IndexSet::from_names(["w", "z"]).unwrap()).unwrap();
        let lhs = sum_tm(&x, &y).unwrap().matmul(&sum_tm(&x2, &y2).unwrap()).unwrap();
        let rhs = sum_tm(&x.matmul(&x2).unwrap(), &y.matmul(&y2).unwrap()).unwrap();
        assert_eq!(erase(&lhs), erase(&rhs));
        let lhs = hadamard_tm(&x, &y).unwrap().matmul(&hadamard_tm(&x2, &y2).unwrap()).unwrap();
        let rhs = hadamard_tm(&x.matmul(&x2).unwrap(), &y.matmul(&y2).unwrap()).unwrap();
        assert_eq!(erase(&lhs), erase(&rhs));
    }
}
