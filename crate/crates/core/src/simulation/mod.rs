//! Simulations between automata.
//!
//! `M` simulates `N` via a transfer matrix `X ∈ A^{Q×P}` when `F = XG` and
//! `μ_k(σ) X = X^{k,⊗} ν_k(σ)` for every symbol. Simulation implies
//! equivalence. This module checks the conditions, searches functional
//! (forward / backward) simulations, and splits an arbitrary simulation into a
//! transposed-functional, an invertible-diagonal and a functional step.

mod decompose;
mod functional;

pub use decompose::{decompose_simulation, decompose_units, fill_matrix, fill_raw, SimulationDecomposition, UnitDecomposition};
pub use functional::{check_backward, check_forward, find_backward, find_forward, function_matrix, FIND_STATE_LIMIT};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{show_label, Matrix};
use crate::semiring::Value;
use crate::wta::Wta;

/// First condition that a candidate transfer matrix violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `F_q ≠ (XG)_q`.
    FinalWeights { state: String, expected: Value, found: Value },
    /// `(μ(σ)X)_{w,p} ≠ (X^{k,⊗}ν(σ))_{w,p}`.
    Transition {
        symbol: String,
        row: String,
        col: String,
        lhs: Value,
        rhs: Value,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FinalWeights { state, expected, found } => {
                write!(f, "final weight of {state}: F = {expected} but XG = {found}")
            }
            Violation::Transition { symbol, row, col, lhs, rhs } => write!(
                f,
                "symbol {symbol}, row {row}, column {col}: mu*X = {lhs} but X^k*nu = {rhs}"
            ),
        }
    }
}

/// Outcome of [`check_simulation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationReport {
    pub violation: Option<Violation>,
}

impl SimulationReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

pub(crate) fn check_compatible(m: &Wta, n: &Wta) -> Result<()> {
    if m.semiring() != n.semiring() {
        return Err(Error::Input(format!(
            "automata are over different semirings ({} and {})",
            m.semiring(),
            n.semiring()
        )));
    }
    if m.alphabet() != n.alphabet() {
        return Err(Error::Input("automata are over different ranked alphabets".into()));
    }
    Ok(())
}

/// Puts the automata's state names on the transfer matrix, keeping entries.
pub(crate) fn conform(m: &Wta, n: &Wta, x: &Matrix) -> Result<Matrix> {
    check_compatible(m, n)?;
    if x.semiring() != m.semiring() {
        return Err(Error::Input(format!(
            "transfer matrix is over {} but the automata are over {}",
            x.semiring(),
            m.semiring()
        )));
    }
    if x.nrows() != m.num_states() || x.ncols() != n.num_states() {
        return Err(Error::Shape(format!(
            "transfer matrix is {}x{} but the automata have {} and {} states",
            x.nrows(),
            x.ncols(),
            m.num_states(),
            n.num_states()
        )));
    }
    x.clone().relabel(m.states().clone(), n.states().clone())
}

/// Checks `M →X N`: `F = XG` and `μ_k(σ) X = X^{k,⊗} ν_k(σ)` for all σ.
///
/// The report names the first violated coordinate: the final vector is
/// checked first, then the symbols in declaration order, each row-major.
pub fn check_simulation(m: &Wta, n: &Wta, x: &Matrix) -> Result<SimulationReport> {
    let x = conform(m, n, x)?;
    let xg = crate::linalg::Vector::matvec(&x, n.final_weights())?;
    for (q, (f, g)) in m.final_weights().entries().iter().zip(xg.entries()).enumerate() {
        if f != g {
            return Ok(SimulationReport {
                violation: Some(Violation::FinalWeights {
                    state: m.states().label(q)[0].clone(),
                    expected: f.clone(),
                    found: g.clone(),
                }),
            });
        }
    }
    let alphabet = m.alphabet();
    for sym in 0..alphabet.len() {
        let k = alphabet.rank_at(sym);
        let lhs = m.transition_at(sym).matmul_unchecked(&x);
        let xk = x.kron_power(k);
        let rhs = xk.matmul_unchecked(n.transition_at(sym));
        if let Some((i, j)) = lhs.first_difference(&rhs) {
            return Ok(SimulationReport {
                violation: Some(Violation::Transition {
                    symbol: alphabet.name(sym).to_string(),
                    row: show_label(lhs.rows().label(i)),
                    col: show_label(lhs.cols().label(j)),
                    lhs: lhs.get(i, j).clone(),
                    rhs: rhs.get(i, j).clone(),
                }),
            });
        }
    }
    Ok(SimulationReport { violation: None })
}

/// A transfer matrix tagged with the automata it connects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    pub matrix: Matrix,
    pub source: String,
    pub target: String,
}

impl TransferMatrix {
    pub fn new(matrix: Matrix, source: impl Into<String>, target: impl Into<String>) -> Self {
        TransferMatrix {
            matrix,
            source: source.into(),
            target: target.into(),
        }
    }

    /// Identity simulation `M →I M`.
    pub fn identity(m: &Wta, id: impl Into<String>) -> Self {
        let id = id.into();
        TransferMatrix::new(Matrix::identity(m.states().clone(), m.semiring()), id.clone(), id)
    }
}

/// `M →X M'` and `M' →Y N` give `M →XY N`.
pub fn compose(x: &TransferMatrix, y: &TransferMatrix) -> Result<TransferMatrix> {
    if x.target != y.source {
        return Err(Error::Input(format!(
            "cannot compose: first step ends at `{}` but second starts at `{}`",
            x.target, y.source
        )));
    }
    Ok(TransferMatrix::new(x.matrix.matmul(&y.matrix)?, x.source.clone(), y.target.clone()))
}

/// Shape of one simulation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    General,
    /// `X` is functional.
    ForwardFunctional,
    /// `X^T` is functional.
    BackwardFunctional,
    InvertibleDiagonal,
}

/// `automata[0] → automata[1] → ... ` with one transfer matrix per arrow.
#[derive(Debug, Clone)]
pub struct SimulationChain {
    pub automata: Vec<Wta>,
    pub steps: Vec<(TransferMatrix, StepKind)>,
}

impl SimulationChain {
    /// Checks every arrow, including the structural promise of its kind.
    pub fn validate(&self) -> Result<()> {
        if self.automata.len() != self.steps.len() + 1 {
            return Err(Error::Input("a chain needs one more automaton than steps".into()));
        }
        for (i, (step, kind)) in self.steps.iter().enumerate() {
            let report = check_simulation(&self.automata[i], &self.automata[i + 1], &step.matrix)?;
            if let Some(v) = report.violation {
                return Err(Error::Precondition(format!("step {i} is not a simulation: {v}")));
            }
            let ok = match kind {
                StepKind::General => true,
                StepKind::ForwardFunctional => step.matrix.classify().functional,
                StepKind::BackwardFunctional => step.matrix.transpose().classify().functional,
                StepKind::InvertibleDiagonal => step.matrix.classify().invertible_diagonal,
            };
            if !ok {
                return Err(Error::Precondition(format!("step {i} is not {kind:?}")));
            }
        }
        Ok(())
    }

    /// Product of all transfer matrices.
    pub fn collapse(&self) -> Result<TransferMatrix> {
        let mut it = self.steps.iter().map(|(t, _)| t);
        let first = it.next().ok_or_else(|| Error::Input("empty chain".into()))?.clone();
        it.try_fold(first, |acc, t| compose(&acc, t))
    }
}

/// For trim `M`, `N` with `M →X N` where `X` is functional or the semiring is
/// positive, `X` has no zero row or column. Returns whether `X` is
/// nondegenerate; inputs outside those hypotheses are rejected.
pub fn check_nondegenerate_consequence(m: &Wta, n: &Wta, x: &Matrix) -> Result<bool> {
    if !m.is_trim() || !n.is_trim() {
        return Err(Error::Input("both automata must be trim".into()));
    }
    let class = x.classify();
    if !class.functional && !m.semiring().is_positive() {
        return Err(Error::Input("transfer matrix must be functional or the semiring positive".into()));
    }
    if let Some(v) = check_simulation(m, n, x)?.violation {
        return Err(Error::Input(format!("not a simulation: {v}")));
    }
    Ok(class.nondegenerate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Semiring;
    use crate::wta::RankedAlphabet;

    fn alphabet() -> RankedAlphabet {
        RankedAlphabet::new([("alpha", 0), ("sigma", 2)]).unwrap()
    }

    fn m_two(s: Semiring) -> Wta {
        let mut b = Wta::builder(s, alphabet(), ["q"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 2).unwrap();
        b.final_i64("q", 1).unwrap();
        b.build()
    }

    /// `q` split into two copies whose outgoing weights add up to those of `q`.
    fn split_pair() -> (Wta, Wta) {
        let s = Semiring::Int;
        let mut b = Wta::builder(s, alphabet(), ["q1", "q2"]).unwrap();
        b.trans_i64("alpha", &[], "q1", 2).unwrap();
        b.trans_i64("alpha", &[], "q2", -1).unwrap();
        for l in ["q1", "q2"] {
            for r in ["q1", "q2"] {
                b.trans_i64("sigma", &[l, r], "q1", 1).unwrap();
                b.trans_i64("sigma", &[l, r], "q2", 1).unwrap();
            }
        }
        b.final_i64("q1", 1).unwrap();
        b.final_i64("q2", 1).unwrap();
        (b.build(), m_two(s))
    }

    #[test]
    fn identity_is_a_simulation() {
        let m = m_two(Semiring::Nat);
        let id = Matrix::identity(m.states().clone(), Semiring::Nat);
        assert!(check_simulation(&m, &m, &id).unwrap().holds());
    }

    #[test]
    fn merged_copy_is_simulated() {
        let (m, n) = split_pair();
        let x = Matrix::from_i64_rows(Semiring::Int, &[&[1], &[1]]).unwrap();
        assert!(check_simulation(&m, &n, &x).unwrap().holds());
    }

    #[test]
    fn perturbation_is_localized() {
        let m = m_two(Semiring::Int);
        let mut b = Wta::builder(Semiring::Int, alphabet(), ["q"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 3).unwrap();
        b.final_i64("q", 1).unwrap();
        let n = b.build();
        let id = Matrix::identity(m.states().clone(), Semiring::Int);
        match check_simulation(&m, &n, &id).unwrap().violation {
            Some(Violation::Transition { symbol, row, col, .. }) => {
                assert_eq!(symbol, "sigma");
                assert_eq!(row, "(q,q)");
                assert_eq!(col, "q");
            }
            other => panic!("{other:?}"),
        }
        let x = Matrix::from_i64_rows(Semiring::Int, &[&[1, 0]]).unwrap();
        assert!(matches!(check_simulation(&m, &n, &x), Err(Error::Shape(_))));
        let other = m_two(Semiring::Nat);
        assert!(matches!(check_simulation(&m, &other, &id), Err(Error::Input(_))));
    }

    #[test]
    fn composition() {
        let (m, n) = split_pair();
        let x = TransferMatrix::new(
            Matrix::from_i64_rows(Semiring::Int, &[&[1], &[1]]).unwrap().relabel(m.states().clone(), n.states().clone()).unwrap(),
            "M",
            "N",
        );
        let id = TransferMatrix::identity(&m, "M");
        assert_eq!(compose(&id, &x).unwrap(), x);
        assert!(compose(&x, &id).is_err());
    }

    #[test]
    fn nondegenerate_consequence() {
        let (m, n) = split_pair();
        let x = Matrix::from_i64_rows(Semiring::Int, &[&[1], &[1]]).unwrap();
        assert!(check_nondegenerate_consequence(&m, &n, &x).unwrap());

        // dead state: zero row in X, but M is not trim, so the consequence does not apply
        let mut b = Wta::builder(Semiring::Int, alphabet(), ["q", "dead"]).unwrap();
        b.trans_i64("alpha", &[], "q", 1).unwrap();
        b.trans_i64("sigma", &["q", "q"], "q", 2).unwrap();
        b.final_i64("q", 1).unwrap();
        let md = b.build();
        let xd = Matrix::from_i64_rows(Semiring::Int, &[&[1], &[0]]).unwrap();
        assert!(check_simulation(&md, &n, &xd).unwrap().holds());
        assert!(matches!(check_nondegenerate_consequence(&md, &n, &xd), Err(Error::Input(_))));
    }
}
