//! Dense exact matrices and vectors indexed by named finite sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::semiring::{Semiring, Value};

/// One index of an [`IndexSet`]: a tuple of atom names. Plain states are
/// 1-tuples; rows of a Kronecker power are k-tuples; `X^{0,⊗}` is indexed by
/// the empty tuple.
pub type Label = Vec<String>;

/// An ordered set of distinct labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    labels: Vec<Label>,
}

impl IndexSet {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Input(format!("duplicate index label {}", show_label(l))));
            }
        }
        Ok(IndexSet { labels })
    }

    /// Index set of 1-tuples, one per name.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        IndexSet::new(names.into_iter().map(|n| vec![n.into()]).collect())
    }

    /// `{()}`: the single empty tuple.
    pub fn unit() -> Self {
        IndexSet { labels: vec![Vec::new()] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn position(&self, label: &[String]) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Position of a 1-tuple label.
    pub fn position_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.len() == 1 && l[0] == name)
    }

    /// Names of a set of 1-tuples joined into single atoms.
    pub fn names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.join(",")).collect()
    }

    /// Cartesian product in lexicographic order, tuples concatenated.
    pub fn product(&self, other: &IndexSet) -> IndexSet {
        let mut labels = Vec::with_capacity(self.len() * other.len());
        for a in &self.labels {
            for b in &other.labels {
                let mut l = a.clone();
                l.extend(b.iter().cloned());
                labels.push(l);
            }
        }
        IndexSet { labels }
    }

    /// `self^k` with `self^0 = {()}`.
    pub fn power(&self, k: usize) -> IndexSet {
        (0..k).fold(IndexSet::unit(), |acc, _| acc.product(self))
    }
}

pub(crate) fn show_label(l: &[String]) -> String {
    if l.len() == 1 {
        l[0].clone()
    } else {
        format!("({})", l.join(","))
    }
}

/// Decodes a flat row index of a `k`-th Kronecker power over a base of size
/// `n` into its factor indices (most significant first).
pub(crate) fn tuple_digits(mut flat: usize, n: usize, k: usize, out: &mut [usize]) {
    for slot in out[..k].iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

/// A dense matrix over one semiring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: IndexSet,
    cols: IndexSet,
    data: Vec<Value>,
    semiring: Semiring,
}

/// Structural predicates of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    pub relational: bool,
    pub functional: bool,
    pub surjective: bool,
    pub injective: bool,
    pub diagonal: bool,
    pub invertible_diagonal: bool,
    pub nondegenerate: bool,
}

impl Matrix {
    pub fn new(rows: IndexSet, cols: IndexSet, data: Vec<Value>, semiring: Semiring) -> Result<Self> {
        if data.len() != rows.len() * cols.len() {
            return Err(Error::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows.len(),
                cols.len()
            )));
        }
        for v in &data {
            semiring.check_member(v)?;
        }
        Ok(Matrix { rows, cols, data, semiring })
    }

    pub(crate) fn from_parts(rows: IndexSet, cols: IndexSet, data: Vec<Value>, semiring: Semiring) -> Self {
        debug_assert_eq!(data.len(), rows.len() * cols.len());
        Matrix { rows, cols, data, semiring }
    }

    pub fn zeros(rows: IndexSet, cols: IndexSet, semiring: Semiring) -> Self {
        let data = vec![semiring.zero(); rows.len() * cols.len()];
        Matrix { rows, cols, data, semiring }
    }

    pub fn identity(index: IndexSet, semiring: Semiring) -> Self {
        let mut m = Matrix::zeros(index.clone(), index, semiring);
        for i in 0..m.rows.len() {
            m.set(i, i, semiring.one());
        }
        m
    }

    /// Builds a matrix from integer rows; labels are `r0, r1, ...` and `c0, c1, ...`.
    pub fn from_i64_rows(semiring: Semiring, rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            if r.len() != m {
                return Err(Error::Shape("ragged rows".into()));
            }
            for &x in *r {
                data.push(semiring.from_i64(x)?);
            }
        }
        let rl = IndexSet::from_names((0..n).map(|i| format!("r{i}")))?;
        let cl = IndexSet::from_names((0..m).map(|j| format!("c{j}")))?;
        Matrix::new(rl, cl, data, semiring)
    }

    /// The 0/1 matrix of a total function `rows -> cols`.
    pub fn from_function(rows: IndexSet, cols: IndexSet, map: &[usize], semiring: Semiring) -> Result<Self> {
        if map.len() != rows.len() || map.iter().any(|&j| j >= cols.len()) {
            return Err(Error::Shape("function does not fit the index sets".into()));
        }
        let mut m = Matrix::zeros(rows, cols, semiring);
        for (i, &j) in map.iter().enumerate() {
            m.set(i, j, semiring.one());
        }
        Ok(m)
    }

    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }

    pub fn cols(&self) -> &IndexSet {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn get(&self, i: usize, j: usize) -> &Value {
        &self.data[i * self.cols.len() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Value) {
        let n = self.cols.len();
        self.data[i * n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Value] {
        let n = self.cols.len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn entries(&self) -> &[Value] {
        &self.data
    }

    /// Same entries under new index sets of equal sizes.
    pub fn relabel(mut self, rows: IndexSet, cols: IndexSet) -> Result<Self> {
        if rows.len() != self.rows.len() || cols.len() != self.cols.len() {
            return Err(Error::Shape("relabeling must keep the dimensions".into()));
        }
        self.rows = rows;
        self.cols = cols;
        Ok(self)
    }

    pub fn transpose(&self) -> Matrix {
        let (n, m) = (self.nrows(), self.ncols());
        let mut data = Vec::with_capacity(n * m);
        for j in 0..m {
            for i in 0..n {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix::from_parts(self.cols.clone(), self.rows.clone(), data, self.semiring)
    }

    fn same_semiring(&self, other: &Matrix) -> Result<()> {
        if self.semiring != other.semiring {
            return Err(Error::Shape(format!(
                "semirings differ: {} and {}",
                self.semiring, other.semiring
            )));
        }
        Ok(())
    }

    /// Matrix product; inner index sets must agree label for label.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_semiring(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}: inner indices differ",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Ok(self.matmul_unchecked(other))
    }

    pub(crate) fn matmul_unchecked(&self, other: &Matrix) -> Matrix {
        let (n, k, m) = (self.nrows(), self.ncols(), other.ncols());
        let zero = self.semiring.zero();
        let mut data = vec![zero; n * m];
        for i in 0..n {
            let out = &mut data[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(l)) {
                    if !b.is_zero() {
                        o.add_assign(&a.mul(b));
                    }
                }
            }
        }
        Matrix::from_parts(self.rows.clone(), other.cols.clone(), data, self.semiring)
    }

    /// Entrywise sum of two matrices with identical index sets.
    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_semiring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("entrywise sum needs identical index sets".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Ok(Matrix::from_parts(self.rows.clone(), self.cols.clone(), data, self.semiring))
    }

    /// `(X ⊗ Y)_{(i1,i2),(j1,j2)} = x_{i1 j1} · y_{i2 j2}`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.same_semiring(other)?;
        let (n1, m1, n2, m2) = (self.nrows(), self.ncols(), other.nrows(), other.ncols());
        let mut data = Vec::with_capacity(n1 * n2 * m1 * m2);
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                for j1 in 0..m1 {
                    let a = self.get(i1, j1);
                    for j2 in 0..m2 {
                        data.push(a.mul(other.get(i2, j2)));
                    }
                }
            }
        }
        Ok(Matrix::from_parts(
            self.rows.product(&other.rows),
            self.cols.product(&other.cols),
            data,
            self.semiring,
        ))
    }

    /// `X^{0,⊗} = (1)` and `X^{k+1,⊗} = X^{k,⊗} ⊗ X`.
    pub fn kron_power(&self, k: usize) -> Matrix {
        let mut acc = Matrix::from_parts(IndexSet::unit(), IndexSet::unit(), vec![self.semiring.one()], self.semiring);
        for _ in 0..k {
            acc = acc.kron(self).expect("same semiring");
        }
        acc
    }

    pub fn classify(&self) -> Classification {
        let (n, m) = (self.nrows(), self.ncols());
        let relational = self.data.iter().all(|v| v.is_zero() || v.is_one());
        let row_ones = |i: usize| self.row(i).iter().filter(|v| v.is_one()).count();
        let col_ones = |j: usize| (0..n).filter(|&i| self.get(i, j).is_one()).count();
        let functional = relational && (0..n).all(|i| row_ones(i) == 1);
        let surjective = relational && (0..m).all(|j| col_ones(j) >= 1);
        let injective = relational && (0..m).all(|j| col_ones(j) <= 1);
        let diagonal = n == m && (0..n).all(|i| (0..m).all(|j| i == j || self.get(i, j).is_zero()));
        let invertible_diagonal = diagonal && (0..n).all(|i| self.get(i, i).is_unit());
        let nondegenerate = (0..n).all(|i| self.row(i).iter().any(|v| !v.is_zero()))
            && (0..m).all(|j| (0..n).any(|i| !self.get(i, j).is_zero()));
        Classification {
            relational,
            functional,
            surjective,
            injective,
            diagonal,
            invertible_diagonal,
            nondegenerate,
        }
    }

    /// The function `rows -> cols` encoded by a functional matrix.
    pub fn rho(&self) -> Result<Vec<usize>> {
        if !self.classify().functional {
            return Err(Error::Classification("functional"));
        }
        Ok((0..self.nrows())
            .map(|i| self.row(i).iter().position(Value::is_one).expect("one per row"))
            .collect())
    }

    /// Inverse of an invertible diagonal matrix.
    pub fn invert_diagonal(&self) -> Result<Matrix> {
        let c = self.classify();
        if !c.diagonal {
            return Err(Error::Classification("diagonal"));
        }
        let mut inv = Matrix::zeros(self.cols.clone(), self.rows.clone(), self.semiring);
        for i in 0..self.nrows() {
            inv.set(i, i, self.get(i, i).inverse()?);
        }
        Ok(inv)
    }

    /// Rows restricted to the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let labels = cols.iter().map(|&j| self.cols.label(j).clone()).collect();
        let mut data = Vec::with_capacity(self.nrows() * cols.len());
        for i in 0..self.nrows() {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix::from_parts(self.rows.clone(), IndexSet { labels }, data, self.semiring)
    }

    /// First coordinate `(i, j)` where the entries differ, in row-major order.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize)> {
        let m = self.ncols();
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a != b)
            .map(|p| (p / m, p % m))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows() {
            let row: Vec<String> = self.row(i).iter().map(Value::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// A vector indexed by a named set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vector {
    index: IndexSet,
    entries: Vec<Value>,
}

impl Vector {
    pub fn new(index: IndexSet, entries: Vec<Value>) -> Result<Self> {
        if index.len() != entries.len() {
            return Err(Error::Shape(format!(
                "{} entries for an index set of size {}",
                entries.len(),
                index.len()
            )));
        }
        Ok(Vector { index, entries })
    }

    pub fn zeros(index: IndexSet, semiring: Semiring) -> Self {
        let entries = vec![semiring.zero(); index.len()];
        Vector { index, entries }
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn entries(&self) -> &[Value] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Value> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.entries[i]
    }

    /// Row vector times matrix.
    pub fn vecmat(&self, x: &Matrix) -> Result<Vector> {
        if &self.index != x.rows() {
            return Err(Error::Shape("vector index differs from matrix rows".into()));
        }
        Ok(Vector {
            index: x.cols().clone(),
            entries: vecmat_raw(&self.entries, x),
        })
    }

    /// Inner product; both vectors must share their index set.
    pub fn dot(&self, other: &Vector) -> Result<Value> {
        if self.index != other.index {
            return Err(Error::Shape("dot product of differently indexed vectors".into()));
        }
        let s = other
            .entries
            .first()
            .or(self.entries.first())
            .map(Value::semiring);
        Ok(match s {
            Some(s) => dot_raw(&self.entries, &other.entries, s),
            None => return Err(Error::Shape("dot product of empty vectors has no carrier".into())),
        })
    }

    /// Matrix times column vector.
    pub fn matvec(x: &Matrix, v: &Vector) -> Result<Vector> {
        if x.cols() != &v.index {
            return Err(Error::Shape("vector index differs from matrix columns".into()));
        }
        let entries = (0..x.nrows()).map(|i| dot_raw(x.row(i), &v.entries, x.semiring())).collect();
        Ok(Vector { index: x.rows().clone(), entries })
    }
}

pub(crate) fn dot_raw(a: &[Value], b: &[Value], s: Semiring) -> Value {
    let mut acc = s.zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc.add_assign(&x.mul(y));
        }
    }
    acc
}

pub(crate) fn vecmat_raw(v: &[Value], x: &Matrix) -> Vec<Value> {
    let mut out = vec![x.semiring().zero(); x.ncols()];
    for (i, a) in v.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (o, b) in out.iter_mut().zip(x.row(i)) {
            if !b.is_zero() {
                o.add_assign(&a.mul(b));
            }
        }
    }
    out
}

/// `v1 ⊗ ... ⊗ vk` as a flat vector (lexicographic, first factor major).
pub(crate) fn kron_vectors(vs: &[&[Value]], s: Semiring) -> Vec<Value> {
    let mut acc = vec![s.one()];
    for v in vs {
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for a in &acc {
            for b in v.iter() {
                next.push(a.mul(b));
            }
        }
        acc = next;
    }
    acc
}
