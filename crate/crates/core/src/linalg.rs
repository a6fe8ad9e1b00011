//! Dense matrices over the scalar fraction field.
//!
//! Elimination picks constant pivots whenever one is available. A pivot that
//! is a nonconstant rational function is accepted as generically nonzero and
//! recorded as a side condition, so results hold wherever those conditions do.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::scalar::gcd::square_free;
use crate::scalar::{ParamBinding, Poly, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Polynomials assumed not to vanish, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SideConditions(BTreeSet<String>);

impl SideConditions {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records that `s` is nonzero; constants are dropped. Monomial factors
    /// become one condition per variable and repeated factors are dropped.
    pub fn assume_nonzero(&mut self, s: &Scalar) {
        for p in [s.numer(), s.denom()] {
            if p.is_constant() {
                continue;
            }
            let content = p.monomial_content();
            for (v, _) in content.factors() {
                self.0.insert(v.as_str().to_string());
            }
            let rest = p.div_exact(&Poly::term(content, num_traits::One::one())).expect("content divides");
            if !rest.is_constant() {
                self.0.insert(normalize_sign(&square_free(&rest)));
            }
        }
    }

    pub fn extend(&mut self, other: &SideConditions) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn to_vec(&self) -> Vec<String> {
        self.0.iter().cloned().collect()
    }

    /// Checks every condition against an exact binding; returns the ones that
    /// fail.
    pub fn violated_by(&self, binding: &ParamBinding) -> Vec<String> {
        self.0
            .iter()
            .filter(|c| match crate::scalar::parse_expr(c) {
                Ok(s) => matches!(s.substitute(binding), Ok(v) if v.is_zero()),
                Err(_) => false,
            })
            .cloned()
            .collect()
    }
}

fn normalize_sign(p: &Poly) -> String {
    let m = p.monic();
    let int = m.integer_primitive();
    format!("{int}")
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub side_conditions: SideConditions,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<Matrix, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        self.map(|x| x * c)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `v * self` for a row vector `v`.
    pub fn left_apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::Shape("vector length".into()));
        }
        let mut out = vec![Scalar::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() {
                    *o = &*o + &(vi * a);
                }
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self[(i, i)].is_zero() && (i + 1..self.cols).all(|j| self[(i, j)] == -&self[(j, i)])
            })
    }

    pub fn substitute(&self, binding: &ParamBinding) -> Result<Matrix, ScalarError> {
        self.try_map(|s| s.substitute(binding))
    }

    fn same_shape(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Chooses a pivot in column `col` at or below `start`: a constant entry
    /// when possible, otherwise the one with the fewest terms.
    fn choose_pivot(&self, col: usize, start: usize) -> Option<usize> {
        let mut best: Option<(usize, (bool, usize))> = None;
        for r in start..self.rows {
            let x = &self[(r, col)];
            if x.is_zero() {
                continue;
            }
            let key = (!x.is_constant(), x.numer().len() + x.denom().len());
            if best.as_ref().is_none_or(|(_, k)| key < *k) {
                best = Some((r, key));
            }
        }
        best.map(|(r, _)| r)
    }

    /// Gauss-Jordan elimination to reduced row echelon form.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut side = SideConditions::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = m.choose_pivot(col, row) else {
                continue;
            };
            m.swap_rows(row, p);
            let pivot = m[(row, col)].clone();
            side.assume_nonzero(&pivot);
            let inv = pivot.inv().expect("pivot is nonzero");
            for j in col..m.cols {
                let v = &m[(row, j)] * &inv;
                m[(row, j)] = v;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let sub = &factor * &m[(row, j)];
                    if !sub.is_zero() {
                        m[(r, j)] = &m[(r, j)] - &sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon {
            matrix: m,
            pivots,
            side_conditions: side,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{x : self * x = 0}` as column vectors.
    pub fn nullspace(&self) -> (Vec<Vec<Scalar>>, SideConditions) {
        let ech = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (r, &p) in ech.pivots.iter().enumerate() {
                v[p] = -&ech.matrix[(r, f)];
            }
            basis.push(v);
        }
        (basis, ech.side_conditions)
    }

    /// Determinant by Gaussian elimination over the fraction field.
    pub fn det(&self) -> Result<Scalar, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = m.choose_pivot(col, col) else {
                return Ok(Scalar::zero());
            };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = &det * &pivot;
            let inv = pivot.inv()?;
            for r in col + 1..n {
                let factor = &m[(r, col)] * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = &factor * &m[(col, j)];
                    if !sub.is_zero() {
                        m[(r, j)] = &m[(r, j)] - &sub;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse with the pivot side conditions used to obtain it.
    pub fn inverse(&self) -> Result<(Matrix, SideConditions), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let ech = aug.rref();
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let inv = Matrix::from_fn(n, n, |i, j| ech.matrix[(i, n + j)].clone());
        Ok((inv, ech.side_conditions))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A subspace of `Q(params)^n` stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let m = Matrix::from_rows(vectors.to_vec()).expect("vectors of equal length");
        let ech = m.rref();
        let k = ech.pivots.len();
        let basis = Matrix::from_fn(k, ambient, |i, j| ech.matrix[(i, j)].clone());
        Subspace { ambient, basis }
    }

    /// Span of the listed standard basis vectors (0-based).
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vectors: Vec<Vec<Scalar>> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![Scalar::zero(); ambient];
                v[i] = Scalar::one();
                v
            })
            .collect();
        Subspace::span(ambient, &vectors)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.basis.to_rows()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        if v.iter().all(Scalar::is_zero) {
            return true;
        }
        let mut rows = self.basis.to_rows();
        rows.push(v.to_vec());
        Matrix::from_rows(rows).unwrap().rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    /// Linear functionals vanishing on the subspace, as row vectors.
    pub fn annihilator(&self) -> Vec<Vec<Scalar>> {
        if self.dim() == 0 {
            return Subspace::full(self.ambient).basis();
        }
        self.basis.nullspace().0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_expr;

    fn s(t: &str) -> Scalar {
        parse_expr(t).unwrap()
    }

    fn m(rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|t| s(t)).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_roundtrip_symbolic() {
        let a = m(&[&["0", "x"], &["1/x", "y"]]);
        let (inv, side) = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
        assert!(side.iter().any(|c| c == "x"));
    }

    #[test]
    fn singular_detected() {
        let a = m(&[&["1", "x"], &["2", "2*x"]]);
        assert_eq!(a.inverse().unwrap_err(), LinalgError::Singular);
        assert!(a.det().unwrap().is_zero());
    }

    #[test]
    fn determinant_matches_expansion() {
        let a = m(&[&["a", "b", "0"], &["c", "d", "1"], &["0", "1", "e"]]);
        assert_eq!(a.det().unwrap(), s("a*d*e - a - b*c*e"));
    }

    #[test]
    fn nullspace_dimension() {
        let a = m(&[&["1", "2", "3"], &["2", "4", "6"]]);
        let (basis, _) = a.nullspace();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let col = Matrix::from_rows(v.iter().map(|x| vec![x.clone()]).collect()).unwrap();
            assert!(a.mul(&col).unwrap().is_zero());
        }
    }

    #[test]
    fn subspace_membership() {
        let w = Subspace::span(3, &[vec![s("1"), s("1"), s("0")]]);
        assert!(w.contains(&[s("x"), s("x"), s("0")]));
        assert!(!w.contains(&[s("1"), s("0"), s("0")]));
        assert_eq!(w.annihilator().len(), 2);
    }
}
