//! Lie algebras given by structure constants over the scalar field.

use thiserror::Error;

use crate::linalg::{Matrix, Subspace};
use crate::scalar::{Scalar, ScalarError};

pub type Vector = Vec<Scalar>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("basis index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("bracket [e{0},e{0}] must vanish")]
    DiagonalBracket(usize),
    #[error("vector of length {0} in dimension {1}")]
    Length(usize, usize),
    #[error("Jacobi identity fails on triples {0:?}")]
    Jacobi(Vec<(usize, usize, usize)>),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `[e_i, e_j] = sum_k C_ij^k e_k`, stored densely with 0-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    table: Vec<Scalar>,
    // nonzero (i, j, k, C_ij^k) over all ordered pairs, for sparse loops
    nonzero: Vec<(usize, usize, usize, Scalar)>,
    labels: Vec<String>,
}

pub fn basis_vector(dim: usize, i: usize) -> Vector {
    let mut v = vec![Scalar::zero(); dim];
    v[i] = Scalar::one();
    v
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        Self::from_brackets(dim, Vec::new()).expect("abelian algebra is valid")
    }

    /// Builds an algebra from brackets `(i, j, k, c)` meaning `[e_i,e_j]`
    /// has `c` as its `e_k` coefficient. Repeated entries accumulate and
    /// `i > j` entries are stored negated. Does not check Jacobi.
    pub fn from_brackets(
        dim: usize,
        brackets: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
    ) -> Result<Self, LieError> {
        let mut table = vec![Scalar::zero(); dim * dim * dim];
        for (i, j, k, c) in brackets {
            for idx in [i, j, k] {
                if idx >= dim {
                    return Err(LieError::IndexOutOfRange(idx, dim));
                }
            }
            if i == j {
                return Err(LieError::DiagonalBracket(i + 1));
            }
            let a = (i * dim + j) * dim + k;
            let b = (j * dim + i) * dim + k;
            table[a] = &table[a] + &c;
            table[b] = -&table[a];
        }
        let mut nonzero = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = &table[(i * dim + j) * dim + k];
                    if !c.is_zero() {
                        nonzero.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        Ok(LieAlgebra {
            dim,
            table,
            nonzero,
            labels: (1..=dim).map(|i| format!("e{i}")).collect(),
        })
    }

    /// Like `from_brackets` but rejects data that fails the Jacobi identity.
    pub fn new(
        dim: usize,
        brackets: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
    ) -> Result<Self, LieError> {
        let alg = Self::from_brackets(dim, brackets)?;
        let bad = alg.jacobi_check();
        if bad.is_empty() {
            Ok(alg)
        } else {
            Err(LieError::Jacobi(bad))
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.dim {
            self.labels = labels;
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Structure constant `C_ij^k`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.table[(i * self.dim + j) * self.dim + k]
    }

    /// Nonzero constants over all ordered pairs `(i, j)`.
    pub fn nonzero_constants(&self) -> &[(usize, usize, usize, Scalar)] {
        &self.nonzero
    }

    /// Brackets with `i < j`, 0-based.
    pub fn brackets(&self) -> impl Iterator<Item = &(usize, usize, usize, Scalar)> {
        self.nonzero.iter().filter(|(i, j, _, _)| i < j)
    }

    pub fn is_abelian(&self) -> bool {
        self.nonzero.is_empty()
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> Vector {
        (0..self.dim).map(|k| self.c(i, j, k).clone()).collect()
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vector, LieError> {
        for v in [x, y] {
            if v.len() != self.dim {
                return Err(LieError::Length(v.len(), self.dim));
            }
        }
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, j, k, c) in &self.nonzero {
            let (xi, yj) = (&x[*i], &y[*j]);
            if xi.is_zero() || yj.is_zero() {
                continue;
            }
            out[*k] = &out[*k] + &(&(xi * yj) * c);
        }
        Ok(out)
    }

    /// Triples `i < j < k` (0-based) on which the Jacobi identity fails.
    pub fn jacobi_check(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim;
        let e = |i| basis_vector(n, i);
        let mut bad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t1 = self.bracket(&self.basis_bracket(i, j), &e(k)).unwrap();
                    let t2 = self.bracket(&self.basis_bracket(j, k), &e(i)).unwrap();
                    let t3 = self.bracket(&self.basis_bracket(k, i), &e(j)).unwrap();
                    if (0..n).any(|l| !(&(&t1[l] + &t2[l]) + &t3[l]).is_zero()) {
                        bad.push((i, j, k));
                    }
                }
            }
        }
        bad
    }

    /// `[g, W]` for a subspace `W`.
    pub fn bracket_with(&self, w: &Subspace) -> Subspace {
        let mut vectors = Vec::new();
        for v in w.basis() {
            for i in 0..self.dim {
                let b = self.bracket(&basis_vector(self.dim, i), &v).unwrap();
                if b.iter().any(|s| !s.is_zero()) {
                    vectors.push(b);
                }
            }
        }
        Subspace::span(self.dim, &vectors)
    }

    /// `C^0 = g, C^k = [g, C^{k-1}]` until the dimension stops dropping.
    pub fn descending_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_with(last);
            let stalled = next.dim() == last.dim();
            let done = next.dim() == 0;
            if !stalled {
                series.push(next);
            }
            if stalled || done {
                return series;
            }
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.descending_series().last().unwrap().dim() == 0
    }

    /// `{X : [M X, e_j] in W for all j and all maps M}` where `M X` is the
    /// row-convention image `sum_i X_i M_i`.
    pub fn bracket_preimage(&self, w: &Subspace, maps: &[&Matrix]) -> Subspace {
        let n = self.dim;
        let ann = w.annihilator();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for f in &ann {
            for j in 0..n {
                // phi_l = f([e_l, e_j])
                let phi: Vec<Scalar> = (0..n)
                    .map(|l| {
                        (0..n)
                            .filter(|&k| !f[k].is_zero())
                            .map(|k| self.c(l, j, k) * &f[k])
                            .sum()
                    })
                    .collect();
                if phi.iter().all(Scalar::is_zero) {
                    continue;
                }
                for m in maps {
                    let row: Vec<Scalar> = (0..n)
                        .map(|i| (0..n).map(|l| &m[(i, l)] * &phi[l]).sum())
                        .collect();
                    if row.iter().any(|s| !s.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        if rows.is_empty() {
            return Subspace::full(n);
        }
        let (basis, _) = Matrix::from_rows(rows).unwrap().nullspace();
        Subspace::span(n, &basis)
    }

    /// `g_1, g_2, ...` with `g_k = {X : [X, g] in g_{k-1}}`, until stable.
    pub fn ascending_series(&self) -> Vec<Subspace> {
        let id = Matrix::identity(self.dim);
        let mut series: Vec<Subspace> = Vec::new();
        let mut prev = Subspace::zero(self.dim);
        loop {
            let next = self.bracket_preimage(&prev, &[&id]);
            if next.dim() == prev.dim() {
                return series;
            }
            series.push(next.clone());
            if next.dim() == self.dim {
                return series;
            }
            prev = next;
        }
    }

    pub fn center(&self) -> Subspace {
        self.ascending_series()
            .into_iter()
            .next()
            .unwrap_or_else(|| Subspace::zero(self.dim))
    }

    /// Dimensions of the ascending central series.
    pub fn algebra_type(&self) -> Vec<usize> {
        self.ascending_series().iter().map(Subspace::dim).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn alg(dim: usize, br: &[(usize, usize, usize)]) -> LieAlgebra {
        LieAlgebra::new(
            dim,
            br.iter().map(|&(i, j, k)| (i - 1, j - 1, k - 1, Scalar::one())),
        )
        .unwrap()
    }

    #[test]
    fn bracket_basis() {
        let g21 = alg(6, &[(1, 2, 4), (1, 4, 6), (2, 3, 6)]);
        assert_eq!(g21.basis_bracket(0, 1), basis_vector(6, 3));
        assert_eq!(g21.basis_bracket(1, 0), {
            let mut v = basis_vector(6, 3);
            v[3] = -&v[3];
            v
        });
        assert!(g21.basis_bracket(2, 2).iter().all(Scalar::is_zero));
    }

    #[test]
    fn jacobi_rejects_bogus_bracket() {
        let bad = LieAlgebra::from_brackets(
            6,
            [(0, 1, 3), (0, 3, 5), (1, 2, 5), (2, 3, 0)]
                .into_iter()
                .map(|(i, j, k)| (i, j, k, Scalar::one())),
        )
        .unwrap();
        assert!(!bad.jacobi_check().is_empty());
        assert!(LieAlgebra::abelian(6).jacobi_check().is_empty());
    }

    #[test]
    fn series_dims() {
        let dims = |s: Vec<Subspace>| s.iter().map(Subspace::dim).collect::<Vec<_>>();
        assert_eq!(dims(LieAlgebra::abelian(6).descending_series()), vec![6, 0]);
        let g25 = alg(6, &[(1, 2, 3)]);
        assert_eq!(dims(g25.descending_series()), vec![6, 1, 0]);
        assert_eq!(g25.algebra_type(), vec![4, 6]);
        let g21 = alg(6, &[(1, 2, 4), (1, 4, 6), (2, 3, 6)]);
        assert_eq!(g21.algebra_type(), vec![2, 4, 6]);
        assert_eq!(g21.center(), Subspace::coordinate(6, &[4, 5]));
        assert_eq!(LieAlgebra::abelian(6).algebra_type(), vec![6]);
    }

    #[test]
    fn non_nilpotent_series_stalls() {
        // [e1,e2] = e2 is solvable but not nilpotent
        let aff = LieAlgebra::new(2, [(0, 1, 1, Scalar::one())]).unwrap();
        assert!(!aff.is_nilpotent());
        assert_eq!(aff.algebra_type(), Vec::<usize>::new());
    }
}
