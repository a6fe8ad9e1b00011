//! Two-forms, endomorphisms and the residuals that make a pair pseudo-Kähler.
//!
//! Forms store `omega_ij = omega(e_i, e_j)`. An endomorphism stores rows:
//! row `i` holds the coordinates of `J e_i`, so `J e_i = J_i^k e_k`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::liealg::{LieAlgebra, Vector};
use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::scalar::{params_of, ParamBinding, Relations, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("two-form is not antisymmetric")]
    NotAntisymmetric,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("index ({0}, {1}) is not a valid pair i<j")]
    BadPair(usize, usize),
    #[error("parameters must be bound before computing subspaces: {0}")]
    Unbound(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_square(m: &Matrix, dim: usize) -> Result<(), TensorError> {
    if m.rows() != dim || m.cols() != dim {
        return Err(TensorError::Shape {
            expected: dim,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoForm {
    omega: Matrix,
}

impl TwoForm {
    /// `sum c e^i ^ e^j` over 0-based terms `(i, j, c)` with `i < j`.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self, TensorError> {
        let mut omega = Matrix::zeros(dim, dim);
        for (i, j, c) in terms {
            if i >= j || j >= dim {
                return Err(TensorError::BadPair(i + 1, j + 1));
            }
            omega[(i, j)] = &omega[(i, j)] + &c;
            omega[(j, i)] = -&omega[(i, j)];
        }
        Ok(TwoForm { omega })
    }

    pub fn from_matrix(omega: Matrix) -> Result<Self, TensorError> {
        check_square(&omega, omega.rows())?;
        if !omega.is_antisymmetric() {
            return Err(TensorError::NotAntisymmetric);
        }
        Ok(TwoForm { omega })
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.omega
    }

    /// Nonzero upper-triangle entries `(i, j, c)`, 0-based.
    pub fn terms(&self) -> Vec<(usize, usize, Scalar)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.omega[(i, j)].is_zero() {
                    out.push((i, j, self.omega[(i, j)].clone()));
                }
            }
        }
        out
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let wy = self.omega.left_apply(x).expect("vector length");
        wy.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// Relabels the basis: `e_i` becomes `e_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> TwoForm {
        let n = self.dim();
        let mut omega = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                omega[(perm[i], perm[j])] = self.omega[(i, j)].clone();
            }
        }
        TwoForm { omega }
    }

    pub fn nondegenerate(&self) -> bool {
        matches!(self.omega.det(), Ok(d) if !d.is_zero())
    }
}

/// `dw` on basis triples, stored for `i < j < k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeForm {
    dim: usize,
    comps: BTreeMap<(usize, usize, usize), Scalar>,
}

impl ThreeForm {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Scalar {
        let mut idx = [i, j, k];
        let mut sign = false;
        // bubble sort tracks the permutation parity
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = !sign;
                }
            }
        }
        if idx[0] == idx[1] || idx[1] == idx[2] {
            return Scalar::zero();
        }
        let v = self
            .comps
            .get(&(idx[0], idx[1], idx[2]))
            .cloned()
            .unwrap_or_else(Scalar::zero);
        if sign {
            -v
        } else {
            v
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Scalar)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
}

/// `dw(X,Y,Z) = w([X,Y],Z) - w([X,Z],Y) + w([Y,Z],X)` on basis triples.
pub fn exterior_d(alg: &LieAlgebra, w: &TwoForm) -> ThreeForm {
    let n = alg.dim();
    let e = |i| crate::liealg::basis_vector(n, i);
    let mut comps = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = &(&w.eval(&alg.basis_bracket(i, j), &e(k))
                    - &w.eval(&alg.basis_bracket(i, k), &e(j)))
                    + &w.eval(&alg.basis_bracket(j, k), &e(i));
                if !v.is_zero() {
                    comps.insert((i, j, k), v);
                }
            }
        }
    }
    ThreeForm { dim: n, comps }
}

pub fn is_closed(alg: &LieAlgebra, w: &TwoForm) -> bool {
    exterior_d(alg, w).is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    j: Matrix,
}

impl Endomorphism {
    pub fn from_matrix(j: Matrix) -> Result<Self, TensorError> {
        check_square(&j, j.rows())?;
        Ok(Endomorphism { j })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, TensorError> {
        Self::from_matrix(Matrix::from_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Endomorphism {
            j: Matrix::identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Endomorphism {
            j: Matrix::zeros(dim, dim),
        }
    }

    /// Sets `J e_a = c e_b` and `J e_b = -1/c e_a` for each `(a, b, c)`.
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize, Scalar)]) -> Result<Self, TensorError> {
        let mut j = Matrix::zeros(dim, dim);
        for (a, b, c) in pairs {
            j[(*a, *b)] = c.clone();
            j[(*b, *a)] = -c.inv()?;
        }
        Ok(Endomorphism { j })
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.j
    }

    /// `J_i^k`.
    pub fn get(&self, i: usize, k: usize) -> &Scalar {
        &self.j[(i, k)]
    }

    /// `J X` for `X = sum X_i e_i`.
    pub fn apply(&self, x: &[Scalar]) -> Vector {
        self.j.left_apply(x).expect("vector length")
    }

    pub fn params(&self) -> Vec<String> {
        params_of(self.j.entries())
            .into_iter()
            .map(|v| v.as_str().to_string())
            .collect()
    }

    pub fn substitute(&self, binding: &ParamBinding) -> Result<Endomorphism, ScalarError> {
        Ok(Endomorphism {
            j: self.j.substitute(binding)?,
        })
    }

    pub fn reduce(&self, rel: &Relations) -> Result<Endomorphism, ScalarError> {
        Ok(Endomorphism {
            j: self.j.try_map(|s| rel.reduce(s))?,
        })
    }

    pub fn permuted(&self, perm: &[usize]) -> Endomorphism {
        let n = self.dim();
        let mut j = Matrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                j[(perm[i], perm[k])] = self.j[(i, k)].clone();
            }
        }
        Endomorphism { j }
    }

    pub fn lin_comb(&self, a: &Scalar, other: &Endomorphism, b: &Scalar) -> Endomorphism {
        Endomorphism {
            j: self.j.scale(a).add(&other.j.scale(b)).expect("same shape"),
        }
    }
}

/// Dense `dim^3` array indexed `[i][j][k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<Scalar>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Tensor3 {
            dim,
            data: vec![Scalar::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Scalar) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn nonzero(&self) -> Vec<([usize; 3], &Scalar)> {
        let n = self.dim;
        let mut out = Vec::new();
        for (idx, v) in self.data.iter().enumerate() {
            if !v.is_zero() {
                out.push(([idx / (n * n), (idx / n) % n, idx % n], v));
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Result<Scalar, ScalarError>) -> Result<Self, ScalarError> {
        Ok(Tensor3 {
            dim: self.dim,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }
}

/// `N_ij^k = J_i^l J_j^m C_lm^k - J_i^l J_m^k C_lj^m - J_j^l J_m^k C_il^m - C_ij^k`,
/// evaluated as `[Je_i,Je_j] - J[Je_i,e_j] - J[e_i,Je_j] - [e_i,e_j]`.
pub fn nijenhuis(alg: &LieAlgebra, j: &Endomorphism) -> Tensor3 {
    let n = alg.dim();
    let mut out = Tensor3::zeros(n);
    let images: Vec<Vector> = (0..n).map(|i| j.apply(&crate::liealg::basis_vector(n, i))).collect();
    for a in 0..n {
        for b in a + 1..n {
            let ea = crate::liealg::basis_vector(n, a);
            let eb = crate::liealg::basis_vector(n, b);
            let t1 = alg.bracket(&images[a], &images[b]).unwrap();
            let t2 = j.apply(&alg.bracket(&images[a], &eb).unwrap());
            let t3 = j.apply(&alg.bracket(&ea, &images[b]).unwrap());
            let t4 = alg.basis_bracket(a, b);
            for k in 0..n {
                let v = &(&(&t1[k] - &t2[k]) - &t3[k]) - &t4[k];
                if !v.is_zero() {
                    out.set(b, a, k, -&v);
                    out.set(a, b, k, v);
                }
            }
        }
    }
    out
}

pub fn is_integrable(alg: &LieAlgebra, j: &Endomorphism) -> bool {
    nijenhuis(alg, j).is_zero()
}

/// Entry `(i, j)` is `omega_kj J_i^k + omega_is J_j^s`.
pub fn compat_residual(w: &TwoForm, j: &Endomorphism) -> Matrix {
    let n = w.dim();
    let om = w.matrix();
    let jm = j.matrix();
    Matrix::from_fn(n, n, |a, b| {
        let mut acc = Scalar::zero();
        for k in 0..n {
            let jk = &jm[(a, k)];
            if !jk.is_zero() && !om[(k, b)].is_zero() {
                acc = &acc + &(&om[(k, b)] * jk);
            }
            let js = &jm[(b, k)];
            if !js.is_zero() && !om[(a, k)].is_zero() {
                acc = &acc + &(&om[(a, k)] * js);
            }
        }
        acc
    })
}

pub fn is_compatible(w: &TwoForm, j: &Endomorphism) -> bool {
    compat_residual(w, j).is_zero()
}

/// `J^2 + I`.
pub fn almost_complex_residual(j: &Endomorphism) -> Matrix {
    let n = j.dim();
    j.matrix()
        .mul(j.matrix())
        .and_then(|sq| sq.add(&Matrix::identity(n)))
        .expect("square matrix")
}

fn require_bound(j: &Endomorphism) -> Result<(), TensorError> {
    let params = j.params();
    if params.is_empty() {
        Ok(())
    } else {
        Err(TensorError::Unbound(params.join(", ")))
    }
}

/// `a_0 = 0`, `a_l = {X : [X,g] and [JX,g] lie in a_{l-1}}`, until stable.
/// Requires a numeric `J`, since ranks can jump on parameter subvarieties.
pub fn j_ascending_series(alg: &LieAlgebra, j: &Endomorphism) -> Result<Vec<Subspace>, TensorError> {
    require_bound(j)?;
    let n = alg.dim();
    let id = Matrix::identity(n);
    let mut series = Vec::new();
    let mut prev = Subspace::zero(n);
    loop {
        let next = alg.bracket_preimage(&prev, &[&id, j.matrix()]);
        if next.dim() == prev.dim() {
            return Ok(series);
        }
        series.push(next.clone());
        if next.dim() == n {
            return Ok(series);
        }
        prev = next;
    }
}

pub fn is_nilpotent_j(alg: &LieAlgebra, j: &Endomorphism) -> Result<bool, TensorError> {
    Ok(j_ascending_series(alg, j)?
        .last()
        .is_some_and(|s| s.dim() == alg.dim()))
}

/// `[Je_i, Je_j] = [e_i, e_j]` for all `i < j`.
pub fn is_abelian_j(alg: &LieAlgebra, j: &Endomorphism) -> bool {
    let n = alg.dim();
    let images: Vec<Vector> = (0..n).map(|i| j.apply(&crate::liealg::basis_vector(n, i))).collect();
    (0..n).all(|a| {
        (a + 1..n).all(|b| alg.bracket(&images[a], &images[b]).unwrap() == alg.basis_bracket(a, b))
    })
}
