//! Finding compatible complex structures.
//!
//! The compatibility condition is linear in `J`, so it is solved exactly.
//! The full system (compatibility, `J^2 = -I`, vanishing Nijenhuis tensor)
//! is quadratic and is only probed numerically by damped Gauss-Newton from
//! seeded random starts. A failed search is evidence, never a proof.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::liealg::LieAlgebra;
use crate::linalg::{Matrix, SideConditions};
use crate::scalar::{FloatBinding, ParamBinding, Relations, Scalar, ScalarError};
use crate::tensors::{almost_complex_residual, compat_residual, nijenhuis, Endomorphism, TwoForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("dimension mismatch between algebra ({0}) and form ({1})")]
    Dimension(usize, usize),
    #[error("non-finite entry in numeric J")]
    NonFinite,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Basis of `{J : w_kj J_i^k + w_is J_j^s = 0}`.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub basis: Vec<Endomorphism>,
    pub side_conditions: SideConditions,
}

impl LinearSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Whether `j` is a combination of the basis.
    pub fn contains(&self, j: &Endomorphism) -> bool {
        let flat = |e: &Endomorphism| e.matrix().entries().to_vec();
        let mut rows: Vec<Vec<Scalar>> = self.basis.iter().map(flat).collect();
        let before = if rows.is_empty() {
            0
        } else {
            Matrix::from_rows(rows.clone()).unwrap().rank()
        };
        rows.push(flat(j));
        Matrix::from_rows(rows).unwrap().rank() == before
    }
}

pub fn compat_nullspace(w: &TwoForm) -> LinearSolution {
    let n = w.dim();
    let om = w.matrix();
    let mut rows = Vec::new();
    // the residual is antisymmetric, so pairs a < b carry every equation
    for a in 0..n {
        for b in a + 1..n {
            let mut row = vec![Scalar::zero(); n * n];
            for k in 0..n {
                row[a * n + k] = &row[a * n + k] + &om[(k, b)];
                row[b * n + k] = &row[b * n + k] + &om[(a, k)];
            }
            rows.push(row);
        }
    }
    let (basis, side) = if rows.is_empty() {
        (Vec::new(), SideConditions::new())
    } else {
        Matrix::from_rows(rows).unwrap().nullspace()
    };
    let basis = basis
        .into_iter()
        .map(|v| Endomorphism::from_matrix(Matrix::from_fn(n, n, |i, k| v[i * n + k].clone())).unwrap())
        .collect();
    LinearSolution {
        basis,
        side_conditions: side,
    }
}

/// Outcome of checking one parameterized structure.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FamilyReport {
    /// 1-based `(i, j)` entries where `w(J., .) + w(., J.)` fails to vanish.
    pub compat_failures: Vec<[usize; 2]>,
    /// 1-based entries of `J^2 + I` that are nonzero.
    pub almost_complex_failures: Vec<[usize; 2]>,
    /// 1-based `(i, j, k)` Nijenhuis components that are nonzero, `i < j`.
    pub nijenhuis_failures: Vec<[usize; 3]>,
    pub side_conditions: Vec<String>,
}

impl FamilyReport {
    pub fn pass(&self) -> bool {
        self.compat_failures.is_empty()
            && self.almost_complex_failures.is_empty()
            && self.nijenhuis_failures.is_empty()
    }

    pub fn is_compatible(&self) -> bool {
        self.compat_failures.is_empty()
    }
}

fn matrix_failures(m: &Matrix, rel: &Relations, upper_only: bool) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if upper_only && j <= i {
                continue;
            }
            if !rel.is_zero(&m[(i, j)]) {
                out.push([i + 1, j + 1]);
            }
        }
    }
    out
}

/// Checks the three pseudo-Kähler conditions symbolically.
pub fn verify_family(alg: &LieAlgebra, w: &TwoForm, j: &Endomorphism, rel: &Relations) -> FamilyReport {
    let mut side = SideConditions::new();
    for e in j.matrix().entries() {
        side.assume_nonzero(e);
    }
    let nij = nijenhuis(alg, j);
    let mut nijenhuis_failures = Vec::new();
    for ([a, b, k], v) in nij.nonzero() {
        if a < b && !rel.is_zero(v) {
            nijenhuis_failures.push([a + 1, b + 1, k + 1]);
        }
    }
    FamilyReport {
        compat_failures: matrix_failures(&compat_residual(w, j), rel, true),
        almost_complex_failures: matrix_failures(&almost_complex_residual(j), rel, false),
        nijenhuis_failures,
        side_conditions: side.to_vec(),
    }
}

/// Structure constants and form as floats.
#[derive(Clone, Debug)]
pub struct NumericProblem {
    dim: usize,
    omega: Vec<f64>,
    constants: Vec<(usize, usize, usize, f64)>,
    // dense C_lm^k
    table: Vec<f64>,
}

fn to_float(s: &Scalar, fb: &FloatBinding) -> Result<f64, ScalarError> {
    s.eval_f64(fb)
}

impl NumericProblem {
    /// Binds every parameter of the algebra and the form.
    pub fn new(alg: &LieAlgebra, w: &TwoForm, binding: &ParamBinding) -> Result<Self, SolverError> {
        if alg.dim() != w.dim() {
            return Err(SolverError::Dimension(alg.dim(), w.dim()));
        }
        let fb = binding.to_float();
        let omega = w
            .matrix()
            .entries()
            .iter()
            .map(|s| to_float(s, &fb))
            .collect::<Result<_, _>>()?;
        let constants = alg
            .nonzero_constants()
            .iter()
            .map(|(i, j, k, c)| Ok((*i, *j, *k, to_float(c, &fb)?)))
            .collect::<Result<_, ScalarError>>()?;
        let n = alg.dim();
        let mut table = vec![0.0; n * n * n];
        for &(i, j, k, v) in &constants {
            table[(i * n + j) * n + k] = v;
        }
        Ok(NumericProblem {
            dim: n,
            omega,
            constants,
            table,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unknowns(&self) -> usize {
        self.dim * self.dim
    }

    fn bracket(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(i, j, k, c) in &self.constants {
            out[k] += x[i] * y[j] * c;
        }
    }

    fn apply(&self, jm: &[f64], x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for k in 0..n {
            out[k] = (0..n).map(|i| x[i] * jm[i * n + k]).sum();
        }
    }

    /// Compatibility (pairs `a<b`), then `J^2 + I`, then Nijenhuis (`a<b`, all `k`).
    pub fn residual(&self, jm: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let om = |i: usize, j: usize| self.omega[i * n + j];
        let mut out = Vec::with_capacity(n * (n - 1) / 2 * (n + 1) + n * n);
        for a in 0..n {
            for b in a + 1..n {
                let mut r = 0.0;
                for k in 0..n {
                    r += om(k, b) * jm[a * n + k] + om(a, k) * jm[b * n + k];
                }
                out.push(r);
            }
        }
        for i in 0..n {
            for k in 0..n {
                let mut r = if i == k { 1.0 } else { 0.0 };
                for l in 0..n {
                    r += jm[i * n + l] * jm[l * n + k];
                }
                out.push(r);
            }
        }
        let rows: Vec<&[f64]> = (0..n).map(|i| &jm[i * n..(i + 1) * n]).collect();
        let (mut e, mut eb) = (vec![0.0; n], vec![0.0; n]);
        let (mut t1, mut t2, mut t3, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for a in 0..n {
            for b in a + 1..n {
                self.bracket(rows[a], rows[b], &mut t1);
                e[b] = 1.0;
                self.bracket(rows[a], &e, &mut tmp);
                e[b] = 0.0;
                self.apply(jm, &tmp, &mut t2);
                e[a] = 1.0;
                self.bracket(&e, rows[b], &mut tmp);
                self.apply(jm, &tmp, &mut t3);
                eb[b] = 1.0;
                self.bracket(&e, &eb, &mut tmp);
                eb[b] = 0.0;
                e[a] = 0.0;
                for k in 0..n {
                    out.push(t1[k] - t2[k] - t3[k] - tmp[k]);
                }
            }
        }
        out
    }

    pub fn sup_residual(&self, jm: &[f64]) -> f64 {
        sup(&self.residual(jm))
    }

    /// Derivatives of `residual` with respect to `J_pq` (column `p*n+q`),
    /// in closed form since every residual is at most quadratic.
    fn jacobian(&self, jm: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let pairs = n * (n - 1) / 2;
        let mut jac = DMatrix::zeros(pairs * (n + 1) + n * n, n * n);
        let om = |i: usize, j: usize| self.omega[i * n + j];
        let jv = |i: usize, k: usize| jm[i * n + k];
        let c = |l: usize, m: usize, k: usize| self.table[(l * n + m) * n + k];
        let mut row = 0;
        for a in 0..n {
            for b in a + 1..n {
                for q in 0..n {
                    jac[(row, a * n + q)] += om(q, b);
                    jac[(row, b * n + q)] += om(a, q);
                }
                row += 1;
            }
        }
        for i in 0..n {
            for k in 0..n {
                for q in 0..n {
                    jac[(row, i * n + q)] += jv(q, k);
                }
                for p in 0..n {
                    jac[(row, p * n + k)] += jv(i, p);
                }
                row += 1;
            }
        }
        // N_ab^k = J_al J_bm C_lm^k - J_al C_lb^m J_mk - J_bl C_al^m J_mk - C_ab^k
        for a in 0..n {
            for b in a + 1..n {
                for k in 0..n {
                    for q in 0..n {
                        let mut da = 0.0;
                        let mut db = 0.0;
                        for m in 0..n {
                            da += jv(b, m) * c(q, m, k) - c(q, b, m) * jv(m, k);
                            db += jv(a, m) * c(m, q, k) - c(a, q, m) * jv(m, k);
                        }
                        jac[(row + k, a * n + q)] += da;
                        jac[(row + k, b * n + q)] += db;
                    }
                    // J_mk with m = p, k = q
                    for p in 0..n {
                        let mut d = 0.0;
                        for l in 0..n {
                            d -= jv(a, l) * c(l, b, p) + jv(b, l) * c(a, l, p);
                        }
                        jac[(row + k, p * n + k)] += d;
                    }
                }
                row += n;
            }
        }
        jac
    }

    /// Central differences; exact up to rounding because every residual is
    /// at most quadratic.
    #[cfg(test)]
    fn jacobian_fd(&self, x: &[f64], m: usize) -> DMatrix<f64> {
        let h = 1e-3;
        let nu = x.len();
        let mut jac = DMatrix::zeros(m, nu);
        let mut xp = x.to_vec();
        for u in 0..nu {
            xp[u] = x[u] + h;
            let fp = self.residual(&xp);
            xp[u] = x[u] - h;
            let fm = self.residual(&xp);
            xp[u] = x[u];
            for r in 0..m {
                jac[(r, u)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        jac
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, b| a.max(b.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub tolerance: f64,
    pub max_starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Starts are `center + U(-spread, spread)` entrywise; the default center
    /// is zero.
    pub center: Option<Vec<f64>>,
    pub spread: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tolerance: 1e-9,
            max_starts: 200,
            seed: 0,
            max_iterations: 60,
            center: None,
            spread: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SearchStatus {
    Converged,
    Failed,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SearchResult {
    pub status: SearchStatus,
    /// Sup norm of the residual at the returned point, or the best one seen.
    pub residual: f64,
    #[serde(rename = "J")]
    pub j: Option<Vec<f64>>,
    pub starts_tried: usize,
    pub seed: u64,
}

const DAMPING_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;
const DIVERGED: f64 = 1e6;
// a start that gains less than 0.1% per step for this many steps is stuck
// near a nonzero local minimum
const STALL_RATIO: f64 = 0.999;
const STALL_STEPS: usize = 5;

/// Least-squares step from the normal equations with a small ridge, which
/// keeps rank-deficient systems (roots on a manifold) solvable. Falls back
/// to SVD when the Cholesky factorization fails.
fn least_squares_step(jac: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let mut normal = jac.tr_mul(jac);
    let scale = normal.diagonal().amax().max(1.0);
    for i in 0..normal.nrows() {
        normal[(i, i)] += 1e-12 * scale;
    }
    let atb = jac.tr_mul(rhs);
    match normal.cholesky() {
        Some(ch) => Some(ch.solve(&atb)),
        None => jac.clone().svd(true, true).solve(rhs, 1e-12).ok(),
    }
}

/// Damped Gauss-Newton from one start; returns the final point and residual.
fn descend(problem: &NumericProblem, mut x: Vec<f64>, opts: &SearchOptions) -> (Vec<f64>, f64) {
    let mut f = problem.residual(&x);
    let m = f.len();
    let mut damping = 1.0_f64;
    let mut stalled = 0;
    for _ in 0..opts.max_iterations {
        let res = sup(&f);
        if res <= opts.tolerance || !res.is_finite() {
            break;
        }
        let jac = problem.jacobian(&x);
        let rhs = DVector::from_iterator(m, f.iter().map(|v| -v));
        let Some(step) = least_squares_step(&jac, &rhs) else {
            break;
        };
        let current = norm2(&f);
        // halve the damping until the residual drops
        let mut accepted = None;
        while damping >= DAMPING_FLOOR {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + damping * s).collect();
            let ft = problem.residual(&trial);
            if norm2(&ft) < current {
                accepted = Some((trial, ft));
                break;
            }
            damping /= 2.0;
        }
        let Some((nx, nf)) = accepted else {
            break;
        };
        stalled = if norm2(&nf) > STALL_RATIO * current { stalled + 1 } else { 0 };
        x = nx;
        f = nf;
        damping = (damping * 2.0).min(1.0);
        if stalled >= STALL_STEPS {
            break;
        }
        if x.iter().any(|v| v.abs() > DIVERGED) {
            break;
        }
    }
    let res = sup(&f);
    (x, if res.is_finite() { res } else { f64::INFINITY })
}

fn start_point(problem: &NumericProblem, opts: &SearchOptions, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let n = problem.unknowns();
    (0..n)
        .map(|u| {
            let c = opts.center.as_ref().map_or(0.0, |c| c[u]);
            c + rng.gen_range(-opts.spread..=opts.spread)
        })
        .collect()
}

/// Searches for a root of the stacked residuals; starts run in parallel and
/// the lowest-index converged start wins, so results are reproducible.
pub fn newton_search(problem: &NumericProblem, opts: &SearchOptions) -> SearchResult {
    let outcomes: Vec<(Vec<f64>, f64)> = (0..opts.max_starts)
        .into_par_iter()
        .map(|i| descend(problem, start_point(problem, opts, i), opts))
        .collect();
    if let Some((i, (x, r))) = outcomes.iter().enumerate().find(|(_, (_, r))| *r <= opts.tolerance) {
        return SearchResult {
            status: SearchStatus::Converged,
            residual: *r,
            j: Some(x.clone()),
            starts_tried: i + 1,
            seed: opts.seed,
        };
    }
    let best = outcomes.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min);
    SearchResult {
        status: SearchStatus::Failed,
        residual: best,
        j: None,
        starts_tried: opts.max_starts,
        seed: opts.seed,
    }
}

/// Numeric value of every entry of `j` under `binding` (with square-related
/// parameters set to their positive roots).
pub fn numeric_matrix(m: &Matrix, binding: &ParamBinding, rel: &Relations) -> Result<Vec<f64>, ScalarError> {
    let mut fb = binding.to_float();
    for (v, c) in rel.iter() {
        let c: f64 = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
        fb.set(v.as_str(), c.sqrt())?;
    }
    m.entries().iter().map(|s| s.eval_f64(&fb)).collect()
}

/// Recomputes all three residuals in exact arithmetic at the rational
/// point nearest each float of `jm`, returning the largest magnitude.
/// Independent of the float residual used by the search.
pub fn exact_sup_residual(
    alg: &LieAlgebra,
    w: &TwoForm,
    binding: &ParamBinding,
    jm: &[f64],
) -> Result<f64, SolverError> {
    let n = alg.dim();
    if jm.len() != n * n || w.dim() != n {
        return Err(SolverError::Dimension(n, w.dim()));
    }
    let entries = jm
        .iter()
        .map(|x| BigRational::from_float(*x).map(Scalar::from_rational).ok_or(SolverError::NonFinite))
        .collect::<Result<Vec<_>, _>>()?;
    let j = Endomorphism::from_matrix(Matrix::from_fn(n, n, |i, k| entries[i * n + k].clone()))
        .map_err(|_| SolverError::Dimension(n, n))?;
    let alg_b = LieAlgebra::from_brackets(
        n,
        alg.nonzero_constants()
            .iter()
            .filter(|(i, jj, _, _)| i < jj)
            .map(|(i, jj, k, c)| Ok((*i, *jj, *k, c.substitute(binding)?)))
            .collect::<Result<Vec<_>, ScalarError>>()?,
    )
    .map_err(|_| SolverError::Dimension(n, n))?;
    let w_b = TwoForm::from_matrix(w.matrix().substitute(binding)?).map_err(|_| SolverError::Dimension(n, n))?;
    let mag = |s: &Scalar| s.to_f64().map_or(f64::INFINITY, f64::abs);
    let mut worst = 0.0_f64;
    for s in compat_residual(&w_b, &j).entries().iter().chain(almost_complex_residual(&j).entries()) {
        worst = worst.max(mag(s));
    }
    for (_, s) in nijenhuis(&alg_b, &j).nonzero() {
        worst = worst.max(mag(s));
    }
    Ok(worst)
}
