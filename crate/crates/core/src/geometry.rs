//! The associated metric `g(X,Y) = w(X,JY)` and its Levi-Civita curvature.
//!
//! Everything is exact. When side relations are present (a square root
//! encoded as a parameter) intermediate results are reduced after each
//! stage; reduction is a ring map so identities survive it.

use serde::Serialize;
use thiserror::Error;

use crate::liealg::LieAlgebra;
use crate::linalg::{LinalgError, Matrix, SideConditions, Subspace};
use crate::scalar::{params_of, ParamBinding, Relations, Scalar, ScalarError};
use crate::tensors::{Endomorphism, Tensor3, TwoForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("associated metric is not symmetric at ({0}, {1}); the pair is not compatible")]
    Asymmetric(usize, usize),
    #[error("metric is degenerate")]
    Singular,
    #[error("side condition {0} vanishes under the side relations")]
    DegenerateCondition(String),
    #[error("parameters left unbound: {0}")]
    Unbound(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    g: Matrix,
    g_inv: Matrix,
    side_conditions: SideConditions,
}

impl Metric {
    /// Wraps a symmetric nondegenerate matrix.
    pub fn new(g: Matrix, rel: &Relations) -> Result<Self, GeometryError> {
        let g = g.try_map(|s| rel.reduce(s))?;
        for i in 0..g.rows() {
            for j in i + 1..g.cols() {
                if g[(i, j)] != g[(j, i)] {
                    return Err(GeometryError::Asymmetric(i + 1, j + 1));
                }
            }
        }
        let (g_inv, _) = g.inverse().map_err(|e| match e {
            LinalgError::Singular => GeometryError::Singular,
            other => other.into(),
        })?;
        // The pivots used for the inverse depend on elimination order, so the
        // reported conditions are the intrinsic ones: entries defined and
        // det g invertible.
        let mut side = SideConditions::new();
        for s in g.entries() {
            side.assume_nonzero(&Scalar::from_poly(s.denom().clone()));
        }
        side.assume_nonzero(&rel.reduce(&g.det()?)?);
        if !rel.is_empty() {
            for c in side.iter() {
                let p = crate::scalar::parse_expr(c)?;
                if rel.is_zero(&p) {
                    return Err(GeometryError::DegenerateCondition(c.to_string()));
                }
            }
        }
        let g_inv = g_inv.try_map(|s| rel.reduce(s))?;
        Ok(Metric {
            g,
            g_inv,
            side_conditions: side,
        })
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn g_inv(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn side_conditions(&self) -> &SideConditions {
        &self.side_conditions
    }
}

/// `g_ij = w_is J_j^s`, i.e. `g = w J^T`.
pub fn associated_metric(w: &TwoForm, j: &Endomorphism, rel: &Relations) -> Result<Metric, GeometryError> {
    let g = w.matrix().mul(&j.matrix().transpose())?;
    Metric::new(g, rel)
}

/// Levi-Civita connection of a left-invariant metric: `nabla_{e_i} e_j = Gamma_ij^k e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    gamma: Tensor3,
}

impl Connection {
    pub fn gamma(&self) -> &Tensor3 {
        &self.gamma
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        self.gamma.get(i, j, k)
    }

    /// `nabla_X Y` for coordinate vectors.
    pub fn apply(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.gamma.dim();
        let mut out = vec![Scalar::zero(); n];
        for ([i, j, k], v) in self.gamma.nonzero() {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            out[k] = &out[k] + &(&(&x[i] * &y[j]) * v);
        }
        out
    }
}

fn accumulate(t: &mut Tensor3, i: usize, j: usize, k: usize, v: Scalar) {
    if !v.is_zero() {
        let cur = t.get(i, j, k);
        let next = cur + &v;
        t.set(i, j, k, next);
    }
}

/// `Gamma_ij^n = 1/2 g^{kn} (g_pk C_ij^p + g_pj C_ki^p + g_ip C_kj^p)`.
pub fn christoffel(alg: &LieAlgebra, metric: &Metric, rel: &Relations) -> Result<Connection, GeometryError> {
    let n = alg.dim();
    let g = metric.g();
    // lowered[i][j][k] = g_pk C_ij^p + g_pj C_ki^p + g_ip C_kj^p
    let mut lowered = Tensor3::zeros(n);
    for (a, b, p, c) in alg.nonzero_constants() {
        for x in 0..n {
            let gp = &g[(*p, x)];
            if gp.is_zero() {
                continue;
            }
            let v = gp * c;
            accumulate(&mut lowered, *a, *b, x, v.clone()); // C_ab^p g_px at (i,j,k) = (a,b,x)
            accumulate(&mut lowered, *b, x, *a, v.clone()); // C_ki^p with (k,i) = (a,b), j = x
            accumulate(&mut lowered, x, *b, *a, v); // C_kj^p with (k,j) = (a,b), i = x
        }
    }
    let half = Scalar::from_rational(num_rational::BigRational::new(1.into(), 2.into()));
    let gi = metric.g_inv();
    let mut gamma = Tensor3::zeros(n);
    for ([i, j, k], v) in lowered.nonzero() {
        for m in 0..n {
            let inv = &gi[(k, m)];
            if !inv.is_zero() {
                accumulate(&mut gamma, i, j, m, &(v * inv) * &half);
            }
        }
    }
    let gamma = if rel.is_empty() { gamma } else { gamma.map(|s| rel.reduce(s))? };
    Ok(Connection { gamma })
}

/// Dense `dim^4` array indexed `[i][j][k][l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<Scalar>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Tensor4 {
            dim,
            data: vec![Scalar::zero(); dim.pow(4)],
        }
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Scalar {
        &self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: Scalar) {
        let at = self.idx(i, j, k, l);
        self.data[at] = v;
    }

    fn add_at(&mut self, i: usize, j: usize, k: usize, l: usize, v: &Scalar) {
        if !v.is_zero() {
            let at = self.idx(i, j, k, l);
            self.data[at] = &self.data[at] + v;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn nonzero(&self) -> Vec<([usize; 4], &Scalar)> {
        let n = self.dim;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(at, v)| ([at / (n * n * n), (at / (n * n)) % n, (at / n) % n, at % n], v))
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Result<Scalar, ScalarError>) -> Result<Self, ScalarError> {
        Ok(Tensor4 {
            dim: self.dim,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn params(&self) -> Vec<String> {
        params_of(self.data.iter())
            .into_iter()
            .map(|v| v.as_str().to_string())
            .collect()
    }

    /// Contracts `T` with `m` on slot `slot`: `sum_a T[..a..] m[a][b]`.
    fn contract_slot(&self, slot: usize, m: &Matrix) -> Tensor4 {
        let n = self.dim;
        let mut out = Tensor4::zeros(n);
        for (idx, v) in self.nonzero() {
            let a = idx[slot];
            for b in 0..n {
                let w = &m[(a, b)];
                if w.is_zero() {
                    continue;
                }
                let mut t = idx;
                t[slot] = b;
                out.add_at(t[0], t[1], t[2], t[3], &(v * w));
            }
        }
        out
    }
}

/// `R_ijk^s = Gamma_ip^s Gamma_jk^p - Gamma_jp^s Gamma_ik^p - C_ij^p Gamma_pk^s`,
/// stored at `[i][j][k][s]`.
pub fn curvature(alg: &LieAlgebra, conn: &Connection, rel: &Relations) -> Result<Tensor4, GeometryError> {
    let n = alg.dim();
    let gamma = conn.gamma();
    let nz = gamma.nonzero();
    let mut up = Tensor4::zeros(n);
    // Gamma_ip^s Gamma_jk^p contributes to (i,j,k,s); its mirror to (j,i,k,s)
    for ([j, k, p], g2) in &nz {
        for i in 0..n {
            for s in 0..n {
                let g1 = gamma.get(i, *p, s);
                if g1.is_zero() {
                    continue;
                }
                let v = g1 * *g2;
                up.add_at(i, *j, *k, s, &v);
                up.add_at(*j, i, *k, s, &-v);
            }
        }
    }
    for (i, j, p, c) in alg.nonzero_constants() {
        for k in 0..n {
            for s in 0..n {
                let g = gamma.get(*p, k, s);
                if !g.is_zero() {
                    up.add_at(*i, *j, k, s, &-(c * g));
                }
            }
        }
    }
    Ok(if rel.is_empty() { up } else { up.map(|s| rel.reduce(s))? })
}

/// `R_ijkl = R_ijk^s g_sl`.
pub fn lower_curvature(up: &Tensor4, metric: &Metric, rel: &Relations) -> Result<Tensor4, GeometryError> {
    let down = up.contract_slot(3, metric.g());
    Ok(if rel.is_empty() { down } else { down.map(|s| rel.reduce(s))? })
}

/// `Ric_jk = sum_i R_ijk^i`.
pub fn ricci(up: &Tensor4) -> Matrix {
    let n = up.dim();
    Matrix::from_fn(n, n, |j, k| (0..n).map(|i| up.get(i, j, k, i).clone()).sum())
}

/// `g(R,R) = R_ijkl R_pqrs g^ip g^jq g^kr g^ls`, computed as
/// `R_ijkl R^{ijk}_l... ` by raising three slots of the up tensor.
pub fn curvature_norm(up: &Tensor4, down: &Tensor4, metric: &Metric, rel: &Relations) -> Result<Scalar, GeometryError> {
    let gi = metric.g_inv();
    // R_pqr^l raised on p, q, r gives R^{ijkl} when contracted with g^{..}
    let raised = up.contract_slot(0, gi).contract_slot(1, gi).contract_slot(2, gi);
    let mut acc = Scalar::zero();
    for ([i, j, k, l], v) in down.nonzero() {
        let w = raised.get(i, j, k, l);
        if !w.is_zero() {
            acc = &acc + &(v * w);
        }
    }
    Ok(rel.reduce(&acc)?)
}

/// `R(X,Y)Z`.
pub fn curvature_apply(up: &Tensor4, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Vec<Scalar> {
    let n = up.dim();
    let mut out = vec![Scalar::zero(); n];
    for ([i, j, k, s], v) in up.nonzero() {
        if x[i].is_zero() || y[j].is_zero() || z[k].is_zero() {
            continue;
        }
        out[s] = &out[s] + &(&(&(&x[i] * &y[j]) * &z[k]) * v);
    }
    out
}

/// Everything derived from a compatible pair.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub metric: Metric,
    pub connection: Connection,
    pub up: Tensor4,
    pub down: Tensor4,
    pub ricci: Matrix,
    pub norm: Scalar,
    pub relations: Relations,
}

impl Geometry {
    pub fn compute(alg: &LieAlgebra, w: &TwoForm, j: &Endomorphism, rel: &Relations) -> Result<Self, GeometryError> {
        let metric = associated_metric(w, j, rel)?;
        Self::from_metric(alg, metric, rel)
    }

    pub fn from_metric(alg: &LieAlgebra, metric: Metric, rel: &Relations) -> Result<Self, GeometryError> {
        let connection = christoffel(alg, &metric, rel)?;
        let up = curvature(alg, &connection, rel)?;
        let down = lower_curvature(&up, &metric, rel)?;
        let ricci = ricci(&up).try_map(|s| rel.reduce(s))?;
        let norm = curvature_norm(&up, &down, &metric, rel)?;
        Ok(Geometry {
            metric,
            connection,
            up,
            down,
            ricci,
            norm,
            relations: rel.clone(),
        })
    }

    pub fn substitute(&self, binding: &ParamBinding) -> Result<Self, GeometryError> {
        let sub = |s: &Scalar| s.substitute(binding);
        Ok(Geometry {
            metric: Metric {
                g: self.metric.g.try_map(sub)?,
                g_inv: self.metric.g_inv.try_map(sub)?,
                side_conditions: self.metric.side_conditions.clone(),
            },
            connection: Connection {
                gamma: self.connection.gamma.map(sub)?,
            },
            up: self.up.map(sub)?,
            down: self.down.map(sub)?,
            ricci: self.ricci.try_map(sub)?,
            norm: self.norm.substitute(binding)?,
            relations: self.relations.clone(),
        })
    }

    pub fn report(&self) -> CurvatureReport {
        let one_based = |idx: [usize; 4]| idx.map(|i| i + 1);
        let up_components = self
            .up
            .nonzero()
            .into_iter()
            .filter(|(idx, _)| idx[0] < idx[1])
            .map(|(idx, v)| Component {
                idx: one_based(idx),
                value: v.to_string(),
            })
            .collect();
        let down_components = self
            .down
            .nonzero()
            .into_iter()
            .filter(|(idx, _)| idx[0] < idx[1] && idx[2] < idx[3] && (idx[0], idx[1]) <= (idx[2], idx[3]))
            .map(|(idx, v)| Component {
                idx: one_based(idx),
                value: v.to_string(),
            })
            .collect();
        CurvatureReport {
            up_components,
            down_components,
            ricci_zero: self.ricci.is_zero(),
            norm: self.norm.to_string(),
            side_conditions: self.metric.side_conditions.to_vec(),
            relations: self.relations.to_strings(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Component {
    pub idx: [usize; 4],
    pub value: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CurvatureReport {
    pub up_components: Vec<Component>,
    pub down_components: Vec<Component>,
    pub ricci_zero: bool,
    pub norm: String,
    pub side_conditions: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
}

/// Failures of `Gamma_ij^k - Gamma_ji^k = C_ij^k`, as 1-based `(i, j, k)`.
pub fn torsion_violations(alg: &LieAlgebra, conn: &Connection, rel: &Relations) -> Vec<[usize; 3]> {
    let n = alg.dim();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let t = &(conn.get(i, j, k) - conn.get(j, i, k)) - alg.c(i, j, k);
                if !rel.is_zero(&t) {
                    bad.push([i + 1, j + 1, k + 1]);
                }
            }
        }
    }
    bad
}

/// Failures of `Gamma_ij^s g_sk + Gamma_ik^s g_js = 0`.
pub fn metric_violations(conn: &Connection, metric: &Metric, rel: &Relations) -> Vec<[usize; 3]> {
    let n = metric.dim();
    let g = metric.g();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut acc = Scalar::zero();
                for s in 0..n {
                    acc = &acc + &(conn.get(i, j, s) * &g[(s, k)]);
                    acc = &acc + &(conn.get(i, k, s) * &g[(j, s)]);
                }
                if !rel.is_zero(&acc) {
                    bad.push([i + 1, j + 1, k + 1]);
                }
            }
        }
    }
    bad
}

/// Failures of `R_ijk^s + R_jki^s + R_kij^s = 0`.
pub fn bianchi_violations(up: &Tensor4, rel: &Relations) -> Vec<[usize; 4]> {
    let n = up.dim();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for s in 0..n {
                    let t = &(up.get(i, j, k, s) + up.get(j, k, i, s)) + up.get(k, i, j, s);
                    if !rel.is_zero(&t) {
                        bad.push([i + 1, j + 1, k + 1, s + 1]);
                    }
                }
            }
        }
    }
    bad
}

/// Failures of `R_ijkl = R_klij`.
pub fn pair_symmetry_violations(down: &Tensor4, rel: &Relations) -> Vec<[usize; 4]> {
    let n = down.dim();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if (i, j) < (k, l) && !rel.is_zero(&(down.get(i, j, k, l) - down.get(k, l, i, j))) {
                        bad.push([i + 1, j + 1, k + 1, l + 1]);
                    }
                }
            }
        }
    }
    bad
}

/// Sylvester signature `(positives, negatives)` after binding every parameter.
/// Parameters carrying a square relation may stay unbound; the matrix is then
/// evaluated in floating point at the positive root.
pub fn signature(g: &Matrix, binding: &ParamBinding, rel: &Relations) -> Result<(usize, usize), GeometryError> {
    let bound = g.substitute(binding)?;
    let left: Vec<String> = params_of(bound.entries())
        .into_iter()
        .filter(|v| !rel.vars().any(|r| r == *v))
        .map(|v| v.as_str().to_string())
        .collect();
    if !left.is_empty() {
        return Err(GeometryError::Unbound(left.join(", ")));
    }
    if bound.entries().iter().all(Scalar::is_constant) {
        return exact_signature(bound);
    }
    float_signature(&bound, rel)
}

fn exact_signature(mut m: Matrix) -> Result<(usize, usize), GeometryError> {
    let n = m.rows();
    let (mut pos, mut neg) = (0, 0);
    let mut alive: Vec<usize> = (0..n).collect();
    while let Some(&first) = alive.first() {
        let pivot = alive.iter().copied().find(|&i| !m[(i, i)].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // zero diagonal: add a row/column with a nonzero coupling
                let Some((a, b)) = alive
                    .iter()
                    .flat_map(|&a| alive.iter().map(move |&b| (a, b)))
                    .find(|&(a, b)| a != b && !m[(a, b)].is_zero())
                else {
                    return Err(GeometryError::Singular);
                };
                for c in 0..n {
                    let v = &m[(a, c)] + &m[(b, c)];
                    m[(a, c)] = v;
                }
                for r in 0..n {
                    let v = &m[(r, a)] + &m[(r, b)];
                    m[(r, a)] = v;
                }
                a
            }
        };
        let _ = first;
        let d = m[(p, p)].clone();
        let sign = d.as_rational().expect("numeric");
        if sign > num_rational::BigRational::from_integer(0.into()) {
            pos += 1;
        } else {
            neg += 1;
        }
        alive.retain(|&i| i != p);
        let inv = d.inv()?;
        for &r in &alive {
            let f = &m[(r, p)] * &inv;
            if f.is_zero() {
                continue;
            }
            for &c in &alive {
                let v = &m[(r, c)] - &(&f * &m[(p, c)]);
                m[(r, c)] = v;
            }
        }
    }
    Ok((pos, neg))
}

fn float_signature(m: &Matrix, rel: &Relations) -> Result<(usize, usize), GeometryError> {
    let mut fb = crate::scalar::FloatBinding::default();
    for (v, c) in rel.iter() {
        let c: f64 = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
        fb.set(v.as_str(), c.sqrt())?;
    }
    let n = m.rows();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(m[(i, j)].eval_f64(&fb)?);
        }
    }
    let dm = nalgebra::DMatrix::from_row_slice(n, n, &data);
    let eig = nalgebra::SymmetricEigen::new(dm);
    let scale = eig.eigenvalues.amax().max(1.0);
    let (mut pos, mut neg) = (0, 0);
    for &e in eig.eigenvalues.iter() {
        if e.abs() <= 1e-12 * scale {
            return Err(GeometryError::Singular);
        } else if e > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    Ok((pos, neg))
}

/// A check outcome with a short name.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StructureReport {
    pub hypotheses: Vec<Check>,
    pub conclusions: Vec<Check>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.hypotheses.iter().chain(&self.conclusions).all(|c| c.pass)
    }
}

/// Coordinate split `g = A + B + Z` given by 0-based basis indices.
#[derive(Clone, Debug)]
pub struct Split {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub z: Vec<usize>,
}

impl Split {
    /// `A = {e1,e2}`, `B = {e3,e4}`, `Z = {e5,e6}`.
    pub fn standard() -> Self {
        Split {
            a: vec![0, 1],
            b: vec![2, 3],
            z: vec![4, 5],
        }
    }
}

/// Checks the hypotheses and conclusions of the structure theorem for
/// type (2,4,6) algebras: connection containments, flatness along `B+Z`,
/// curvature landing in the center and the four-component pattern.
pub fn type246_structure_check(
    alg: &LieAlgebra,
    w: &TwoForm,
    geo: &Geometry,
    split: &Split,
) -> StructureReport {
    let n = alg.dim();
    let rel = &geo.relations;
    let om = w.matrix();
    let bz: Vec<usize> = split.b.iter().chain(&split.z).copied().collect();
    let series = alg.ascending_series();
    let block = |rows: &[usize], cols: &[usize]| {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| om[(rows[r], cols[c])].clone())
    };
    let nondeg = |m: Matrix| m.is_square() && m.rows() > 0 && matches!(m.det(), Ok(d) if !rel.is_zero(&d));
    let hyp = vec![
        ("type (2,4,6)", alg.algebra_type() == vec![2, 4, 6]),
        (
            "Z is the center",
            series.first().is_some_and(|c| *c == Subspace::coordinate(n, &split.z)),
        ),
        (
            "B+Z is the second center",
            series.get(1).is_some_and(|c| *c == Subspace::coordinate(n, &bz)),
        ),
        (
            "B+Z abelian",
            bz.iter().all(|&x| bz.iter().all(|&y| alg.basis_bracket(x, y).iter().all(Scalar::is_zero))),
        ),
        ("A isotropic", block(&split.a, &split.a).is_zero()),
        ("Z isotropic", block(&split.z, &split.z).is_zero()),
        ("A and Z dual", nondeg(block(&split.a, &split.z))),
        ("w nondegenerate on B", nondeg(block(&split.b, &split.b))),
    ];

    let g = geo.connection.gamma();
    let lands_in = |i: usize, j: usize, allowed: &[usize]| {
        (0..n).all(|k| allowed.contains(&k) || rel.is_zero(g.get(i, j, k)))
    };
    let all_pairs = |xs: &[usize], ys: &[usize], allowed: &[usize], both: bool| {
        xs.iter().all(|&x| {
            ys.iter()
                .all(|&y| lands_in(x, y, allowed) && (!both || lands_in(y, x, allowed)))
        })
    };
    let up = &geo.up;
    let r_zero = |pred: &dyn Fn(usize, usize, usize, usize) -> bool| {
        up.nonzero().iter().all(|([i, j, k, s], v)| !pred(*i, *j, *k, *s) || rel.is_zero(v))
    };
    let in_bz = |x: usize| bz.contains(&x);
    let in_a = |x: usize| split.a.contains(&x);
    let in_z = |x: usize| split.z.contains(&x);
    let conc = vec![
        ("nabla_A A in B+Z", all_pairs(&split.a, &split.a, &bz, false)),
        ("nabla_A B, nabla_B A in Z", all_pairs(&split.a, &split.b, &split.z, true)),
        ("nabla_A Z = nabla_Z A = 0", all_pairs(&split.a, &split.z, &[], true)),
        ("nabla on B+Z vanishes", all_pairs(&bz, &bz, &[], false)),
        (
            "R(X,Y)Z = R(Z,Y)X = 0 for X in B+Z",
            r_zero(&|i, _, k, _| in_bz(i) || in_bz(k)),
        ),
        ("R(X,Y)Z lies in Z", r_zero(&|_, _, _, s| !in_z(s))),
        (
            "only R_{a,b,c}^z components",
            r_zero(&|i, j, k, s| !(in_a(i) && in_a(j) && in_a(k) && in_z(s))),
        ),
        ("Ricci zero", geo.ricci.entries().iter().all(|v| rel.is_zero(v))),
        ("norm zero", rel.is_zero(&geo.norm)),
    ];
    let to_checks = |v: Vec<(&str, bool)>| {
        v.into_iter()
            .map(|(name, pass)| Check {
                name: name.to_string(),
                pass,
            })
            .collect()
    };
    StructureReport {
        hypotheses: to_checks(hyp),
        conclusions: to_checks(conc),
    }
}
