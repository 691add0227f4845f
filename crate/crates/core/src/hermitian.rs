//! Dense Hermitian operators over tensor products of finite-dimensional
//! factors.
//!
//! Subsystems are addressed positionally: factor `0` is the leftmost tensor
//! factor and index arithmetic is row-major (the last factor varies fastest).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-10;

const EIG_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Trace,
    Operator,
    Frobenius,
}

/// Eigendecomposition with eigenvalues sorted in descending order; column
/// `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct HermitianOperator {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl HermitianOperator {
    /// Builds an operator, symmetrizing `(M + M†)/2` when `M` is Hermitian
    /// within [`DEFAULT_HERMITIAN_TOL`].
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        Self::with_tolerance(dims, mat, DEFAULT_HERMITIAN_TOL)
    }

    pub fn with_tolerance(dims: Vec<usize>, mat: CMatrix, tol: f64) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "factor dimensions must be positive, got {dims:?}"
            )));
        }
        let side: usize = dims.iter().product();
        if mat.nrows() != side || mat.ncols() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: mat.nrows().max(mat.ncols()),
            });
        }
        let mut deviation = 0.0f64;
        for i in 0..side {
            for j in i..side {
                deviation = deviation.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        Ok(Self::from_parts_unchecked(dims, hermitize(mat)))
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), dims.iter().product::<usize>());
        Self { dims, mat }
    }

    pub fn from_real(dims: Vec<usize>, mat: &DMatrix<f64>) -> Result<Self> {
        Self::new(dims, mat.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let side = dims.iter().product();
        Self::from_parts_unchecked(dims, CMatrix::identity(side, side))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let side: usize = dims.iter().product();
        Self::identity(dims).scaled(1.0 / side as f64)
    }

    pub fn diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if diag.len() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: diag.len(),
            });
        }
        let mut mat = CMatrix::zeros(side, side);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(v, 0.0);
        }
        Ok(Self::from_parts_unchecked(dims, mat))
    }

    /// Projector onto `psi / |psi|`.
    pub fn pure(dims: Vec<usize>, psi: &DVector<C64>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if psi.len() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: psi.len(),
            });
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        let mat = &v * v.adjoint();
        Ok(Self::from_parts_unchecked(dims, mat))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr(self · other)`, real for Hermitian arguments.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        frobenius_inner(&self.mat, &other.mat)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_parts_unchecked(self.dims.clone(), self.mat.map(|z| z * s))
    }

    /// `a·self + b·other`; factor dimensions must agree.
    pub fn combine(&self, a: f64, other: &HermitianOperator, b: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let mat = self.mat.map(|z| z * a) + other.mat.map(|z| z * b);
        Ok(Self::from_parts_unchecked(self.dims.clone(), mat))
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if side != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: side,
            });
        }
        Ok(Self::from_parts_unchecked(dims, self.mat.clone()))
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts_unchecked(dims, self.mat.kronecker(&other.mat))
    }

    /// Traces out the listed factors; the kept factors stay in their
    /// original order.
    pub fn partial_trace(&self, traced: &[usize]) -> Result<Self> {
        let (dims, mat) = partial_trace_raw(&self.dims, &self.mat, traced)?;
        Ok(Self::from_parts_unchecked(dims, mat))
    }

    /// Keeps only the listed factors (in ascending order).
    pub fn reduce_to(&self, kept: &[usize]) -> Result<Self> {
        self.check_factors(kept)?;
        let traced: Vec<usize> = (0..self.dims.len()).filter(|f| !kept.contains(f)).collect();
        self.partial_trace(&traced)
    }

    pub fn partial_transpose(&self, factors: &[usize]) -> Result<Self> {
        let mat = partial_transpose_raw(&self.dims, &self.mat, factors)?;
        Ok(Self::from_parts_unchecked(self.dims.clone(), mat))
    }

    pub fn eig(&self) -> Result<Eigen> {
        eigh(&self.mat)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("non-empty operator"))
    }

    pub fn norm(&self, kind: NormKind) -> Result<f64> {
        match kind {
            NormKind::Frobenius => Ok(self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()),
            NormKind::Trace => Ok(self.eigenvalues()?.iter().map(|l| l.abs()).sum()),
            NormKind::Operator => Ok(self
                .eigenvalues()?
                .iter()
                .fold(0.0f64, |m, l| m.max(l.abs()))),
        }
    }

    /// Minus the sum of the negative eigenvalues of the partial transpose
    /// over `cut`.
    pub fn negativity(&self, cut: &[usize]) -> Result<f64> {
        let pt = self.partial_transpose(cut)?;
        Ok(-pt
            .eigenvalues()?
            .into_iter()
            .filter(|&l| l < 0.0)
            .sum::<f64>())
    }

    pub fn is_ppt(&self, cut: &[usize], tol: f64) -> Result<bool> {
        Ok(self.partial_transpose(cut)?.min_eigenvalue()? >= -tol)
    }

    /// Applies the depolarizing channel `(1-p)·X + p·tr_f(X) ⊗ I/d_f` on
    /// factor `factor`.
    pub fn depolarize(&self, p: f64, factor: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidProbability(p));
        }
        self.check_factors(&[factor])?;
        if p == 0.0 {
            return Ok(self.clone());
        }
        let d = self.dims[factor];
        let reduced = self.partial_trace(&[factor])?;
        let reduced = if self.dims.len() == 1 {
            reduced.with_dims(Vec::new())?
        } else {
            reduced
        };
        let noise = insert_identity(&reduced, factor, d).scaled(1.0 / d as f64);
        self.combine(1.0 - p, &noise, p)
    }

    /// Random state of the given rank from a seeded complex Ginibre matrix.
    pub fn random_state(dims: Vec<usize>, rank: usize, seed: u64) -> Result<Self> {
        let side: usize = dims.iter().product();
        if rank == 0 || rank > side {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} must lie in 1..={side}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(side, rank, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let mut mat = &g * g.adjoint();
        let tr: f64 = mat.diagonal().iter().map(|z| z.re).sum();
        mat /= C64::new(tr, 0.0);
        Ok(Self::from_parts_unchecked(dims, hermitize(mat)))
    }

    fn check_factors(&self, factors: &[usize]) -> Result<()> {
        check_factor_indices(self.dims.len(), factors)
    }
}

/// Inserts an identity of dimension `d` as a new factor at position `slot`.
pub(crate) fn insert_identity(x: &HermitianOperator, slot: usize, d: usize) -> HermitianOperator {
    let left: usize = x.dims[..slot].iter().product();
    let right: usize = x.dims[slot..].iter().product();
    let mut dims = x.dims.clone();
    dims.insert(slot, d);
    let side = left * d * right;
    let mut mat = CMatrix::zeros(side, side);
    for l1 in 0..left {
        for r1 in 0..right {
            for l2 in 0..left {
                for r2 in 0..right {
                    let v = x.mat[(l1 * right + r1, l2 * right + r2)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..d {
                        mat[((l1 * d + k) * right + r1, (l2 * d + k) * right + r2)] = v;
                    }
                }
            }
        }
    }
    HermitianOperator::from_parts_unchecked(dims, mat)
}

pub(crate) fn check_factor_indices(count: usize, factors: &[usize]) -> Result<()> {
    match factors.iter().find(|&&f| f >= count) {
        Some(&index) => Err(Error::FactorOutOfRange { index, count }),
        None => Ok(()),
    }
}

pub(crate) fn hermitize(mat: CMatrix) -> CMatrix {
    let adj = mat.adjoint();
    (mat + adj).map(|z| z * 0.5)
}

/// `Re tr(a† b)`; equals `tr(a b)` when `a` is Hermitian.
pub(crate) fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in dims.iter().enumerate().rev() {
        out[slot] = index % d;
        index /= d;
    }
    out
}

pub(crate) fn partial_trace_raw(
    dims: &[usize],
    mat: &CMatrix,
    traced: &[usize],
) -> Result<(Vec<usize>, CMatrix)> {
    check_factor_indices(dims.len(), traced)?;
    let kept: Vec<usize> = (0..dims.len()).filter(|f| !traced.contains(f)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&f| dims[f]).collect();
    let traced_dims: Vec<usize> = (0..dims.len())
        .filter(|f| traced.contains(f))
        .map(|f| dims[f])
        .collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();
    let side = dk * dt;

    // full index for every (kept, traced) pair
    let mut full = vec![0usize; side];
    for idx in 0..side {
        let dig = digits(idx, dims);
        let mut k = 0;
        let mut t = 0;
        for (f, &digit) in dig.iter().enumerate() {
            if traced.contains(&f) {
                t = t * dims[f] + digit;
            } else {
                k = k * dims[f] + digit;
            }
        }
        full[k * dt + t] = idx;
    }

    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += mat[(full[i * dt + t], full[j * dt + t])];
            }
            out[(i, j)] = acc;
        }
    }
    let out_dims = if kept_dims.is_empty() { vec![1] } else { kept_dims };
    Ok((out_dims, out))
}

pub(crate) fn partial_transpose_raw(dims: &[usize], mat: &CMatrix, factors: &[usize]) -> Result<CMatrix> {
    check_factor_indices(dims.len(), factors)?;
    let side: usize = dims.iter().product();
    let all_digits: Vec<Vec<usize>> = (0..side).map(|i| digits(i, dims)).collect();
    let compose = |d: &[usize]| d.iter().zip(dims).fold(0usize, |acc, (&x, &n)| acc * n + x);
    let mut out = CMatrix::zeros(side, side);
    let mut ri = vec![0usize; dims.len()];
    let mut rj = vec![0usize; dims.len()];
    for i in 0..side {
        for j in 0..side {
            ri.copy_from_slice(&all_digits[i]);
            rj.copy_from_slice(&all_digits[j]);
            for &f in factors {
                std::mem::swap(&mut ri[f], &mut rj[f]);
            }
            out[(compose(&ri), compose(&rj))] = mat[(i, j)];
        }
    }
    Ok(out)
}

pub(crate) fn eigh(mat: &CMatrix) -> Result<Eigen> {
    let eig = SymmetricEigen::try_new(mat.clone(), f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::EigenNoConvergence)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(mat.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

pub(crate) fn eigvalsh(mat: &CMatrix) -> Result<Vec<f64>> {
    let vals = SymmetricEigen::try_new(mat.clone(), f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::EigenNoConvergence)?
        .eigenvalues;
    let mut values: Vec<f64> = vals.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Wire form `{"dims": [..], "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<OperatorJson> for HermitianOperator {
    type Error = Error;

    fn try_from(wire: OperatorJson) -> Result<Self> {
        let side = wire.re.len();
        if wire.re.iter().any(|row| row.len() != side) {
            return Err(Error::Parse("\"re\" must be a square matrix".into()));
        }
        if let Some(im) = &wire.im {
            if im.len() != side || im.iter().any(|row| row.len() != side) {
                return Err(Error::Parse("\"im\" must match the shape of \"re\"".into()));
            }
        }
        let mat = CMatrix::from_fn(side, side, |r, c| {
            let im = wire.im.as_ref().map_or(0.0, |m| m[r][c]);
            C64::new(wire.re[r][c], im)
        });
        HermitianOperator::new(wire.dims, mat)
    }
}

impl From<HermitianOperator> for OperatorJson {
    fn from(op: HermitianOperator) -> Self {
        let side = op.dim();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..side)
                .map(|r| (0..side).map(|c| f(&op.mat[(r, c)])).collect())
                .collect()
        };
        OperatorJson {
            dims: op.dims.clone(),
            re: rows(|z| z.re),
            im: Some(rows(|z| z.im)),
        }
    }
}
