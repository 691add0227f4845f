//! Occupation-number basis of the symmetric subspace `Sym^N(C^d)` and exact
//! linear maps between compressed operators on `H_A ⊗ Sym^N`.
//!
//! A compressed operator is an ordinary square matrix indexed by
//! `a * sym_dim + column`, where `column` enumerates occupation vectors
//! `(n_1, .., n_d)` with `Σ n_i = N` in reverse-lexicographic order
//! (`(N,0,..,0)` first, `(0,..,0,N)` last).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, HermitianOperator, C64};

pub const DEFAULT_BASIS_CAP: usize = 4096;

/// `C(N + d - 1, d - 1)`.
pub fn sym_dim(d: usize, n: usize) -> usize {
    assert!(d >= 1, "local dimension must be positive");
    let mut acc: u128 = 1;
    for k in 1..d as u128 {
        acc = acc * (n as u128 + k) / k;
    }
    acc as usize
}

/// All occupation vectors of `n` particles in `d` modes, reverse-lexicographic.
pub fn occupations(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == d {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=left).rev() {
            prefix.push(first);
            rec(d, left - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(sym_dim(d, n));
    rec(d, n, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Number of distinct strings with the given occupations, `N! / Π n_i!`.
pub fn multinomial(occ: &[usize]) -> f64 {
    let mut total = 0usize;
    let mut acc = 1.0f64;
    for &k in occ {
        for j in 1..=k {
            total += 1;
            acc = acc * total as f64 / j as f64;
        }
    }
    acc
}

/// Overlap `(⟨S_m| ⊗ ⟨S_{n-m}|) |S_n⟩ = sqrt(C_m C_{n-m} / C_n)` of the
/// normalized Dicke vector `|S_n⟩` with a split into two symmetric groups.
pub fn split_coefficient(n: &[usize], m: &[usize]) -> f64 {
    let rest: Vec<usize> = n.iter().zip(m).map(|(a, b)| a - b).collect();
    (multinomial(m) * multinomial(&rest) / multinomial(n)).sqrt()
}

/// Occupation vectors of `Sym^N(C^d)` with a position lookup.
#[derive(Debug, Clone)]
pub struct Occupations {
    pub d: usize,
    pub n: usize,
    pub list: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Occupations {
    pub fn new(d: usize, n: usize) -> Self {
        let list = occupations(d, n);
        let index = list.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        Self { d, n, list, index }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn position(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    occ: Occupations,
    isometry: DMatrix<f64>,
}

impl SymmetricBasis {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        Self::with_cap(d, n, DEFAULT_BASIS_CAP)
    }

    /// Builds the isometry column by column from the tensor-product strings
    /// with the matching occupation; fails when `d^N` exceeds `cap`.
    pub fn with_cap(d: usize, n: usize, cap: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("local dimension must be positive".into()));
        }
        let full = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if full > cap as u128 {
            return Err(Error::BudgetExceeded {
                required: full.min(usize::MAX as u128) as usize,
                budget: cap,
            });
        }
        let full = full as usize;
        let occ = Occupations::new(d, n);
        let mut isometry = DMatrix::zeros(full, occ.len());
        let mut counts = vec![0usize; d];
        for string in 0..full {
            counts.iter_mut().for_each(|c| *c = 0);
            let mut s = string;
            for _ in 0..n {
                counts[s % d] += 1;
                s /= d;
            }
            let col = occ.position(&counts).expect("every string has a valid occupation");
            isometry[(string, col)] = 1.0;
        }
        for (col, o) in occ.list.iter().enumerate() {
            let norm = multinomial(o).sqrt();
            isometry.column_mut(col).scale_mut(1.0 / norm);
        }
        Ok(Self { occ, isometry })
    }

    pub fn local_dim(&self) -> usize {
        self.occ.d
    }

    pub fn copies(&self) -> usize {
        self.occ.n
    }

    pub fn dim(&self) -> usize {
        self.occ.len()
    }

    pub fn multi_indices(&self) -> &[Vec<usize>] {
        &self.occ.list
    }

    pub fn occupations(&self) -> &Occupations {
        &self.occ
    }

    /// Columns are the normalized Dicke vectors; side `d^N × sym_dim`.
    pub fn isometry(&self) -> &DMatrix<f64> {
        &self.isometry
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.isometry * self.isometry.transpose()
    }

    fn full_isometry(&self, d_a: usize) -> CMatrix {
        let eye = DMatrix::<f64>::identity(d_a, d_a);
        eye.kronecker(&self.isometry).map(|x| C64::new(x, 0.0))
    }

    fn full_dims(&self, d_a: usize) -> Vec<usize> {
        let mut dims = vec![d_a];
        dims.extend(std::iter::repeat_n(self.occ.d, self.occ.n));
        dims
    }

    /// `(I_A ⊗ V) x (I_A ⊗ V)†` on `H_A ⊗ H_B^{⊗N}`.
    pub fn lift(&self, x: &CMatrix, d_a: usize) -> Result<HermitianOperator> {
        let side = d_a * self.dim();
        if x.nrows() != side || x.ncols() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: x.nrows(),
            });
        }
        let v = self.full_isometry(d_a);
        HermitianOperator::new(self.full_dims(d_a), &v * x * v.adjoint())
    }

    /// `(I_A ⊗ V)† op (I_A ⊗ V)`.
    pub fn compress(&self, op: &HermitianOperator, d_a: usize) -> Result<CMatrix> {
        let v = self.full_isometry(d_a);
        if op.dim() != v.nrows() {
            return Err(Error::DimensionMismatch {
                expected: v.nrows(),
                found: op.dim(),
            });
        }
        Ok(v.adjoint() * op.matrix() * &v)
    }

    /// Normalized Dicke vector for the occupation at `column`.
    pub fn dicke_vector(&self, column: usize) -> DVector<C64> {
        self.isometry.column(column).map(|x| C64::new(x, 0.0))
    }
}

type Entry = (usize, usize);
/// Input entries and coefficients feeding one output entry.
pub type SourceTable = HashMap<Entry, Vec<(Entry, f64)>>;

/// Sparse real-coefficient linear map between complex matrices,
/// `out[r, c] += coeff * input[ir, ic]` for every term.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryMap {
    pub in_side: usize,
    pub out_side: usize,
    pub terms: Vec<MapTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapTerm {
    pub out: (usize, usize),
    pub input: (usize, usize),
    pub coeff: f64,
}

impl EntryMap {
    pub fn identity(side: usize) -> Self {
        let mut terms = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                terms.push(MapTerm {
                    out: (r, c),
                    input: (r, c),
                    coeff: 1.0,
                });
            }
        }
        Self {
            in_side: side,
            out_side: side,
            terms,
        }
    }

    /// `self ⊗ other` acting on tensor-product index spaces.
    pub fn kron(&self, other: &EntryMap) -> EntryMap {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(MapTerm {
                    out: (a.out.0 * other.out_side + b.out.0, a.out.1 * other.out_side + b.out.1),
                    input: (
                        a.input.0 * other.in_side + b.input.0,
                        a.input.1 * other.in_side + b.input.1,
                    ),
                    coeff: a.coeff * b.coeff,
                });
            }
        }
        EntryMap {
            in_side: self.in_side * other.in_side,
            out_side: self.out_side * other.out_side,
            terms,
        }
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!(x.nrows(), self.in_side, "input side mismatch");
        let mut out = CMatrix::zeros(self.out_side, self.out_side);
        for t in &self.terms {
            out[t.out] += x[t.input] * t.coeff;
        }
        out
    }

    /// Adjoint with respect to `⟨A, B⟩ = Re tr(A† B)`.
    pub fn adjoint_apply(&self, y: &CMatrix) -> CMatrix {
        assert_eq!(y.nrows(), self.out_side, "output side mismatch");
        let mut out = CMatrix::zeros(self.in_side, self.in_side);
        for t in &self.terms {
            out[t.input] += y[t.out] * t.coeff;
        }
        out
    }

    /// Terms grouped by output entry, for building adjoint images of sparse
    /// operators.
    pub fn by_output(&self) -> SourceTable {
        let mut table: SourceTable = HashMap::new();
        for t in &self.terms {
            table.entry(t.out).or_default().push((t.input, t.coeff));
        }
        table
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &EntryMap) -> EntryMap {
        assert_eq!(self.out_side, other.in_side);
        let table = self.by_input_of_output();
        let mut acc: HashMap<(Entry, Entry), f64> = HashMap::new();
        for t in &other.terms {
            if let Some(sources) = table.get(&t.input) {
                for &(src, c) in sources {
                    *acc.entry((t.out, src)).or_default() += c * t.coeff;
                }
            }
        }
        let mut terms: Vec<MapTerm> = acc
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((out, input), coeff)| MapTerm { out, input, coeff })
            .collect();
        terms.sort_by_key(|t| (t.out, t.input));
        EntryMap {
            in_side: self.in_side,
            out_side: other.out_side,
            terms,
        }
    }

    fn by_input_of_output(&self) -> SourceTable {
        self.by_output()
    }
}

/// Partial trace of a compressed operator on `H_A ⊗ Sym^N(C^d)` over
/// `N - keep` copies, landing on `H_A ⊗ Sym^keep` (or on `Sym^keep` alone
/// when `keep_a` is false).
pub fn reduction_map(d_a: usize, d: usize, n: usize, keep: usize, keep_a: bool) -> EntryMap {
    assert!(keep <= n, "cannot keep more copies than present");
    let src = Occupations::new(d, n);
    let dst = Occupations::new(d, keep);
    let traced = occupations(d, n - keep);
    let s_in = src.len();
    let s_out = dst.len();
    let a_out = if keep_a { d_a } else { 1 };

    // For each source occupation: list of (traced occupation, kept position, coefficient)
    let splits: Vec<Vec<(usize, usize, f64)>> = src
        .list
        .iter()
        .map(|nocc| {
            traced
                .iter()
                .enumerate()
                .filter(|(_, l)| l.iter().zip(nocc).all(|(a, b)| a <= b))
                .map(|(li, l)| {
                    let m: Vec<usize> = nocc.iter().zip(l).map(|(a, b)| a - b).collect();
                    let pos = dst.position(&m).expect("kept occupation");
                    (li, pos, split_coefficient(nocc, &m))
                })
                .collect()
        })
        .collect();

    let mut terms = Vec::new();
    for a in 0..d_a {
        for a2 in 0..d_a {
            if !keep_a && a != a2 {
                continue;
            }
            let (oa, oa2) = if keep_a { (a, a2) } else { (0, 0) };
            for (i, si) in splits.iter().enumerate() {
                for (j, sj) in splits.iter().enumerate() {
                    for &(li, pi, ci) in si {
                        for &(lj, pj, cj) in sj {
                            if li == lj {
                                terms.push(MapTerm {
                                    out: (oa * s_out + pi, oa2 * s_out + pj),
                                    input: (a * s_in + i, a2 * s_in + j),
                                    coeff: ci * cj,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    EntryMap {
        in_side: d_a * s_in,
        out_side: a_out * s_out,
        terms,
    }
}

/// Partial transpose of the last `transposed` copies of a compressed
/// operator on `H_A ⊗ Sym^N`, compressed onto
/// `H_A ⊗ Sym^{N - transposed} ⊗ Sym^{transposed}`.
pub fn partial_transpose_map(d_a: usize, d: usize, n: usize, transposed: usize) -> EntryMap {
    assert!(transposed <= n);
    let src = Occupations::new(d, n);
    let left = Occupations::new(d, n - transposed);
    let right = Occupations::new(d, transposed);
    let (s_in, sl, sr) = (src.len(), left.len(), right.len());
    let block = sl * sr;
    let add = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().zip(b).map(|(x, y)| x + y).collect() };

    let mut terms = Vec::with_capacity((d_a * block).pow(2));
    for a in 0..d_a {
        for a2 in 0..d_a {
            for (mi, m) in left.list.iter().enumerate() {
                for (li, l) in right.list.iter().enumerate() {
                    for (mi2, m2) in left.list.iter().enumerate() {
                        for (li2, l2) in right.list.iter().enumerate() {
                            // Y[(a,m,l),(a2,m2,l2)] = c · X[(a, m + l2), (a2, m2 + l)]
                            let row_occ = add(m, l2);
                            let col_occ = add(m2, l);
                            let coeff = split_coefficient(&row_occ, m) * split_coefficient(&col_occ, m2);
                            let r = src.position(&row_occ).expect("valid occupation");
                            let c = src.position(&col_occ).expect("valid occupation");
                            terms.push(MapTerm {
                                out: (a * block + mi * sr + li, a2 * block + mi2 * sr + li2),
                                input: (a * s_in + r, a2 * s_in + c),
                                coeff,
                            });
                        }
                    }
                }
            }
        }
    }
    EntryMap {
        in_side: d_a * s_in,
        out_side: d_a * block,
        terms,
    }
}

/// Pure state on `2K` qubits: normalized symmetric superposition of all
/// strings with `K` zeros and `K` ones.
pub fn dicke_overlap_state(k: usize) -> Result<HermitianOperator> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if k > 6 {
        return Err(Error::BudgetExceeded {
            required: 1 << (2 * k).min(63),
            budget: DEFAULT_BASIS_CAP,
        });
    }
    let basis = SymmetricBasis::new(2, 2 * k)?;
    let col = basis
        .occupations()
        .position(&[k, k])
        .expect("balanced occupation exists");
    HermitianOperator::pure(vec![2; 2 * k], &basis.dicke_vector(col))
}
