//! Truncated weakly monotone Fock space and exact generator matrices.
//!
//! The basis keeps every count vector of total degree at most `D`. Creators
//! drop anything that would leave the retained block, so they agree with the
//! untruncated operators only on vectors of degree `< D`. Identities are
//! therefore checked inside a guard band: a relation whose deepest
//! intermediate excursion adds `g` letters is compared on degrees `≤ D − g`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::multi_index::{enumerate_multi_indices, MultiIndex};
use crate::rational::{fmt_scalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TruncationParams {
    n: usize,
    max_degree: usize,
}

impl TruncationParams {
    pub fn new(n: usize, max_degree: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
        }
        if max_degree < 1 {
            return Err(Error::InvalidParams("max degree must be at least 1".into()));
        }
        Ok(Self { n, max_degree })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `binomial(D + n, n)`.
    pub fn basis_size(&self) -> usize {
        binomial(self.max_degree + self.n, self.n)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn enumerate_basis(params: &TruncationParams) -> Vec<MultiIndex> {
    enumerate_multi_indices(params.n, params.max_degree)
}

/// Enumerated basis with position lookup.
#[derive(Clone, Debug)]
pub struct FockBasis {
    params: TruncationParams,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    // layer_end[d] = number of basis vectors of degree <= d
    layer_end: Vec<usize>,
}

impl FockBasis {
    pub fn new(params: TruncationParams) -> Self {
        let indices = enumerate_basis(&params);
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(p, m)| (m.clone(), p))
            .collect();
        let mut layer_end = vec![0; params.max_degree + 1];
        for m in &indices {
            layer_end[m.degree()] += 1;
        }
        for d in 1..layer_end.len() {
            layer_end[d] += layer_end[d - 1];
        }
        Self {
            params,
            indices,
            lookup,
            layer_end,
        }
    }

    pub fn params(&self) -> &TruncationParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn max_degree(&self) -> usize {
        self.params.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_at(&self, position: usize) -> &MultiIndex {
        &self.indices[position]
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// Number of basis vectors of degree at most `degree`; the graded order
    /// makes this a prefix.
    pub fn prefix_len(&self, degree: usize) -> usize {
        self.layer_end[degree.min(self.params.max_degree)]
    }

    /// Prefix on which an identity with guard `g` is asserted (`degree ≤ D − g`).
    pub fn guard_prefix(&self, guard: usize) -> usize {
        match self.params.max_degree.checked_sub(guard) {
            Some(d) => self.prefix_len(d),
            None => 0,
        }
    }
}

/// Sparse vector over the enumerated basis; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    entries: BTreeMap<usize, Scalar>,
}

impl FockVector {
    pub fn basis(position: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(position, Scalar::one());
        Self { entries }
    }

    pub fn get(&self, position: usize) -> Scalar {
        self.entries.get(&position).copied().unwrap_or_else(Scalar::zero)
    }

    pub fn add_at(&mut self, position: usize, value: Scalar) {
        if value.is_zero() {
            return;
        }
        let slot = self.entries.entry(position).or_insert_with(Scalar::zero);
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&position);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.entries.iter().map(|(&p, v)| (p, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

/// Exact sparse square matrix, stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOp {
    dim: usize,
    cols: Vec<BTreeMap<usize, Scalar>>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            cols: vec![BTreeMap::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.cols[i].insert(i, Scalar::one());
        }
        op
    }

    pub fn from_triples(dim: usize, triples: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut op = Self::zeros(dim);
        for (r, c, v) in triples {
            op.add_at(r, c, v);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.cols[col].get(&row).copied().unwrap_or_else(Scalar::zero)
    }

    pub fn add_at(&mut self, row: usize, col: usize, value: Scalar) {
        if value.is_zero() {
            return;
        }
        let column = &mut self.cols[col];
        let slot = column.entry(row).or_insert_with(Scalar::zero);
        *slot += value;
        if slot.is_zero() {
            column.remove(&row);
        }
    }

    pub fn column(&self, col: usize) -> FockVector {
        FockVector {
            entries: self.cols[col].clone(),
        }
    }

    /// Nonzero entries sorted by `(row, col)`.
    pub fn triples(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out: Vec<_> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(&r, &v)| (r, c, v)))
            .collect();
        out.sort_by_key(|&(r, c, _)| (r, c));
        out
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(BTreeMap::is_empty)
    }

    /// Transpose; all scalars are real so this is the Hilbert-space adjoint.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for (c, col) in self.cols.iter().enumerate() {
            for (&r, &v) in col {
                out.cols[r].insert(c, v);
            }
        }
        out
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::default();
        for (c, x) in v.iter() {
            for (&r, a) in &self.cols[c] {
                out.add_at(r, a * x);
            }
        }
        out
    }

    pub fn scale(&self, s: Scalar) -> Self {
        if s.is_zero() {
            return Self::zeros(self.dim);
        }
        Self {
            dim: self.dim,
            cols: self
                .cols
                .iter()
                .map(|col| col.iter().map(|(&r, &v)| (r, v * s)).collect())
                .collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut out = Self::zeros(self.dim);
        for (c, col) in rhs.cols.iter().enumerate() {
            for (&k, &b) in col {
                for (&r, &a) in &self.cols[k] {
                    out.add_at(r, c, a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut out = self.clone();
        for (c, col) in rhs.cols.iter().enumerate() {
            for (&r, &v) in col {
                out.add_at(r, c, v);
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.scale(-Scalar::one()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(c, col)| col.keys().all(|&r| r == c))
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn is_idempotent(&self) -> bool {
        &(self * self) == self
    }

    /// Restriction to the leading `prefix` columns compared exactly.
    pub fn columns_agree(&self, other: &Self, prefix: usize) -> Option<usize> {
        (0..prefix.min(self.dim)).find(|&c| self.cols[c] != other.cols[c])
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            })
        }
    }
}

impl Mul for &SparseOp {
    type Output = SparseOp;

    fn mul(self, rhs: &SparseOp) -> SparseOp {
        self.try_mul(rhs).expect("operator dimensions differ")
    }
}

impl Add for &SparseOp {
    type Output = SparseOp;

    fn add(self, rhs: &SparseOp) -> SparseOp {
        self.try_add(rhs).expect("operator dimensions differ")
    }
}

impl Sub for &SparseOp {
    type Output = SparseOp;

    fn sub(self, rhs: &SparseOp) -> SparseOp {
        self.try_sub(rhs).expect("operator dimensions differ")
    }
}

impl Neg for &SparseOp {
    type Output = SparseOp;

    fn neg(self) -> SparseOp {
        self.scale(-Scalar::one())
    }
}

/// Serialized as `{dim, entries: [[row, col, "p/q"], …]}`.
impl Serialize for SparseOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(usize, usize, String)> = self
            .triples()
            .into_iter()
            .map(|(r, c, v)| (r, c, fmt_scalar(&v)))
            .collect();
        let mut s = serializer.serialize_struct("SparseOp", 2)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

fn check_generator(i: usize, min: usize, n: usize) -> Result<()> {
    if (min..=n).contains(&i) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, min, max: n })
    }
}

/// `A_i` for `i ≥ 1` removes the top letter when it equals `i`; `A_0` is the
/// vacuum projection.
pub fn annihilator_on(basis: &FockBasis, i: usize) -> Result<SparseOp> {
    check_generator(i, 0, basis.n())?;
    let dim = basis.len();
    if i == 0 {
        return Ok(SparseOp::from_triples(dim, [(0, 0, Scalar::one())]));
    }
    let triples = basis.indices().iter().enumerate().filter_map(|(col, m)| {
        if m.top_letter() != Some(i) {
            return None;
        }
        let target = m.with_removed(i)?;
        basis.position(&target).map(|row| (row, col, Scalar::one()))
    });
    Ok(SparseOp::from_triples(dim, triples))
}

/// `A_i^†` puts `e_i` on top when the current top letter is at most `i`;
/// anything that would exceed degree `D` is dropped.
pub fn creator_on(basis: &FockBasis, i: usize) -> Result<SparseOp> {
    check_generator(i, 1, basis.n())?;
    let triples = basis.indices().iter().enumerate().filter_map(|(col, m)| {
        if m.top_letter().is_some_and(|t| t > i) {
            return None;
        }
        basis
            .position(&m.with_added(i, 1))
            .map(|row| (row, col, Scalar::one()))
    });
    Ok(SparseOp::from_triples(basis.len(), triples))
}

pub fn annihilator(params: &TruncationParams, i: usize) -> Result<SparseOp> {
    annihilator_on(&FockBasis::new(*params), i)
}

pub fn creator(params: &TruncationParams, i: usize) -> Result<SparseOp> {
    creator_on(&FockBasis::new(*params), i)
}

/// Basis plus cached generator matrices `A_0..A_n` and `A_1^†..A_n^†`.
///
/// The cached partial maps let words act on basis vectors without matrix
/// products; every generator sends a basis vector to at most one basis vector
/// with coefficient 1.
#[derive(Clone, Debug)]
pub struct FockModel {
    basis: FockBasis,
    annihilators: Vec<SparseOp>,
    creators: Vec<SparseOp>,
    down: Vec<Vec<Option<usize>>>,
    up: Vec<Vec<Option<usize>>>,
}

impl FockModel {
    pub fn new(params: TruncationParams) -> Self {
        let basis = FockBasis::new(params);
        let n = params.n();
        let annihilators: Vec<SparseOp> = (0..=n)
            .map(|i| annihilator_on(&basis, i).expect("index in range"))
            .collect();
        // slot 0 holds A_0 itself, which is self-adjoint
        let creators: Vec<SparseOp> = std::iter::once(annihilators[0].clone())
            .chain((1..=n).map(|i| creator_on(&basis, i).expect("index in range")))
            .collect();
        let to_map = |op: &SparseOp| -> Vec<Option<usize>> {
            (0..op.dim())
                .map(|c| {
                    let col = &op.cols[c];
                    debug_assert!(col.len() <= 1);
                    col.keys().next().copied()
                })
                .collect()
        };
        let down = annihilators.iter().map(to_map).collect();
        let up = creators.iter().map(to_map).collect();
        Self {
            basis,
            annihilators,
            creators,
            down,
            up,
        }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn params(&self) -> &TruncationParams {
        self.basis.params()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn annihilator(&self, i: usize) -> Result<&SparseOp> {
        check_generator(i, 0, self.basis.n())?;
        Ok(&self.annihilators[i])
    }

    pub fn creator(&self, i: usize) -> Result<&SparseOp> {
        check_generator(i, 1, self.basis.n())?;
        Ok(&self.creators[i])
    }

    /// Matrix of generator `i` or its adjoint; `(0, true)` is `A_0`.
    pub fn generator(&self, i: usize, starred: bool) -> Result<&SparseOp> {
        check_generator(i, 0, self.basis.n())?;
        Ok(if starred { &self.creators[i] } else { &self.annihilators[i] })
    }

    /// Image of basis vector `position` under a generator, if nonzero.
    pub fn step(&self, i: usize, starred: bool, position: usize) -> Option<usize> {
        if starred {
            self.up[i][position]
        } else {
            self.down[i][position]
        }
    }

    pub fn identity(&self) -> SparseOp {
        SparseOp::identity(self.dim())
    }
}

/// `lhs = rhs`, asserted on basis vectors of degree `≤ D − guard`.
#[derive(Clone, Debug)]
pub struct GuardedIdentity {
    pub lhs: SparseOp,
    pub rhs: SparseOp,
    pub guard: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardVerdict {
    /// `checked` basis vectors agreed; `artifacts` counts disagreements above
    /// the guard band, which are truncation effects and not counted as failures.
    Pass { checked: usize, artifacts: usize },
    Fail(GuardFailure),
}

impl GuardVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, GuardVerdict::Pass { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardFailure {
    pub position: usize,
    pub index: MultiIndex,
    pub lhs_column: FockVector,
    pub rhs_column: FockVector,
}

pub fn check_guarded_identity(basis: &FockBasis, gi: &GuardedIdentity) -> Result<GuardVerdict> {
    gi.lhs.check_dim(&gi.rhs)?;
    if gi.lhs.dim() != basis.len() {
        return Err(Error::DimensionMismatch {
            left: gi.lhs.dim(),
            right: basis.len(),
        });
    }
    if gi.guard > basis.max_degree() {
        return Err(Error::InvalidParams(format!(
            "guard {} exceeds max degree {}",
            gi.guard,
            basis.max_degree()
        )));
    }
    let prefix = basis.guard_prefix(gi.guard);
    if let Some(c) = gi.lhs.columns_agree(&gi.rhs, prefix) {
        return Ok(GuardVerdict::Fail(GuardFailure {
            position: c,
            index: basis.index_at(c).clone(),
            lhs_column: gi.lhs.column(c),
            rhs_column: gi.rhs.column(c),
        }));
    }
    let artifacts = (prefix..basis.len())
        .filter(|&c| gi.lhs.cols[c] != gi.rhs.cols[c])
        .count();
    Ok(GuardVerdict::Pass {
        checked: prefix,
        artifacts,
    })
}
