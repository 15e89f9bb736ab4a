//! Bundle representation over `K` sampled circle points and gauge unitaries.
//!
//! Block `s` carries the Fock representation at `z = ω^s`, `ω = e^{2πi/K}`.
//! Every matrix here has at most one nonzero entry per row and column, each
//! a power of `ω`, so products are computed exactly on exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockModel, SparseOp, TruncationParams};

/// `e^{2πi·exponent/order}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CirclePhase {
    exponent: u32,
    order: u32,
}

impl CirclePhase {
    pub fn new(exponent: i64, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParams("number of circle samples must be at least 1".into()));
        }
        Ok(Self {
            exponent: exponent.rem_euclid(i64::from(order)) as u32,
            order,
        })
    }

    pub fn one(order: u32) -> Self {
        Self { exponent: 0, order }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    pub fn conj(&self) -> Self {
        Self {
            exponent: (self.order - self.exponent) % self.order,
            order: self.order,
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let e = (u64::from(self.exponent) * k as u64) % u64::from(self.order);
        Self {
            exponent: e as u32,
            order: self.order,
        }
    }
}

impl Mul for CirclePhase {
    type Output = CirclePhase;

    fn mul(self, rhs: CirclePhase) -> CirclePhase {
        assert_eq!(self.order, rhs.order, "phases from different samplings");
        CirclePhase {
            exponent: (self.exponent + rhs.exponent) % self.order,
            order: self.order,
        }
    }
}

impl fmt::Display for CirclePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω^{}/{}", self.exponent, self.order)
    }
}

/// Partial monomial matrix with phase entries, stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseMatrix {
    order: u32,
    cols: Vec<Option<(usize, CirclePhase)>>,
}

impl PhaseMatrix {
    pub fn zeros(dim: usize, order: u32) -> Self {
        Self {
            order,
            cols: vec![None; dim],
        }
    }

    pub fn identity(dim: usize, order: u32) -> Self {
        Self {
            order,
            cols: (0..dim).map(|c| Some((c, CirclePhase::one(order)))).collect(),
        }
    }

    pub fn from_entries(
        dim: usize,
        order: u32,
        entries: impl IntoIterator<Item = (usize, usize, CirclePhase)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(dim, order);
        let mut rows = vec![false; dim];
        for (row, col, phase) in entries {
            if row >= dim || col >= dim {
                return Err(Error::DimensionMismatch {
                    left: row.max(col) + 1,
                    right: dim,
                });
            }
            if m.cols[col].is_some() || rows[row] {
                return Err(Error::PhaseCollision { row, col });
            }
            rows[row] = true;
            m.cols[col] = Some((row, phase));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> Option<CirclePhase> {
        match self.cols[col] {
            Some((r, p)) if r == row => Some(p),
            _ => None,
        }
    }

    /// `(row, col, phase)` in column order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, CirclePhase)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .filter_map(|(c, e)| e.map(|(r, p)| (r, c, p)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().flatten().count()
    }

    pub fn adjoint(&self) -> Self {
        let mut cols = vec![None; self.dim()];
        for (r, c, p) in self.entries() {
            cols[r] = Some((c, p.conj()));
        }
        Self { order: self.order, cols }
    }

    pub fn scale(&self, phase: CirclePhase) -> Self {
        Self {
            order: self.order,
            cols: self.cols.iter().map(|e| e.map(|(r, p)| (r, p * phase))).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        let cols = rhs
            .cols
            .iter()
            .map(|e| e.and_then(|(mid, p)| self.cols[mid].map(|(r, q)| (r, q * p))))
            .collect();
        Ok(Self { order: self.order, cols })
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    /// Entries where `self` and `other` disagree, as `(row, col, self, other)`.
    pub fn differences(&self, other: &Self) -> Vec<(usize, usize, Option<CirclePhase>, Option<CirclePhase>)> {
        let mut cells: BTreeMap<(usize, usize), (Option<CirclePhase>, Option<CirclePhase>)> = BTreeMap::new();
        for (r, c, p) in self.entries() {
            cells.entry((c, r)).or_default().0 = Some(p);
        }
        for (r, c, p) in other.entries() {
            cells.entry((c, r)).or_default().1 = Some(p);
        }
        cells
            .into_iter()
            .filter(|(_, (a, b))| a != b)
            .map(|((c, r), (a, b))| (r, c, a, b))
            .collect()
    }

    /// Converts a 0/1 matrix.
    pub fn from_sparse(op: &SparseOp, order: u32) -> Result<Self> {
        let mut entries = Vec::with_capacity(op.nnz());
        for (r, c, v) in op.triples() {
            if !v.is_one() {
                return Err(Error::Unsupported(format!("entry ({r}, {c}) is not 0 or 1")));
            }
            entries.push((r, c, CirclePhase::one(order)));
        }
        Self::from_entries(op.dim(), order, entries)
    }
}

/// `β̃_0, …, β̃_n` on `K` copies of the truncated Fock space.
#[derive(Clone, Debug)]
pub struct BundleRep {
    params: TruncationParams,
    roots: u32,
    degrees: Vec<usize>,
    operators: Vec<PhaseMatrix>,
}

impl BundleRep {
    pub fn params(&self) -> &TruncationParams {
        &self.params
    }

    pub fn roots(&self) -> u32 {
        self.roots
    }

    pub fn block_len(&self) -> usize {
        self.degrees.len()
    }

    pub fn dim(&self) -> usize {
        self.roots as usize * self.block_len()
    }

    /// `(block, basis position)` of a global index.
    pub fn split(&self, global: usize) -> (usize, usize) {
        (global / self.block_len(), global % self.block_len())
    }

    pub fn global(&self, block: usize, position: usize) -> usize {
        block * self.block_len() + position
    }

    pub fn degree_of(&self, position: usize) -> usize {
        self.degrees[position]
    }

    pub fn operator(&self, i: usize) -> Result<&PhaseMatrix> {
        self.operators.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            min: 0,
            max: self.params.n(),
        })
    }

    /// `ω^s`.
    pub fn sample(&self, block: usize) -> CirclePhase {
        CirclePhase {
            exponent: block as u32 % self.roots,
            order: self.roots,
        }
    }
}

pub fn build_bundle(params: &TruncationParams, roots: u32) -> Result<BundleRep> {
    if roots == 0 {
        return Err(Error::InvalidParams("number of circle samples must be at least 1".into()));
    }
    let model = FockModel::new(*params);
    let block_len = model.dim();
    let degrees = model.basis().indices().iter().map(|m| m.degree()).collect();
    let k = roots as usize;
    let mut operators = Vec::with_capacity(params.n() + 1);
    for i in 0..=params.n() {
        let block = PhaseMatrix::from_sparse(model.generator(i, false)?, roots)?;
        let entries = (0..k).flat_map(|s| {
            let phase = if i == 0 {
                CirclePhase::new(s as i64, roots).expect("roots is positive")
            } else {
                CirclePhase::one(roots)
            };
            block
                .entries()
                .map(move |(r, c, p)| (s * block_len + r, s * block_len + c, p * phase))
                .collect::<Vec<_>>()
        });
        operators.push(PhaseMatrix::from_entries(k * block_len, roots, entries)?);
    }
    Ok(BundleRep {
        params: *params,
        roots,
        degrees,
        operators,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UnitaryVariant {
    /// Phases positive-degree vectors inside their block and moves only the
    /// vacua between blocks.
    VacuumShiftU,
    /// Moves every vector from block `z` to block `w̄z`.
    BlockShiftV,
}

#[derive(Clone, Debug)]
pub struct GaugeUnitary {
    pub variant: UnitaryVariant,
    pub w: CirclePhase,
    pub matrix: PhaseMatrix,
}

pub fn gauge_unitary(rep: &BundleRep, w: CirclePhase, variant: UnitaryVariant) -> Result<GaugeUnitary> {
    if w.order() != rep.roots {
        return Err(Error::InvalidParams(format!(
            "phase of order {} used with {} samples",
            w.order(),
            rep.roots
        )));
    }
    let k = rep.roots as usize;
    let shift = |s: usize| (s + k - w.exponent() as usize) % k;
    let mut entries = Vec::with_capacity(rep.dim());
    for s in 0..k {
        for p in 0..rep.block_len() {
            let d = rep.degree_of(p);
            let target = match variant {
                UnitaryVariant::VacuumShiftU if d > 0 => s,
                _ => shift(s),
            };
            entries.push((rep.global(target, p), rep.global(s, p), w.conj().pow(d)));
        }
    }
    let matrix = PhaseMatrix::from_entries(rep.dim(), rep.roots, entries)?;
    let u = GaugeUnitary { variant, w, matrix };
    let id = PhaseMatrix::identity(rep.dim(), rep.roots);
    if u.matrix.try_mul(&u.matrix.adjoint())? != id || u.matrix.adjoint().try_mul(&u.matrix)? != id {
        return Err(Error::InvalidParams("gauge matrix is not unitary".into()));
    }
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FailingEntry {
    pub block_row: usize,
    pub block_col: usize,
    pub basis_row: usize,
    pub basis_col: usize,
    pub got_exponent: Option<u32>,
    pub want_exponent: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CovarianceVerdict {
    pub generator: usize,
    pub w: CirclePhase,
    pub variant: UnitaryVariant,
    pub failures: Vec<FailingEntry>,
}

impl CovarianceVerdict {
    pub fn is_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares `U_w β̃_i U_w^*` with `w β̃_i` entry by entry.
pub fn check_covariance(rep: &BundleRep, i: usize, w: CirclePhase, variant: UnitaryVariant) -> Result<CovarianceVerdict> {
    let u = gauge_unitary(rep, w, variant)?;
    let beta = rep.operator(i)?;
    let got = u.matrix.try_mul(beta)?.try_mul(&u.matrix.adjoint())?;
    let want = beta.scale(w);
    let failures = got
        .differences(&want)
        .into_iter()
        .map(|(r, c, g, x)| {
            let (block_row, basis_row) = rep.split(r);
            let (block_col, basis_col) = rep.split(c);
            FailingEntry {
                block_row,
                block_col,
                basis_row,
                basis_col,
                got_exponent: g.map(|p| p.exponent()),
                want_exponent: x.map(|p| p.exponent()),
            }
        })
        .collect();
    Ok(CovarianceVerdict {
        generator: i,
        w,
        variant,
        failures,
    })
}

/// True when the entry links a degree-one vector to a vacuum.
pub fn is_degree_one_to_vacuum(rep: &BundleRep, entry: &FailingEntry) -> bool {
    rep.degree_of(entry.basis_row) == 0 && rep.degree_of(entry.basis_col) == 1
}

/// `V_w V_{w'} = V_{ww'}`.
pub fn check_group_law(rep: &BundleRep, w: CirclePhase, w2: CirclePhase, variant: UnitaryVariant) -> Result<bool> {
    let lhs = gauge_unitary(rep, w, variant)?
        .matrix
        .try_mul(&gauge_unitary(rep, w2, variant)?.matrix)?;
    Ok(lhs == gauge_unitary(rep, w * w2, variant)?.matrix)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Eigenvalue {
    Zero,
    Phase(CirclePhase),
}

/// Eigenvalues of `β̃_0` with multiplicities, read off its diagonal.
pub fn vacuum_operator_spectrum(rep: &BundleRep) -> Result<BTreeMap<Eigenvalue, usize>> {
    let beta0 = rep.operator(0)?;
    if !beta0.is_diagonal() {
        return Err(Error::Unsupported("vacuum operator is not diagonal".into()));
    }
    let mut spectrum = BTreeMap::new();
    for p in 0..beta0.dim() {
        let ev = beta0.get(p, p).map_or(Eigenvalue::Zero, Eigenvalue::Phase);
        *spectrum.entry(ev).or_insert(0) += 1;
    }
    Ok(spectrum)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuotientVerdict {
    /// `B = β̃_0 β̃_0^*` equals `B^* B`.
    pub difference_vanishes: bool,
    pub self_adjoint: bool,
    pub idempotent: bool,
    /// `B Ω_z = Ω_z` for every sample.
    pub fixes_vacua: bool,
    /// `β̃_0` is a partial isometry (`β̃_0 β̃_0^* β̃_0 = β̃_0`).
    pub partial_isometry: bool,
    /// `β̃_0` is unitary; false as soon as the Fock space is nontrivial.
    pub unitary: bool,
}

impl QuotientVerdict {
    pub fn is_pass(&self) -> bool {
        self.difference_vanishes && self.self_adjoint && self.idempotent && self.fixes_vacua && self.partial_isometry
    }
}

pub fn check_quotient_relation(rep: &BundleRep) -> Result<QuotientVerdict> {
    let beta0 = rep.operator(0)?;
    let b = beta0.try_mul(&beta0.adjoint())?;
    let bsb = b.adjoint().try_mul(&b)?;
    let one = CirclePhase::one(rep.roots);
    let fixes_vacua = (0..rep.roots as usize).all(|s| {
        let g = rep.global(s, 0);
        b.get(g, g) == Some(one)
    });
    let id = PhaseMatrix::identity(rep.dim(), rep.roots);
    Ok(QuotientVerdict {
        difference_vanishes: b == bsb,
        self_adjoint: b == b.adjoint(),
        idempotent: b.try_mul(&b)? == b,
        fixes_vacua,
        partial_isometry: b.try_mul(beta0)? == *beta0,
        unitary: b == id && beta0.adjoint().try_mul(beta0)? == id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(n: usize, d: usize, k: u32) -> BundleRep {
        build_bundle(&TruncationParams::new(n, d).unwrap(), k).unwrap()
    }

    fn phase(e: i64, k: u32) -> CirclePhase {
        CirclePhase::new(e, k).unwrap()
    }

    #[test]
    fn phase_arithmetic() {
        let w = phase(3, 8);
        assert_eq!((w * w).exponent(), 6);
        assert_eq!(w.conj().exponent(), 5);
        assert!((w * w.conj()).is_one());
        assert_eq!(w.pow(3).exponent(), 1);
        assert_eq!(phase(-1, 4).exponent(), 3);
        assert!(CirclePhase::new(0, 0).is_err());
    }

    #[test]
    fn collisions_are_rejected() {
        let one = CirclePhase::one(2);
        assert!(matches!(
            PhaseMatrix::from_entries(3, 2, [(0, 1, one), (2, 1, one)]),
            Err(Error::PhaseCollision { row: 2, col: 1 })
        ));
        assert!(matches!(
            PhaseMatrix::from_entries(3, 2, [(0, 1, one), (0, 2, one)]),
            Err(Error::PhaseCollision { row: 0, col: 2 })
        ));
    }

    #[test]
    fn bundle_shape() {
        let r = rep(2, 3, 4);
        assert_eq!(r.dim(), 40);
        let beta0 = r.operator(0).unwrap();
        assert_eq!(beta0.nnz(), 4);
        for s in 0..4 {
            let g = r.global(s, 0);
            assert_eq!(beta0.get(g, g), Some(phase(s as i64, 4)));
        }
        assert_eq!(rep(2, 3, 1).dim(), 10);
    }

    #[test]
    fn vacuum_shift_unitary_examples() {
        let r = rep(2, 3, 4);
        let w = phase(1, 4);
        let u = gauge_unitary(&r, w, UnitaryVariant::VacuumShiftU).unwrap();
        // degree 2 vector at position 3 of block 1 keeps its block
        let g = r.global(1, 3);
        assert_eq!(r.degree_of(3), 2);
        assert_eq!(u.matrix.get(g, g), Some(w.conj().pow(2)));
        // Ω at block 1 moves to block 0
        assert_eq!(u.matrix.get(r.global(0, 0), r.global(1, 0)), Some(CirclePhase::one(4)));
    }

    #[test]
    fn unitarity_for_all_roots() {
        let r = rep(2, 3, 8);
        for e in 0..8 {
            for v in [UnitaryVariant::VacuumShiftU, UnitaryVariant::BlockShiftV] {
                assert!(gauge_unitary(&r, phase(e, 8), v).is_ok());
            }
        }
    }

    #[test]
    fn covariance_examples() {
        let r = rep(2, 3, 4);
        let w = phase(1, 4);
        assert!(check_covariance(&r, 1, w, UnitaryVariant::BlockShiftV).unwrap().is_pass());
        assert!(check_covariance(&r, 0, w, UnitaryVariant::VacuumShiftU).unwrap().is_pass());
        let v = check_covariance(&r, 1, w, UnitaryVariant::VacuumShiftU).unwrap();
        assert!(!v.is_pass());
        assert!(v.failures.iter().all(|f| is_degree_one_to_vacuum(&r, f)));
        assert!(check_covariance(&r, 1, CirclePhase::one(4), UnitaryVariant::VacuumShiftU)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn spectrum_of_vacuum_operator() {
        let s = vacuum_operator_spectrum(&rep(2, 3, 4)).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[&Eigenvalue::Zero], 36);
        for e in 0..4 {
            assert_eq!(s[&Eigenvalue::Phase(phase(e, 4))], 1);
        }
        let s = vacuum_operator_spectrum(&rep(2, 3, 1)).unwrap();
        assert_eq!(s.keys().count(), 2);
    }

    #[test]
    fn quotient_relation() {
        for k in [1, 4] {
            let v = check_quotient_relation(&rep(2, 3, k)).unwrap();
            assert!(v.is_pass());
            assert!(!v.unitary);
        }
    }

    #[test]
    fn group_law_for_shift() {
        let r = rep(2, 2, 4);
        for a in 0..4 {
            for b in 0..4 {
                assert!(check_group_law(&r, phase(a, 4), phase(b, 4), UnitaryVariant::BlockShiftV).unwrap());
            }
        }
    }
}
