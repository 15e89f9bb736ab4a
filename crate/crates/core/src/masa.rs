//! The diagonal subalgebra: conditional expectation and rank-one projections.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::fock::SparseOp;
use crate::multi_index::MultiIndex;
use crate::rational::Scalar;
use crate::rewrite::{NormalForm, NormalMonomial};

/// Operator with zero off-diagonal entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalOp {
    dim: usize,
    diag: BTreeMap<usize, Scalar>,
}

impl DiagonalOp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, position: usize) -> Scalar {
        self.diag.get(&position).copied().unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.diag.iter().map(|(&p, v)| (p, v))
    }

    pub fn to_sparse(&self) -> SparseOp {
        SparseOp::from_triples(self.dim, self.diag.iter().map(|(&p, &v)| (p, p, v)))
    }

    /// Agreement on the leading `prefix` positions.
    pub fn agrees_on(&self, other: &Self, prefix: usize) -> bool {
        (0..prefix).all(|p| self.get(p) == other.get(p))
    }
}

/// Keeps the diagonal of `op`.
pub fn expectation(op: &SparseOp) -> DiagonalOp {
    let diag = (0..op.dim())
        .map(|p| (p, op.get(p, p)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    DiagonalOp { dim: op.dim(), diag }
}

/// `P_μ` and `P⁰_μ` are diagonal; every monomial with `ν ≠ μ` has zero diagonal.
pub fn expectation_of_monomial(m: &NormalMonomial) -> NormalForm {
    if m.is_diagonal() {
        NormalForm::monomial(m.clone())
    } else {
        NormalForm::zero(m.n())
    }
}

pub fn expectation_of_normal_form(nf: &NormalForm) -> NormalForm {
    let mut out = NormalForm::zero(nf.n());
    for (m, c) in nf.terms().filter(|(m, _)| m.is_diagonal()) {
        out.add_term(m.clone(), *c);
    }
    out
}

/// Rank-one projection onto `ε_μ` as a combination of the `P_ν`.
///
/// With `l` the lowest letter of `μ`, the range of `P_μ` consists of the
/// `ε_ρ` that agree with `μ` above `l`, have `ρ_l ≥ μ_l`, and are arbitrary
/// below `l`. Removing `ρ_l > μ_l` (that is `P_{μ+e_l}`) and each
/// `ρ_h > 0`, `h < l` (the disjoint `P_{μ+e_h}`) leaves `ε_μ` alone:
///
/// `P_{ε_μ} = P_μ − Σ_{h=1}^{l} P_{μ+e_h}`.
///
/// For `μ = 0` this returns `P_Ω`.
pub fn rank_one_projection(mu: &MultiIndex) -> NormalForm {
    let n = mu.len();
    let Some(low) = mu.lowest_letter() else {
        return NormalForm::monomial(NormalMonomial::vacuum_projection(n));
    };
    let mut nf = NormalForm::monomial(NormalMonomial::projection(mu));
    for h in 1..=low {
        nf.add_term(NormalMonomial::projection(&mu.with_added(h, 1)), -Scalar::one());
    }
    nf
}

/// `P_μ − Σ_{h=1}^{n} P_{μ+e_h}` with every letter padded, as commonly
/// written. It agrees with [`rank_one_projection`] only when `μ` is zero or
/// supported on the top letter `n`; otherwise the padded terms with `h`
/// above the lowest letter of `μ` are orthogonal to `P_μ` and the result is
/// not a projection.
pub fn padded_rank_one_formula(mu: &MultiIndex) -> NormalForm {
    let n = mu.len();
    let mut nf = NormalForm::monomial(NormalMonomial::projection(mu));
    for h in 1..=n {
        nf.add_term(NormalMonomial::projection(&mu.with_added(h, 1)), -Scalar::one());
    }
    nf
}
