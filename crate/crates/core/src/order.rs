//! Order on multi-indices governing products of the projections `P_μ`.
//!
//! `ν ≺ μ` holds when, for some pivot `k`, the two agree above `k`,
//! `ν_k < μ_k`, and `ν` vanishes below `k`. The pivot, if any, is the highest
//! letter where the indices differ.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::multi_index::MultiIndex;

/// Admissible pivot letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PivotRange {
    /// `1..=n`; the range used by [`precedes`].
    Full,
    /// `2..=n-1`, empty for `n = 2`.
    Interior,
    /// `2..=n`.
    FromSecond,
    /// `1..=n-1`.
    BelowTop,
}

impl PivotRange {
    pub const ALL: [PivotRange; 4] = [
        PivotRange::Full,
        PivotRange::Interior,
        PivotRange::FromSecond,
        PivotRange::BelowTop,
    ];

    pub fn contains(&self, k: usize, n: usize) -> bool {
        let (lo, hi) = match self {
            PivotRange::Full => (1, n),
            PivotRange::Interior => (2, n.saturating_sub(1)),
            PivotRange::FromSecond => (2, n),
            PivotRange::BelowTop => (1, n.saturating_sub(1)),
        };
        (lo..=hi).contains(&k)
    }

    pub fn label(&self) -> &'static str {
        match self {
            PivotRange::Full => "1..=n",
            PivotRange::Interior => "2..=n-1",
            PivotRange::FromSecond => "2..=n",
            PivotRange::BelowTop => "1..=n-1",
        }
    }
}

impl fmt::Display for PivotRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The pivot letter witnessing `ν ≺ μ`, ignoring any range restriction.
pub fn pivot(nu: &MultiIndex, mu: &MultiIndex) -> Result<Option<usize>> {
    nu.check_same_len(mu)?;
    let Some(k) = (1..=nu.len()).rev().find(|&j| nu.get(j) != mu.get(j)) else {
        return Ok(None);
    };
    let below_vanishes = (1..k).all(|j| nu.get(j) == 0);
    Ok((nu.get(k) < mu.get(k) && below_vanishes).then_some(k))
}

pub fn precedes_in(nu: &MultiIndex, mu: &MultiIndex, range: PivotRange) -> Result<bool> {
    Ok(pivot(nu, mu)?.is_some_and(|k| range.contains(k, nu.len())))
}

/// `ν ≺ μ` with pivots in `1..=n`. False when `ν = μ`.
pub fn precedes(nu: &MultiIndex, mu: &MultiIndex) -> Result<bool> {
    precedes_in(nu, mu, PivotRange::Full)
}

/// `ν ⪯ μ`.
pub fn precedes_or_equal(nu: &MultiIndex, mu: &MultiIndex) -> Result<bool> {
    Ok(nu == mu || precedes(nu, mu)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ProductResult {
    Zero,
    /// `P_μ P_ν = P_μ`.
    LeftSurvives,
    /// `P_μ P_ν = P_ν`.
    RightSurvives,
}

/// Resolves `P_μ P_ν` symbolically.
pub fn projection_product(mu: &MultiIndex, nu: &MultiIndex) -> Result<ProductResult> {
    projection_product_in(mu, nu, PivotRange::Full)
}

pub fn projection_product_in(mu: &MultiIndex, nu: &MultiIndex, range: PivotRange) -> Result<ProductResult> {
    mu.check_same_len(nu)?;
    Ok(if mu == nu || precedes_in(nu, mu, range)? {
        ProductResult::LeftSurvives
    } else if precedes_in(mu, nu, range)? {
        ProductResult::RightSurvives
    } else {
        ProductResult::Zero
    })
}
