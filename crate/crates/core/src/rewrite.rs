//! Normal forms of words in the generators.
//!
//! Rewriting rules (pairs of adjacent symbols, `i, j ≥ 1`):
//!
//! | rule | pattern | result |
//! |------|---------|--------|
//! | R1 | `a_i a_j*`, `i ≠ j` | `0` |
//! | R2 | `a_i a_i*`, `i < n` | `a_0 + Σ_{k=1}^{i} a_k* a_k` |
//! | R2 | `a_n a_n*` | `I` |
//! | R3 | `a_i* a_j*`, `i < j` | `0` |
//! | R4 | `a_j a_i`, `i < j` | `0` |
//! | R5 | `a_0 a_0`, `a_j a_0`, `a_0 a_j*` | `a_0`, `0`, `0` |
//!
//! The leftmost redex is rewritten at every step and equal intermediate words
//! are merged. Irreducible words are exactly `a*(ν) [a_0] a(μ)` with creation
//! letters non-increasing and annihilation letters non-decreasing.
//!
//! After reduction, groups `a*(ν) a_0 a(μ) + Σ_{k≤i} a*(ν+e_k) a(μ+e_k)` with a
//! common coefficient are contracted back to `a*(ν) a(μ)` (R2 read right to
//! left) whenever `a_i a_i*` acts as the identity next to `a*(ν)` or `a(μ)`.
//! This makes e.g. `P_μ P_μ` reduce to the single monomial `P_μ`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fock::{FockModel, SparseOp};
use crate::multi_index::MultiIndex;
use crate::rational::{fmt_scalar, Scalar};
use crate::word::{GeneratorSymbol, Word};

/// `A*_ν P_Ω^{flag} A_μ` with `A_μ = A_1^{μ_1}⋯A_n^{μ_n}` and
/// `A*_ν = (A_n*)^{ν_n}⋯(A_1*)^{ν_1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalMonomial {
    pub creation: MultiIndex,
    pub vacuum: bool,
    pub annihilation: MultiIndex,
}

impl NormalMonomial {
    pub fn new(creation: MultiIndex, vacuum: bool, annihilation: MultiIndex) -> Result<Self> {
        creation.check_same_len(&annihilation)?;
        Ok(Self {
            creation,
            vacuum,
            annihilation,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            creation: MultiIndex::zero(n),
            vacuum: false,
            annihilation: MultiIndex::zero(n),
        }
    }

    /// `P_Ω = A_0`.
    pub fn vacuum_projection(n: usize) -> Self {
        Self {
            vacuum: true,
            ..Self::identity(n)
        }
    }

    /// `P_μ = A*_μ A_μ`.
    pub fn projection(mu: &MultiIndex) -> Self {
        Self {
            creation: mu.clone(),
            vacuum: false,
            annihilation: mu.clone(),
        }
    }

    /// `P⁰_μ = A*_μ P_Ω A_μ`, the rank-one projection onto `ε_μ`.
    pub fn vacuum_projection_at(mu: &MultiIndex) -> Self {
        Self {
            vacuum: true,
            ..Self::projection(mu)
        }
    }

    pub fn n(&self) -> usize {
        self.creation.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.creation == self.annihilation
    }

    pub fn to_word(&self) -> Word {
        let n = self.n();
        let mut symbols = Vec::new();
        for letter in (1..=n).rev() {
            for _ in 0..self.creation.get(letter) {
                symbols.push(GeneratorSymbol::creation(letter));
            }
        }
        if self.vacuum {
            symbols.push(GeneratorSymbol::vacuum());
        }
        for letter in 1..=n {
            for _ in 0..self.annihilation.get(letter) {
                symbols.push(GeneratorSymbol::annihilation(letter));
            }
        }
        Word::new(symbols)
    }

    /// Degree headroom needed for the truncated matrix to be exact.
    pub fn guard(&self) -> usize {
        self.creation.degree()
    }

    pub fn matrix(&self, model: &FockModel) -> Result<SparseOp> {
        word_action(&self.to_word(), model)
    }
}

impl fmt::Display for NormalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.creation.is_zero() {
            parts.push(format!("a*{}", self.creation));
        }
        if self.vacuum {
            parts.push("a0".to_string());
        }
        if !self.annihilation.is_zero() {
            parts.push(format!("a{}", self.annihilation));
        }
        if parts.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Rational linear combination of normal monomials; empty means zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    n: usize,
    terms: BTreeMap<NormalMonomial, Scalar>,
}

impl NormalForm {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(m: NormalMonomial) -> Self {
        let mut nf = Self::zero(m.n());
        nf.add_term(m, Scalar::one());
        nf
    }

    pub fn identity(n: usize) -> Self {
        Self::monomial(NormalMonomial::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, m: NormalMonomial, c: Scalar) {
        debug_assert_eq!(m.n(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn coefficient(&self, m: &NormalMonomial) -> Scalar {
        self.terms.get(m).copied().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalMonomial, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: Scalar) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Scalar::one()))
    }

    /// Product, reduced to normal form.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let w = m1.to_word().concat(&m2.to_word());
                let nf = rewrite(&w, self.n)?;
                for (m, c) in nf.terms {
                    out.add_term(m, c * c1 * c2);
                }
            }
        }
        Ok(contract(out))
    }

    /// Largest creation degree over all terms.
    pub fn guard(&self) -> usize {
        self.terms.keys().map(NormalMonomial::guard).max().unwrap_or(0)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{} · {}", fmt_scalar(c), m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

type Replacement = Vec<Vec<GeneratorSymbol>>;

/// Right-hand side for the adjacent pair `(x, y)`, if it is a redex.
/// An empty replacement list means the pair vanishes.
fn redex(x: GeneratorSymbol, y: GeneratorSymbol, n: usize) -> Option<Replacement> {
    let zero = Some(Vec::new());
    match (x.is_vacuum(), y.is_vacuum()) {
        (true, true) => return Some(vec![vec![GeneratorSymbol::vacuum()]]),
        (false, true) if x.is_annihilation() => return zero,
        (true, false) if y.is_creation() => return zero,
        (true, _) | (_, true) => return None,
        _ => {}
    }
    let (i, j) = (x.index, y.index);
    match (x.starred, y.starred) {
        (false, true) if i != j => zero,
        (false, true) if i == n => Some(vec![Vec::new()]),
        (false, true) => {
            let mut out = vec![vec![GeneratorSymbol::vacuum()]];
            out.extend((1..=i).map(|k| vec![GeneratorSymbol::creation(k), GeneratorSymbol::annihilation(k)]));
            Some(out)
        }
        (true, true) if i < j => zero,
        (false, false) if j < i => zero,
        _ => None,
    }
}

fn leftmost_redex(symbols: &[GeneratorSymbol], n: usize) -> Option<(usize, Replacement)> {
    symbols
        .windows(2)
        .enumerate()
        .find_map(|(p, pair)| redex(pair[0], pair[1], n).map(|r| (p, r)))
}

fn monomial_of_irreducible(symbols: &[GeneratorSymbol], n: usize) -> NormalMonomial {
    let mut creation = MultiIndex::zero(n);
    let mut annihilation = MultiIndex::zero(n);
    let mut vacuum = false;
    for s in symbols {
        if s.is_creation() {
            debug_assert!(!vacuum && annihilation.is_zero());
            creation = creation.with_added(s.index, 1);
        } else if s.is_vacuum() {
            debug_assert!(!vacuum && annihilation.is_zero());
            vacuum = true;
        } else {
            annihilation = annihilation.with_added(s.index, 1);
        }
    }
    NormalMonomial {
        creation,
        vacuum,
        annihilation,
    }
}

/// Reduces `w` to normal form using R1–R5 to fixpoint, then contracts.
pub fn rewrite(w: &Word, n: usize) -> Result<NormalForm> {
    let raw = reduce(w, n)?;
    Ok(contract(raw))
}

/// R1–R5 only, without the final contraction.
pub fn reduce(w: &Word, n: usize) -> Result<NormalForm> {
    if let Some(s) = w.symbols().iter().find(|s| s.index > n) {
        return Err(Error::IndexOutOfRange {
            index: s.index,
            min: 0,
            max: n,
        });
    }
    let mut out = NormalForm::zero(n);
    let mut pending: BTreeMap<Vec<GeneratorSymbol>, Scalar> = BTreeMap::new();
    pending.insert(w.symbols().to_vec(), Scalar::one());
    while !pending.is_empty() {
        let mut next: BTreeMap<Vec<GeneratorSymbol>, Scalar> = BTreeMap::new();
        for (symbols, c) in pending {
            match leftmost_redex(&symbols, n) {
                None => out.add_term(monomial_of_irreducible(&symbols, n), c),
                Some((p, replacements)) => {
                    for r in replacements {
                        let mut word = Vec::with_capacity(symbols.len());
                        word.extend_from_slice(&symbols[..p]);
                        word.extend(r);
                        word.extend_from_slice(&symbols[p + 2..]);
                        *next.entry(word).or_insert_with(Scalar::zero) += c;
                    }
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        pending = next;
    }
    Ok(out)
}

fn lowest_or(m: &MultiIndex, default: usize) -> usize {
    m.lowest_letter().unwrap_or(default)
}

/// Contracts `a*(ν) a_0 a(μ) + Σ_{k=1}^{i} a*(ν+e_k) a(μ+e_k)` (common
/// coefficient) to `a*(ν) a(μ)`, with `i` the lowest letter of `ν` or `μ`, or
/// `i = n` when both are empty.
fn contract(mut nf: NormalForm) -> NormalForm {
    let n = nf.n;
    loop {
        let mut hit = None;
        for (m, c) in nf.terms.iter().filter(|(m, _)| m.vacuum) {
            let i = lowest_or(&m.creation, n).min(lowest_or(&m.annihilation, n));
            let partners: Vec<NormalMonomial> = (1..=i)
                .map(|k| NormalMonomial {
                    creation: m.creation.with_added(k, 1),
                    vacuum: false,
                    annihilation: m.annihilation.with_added(k, 1),
                })
                .collect();
            if partners.iter().all(|p| nf.coefficient(p) == *c) {
                hit = Some((m.clone(), *c, partners));
                break;
            }
        }
        let Some((m, c, partners)) = hit else {
            return nf;
        };
        nf.terms.remove(&m);
        for p in &partners {
            nf.terms.remove(p);
        }
        nf.add_term(
            NormalMonomial {
                vacuum: false,
                ..m
            },
            c,
        );
    }
}

/// Matrix of a word computed by following each basis vector through the
/// generator maps (no matrix products).
pub fn word_action(w: &Word, model: &FockModel) -> Result<SparseOp> {
    if let Some(s) = w.symbols().iter().find(|s| s.index > model.params().n()) {
        return Err(Error::IndexOutOfRange {
            index: s.index,
            min: 0,
            max: model.params().n(),
        });
    }
    let dim = model.dim();
    let triples = (0..dim).filter_map(|col| {
        w.symbols()
            .iter()
            .rev()
            .try_fold(col, |p, s| model.step(s.index, s.starred, p))
            .map(|row| (row, col, Scalar::one()))
    });
    Ok(SparseOp::from_triples(dim, triples))
}

/// `Σ c · matrix(m)` over the terms of `nf`.
pub fn evaluate(nf: &NormalForm, model: &FockModel) -> Result<SparseOp> {
    if nf.n() != model.params().n() {
        return Err(Error::DimensionMismatch {
            left: nf.n(),
            right: model.params().n(),
        });
    }
    let mut acc = SparseOp::zeros(model.dim());
    for (m, c) in nf.terms() {
        acc = acc.try_add(&m.matrix(model)?.scale(*c))?;
    }
    Ok(acc)
}
