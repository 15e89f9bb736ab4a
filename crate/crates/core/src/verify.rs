//! Verification suites. Each suite compares a symbolic result against exact
//! matrices and collects the outcome in a [`Report`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockModel, FockVector, SparseOp, TruncationParams};
use crate::gauge::{
    build_bundle, check_covariance, check_group_law, check_quotient_relation, gauge_unitary, is_degree_one_to_vacuum,
    vacuum_operator_spectrum, CirclePhase, Eigenvalue, UnitaryVariant,
};
use crate::masa::{expectation, expectation_of_monomial, expectation_of_normal_form, padded_rank_one_formula, rank_one_projection};
use crate::multi_index::{enumerate_multi_indices, MultiIndex};
use crate::order::{precedes, projection_product, projection_product_in, PivotRange, ProductResult};
use crate::rational::{fmt_big, fmt_scalar, Scalar};
use crate::rewrite::{evaluate, rewrite, NormalForm, NormalMonomial};
use crate::spectrum::{embed, enumerate_spectrum, verify_multiplicativity, PointKind, Provenance, SpectrumConfig};
use crate::word::{GeneratorSymbol, Word};

pub const DEFAULT_SEED: u64 = 0x5eed_0001;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub params: TruncationParams,
    pub c: BigRational,
    pub roots: u32,
    pub seed: u64,
    pub random_words: usize,
}

impl VerifyConfig {
    pub fn new(n: usize, max_degree: usize) -> Result<Self> {
        Ok(Self {
            params: TruncationParams::new(n, max_degree)?,
            c: BigRational::new(1.into(), 2.into()),
            roots: 4,
            seed: DEFAULT_SEED,
            random_words: 500,
        })
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn max_degree(&self) -> usize {
        self.params.max_degree()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Relations,
    Ck,
    Projections,
    Masa,
    Spectrum,
    Gauge,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Relations,
        Suite::Ck,
        Suite::Projections,
        Suite::Masa,
        Suite::Spectrum,
        Suite::Gauge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Relations => "relations",
            Suite::Ck => "ck",
            Suite::Projections => "projections",
            Suite::Masa => "masa",
            Suite::Spectrum => "spectrum",
            Suite::Gauge => "gauge",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<Value>,
    /// Disagreements above the guard band; reported, never counted.
    #[serde(skip_serializing_if = "is_zero")]
    pub truncation_artifacts: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl CheckResult {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
            first_failure: None,
            truncation_artifacts: 0,
        }
    }

    pub fn case(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn is_pass(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub suite: String,
    pub n: usize,
    pub max_degree: usize,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: &str, cfg: &VerifyConfig) -> Self {
        Self {
            suite: suite.to_string(),
            n: cfg.n(),
            max_degree: cfg.max_degree(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn is_pass(&self) -> bool {
        self.failures() == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Report> {
    match suite {
        Suite::Relations => relations_suite(cfg),
        Suite::Ck => ck_suite(cfg),
        Suite::Projections => projections_suite(cfg),
        Suite::Masa => masa_suite(cfg),
        Suite::Spectrum => spectrum_suite(cfg),
        Suite::Gauge => gauge_suite(cfg),
    }
}

/// Runs the suites on up to `jobs` threads and merges the reports in the
/// order given. A single suite keeps its own name; several are labelled
/// `all` when they cover every suite.
pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig, jobs: usize) -> Result<Report> {
    let jobs = jobs.max(1).min(suites.len().max(1));
    let mut results: Vec<Option<Result<Report>>> = (0..suites.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|t| {
                scope.spawn(move || {
                    (t..suites.len())
                        .step_by(jobs)
                        .map(|i| (i, run_suite(suites[i], cfg)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("suite thread panicked") {
                results[i] = Some(r);
            }
        }
    });
    let reports = results
        .into_iter()
        .map(|r| r.expect("every suite ran"))
        .collect::<Result<Vec<_>>>()?;
    if let [single] = reports.as_slice() {
        return Ok(single.clone());
    }
    let label = if suites.len() == Suite::ALL.len() {
        "all".to_string()
    } else {
        suites.iter().map(Suite::name).collect::<Vec<_>>().join("+")
    };
    let mut merged = Report::new(&label, cfg);
    for r in reports {
        merged.checks.extend(r.checks);
        merged.notes.extend(r.notes);
    }
    Ok(merged)
}

fn vector_json(v: &FockVector, basis: &FockBasis) -> Value {
    Value::Array(
        v.iter()
            .map(|(p, c)| json!({"index": basis.index_at(p).to_string(), "value": fmt_scalar(c)}))
            .collect(),
    )
}

/// Checks `lhs = rhs` column by column on degree `≤ D − guard`.
pub fn guarded_check(name: &str, basis: &FockBasis, lhs: &SparseOp, rhs: &SparseOp, guard: usize) -> CheckResult {
    let mut check = CheckResult::new(name);
    let prefix = if guard > basis.max_degree() {
        0
    } else {
        basis.guard_prefix(guard)
    };
    for c in 0..basis.len() {
        let (l, r) = (lhs.column(c), rhs.column(c));
        if c >= prefix {
            check.truncation_artifacts += usize::from(l != r);
            continue;
        }
        check.case(l == r, || {
            json!({
                "basisVector": basis.index_at(c).to_string(),
                "position": c,
                "lhs": vector_json(&l, basis),
                "rhs": vector_json(&r, basis),
            })
        });
    }
    check
}

fn merge_into(target: &mut CheckResult, other: CheckResult, label: impl FnOnce() -> Value) {
    target.cases += other.cases;
    target.truncation_artifacts += other.truncation_artifacts;
    if other.failures > 0 {
        target.failures += other.failures;
        if target.first_failure.is_none() {
            target.first_failure = Some(json!({"case": label(), "detail": other.first_failure}));
        }
    }
}

fn gen(model: &FockModel, i: usize, starred: bool) -> Result<&SparseOp> {
    model.generator(i, starred)
}

fn relations_suite(cfg: &VerifyConfig) -> Result<Report> {
    let model = FockModel::new(cfg.params);
    let basis = model.basis();
    let n = cfg.n();
    let zero = SparseOp::zeros(model.dim());
    let mut report = Report::new("relations", cfg);

    let mut creators = CheckResult::new("relations/creators-ordered");
    let mut annihilators = CheckResult::new("relations/annihilators-ordered");
    let mut mixed = CheckResult::new("relations/mixed-indices");
    for i in 1..=n {
        for j in 1..=n {
            if i < j {
                let lhs = gen(&model, i, true)?.try_mul(gen(&model, j, true)?)?;
                merge_into(&mut creators, guarded_check("", basis, &lhs, &zero, 2), || json!({"i": i, "j": j}));
                let lhs = gen(&model, j, false)?.try_mul(gen(&model, i, false)?)?;
                merge_into(&mut annihilators, guarded_check("", basis, &lhs, &zero, 2), || json!({"i": i, "j": j}));
            }
            if i != j {
                let lhs = gen(&model, i, false)?.try_mul(gen(&model, j, true)?)?;
                merge_into(&mut mixed, guarded_check("", basis, &lhs, &zero, 1), || json!({"i": i, "j": j}));
            }
        }
    }
    report.checks.extend([creators, annihilators, mixed]);

    let mut adjoints = CheckResult::new("relations/adjoint-pairs");
    for i in 1..=n {
        adjoints.case(gen(&model, i, false)?.adjoint() == *gen(&model, i, true)?, || json!({"i": i}));
    }
    report.checks.push(adjoints);

    let a0 = gen(&model, 0, false)?;
    let mut vacuum = CheckResult::new("relations/vacuum-projection");
    vacuum.case(a0.is_self_adjoint(), || json!({"property": "self-adjoint"}));
    vacuum.case(a0.is_idempotent(), || json!({"property": "idempotent"}));
    vacuum.case(a0.nnz() == 1 && a0.get(0, 0).is_one(), || json!({"property": "rank one at the vacuum"}));
    report.checks.push(vacuum);

    let a1 = gen(&model, 1, false)?;
    let a1s = gen(&model, 1, true)?;
    let commutator = a1.try_mul(a1s)?.try_sub(&a1s.try_mul(a1)?)?;
    report
        .checks
        .push(guarded_check("relations/vacuum-commutator", basis, &commutator, a0, 1));

    let len = if n == 2 { 6 } else { 4 };
    let mut words = all_words(n, len);
    words.extend(random_words(n, cfg.random_words, 8, cfg.seed));
    report
        .checks
        .push(check_rewrite_soundness("relations/rewrite-soundness", &model, &words)?);
    report.notes.push(format!(
        "rewrite soundness: every word of length <= {len} plus {} random words of length <= 8 (seed {})",
        cfg.random_words, cfg.seed
    ));
    Ok(report)
}

/// The `2(n+1)` symbol patterns; `a0*` is kept as a pattern and normalizes
/// to `a0`.
pub fn symbol_patterns(n: usize) -> Vec<GeneratorSymbol> {
    (0..=n)
        .flat_map(|i| [GeneratorSymbol::new(i, false), GeneratorSymbol::new(i, true)])
        .collect()
}

/// Every pattern sequence of length `0..=max_len`, shortest first.
pub fn all_words(n: usize, max_len: usize) -> Vec<Word> {
    let alphabet = symbol_patterns(n);
    let mut out = vec![Word::identity()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<GeneratorSymbol>| {
                alphabet.iter().map(move |s| {
                    let mut v = w.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(Word::new));
    }
    out
}

pub fn random_word<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> Word {
    let alphabet = symbol_patterns(n);
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

pub fn random_words(n: usize, count: usize, max_len: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_word(&mut rng, n, max_len)).collect()
}

/// `evaluate(rewrite(w))` against the matrix product of `w` on degree
/// `≤ D − (creations in w)`. Words whose guard exceeds `D` contribute no case.
pub fn check_rewrite_soundness(name: &str, model: &FockModel, words: &[Word]) -> Result<CheckResult> {
    let basis = model.basis();
    let n = model.params().n();
    let mut check = CheckResult::new(name);
    for w in words {
        if w.guard() > basis.max_degree() {
            continue;
        }
        let prefix = basis.guard_prefix(w.guard());
        let nf = rewrite(w, n)?;
        let lhs = evaluate(&nf, model)?;
        let rhs = w.matrix(model)?;
        let bad = lhs.columns_agree(&rhs, prefix);
        check.case(bad.is_none(), || {
            let c = bad.unwrap_or_default();
            json!({
                "word": w.to_string(),
                "normalForm": nf.to_string(),
                "basisVector": basis.index_at(c).to_string(),
                "rewritten": vector_json(&lhs.column(c), basis),
                "matrix": vector_json(&rhs.column(c), basis),
            })
        });
    }
    Ok(check)
}

/// Realized CK matrix: entry `(i, j)` is 1 when `A_i A_i^†` contains
/// `A_j^† A_j` and 0 when they are orthogonal, on degree `≤ D − 1`.
/// `None` marks an entry that is neither.
pub fn realized_ck_matrix(model: &FockModel) -> Result<Vec<Vec<Option<u8>>>> {
    let basis = model.basis();
    let n = model.params().n();
    let prefix = basis.guard_prefix(1);
    let zero = SparseOp::zeros(model.dim());
    let support = |i: usize| -> Result<SparseOp> {
        if i == 0 {
            Ok(gen(model, 0, false)?.clone())
        } else {
            gen(model, i, false)?.try_mul(gen(model, i, true)?)
        }
    };
    let range = |j: usize| -> Result<SparseOp> {
        if j == 0 {
            Ok(gen(model, 0, false)?.clone())
        } else {
            gen(model, j, true)?.try_mul(gen(model, j, false)?)
        }
    };
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = support(i)?;
        let mut row = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let q = range(j)?;
            let prod = s.try_mul(&q)?;
            row.push(if prod.columns_agree(&q, prefix).is_none() {
                Some(1)
            } else if prod.columns_agree(&zero, prefix).is_none() {
                Some(0)
            } else {
                None
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

fn ck_suite(cfg: &VerifyConfig) -> Result<Report> {
    let model = FockModel::new(cfg.params);
    let basis = model.basis();
    let n = cfg.n();
    let mut report = Report::new("ck", cfg);

    let ranges: Vec<SparseOp> = (0..=n)
        .map(|j| {
            if j == 0 {
                Ok(gen(&model, 0, false)?.clone())
            } else {
                gen(&model, j, true)?.try_mul(gen(&model, j, false)?)
            }
        })
        .collect::<Result<_>>()?;

    let mut total = SparseOp::zeros(model.dim());
    for q in &ranges {
        total = total.try_add(q)?;
    }
    report
        .checks
        .push(guarded_check("ck/ranges-sum-to-identity", basis, &total, &model.identity(), 0));

    let mut orthogonal = CheckResult::new("ck/ranges-orthogonal");
    for (i, qi) in ranges.iter().enumerate() {
        for (j, qj) in ranges.iter().enumerate().filter(|(j, _)| *j != i) {
            orthogonal.case(qi.try_mul(qj)?.is_zero(), || json!({"i": i, "j": j}));
        }
    }
    report.checks.push(orthogonal);

    let mut supports = CheckResult::new("ck/support-projections");
    for i in 1..=n {
        let lhs = gen(&model, i, false)?.try_mul(gen(&model, i, true)?)?;
        let mut rhs = SparseOp::zeros(model.dim());
        for q in &ranges[..=i] {
            rhs = rhs.try_add(q)?;
        }
        merge_into(&mut supports, guarded_check("", basis, &lhs, &rhs, 1), || json!({"i": i}));
    }
    report.checks.push(supports);

    let realized = realized_ck_matrix(&model)?;
    let mut matrix = CheckResult::new("ck/lower-triangular-matrix");
    for (i, row) in realized.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let want = u8::from(j <= i);
            matrix.case(*entry == Some(want), || json!({"i": i, "j": j, "realized": entry, "expected": want}));
        }
    }
    report.checks.push(matrix);
    let rows: Vec<String> = realized
        .iter()
        .map(|r| r.iter().map(|e| e.map_or("?".into(), |v| v.to_string())).collect::<Vec<_>>().join(""))
        .collect();
    report.notes.push(format!("realized CK matrix rows: {}", rows.join(" ")));
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatrixProduct {
    Zero,
    Left,
    Right,
    Other,
}

/// Classifies `P_μ P_ν` from the matrices.
pub fn classify_product(pm: &SparseOp, pn: &SparseOp) -> Result<MatrixProduct> {
    let prod = pm.try_mul(pn)?;
    Ok(if prod.is_zero() {
        MatrixProduct::Zero
    } else if prod == *pm {
        MatrixProduct::Left
    } else if prod == *pn {
        MatrixProduct::Right
    } else {
        MatrixProduct::Other
    })
}

fn as_matrix_product(r: ProductResult) -> MatrixProduct {
    match r {
        ProductResult::Zero => MatrixProduct::Zero,
        ProductResult::LeftSurvives => MatrixProduct::Left,
        ProductResult::RightSurvives => MatrixProduct::Right,
    }
}

/// Mismatch counts between the matrix products and each pivot range.
pub fn pivot_range_mismatches(model: &FockModel, cap: usize) -> Result<Vec<(PivotRange, usize, usize)>> {
    let n = model.params().n();
    let indices = enumerate_multi_indices(n, cap);
    let mats: Vec<SparseOp> = indices
        .iter()
        .map(|m| NormalMonomial::projection(m).matrix(model))
        .collect::<Result<_>>()?;
    let mut actual = Vec::with_capacity(indices.len() * indices.len());
    for pm in &mats {
        for pn in &mats {
            actual.push(classify_product(pm, pn)?);
        }
    }
    PivotRange::ALL
        .into_iter()
        .map(|range| {
            let mut bad = 0;
            for (a, mu) in indices.iter().enumerate() {
                for (b, nu) in indices.iter().enumerate() {
                    let r = projection_product_in(mu, nu, range)?;
                    bad += usize::from(as_matrix_product(r) != actual[a * indices.len() + b]);
                }
            }
            Ok((range, bad, actual.len()))
        })
        .collect()
}

fn projections_suite(cfg: &VerifyConfig) -> Result<Report> {
    let model = FockModel::new(cfg.params);
    let n = cfg.n();
    let cap = cfg.max_degree().min(4);
    let mut report = Report::new("projections", cfg);
    let indices = enumerate_multi_indices(n, cap);
    let mats: Vec<SparseOp> = indices
        .iter()
        .map(|m| NormalMonomial::projection(m).matrix(&model))
        .collect::<Result<_>>()?;

    let mut product = CheckResult::new("projections/product-rule");
    for (mu, pm) in indices.iter().zip(&mats) {
        for (nu, pn) in indices.iter().zip(&mats) {
            let actual = classify_product(pm, pn)?;
            let predicted = as_matrix_product(projection_product(mu, nu)?);
            product.case(actual == predicted, || {
                json!({"mu": mu.to_string(), "nu": nu.to_string(), "matrix": actual, "predicted": predicted})
            });
        }
    }
    report.checks.push(product);

    let mut antisymmetric = CheckResult::new("projections/antisymmetry");
    let wide = enumerate_multi_indices(n, cfg.max_degree().min(5));
    for mu in &wide {
        for nu in &wide {
            antisymmetric.case(!(precedes(nu, mu)? && precedes(mu, nu)?), || {
                json!({"mu": mu.to_string(), "nu": nu.to_string()})
            });
        }
    }
    report.checks.push(antisymmetric);

    let mut reproducing = Vec::new();
    for (range, bad, total) in pivot_range_mismatches(&model, cap)? {
        report
            .notes
            .push(format!("pivot range {range}: {bad} of {total} products mismatch the matrices"));
        if bad == 0 {
            reproducing.push(range.label());
        }
    }
    report.notes.push(format!(
        "pivot ranges reproducing every product up to degree {cap}: {}",
        if reproducing.is_empty() {
            "none".to_string()
        } else {
            reproducing.join(", ")
        }
    ));
    Ok(report)
}

fn unit_projection(model: &FockModel, mu: &MultiIndex) -> Option<SparseOp> {
    let p = model.basis().position(mu)?;
    Some(SparseOp::from_triples(model.dim(), [(p, p, Scalar::one())]))
}

fn masa_suite(cfg: &VerifyConfig) -> Result<Report> {
    let model = FockModel::new(cfg.params);
    let basis = model.basis();
    let n = cfg.n();
    let d = cfg.max_degree();
    let mut report = Report::new("masa", cfg);

    let rank_cap = (d - 1).min(5);
    let mut rank_one = CheckResult::new("masa/rank-one-projections");
    let mut padded_ok = 0;
    let mut padded_top_only = true;
    let indices = enumerate_multi_indices(n, rank_cap);
    for mu in &indices {
        let want = unit_projection(&model, mu).expect("index within the basis");
        let nf = rank_one_projection(mu);
        let got = evaluate(&nf, &model)?;
        rank_one.case(got == want, || json!({"mu": mu.to_string(), "formula": nf.to_string()}));
        let padded = evaluate(&padded_rank_one_formula(mu), &model)? == want;
        let top_only = (1..n).all(|j| mu.get(j) == 0);
        padded_ok += usize::from(padded);
        padded_top_only &= padded == top_only;
    }
    report.checks.push(rank_one);
    report.notes.push(format!(
        "padded formula P_mu - sum over all letters h of P_(mu+e_h) is the rank-one projection for {padded_ok} of {} indices{}; \
         the implemented formula subtracts only letters up to the lowest nonzero letter of mu",
        indices.len(),
        if padded_top_only {
            ", exactly those supported on the top letter"
        } else {
            ""
        }
    ));

    let mut complete = CheckResult::new("masa/diagonal-completeness");
    for deg in 0..d {
        let mut sum = SparseOp::zeros(model.dim());
        for mu in enumerate_multi_indices(n, deg) {
            sum = sum.try_add(&evaluate(&rank_one_projection(&mu), &model)?)?;
        }
        let prefix = basis.prefix_len(deg);
        let want = SparseOp::from_triples(model.dim(), (0..prefix).map(|p| (p, p, Scalar::one())));
        complete.case(sum == want, || json!({"degree": deg}));
    }
    report.checks.push(complete);

    let mono_cap = d.min(4);
    let mut monomials = CheckResult::new("masa/expectation-monomials");
    let small = enumerate_multi_indices(n, mono_cap);
    for nu in &small {
        for mu in &small {
            for flag in [false, true] {
                let m = NormalMonomial::new(nu.clone(), flag, mu.clone())?;
                let prefix = basis.guard_prefix(m.guard().min(d));
                let matrix_e = expectation(&m.matrix(&model)?);
                let symbolic_e = expectation(&evaluate(&expectation_of_monomial(&m), &model)?);
                monomials.case(matrix_e.agrees_on(&symbolic_e, prefix), || json!({"monomial": m.to_string()}));
            }
        }
    }
    report.checks.push(monomials);

    let mut words = CheckResult::new("masa/expectation-words");
    for w in random_words(n, cfg.random_words, 8, cfg.seed ^ 0xe) {
        if w.guard() > d {
            continue;
        }
        let prefix = basis.guard_prefix(w.guard());
        let op = w.matrix(&model)?;
        let matrix_e = expectation(&op);
        let nf = rewrite(&w, n)?;
        let sym = expectation_of_normal_form(&nf);
        let sym_op = evaluate(&sym, &model)?;
        let ok = sym_op.is_diagonal()
            && matrix_e.agrees_on(&expectation(&sym_op), prefix)
            && expectation(&matrix_e.to_sparse()) == matrix_e;
        words.case(ok, || json!({"word": w.to_string(), "normalForm": nf.to_string(), "symbolic": sym.to_string()}));
    }
    report.checks.push(words);

    let mut unital = CheckResult::new("masa/expectation-unital");
    unital.case(expectation(&model.identity()).to_sparse() == model.identity(), || json!({}));
    unital.case(expectation_of_normal_form(&NormalForm::identity(n)) == NormalForm::identity(n), || json!({}));
    report.checks.push(unital);

    let mut positive = CheckResult::new("masa/expectation-positive");
    for t in random_words(n, 200, 3, cfg.seed ^ 0x9) {
        let s = t.adjoint().concat(&t);
        if s.guard() > d {
            continue;
        }
        let prefix = basis.guard_prefix(s.guard());
        let e = evaluate(&expectation_of_normal_form(&rewrite(&s, n)?), &model)?;
        let bad = (0..prefix).find(|&p| e.get(p, p) < Scalar::zero());
        positive.case(bad.is_none(), || {
            let p = bad.unwrap_or_default();
            json!({"word": t.to_string(), "basisVector": basis.index_at(p).to_string(), "value": fmt_scalar(&e.get(p, p))})
        });
    }
    report.checks.push(positive);
    Ok(report)
}

fn spectrum_suite(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.n();
    let d = cfg.max_degree();
    let scfg = SpectrumConfig::new(n, d, cfg.c.clone())?;
    let c = scfg.c().clone();
    let mut report = Report::new("spectrum", cfg);
    let points = enumerate_spectrum(&scfg);
    let one = BigRational::one();

    let mut interior = CheckResult::new("spectrum/interior-points");
    let inner: Vec<_> = points.iter().filter(|p| p.kind == PointKind::Interior).collect();
    let mut sources = 0;
    for p in &inner {
        for prov in &p.provenance {
            sources += 1;
            let Provenance::Source(mu) = prov else {
                interior.case(false, || json!({"provenance": prov.to_string()}));
                continue;
            };
            let ok = embed(mu, &c).coords == p.coords && p.coords.iter().all(|x| *x != one);
            interior.case(ok, || json!({"mu": mu.to_string()}));
        }
    }
    interior.case(sources == cfg.params.basis_size(), || {
        json!({"sources": sources, "expected": cfg.params.basis_size()})
    });
    report.checks.push(interior);

    let mut boundary = CheckResult::new("spectrum/boundary-points");
    let mut convergence = CheckResult::new("spectrum/boundary-convergence");
    for p in points.iter().filter(|p| p.kind == PointKind::Boundary) {
        for prov in &p.provenance {
            let Provenance::Limit { pivot, bits, tail } = prov else {
                boundary.case(false, || json!({"provenance": prov.to_string()}));
                continue;
            };
            let k = *pivot;
            let shape = p.coords[k - 1] == one
                && p.coords[..k - 1].iter().all(|x| x.is_zero() || *x == one)
                && tail.iter().map(|&t| t as usize).sum::<usize>() <= d;
            boundary.case(shape, || json!({"point": prov.to_string()}));
            convergence.case(converges(bits, k, tail, &p.coords, &c), || json!({"point": prov.to_string()}));
        }
    }
    report.checks.push(boundary);
    report.checks.push(convergence);

    let mut vertices = CheckResult::new("spectrum/boundary-vertices");
    for mask in 1u32..(1 << n) {
        let v: Vec<BigRational> = (0..n)
            .map(|j| if mask & (1 << j) != 0 { one.clone() } else { BigRational::zero() })
            .collect();
        let found = points.iter().any(|p| p.kind == PointKind::Boundary && p.coords == v);
        vertices.case(found, || json!({"vertex": v.iter().map(fmt_big).collect::<Vec<_>>()}));
    }
    report.checks.push(vertices);
    report.notes.push(
        "the all-zero vertex is emitted only as the interior point of the vacuum; no enumerated sequence accumulates there"
            .to_string(),
    );

    let cap = d.min(4);
    let mult = verify_multiplicativity(&scfg, cap)?;
    let mut m = CheckResult::new("spectrum/multiplicativity");
    m.cases = mult.point_cases;
    m.failures = mult.point_failures.len();
    m.first_failure = mult.point_failures.first().map(|f| serde_json::to_value(f).expect("serializable"));
    report.checks.push(m);
    report.notes.push(format!(
        "identity functional: {} of {} pairs have zero product, where phi_1(0) = 0 but phi_1 * phi_1 = 1; listed, not counted",
        mult.identity_caveats.len(),
        mult.identity_cases
    ));
    let unit_pairs = mult
        .vacuum_caveats
        .iter()
        .filter(|f| f.left.index.is_zero() && f.right.index.is_zero() && f.left.vacuum != f.right.vacuum)
        .count();
    report.notes.push(format!(
        "vacuum functional: {} of {} pairs disagree, {unit_pairs} of them pairing P_Omega with P_0 = I, \
         which the rule phi_0(P_nu) = 0 without vacuum flag sends to 0; listed, not counted",
        mult.vacuum_caveats.len(),
        mult.vacuum_cases
    ));

    let mut consistent = CheckResult::new("spectrum/functional-order-consistency");
    let indices = enumerate_multi_indices(n, cap);
    for mu in &indices {
        let key = crate::spectrum::FunctionalKey::Point(mu.clone());
        for nu in &indices {
            let value = crate::spectrum::functional_apply(&key, nu, false)?;
            let left = projection_product(mu, nu)? == ProductResult::LeftSurvives;
            consistent.case((value == 1) == left, || json!({"mu": mu.to_string(), "nu": nu.to_string()}));
        }
    }
    report.checks.push(consistent);
    Ok(report)
}

/// `embed((ε, p, tail))` tends to the boundary point with every gap at most
/// `c^p`, increasing strictly in coordinate `k`, for `p = 1..=20`.
fn converges(bits: &[u8], k: usize, tail: &[u32], limit: &[BigRational], c: &BigRational) -> bool {
    let mut prev: Option<BigRational> = None;
    for p in 1..=20u32 {
        let mut counts: Vec<u32> = bits.iter().map(|&b| u32::from(b)).collect();
        counts.push(p);
        counts.extend_from_slice(tail);
        let x = embed(&MultiIndex::new(counts), c).coords;
        let gap = num_traits::pow(c.clone(), p as usize);
        let close = x.iter().zip(limit).all(|(a, b)| {
            let diff = a - b;
            let diff = if diff < BigRational::zero() { -diff } else { diff };
            diff <= gap
        });
        if !close || prev.as_ref().is_some_and(|q| *q >= x[k - 1]) {
            return false;
        }
        prev = Some(x[k - 1].clone());
    }
    true
}

fn eigen_label(e: &Eigenvalue) -> String {
    match e {
        Eigenvalue::Zero => "0".into(),
        Eigenvalue::Phase(p) => p.to_string(),
    }
}

fn gauge_suite(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.n();
    let k = cfg.roots;
    let rep = build_bundle(&cfg.params, k)?;
    let mut report = Report::new("gauge", cfg);
    let phases: Vec<CirclePhase> = (0..k).map(|e| CirclePhase::new(i64::from(e), k)).collect::<Result<_>>()?;

    let mut unitary = CheckResult::new("gauge/unitarity");
    for variant in [UnitaryVariant::VacuumShiftU, UnitaryVariant::BlockShiftV] {
        for w in &phases {
            unitary.case(gauge_unitary(&rep, *w, variant).is_ok(), || json!({"variant": variant, "w": w}));
        }
    }
    report.checks.push(unitary);

    let mut shift = CheckResult::new("gauge/shift-covariance");
    let mut vacuum_shift = CheckResult::new("gauge/vacuum-shift-deviations-degree-one");
    let mut deviations = 0;
    for i in 0..=n {
        for w in &phases {
            let v = check_covariance(&rep, i, *w, UnitaryVariant::BlockShiftV)?;
            shift.case(v.is_pass(), || json!({"generator": i, "w": w, "entry": v.failures.first()}));

            let v = check_covariance(&rep, i, *w, UnitaryVariant::VacuumShiftU)?;
            deviations += v.failures.len();
            let stray = v.failures.iter().find(|f| !is_degree_one_to_vacuum(&rep, f));
            vacuum_shift.case(stray.is_none(), || json!({"generator": i, "w": w, "entry": stray}));
        }
    }
    report.checks.push(shift);
    report.checks.push(vacuum_shift);
    report.notes.push(format!(
        "vacuum-shifting unitary (phases inside blocks, vacua moved to block w̄z): {deviations} covariance deviations over \
         all generators and {k} roots, each at a degree-one to vacuum entry where the vacuum lands in block w̄z instead of z"
    ));

    let mut group = CheckResult::new("gauge/group-law");
    for a in &phases {
        for b in &phases {
            group.case(check_group_law(&rep, *a, *b, UnitaryVariant::BlockShiftV)?, || json!({"w": a, "w2": b}));
        }
    }
    report.checks.push(group);

    let spectrum = vacuum_operator_spectrum(&rep)?;
    let mut expected: BTreeMap<Eigenvalue, usize> = phases.iter().map(|p| (Eigenvalue::Phase(*p), 1)).collect();
    expected.insert(Eigenvalue::Zero, k as usize * (rep.block_len() - 1));
    let mut eig = CheckResult::new("gauge/vacuum-operator-spectrum");
    eig.case(spectrum == expected, || {
        json!({"got": spectrum.iter().map(|(e, m)| (eigen_label(e), *m)).collect::<BTreeMap<_, _>>()})
    });
    report.checks.push(eig);

    let q = check_quotient_relation(&rep)?;
    let mut quotient = CheckResult::new("gauge/quotient-relation");
    quotient.case(q.difference_vanishes, || json!({"property": "difference vanishes"}));
    quotient.case(q.self_adjoint, || json!({"property": "self-adjoint"}));
    quotient.case(q.idempotent, || json!({"property": "idempotent"}));
    quotient.case(q.fixes_vacua, || json!({"property": "fixes every vacuum"}));
    quotient.case(q.partial_isometry, || json!({"property": "partial isometry"}));
    report.checks.push(quotient);
    report.notes.push(format!(
        "vacuum operator is a partial isometry but {}unitary on the bundle",
        if q.unitary { "" } else { "not " }
    ));
    Ok(report)
}
