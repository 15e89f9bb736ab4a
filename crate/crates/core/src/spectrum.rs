//! Gelfand spectrum of the diagonal subalgebra, embedded in the unit cube.
//!
//! Each `μ` gives the multiplicative functional `φ_μ` and the interior point
//! `x_k = 1 − c^{r_k(μ)}`, where `r_k(μ) = μ_k + ⋯ + μ_n` if `μ_k ≠ 0` and `0`
//! otherwise. Letting `μ_k → ∞` with the letters below `k` frozen in `{0,1}`
//! produces the boundary points `(ε_1, …, ε_{k−1}, 1, x_{k+1}, …, x_n)`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multi_index::{enumerate_multi_indices, MultiIndex};
use crate::order::{precedes_or_equal, projection_product, ProductResult};
use crate::rational::{fmt_big, to_decimal};

pub const DECIMAL_DIGITS: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumConfig {
    n: usize,
    max_degree: usize,
    c: BigRational,
}

impl SpectrumConfig {
    pub fn new(n: usize, max_degree: usize, c: BigRational) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
        }
        if max_degree < 1 {
            return Err(Error::InvalidParams("max degree must be at least 1".into()));
        }
        if c <= BigRational::zero() || c >= BigRational::one() {
            return Err(Error::InvalidParams(format!("c must lie in (0, 1), got {}", fmt_big(&c))));
        }
        Ok(Self { n, max_degree, c })
    }

    /// `c = 1/2`.
    pub fn with_half(n: usize, max_degree: usize) -> Result<Self> {
        Self::new(n, max_degree, BigRational::new(1.into(), 2.into()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Interior,
    Boundary,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::Interior => "interior",
            PointKind::Boundary => "boundary",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Source(MultiIndex),
    /// Limit of `(bits, p, tail)` as `p → ∞`.
    Limit {
        pivot: usize,
        bits: Vec<u8>,
        tail: Vec<u32>,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Source(mu) => write!(f, "{}", mu.semicolon_label()),
            Provenance::Limit { pivot, bits, tail } => {
                let bits: String = bits.iter().map(u8::to_string).collect();
                let tail: Vec<String> = tail.iter().map(u32::to_string).collect();
                write!(f, "lim(k={pivot}|eps={bits}|tail={})", tail.join(";"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumPoint {
    pub coords: Vec<BigRational>,
    pub kind: PointKind,
    pub provenance: Vec<Provenance>,
}

impl SpectrumPoint {
    pub fn provenance_label(&self) -> String {
        let parts: Vec<String> = self.provenance.iter().map(ToString::to_string).collect();
        parts.join("+")
    }
}

fn check_letter(k: usize, n: usize) -> Result<()> {
    if (1..=n).contains(&k) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: k, min: 1, max: n })
    }
}

pub fn r_value(mu: &MultiIndex, k: usize) -> Result<usize> {
    check_letter(k, mu.len())?;
    Ok(if mu.get(k) == 0 {
        0
    } else {
        (k..=mu.len()).map(|j| mu.get(j) as usize).sum()
    })
}

fn one_minus_power(c: &BigRational, r: usize) -> BigRational {
    BigRational::one() - num_traits::pow(c.clone(), r)
}

pub fn embed(mu: &MultiIndex, c: &BigRational) -> SpectrumPoint {
    let coords = (1..=mu.len())
        .map(|k| one_minus_power(c, r_value(mu, k).expect("letter in range")))
        .collect();
    SpectrumPoint {
        coords,
        kind: PointKind::Interior,
        provenance: vec![Provenance::Source(mu.clone())],
    }
}

/// Boundary point from pivot `k`, bits for letters `1..k`, and the tail
/// counts for letters `k+1..=n`.
pub fn boundary_point(pivot: usize, bits: &[u8], tail: &[u32], c: &BigRational) -> SpectrumPoint {
    let mut coords: Vec<BigRational> = bits
        .iter()
        .map(|&b| BigRational::from_integer(BigInt::from(b)))
        .collect();
    coords.push(BigRational::one());
    for j in 0..tail.len() {
        let r = if tail[j] == 0 {
            0
        } else {
            tail[j..].iter().map(|&t| t as usize).sum()
        };
        coords.push(one_minus_power(c, r));
    }
    SpectrumPoint {
        coords,
        kind: PointKind::Boundary,
        provenance: vec![Provenance::Limit {
            pivot,
            bits: bits.to_vec(),
            tail: tail.to_vec(),
        }],
    }
}

/// Interior points for every `|μ| ≤ D` (graded order), then boundary points
/// ordered by pivot, bits, and tail. Coinciding points are merged and keep
/// every provenance.
pub fn enumerate_spectrum(cfg: &SpectrumConfig) -> Vec<SpectrumPoint> {
    let n = cfg.n;
    let mut points: Vec<SpectrumPoint> = Vec::new();
    let mut seen: BTreeMap<Vec<BigRational>, usize> = BTreeMap::new();
    let mut push = |p: SpectrumPoint, points: &mut Vec<SpectrumPoint>| match seen.get(&p.coords) {
        Some(&i) => points[i].provenance.extend(p.provenance),
        None => {
            seen.insert(p.coords.clone(), points.len());
            points.push(p);
        }
    };

    for mu in enumerate_multi_indices(n, cfg.max_degree) {
        push(embed(&mu, &cfg.c), &mut points);
    }
    for pivot in 1..=n {
        let tails = if pivot == n {
            vec![MultiIndex::new(Vec::new())]
        } else {
            enumerate_multi_indices(n - pivot, cfg.max_degree)
        };
        for mask in 0u32..(1 << (pivot - 1)) {
            let bits: Vec<u8> = (0..pivot - 1).map(|j| ((mask >> (pivot - 2 - j)) & 1) as u8).collect();
            for tail in &tails {
                push(boundary_point(pivot, &bits, tail.counts(), &cfg.c), &mut points);
            }
        }
    }
    points
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FunctionalKey {
    /// `φ_0`, supported on `P_Ω`.
    Vacuum,
    /// `φ_1`, constant 1.
    Identity,
    Point(MultiIndex),
}

/// `φ(P_ν)` (or `φ(P⁰_ν)` when `vacuum_flag`) as 0 or 1.
pub fn functional_apply(key: &FunctionalKey, nu: &MultiIndex, vacuum_flag: bool) -> Result<u8> {
    Ok(match key {
        FunctionalKey::Vacuum => u8::from(nu.is_zero() && vacuum_flag),
        FunctionalKey::Identity => 1,
        FunctionalKey::Point(mu) => u8::from(precedes_or_equal(nu, mu)?),
    })
}

/// Element of the projection family used by the multiplicativity check:
/// `P_ν`, or `P_Ω` when `vacuum` is set (then `index` is zero).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionLabel {
    pub index: MultiIndex,
    pub vacuum: bool,
}

impl fmt::Display for ProjectionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vacuum {
            write!(f, "P_Ω")
        } else {
            write!(f, "P{}", self.index)
        }
    }
}

/// `P_x P_y` within the family; `None` is the zero projection.
fn resolve<'a>(x: &'a ProjectionLabel, y: &'a ProjectionLabel) -> Result<Option<&'a ProjectionLabel>> {
    Ok(match (x.vacuum, y.vacuum) {
        (true, true) => Some(x),
        // P_0 = I is the only P_ν containing Ω
        (true, false) => y.index.is_zero().then_some(x),
        (false, true) => x.index.is_zero().then_some(y),
        (false, false) => match projection_product(&x.index, &y.index)? {
            ProductResult::Zero => None,
            ProductResult::LeftSurvives => Some(x),
            ProductResult::RightSurvives => Some(y),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicativityCase {
    pub key: FunctionalKey,
    pub left: ProjectionLabel,
    pub right: ProjectionLabel,
    pub product: Option<ProjectionLabel>,
    pub value_of_product: u8,
    pub product_of_values: u8,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MultiplicativityReport {
    /// Pairs checked for `Point` functionals.
    pub point_cases: usize,
    /// Counted failures: `Point` functionals only.
    pub point_failures: Vec<MultiplicativityCase>,
    pub vacuum_cases: usize,
    /// `φ_0` violations; the literal rule assigns `φ_0(P_0) = φ_0(I) = 0`.
    pub vacuum_caveats: Vec<MultiplicativityCase>,
    pub identity_cases: usize,
    /// `φ_1` on pairs with zero product (`φ_1(0) = 0` but `1 · 1 = 1`).
    pub identity_caveats: Vec<MultiplicativityCase>,
}

impl MultiplicativityReport {
    pub fn passes(&self) -> bool {
        self.point_failures.is_empty()
    }
}

fn value(key: &FunctionalKey, p: Option<&ProjectionLabel>) -> Result<u8> {
    match p {
        None => Ok(0),
        Some(p) => functional_apply(key, &p.index, p.vacuum),
    }
}

/// Checks `φ(P_ν P_ρ) = φ(P_ν) φ(P_ρ)` for all `|ν|, |ρ| ≤ degree_cap`, with
/// products resolved by [`projection_product`]. `Point` keys range over
/// `|μ| ≤ degree_cap`. The vacuum functional is additionally checked against
/// `P_Ω`.
pub fn verify_multiplicativity(cfg: &SpectrumConfig, degree_cap: usize) -> Result<MultiplicativityReport> {
    if degree_cap > cfg.max_degree {
        return Err(Error::InvalidParams(format!(
            "degree cap {degree_cap} exceeds max degree {}",
            cfg.max_degree
        )));
    }
    let n = cfg.n;
    let indices = enumerate_multi_indices(n, degree_cap);
    let family: Vec<ProjectionLabel> = indices
        .iter()
        .map(|m| ProjectionLabel {
            index: m.clone(),
            vacuum: false,
        })
        .collect();
    let mut with_vacuum = family.clone();
    with_vacuum.push(ProjectionLabel {
        index: MultiIndex::zero(n),
        vacuum: true,
    });

    let mut report = MultiplicativityReport::default();
    let run = |key: &FunctionalKey, fam: &[ProjectionLabel]| -> Result<(usize, Vec<MultiplicativityCase>)> {
        let mut bad = Vec::new();
        let mut cases = 0;
        for x in fam {
            for y in fam {
                cases += 1;
                let prod = resolve(x, y)?;
                let lhs = value(key, prod)?;
                let rhs = value(key, Some(x))? * value(key, Some(y))?;
                if lhs != rhs {
                    bad.push(MultiplicativityCase {
                        key: key.clone(),
                        left: x.clone(),
                        right: y.clone(),
                        product: prod.cloned(),
                        value_of_product: lhs,
                        product_of_values: rhs,
                    });
                }
            }
        }
        Ok((cases, bad))
    };

    for mu in &indices {
        let (cases, bad) = run(&FunctionalKey::Point(mu.clone()), &family)?;
        report.point_cases += cases;
        report.point_failures.extend(bad);
    }
    let (cases, bad) = run(&FunctionalKey::Vacuum, &with_vacuum)?;
    report.vacuum_cases = cases;
    report.vacuum_caveats = bad;
    let (cases, bad) = run(&FunctionalKey::Identity, &family)?;
    report.identity_cases = cases;
    report.identity_caveats = bad;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    Svg,
}

/// CSV: `kind,provenance,x1..xn` as `p/q`, then `x1..xn` as decimals.
/// SVG: unit square (`n = 2`) or oblique cube projection (`n = 3`).
pub fn emit_dataset<W: Write>(points: &[SpectrumPoint], n: usize, format: DatasetFormat, out: &mut W) -> Result<()> {
    match format {
        DatasetFormat::Csv => emit_csv(points, n, out),
        DatasetFormat::Svg => match n {
            2 => emit_svg_square(points, out),
            3 => emit_svg_cube(points, out),
            _ => Err(Error::Unsupported(format!("svg output needs n = 2 or 3, got n = {n}"))),
        },
    }
}

fn emit_csv<W: Write>(points: &[SpectrumPoint], n: usize, out: &mut W) -> Result<()> {
    let mut header = vec!["kind".to_string(), "provenance".to_string()];
    header.extend((1..=n).map(|k| format!("x{k}")));
    header.extend((1..=n).map(|k| format!("x{k}_decimal")));
    writeln!(out, "{}", header.join(","))?;
    for p in points {
        let mut row = vec![p.kind.to_string(), p.provenance_label()];
        row.extend(p.coords.iter().map(fmt_big));
        row.extend(p.coords.iter().map(|x| to_decimal(x, DECIMAL_DIGITS)));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

const SIZE: f64 = 400.0;
const MARGIN: f64 = 40.0;

fn marker<W: Write>(out: &mut W, kind: PointKind, x: f64, y: f64) -> Result<()> {
    match kind {
        PointKind::Interior => writeln!(out, r##"  <circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#d62728"/>"##)?,
        PointKind::Boundary => writeln!(
            out,
            r##"  <rect x="{:.3}" y="{:.3}" width="7" height="7" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
            x - 3.5,
            y - 3.5
        )?,
    }
    Ok(())
}

fn svg_open<W: Write>(out: &mut W, width: f64, height: f64) -> Result<()> {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )?;
    writeln!(out, r#"  <rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#)?;
    Ok(())
}

fn emit_svg_square<W: Write>(points: &[SpectrumPoint], out: &mut W) -> Result<()> {
    let total = SIZE + 2.0 * MARGIN;
    svg_open(out, total, total)?;
    writeln!(
        out,
        r#"  <rect x="{MARGIN:.3}" y="{MARGIN:.3}" width="{SIZE:.3}" height="{SIZE:.3}" fill="none" stroke="black"/>"#
    )?;
    writeln!(
        out,
        r#"  <text x="{:.3}" y="{:.3}" font-size="14">x1</text>"#,
        MARGIN + SIZE + 8.0,
        MARGIN + SIZE + 4.0
    )?;
    writeln!(out, r#"  <text x="{:.3}" y="{:.3}" font-size="14">x2</text>"#, MARGIN - 8.0, MARGIN - 10.0)?;
    for p in points {
        let x = MARGIN + SIZE * to_f64(&p.coords[0]);
        let y = MARGIN + SIZE * (1.0 - to_f64(&p.coords[1]));
        marker(out, p.kind, x, y)?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}

// oblique projection: x2 recedes up and to the right
const DEPTH_X: f64 = 0.45;
const DEPTH_Y: f64 = 0.3;

fn project(x: [f64; 3]) -> (f64, f64) {
    let scale = SIZE / (1.0 + DEPTH_X);
    let px = MARGIN + scale * (x[0] + DEPTH_X * x[1]);
    let py = MARGIN + scale * (1.0 + DEPTH_Y - x[2] - DEPTH_Y * x[1]);
    (px, py)
}

fn emit_svg_cube<W: Write>(points: &[SpectrumPoint], out: &mut W) -> Result<()> {
    let total = SIZE + 2.0 * MARGIN;
    svg_open(out, total, total)?;
    for a in 0..8u8 {
        for axis in 0..3 {
            if a & (1 << axis) != 0 {
                continue;
            }
            let b = a | (1 << axis);
            let corner = |v: u8| [f64::from(v & 1), f64::from((v >> 1) & 1), f64::from((v >> 2) & 1)];
            let (x1, y1) = project(corner(a));
            let (x2, y2) = project(corner(b));
            writeln!(
                out,
                r##"  <line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#555555"/>"##
            )?;
        }
    }
    for (label, v) in [("x1", [1.08, 0.0, 0.0]), ("x2", [0.0, 1.08, 0.0]), ("x3", [0.0, 0.0, 1.08])] {
        let (x, y) = project(v);
        writeln!(out, r#"  <text x="{x:.3}" y="{y:.3}" font-size="14">{label}</text>"#)?;
    }
    for p in points {
        let (x, y) = project([to_f64(&p.coords[0]), to_f64(&p.coords[1]), to_f64(&p.coords[2])]);
        marker(out, p.kind, x, y)?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}
