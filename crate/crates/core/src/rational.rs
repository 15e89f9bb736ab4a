//! Exact scalar helpers: `p/q` text in and out, and fixed-precision decimal
//! rendering for datasets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Scalar field of every operator matrix in the crate. Generator matrices are
/// 0/1 and normal-form coefficients stay small integers or simple fractions,
/// so 64-bit numerators are ample.
pub type Scalar = Ratio<i64>;

/// Always renders as `p/q`, including integers (`1/1`, `0/1`).
pub fn fmt_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn fmt_big(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer. Decimal input is rejected.
pub fn parse_big_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidRational(text.to_string());
    let t = text.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Decimal rendering with `sig` significant digits, round-half-even, trailing
/// zeros removed. Exact: no floating point is involved.
pub fn to_decimal(x: &BigRational, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let x = x.abs();
    let ten = BigInt::from(10);

    // Smallest e with x < 10^(e+1), so that 10^e <= x.
    let mut e: i64 = 0;
    while pow10_rat(e + 1) <= x {
        e += 1;
    }
    while pow10_rat(e) > x {
        e -= 1;
    }

    let shift = sig as i64 - 1 - e;
    let mut digits = round_half_even(&(&x * pow10_rat(shift)));
    if digits == num_traits::pow(ten.clone(), sig) {
        digits /= &ten;
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let s = digits.to_string();

    // value = digits * 10^(-shift)
    let body = if shift <= 0 {
        let mut out = s;
        out.push_str(&"0".repeat((-shift) as usize));
        out
    } else {
        let shift = shift as usize;
        let (int_part, frac_part) = if s.len() > shift {
            let (a, b) = s.split_at(s.len() - shift);
            (a.to_string(), b.to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(shift - s.len()), s))
        };
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            int_part
        } else {
            format!("{int_part}.{frac}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10_rat(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn round_half_even(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    let twice: BigInt = &r * 2;
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&r(3, 4), 15), "0.75");
        assert_eq!(to_decimal(&r(1, 2), 15), "0.5");
        assert_eq!(to_decimal(&r(0, 1), 15), "0");
        assert_eq!(to_decimal(&r(1, 1), 15), "1");
        assert_eq!(to_decimal(&r(1, 3), 15), "0.333333333333333");
        assert_eq!(to_decimal(&r(2, 3), 15), "0.666666666666667");
        assert_eq!(to_decimal(&r(255, 256), 15), "0.99609375");
        // 1 - 2^-60 rounds up to 1 at 15 digits
        let tiny = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 60));
        assert_eq!(to_decimal(&(BigRational::one() - tiny), 15), "1");
    }

    #[test]
    fn half_even_ties() {
        assert_eq!(to_decimal(&r(125, 1000), 2), "0.12");
        assert_eq!(to_decimal(&r(135, 1000), 2), "0.14");
        assert_eq!(to_decimal(&r(25, 1), 1), "20");
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_big_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_big_rational("3").unwrap(), r(3, 1));
        assert!(parse_big_rational("0.5").is_err());
        assert!(parse_big_rational("1/0").is_err());
        assert!(parse_big_rational("a/b").is_err());
    }

    #[test]
    fn scalar_text() {
        assert_eq!(fmt_scalar(&Scalar::from_integer(1)), "1/1");
        assert_eq!(fmt_scalar(&Scalar::new(-2, 4)), "-1/2");
    }
}
