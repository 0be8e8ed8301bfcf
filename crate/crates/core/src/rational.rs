//! Exact rational helpers.
//!
//! All probabilities in this crate are [`Rational`] values (arbitrary
//! precision, always in lowest terms). This module adds exact string parsing
//! (fractions and decimals, never binary floats) and the formatting used by
//! reports.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty number")]
    Empty,
    #[error("malformed number {0:?}: expected \"a/b\", an integer, or a plain decimal")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn parse_digits(s: &str, whole: &str) -> Result<BigInt, RationalParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RationalParseError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| RationalParseError::Malformed(whole.to_string()))
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"0.125"` exactly.
///
/// Exponent notation is rejected: it is the usual sign of a value that went
/// through binary floating point before reaching us.
pub fn parse_exact(text: &str) -> Result<Rational, RationalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num.trim(), text)?;
        let den = parse_digits(den.trim(), text)?;
        if den.is_zero() {
            return Err(RationalParseError::ZeroDenominator(text.to_string()));
        }
        Rational::new(num, den)
    } else if let Some((whole, fraction)) = body.split_once('.') {
        if whole.is_empty() && fraction.is_empty() {
            return Err(RationalParseError::Malformed(text.to_string()));
        }
        let whole = if whole.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(whole, text)?
        };
        let (fnum, scale) = if fraction.is_empty() {
            (BigInt::zero(), BigInt::one())
        } else {
            (
                parse_digits(fraction, text)?,
                num_traits::pow(BigInt::from(10u8), fraction.len()),
            )
        };
        Rational::new(whole * &scale + fnum, scale)
    } else {
        Rational::from_integer(parse_digits(body, text)?)
    };
    Ok(if negative { -value } else { value })
}

/// Lowest-terms `"a/b"`, or `"a"` for integers.
pub fn format_exact(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation with `sig` significant digits, computed on the exact
/// value so that magnitudes far below `f64` range still print correctly.
pub fn approx_decimal(r: &Rational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let ten = BigInt::from(10u8);

    // exponent e with 10^e <= num/den < 10^(e+1)
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ge_pow = |e: i64| -> bool {
        if e >= 0 {
            num >= &den * num_traits::pow(ten.clone(), e as usize)
        } else {
            &num * num_traits::pow(ten.clone(), (-e) as usize) >= den
        }
    };
    while !ge_pow(e) {
        e -= 1;
    }
    while ge_pow(e + 1) {
        e += 1;
    }

    // mantissa = round(num/den * 10^(sig-1-e))
    let shift = sig as i64 - 1 - e;
    let (n, d) = if shift >= 0 {
        (num * num_traits::pow(ten.clone(), shift as usize), den)
    } else {
        (num, den * num_traits::pow(ten.clone(), (-shift) as usize))
    };
    let (q, rem) = n.div_rem(&d);
    let mut mantissa = if rem * 2 >= d { q + 1 } else { q };
    if mantissa >= num_traits::pow(ten.clone(), sig) {
        mantissa /= &ten;
        e += 1;
    }
    let digits = mantissa.to_string();
    let (head, tail) = digits.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };

    if (-4..sig as i64).contains(&e) {
        // fixed notation
        let all: String = format!("{head}{tail}");
        let s = if e >= 0 {
            let int_len = (e + 1) as usize;
            if all.len() <= int_len {
                format!("{all}{}", "0".repeat(int_len - all.len()))
            } else {
                format!("{}.{}", &all[..int_len], &all[int_len..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), all)
        };
        format!("{sign}{s}")
    } else if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Fraction together with its 12-significant-digit decimal hint.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{})", format_exact(self.0), approx_decimal(self.0, 12))
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of bits in the binary representation of |n| (0 for zero).
pub fn bit_length(n: &BigInt) -> u64 {
    n.bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_exact("1/10").unwrap(), frac(1, 10));
        assert_eq!(parse_exact("0.1").unwrap(), frac(1, 10));
        assert_eq!(parse_exact("2/4").unwrap(), frac(1, 2));
        assert_eq!(parse_exact("1").unwrap(), int(1));
        assert_eq!(parse_exact(".5").unwrap(), frac(1, 2));
        assert_eq!(parse_exact("3.").unwrap(), int(3));
        assert_eq!(parse_exact("-0.25").unwrap(), frac(-1, 4));
    }

    #[test]
    fn rejects_float_shapes() {
        assert!(parse_exact("1e-3").is_err());
        assert!(parse_exact("0.1f").is_err());
        assert!(parse_exact("").is_err());
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("/3").is_err());
        assert!(parse_exact(".").is_err());
    }

    #[test]
    fn formats() {
        assert_eq!(format_exact(&frac(6, 8)), "3/4");
        assert_eq!(format_exact(&int(1)), "1");
        assert_eq!(approx_decimal(&frac(1, 3), 12), "0.333333333333");
        assert_eq!(approx_decimal(&frac(2, 3), 12), "0.666666666667");
        assert_eq!(approx_decimal(&frac(1, 10), 12), "0.1");
        assert_eq!(approx_decimal(&int(10), 12), "10");
        assert_eq!(approx_decimal(&frac(1, 65537), 12), "1.52585562354e-5");
        assert_eq!(approx_decimal(&frac(1, 10_000), 12), "0.0001");
        assert_eq!(approx_decimal(&frac(-7, 2), 3), "-3.5");
        assert_eq!(approx_decimal(&frac(999_999, 1), 2), "1e6");
        let tiny = Rational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(10), 400),
        );
        assert_eq!(approx_decimal(&tiny, 12), "1e-400");
    }

    #[test]
    fn factorial_and_bits() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(6), BigUint::from(720u32));
        assert_eq!(bit_length(&BigInt::from(65537)), 17);
        assert_eq!(bit_length(&BigInt::from(17 * 17)), 9);
    }
}
