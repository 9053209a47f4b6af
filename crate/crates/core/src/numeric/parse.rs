//! Text grammar for scalars and scalar kinds.
//!
//! ```text
//! rational   a/b | a | decimal | scientific
//! quadratic  x+y*sqrt(d) | x-y*sqrt(d) | y*sqrt(d) | x
//! float      decimal | scientific | a/b
//! complex    re+im*i | re-im*i | im*i | re
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bigfloat::BigFloat;
use super::quadratic::Quadratic;
use super::{ComplexFloat, NumericError, Scalar, ScalarKind};

fn bad(text: &str) -> NumericError {
    NumericError::Parse(text.to_string())
}

fn parse_int(text: &str) -> Result<BigInt, NumericError> {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(text));
    }
    text.parse::<BigInt>().map_err(|_| bad(text))
}

/// Exact value of `a/b`, an integer, or a decimal with optional exponent.
pub fn parse_decimal_or_ratio(text: &str) -> Result<BigRational, NumericError> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num = parse_int(a.trim())?;
        let den = parse_int(b.trim())?;
        if den.is_zero() {
            return Err(NumericError::ZeroDenominator);
        }
        return Ok(BigRational::new(num, den));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| bad(text))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mant.as_bytes().first() {
        Some(b'-') => (true, &mant[1..]),
        Some(b'+') => (false, &mant[1..]),
        _ => (false, mant),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad(text));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad(text));
    }
    if exp.unsigned_abs() > 100_000 {
        return Err(bad(text));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().unwrap_or_default());
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let p = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= BigRational::from_integer(p);
    } else {
        value /= BigRational::from_integer(p);
    }
    Ok(if neg { -value } else { value })
}

/// Splits `a±b<suffix>` at the sign that separates the two parts, skipping
/// a leading sign and signs that belong to an exponent.
fn split_binary(body: &str) -> Option<(&str, &str)> {
    let bytes = body.as_bytes();
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            return Some((&body[..i], &body[i..]));
        }
    }
    None
}

fn parse_quadratic(text: &str, d: u64) -> Result<Quadratic, NumericError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(pos) = t.find("*sqrt(") else {
        return Ok(Quadratic::from_rational(parse_decimal_or_ratio(&t)?, d));
    };
    let rest = &t[pos + 6..];
    let inner = rest.strip_suffix(')').ok_or_else(|| bad(text))?;
    let found: u64 = inner.parse().map_err(|_| bad(text))?;
    if found != d {
        return Err(NumericError::RadicandMismatch(d, found));
    }
    let head = &t[..pos];
    let (x, y) = match split_binary(head) {
        Some((x, y)) => (parse_decimal_or_ratio(x)?, parse_decimal_or_ratio(y)?),
        None => (BigRational::zero(), parse_decimal_or_ratio(head)?),
    };
    Quadratic::new(x, y, d)
}

fn parse_complex(text: &str, precision: u32) -> Result<ComplexFloat, NumericError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (re, im) = if let Some(head) = t.strip_suffix("*i") {
        match split_binary(head) {
            Some((re, im)) => (parse_decimal_or_ratio(re)?, parse_decimal_or_ratio(im)?),
            None => (BigRational::zero(), parse_decimal_or_ratio(head)?),
        }
    } else if t == "i" {
        (BigRational::zero(), BigRational::one())
    } else {
        (parse_decimal_or_ratio(&t)?, BigRational::zero())
    };
    Ok(ComplexFloat {
        re: BigFloat::from_rational(&re, precision),
        im: BigFloat::from_rational(&im, precision),
    })
}

/// Parses `text` as a value of the given kind.
pub fn parse_scalar(text: &str, kind: ScalarKind) -> Result<Scalar, NumericError> {
    match kind {
        ScalarKind::Rational => Ok(Scalar::rational(parse_decimal_or_ratio(text)?)),
        ScalarKind::Quadratic(d) => Ok(Scalar::from_quadratic(parse_quadratic(text, d)?)),
        ScalarKind::Float(p) => Ok(Scalar::float(BigFloat::parse(text, p)?)),
        ScalarKind::ComplexFloat(p) => Ok(Scalar::complex(parse_complex(text, p)?)),
    }
}

pub fn parse_kind(text: &str) -> Result<ScalarKind, NumericError> {
    let t = text.trim().to_ascii_lowercase();
    if t == "rational" {
        return Ok(ScalarKind::Rational);
    }
    let arg = |prefix: &str| -> Option<u64> {
        t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
    };
    if let Some(d) = arg("quadratic") {
        if !super::quadratic::is_squarefree_radicand(d) {
            return Err(NumericError::BadRadicand(d));
        }
        return Ok(ScalarKind::Quadratic(d));
    }
    let prec = |p: u64| -> Result<u32, NumericError> {
        if (2..=1 << 20).contains(&p) {
            Ok(p as u32)
        } else {
            Err(NumericError::BadKind(text.to_string()))
        }
    };
    if let Some(p) = arg("float") {
        return Ok(ScalarKind::Float(prec(p)?));
    }
    if let Some(p) = arg("complex") {
        return Ok(ScalarKind::ComplexFloat(prec(p)?));
    }
    Err(NumericError::BadKind(text.to_string()))
}
