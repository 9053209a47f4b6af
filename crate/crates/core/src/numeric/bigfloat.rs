//! Arbitrary-precision binary floating point.
//!
//! A [`BigFloat`] is `mantissa * 2^exponent` with at most `precision`
//! significant bits. Every operation computes the exact result (or enough
//! bits of it plus a sticky flag) and rounds once, to nearest with ties to
//! even, so results are deterministic and independent of the platform.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumericError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigFloat {
    /// Odd, or zero.
    mantissa: BigInt,
    exponent: i64,
    precision: u32,
}

fn bits(x: &BigInt) -> i64 {
    x.bits() as i64
}

impl BigFloat {
    pub fn zero(precision: u32) -> Self {
        BigFloat { mantissa: BigInt::zero(), exponent: 0, precision }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Rounds `mantissa * 2^exponent` to `precision` bits.
    ///
    /// `sticky` marks a nonzero tail below the last bit of `mantissa` with
    /// the same sign as `mantissa`; callers that set it must supply at least
    /// `precision + 2` bits so the tail only breaks ties.
    fn round(mantissa: BigInt, exponent: i64, sticky: bool, precision: u32) -> Self {
        if mantissa.is_zero() {
            return BigFloat::zero(precision);
        }
        let negative = mantissa.is_negative();
        let mut mag = mantissa.magnitude().clone();
        let mut exp = exponent;
        let nbits = mag.bits() as i64;
        let prec = precision as i64;
        if nbits > prec {
            let shift = (nbits - prec) as u64;
            let q = &mag >> shift;
            let rem = &mag - (&q << shift);
            let half = BigUint::one() << (shift - 1);
            let round_up = match rem.cmp(&half) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => sticky || q.is_odd(),
            };
            mag = if round_up { q + 1u32 } else { q };
            exp += shift as i64;
            if mag.bits() as i64 > prec {
                mag >>= 1u32;
                exp += 1;
            }
        }
        let tz = mag.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mag >>= tz;
            exp += tz as i64;
        }
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        BigFloat { mantissa: BigInt::from_biguint(sign, mag), exponent: exp, precision }
    }

    /// Nearest float to the exact rational `q`.
    pub fn from_rational(q: &BigRational, precision: u32) -> Self {
        if q.is_zero() {
            return BigFloat::zero(precision);
        }
        let num = q.numer();
        let den = q.denom();
        let shift = precision as i64 + 3 - (bits(num) - bits(den));
        let (scaled_num, scaled_den) = if shift >= 0 {
            (num << shift as u64, den.clone())
        } else {
            (num.clone(), den << (-shift) as u64)
        };
        let (quot, rem) = scaled_num.div_rem(&scaled_den);
        BigFloat::round(quot, -shift, !rem.is_zero(), precision)
    }

    pub fn from_integer(i: &BigInt, precision: u32) -> Self {
        BigFloat::round(i.clone(), 0, false, precision)
    }

    /// Exact conversion of a finite double, then rounding to `precision`.
    pub fn from_f64(x: f64, precision: u32) -> Result<Self, NumericError> {
        if !x.is_finite() {
            return Err(NumericError::NonFinite);
        }
        if x == 0.0 {
            return Ok(BigFloat::zero(precision));
        }
        let raw = x.to_bits();
        let sign = raw >> 63;
        let biased = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 { (frac, -1074) } else { (frac | (1u64 << 52), biased - 1075) };
        let mut mant = BigInt::from(m);
        if sign == 1 {
            mant = -mant;
        }
        Ok(BigFloat::round(mant, e, false, precision))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as u64)
        }
    }

    /// Rounds to a new precision.
    pub fn with_precision(&self, precision: u32) -> Self {
        BigFloat::round(self.mantissa.clone(), self.exponent, false, precision)
    }

    /// Nearest double (saturating to infinity outside the double range).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.with_precision(53);
        let m = r.mantissa.to_f64().unwrap_or(f64::NAN);
        ldexp(m, r.exponent)
    }

    /// Natural logarithm of `|self|` in double precision, valid far beyond
    /// the double exponent range.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let nb = bits(&self.mantissa);
        let keep = nb.min(60);
        let top = (self.mantissa.abs() >> (nb - keep) as u64).to_f64().unwrap_or(f64::NAN);
        top.ln() + ((self.exponent + nb - keep) as f64) * std::f64::consts::LN_2
    }

    pub fn neg(&self) -> Self {
        BigFloat { mantissa: -&self.mantissa, exponent: self.exponent, precision: self.precision }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mantissa: self.mantissa.abs(), exponent: self.exponent, precision: self.precision }
    }

    /// Position one past the most significant bit.
    fn top(&self) -> i64 {
        self.exponent + bits(&self.mantissa)
    }

    pub fn add(&self, other: &BigFloat) -> BigFloat {
        let precision = self.precision;
        if other.is_zero() {
            return self.with_precision(precision);
        }
        if self.is_zero() {
            return other.with_precision(precision);
        }
        let (big, small) = if self.top() >= other.top() { (self, other) } else { (other, self) };
        let guard = precision as i64 + 3;
        let low = big.top() - guard - 2;
        if small.top() <= low {
            // `small` lies entirely below the rounding position: replace it
            // by a one-bit stand-in that only breaks ties.
            let shift = (big.exponent - low + 1).max(0);
            let mant = (&big.mantissa << shift as u64) * 2 + small.mantissa.signum();
            return BigFloat::round(mant, big.exponent - shift - 1, false, precision);
        }
        let e = big.exponent.min(small.exponent);
        let sum = (&big.mantissa << (big.exponent - e) as u64) + (&small.mantissa << (small.exponent - e) as u64);
        BigFloat::round(sum, e, false, precision)
    }

    pub fn sub(&self, other: &BigFloat) -> BigFloat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BigFloat) -> BigFloat {
        BigFloat::round(&self.mantissa * &other.mantissa, self.exponent + other.exponent, false, self.precision)
    }

    pub fn div(&self, other: &BigFloat) -> Result<BigFloat, NumericError> {
        if other.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(BigFloat::zero(self.precision));
        }
        let shift = (self.precision as i64 + 3 - (bits(&self.mantissa) - bits(&other.mantissa))).max(0);
        let num = &self.mantissa << shift as u64;
        let (q, r) = num.div_rem(&other.mantissa);
        Ok(BigFloat::round(q, self.exponent - other.exponent - shift, !r.is_zero(), self.precision))
    }

    pub fn sqrt(&self) -> Result<BigFloat, NumericError> {
        if self.is_negative() {
            return Err(NumericError::NegativeSqrt);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let want = 2 * (self.precision as i64 + 3);
        let mut shift = (want - bits(&self.mantissa)).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = self.mantissa.magnitude() << shift as u64;
        let root = scaled.sqrt();
        let exact = &root * &root == scaled;
        Ok(BigFloat::round(BigInt::from(root), (self.exponent - shift) / 2, !exact, self.precision))
    }

    pub fn powi(&self, e: u32) -> BigFloat {
        let mut acc = BigFloat::round(BigInt::one(), 0, false, self.precision);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Number of decimal digits that guarantees a round trip.
    pub fn decimal_digits(precision: u32) -> usize {
        ((precision as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    /// Parses decimal or scientific notation (or an `a/b` rational) and
    /// rounds to `precision`.
    pub fn parse(text: &str, precision: u32) -> Result<BigFloat, NumericError> {
        let q = super::parse::parse_decimal_or_ratio(text)?;
        Ok(BigFloat::from_rational(&q, precision))
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mantissa.sign(), other.mantissa.sign());
        let rank = |s: Sign| match s {
            Sign::Minus => 0,
            Sign::NoSign => 1,
            Sign::Plus => 2,
        };
        match rank(sa).cmp(&rank(sb)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exponent.min(other.exponent);
                let a = self.mantissa.magnitude() << (self.exponent - e) as u64;
                let b = other.mantissa.magnitude() << (other.exponent - e) as u64;
                a.cmp(&b)
            }
            ord => ord,
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

/// `m * 2^e` without intermediate overflow of `2^e`.
pub(crate) fn ldexp(m: f64, e: i64) -> f64 {
    let mut x = m;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl fmt::Display for BigFloat {
    /// Shortest fixed-digit decimal rendering that round-trips at this
    /// precision: plain notation for moderate exponents, scientific otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let digits = BigFloat::decimal_digits(self.precision) as i64;
        let value = self.to_rational().abs();
        let mut exp10 = (self.ln_abs() / std::f64::consts::LN_10).floor() as i64;
        let ten = BigRational::from_integer(BigInt::from(10));
        let pow10 = |e: i64| -> BigRational {
            if e >= 0 {
                BigRational::from_integer(num_traits::pow(BigInt::from(10), e as usize))
            } else {
                BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), (-e) as usize))
            }
        };
        // Pin exp10 so that 10^exp10 <= value < 10^(exp10+1).
        while pow10(exp10) > value {
            exp10 -= 1;
        }
        while pow10(exp10 + 1) <= value {
            exp10 += 1;
        }
        let scaled = &value * pow10(digits - 1 - exp10);
        let mut int = round_half_even(&scaled);
        if int >= num_traits::pow(BigInt::from(10), digits as usize) {
            int /= 10;
            exp10 += 1;
        }
        let _ = ten;
        let mut s = int.to_string();
        while s.len() > 1 && s.ends_with('0') {
            s.pop();
        }
        let sign = if self.is_negative() { "-" } else { "" };
        if (-5..digits).contains(&exp10) {
            let point = exp10 + 1;
            let body = if point <= 0 {
                format!("0.{}{}", "0".repeat((-point) as usize), s)
            } else if point as usize >= s.len() {
                format!("{}{}", s, "0".repeat(point as usize - s.len()))
            } else {
                format!("{}.{}", &s[..point as usize], &s[point as usize..])
            };
            write!(f, "{sign}{body}")
        } else if s.len() == 1 {
            write!(f, "{sign}{s}e{exp10}")
        } else {
            write!(f, "{sign}{}.{}e{exp10}", &s[..1], &s[1..])
        }
    }
}

fn round_half_even(q: &BigRational) -> BigInt {
    let (fl, rem) = q.numer().div_mod_floor(q.denom());
    let twice: BigInt = &rem * 2u32;
    match twice.cmp(q.denom()) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1,
        Ordering::Equal => {
            if fl.is_odd() {
                fl + 1
            } else {
                fl
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn rational_rounding_matches_hardware_doubles() {
        for (a, b) in [(1, 3), (2, 3), (-7, 10), (1, 10), (123456789, 1000), (1, 1 << 40), (355, 113)] {
            let x = BigFloat::from_rational(&q(a, b), 53);
            assert_eq!(x.to_f64(), a as f64 / b as f64, "{a}/{b}");
        }
    }

    #[test]
    fn ties_round_to_even() {
        // 2^53 + 1 is exactly halfway between two doubles.
        let tie = BigInt::from((1u64 << 53) + 1);
        let r = BigFloat::from_integer(&tie, 53);
        assert_eq!(r.to_f64(), 9007199254740992.0);
        let tie = BigInt::from((1u64 << 53) + 3);
        assert_eq!(BigFloat::from_integer(&tie, 53).to_f64(), 9007199254740996.0);
    }

    #[test]
    fn arithmetic_agrees_with_f64_at_53_bits() {
        let vals = [0.1, -2.5, 3.0e10, 1.0e-300, 7.25, -0.333];
        for &a in &vals {
            for &b in &vals {
                let x = BigFloat::from_f64(a, 53).unwrap();
                let y = BigFloat::from_f64(b, 53).unwrap();
                assert_eq!(x.add(&y).to_f64(), a + b);
                assert_eq!(x.sub(&y).to_f64(), a - b);
                assert_eq!(x.mul(&y).to_f64(), a * b);
                assert_eq!(x.div(&y).unwrap().to_f64(), a / b);
            }
            if a >= 0.0 {
                assert_eq!(BigFloat::from_f64(a, 53).unwrap().sqrt().unwrap().to_f64(), a.sqrt());
            }
        }
    }

    #[test]
    fn far_apart_addition_rounds_correctly() {
        let one = BigFloat::from_f64(1.0, 53).unwrap();
        let tiny = BigFloat::from_f64(1e-200, 53).unwrap();
        assert_eq!(one.add(&tiny), one);
        assert_eq!(one.sub(&tiny).to_f64(), 1.0);
        // Exactly half an ulp above 1 plus a sliver must round up.
        let half_ulp = BigFloat::from_f64(2f64.powi(-53), 53).unwrap();
        let s = one.add(&half_ulp).with_precision(53);
        assert_eq!(s.to_f64(), 1.0);
        let sliver = BigFloat::from_f64(2f64.powi(-53), 200).unwrap().add(&BigFloat::from_f64(1e-40, 200).unwrap());
        let up = one.add(&sliver);
        assert_eq!(up.to_f64(), 1.0 + f64::EPSILON);
    }

    #[test]
    fn display_round_trips() {
        for &x in &[0.25, 1.0 / 3.0, -123.456, 1e-300, 6.02e23, 1.0, 100.0] {
            let f = BigFloat::from_f64(x, 53).unwrap();
            let s = f.to_string();
            assert_eq!(BigFloat::parse(&s, 53).unwrap(), f, "{s}");
        }
        let third = BigFloat::from_rational(&q(1, 3), 256);
        assert_eq!(BigFloat::parse(&third.to_string(), 256).unwrap(), third);
        assert_eq!(BigFloat::from_f64(0.25, 53).unwrap().to_string(), "0.25");
    }

    #[test]
    fn ln_abs_beyond_double_range() {
        let big = BigFloat::from_integer(&(BigInt::one() << 5000u32), 64);
        assert!((big.ln_abs() - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
