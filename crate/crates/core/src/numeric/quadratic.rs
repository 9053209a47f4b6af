//! Elements `x + y·√d` of a real quadratic field with rational `x`, `y`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::bigfloat::BigFloat;
use super::NumericError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    pub x: BigRational,
    pub y: BigRational,
    pub d: u64,
}

/// True when `d >= 2` and no square larger than one divides it.
pub fn is_squarefree_radicand(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl Quadratic {
    pub fn new(x: BigRational, y: BigRational, d: u64) -> Result<Self, NumericError> {
        if !is_squarefree_radicand(d) {
            return Err(NumericError::BadRadicand(d));
        }
        Ok(Quadratic { x, y, d })
    }

    pub fn from_rational(x: BigRational, d: u64) -> Self {
        Quadratic { x, y: BigRational::zero(), d }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    fn check(&self, other: &Self) -> Result<(), NumericError> {
        if self.d != other.d {
            return Err(NumericError::RadicandMismatch(self.d, other.d));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, NumericError> {
        self.check(o)?;
        Ok(Quadratic { x: &self.x + &o.x, y: &self.y + &o.y, d: self.d })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, NumericError> {
        self.check(o)?;
        Ok(Quadratic { x: &self.x - &o.x, y: &self.y - &o.y, d: self.d })
    }

    pub fn mul(&self, o: &Self) -> Result<Self, NumericError> {
        self.check(o)?;
        let d = BigRational::from_integer(BigInt::from(self.d));
        Ok(Quadratic {
            x: &self.x * &o.x + &self.y * &o.y * d,
            y: &self.x * &o.y + &self.y * &o.x,
            d: self.d,
        })
    }

    pub fn conj(&self) -> Self {
        Quadratic { x: self.x.clone(), y: -&self.y, d: self.d }
    }

    /// `x² − d·y²`, the product with the conjugate.
    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(self.d));
        &self.x * &self.x - &self.y * &self.y * d
    }

    pub fn div(&self, o: &Self) -> Result<Self, NumericError> {
        self.check(o)?;
        let n = o.norm();
        if n.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        let p = self.mul(&o.conj())?;
        Ok(Quadratic { x: p.x / &n, y: p.y / n, d: self.d })
    }

    pub fn neg(&self) -> Self {
        Quadratic { x: -&self.x, y: -&self.y, d: self.d }
    }

    /// Exact sign of the real number `x + y·√d`.
    pub fn signum(&self) -> i32 {
        let sx = sign_of(&self.x);
        let sy = sign_of(&self.y);
        if sx == 0 {
            return sy;
        }
        if sy == 0 || sx == sy {
            return sx;
        }
        // Opposite signs: compare x² with d·y².
        let d = BigRational::from_integer(BigInt::from(self.d));
        match (&self.x * &self.x).cmp(&(&self.y * &self.y * d)) {
            Ordering::Greater => sx,
            Ordering::Less => sy,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn cmp_value(&self, o: &Self) -> Result<Ordering, NumericError> {
        Ok(self.sub(o)?.signum().cmp(&0))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Quadratic::from_rational(BigRational::one(), self.d);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same radicand");
            }
            base = base.mul(&base).expect("same radicand");
            e >>= 1;
        }
        acc
    }

    /// Correctly rounded binary float of `x + y·√d`.
    ///
    /// `y·√d` is bracketed by integer square roots at growing scale until
    /// both ends of the bracket round to the same float.
    pub fn to_bigfloat(&self, precision: u32) -> BigFloat {
        if self.y.is_zero() {
            return BigFloat::from_rational(&self.x, precision);
        }
        let mut w = precision as u64 + 64;
        loop {
            let scale = BigInt::one() << w;
            let s = (BigInt::from(self.d) * &scale * &scale).sqrt();
            let den = BigRational::from_integer(scale);
            let lo_root = BigRational::from_integer(s.clone()) / &den;
            let hi_root = BigRational::from_integer(s + 1) / &den;
            let a = &self.x + &self.y * lo_root;
            let b = &self.x + &self.y * hi_root;
            let fa = BigFloat::from_rational(&a, precision);
            let fb = BigFloat::from_rational(&b, precision);
            if fa == fb {
                return fa;
            }
            w *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_bigfloat(53).to_f64()
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        if self.x.is_zero() {
            return write!(f, "{}*sqrt({})", self.y, self.d);
        }
        if self.y.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.x, -&self.y, self.d)
        } else {
            write!(f, "{}+{}*sqrt({})", self.x, self.y, self.d)
        }
    }
}
