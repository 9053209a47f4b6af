//! Scalars of four kinds behind one arithmetic contract.
//!
//! A [`Scalar`] is an exact rational, an element of a quadratic field
//! `ℚ(√d)`, a binary float of fixed precision, or a complex float. Values
//! are immutable and cheap to clone. Arithmetic between two different kinds
//! is an error; convert explicitly with [`Scalar::convert`] or
//! [`Scalar::to_float`].

pub mod bigfloat;
pub mod parse;
pub mod quadratic;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use bigfloat::BigFloat;
pub use parse::{parse_decimal_or_ratio, parse_kind, parse_scalar};
pub use quadratic::Quadratic;

/// Default mantissa width for float kinds.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("malformed number: {0:?}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("non-finite value")]
    NonFinite,
    #[error("radicand must be a square-free integer >= 2, got {0}")]
    BadRadicand(u64),
    #[error("radicand mismatch: expected sqrt({0}), found sqrt({1})")]
    RadicandMismatch(u64, u64),
    #[error("unknown scalar kind {0:?}")]
    BadKind(String),
    #[error("operands of different kinds: {0} and {1}")]
    KindMismatch(ScalarKind, ScalarKind),
    #[error("operation not defined for kind {0}")]
    Unsupported(ScalarKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Rational,
    Quadratic(u64),
    Float(u32),
    ComplexFloat(u32),
}

impl ScalarKind {
    pub fn is_exact(self) -> bool {
        matches!(self, ScalarKind::Rational | ScalarKind::Quadratic(_))
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Rational => write!(f, "rational"),
            ScalarKind::Quadratic(d) => write!(f, "quadratic({d})"),
            ScalarKind::Float(p) => write!(f, "float({p})"),
            ScalarKind::ComplexFloat(p) => write!(f, "complex({p})"),
        }
    }
}

impl std::str::FromStr for ScalarKind {
    type Err = NumericError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_kind(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexFloat {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl ComplexFloat {
    fn precision(&self) -> u32 {
        self.re.precision()
    }

    fn norm_sqr(&self) -> BigFloat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
}

impl fmt::Display for ComplexFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, self.im.neg())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Rational(BigRational),
    Quadratic(Quadratic),
    Float(BigFloat),
    Complex(ComplexFloat),
}

#[derive(Clone, Debug)]
pub struct Scalar(Arc<Repr>);

impl Scalar {
    fn wrap(r: Repr) -> Self {
        Scalar(Arc::new(r))
    }

    pub fn rational(q: BigRational) -> Self {
        Scalar::wrap(Repr::Rational(q))
    }

    pub fn from_quadratic(q: Quadratic) -> Self {
        Scalar::wrap(Repr::Quadratic(q))
    }

    pub fn quadratic(x: BigRational, y: BigRational, d: u64) -> Result<Self, NumericError> {
        Ok(Scalar::from_quadratic(Quadratic::new(x, y, d)?))
    }

    pub fn float(f: BigFloat) -> Self {
        Scalar::wrap(Repr::Float(f))
    }

    pub fn complex(z: ComplexFloat) -> Self {
        Scalar::wrap(Repr::Complex(z))
    }

    pub fn ratio(a: i64, b: i64) -> Self {
        Scalar::rational(BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    pub fn integer(a: i64) -> Self {
        Scalar::rational(BigRational::from_integer(BigInt::from(a)))
    }

    /// Float scalar holding the exact value of a finite double.
    pub fn from_f64(x: f64, precision: u32) -> Result<Self, NumericError> {
        Ok(Scalar::float(BigFloat::from_f64(x, precision)?))
    }

    pub fn from_complex64(z: Complex64, precision: u32) -> Result<Self, NumericError> {
        Ok(Scalar::complex(ComplexFloat {
            re: BigFloat::from_f64(z.re, precision)?,
            im: BigFloat::from_f64(z.im, precision)?,
        }))
    }

    /// Exact embedding of a rational number in `kind` (rounded for floats).
    pub fn from_rational_in(q: &BigRational, kind: ScalarKind) -> Self {
        match kind {
            ScalarKind::Rational => Scalar::rational(q.clone()),
            ScalarKind::Quadratic(d) => Scalar::from_quadratic(Quadratic::from_rational(q.clone(), d)),
            ScalarKind::Float(p) => Scalar::float(BigFloat::from_rational(q, p)),
            ScalarKind::ComplexFloat(p) => Scalar::complex(ComplexFloat {
                re: BigFloat::from_rational(q, p),
                im: BigFloat::zero(p),
            }),
        }
    }

    pub fn from_i64(v: i64, kind: ScalarKind) -> Self {
        Scalar::from_rational_in(&BigRational::from_integer(BigInt::from(v)), kind)
    }

    pub fn zero(kind: ScalarKind) -> Self {
        Scalar::from_i64(0, kind)
    }

    pub fn one(kind: ScalarKind) -> Self {
        Scalar::from_i64(1, kind)
    }

    pub fn kind(&self) -> ScalarKind {
        match &*self.0 {
            Repr::Rational(_) => ScalarKind::Rational,
            Repr::Quadratic(q) => ScalarKind::Quadratic(q.d),
            Repr::Float(f) => ScalarKind::Float(f.precision()),
            Repr::Complex(z) => ScalarKind::ComplexFloat(z.precision()),
        }
    }

    /// The rational value, if this scalar is rational (including a quadratic
    /// element with vanishing `√d` part).
    pub fn as_rational(&self) -> Option<BigRational> {
        match &*self.0 {
            Repr::Rational(q) => Some(q.clone()),
            Repr::Quadratic(q) if q.is_rational() => Some(q.x.clone()),
            _ => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<&Quadratic> {
        match &*self.0 {
            Repr::Quadratic(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_bigfloat(&self) -> Option<&BigFloat> {
        match &*self.0 {
            Repr::Float(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<&ComplexFloat> {
        match &*self.0 {
            Repr::Complex(z) => Some(z),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &*self.0 {
            Repr::Rational(q) => q.is_zero(),
            Repr::Quadratic(q) => q.is_zero(),
            Repr::Float(f) => f.is_zero(),
            Repr::Complex(z) => z.re.is_zero() && z.im.is_zero(),
        }
    }

    fn mismatch(&self, other: &Scalar) -> NumericError {
        NumericError::KindMismatch(self.kind(), other.kind())
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        Ok(Scalar::wrap(match (&*self.0, &*other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a + b),
            (Repr::Quadratic(a), Repr::Quadratic(b)) => Repr::Quadratic(a.add(b)?),
            (Repr::Float(a), Repr::Float(b)) if a.precision() == b.precision() => Repr::Float(a.add(b)),
            (Repr::Complex(a), Repr::Complex(b)) if a.precision() == b.precision() => {
                Repr::Complex(ComplexFloat { re: a.re.add(&b.re), im: a.im.add(&b.im) })
            }
            _ => return Err(self.mismatch(other)),
        }))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        Ok(Scalar::wrap(match (&*self.0, &*other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a * b),
            (Repr::Quadratic(a), Repr::Quadratic(b)) => Repr::Quadratic(a.mul(b)?),
            (Repr::Float(a), Repr::Float(b)) if a.precision() == b.precision() => Repr::Float(a.mul(b)),
            (Repr::Complex(a), Repr::Complex(b)) if a.precision() == b.precision() => Repr::Complex(ComplexFloat {
                re: a.re.mul(&b.re).sub(&a.im.mul(&b.im)),
                im: a.re.mul(&b.im).add(&a.im.mul(&b.re)),
            }),
            _ => return Err(self.mismatch(other)),
        }))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        Ok(Scalar::wrap(match (&*self.0, &*other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => {
                if b.is_zero() {
                    return Err(NumericError::DivisionByZero);
                }
                Repr::Rational(a / b)
            }
            (Repr::Quadratic(a), Repr::Quadratic(b)) => Repr::Quadratic(a.div(b)?),
            (Repr::Float(a), Repr::Float(b)) if a.precision() == b.precision() => Repr::Float(a.div(b)?),
            (Repr::Complex(a), Repr::Complex(b)) if a.precision() == b.precision() => {
                let n = b.norm_sqr();
                let re = a.re.mul(&b.re).add(&a.im.mul(&b.im));
                let im = a.im.mul(&b.re).sub(&a.re.mul(&b.im));
                Repr::Complex(ComplexFloat { re: re.div(&n)?, im: im.div(&n)? })
            }
            _ => return Err(self.mismatch(other)),
        }))
    }

    pub fn neg(&self) -> Scalar {
        Scalar::wrap(match &*self.0 {
            Repr::Rational(a) => Repr::Rational(-a),
            Repr::Quadratic(a) => Repr::Quadratic(a.neg()),
            Repr::Float(a) => Repr::Float(a.neg()),
            Repr::Complex(z) => Repr::Complex(ComplexFloat { re: z.re.neg(), im: z.im.neg() }),
        })
    }

    /// Absolute value; for complex scalars, the modulus as a float scalar.
    pub fn abs(&self) -> Scalar {
        match &*self.0 {
            Repr::Rational(a) => Scalar::rational(a.abs()),
            Repr::Quadratic(a) => Scalar::from_quadratic(a.abs()),
            Repr::Float(a) => Scalar::float(a.abs()),
            Repr::Complex(z) => Scalar::float(z.norm_sqr().sqrt().expect("nonnegative")),
        }
    }

    /// Sign of a real scalar (`-1`, `0`, `1`).
    pub fn signum(&self) -> Result<i32, NumericError> {
        Ok(match &*self.0 {
            Repr::Rational(a) => {
                if a.is_zero() {
                    0
                } else if a.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Repr::Quadratic(a) => a.signum(),
            Repr::Float(a) => {
                if a.is_zero() {
                    0
                } else if a.is_negative() {
                    -1
                } else {
                    1
                }
            }
            Repr::Complex(_) => return Err(NumericError::Unsupported(self.kind())),
        })
    }

    /// Exact order of two real scalars of the same kind.
    pub fn checked_cmp(&self, other: &Scalar) -> Result<Ordering, NumericError> {
        match (&*self.0, &*other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Ok(a.cmp(b)),
            (Repr::Quadratic(a), Repr::Quadratic(b)) => a.cmp_value(b),
            (Repr::Float(a), Repr::Float(b)) => Ok(a.cmp(b)),
            (Repr::Complex(_), Repr::Complex(_)) => Err(NumericError::Unsupported(self.kind())),
            _ => Err(self.mismatch(other)),
        }
    }

    /// Exact order of `|self|` and `|other|`; complex moduli are compared
    /// through their squares.
    pub fn cmp_abs(&self, other: &Scalar) -> Result<Ordering, NumericError> {
        match (&*self.0, &*other.0) {
            (Repr::Complex(a), Repr::Complex(b)) => Ok(a.norm_sqr().cmp(&b.norm_sqr())),
            _ => self.abs().checked_cmp(&other.abs()),
        }
    }

    /// Largest absolute value in a sequence (by exact comparison).
    pub fn max_abs<'a, I: IntoIterator<Item = &'a Scalar>>(items: I) -> Result<Option<Scalar>, NumericError> {
        let mut best: Option<&Scalar> = None;
        for s in items {
            best = match best {
                None => Some(s),
                Some(b) => {
                    if s.cmp_abs(b)? == Ordering::Greater {
                        Some(s)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        Ok(best.map(Scalar::abs))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match &*self.0 {
            Repr::Quadratic(q) => Scalar::from_quadratic(q.pow(e)),
            _ => {
                let mut acc = Scalar::one(self.kind());
                let mut base = self.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = &acc * &base;
                    }
                    base = &base * &base;
                    e >>= 1;
                }
                acc
            }
        }
    }

    /// Nearest float of an exact scalar, or a float rounded to a new
    /// precision. Rounding is to nearest, ties to even.
    pub fn to_float(&self, precision: u32) -> Result<Scalar, NumericError> {
        Ok(Scalar::float(match &*self.0 {
            Repr::Rational(q) => BigFloat::from_rational(q, precision),
            Repr::Quadratic(q) => q.to_bigfloat(precision),
            Repr::Float(f) => f.with_precision(precision),
            Repr::Complex(_) => return Err(NumericError::Unsupported(self.kind())),
        }))
    }

    /// Explicit conversion between kinds where it is well defined: exact
    /// embeddings, rounding to floats, and floats into complex floats.
    pub fn convert(&self, kind: ScalarKind) -> Result<Scalar, NumericError> {
        if self.kind() == kind {
            return Ok(self.clone());
        }
        match (&*self.0, kind) {
            (Repr::Rational(q), _) => Ok(Scalar::from_rational_in(q, kind)),
            (Repr::Quadratic(q), ScalarKind::Rational) if q.is_rational() => Ok(Scalar::rational(q.x.clone())),
            (Repr::Quadratic(_) | Repr::Float(_), ScalarKind::Float(p)) => self.to_float(p),
            (Repr::Quadratic(_) | Repr::Float(_), ScalarKind::ComplexFloat(p)) => {
                let re = self.to_float(p)?.as_bigfloat().cloned().expect("float");
                Ok(Scalar::complex(ComplexFloat { re, im: BigFloat::zero(p) }))
            }
            (Repr::Complex(z), ScalarKind::ComplexFloat(p)) => Ok(Scalar::complex(ComplexFloat {
                re: z.re.with_precision(p),
                im: z.im.with_precision(p),
            })),
            _ => Err(NumericError::KindMismatch(self.kind(), kind)),
        }
    }

    /// Nearest double of a real scalar; the modulus for complex scalars.
    pub fn to_f64(&self) -> f64 {
        match &*self.0 {
            Repr::Rational(q) => BigFloat::from_rational(q, 53).to_f64(),
            Repr::Quadratic(q) => q.to_f64(),
            Repr::Float(f) => f.to_f64(),
            Repr::Complex(z) => z.re.to_f64().hypot(z.im.to_f64()),
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        match &*self.0 {
            Repr::Complex(z) => Complex64::new(z.re.to_f64(), z.im.to_f64()),
            _ => Complex64::new(self.to_f64(), 0.0),
        }
    }

    /// `ln |self|` in double precision, finite for values far outside the
    /// double range.
    pub fn ln_abs(&self) -> f64 {
        match &*self.0 {
            Repr::Float(f) => f.ln_abs(),
            Repr::Complex(z) => 0.5 * z.norm_sqr().ln_abs(),
            Repr::Rational(q) => BigFloat::from_rational(q, 64).ln_abs(),
            Repr::Quadratic(q) => q.to_bigfloat(64).ln_abs(),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.0, &*other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => a == b,
            (Repr::Quadratic(a), Repr::Quadratic(b)) => a == b,
            (Repr::Quadratic(a), Repr::Rational(b)) | (Repr::Rational(b), Repr::Quadratic(a)) => {
                a.is_rational() && &a.x == b
            }
            (Repr::Float(a), Repr::Float(b)) => a == b,
            (Repr::Complex(a), Repr::Complex(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    /// Canonical text form; parses back to the identical value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Rational(q) => write!(f, "{q}"),
            Repr::Quadratic(q) => write!(f, "{q}"),
            Repr::Float(x) => write!(f, "{x}"),
            Repr::Complex(z) => write!(f, "{z}"),
        }
    }
}

macro_rules! panicking_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);
panicking_op!(Div, div, checked_div);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

/// Acceptance tolerance for float kinds. Exact kinds always compare with
/// zero tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceProfile {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile { abs_tol: 1e-9, rel_tol: 1e-12 }
    }
}

impl ToleranceProfile {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, NumericError> {
        if !(abs_tol.is_finite() && rel_tol.is_finite()) || abs_tol < 0.0 || rel_tol < 0.0 {
            return Err(NumericError::NonFinite);
        }
        Ok(ToleranceProfile { abs_tol, rel_tol })
    }

    pub fn exact() -> Self {
        ToleranceProfile { abs_tol: 0.0, rel_tol: 0.0 }
    }

    /// Whether `residual` counts as zero relative to a magnitude `scale`.
    pub fn accepts(&self, residual: &Scalar, scale: f64) -> bool {
        if residual.kind().is_exact() {
            return residual.is_zero();
        }
        residual.to_f64() <= self.abs_tol + self.rel_tol * scale.abs()
    }
}

/// Rational with small numerator and denominator, for tests and examples.
pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `2^e` as an exact rational (negative exponents allowed).
pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..20).prop_map(|(a, b)| q(a, b))
    }

    fn quad(d: u64) -> impl Strategy<Value = Scalar> {
        (rat(), rat()).prop_map(move |(x, y)| Scalar::quadratic(x, y, d).unwrap())
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_scalar("3/7", ScalarKind::Rational).unwrap(), Scalar::ratio(3, 7));
        let u = parse_scalar("2+1*sqrt(3)", ScalarKind::Quadratic(3)).unwrap();
        assert_eq!(u, Scalar::quadratic(q(2, 1), q(1, 1), 3).unwrap());
        assert!(matches!(parse_scalar("1/0", ScalarKind::Rational), Err(NumericError::ZeroDenominator)));
    }

    #[test]
    fn to_float_examples() {
        assert_eq!(Scalar::ratio(1, 4).to_float(53).unwrap().to_f64(), 0.25);
        let u = Scalar::quadratic(q(2, 1), q(1, 1), 3).unwrap();
        assert_eq!(u.to_float(53).unwrap().to_f64(), 3.7320508075688772);
        assert_eq!(Scalar::ratio(1, 3).to_float(53).unwrap().to_f64(), 1.0 / 3.0);
    }

    #[test]
    fn cross_kind_is_rejected() {
        let a = Scalar::integer(1);
        let b = Scalar::one(ScalarKind::Quadratic(3));
        assert!(matches!(a.checked_add(&b), Err(NumericError::KindMismatch(..))));
        assert_eq!(a, b);
        let c = Scalar::one(ScalarKind::Float(53));
        assert!(a.checked_mul(&c).is_err());
        assert!(Scalar::one(ScalarKind::Float(64)).checked_add(&c).is_err());
    }

    #[test]
    fn complex_arithmetic() {
        let k = ScalarKind::ComplexFloat(64);
        let i = parse_scalar("i", k).unwrap();
        let m1 = &i * &i;
        assert_eq!(m1, Scalar::from_i64(-1, k));
        let z = parse_scalar("3+4*i", k).unwrap();
        assert_eq!(z.abs().to_f64(), 5.0);
        let w = &z / &z;
        assert_eq!(w, Scalar::one(k));
        assert_eq!(z.to_string(), "3+4*i");
    }

    #[test]
    fn text_round_trip_all_kinds() {
        let samples = [
            (Scalar::ratio(-22, 7), ScalarKind::Rational),
            (Scalar::quadratic(q(-1, 2), q(-3, 5), 2).unwrap(), ScalarKind::Quadratic(2)),
            (Scalar::ratio(1, 3).to_float(256).unwrap(), ScalarKind::Float(256)),
            (parse_scalar("-0.5-1e-30*i", ScalarKind::ComplexFloat(96)).unwrap(), ScalarKind::ComplexFloat(96)),
        ];
        for (s, k) in samples {
            assert_eq!(parse_scalar(&s.to_string(), k).unwrap(), s, "{s}");
        }
    }

    #[test]
    fn tolerance_profile() {
        let t = ToleranceProfile::new(1e-9, 0.0).unwrap();
        assert!(t.accepts(&Scalar::from_f64(1e-10, 53).unwrap(), 1.0));
        assert!(!t.accepts(&Scalar::from_f64(1e-8, 53).unwrap(), 1.0));
        assert!(!t.accepts(&Scalar::ratio(1, 1_000_000_000_000), 1.0));
        assert!(ToleranceProfile::new(f64::NAN, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in rat(), b in rat(), c in rat()) {
            let (a, b, c) = (Scalar::rational(a), Scalar::rational(b), Scalar::rational(c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn quadratic_field_axioms(a in quad(3), b in quad(3), c in quad(3)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn conjugate_product_is_norm(x in rat(), y in rat(), d in prop::sample::select(vec![2u64, 3, 5, 6, 7])) {
            let a = Scalar::quadratic(x.clone(), y.clone(), d).unwrap();
            let b = Scalar::quadratic(x.clone(), -y.clone(), d).unwrap();
            let n = &x * &x - q(d as i64, 1) * &y * &y;
            prop_assert_eq!(&a * &b, Scalar::rational(n));
        }

        #[test]
        fn to_float_is_monotone(a in rat(), b in rat()) {
            let fa = Scalar::rational(a.clone()).to_float(20).unwrap();
            let fb = Scalar::rational(b.clone()).to_float(20).unwrap();
            if a <= b {
                prop_assert!(fa.checked_cmp(&fb).unwrap() != Ordering::Greater);
            }
        }

        #[test]
        fn quadratic_sign_matches_float(a in quad(2)) {
            let f = a.to_f64();
            let s = a.signum().unwrap();
            prop_assert_eq!(s, if f > 0.0 { 1 } else if f < 0.0 { -1 } else { 0 });
        }
    }
}
