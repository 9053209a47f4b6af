//! Polynomial maxima and Remez-type bounds, in exact rational arithmetic.
//!
//! For a polynomial `p` of degree `d` on a closed interval `I`:
//!
//! ```text
//! max_I |p| ≤ (4|I|/|E|)^d · sup_E |p|      E ⊂ I of positive length
//! max_I |p| ≤ (4|I|/l)^d · M                |p| ≤ M at d + l points, spacing ≥ 1
//! ```
//!
//! [`poly_max`] is the oracle both bounds are checked against.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::numeric::{parse_scalar, Scalar, ScalarKind};

/// Largest degree accepted by [`poly_max`].
pub const MAX_DEGREE: usize = 64;

/// Bisection stops once an isolating interval is `|I| / 2^40` wide.
const REFINE_BITS: u32 = 40;

/// A polynomial with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// From rational scalars (quadratic scalars with zero irrational part are accepted).
    pub fn from_scalars(coeffs: &[Scalar]) -> Result<Self> {
        let cs = coeffs
            .iter()
            .map(|c| {
                c.as_rational()
                    .ok_or_else(|| Error::Precondition(format!("polynomial coefficients must be rational, got {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::new(cs))
    }

    /// Parses comma-separated coefficients, constant term first.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Polynomial::zero());
        }
        let cs = text
            .split(',')
            .map(|t| parse_scalar(t.trim(), ScalarKind::Rational).map(|s| s.as_rational().expect("rational")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(cs))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn to_scalars(&self) -> Vec<Scalar> {
        self.coeffs.iter().cloned().map(Scalar::rational).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + Scalar::rational(c.clone()).to_f64())
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * rat(j as i64)).collect())
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRational::zero();
        Polynomial::new(
            (0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Remainder of division by a nonzero polynomial.
    fn rem(&self, d: &Polynomial) -> Polynomial {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let q = &r[top] / &lead;
            if !q.is_zero() {
                for (j, c) in d.coeffs.iter().enumerate() {
                    r[top - dd + j] -= &q * c;
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Polynomial::new(r)
    }

    fn exact_div(&self, d: &Polynomial) -> Polynomial {
        let dd = d.degree().expect("nonzero divisor");
        let Some(n) = self.degree() else { return Polynomial::zero() };
        if n < dd {
            return Polynomial::zero();
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = &r[i + dd] / &d.coeffs[dd];
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dc;
            }
            q[i] = c;
        }
        Polynomial::new(q)
    }

    fn monic(&self) -> Polynomial {
        match self.coeffs.last() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => Polynomial::zero(),
        }
    }

    fn gcd(&self, o: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }

    /// `Σ j·|c_j|·r^{j−1}`, a bound for `|p′|` on `[−r, r]`.
    fn derivative_bound(&self, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        let mut pow = BigRational::one();
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += c.abs() * rat(j as i64) * &pow;
            pow *= r;
        }
        acc
    }

    /// The interpolating polynomial of `values` at `s0, s0+1, s0+2, …`,
    /// built from Newton forward differences. Also returns the leading
    /// differences `Δ^j v(s0)`.
    pub fn interpolate_unit_spaced(s0: &BigRational, values: &[BigRational]) -> (Polynomial, Vec<BigRational>) {
        let diffs = forward_differences(values);
        let mut p = Polynomial::zero();
        // basis_j(s) = (s − s0)(s − s0 − 1)…(s − s0 − j + 1) / j!
        let mut basis = Polynomial::new(vec![BigRational::one()]);
        for (j, d) in diffs.iter().enumerate() {
            p = p.add(&basis.scale(d));
            let shift = -(s0 + rat(j as i64));
            basis = basis.mul(&Polynomial::new(vec![shift, BigRational::one()])).scale(&rat(j as i64 + 1).recip());
        }
        (p, diffs)
    }
}

/// `Δ^j v(0)` for `j = 0..len`.
pub fn forward_differences(values: &[BigRational]) -> Vec<BigRational> {
    let mut row = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while !row.is_empty() {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return precondition(format!("empty interval [{lo}, {hi}]"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn from_i64(lo: i64, hi: i64) -> Result<Self> {
        Interval::new(rat(lo), rat(hi))
    }

    pub fn len(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Result of [`poly_max`]: the largest value of `|p|` found at a point of
/// `I`, where it is found, and a certified upper bound for `max_I |p|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMax {
    #[serde(with = "rat_string")]
    pub value: BigRational,
    #[serde(with = "rat_string")]
    pub at: BigRational,
    #[serde(with = "rat_string")]
    pub upper: BigRational,
}

pub(crate) mod rat_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn sign(x: &BigRational) -> i32 {
    match x.cmp(&BigRational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn sturm_chain(q: &Polynomial) -> Vec<Polynomial> {
    let mut chain = vec![q.clone(), q.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.scale(&rat(-1)));
    }
    chain
}

fn sign_changes(chain: &[Polynomial], x: &BigRational) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in chain {
        let s = sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Distinct real roots of `p` in `(lo, hi]`, each as an isolating
/// interval `(a, b]` of width at most `tol` (or `a == b` for exact roots).
fn isolate_roots(p: &Polynomial, lo: &BigRational, hi: &BigRational, tol: &BigRational) -> Vec<(BigRational, BigRational)> {
    if p.degree().is_none_or(|d| d == 0) || lo >= hi {
        return Vec::new();
    }
    let q = p.exact_div(&p.gcd(&p.derivative()));
    let chain = sturm_chain(&q);
    let two = rat(2);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), sign_changes(&chain, lo), sign_changes(&chain, hi))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        if count > 1 {
            let m = (&a + &b) / &two;
            let vm = sign_changes(&chain, &m);
            stack.push((m.clone(), b, vm, vb));
            stack.push((a, m, va, vm));
            continue;
        }
        // One simple root of q in (a, b]: refine by sign.
        let (mut a, mut b) = (a, b);
        let mut sb = sign(&q.eval(&b));
        if sb == 0 {
            out.push((b.clone(), b));
            continue;
        }
        let mut exact = None;
        while &b - &a > *tol {
            let m = (&a + &b) / &two;
            let sm = sign(&q.eval(&m));
            if sm == 0 {
                exact = Some(m);
                break;
            }
            if sm == sb {
                b = m;
                sb = sm;
            } else {
                a = m;
            }
        }
        match exact {
            Some(r) => out.push((r.clone(), r)),
            None => out.push((a, b)),
        }
    }
    out.sort();
    out
}

/// Maximum of `|p|` on `[lo, hi]`.
///
/// Critical points are isolated with a Sturm chain of the square-free part
/// of `p′` and refined by bisection to `|I|·2⁻⁴⁰`. The attained value is the
/// best endpoint of an isolating interval; the upper bound adds the
/// derivative bound times half the interval width. Both are exact rationals.
pub fn poly_max(p: &Polynomial, iv: &Interval) -> Result<PolyMax> {
    if p.degree().is_some_and(|d| d > MAX_DEGREE) {
        return precondition(format!("poly_max supports degree <= {MAX_DEGREE}"));
    }
    let mut best = (p.eval(&iv.lo).abs(), iv.lo.clone());
    let mut upper = best.0.clone();
    let consider = |x: &BigRational, best: &mut (BigRational, BigRational), upper: &mut BigRational| {
        let v = p.eval(x).abs();
        if v > best.0 {
            *best = (v.clone(), x.clone());
        }
        if v > *upper {
            *upper = v;
        }
    };
    consider(&iv.hi, &mut best, &mut upper);
    let width = iv.len();
    if width.is_zero() {
        return Ok(PolyMax { value: best.0, at: best.1, upper });
    }
    let tol = &width / BigRational::from_integer(BigInt::one() << REFINE_BITS);
    let dp = p.derivative();
    for (a, b) in isolate_roots(&dp, &iv.lo, &iv.hi, &tol) {
        consider(&a, &mut best, &mut upper);
        if a != b {
            consider(&b, &mut best, &mut upper);
            let r = a.abs().max(b.abs());
            let bound = p.eval(&a).abs().max(p.eval(&b).abs()) + (&b - &a) / rat(2) * dp.derivative_bound(&r);
            if bound > upper {
                upper = bound;
            }
        }
    }
    Ok(PolyMax { value: best.0, at: best.1, upper })
}

/// Total length of a finite union of closed intervals.
pub fn union_length(parts: &[Interval]) -> BigRational {
    let mut sorted: Vec<&Interval> = parts.iter().collect();
    sorted.sort_by(|x, y| x.lo.cmp(&y.lo));
    let mut total = BigRational::zero();
    let mut cur: Option<(BigRational, BigRational)> = None;
    for iv in sorted {
        cur = match cur {
            Some((lo, hi)) if iv.lo <= hi => Some((lo, hi.max(iv.hi.clone()))),
            Some((lo, hi)) => {
                total += hi - lo;
                Some((iv.lo.clone(), iv.hi.clone()))
            }
            None => Some((iv.lo.clone(), iv.hi.clone())),
        };
    }
    if let Some((lo, hi)) = cur {
        total += hi - lo;
    }
    total
}

fn rational_pow(base: &BigRational, e: usize) -> BigRational {
    num_traits::pow(base.clone(), e)
}

/// `(4|I|/|E|)^d · sup_E |p|` with `E` a finite union of closed subintervals.
///
/// `sup_on_e` is the caller's bound for `|p|` on `E`; when absent it is
/// computed with [`poly_max`] on each piece (certified upper bounds).
pub fn remez_bound(p: &Polynomial, iv: &Interval, e: &[Interval], sup_on_e: Option<&BigRational>) -> Result<BigRational> {
    if let Some(bad) = e.iter().find(|x| !iv.contains_interval(x)) {
        return precondition(format!("subset piece {bad} is not inside {iv}"));
    }
    let measure = union_length(e);
    if measure.is_zero() {
        return precondition("the subset E has zero length");
    }
    let sup = match sup_on_e {
        Some(s) if s.is_negative() => return precondition("sup on E must be nonnegative"),
        Some(s) => s.clone(),
        None => {
            let mut m = BigRational::zero();
            for piece in e {
                m = m.max(poly_max(p, piece)?.upper);
            }
            m
        }
    };
    let d = p.degree().unwrap_or(0);
    Ok(rational_pow(&(rat(4) * iv.len() / measure), d) * sup)
}

/// `(4|I|/l)^d · M` where `|p| ≤ M` at `d + l` points of `I` with spacing at least 1.
///
/// The points are checked: distinct, inside `I`, pairwise at distance at
/// least 1, and `|p| ≤ M` at each of them.
pub fn remez_bound_discrete(p: &Polynomial, iv: &Interval, pts: &[BigRational], m: &BigRational) -> Result<BigRational> {
    if m.is_negative() {
        return precondition("M must be nonnegative");
    }
    let mut sorted = pts.to_vec();
    sorted.sort();
    if let Some(x) = sorted.iter().find(|x| !iv.contains(x)) {
        return precondition(format!("point {x} is outside {iv}"));
    }
    if let Some(w) = sorted.windows(2).find(|w| &w[1] - &w[0] < BigRational::one()) {
        return precondition(format!("points {} and {} are closer than 1", w[0], w[1]));
    }
    if let Some(x) = sorted.iter().find(|x| p.eval(x).abs() > *m) {
        return precondition(format!("|p({x})| exceeds M"));
    }
    let d = p.degree().unwrap_or(0);
    if sorted.len() < d + 1 {
        return precondition(format!("need at least {} points for degree {d}, got {}", d + 1, sorted.len()));
    }
    let l = (sorted.len() - d) as i64;
    Ok(rational_pow(&(rat(4) * iv.len() / rat(l)), d) * m)
}

/// The factor `(4|I|/(count − d))^d` of the discrete bound, in floating
/// point, for callers whose polynomial is only known numerically.
pub fn discrete_remez_factor(interval_len: f64, count: usize, degree: usize) -> Result<f64> {
    if count < degree + 1 {
        return precondition(format!("need at least {} points for degree {degree}, got {count}", degree + 1));
    }
    let l = (count - degree) as f64;
    Ok((4.0 * interval_len / l).powi(degree as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;
    use proptest::prelude::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::from_i64(a, b).unwrap()
    }

    #[test]
    fn poly_max_examples() {
        let x = Polynomial::from_i64(&[0, 1]);
        let r = poly_max(&x, &iv(0, 1)).unwrap();
        assert_eq!((r.value.clone(), r.at.clone(), r.upper.clone()), (rat(1), rat(1), rat(1)));

        let t2 = Polynomial::from_i64(&[-1, 0, 2]);
        let r = poly_max(&t2, &iv(-1, 1)).unwrap();
        assert_eq!(r.value, rat(1));
        assert_eq!(r.upper, rat(1));

        let five = Polynomial::from_i64(&[5]);
        assert_eq!(poly_max(&five, &iv(-3, 7)).unwrap().value, rat(5));
    }

    #[test]
    fn irrational_critical_points() {
        // p = x³ − 2x has critical points ±√(2/3), |p| = (4/3)√(2/3) ≈ 1.0887.
        let p = Polynomial::from_i64(&[0, -2, 0, 1]);
        let r = poly_max(&p, &iv(-1, 1)).unwrap();
        let truth = 4.0 / 3.0 * (2.0f64 / 3.0).sqrt();
        let v = Scalar::rational(r.value.clone()).to_f64();
        let u = Scalar::rational(r.upper.clone()).to_f64();
        assert!(v <= truth + 1e-15 && truth - v < 1e-9);
        assert!(u >= truth && u - truth < 1e-9);
    }

    #[test]
    fn remez_examples() {
        let x = Polynomial::from_i64(&[0, 1]);
        let b = remez_bound(&x, &iv(0, 1), &[Interval::new(rat(0), q(1, 2)).unwrap()], Some(&q(1, 2))).unwrap();
        assert_eq!(b, rat(4));

        let c = Polynomial::from_i64(&[3]);
        assert_eq!(remez_bound(&c, &iv(0, 5), &[iv(1, 2)], None).unwrap(), rat(3));

        let t2 = Polynomial::from_i64(&[-1, 0, 2]);
        assert_eq!(remez_bound(&t2, &iv(-1, 1), &[iv(-1, 0)], Some(&rat(1))).unwrap(), rat(64));
        assert!(remez_bound(&t2, &iv(-1, 1), &[iv(0, 0)], None).is_err());
        assert!(remez_bound(&t2, &iv(-1, 1), &[iv(0, 2)], None).is_err());
    }

    #[test]
    fn discrete_examples() {
        let x2 = Polynomial::from_i64(&[0, 0, 1]);
        let pts: Vec<BigRational> = (0..=5).map(rat).collect();
        assert_eq!(remez_bound_discrete(&x2, &iv(0, 10), &pts, &rat(25)).unwrap(), rat(2500));
        assert_eq!(poly_max(&x2, &iv(0, 10)).unwrap().value, rat(100));

        let lin = Polynomial::from_i64(&[1, 2]);
        let b = remez_bound_discrete(&lin, &iv(0, 3), &[rat(0), rat(3)], &rat(7)).unwrap();
        assert_eq!(b, rat(84));

        let c = Polynomial::from_i64(&[4]);
        assert_eq!(remez_bound_discrete(&c, &iv(0, 9), &[rat(2)], &rat(4)).unwrap(), rat(4));

        assert!(remez_bound_discrete(&x2, &iv(0, 10), &pts[..2], &rat(25)).is_err());
        assert!(remez_bound_discrete(&x2, &iv(0, 10), &pts, &rat(3)).is_err());
        assert!(remez_bound_discrete(&x2, &iv(0, 10), &[rat(0), q(1, 2), rat(2)], &rat(25)).is_err());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Polynomial::from_i64(&[3, -1, 0, 2]);
        let s0 = q(-5, 2);
        let vals: Vec<BigRational> = (0..7).map(|i| p.eval(&(&s0 + rat(i)))).collect();
        let (r, diffs) = Polynomial::interpolate_unit_spaced(&s0, &vals);
        assert_eq!(r, p);
        assert!(diffs[4..].iter().all(|d| d.is_zero()));
    }

    #[test]
    fn parse_and_display() {
        let p = Polynomial::parse("1/2, 0, -3").unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.to_string(), "1/2,0,-3");
        assert!(Polynomial::parse("1,x").is_err());
        assert!(Polynomial::parse("0,0").unwrap().is_zero());
    }

    #[test]
    fn union_length_merges_overlaps() {
        assert_eq!(union_length(&[iv(0, 2), iv(1, 3), iv(5, 6)]), rat(4));
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-10i64..=10, 1i64..=4), 1..=8)
            .prop_map(|cs| Polynomial::new(cs.into_iter().map(|(a, b)| q(a, b)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bounds_dominate_the_maximum(p in arb_poly(), lo in -5i64..0, len in 3i64..12, cut in 1i64..3) {
            let i = iv(lo, lo + len);
            let truth = poly_max(&p, &i).unwrap();
            prop_assert!(truth.value <= truth.upper);
            let e = [Interval::new(rat(lo), rat(lo + cut)).unwrap()];
            let b = remez_bound(&p, &i, &e, None).unwrap();
            prop_assert!(b >= truth.upper);
            let d = p.degree().unwrap_or(0);
            let pts: Vec<BigRational> = (0..=len).map(|j| rat(lo + j)).collect();
            if pts.len() > d {
                let m = pts.iter().map(|x| p.eval(x).abs()).max().unwrap();
                let bd = remez_bound_discrete(&p, &i, &pts, &m).unwrap();
                prop_assert!(bd >= truth.upper);
            }
        }

        #[test]
        fn larger_subset_never_raises_the_bound(p in arb_poly(), cut in 1i64..4) {
            let i = iv(0, 8);
            let s = rat(1000);
            let small = remez_bound(&p, &i, &[iv(0, cut)], Some(&s)).unwrap();
            let big = remez_bound(&p, &i, &[iv(0, cut + 1)], Some(&s)).unwrap();
            prop_assert!(big <= small);
        }

        #[test]
        fn sampled_values_never_exceed_the_upper_bound(p in arb_poly()) {
            let i = iv(-2, 2);
            let r = poly_max(&p, &i).unwrap();
            let u = Scalar::rational(r.upper).to_f64();
            for j in 0..=400 {
                let x = -2.0 + 4.0 * j as f64 / 400.0;
                prop_assert!(p.eval_f64(x).abs() <= u * (1.0 + 1e-12) + 1e-12);
            }
        }
    }
}
