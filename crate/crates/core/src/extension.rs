//! Harmonic extension on the sloped lattice.
//!
//! A sloped-harmonic function on a rectangle `R` is fixed by its values on
//! the two bottom lines and the two left columns of `R` (the set `S`), and
//! grows at most like `7^{a(R)+b(R)}`. When the two bottom lines vanish,
//! `(−1)^{s+k} U(s, k)` is a polynomial in `s` on every line, of degree at
//! most `2(k − b1) − 2`, and the discrete Remez bound applies.
//!
//! The half-plane construction builds harmonic functions on `ℤ²` that
//! vanish on `{n − m ≥ 0}`, one free value per diagonal.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::lattice::{Cell, GridFunction, HalfInt, SlopedCell, SlopedRect, Square, Window};
use crate::numeric::{NumericError, Scalar, ScalarKind};
use crate::remez::{remez_bound_discrete, Interval, Polynomial};

/// Cells of `S = {(s, k) ∈ R : min(s − a1, k − b1) ∈ {0, ½}}` in storage order.
pub fn lshape_cells(rect: &SlopedRect) -> Vec<SlopedCell> {
    let (a1, b1) = (rect.a1.doubled(), rect.b1.doubled());
    rect.cells().filter(|c| (c.s2 - a1).min(c.k2 - b1) <= 1).collect()
}

/// Values on the L-shaped set `S` of a sloped rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct LShapeData {
    rect: SlopedRect,
    kind: ScalarKind,
    cells: Vec<SlopedCell>,
    values: Vec<Scalar>,
}

impl LShapeData {
    pub fn from_fn<F: FnMut(SlopedCell) -> Scalar>(rect: SlopedRect, kind: ScalarKind, mut f: F) -> Result<Self> {
        let cells = lshape_cells(&rect);
        if cells.is_empty() {
            return precondition(format!("{rect} has no cells"));
        }
        let values: Vec<Scalar> = cells.iter().map(|&c| f(c)).collect();
        if let Some(v) = values.iter().find(|v| v.kind() != kind) {
            return Err(NumericError::KindMismatch(kind, v.kind()).into());
        }
        Ok(LShapeData { rect, kind, cells, values })
    }

    /// From explicit `(cell, value)` pairs covering `S` exactly.
    pub fn from_entries(rect: SlopedRect, entries: &[(SlopedCell, Scalar)]) -> Result<Self> {
        let cells = lshape_cells(&rect);
        if entries.len() != cells.len() {
            return precondition(format!("S has {} cells, got {} values", cells.len(), entries.len()));
        }
        let kind = entries.first().map(|e| e.1.kind()).unwrap_or(ScalarKind::Rational);
        let mut values = Vec::with_capacity(cells.len());
        for c in &cells {
            let v = entries
                .iter()
                .find(|e| e.0 == *c)
                .ok_or_else(|| Error::Precondition(format!("no value for {c} in S")))?;
            values.push(v.1.clone());
        }
        LShapeData::from_fn(rect, kind, |c| values[cells.iter().position(|x| *x == c).expect("cell of S")].clone())
    }

    pub fn rect(&self) -> &SlopedRect {
        &self.rect
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn entries(&self) -> impl Iterator<Item = (SlopedCell, &Scalar)> {
        self.cells.iter().copied().zip(&self.values)
    }

    /// A copy with one value replaced.
    pub fn with_value(&self, c: SlopedCell, v: Scalar) -> Result<Self> {
        let i = self
            .cells
            .iter()
            .position(|x| *x == c)
            .ok_or_else(|| Error::Precondition(format!("{c} is not in S")))?;
        let mut out = self.clone();
        out.values[i] = v;
        Ok(out)
    }

    pub fn max_abs(&self) -> Result<Scalar> {
        Ok(Scalar::max_abs(&self.values)?.unwrap_or_else(|| Scalar::zero(self.kind)))
    }
}

/// The unique sloped-harmonic extension of L-shape data to its rectangle.
///
/// Lines are filled by increasing `k`, each from left to right, with
/// `U(s+½, k+½) = 4U(s, k) − U(s+½, k−½) − U(s−½, k−½) − U(s−½, k+½)`.
pub fn extend_lshape(data: &LShapeData) -> Result<GridFunction> {
    let r = data.rect;
    let mut u = GridFunction::unset(Window::Sloped(r), data.kind);
    for (c, v) in data.entries() {
        u.set_sloped(c, v.clone())?;
    }
    let (a1, a2) = (r.a1.doubled(), r.a2.doubled());
    let four = Scalar::from_i64(4, data.kind);
    for k2 in r.b1.doubled() + 1..r.b2.doubled() {
        for c in r.line(k2) {
            if c.s2 <= a1 || c.s2 >= a2 {
                continue;
            }
            let v = four
                .checked_mul(u.at_sloped(c)?)?
                .checked_sub(u.at_sloped(c.shifted(1, -1))?)?
                .checked_sub(u.at_sloped(c.shifted(-1, -1))?)?
                .checked_sub(u.at_sloped(c.shifted(-1, 1))?)?;
            u.set_sloped(c.shifted(1, 1), v)?;
        }
    }
    Ok(u)
}

/// Outcome of checking the growth bounds of an L-shape extension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SevenBoundReport {
    /// `max_R |U| ≤ 7^{a(R)+b(R)} · max_S |U|`.
    pub global_holds: bool,
    /// Cells where `|U(s,k)| > 7^{s+k−a1−b1} · max_S |U|`.
    pub cellwise_violations: usize,
}

/// Checks both growth bounds exactly, comparing squares so that
/// half-integer exponents stay exact.
pub fn check_seven_bounds(data: &LShapeData, u: &GridFunction) -> Result<SevenBoundReport> {
    let r = data.rect;
    let kind = u.kind();
    let ms = data.max_abs()?;
    let ms2 = ms.checked_mul(&ms)?;
    let seven = Scalar::from_i64(7, kind);
    let bound2 = |e2: i64| -> Result<Scalar> { Ok(seven.pow(e2.max(0) as u32).checked_mul(&ms2)?) };
    let sq = |v: &Scalar| -> Result<Scalar> { Ok(v.checked_mul(v)?) };
    let global = bound2(r.a().doubled() + r.b().doubled())?;
    let mut global_holds = true;
    let mut cellwise_violations = 0;
    let base = r.a1.doubled() + r.b1.doubled();
    for c in r.cells() {
        let v2 = sq(u.at_sloped(c)?)?;
        if v2.checked_cmp(&global)? == Ordering::Greater {
            global_holds = false;
        }
        // 2(s + k − a1 − b1) in doubled units.
        if v2.checked_cmp(&bound2(c.s2 + c.k2 - base)?)? == Ordering::Greater {
            cellwise_violations += 1;
        }
    }
    Ok(SevenBoundReport { global_holds, cellwise_violations })
}

/// Free values `t_1, …, t_D` of the half-plane construction on `Q_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSeed {
    pub values: Vec<Scalar>,
    pub radius: i64,
}

impl DiagonalSeed {
    pub fn new(values: Vec<Scalar>, radius: i64) -> Result<Self> {
        if values.is_empty() {
            return precondition("a diagonal seed needs at least one value");
        }
        if radius < 1 || values.len() as i64 > 2 * radius {
            return precondition(format!("Q_{radius} holds only {} diagonals above n = m", 2 * radius.max(0)));
        }
        let kind = values[0].kind();
        if let Some(v) = values.iter().find(|v| v.kind() != kind) {
            return Err(NumericError::KindMismatch(kind, v.kind()).into());
        }
        Ok(DiagonalSeed { values, radius })
    }

    pub fn kind(&self) -> ScalarKind {
        self.values[0].kind()
    }
}

/// A harmonic function on `Q_N` vanishing on `{n − m ≥ 0}`.
///
/// On the diagonal `m − n = d ≥ 1` write `v_d(j) = u(j, j+d)`. The mean
/// value property at `(j, j+d−1)` reads
/// `v_d(j) + v_d(j−1) = 4v_{d−1}(j) − v_{d−2}(j+1) − v_{d−2}(j)`,
/// so `v_d` is fixed by `v_d(0) = t_d`. Diagonals beyond `D` take `t_d = 0`.
/// Each diagonal is computed on a range wide enough for the window.
pub fn halfplane_construct(seed: &DiagonalSeed) -> Result<GridFunction> {
    let n = seed.radius;
    let kind = seed.kind();
    let dmax = 2 * n;
    let zero = Scalar::zero(kind);
    let four = Scalar::from_i64(4, kind);
    // v[d] covers j in [−n, n + dmax − d]; d = 0 and d = −1 are zero.
    let lo = -n;
    let mut diags: Vec<Vec<Scalar>> = Vec::with_capacity(dmax as usize + 1);
    let width = |d: i64| (2 * n + dmax - d + 1) as usize;
    diags.push(vec![zero.clone(); width(0) + 2]);
    let get = |diags: &Vec<Vec<Scalar>>, d: i64, j: i64| -> Scalar {
        if d <= 0 {
            return zero.clone();
        }
        diags[d as usize][(j - lo) as usize].clone()
    };
    for d in 1..=dmax {
        let t = seed.values.get(d as usize - 1).cloned().unwrap_or_else(|| zero.clone());
        let w = width(d);
        let hi = lo + w as i64 - 1;
        let rhs = |diags: &Vec<Vec<Scalar>>, j: i64| -> Result<Scalar> {
            Ok(four.checked_mul(&get(diags, d - 1, j))?.checked_sub(&get(diags, d - 2, j + 1))?.checked_sub(&get(
                diags,
                d - 2,
                j,
            ))?)
        };
        let mut v = vec![zero.clone(); w];
        v[(-lo) as usize] = t;
        for j in 1..=hi {
            let r = rhs(&diags, j)?;
            v[(j - lo) as usize] = r.checked_sub(&v[(j - 1 - lo) as usize])?;
        }
        for j in (lo + 1..=0).rev() {
            let r = rhs(&diags, j)?;
            v[(j - 1 - lo) as usize] = r.checked_sub(&v[(j - lo) as usize])?;
        }
        diags.push(v);
    }
    GridFunction::standard(Square::centered(n), kind, |c: Cell| {
        let d = c.m - c.n;
        if d <= 0 {
            zero.clone()
        } else {
            diags[d as usize][(c.n - lo) as usize].clone()
        }
    })
}

/// `(−1)^{s+k} U(s, k) = p_k(s)` on one line of a zero-bottom rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePolynomial {
    pub k: HalfInt,
    pub poly: Polynomial,
    /// `2(k − b1) − 2`.
    pub degree_bound: i64,
    /// `Δ^j p_k(s_0)` at the first node of the line.
    pub differences: Vec<BigRational>,
}

fn rational_of(v: &Scalar) -> Result<BigRational> {
    v.as_rational()
        .ok_or_else(|| Error::Precondition(format!("line polynomials need rational values, got kind {}", v.kind())))
}

/// Interpolates `(−1)^{s+k} U(s, k)` along the line `k = k2/2` of `rect`
/// and checks the degree bound by exact finite differences.
pub fn line_polynomial(u: &GridFunction, rect: &SlopedRect, k2: i64) -> Result<LinePolynomial> {
    let win = u.rect().ok_or_else(|| Error::Precondition("line polynomials need sloped coordinates".into()))?;
    if !win.contains_rect(rect) {
        return Err(Error::OutOfWindow(format!("{rect} is not inside {win}")));
    }
    let b1 = rect.b1.doubled();
    if k2 < b1 + 2 || k2 > rect.b2.doubled() {
        return precondition(format!("line k = {} is outside [b1 + 1, b2] of {rect}", HalfInt::from_doubled(k2)));
    }
    for line in [b1, b1 + 1] {
        for c in rect.line(line) {
            if !u.at_sloped(c)?.is_zero() {
                return precondition(format!("U({c}) is nonzero on the two bottom lines"));
            }
        }
    }
    let cells = rect.line(k2);
    let Some(first) = cells.first() else {
        return precondition("the line has no cells");
    };
    let vals = cells
        .iter()
        .map(|c| {
            let v = rational_of(u.at_sloped(*c)?)?;
            Ok(if c.parity_sign() < 0 { -v } else { v })
        })
        .collect::<Result<Vec<_>>>()?;
    let s0 = BigRational::new(first.s2.into(), 2.into());
    let (poly, differences) = Polynomial::interpolate_unit_spaced(&s0, &vals);
    let degree_bound = k2 - b1 - 2;
    if let Some(j) = differences.iter().enumerate().skip((degree_bound + 1).max(0) as usize).find(|d| !d.1.is_zero()) {
        return precondition(format!(
            "difference of order {} is nonzero on line k = {}; degree bound {degree_bound} violated",
            j.0,
            HalfInt::from_doubled(k2)
        ));
    }
    Ok(LinePolynomial { k: HalfInt::from_doubled(k2), poly, degree_bound, differences })
}

/// A certified bound for `max |U|` on the top line `T_{b2}` of a
/// zero-bottom rectangle with `a(R) ≥ 10·b(R)`, given `|U| ≤ M` on at least
/// half of that line: the discrete Remez bound for `p_{b2}` at the small
/// points.
pub fn remez_line_bound(u: &GridFunction, rect: &SlopedRect, m: &Scalar) -> Result<Scalar> {
    if rect.a().doubled() < 10 * rect.b().doubled() {
        return precondition(format!("need a(R) >= 10 b(R), got a = {}, b = {}", rect.a(), rect.b()));
    }
    let m = rational_of(m)?;
    let k2 = rect.b2.doubled();
    let lp = line_polynomial(u, rect, k2)?;
    let cells = rect.line(k2);
    let mut small = Vec::new();
    for c in &cells {
        let v = rational_of(u.at_sloped(*c)?)?;
        if num_traits::Signed::abs(&v) <= m {
            small.push(BigRational::new(c.s2.into(), 2.into()));
        }
    }
    if 2 * small.len() < cells.len() {
        return precondition(format!("|U| <= M on only {} of {} cells of the top line", small.len(), cells.len()));
    }
    let half = |s2: i64| BigRational::new(s2.into(), 2.into());
    let iv = Interval::new(half(cells[0].s2), half(cells[cells.len() - 1].s2))?;
    Ok(Scalar::rational(remez_bound_discrete(&lp.poly, &iv, &small, &m)?))
}

/// Exact maximum of `|U|` on the line `k = k2/2` of `rect`.
pub fn line_max(u: &GridFunction, rect: &SlopedRect, k2: i64) -> Result<Scalar> {
    let vals = rect.line(k2).iter().map(|c| u.at_sloped(*c).cloned()).collect::<Result<Vec<_>>>()?;
    Ok(Scalar::max_abs(&vals)?.unwrap_or_else(|| Scalar::zero(u.kind())))
}

/// Serialized form of L-shape data: the rectangle and `(s, k, value)` triples.
#[derive(Serialize, Deserialize)]
pub struct LShapeFile {
    pub rect: SlopedRect,
    pub scalar_kind: String,
    pub values: Vec<(HalfInt, HalfInt, String)>,
}

impl LShapeData {
    pub fn to_file(&self) -> LShapeFile {
        LShapeFile {
            rect: self.rect,
            scalar_kind: self.kind.to_string(),
            values: self.entries().map(|(c, v)| (c.s(), c.k(), v.to_string())).collect(),
        }
    }

    pub fn from_file(f: &LShapeFile) -> Result<Self> {
        let kind = crate::numeric::parse_kind(&f.scalar_kind)?;
        let entries = f
            .values
            .iter()
            .map(|(s, k, v)| Ok((SlopedCell::new(*s, *k)?, crate::numeric::parse_scalar(v, kind)?)))
            .collect::<Result<Vec<_>>>()?;
        if entries.is_empty() {
            return LShapeData::from_fn(f.rect, kind, |_| Scalar::zero(kind));
        }
        LShapeData::from_entries(f.rect, &entries)
    }
}

/// Serialized form of a diagonal seed.
#[derive(Serialize, Deserialize)]
pub struct DiagonalSeedFile {
    pub radius: i64,
    pub scalar_kind: String,
    /// `(d, t_d)` pairs.
    pub values: Vec<(i64, String)>,
}

impl DiagonalSeed {
    pub fn to_file(&self) -> DiagonalSeedFile {
        DiagonalSeedFile {
            radius: self.radius,
            scalar_kind: self.kind().to_string(),
            values: self.values.iter().enumerate().map(|(i, v)| (i as i64 + 1, v.to_string())).collect(),
        }
    }

    pub fn from_file(f: &DiagonalSeedFile) -> Result<Self> {
        let kind = crate::numeric::parse_kind(&f.scalar_kind)?;
        let dmax = f.values.iter().map(|p| p.0).max().unwrap_or(0);
        if f.values.iter().any(|p| p.0 < 1) {
            return precondition("diagonal indices start at 1");
        }
        let mut vals = vec![Scalar::zero(kind); dmax as usize];
        for (d, v) in &f.values {
            vals[*d as usize - 1] = crate::numeric::parse_scalar(v, kind)?;
        }
        DiagonalSeed::new(vals, f.radius)
    }
}

/// Random rationals `a/den`, `|a| ≤ den`, on `S`; with `zero_bottom` the two
/// bottom lines are set to zero.
pub fn random_lshape<R: rand::Rng>(rect: SlopedRect, den: i64, zero_bottom: bool, rng: &mut R) -> Result<LShapeData> {
    let b1 = rect.b1.doubled();
    LShapeData::from_fn(rect, ScalarKind::Rational, |c| {
        let v = Scalar::ratio(rng.random_range(-den..=den), den);
        if zero_bottom && c.k2 <= b1 + 1 {
            Scalar::zero(ScalarKind::Rational)
        } else {
            v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{is_harmonic, laplacian_residual, sloped_residual};
    use crate::numeric::ToleranceProfile;
    use proptest::prelude::*;

    fn rect(a1: i64, a2: i64, b1: i64, b2: i64) -> SlopedRect {
        SlopedRect::from_doubled(a1, a2, b1, b2).unwrap()
    }

    #[test]
    fn constant_and_linear_data_extend_to_themselves() {
        let r = rect(0, 12, -3, 9);
        let one = LShapeData::from_fn(r, ScalarKind::Rational, |_| Scalar::integer(1)).unwrap();
        let u = extend_lshape(&one).unwrap();
        assert!(r.cells().all(|c| u.at_sloped(c).unwrap() == &Scalar::integer(1)));
        let lin = LShapeData::from_fn(r, ScalarKind::Rational, |c| Scalar::ratio(c.s2, 2)).unwrap();
        let u = extend_lshape(&lin).unwrap();
        assert!(r.cells().all(|c| u.at_sloped(c).unwrap() == &Scalar::ratio(c.s2, 2)));
    }

    #[test]
    fn unit_square_example() {
        // a1 = b1 = 0, a2 = b2 = 1: one stencil gives U(1, 1) = 4.
        let r = rect(0, 2, 0, 2);
        let data = LShapeData::from_fn(r, ScalarKind::Rational, |c| {
            Scalar::integer(if c == SlopedCell::from_doubled(1, 1).unwrap() { 1 } else { 0 })
        })
        .unwrap();
        let u = extend_lshape(&data).unwrap();
        assert_eq!(u.at_sloped(SlopedCell::from_doubled(2, 2).unwrap()).unwrap(), &Scalar::integer(4));
        let rep = check_seven_bounds(&data, &u).unwrap();
        assert!(rep.global_holds && rep.cellwise_violations == 0);
    }

    #[test]
    fn lshape_domain_is_two_lines_and_two_columns() {
        let r = rect(0, 8, 0, 8);
        let s = lshape_cells(&r);
        assert!(s.iter().all(|c| c.s2 <= 1 || c.k2 <= 1));
        assert_eq!(s.len(), r.cells().filter(|c| c.s2 <= 1 || c.k2 <= 1).count());
    }

    #[test]
    fn halfplane_examples() {
        let zero = DiagonalSeed::new(vec![Scalar::integer(0); 3], 6).unwrap();
        let u = halfplane_construct(&zero).unwrap();
        assert!(u.values().iter().all(|v| v.as_ref().unwrap().is_zero()));

        let seed = DiagonalSeed::new(vec![Scalar::integer(1)], 6).unwrap();
        let u = halfplane_construct(&seed).unwrap();
        for x in -6..6 {
            let here = u.at(Cell::new(x, x + 1)).unwrap();
            assert_eq!(here.abs(), Scalar::integer(1));
            if x > -6 {
                assert_eq!(here, &u.at(Cell::new(x - 1, x)).unwrap().neg());
            }
        }
        assert_eq!(u.at(Cell::new(0, 1)).unwrap(), &Scalar::integer(1));
        assert!(is_harmonic(&u, &ToleranceProfile::exact()).unwrap().harmonic);
    }

    #[test]
    fn halfplane_is_harmonic_with_rational_seed() {
        let vals = vec![Scalar::ratio(1, 3), Scalar::ratio(-2, 5), Scalar::integer(0), Scalar::ratio(7, 2)];
        let u = halfplane_construct(&DiagonalSeed::new(vals, 8).unwrap()).unwrap();
        for c in Square::centered(7).cells() {
            assert!(laplacian_residual(&u, c).unwrap().is_zero(), "{c}");
        }
        assert!(u.at(Cell::new(3, 3)).unwrap().is_zero());
    }

    #[test]
    fn line_polynomial_examples() {
        let r = rect(0, 20, 0, 6);
        let zero = LShapeData::from_fn(r, ScalarKind::Rational, |_| Scalar::integer(0)).unwrap();
        let u = extend_lshape(&zero).unwrap();
        let lp = line_polynomial(&u, &r, 4).unwrap();
        assert!(lp.poly.is_zero());

        let mut rng = crate::rng::seeded(3);
        let data = random_lshape(r, 9, true, &mut rng).unwrap();
        let u = extend_lshape(&data).unwrap();
        let lp = line_polynomial(&u, &r, 2).unwrap();
        assert_eq!(lp.degree_bound, 0);
        assert!(lp.poly.degree().is_none_or(|d| d == 0));
        for k2 in 2..=6 {
            let lp = line_polynomial(&u, &r, k2).unwrap();
            assert!(lp.poly.degree().is_none_or(|d| d as i64 <= lp.degree_bound));
        }
        assert!(line_polynomial(&u, &r, 1).is_err());

        let nonzero = random_lshape(r, 9, false, &mut rng).unwrap();
        let v = extend_lshape(&nonzero).unwrap();
        assert!(line_polynomial(&v, &r, 4).is_err());
    }

    #[test]
    fn remez_line_bound_dominates() {
        let r = rect(0, 79, 0, 3);
        let mut rng = crate::rng::seeded(5);
        for _ in 0..10 {
            let data = random_lshape(r, 5, true, &mut rng).unwrap();
            let u = extend_lshape(&data).unwrap();
            let top = line_max(&u, &r, 3).unwrap();
            let bound = remez_line_bound(&u, &r, &top).unwrap();
            assert!(bound.checked_cmp(&top).unwrap() != Ordering::Less);
        }
        let zero = extend_lshape(&LShapeData::from_fn(r, ScalarKind::Rational, |_| Scalar::integer(0)).unwrap()).unwrap();
        let b = remez_line_bound(&zero, &r, &Scalar::integer(1)).unwrap();
        assert!(b.signum().unwrap() >= 0);
        assert!(remez_line_bound(&zero, &rect(0, 10, 0, 3), &Scalar::integer(1)).is_err());
    }

    #[test]
    fn seed_files_round_trip() {
        let seed = DiagonalSeed::new(vec![Scalar::ratio(1, 3), Scalar::integer(2)], 4).unwrap();
        let f = seed.to_file();
        assert_eq!(DiagonalSeed::from_file(&f).unwrap(), seed);
        let r = rect(0, 4, 0, 4);
        let data = LShapeData::from_fn(r, ScalarKind::Rational, |c| Scalar::integer(c.s2 - c.k2)).unwrap();
        let text = serde_json::to_string(&data.to_file()).unwrap();
        let back: LShapeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(LShapeData::from_file(&back).unwrap(), data);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn extensions_are_harmonic_and_bounded(a1 in -4i64..4, b1 in -4i64..4, wa in 1i64..14, wb in 1i64..14, seed in 0u64..1000) {
            let r = rect(a1, a1 + wa, b1, b1 + wb);
            let mut rng = crate::rng::seeded(seed);
            let data = random_lshape(r, 7, false, &mut rng).unwrap();
            let u = extend_lshape(&data).unwrap();
            for c in r.cells() {
                if c.s2 + 2 <= r.a2.doubled() && c.k2 + 2 <= r.b2.doubled() {
                    prop_assert!(sloped_residual(&u, c).unwrap().is_zero());
                }
            }
            let rep = check_seven_bounds(&data, &u).unwrap();
            prop_assert!(rep.global_holds);
            prop_assert_eq!(rep.cellwise_violations, 0);
        }

        #[test]
        fn changing_one_value_changes_the_extension(seed in 0u64..1000, pick in 0usize..1000) {
            let r = rect(0, 8, 0, 8);
            let mut rng = crate::rng::seeded(seed);
            let data = random_lshape(r, 7, false, &mut rng).unwrap();
            let u = extend_lshape(&data).unwrap();
            let cells = lshape_cells(&r);
            let c = cells[pick % cells.len()];
            let bumped = data.with_value(c, data.entries().find(|e| e.0 == c).unwrap().1 + &Scalar::integer(1)).unwrap();
            let v = extend_lshape(&bumped).unwrap();
            let s: Vec<SlopedCell> = cells.clone();
            prop_assert!(r.cells().filter(|x| !s.contains(x)).any(|x| u.at_sloped(x).unwrap() != v.at_sloped(x).unwrap()));
            prop_assert_eq!(extend_lshape(&data).unwrap(), u);
        }
    }
}
