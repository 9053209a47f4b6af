//! Harmonicity residuals, coordinate changes, portions and growth.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{Cell, GridFunction, Point, SlopedCell, SlopedRect, Square, Window};
use crate::error::{precondition, Error, Result};
use crate::numeric::{Scalar, ToleranceProfile};

/// `u(n+1,m) + u(n−1,m) + u(n,m+1) + u(n,m−1) − 4u(n,m)`.
pub fn laplacian_residual(u: &GridFunction, x: Cell) -> Result<Scalar> {
    let centre = u.at(x)?;
    let mut acc = centre.mul_small(-4);
    for c in x.neighbors() {
        acc = acc.checked_add(u.at(c)?)?;
    }
    Ok(acc)
}

/// `4U(s+½,k+½) − U(s,k) − U(s+1,k) − U(s,k+1) − U(s+1,k+1)` for the
/// stencil whose lower-left corner is `p`.
pub fn sloped_residual(u: &GridFunction, p: SlopedCell) -> Result<Scalar> {
    let centre = u.at_sloped(p.shifted(1, 1))?;
    let mut acc = centre.mul_small(4);
    for (ds, dk) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
        acc = acc.checked_sub(u.at_sloped(p.shifted(ds, dk))?)?;
    }
    Ok(acc)
}

/// Lower-left stencil corners whose five points all lie in the window and
/// are set.
fn sloped_stencils(u: &GridFunction, r: &SlopedRect) -> Vec<SlopedCell> {
    r.cells()
        .filter(|p| {
            [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
                .iter()
                .all(|&(ds, dk)| u.get_sloped(p.shifted(ds, dk)).is_some())
        })
        .collect()
}

fn standard_stencils(u: &GridFunction, q: &Square) -> Vec<Cell> {
    q.cells()
        .filter(|c| u.get(*c).is_some() && c.neighbors().iter().all(|x| u.get(*x).is_some()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicityReport {
    pub harmonic: bool,
    /// Number of stencils examined.
    pub checked: usize,
    /// Largest residual in absolute value and where it occurs.
    pub worst: Option<(Point, Scalar)>,
}

/// Checks the mean value property at every stencil whose points are all
/// present. Exact kinds must have zero residual; float kinds must be
/// within `tol` relative to the largest value in the grid.
pub fn is_harmonic(u: &GridFunction, tol: &ToleranceProfile) -> Result<HarmonicityReport> {
    let residuals: Vec<(Point, Scalar)> = match u.window() {
        Window::Standard(q) => standard_stencils(u, q)
            .into_iter()
            .map(|c| Ok((Point::Std(c), laplacian_residual(u, c)?)))
            .collect::<Result<_>>()?,
        Window::Sloped(r) => sloped_stencils(u, r)
            .into_iter()
            .map(|p| Ok((Point::Sloped(p), sloped_residual(u, p)?)))
            .collect::<Result<_>>()?,
    };
    let scale = if u.kind().is_exact() { 0.0 } else { u.max_abs()?.to_f64() };
    let mut worst: Option<(Point, Scalar)> = None;
    let mut harmonic = true;
    for (p, r) in residuals.iter() {
        if !tol.accepts(r, scale) {
            harmonic = false;
        }
        let replace = match &worst {
            None => true,
            Some((_, w)) => r.cmp_abs(w)? == Ordering::Greater,
        };
        if replace {
            worst = Some((*p, r.clone()));
        }
    }
    Ok(HarmonicityReport { harmonic, checked: residuals.len(), worst })
}

/// `U(s,k) = u(s+k, s−k)` on the smallest sloped rectangle containing the
/// window; cells of the rectangle outside the square stay unset.
pub fn to_sloped(u: &GridFunction) -> Result<GridFunction> {
    let q = u.square().ok_or_else(|| Error::Precondition("to_sloped needs standard coordinates".into()))?;
    let r = SlopedRect::bounding(&q);
    let mut out = GridFunction::unset(Window::Sloped(r), u.kind());
    for (p, v) in u.entries() {
        if let (Point::Std(c), Some(v)) = (p, v) {
            out.set_sloped(SlopedCell::from_cell(c), v.clone())?;
        }
    }
    Ok(out)
}

/// Inverse of [`to_sloped`] onto the square `target`, which must be covered
/// by set values of `big_u`.
pub fn from_sloped(big_u: &GridFunction, target: Square) -> Result<GridFunction> {
    if big_u.rect().is_none() {
        return precondition("from_sloped needs sloped coordinates");
    }
    let mut values = Vec::with_capacity(target.cell_count());
    for c in target.cells() {
        let v = big_u
            .get_sloped(SlopedCell::from_cell(c))
            .ok_or_else(|| Error::OutOfWindow(format!("target cell {c} has no sloped value")))?;
        values.push(Some(v.clone()));
    }
    GridFunction::from_values(Window::Standard(target), big_u.kind(), values)
}

/// Exact fraction of cells of `q` where `|u| ≤ threshold`.
pub fn portion_below(u: &GridFunction, threshold: &Scalar, q: &Square) -> Result<BigRational> {
    let t = threshold.abs().convert(u.kind())?;
    let mut count: u64 = 0;
    for c in q.cells() {
        if u.at(c)?.cmp_abs(&t)? != Ordering::Greater {
            count += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(count), BigInt::from(q.cell_count() as u64)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub radii: Vec<i64>,
    #[serde(serialize_with = "crate::lattice::io::ser_scalars")]
    pub maxima: Vec<Scalar>,
}

impl GrowthProfile {
    pub fn get(&self, k: i64) -> Option<&Scalar> {
        self.radii.iter().position(|&r| r == k).map(|i| &self.maxima[i])
    }

    /// Least-squares slope of `ln M(K)` against `K` over `lo ≤ K ≤ hi`.
    pub fn log_slope(&self, lo: i64, hi: i64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .radii
            .iter()
            .zip(&self.maxima)
            .filter(|(k, _)| (lo..=hi).contains(*k))
            .map(|(k, m)| (*k as f64, m.ln_abs()))
            .filter(|(_, y)| y.is_finite())
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }
}

/// `M(K) = max_{Q_K} |u|` for each radius, with `Q_K` centered at the
/// window center. Maxima are exact for exact kinds.
pub fn growth_profile(u: &GridFunction, radii: &[i64]) -> Result<GrowthProfile> {
    let q = u.square().ok_or_else(|| Error::Precondition("growth needs standard coordinates".into()))?;
    let rmax = radii.iter().copied().max().unwrap_or(0);
    if radii.iter().any(|&k| k < 0) || rmax > q.radius {
        return Err(Error::OutOfWindow(format!("radius {rmax} exceeds window radius {}", q.radius)));
    }
    // Running maxima over rings, so every cell is visited once.
    let mut running: Vec<Scalar> = Vec::with_capacity(rmax as usize + 1);
    for k in 0..=rmax {
        let ring = Square { center: q.center, radius: k }.ring();
        let vals: Vec<&Scalar> = ring.iter().map(|c| u.at(*c)).collect::<Result<_>>()?;
        let mut m = Scalar::max_abs(vals)?.unwrap_or_else(|| Scalar::zero(u.kind()));
        if let Some(prev) = running.last() {
            if prev.cmp_abs(&m)? == Ordering::Greater {
                m = prev.clone();
            }
        }
        running.push(m);
    }
    Ok(GrowthProfile { radii: radii.to_vec(), maxima: radii.iter().map(|&k| running[k as usize].clone()).collect() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DoublingBranch {
    /// `M(2K) ≥ M(K)^32`.
    Power,
    /// `M(2K) ≥ M(K)·e^{c₁K}`.
    Exponential,
    Both,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingRow {
    pub k: i64,
    pub ln_m_k: f64,
    pub ln_m_2k: f64,
    pub power: bool,
    pub exponential: bool,
    pub branch: DoublingBranch,
}

/// Labels each `K` with the branches of the doubling dichotomy that hold.
///
/// A branch is only credited when `M(K) > 1`: for a bounded function with
/// `M ≡ 1` the power inequality holds trivially and says nothing.
/// The power branch is decided exactly; the exponential branch compares
/// logarithms in double precision.
pub fn doubling_report(profile: &GrowthProfile, c1: f64) -> Result<Vec<DoublingRow>> {
    let mut rows = Vec::new();
    for (i, &k) in profile.radii.iter().enumerate() {
        let Some(m2) = profile.get(2 * k) else { continue };
        let m = &profile.maxima[i];
        let one = Scalar::one(m.kind());
        let nontrivial = m.cmp_abs(&one)? == Ordering::Greater;
        let power = nontrivial && m2.cmp_abs(&m.pow(32))? != Ordering::Less;
        let (lm, lm2) = (m.ln_abs(), m2.ln_abs());
        let exponential = nontrivial && lm2 >= lm + c1 * k as f64;
        let branch = match (power, exponential) {
            (true, true) => DoublingBranch::Both,
            (true, false) => DoublingBranch::Power,
            (false, true) => DoublingBranch::Exponential,
            (false, false) => DoublingBranch::Neither,
        };
        rows.push(DoublingRow { k, ln_m_k: lm, ln_m_2k: lm2, power, exponential, branch });
    }
    Ok(rows)
}

/// Integer multiple of a scalar, exact within its kind.
trait MulSmall {
    fn mul_small(&self, k: i64) -> Scalar;
}

impl MulSmall for Scalar {
    fn mul_small(&self, k: i64) -> Scalar {
        self * &Scalar::from_i64(k, self.kind())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q, ScalarKind};

    fn grid(radius: i64, f: impl Fn(i64, i64) -> i64) -> GridFunction {
        GridFunction::standard(Square::centered(radius), ScalarKind::Rational, |c| Scalar::integer(f(c.n, c.m))).unwrap()
    }

    #[test]
    fn residual_examples() {
        let u = grid(4, |n, m| n * n - m * m);
        assert!(laplacian_residual(&u, Cell::new(1, 2)).unwrap().is_zero());
        let u = grid(4, |n, m| n * m);
        assert!(laplacian_residual(&u, Cell::new(-2, 3)).unwrap().is_zero());
        let u = grid(4, |n, _| n * n);
        assert_eq!(laplacian_residual(&u, Cell::new(0, 0)).unwrap(), Scalar::integer(2));
        assert!(laplacian_residual(&u, Cell::new(4, 0)).is_err());
    }

    #[test]
    fn n_squared_is_not_harmonic() {
        let u = grid(3, |n, _| n * n);
        let rep = is_harmonic(&u, &ToleranceProfile::exact()).unwrap();
        assert!(!rep.harmonic);
        assert_eq!(rep.checked, 25);
        assert_eq!(rep.worst.unwrap().1, Scalar::integer(2));
        let c = grid(3, |_, _| 7);
        let rep = is_harmonic(&c, &ToleranceProfile::exact()).unwrap();
        assert!(rep.harmonic);
        assert!(rep.worst.unwrap().1.is_zero());
    }

    #[test]
    fn sloped_residual_examples() {
        let r = SlopedRect::from_doubled(-4, 4, -4, 4).unwrap();
        let lin = GridFunction::sloped(r, ScalarKind::Rational, |c| Scalar::rational(q(c.s2, 2))).unwrap();
        let p = SlopedCell::from_doubled(0, 0).unwrap();
        assert!(sloped_residual(&lin, p).unwrap().is_zero());
        let sq = GridFunction::sloped(r, ScalarKind::Rational, |c| Scalar::rational(q(c.s2 * c.s2, 4))).unwrap();
        assert_eq!(sloped_residual(&sq, p).unwrap(), Scalar::integer(-1));
    }

    #[test]
    fn sloped_round_trip_and_harmonicity() {
        let u = grid(5, |n, m| n * n * n - 3 * n * m * m + 2 * m);
        let big_u = to_sloped(&u).unwrap();
        assert_eq!(from_sloped(&big_u, Square::centered(5)).unwrap(), u);
        let rep = is_harmonic(&big_u, &ToleranceProfile::exact()).unwrap();
        assert!(rep.harmonic && rep.checked > 0);
        let n_only = grid(2, |n, _| n);
        let s = to_sloped(&n_only).unwrap();
        for (p, v) in s.entries() {
            if let (Point::Sloped(c), Some(v)) = (p, v) {
                assert_eq!(v, &Scalar::rational(q(c.s2 + c.k2, 2)));
            }
        }
    }

    #[test]
    fn portions_are_complementary() {
        let u = grid(3, |n, m| n + m);
        let below = portion_below(&u, &Scalar::integer(2), &Square::centered(3)).unwrap();
        let above = Square::centered(3).cells().filter(|c| (c.n + c.m).abs() > 2).count();
        assert_eq!(below + q(above as i64, 49), q(1, 1));
        let z = grid(2, |_, _| 0);
        assert_eq!(portion_below(&z, &Scalar::integer(1), &Square::centered(2)).unwrap(), q(1, 1));
    }

    #[test]
    fn growth_and_doubling() {
        let u = grid(10, |n, _| n);
        let prof = growth_profile(&u, &[0, 1, 2, 5, 10]).unwrap();
        assert_eq!(prof.maxima, vec![0, 1, 2, 5, 10].into_iter().map(Scalar::integer).collect::<Vec<_>>());
        let rows = doubling_report(&prof, 1.3).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.branch == DoublingBranch::Neither));
        let one = grid(4, |_, _| 1);
        let rows = doubling_report(&growth_profile(&one, &[1, 2]).unwrap(), 1.3).unwrap();
        assert_eq!(rows[0].branch, DoublingBranch::Neither);
        assert!(growth_profile(&one, &[5]).is_err());
    }
}
