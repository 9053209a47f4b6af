//! Scans of the holomorphic continuation `g(z) = P((zN, m), y)` over the
//! rectangle `Ω = {|Re z| ≤ 1/2, |Im z| ≤ 1/16}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::KernelContext;
use crate::error::{Error, Result};
use crate::lattice::Cell;

/// A rectangle `{|Re z| ≤ half_width, |Im z| ≤ half_height}` sampled on a
/// regular `nx × ny` grid that includes the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexRegion {
    pub half_width: f64,
    pub half_height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ComplexRegion {
    /// `Ω` on the 129 × 33 grid.
    pub fn omega() -> Self {
        ComplexRegion { half_width: 0.5, half_height: 1.0 / 16.0, nx: 129, ny: 33 }
    }

    pub fn with_resolution(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Precondition("region grid needs at least 2 x 2 points".into()));
        }
        Ok(ComplexRegion { nx, ny, ..ComplexRegion::omega() })
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let x = -self.half_width + 2.0 * self.half_width * i as f64 / (self.nx - 1) as f64;
        let y = -self.half_height + 2.0 * self.half_height * j as f64 / (self.ny - 1) as f64;
        Complex64::new(x, y)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn points(&self) -> Vec<(usize, usize, Complex64)> {
        (0..self.ny).flat_map(|j| (0..self.nx).map(move |i| (i, j, self.point(i, j)))).collect()
    }

    pub fn boundary_points(&self) -> Vec<Complex64> {
        self.points().into_iter().filter(|&(i, j, _)| self.is_boundary(i, j)).map(|p| p.2).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub max_abs: f64,
    pub argmax_re: f64,
    pub argmax_im: f64,
    pub argmax_on_boundary: bool,
    /// `N · max |g|`, the empirical constant of the `C/N` bound.
    pub n_times_max: f64,
}

/// Maximum of `|g|` over every grid point of `region`.
pub fn complex_extension_scan(ctx: &KernelContext, m: i64, y: Cell, region: &ComplexRegion) -> Result<ScanResult> {
    let pts = region.points();
    let vals: Vec<f64> =
        pts.par_iter().map(|&(_, _, z)| ctx.value_complex(z, m, y).map(|g| g.norm())).collect::<Result<_>>()?;
    let (best, &max_abs) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Precondition("empty region".into()))?;
    let (i, j, z) = pts[best];
    Ok(ScanResult {
        max_abs,
        argmax_re: z.re,
        argmax_im: z.im,
        argmax_on_boundary: region.is_boundary(i, j),
        n_times_max: ctx.n() as f64 * max_abs,
    })
}

/// Worst case of `N · max |g|` over all boundary cells `y`, all lines
/// `|m| ≤ N/2` and the boundary samples of `region`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    pub n: i64,
    pub n_times_max: f64,
    pub y: (i64, i64),
    pub m: i64,
    pub z: (f64, f64),
}

/// Computes [`WorstCase`] from boundary samples only.
///
/// `g` is holomorphic on a neighbourhood of `Ω`, so its modulus peaks on
/// `∂Ω`. The reflections `n ↦ −n` (with `z ↦ −z`) and `m ↦ −m` reduce the
/// boundary cells to the right halves of the top and right sides.
pub fn worst_case_scan(ctx: &KernelContext, region: &ComplexRegion) -> WorstCase {
    let n = ctx.n();
    let zs = region.boundary_points();
    let ks: Vec<i64> = (1..2 * n).collect();
    // Complex factors depending on z only.
    let top_z: Vec<Vec<Complex64>> = zs.iter().map(|&z| ks.iter().map(|&k| ctx.sine_complex(k, z)).collect()).collect();
    let side_z: Vec<Vec<Complex64>> =
        zs.iter().map(|&z| ks.iter().map(|&k| ctx.ratio_complex(k, z * n as f64)).collect()).collect();
    let half = n / 2;
    let mut jobs = Vec::new();
    for t in 0..n {
        for m in -half..=half {
            jobs.push((true, t, m));
            jobs.push((false, t, m));
        }
    }
    let best = jobs
        .par_iter()
        .map(|&(top, t, m)| {
            // Real factors depending on (y, m) only.
            let b: Vec<f64> = ks
                .iter()
                .map(|&k| if top { ctx.sine(k, t) * ctx.ratio(k, m) } else { ctx.sine(k, m) * ctx.sine(k, t) })
                .collect();
            let table = if top { &top_z } else { &side_z };
            let mut best = (0.0f64, 0usize);
            for (zi, row) in table.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, &bk) in row.iter().zip(&b) {
                    acc += a * bk;
                }
                let v = acc.norm();
                if v > best.0 {
                    best = (v, zi);
                }
            }
            let y = if top { (t, n) } else { (n, t) };
            (best.0, y, m, best.1)
        })
        .reduce(|| (0.0, (0, 0), 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let z = zs.get(best.3).copied().unwrap_or_default();
    WorstCase { n, n_times_max: best.0, y: best.1, m: best.2, z: (z.re, z.im) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_matches_real_kernel() {
        let ctx = KernelContext::new(16).unwrap();
        for y in [Cell::new(3, 16), Cell::new(-16, 5), Cell::new(16, -2), Cell::new(0, -16)] {
            for n in -8..=8 {
                for m in [-8, 0, 3, 8] {
                    let g = ctx.value_complex(Complex64::new(n as f64 / 16.0, 0.0), m, y).unwrap();
                    let p = ctx.value(Cell::new(n, m), y).unwrap();
                    assert!((g.re - p).abs() < 1e-13 && g.im.abs() < 1e-13, "y={y} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn maximum_lies_on_boundary() {
        let ctx = KernelContext::new(16).unwrap();
        let r = complex_extension_scan(&ctx, 0, Cell::new(0, 16), &ComplexRegion::omega()).unwrap();
        assert!(r.argmax_on_boundary);
        assert!(r.max_abs > 0.0);
    }

    #[test]
    fn boundary_scan_agrees_with_full_scan() {
        let ctx = KernelContext::new(8).unwrap();
        let region = ComplexRegion::with_resolution(33, 9).unwrap();
        let w = worst_case_scan(&ctx, &region);
        let mut full: f64 = 0.0;
        for y in super::super::BoundaryData::cells_of(8) {
            for m in -4..=4 {
                full = full.max(complex_extension_scan(&ctx, m, y, &region).unwrap().max_abs);
            }
        }
        assert!((w.n_times_max - 8.0 * full).abs() <= 1e-12 * w.n_times_max);
    }

    #[test]
    fn rejects_far_lines() {
        let ctx = KernelContext::new(8).unwrap();
        assert!(ctx.value_complex(Complex64::new(0.0, 0.0), 5, Cell::new(0, 8)).is_err());
    }
}
