//! Direct solution of the discrete Dirichlet problem, independent of the
//! kernel formula: exact fraction-free banded elimination, or
//! red-black successive over-relaxation in double precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BoundaryData, KERNEL_PRECISION};
use crate::error::{Error, Result};
use crate::lattice::{Cell, GridFunction, Square, Window};
use crate::numeric::{Scalar, ScalarKind};

/// Largest `N` accepted by the exact solver.
pub const EXACT_MAX_N: i64 = 16;
/// Largest `N` accepted by the iterative solver.
pub const FLOAT_MAX_N: i64 = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SorOptions {
    /// Stop once `max |u(x) − mean of neighbours| ≤ tol · max |data|`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SorOptions {
    fn default() -> Self {
        SorOptions { tol: 1e-12, max_sweeps: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DirectMode {
    ExactRational,
    FloatIterative(SorOptions),
}

/// Exact solver for the interior Laplacian of `Q_N`.
///
/// Unknowns are ordered row by row, so the matrix is banded with half
/// bandwidth `2N − 1`. Elimination is fraction-free (Bareiss) over the
/// integers: every intermediate entry is a minor of the augmented matrix,
/// so all divisions are exact and no gcds are taken until the end. The
/// matrix is positive definite, so no pivoting is needed and the band is
/// kept. Rows below the active window are scaled lazily when they enter.
pub struct ExactLaplaceSolver {
    n: i64,
    side: usize,
    size: usize,
}

impl ExactLaplaceSolver {
    pub fn new(n: i64) -> Result<Self> {
        if !(1..=EXACT_MAX_N).contains(&n) {
            return Err(Error::Precondition(format!("exact solve needs 1 <= N <= {EXACT_MAX_N}, got {n}")));
        }
        let side = (2 * n - 1) as usize;
        Ok(ExactLaplaceSolver { n, side, size: side * side })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    fn index(&self, c: Cell) -> usize {
        ((c.m + self.n - 1) as usize) * self.side + (c.n + self.n - 1) as usize
    }

    /// Original band row `i`: columns `i − w ..= i + w`.
    fn band_row(&self, i: usize) -> Vec<BigInt> {
        let w = self.side;
        let mut row = vec![BigInt::zero(); 2 * w + 1];
        let (col, r) = (i % w, i / w);
        row[w] = BigInt::from(4);
        if col > 0 {
            row[w - 1] = BigInt::from(-1);
        }
        if col + 1 < w {
            row[w + 1] = BigInt::from(-1);
        }
        if r > 0 {
            row[0] = BigInt::from(-1);
        }
        if r + 1 < w {
            row[2 * w] = BigInt::from(-1);
        }
        row
    }

    /// Exact solution for rational boundary data.
    pub fn solve(&self, data: &BoundaryData) -> Result<GridFunction> {
        Ok(self.solve_many(std::slice::from_ref(data))?.pop().expect("one dataset in, one grid out"))
    }

    /// Exact solutions for several datasets, sharing one elimination.
    pub fn solve_many(&self, datasets: &[BoundaryData]) -> Result<Vec<GridFunction>> {
        let n = self.n;
        let (w, size, nr) = (self.side, self.size, datasets.len());
        let mut data_q = Vec::with_capacity(nr);
        for data in datasets {
            if data.n() != n {
                return Err(Error::Precondition(format!("solver for N = {n} given data for N = {}", data.n())));
            }
            let vals = data
                .values()
                .iter()
                .map(|v| {
                    v.as_rational()
                        .ok_or_else(|| Error::Precondition(format!("exact solve needs rational data, got {}", v.kind())))
                })
                .collect::<Result<Vec<_>>>()?;
            data_q.push(vals);
        }
        // Integer right-hand sides: data scaled by the lcm of its denominators.
        let mut scales = Vec::with_capacity(nr);
        let mut rhs = vec![vec![BigInt::zero(); nr]; size];
        for (r, (data, vals)) in datasets.iter().zip(&data_q).enumerate() {
            let l = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            for (c, v) in data.cells().iter().zip(vals) {
                let vi = v.numer() * (&l / v.denom());
                for nb in c.neighbors() {
                    if nb.n.abs() < n && nb.m.abs() < n {
                        rhs[self.index(nb)][r] += &vi;
                    }
                }
            }
            scales.push(l);
        }

        let mut band: Vec<Vec<BigInt>> = Vec::with_capacity(size);
        let mut prev = BigInt::one();
        let mut pivots = Vec::with_capacity(size);
        for k in 0..size {
            // Row k + w enters the window: its entries so far equal p_{k−1}·a.
            let enter = (k + w).min(size - 1);
            while band.len() <= enter {
                let i = band.len();
                let mut row = self.band_row(i);
                if !prev.is_one() {
                    for x in row.iter_mut().chain(rhs[i].iter_mut()) {
                        *x *= &prev;
                    }
                }
                band.push(row);
            }
            let last = (k + w).min(size - 1);
            let pivot = band[k][w].clone();
            let (top, rest) = band.split_at_mut(k + 1);
            let prow = &top[k];
            let (rtop, rrest) = rhs.split_at_mut(k + 1);
            let prhs = &rtop[k];
            for i in k + 1..=last {
                let row = &mut rest[i - k - 1];
                let aik = std::mem::take(&mut row[w + k - i]);
                let hi = (i + w).min(size - 1);
                for j in k + 1..=hi {
                    let slot = &mut row[w + j - i];
                    let mut v = &*slot * &pivot;
                    if j <= last && !aik.is_zero() {
                        let akj = &prow[w + j - k];
                        if !akj.is_zero() {
                            v -= &aik * akj;
                        }
                    }
                    *slot = if prev.is_one() { v } else { v / &prev };
                }
                let ri = &mut rrest[i - k - 1];
                for (x, pk) in ri.iter_mut().zip(prhs) {
                    let mut v = &*x * &pivot;
                    if !aik.is_zero() {
                        v -= &aik * pk;
                    }
                    *x = if prev.is_one() { v } else { v / &prev };
                }
            }
            pivots.push(pivot.clone());
            prev = pivot;
        }
        let det = prev;

        // Back substitution for y = det·x, which is integral.
        let mut y = vec![vec![BigInt::zero(); nr]; size];
        for i in (0..size).rev() {
            let hi = (i + w).min(size - 1);
            for r in 0..nr {
                let mut acc = &det * &rhs[i][r];
                for j in i + 1..=hi {
                    let u = &band[i][w + j - i];
                    if !u.is_zero() {
                        acc -= u * &y[j][r];
                    }
                }
                y[i][r] = acc / &pivots[i];
            }
        }

        let q = Square::centered(n);
        let mut out = Vec::with_capacity(nr);
        for (r, (data, vals)) in datasets.iter().zip(&data_q).enumerate() {
            let mut g = GridFunction::unset(Window::Standard(q), ScalarKind::Rational);
            for (c, v) in data.cells().iter().zip(vals) {
                g.set(*c, Scalar::rational(v.clone()))?;
            }
            let den = &det * &scales[r];
            for c in Square::centered(n - 1).cells() {
                g.set(c, Scalar::rational(BigRational::new(y[self.index(c)][r].clone(), den.clone())))?;
            }
            out.push(g);
        }
        Ok(out)
    }
}

/// Red-black SOR on the `(2N+1)²` array; returns interior values.
fn sor(data: &BoundaryData, opts: &SorOptions) -> Result<Vec<f64>> {
    let n = data.n();
    let side = (2 * n + 1) as usize;
    let idx = |c: Cell| ((c.m + n) as usize) * side + (c.n + n) as usize;
    let mut u = vec![0.0f64; side * side];
    for (c, v) in data.cells().iter().zip(data.values_f64()) {
        u[idx(*c)] = v;
    }
    let scale = data.max_abs_f64();
    if scale == 0.0 {
        return Ok(u);
    }
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / (2.0 * n as f64)).sin());
    let cap = if opts.max_sweeps == 0 { 400 * n as usize + 2000 } else { opts.max_sweeps };
    let target = opts.tol * scale;
    let mut residual = f64::INFINITY;
    for _ in 0..cap {
        for color in 0..2 {
            for m in 1..side - 1 {
                let start = 1 + (m + 1 + color) % 2;
                let mut i = start;
                while i < side - 1 {
                    let p = m * side + i;
                    let avg = 0.25 * (u[p - 1] + u[p + 1] + u[p - side] + u[p + side]);
                    u[p] += omega * (avg - u[p]);
                    i += 2;
                }
            }
        }
        residual = 0.0;
        for m in 1..side - 1 {
            for i in 1..side - 1 {
                let p = m * side + i;
                let avg = 0.25 * (u[p - 1] + u[p + 1] + u[p - side] + u[p + side]);
                residual = residual.max((avg - u[p]).abs());
            }
        }
        if residual <= target {
            return Ok(u);
        }
    }
    Err(Error::NoConvergence { iterations: cap, residual })
}

/// Solves the Dirichlet problem on `Q_N` without the kernel formula.
///
/// Exact mode needs rational data and `N ≤ 16` and returns a rational
/// grid; float mode returns a 53-bit float grid. Corners stay unset.
pub fn solve_direct(data: &BoundaryData, mode: DirectMode) -> Result<GridFunction> {
    match mode {
        DirectMode::ExactRational => ExactLaplaceSolver::new(data.n())?.solve(data),
        DirectMode::FloatIterative(opts) => {
            let n = data.n();
            if n > FLOAT_MAX_N {
                return Err(Error::Precondition(format!("iterative solve needs N <= {FLOAT_MAX_N}, got {n}")));
            }
            let u = sor(data, &opts)?;
            let side = (2 * n + 1) as usize;
            let q = Square::centered(n);
            let kind = ScalarKind::Float(KERNEL_PRECISION);
            let values = q
                .cells()
                .map(|c| {
                    if c.n.abs() == n && c.m.abs() == n {
                        Ok(None)
                    } else {
                        let v = u[((c.m + n) as usize) * side + (c.n + n) as usize];
                        Ok(Some(Scalar::from_f64(v, KERNEL_PRECISION)?))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            GridFunction::from_values(Window::Standard(q), kind, values)
        }
    }
}

/// Interior values of the iterative solution as a dense `(2N+1)²` array
/// indexed `(m+N)·(2N+1) + (n+N)`, for callers that stay in `f64`.
pub fn solve_direct_f64(data: &BoundaryData, opts: &SorOptions) -> Result<Vec<f64>> {
    sor(data, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    #[test]
    fn constant_data_gives_constant() {
        let d = BoundaryData::constant(3, Scalar::ratio(5, 7)).unwrap();
        let u = solve_direct(&d, DirectMode::ExactRational).unwrap();
        for c in Square::centered(2).cells() {
            assert_eq!(u.at(c).unwrap(), &Scalar::ratio(5, 7));
        }
    }

    #[test]
    fn single_unknown() {
        let d = BoundaryData::from_fn(1, ScalarKind::Rational, |c| {
            Scalar::integer(if c == Cell::new(0, 1) { 1 } else { 0 })
        })
        .unwrap();
        let u = solve_direct(&d, DirectMode::ExactRational).unwrap();
        assert_eq!(u.at(Cell::new(0, 0)).unwrap().as_rational().unwrap(), q(1, 4));
    }

    #[test]
    fn exact_solution_is_harmonic_and_matches_float() {
        let mut rng = crate::rng::seeded(11);
        let d = BoundaryData::random_rational(8, 16, &mut rng).unwrap();
        let exact = solve_direct(&d, DirectMode::ExactRational).unwrap();
        let rep = crate::lattice::is_harmonic(&exact, &crate::numeric::ToleranceProfile::exact()).unwrap();
        assert!(rep.harmonic);
        let float = solve_direct(&d, DirectMode::FloatIterative(SorOptions::default())).unwrap();
        for c in Square::centered(7).cells() {
            assert!((exact.at(c).unwrap().to_f64() - float.at(c).unwrap().to_f64()).abs() < 1e-11);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let d = BoundaryData::constant(16, Scalar::integer(1)).unwrap();
        let r = solve_direct(&d, DirectMode::FloatIterative(SorOptions { tol: 1e-12, max_sweeps: 2 }));
        assert!(matches!(r, Err(Error::NoConvergence { iterations: 2, .. })));
    }

    #[test]
    fn rejects_out_of_range() {
        let d = BoundaryData::constant(17, Scalar::integer(1)).unwrap();
        assert!(solve_direct(&d, DirectMode::ExactRational).is_err());
        let f = BoundaryData::constant(2, Scalar::one(ScalarKind::Float(53))).unwrap();
        assert!(solve_direct(&f, DirectMode::ExactRational).is_err());
    }
}
