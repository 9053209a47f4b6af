//! The explicit discrete Poisson kernel of `Q_N`.
//!
//! For the boundary cell `y = (n₁, N)` on the top side,
//!
//! ```text
//! P((n,m), y) = (1/N) Σ_{k=1}^{2N−1} sin(πk(n+N)/2N) · sin(πk(n₁+N)/2N) · sinh(a_k(m+N)) / sinh(2a_kN)
//! ```
//!
//! with `cosh a_k = 2 − cos(kπ/2N)`. The other three sides are reduced to
//! the top one by the reflections of the square. The sinh ratio is
//! evaluated as `e^{a(m−N)}·(1 − e^{−2a(m+N)})/(1 − e^{−4aN})`, which does
//! not overflow and stays valid for complex `m`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{side_of, BoundaryData, Side, KERNEL_PRECISION};
use crate::error::{Error, Result};
use crate::lattice::{Cell, GridFunction, Square, Window};
use crate::numeric::{Scalar, ScalarKind};

/// The positive root of `cosh a = 2 − cos(kπ/2N)`, for `0 < k < 2N`.
pub fn compute_ak(n: i64, k: i64) -> Result<f64> {
    if n < 1 || k <= 0 || k >= 2 * n {
        return Err(Error::Precondition(format!("a_k needs 0 < k < 2N, got k = {k}, N = {n}")));
    }
    // cosh a − 1 = 2 sin²(θ/2) = t, so a = ln(1 + t + √(t(t+2))).
    let half = k as f64 * PI / (4.0 * n as f64);
    let t = 2.0 * half.sin().powi(2);
    Ok((t + (t * (t + 2.0)).sqrt()).ln_1p())
}

/// Precomputed sines and sinh ratios for one `N`.
#[derive(Clone, Debug)]
pub struct KernelContext {
    n: i64,
    a: Vec<f64>,
    /// `sin(πkj/2N)`, row `k−1`, column `j = 0..=2N`.
    sines: Vec<f64>,
    /// Sinh ratio at `m = −N..=N`, row `k−1`, column `m+N`.
    ratios: Vec<f64>,
}

impl KernelContext {
    pub fn new(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Precondition(format!("kernel needs N >= 1, got {n}")));
        }
        let kc = (2 * n - 1) as usize;
        let width = (2 * n + 1) as usize;
        let a: Vec<f64> = (1..2 * n).map(|k| compute_ak(n, k)).collect::<Result<_>>()?;
        // sin(πr/2N) for r in 0..4N with exact zeros at r = 0 and r = 2N.
        let quarter = |r: i64| (PI * r as f64 / (2.0 * n as f64)).sin();
        let base: Vec<f64> = (0..4 * n)
            .map(|r| {
                if r <= n {
                    quarter(r)
                } else if r <= 2 * n {
                    quarter(2 * n - r)
                } else if r <= 3 * n {
                    -quarter(r - 2 * n)
                } else {
                    -quarter(4 * n - r)
                }
            })
            .collect();
        let mut sines = vec![0.0; kc * width];
        let mut ratios = vec![0.0; kc * width];
        for k in 1..2 * n {
            let row = (k - 1) as usize * width;
            let ak = a[(k - 1) as usize];
            let den = -(-4.0 * ak * n as f64).exp_m1();
            for j in 0..=2 * n {
                sines[row + j as usize] = base[((k * j) % (4 * n)) as usize];
                let m = j - n;
                let num = -(-2.0 * ak * (m + n) as f64).exp_m1();
                ratios[row + j as usize] = (ak * (m - n) as f64).exp() * num / den;
            }
        }
        Ok(KernelContext { n, a, sines, ratios })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    fn width(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    /// `sin(πk(j+N)/2N)` for an integer coordinate `j`.
    #[inline]
    pub fn sine(&self, k: i64, j: i64) -> f64 {
        self.sines[(k - 1) as usize * self.width() + (j + self.n) as usize]
    }

    /// `sinh(a_k(m+N)) / sinh(2a_kN)` for an integer `m ∈ [−N, N]`.
    #[inline]
    pub fn ratio(&self, k: i64, m: i64) -> f64 {
        self.ratios[(k - 1) as usize * self.width() + (m + self.n) as usize]
    }

    /// `sin(πk(z+1)/2)`, the continuation of `sin(πk(n+N)/2N)` in `z = n/N`.
    pub fn sine_complex(&self, k: i64, z: Complex64) -> Complex64 {
        // Reduce the real part modulo 4 before scaling, for accuracy at large k.
        let w = (z + 1.0) * k as f64;
        let re = w.re.rem_euclid(4.0);
        (Complex64::new(re, w.im) * (PI / 2.0)).sin()
    }

    /// The sinh ratio at a complex second coordinate `w`.
    pub fn ratio_complex(&self, k: i64, w: Complex64) -> Complex64 {
        let ak = self.a[(k - 1) as usize];
        let n = self.n as f64;
        let den = -(-4.0 * ak * n).exp_m1();
        let num = Complex64::new(1.0, 0.0) - (-(w + n) * (2.0 * ak)).exp();
        ((w - n) * ak).exp() * num / den
    }

    /// Top-side kernel at integer `(n, m)` for boundary cell `(n₁, N)`.
    pub fn top(&self, n: i64, m: i64, n1: i64) -> f64 {
        let mut acc = 0.0;
        for k in 1..2 * self.n {
            acc += self.sine(k, n) * self.sine(k, n1) * self.ratio(k, m);
        }
        acc / self.n as f64
    }

    fn check_x(&self, x: Cell) -> Result<()> {
        let n = self.n;
        if x.n.abs() > n || x.m.abs() > n || (x.n.abs() == n && x.m.abs() == n) {
            return Err(Error::Precondition(format!("{x} is not a non-corner cell of Q_{n}")));
        }
        Ok(())
    }

    /// `P(x, y)` for `x ∈ Q_N` off the corners and `y ∈ ∂Q_N`.
    pub fn value(&self, x: Cell, y: Cell) -> Result<f64> {
        self.check_x(x)?;
        Ok(match side_of(self.n, y)? {
            Side::Top => self.top(x.n, x.m, y.n),
            Side::Bottom => self.top(x.n, -x.m, y.n),
            Side::Right => self.top(x.m, x.n, y.m),
            Side::Left => self.top(x.m, -x.n, y.m),
        })
    }

    /// The continuation `g(z) = P((zN, m), y)` for `|m| ≤ N/2`.
    pub fn value_complex(&self, z: Complex64, m: i64, y: Cell) -> Result<Complex64> {
        if 2 * m.abs() > self.n {
            return Err(Error::Precondition(format!("complex kernel needs |m| <= N/2, got m = {m}, N = {}", self.n)));
        }
        let side = side_of(self.n, y)?;
        let zn = z * self.n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..2 * self.n {
            acc += match side {
                Side::Top => self.sine_complex(k, z) * (self.sine(k, y.n) * self.ratio(k, m)),
                Side::Bottom => self.sine_complex(k, z) * (self.sine(k, y.n) * self.ratio(k, -m)),
                Side::Right => self.ratio_complex(k, zn) * (self.sine(k, m) * self.sine(k, y.m)),
                Side::Left => self.ratio_complex(k, -zn) * (self.sine(k, m) * self.sine(k, y.m)),
            };
        }
        Ok(acc / self.n as f64)
    }

    /// Kernel sums of boundary data, one coefficient vector per side:
    /// `c[k] = Σ_t sin(πk(t+N)/2N)·u(y_t)` along the side.
    pub fn side_coefficients(&self, values: &dyn Fn(Cell) -> f64) -> [Vec<f64>; 4] {
        let n = self.n;
        let coef = |cell: &dyn Fn(i64) -> Cell| -> Vec<f64> {
            (1..2 * n).map(|k| (-n + 1..n).map(|t| self.sine(k, t) * values(cell(t))).sum()).collect()
        };
        [
            coef(&|t| Cell::new(t, n)),
            coef(&|t| Cell::new(t, -n)),
            coef(&|t| Cell::new(n, t)),
            coef(&|t| Cell::new(-n, t)),
        ]
    }

    /// `Σ_y P(x, y) u(y)` from precomputed side coefficients.
    pub fn apply(&self, coef: &[Vec<f64>; 4], x: Cell) -> f64 {
        let mut acc = 0.0;
        for k in 1..2 * self.n {
            let i = (k - 1) as usize;
            acc += self.sine(k, x.n) * (self.ratio(k, x.m) * coef[0][i] + self.ratio(k, -x.m) * coef[1][i]);
            acc += self.sine(k, x.m) * (self.ratio(k, x.n) * coef[2][i] + self.ratio(k, -x.n) * coef[3][i]);
        }
        acc / self.n as f64
    }
}

/// `P(x, y)` as a 53-bit float scalar.
pub fn kernel_value(n: i64, x: Cell, y: Cell) -> Result<Scalar> {
    let v = KernelContext::new(n)?.value(x, y)?;
    Ok(Scalar::from_f64(v, KERNEL_PRECISION)?)
}

/// `P(x, y)` for every interior `x` (`|n|, |m| ≤ N−1`) and boundary `y`.
#[derive(Clone, Debug)]
pub struct PoissonKernelTable {
    pub n: i64,
    pub interior: Vec<Cell>,
    pub boundary: Vec<Cell>,
    /// Row-major: one row per interior cell.
    pub values: Vec<f64>,
}

impl PoissonKernelTable {
    pub fn get(&self, xi: usize, yi: usize) -> f64 {
        self.values[xi * self.boundary.len() + yi]
    }

    pub fn row(&self, xi: usize) -> &[f64] {
        let w = self.boundary.len();
        &self.values[xi * w..(xi + 1) * w]
    }

    pub fn lookup(&self, x: Cell, y: Cell) -> Option<f64> {
        let w = (2 * self.n - 1) as i64;
        if x.n.abs() >= self.n || x.m.abs() >= self.n {
            return None;
        }
        let xi = ((x.m + self.n - 1) * w + (x.n + self.n - 1)) as usize;
        let yi = self.boundary.iter().position(|c| *c == y)?;
        Some(self.get(xi, yi))
    }

    /// CSV rows `xn,xm,yn,ym,value` in storage order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xn,xm,yn,ym,value\n");
        for (xi, x) in self.interior.iter().enumerate() {
            for (yi, y) in self.boundary.iter().enumerate() {
                out.push_str(&format!("{},{},{},{},{:e}\n", x.n, x.m, y.n, y.m, self.get(xi, yi)));
            }
        }
        out
    }
}

pub fn build_kernel_table(n: i64) -> Result<PoissonKernelTable> {
    let ctx = KernelContext::new(n)?;
    let interior: Vec<Cell> = Square::centered(n - 1).cells().collect();
    let boundary = BoundaryData::cells_of(n);
    let values: Vec<f64> = interior
        .par_iter()
        .flat_map_iter(|&x| {
            let ctx = &ctx;
            boundary.iter().map(move |&y| ctx.value(x, y).expect("valid cells"))
        })
        .collect();
    Ok(PoissonKernelTable { n, interior, boundary, values })
}

/// Solves the Dirichlet problem by kernel summation. Boundary values are
/// copied (rounded to 53 bits), corners are left unset.
pub fn solve_kernel(data: &BoundaryData) -> Result<GridFunction> {
    let n = data.n();
    let ctx = KernelContext::new(n)?;
    let vals = data.values_f64();
    let lookup = |c: Cell| -> f64 {
        let i = data.cells().iter().position(|x| *x == c).expect("boundary cell");
        vals[i]
    };
    let coef = ctx.side_coefficients(&lookup);
    let kind = ScalarKind::Float(KERNEL_PRECISION);
    let q = Square::centered(n);
    let cells: Vec<Cell> = q.cells().collect();
    let computed: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&c| {
            if c.n.abs() == n && c.m.abs() == n {
                None
            } else if c.n.abs() == n || c.m.abs() == n {
                Some(lookup(c))
            } else {
                Some(ctx.apply(&coef, c))
            }
        })
        .collect();
    let values = computed
        .into_iter()
        .map(|v| v.map(|x| Scalar::from_f64(x, KERNEL_PRECISION)).transpose())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    GridFunction::from_values(Window::Standard(q), kind, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{solve_direct, DirectMode, SorOptions};

    #[test]
    fn a_k_examples() {
        assert!((compute_ak(2, 2).unwrap() - 1.3169578969248166).abs() < 1e-14);
        let a = compute_ak(2, 1).unwrap();
        assert!((a.cosh() - (2.0 - (PI / 4.0).cos())).abs() < 1e-14);
        assert!((a - 0.747_819_4).abs() < 1e-7);
        assert!(compute_ak(2, 4).is_err());
        assert!(compute_ak(2, 0).is_err());
    }

    #[test]
    fn n1_kernel_is_one_quarter() {
        let ctx = KernelContext::new(1).unwrap();
        for y in BoundaryData::cells_of(1) {
            assert!((ctx.value(Cell::new(0, 0), y).unwrap() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn dihedral_symmetry_at_centre() {
        let ctx = KernelContext::new(4).unwrap();
        let o = Cell::new(0, 0);
        for y in BoundaryData::cells_of(4) {
            let v = ctx.value(o, y).unwrap();
            for img in [
                Cell::new(-y.n, y.m),
                Cell::new(y.n, -y.m),
                Cell::new(y.m, y.n),
                Cell::new(-y.m, -y.n),
            ] {
                assert!((ctx.value(o, img).unwrap() - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn harmonic_in_x() {
        let ctx = KernelContext::new(5).unwrap();
        let y = Cell::new(2, -5);
        for x in Square::centered(4).cells() {
            let lap: f64 = x.neighbors().iter().map(|c| ctx.value(*c, y).unwrap()).sum::<f64>()
                - 4.0 * ctx.value(x, y).unwrap();
            assert!(lap.abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn reproduces_harmonic_polynomial() {
        let data = BoundaryData::restrict(8, ScalarKind::Rational, |n, m| Scalar::integer(n * n - m * m)).unwrap();
        let u = solve_kernel(&data).unwrap();
        for c in Square::centered(7).cells() {
            assert!((u.at(c).unwrap().to_f64() - (c.n * c.n - c.m * c.m) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_iterative_solver() {
        let mut rng = crate::rng::seeded(3);
        let data = BoundaryData::random_signs(8, &mut rng).unwrap();
        let a = solve_kernel(&data).unwrap();
        let b = solve_direct(&data, DirectMode::FloatIterative(SorOptions::default())).unwrap();
        for c in Square::centered(7).cells() {
            assert!((a.at(c).unwrap().to_f64() - b.at(c).unwrap().to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn table_lookup_and_csv() {
        let t = build_kernel_table(2).unwrap();
        assert_eq!(t.interior.len(), 9);
        assert_eq!(t.boundary.len(), 12);
        let v = t.lookup(Cell::new(1, -1), Cell::new(2, 0)).unwrap();
        assert!((v - KernelContext::new(2).unwrap().value(Cell::new(1, -1), Cell::new(2, 0)).unwrap()).abs() < 1e-16);
        assert_eq!(t.to_csv().lines().count(), 1 + 9 * 12);
    }
}
