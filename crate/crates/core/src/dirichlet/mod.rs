//! The Dirichlet problem on `Q_N`: boundary data, the explicit Poisson
//! kernel, a direct solver used as an independent oracle, the complex
//! continuation of the kernel, and the gradient ratio.
//!
//! Kernel sums run in double precision; results are returned as 53-bit
//! float scalars.

pub mod complex;
pub mod direct;
pub mod gradient;
pub mod kernel;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{Cell, GridFunction, Square, Window};
use crate::numeric::{Scalar, ScalarKind};

pub use complex::{complex_extension_scan, ComplexRegion, ScanResult};
pub use direct::{solve_direct, DirectMode, ExactLaplaceSolver, SorOptions};
pub use gradient::gradient_ratio;
pub use kernel::{build_kernel_table, compute_ak, kernel_value, solve_kernel, KernelContext, PoissonKernelTable};

/// Precision of scalars produced from double-precision kernel sums.
pub const KERNEL_PRECISION: u32 = 53;

/// Values on the four sides of `Q_N` without the corners.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    n: i64,
    kind: ScalarKind,
    cells: Vec<Cell>,
    values: Vec<Scalar>,
}

impl BoundaryData {
    /// Boundary cells of `Q_N` in storage order (`m` outer, `n` inner).
    pub fn cells_of(n: i64) -> Vec<Cell> {
        Square::centered(n).boundary_without_corners()
    }

    pub fn from_fn<F: FnMut(Cell) -> Scalar>(n: i64, kind: ScalarKind, mut f: F) -> Result<Self> {
        if n < 1 {
            return Err(Error::Precondition(format!("boundary data needs N >= 1, got {n}")));
        }
        let cells = BoundaryData::cells_of(n);
        let values: Vec<Scalar> = cells.iter().map(|&c| f(c)).collect();
        if let Some(v) = values.iter().find(|v| v.kind() != kind) {
            return Err(Error::Numeric(crate::numeric::NumericError::KindMismatch(kind, v.kind())));
        }
        Ok(BoundaryData { n, kind, cells, values })
    }

    pub fn constant(n: i64, c: Scalar) -> Result<Self> {
        BoundaryData::from_fn(n, c.kind(), |_| c.clone())
    }

    /// Restriction of a function of the lattice to the boundary.
    pub fn restrict<F: FnMut(i64, i64) -> Scalar>(n: i64, kind: ScalarKind, mut f: F) -> Result<Self> {
        BoundaryData::from_fn(n, kind, |c| f(c.n, c.m))
    }

    /// Independent uniform ±1 values.
    pub fn random_signs<R: Rng>(n: i64, rng: &mut R) -> Result<Self> {
        BoundaryData::from_fn(n, ScalarKind::Rational, |_| Scalar::integer(if rng.random::<bool>() { 1 } else { -1 }))
    }

    /// Independent rationals `a/den` with `|a| ≤ den`, i.e. values in `[−1, 1]`.
    pub fn random_rational<R: Rng>(n: i64, den: i64, rng: &mut R) -> Result<Self> {
        BoundaryData::from_fn(n, ScalarKind::Rational, |_| Scalar::ratio(rng.random_range(-den..=den), den))
    }

    /// Reads the boundary cells of a grid on `Q_N`; every boundary cell must be set.
    pub fn from_grid(u: &GridFunction) -> Result<Self> {
        let q = u.square().ok_or_else(|| Error::Precondition("boundary data needs a standard window".into()))?;
        if q.center != Cell::new(0, 0) {
            return Err(Error::Precondition("boundary data lives on a square centered at the origin".into()));
        }
        let cells = BoundaryData::cells_of(q.radius);
        let values = cells.iter().map(|c| u.at(*c).cloned()).collect::<Result<Vec<_>>>()?;
        Ok(BoundaryData { n: q.radius, kind: u.kind(), cells, values })
    }

    /// The data as a grid on `Q_N` with every other cell unset.
    pub fn to_grid(&self) -> GridFunction {
        let mut g = GridFunction::unset(Window::Standard(Square::centered(self.n)), self.kind);
        for (c, v) in self.cells.iter().zip(&self.values) {
            g.set(*c, v.clone()).expect("boundary cell in window");
        }
        g
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, c: Cell) -> Option<&Scalar> {
        self.cells.iter().position(|x| *x == c).map(|i| &self.values[i])
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Which side of `∂Q_N` a boundary cell lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Top,
    Bottom,
    Right,
    Left,
}

pub fn side_of(n: i64, y: Cell) -> Result<Side> {
    let on_h = y.m.abs() == n && y.n.abs() < n;
    let on_v = y.n.abs() == n && y.m.abs() < n;
    match (on_h, on_v) {
        (true, _) if y.m == n => Ok(Side::Top),
        (true, _) => Ok(Side::Bottom),
        (_, true) if y.n == n => Ok(Side::Right),
        (_, true) => Ok(Side::Left),
        _ => Err(Error::Precondition(format!("{y} is not a non-corner boundary cell of Q_{n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_sizes_and_sides() {
        for n in 1..6 {
            assert_eq!(BoundaryData::cells_of(n).len() as i64, 4 * (2 * n - 1));
        }
        assert_eq!(side_of(3, Cell::new(1, 3)).unwrap(), Side::Top);
        assert_eq!(side_of(3, Cell::new(-3, 2)).unwrap(), Side::Left);
        assert!(side_of(3, Cell::new(3, 3)).is_err());
        assert!(side_of(3, Cell::new(0, 0)).is_err());
    }

    #[test]
    fn grid_round_trip() {
        let d = BoundaryData::restrict(3, ScalarKind::Rational, |n, m| Scalar::integer(n * 10 + m)).unwrap();
        let g = d.to_grid();
        assert!(g.get(Cell::new(3, 3)).is_none());
        assert_eq!(BoundaryData::from_grid(&g).unwrap(), d);
    }
}
