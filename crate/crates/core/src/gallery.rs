//! Exact example functions.
//!
//! - `chelkak34`: `u(n, m) = sin(πn/2)·e^{bm}` with `e^b + e^{−b} = 4`, so
//!   `e^b = 2 + √3` and the function lives in `ℚ(√3)`. It is bounded by 1 on
//!   `(2ℤ × ℤ) ∪ (ℤ × ℤ₋)`, three quarters of the plane, and grows like
//!   `(2+√3)^K`.
//! - `eigen2d`: `u₀(x, y) = (−1)^x` on the diagonal `x = y`, zero elsewhere;
//!   `Δu₀ = −4u₀`.
//! - `lift3d`: `u(x, y, z) = c^z·u₀(x, y)` with `c + c⁻¹ = 6`, so
//!   `c = 3 + 2√2`; harmonic on `ℤ³` and zero off the plane `x = y`.
//! - `halfplane`: the half-plane construction with random rational seeds.
//!
//! Here `ℤ₋` includes 0.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::extension::{halfplane_construct, DiagonalSeed};
use crate::lattice::{laplacian_residual, Cell, GridFunction, Square};
use crate::numeric::{Quadratic, Scalar, ScalarKind};

/// Whether `ℤ₋` contains 0 in the bounded region of `chelkak34`.
pub const Z_MINUS_INCLUDES_ZERO: bool = true;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    Chelkak34,
    Halfplane,
    Eigen2d,
    Lift3d,
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleName::Chelkak34 => "chelkak34",
            ExampleName::Halfplane => "halfplane",
            ExampleName::Eigen2d => "eigen2d",
            ExampleName::Lift3d => "lift3d",
        })
    }
}

impl FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chelkak34" => Ok(ExampleName::Chelkak34),
            "halfplane" => Ok(ExampleName::Halfplane),
            "eigen2d" => Ok(ExampleName::Eigen2d),
            "lift3d" => Ok(ExampleName::Lift3d),
            _ => precondition(format!("unknown example {s:?}; expected chelkak34, halfplane, eigen2d or lift3d")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub name: ExampleName,
    /// Window radius: `Q_N` in 2D, the cube `[−N, N]³` in 3D.
    pub radius: i64,
    /// Seed of the random diagonal values (half-plane only).
    pub seed: u64,
    /// Number of free diagonals (half-plane only); 0 means all of them.
    pub diagonals: usize,
}

impl ExampleSpec {
    pub fn new(name: ExampleName, radius: i64) -> Self {
        ExampleSpec { name, radius, seed: 0, diagonals: 0 }
    }
}

/// A function on the cube `[−N, N]³`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid3Function {
    radius: i64,
    kind: ScalarKind,
    values: Vec<Scalar>,
}

impl Grid3Function {
    pub fn from_fn<F: FnMut(i64, i64, i64) -> Scalar>(radius: i64, kind: ScalarKind, mut f: F) -> Result<Self> {
        if radius < 0 {
            return precondition(format!("negative radius {radius}"));
        }
        let r = radius;
        let mut values = Vec::with_capacity(((2 * r + 1) as usize).pow(3));
        for z in -r..=r {
            for y in -r..=r {
                for x in -r..=r {
                    let v = f(x, y, z);
                    if v.kind() != kind {
                        return Err(crate::numeric::NumericError::KindMismatch(kind, v.kind()).into());
                    }
                    values.push(v);
                }
            }
        }
        Ok(Grid3Function { radius, kind, values })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    fn index(&self, x: i64, y: i64, z: i64) -> Option<usize> {
        let r = self.radius;
        if x.abs() > r || y.abs() > r || z.abs() > r {
            return None;
        }
        let side = 2 * r + 1;
        Some((((z + r) * side + (y + r)) * side + (x + r)) as usize)
    }

    pub fn get(&self, x: i64, y: i64, z: i64) -> Option<&Scalar> {
        self.index(x, y, z).map(|i| &self.values[i])
    }

    /// CSV rows `x,y,z,value` with `x` fastest.
    pub fn to_csv(&self) -> String {
        let r = self.radius;
        let mut out = String::from("x,y,z,value\n");
        let mut it = self.values.iter();
        for z in -r..=r {
            for y in -r..=r {
                for x in -r..=r {
                    out.push_str(&format!("{x},{y},{z},{}\n", it.next().expect("value")));
                }
            }
        }
        out
    }
}

/// Sum of the six neighbours minus `6u(x)`.
pub fn residual3(u: &Grid3Function, x: (i64, i64, i64)) -> Result<Scalar> {
    let (a, b, c) = x;
    if a.abs() >= u.radius || b.abs() >= u.radius || c.abs() >= u.radius {
        return Err(Error::OutOfWindow(format!("({a},{b},{c}) lacks a neighbour in the cube of radius {}", u.radius)));
    }
    let at = |x: i64, y: i64, z: i64| u.get(x, y, z).expect("inside cube");
    let mut acc = at(a, b, c).checked_mul(&Scalar::from_i64(-6, u.kind))?;
    for (dx, dy, dz) in [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)] {
        acc = acc.checked_add(at(a + dx, b + dy, c + dz))?;
    }
    Ok(acc)
}

/// A built example: a planar grid or a cube.
#[derive(Clone, Debug, PartialEq)]
pub enum Example {
    Grid(GridFunction),
    Grid3(Grid3Function),
}

impl Example {
    pub fn grid(&self) -> Option<&GridFunction> {
        match self {
            Example::Grid(g) => Some(g),
            Example::Grid3(_) => None,
        }
    }

    pub fn grid3(&self) -> Option<&Grid3Function> {
        match self {
            Example::Grid3(g) => Some(g),
            Example::Grid(_) => None,
        }
    }
}

fn unit_powers(unit: &Quadratic, inverse: &Quadratic, r: i64) -> Vec<Scalar> {
    // Index m + r holds unit^m for m in [−r, r].
    let mut pos = vec![Scalar::from_quadratic(Quadratic::from_rational(BigRational::from_integer(BigInt::from(1)), unit.d))];
    let mut neg = pos.clone();
    for _ in 0..r {
        let p = pos.last().expect("power").as_quadratic().expect("quadratic").mul(unit).expect("same field");
        pos.push(Scalar::from_quadratic(p));
        let q = neg.last().expect("power").as_quadratic().expect("quadratic").mul(inverse).expect("same field");
        neg.push(Scalar::from_quadratic(q));
    }
    neg.into_iter().skip(1).rev().chain(pos).collect()
}

fn q_int(x: i64, y: i64, d: u64) -> Quadratic {
    Quadratic::new(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()), d).expect("square-free")
}

/// `e^b = 2 + √3`.
pub fn chelkak_base() -> Quadratic {
    q_int(2, 1, 3)
}

/// `c = 3 + 2√2`.
pub fn lift_base() -> Quadratic {
    q_int(3, 2, 2)
}

/// `sin(πn/2)·(2+√3)^m` on `Q_N`, exactly.
pub fn chelkak34(radius: i64) -> Result<GridFunction> {
    if radius < 0 {
        return precondition(format!("negative radius {radius}"));
    }
    let kind = ScalarKind::Quadratic(3);
    let pows = unit_powers(&chelkak_base(), &q_int(2, -1, 3), radius);
    let negs: Vec<Scalar> = pows.iter().map(Scalar::neg).collect();
    let zero = Scalar::zero(kind);
    GridFunction::standard(Square::centered(radius), kind, |c: Cell| match c.n.rem_euclid(4) {
        1 => pows[(c.m + radius) as usize].clone(),
        3 => negs[(c.m + radius) as usize].clone(),
        _ => zero.clone(),
    })
}

/// `true` on `(2ℤ × ℤ) ∪ (ℤ × ℤ₋)`, where `|chelkak34| ≤ 1`.
pub fn chelkak_bounded_region(c: Cell) -> bool {
    c.n.rem_euclid(2) == 0 || c.m < 0 || (Z_MINUS_INCLUDES_ZERO && c.m == 0)
}

/// `(−1)^x` on the diagonal, zero elsewhere.
pub fn eigen2d(radius: i64) -> Result<GridFunction> {
    GridFunction::standard(Square::centered(radius), ScalarKind::Rational, |c: Cell| {
        Scalar::integer(if c.n != c.m {
            0
        } else if c.n.rem_euclid(2) == 0 {
            1
        } else {
            -1
        })
    })
}

/// `(3+2√2)^z·u₀(x, y)` on the cube `[−N, N]³`.
pub fn lift3d(radius: i64) -> Result<Grid3Function> {
    let kind = ScalarKind::Quadratic(2);
    let pows = unit_powers(&lift_base(), &q_int(3, -2, 2), radius.max(0));
    let negs: Vec<Scalar> = pows.iter().map(Scalar::neg).collect();
    let zero = Scalar::zero(kind);
    Grid3Function::from_fn(radius, kind, |x, y, z| {
        if x != y {
            zero.clone()
        } else if x.rem_euclid(2) == 0 {
            pows[(z + radius) as usize].clone()
        } else {
            negs[(z + radius) as usize].clone()
        }
    })
}

/// Random seed values `±a/b` with `1 ≤ a, b ≤ 9`, never zero.
pub fn random_diagonal_seed<R: Rng>(radius: i64, diagonals: usize, rng: &mut R) -> Result<DiagonalSeed> {
    let d = if diagonals == 0 { (2 * radius).max(1) as usize } else { diagonals };
    let vals = (0..d)
        .map(|_| {
            let a = rng.random_range(1..=9i64);
            let b = rng.random_range(1..=9i64);
            Scalar::ratio(if rng.random::<bool>() { a } else { -a }, b)
        })
        .collect();
    DiagonalSeed::new(vals, radius)
}

pub fn build_example(spec: &ExampleSpec) -> Result<Example> {
    if spec.radius < 1 {
        return precondition(format!("example radius must be >= 1, got {}", spec.radius));
    }
    Ok(match spec.name {
        ExampleName::Chelkak34 => Example::Grid(chelkak34(spec.radius)?),
        ExampleName::Eigen2d => Example::Grid(eigen2d(spec.radius)?),
        ExampleName::Lift3d => Example::Grid3(lift3d(spec.radius)?),
        ExampleName::Halfplane => {
            let mut rng = crate::rng::seeded(spec.seed);
            Example::Grid(halfplane_construct(&random_diagonal_seed(spec.radius, spec.diagonals, &mut rng)?)?)
        }
    })
}

/// `Δu₀ = λ·u₀` exactly at every cell whose four neighbours are in the window.
pub fn check_eigen(u0: &GridFunction, lambda: &Scalar) -> Result<bool> {
    let q = u0.square().ok_or_else(|| Error::Precondition("check_eigen needs standard coordinates".into()))?;
    if q.radius < 1 {
        return precondition("the window has no interior cells");
    }
    let lambda = lambda.convert(u0.kind())?;
    let inner = Square { center: q.center, radius: q.radius - 1 };
    for c in inner.cells() {
        let lhs = laplacian_residual(u0, c)?;
        let rhs = lambda.checked_mul(u0.at(c)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{is_harmonic, portion_below};
    use crate::numeric::{ToleranceProfile, q};
    use std::cmp::Ordering;

    #[test]
    fn chelkak_examples() {
        let u = chelkak34(6).unwrap();
        assert_eq!(u.at(Cell::new(1, 1)).unwrap(), &Scalar::from_quadratic(chelkak_base()));
        assert!(u.at(Cell::new(2, 5)).unwrap().is_zero());
        assert_eq!(u.at(Cell::new(-1, 2)).unwrap(), &Scalar::from_quadratic(chelkak_base().pow(2).neg()));
        assert_eq!(u.at(Cell::new(1, -1)).unwrap(), &Scalar::from_quadratic(q_int(2, -1, 3)));
        assert!(is_harmonic(&u, &ToleranceProfile::exact()).unwrap().harmonic);
    }

    #[test]
    fn chelkak_bounded_on_three_quarters() {
        let u = chelkak34(12).unwrap();
        let one = Scalar::integer(1).convert(ScalarKind::Quadratic(3)).unwrap();
        for c in Square::centered(12).cells() {
            let small = u.at(c).unwrap().cmp_abs(&one).unwrap() != Ordering::Greater;
            assert_eq!(small, chelkak_bounded_region(c), "{c}");
        }
        let p = portion_below(&u, &Scalar::integer(1), &Square::centered(12)).unwrap();
        // Bad cells: odd n (12 values) times positive m (12 values).
        assert_eq!(p, BigRational::from_integer(1.into()) - q(144, 625));
    }

    #[test]
    fn lift_examples() {
        let u = lift3d(3).unwrap();
        assert_eq!(u.get(1, 1, 1).unwrap(), &Scalar::from_quadratic(lift_base().neg()));
        assert!(u.get(1, 2, 0).unwrap().is_zero());
        for z in -2..=2 {
            for y in -2..=2 {
                for x in -2..=2 {
                    assert!(residual3(&u, (x, y, z)).unwrap().is_zero());
                }
            }
        }
        assert!(residual3(&u, (3, 0, 0)).is_err());
    }

    #[test]
    fn residual3_examples() {
        let one = Grid3Function::from_fn(2, ScalarKind::Rational, |_, _, _| Scalar::integer(1)).unwrap();
        assert!(residual3(&one, (0, 0, 0)).unwrap().is_zero());
        let sq = Grid3Function::from_fn(2, ScalarKind::Rational, |_, _, z| Scalar::integer(z * z)).unwrap();
        assert_eq!(residual3(&sq, (1, 0, -1)).unwrap(), Scalar::integer(2));
    }

    #[test]
    fn eigen_examples() {
        let u0 = eigen2d(5).unwrap();
        assert!(check_eigen(&u0, &Scalar::integer(-4)).unwrap());
        assert!(!check_eigen(&u0, &Scalar::integer(0)).unwrap());
        let one = GridFunction::standard(Square::centered(3), ScalarKind::Rational, |_| Scalar::integer(1)).unwrap();
        assert!(check_eigen(&one, &Scalar::integer(0)).unwrap());
    }

    #[test]
    fn halfplane_example_is_seeded() {
        let spec = ExampleSpec { name: ExampleName::Halfplane, radius: 5, seed: 9, diagonals: 0 };
        let a = build_example(&spec).unwrap();
        assert_eq!(a, build_example(&spec).unwrap());
        let g = a.grid().unwrap();
        assert!(is_harmonic(g, &ToleranceProfile::exact()).unwrap().harmonic);
        assert!(g.at(Cell::new(2, 2)).unwrap().is_zero());
        assert!(!g.at(Cell::new(0, 1)).unwrap().is_zero());
    }

    #[test]
    fn names_parse() {
        for n in ["chelkak34", "halfplane", "eigen2d", "lift3d"] {
            assert_eq!(n.parse::<ExampleName>().unwrap().to_string(), n);
        }
        assert!("torus".parse::<ExampleName>().is_err());
    }
}
