//! Lattice geometry in standard `(n, m)` and sloped `(s, k)` coordinates.
//!
//! The sloped lattice is the set of half-integer pairs with `s + k` an
//! integer, linked to the standard lattice by `n = s + k`, `m = s − k`.
//! Sloped coordinates are stored doubled so that all indexing is integral.

pub mod grid;
pub mod io;
pub mod measure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::{GridFunction, Point, Window};
pub use measure::{
    doubling_report, growth_profile, is_harmonic, laplacian_residual, portion_below, sloped_residual, to_sloped,
    from_sloped, DoublingBranch, DoublingRow, GrowthProfile, HarmonicityReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub n: i64,
    pub m: i64,
}

impl Cell {
    pub const fn new(n: i64, m: i64) -> Self {
        Cell { n, m }
    }

    pub fn neighbors(self) -> [Cell; 4] {
        [
            Cell::new(self.n + 1, self.m),
            Cell::new(self.n - 1, self.m),
            Cell::new(self.n, self.m + 1),
            Cell::new(self.n, self.m - 1),
        ]
    }

    /// Sup-norm distance.
    pub fn dist(self, other: Cell) -> i64 {
        (self.n - other.n).abs().max((self.m - other.m).abs())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// A multiple of one half, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_doubled(d: i64) -> Self {
        HalfInt(d)
    }

    pub const fn int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Format(format!("not a half-integer: {s:?}"));
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            match q.trim() {
                "2" => Ok(HalfInt(p)),
                "1" => Ok(HalfInt(2 * p)),
                _ => Err(bad()),
            }
        } else if let Some((i, frac)) = t.split_once('.') {
            let neg = i.starts_with('-');
            let i: i64 = i.parse().map_err(|_| bad())?;
            let half = match frac {
                "0" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            Ok(HalfInt(2 * i + if neg { -half } else { half }))
        } else {
            Ok(HalfInt(2 * t.parse::<i64>().map_err(|_| bad())?))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A cell of the sloped lattice, `(s, k)` with `s + k` an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopedCell {
    pub s2: i64,
    pub k2: i64,
}

impl SlopedCell {
    pub fn new(s: HalfInt, k: HalfInt) -> Result<Self> {
        SlopedCell::from_doubled(s.doubled(), k.doubled())
    }

    pub fn from_doubled(s2: i64, k2: i64) -> Result<Self> {
        if (s2 + k2).rem_euclid(2) != 0 {
            return Err(Error::Precondition(format!(
                "({}, {}) is not on the sloped lattice: s + k must be an integer",
                HalfInt(s2),
                HalfInt(k2)
            )));
        }
        Ok(SlopedCell { s2, k2 })
    }

    pub fn s(self) -> HalfInt {
        HalfInt(self.s2)
    }

    pub fn k(self) -> HalfInt {
        HalfInt(self.k2)
    }

    pub fn from_cell(c: Cell) -> Self {
        SlopedCell { s2: c.n + c.m, k2: c.n - c.m }
    }

    pub fn to_cell(self) -> Cell {
        Cell::new((self.s2 + self.k2) / 2, (self.s2 - self.k2) / 2)
    }

    /// Shift by doubled offsets; parity of the sum must be preserved.
    pub fn shifted(self, ds2: i64, dk2: i64) -> SlopedCell {
        debug_assert_eq!((ds2 + dk2).rem_euclid(2), 0);
        SlopedCell { s2: self.s2 + ds2, k2: self.k2 + dk2 }
    }

    /// `(−1)^{s+k}`.
    pub fn parity_sign(self) -> i64 {
        if ((self.s2 + self.k2) / 2).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for SlopedCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s(), self.k())
    }
}

/// The square `Q_N(c)` of cells within sup-distance `radius` of `center`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Square {
    pub center: Cell,
    pub radius: i64,
}

impl Square {
    pub fn new(center: Cell, radius: i64) -> Result<Self> {
        if radius < 0 {
            return Err(Error::Precondition(format!("negative radius {radius}")));
        }
        Ok(Square { center, radius })
    }

    /// `Q_N` about the origin.
    pub fn centered(radius: i64) -> Self {
        Square { center: Cell::new(0, 0), radius: radius.max(0) }
    }

    pub fn side(&self) -> i64 {
        2 * self.radius + 1
    }

    pub fn cell_count(&self) -> usize {
        (self.side() * self.side()) as usize
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.center.dist(c) <= self.radius
    }

    pub fn contains_square(&self, other: &Square) -> bool {
        self.center.dist(other.center) + other.radius <= self.radius
    }

    /// Cells with `m` outer and `n` inner, both increasing.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let (n0, m0, r) = (self.center.n, self.center.m, self.radius);
        (m0 - r..=m0 + r).flat_map(move |m| (n0 - r..=n0 + r).map(move |n| Cell::new(n, m)))
    }

    pub fn index_of(&self, c: Cell) -> Option<usize> {
        if !self.contains(c) {
            return None;
        }
        let col = c.n - (self.center.n - self.radius);
        let row = c.m - (self.center.m - self.radius);
        Some((row * self.side() + col) as usize)
    }

    /// Cells with `max(|Δn|, |Δm|) = radius`.
    pub fn ring(&self) -> Vec<Cell> {
        self.cells().filter(|c| self.center.dist(*c) == self.radius).collect()
    }

    /// Boundary without the four corners, where Dirichlet data lives.
    pub fn boundary_without_corners(&self) -> Vec<Cell> {
        let (cn, cm, r) = (self.center.n, self.center.m, self.radius);
        self.ring()
            .into_iter()
            .filter(|c| (c.n - cn).abs() != (c.m - cm).abs() || r == 0)
            .collect()
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{}{}", self.radius, self.center)
    }
}

/// The sloped rectangle `{a1 ≤ s ≤ a2, b1 ≤ k ≤ b2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlopedRect {
    pub a1: HalfInt,
    pub a2: HalfInt,
    pub b1: HalfInt,
    pub b2: HalfInt,
}

impl SlopedRect {
    pub fn new(a1: HalfInt, a2: HalfInt, b1: HalfInt, b2: HalfInt) -> Result<Self> {
        if a1 > a2 || b1 > b2 {
            return Err(Error::Precondition(format!("empty sloped rectangle [{a1},{a2}]x[{b1},{b2}]")));
        }
        Ok(SlopedRect { a1, a2, b1, b2 })
    }

    pub fn from_doubled(a1: i64, a2: i64, b1: i64, b2: i64) -> Result<Self> {
        SlopedRect::new(HalfInt(a1), HalfInt(a2), HalfInt(b1), HalfInt(b2))
    }

    /// Side length `a(R) = a2 − a1 + 1/2`.
    pub fn a(&self) -> HalfInt {
        self.a2 - self.a1 + HalfInt(1)
    }

    /// Side length `b(R) = b2 − b1 + 1/2`.
    pub fn b(&self) -> HalfInt {
        self.b2 - self.b1 + HalfInt(1)
    }

    pub fn is_square(&self) -> bool {
        self.a() == self.b()
    }

    /// Doubled center coordinates `(a1 + a2, b1 + b2)`, i.e. four times the center.
    pub fn center_x4(&self) -> (i64, i64) {
        (self.a1.0 + self.a2.0, self.b1.0 + self.b2.0)
    }

    pub fn contains(&self, p: SlopedCell) -> bool {
        (self.a1.0..=self.a2.0).contains(&p.s2) && (self.b1.0..=self.b2.0).contains(&p.k2)
    }

    pub fn contains_rect(&self, o: &SlopedRect) -> bool {
        self.a1 <= o.a1 && o.a2 <= self.a2 && self.b1 <= o.b1 && o.b2 <= self.b2
    }

    /// First doubled `s` of row `k2` (parity matched), and the row length.
    fn row_span(&self, k2: i64) -> (i64, usize) {
        let mut first = self.a1.0;
        if (first + k2).rem_euclid(2) != 0 {
            first += 1;
        }
        let len = if first > self.a2.0 { 0 } else { ((self.a2.0 - first) / 2 + 1) as usize };
        (first, len)
    }

    /// Cells on the line `k = k2/2` inside the rectangle, by increasing `s`.
    pub fn line(&self, k2: i64) -> Vec<SlopedCell> {
        if !(self.b1.0..=self.b2.0).contains(&k2) {
            return Vec::new();
        }
        let (first, len) = self.row_span(k2);
        (0..len as i64).map(|i| SlopedCell { s2: first + 2 * i, k2 }).collect()
    }

    /// Cells with `k` outer and `s` inner, both increasing.
    pub fn cells(&self) -> impl Iterator<Item = SlopedCell> + '_ {
        (self.b1.0..=self.b2.0).flat_map(move |k2| self.line(k2))
    }

    pub fn cell_count(&self) -> usize {
        (self.b1.0..=self.b2.0).map(|k2| self.row_span(k2).1).sum()
    }

    /// Cells present in both rectangles.
    pub fn intersect(&self, o: &SlopedRect) -> Option<SlopedRect> {
        let r = SlopedRect {
            a1: self.a1.max(o.a1),
            a2: self.a2.min(o.a2),
            b1: self.b1.max(o.b1),
            b2: self.b2.min(o.b2),
        };
        if r.a1 > r.a2 || r.b1 > r.b2 || r.cell_count() == 0 {
            None
        } else {
            Some(r)
        }
    }

    /// The smallest sloped rectangle containing `Q`.
    pub fn bounding(q: &Square) -> SlopedRect {
        let c = SlopedCell::from_cell(q.center);
        let r2 = 2 * q.radius;
        SlopedRect { a1: HalfInt(c.s2 - r2), a2: HalfInt(c.s2 + r2), b1: HalfInt(c.k2 - r2), b2: HalfInt(c.k2 + r2) }
    }

    /// The largest square contained in the rectangle, if the center maps to
    /// a lattice cell (ties resolved towards the lower-left).
    pub fn inscribed_square(&self) -> Option<Square> {
        // Candidate centers: integer (n, m) with s, k near the middle.
        let (sx4, kx4) = self.center_x4();
        let mut best: Option<Square> = None;
        for ds in -2..=2i64 {
            for dk in -2..=2i64 {
                let s2 = sx4.div_euclid(2) + ds;
                let k2 = kx4.div_euclid(2) + dk;
                if (s2 + k2).rem_euclid(2) != 0 {
                    continue;
                }
                let c = SlopedCell { s2, k2 };
                if !self.contains(c) {
                    continue;
                }
                // Q_r(c) fits iff |Δs| + ... : in doubled units s ranges ±2r.
                let room = [s2 - self.a1.0, self.a2.0 - s2, k2 - self.b1.0, self.b2.0 - k2]
                    .into_iter()
                    .min()
                    .unwrap_or(0);
                let sq = Square { center: c.to_cell(), radius: room / 2 };
                if best.is_none_or(|b| sq.radius > b.radius) {
                    best = Some(sq);
                }
            }
        }
        best
    }
}

impl fmt::Display for SlopedRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R[{},{}]x[{},{}]", self.a1, self.a2, self.b1, self.b2)
    }
}
