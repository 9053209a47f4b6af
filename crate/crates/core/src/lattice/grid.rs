//! Dense storage of scalar values on a finite window.

use serde::{Deserialize, Serialize};

use super::{Cell, SlopedCell, SlopedRect, Square};
use crate::error::{Error, Result};
use crate::numeric::{Scalar, ScalarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Window {
    Standard(Square),
    Sloped(SlopedRect),
}

/// A point of either lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Std(Cell),
    Sloped(SlopedCell),
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Std(c) => write!(f, "{c}"),
            Point::Sloped(p) => write!(f, "{p}"),
        }
    }
}

impl Window {
    pub fn is_sloped(&self) -> bool {
        matches!(self, Window::Sloped(_))
    }

    pub fn cell_count(&self) -> usize {
        match self {
            Window::Standard(q) => q.cell_count(),
            Window::Sloped(r) => r.cell_count(),
        }
    }

    /// Points in storage order: `m`/`k` outer, `n`/`s` inner.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Window::Standard(q) => q.cells().map(Point::Std).collect(),
            Window::Sloped(r) => r.cells().map(Point::Sloped).collect(),
        }
    }
}

/// Values of a function on a window, one scalar kind throughout. Entries
/// may be unset (for instance the corners of a Dirichlet square).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    window: Window,
    kind: ScalarKind,
    values: Vec<Option<Scalar>>,
    /// Start of each sloped row in `values`, with its first doubled `s`.
    rows: Vec<(usize, i64)>,
}

fn sloped_rows(r: &SlopedRect) -> Vec<(usize, i64)> {
    let mut rows = Vec::new();
    let mut offset = 0;
    for k2 in r.b1.doubled()..=r.b2.doubled() {
        let line = r.line(k2);
        let first = line.first().map(|c| c.s2).unwrap_or(i64::MAX);
        rows.push((offset, first));
        offset += line.len();
    }
    rows
}

impl GridFunction {
    pub fn from_values(window: Window, kind: ScalarKind, values: Vec<Option<Scalar>>) -> Result<Self> {
        if values.len() != window.cell_count() {
            return Err(Error::Format(format!(
                "window holds {} cells but {} values were given",
                window.cell_count(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().flatten().find(|v| v.kind() != kind) {
            return Err(Error::Format(format!("value of kind {} in a {kind} grid", bad.kind())));
        }
        let rows = match &window {
            Window::Sloped(r) => sloped_rows(r),
            Window::Standard(_) => Vec::new(),
        };
        Ok(GridFunction { window, kind, values, rows })
    }

    pub fn unset(window: Window, kind: ScalarKind) -> Self {
        let n = window.cell_count();
        GridFunction::from_values(window, kind, vec![None; n]).expect("sized")
    }

    pub fn standard<F: FnMut(Cell) -> Scalar>(q: Square, kind: ScalarKind, mut f: F) -> Result<Self> {
        let values = q.cells().map(|c| Some(f(c))).collect();
        GridFunction::from_values(Window::Standard(q), kind, values)
    }

    pub fn sloped<F: FnMut(SlopedCell) -> Scalar>(r: SlopedRect, kind: ScalarKind, mut f: F) -> Result<Self> {
        let values = r.cells().map(|c| Some(f(c))).collect();
        GridFunction::from_values(Window::Sloped(r), kind, values)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn values(&self) -> &[Option<Scalar>] {
        &self.values
    }

    pub fn square(&self) -> Option<Square> {
        match self.window {
            Window::Standard(q) => Some(q),
            Window::Sloped(_) => None,
        }
    }

    pub fn rect(&self) -> Option<SlopedRect> {
        match self.window {
            Window::Sloped(r) => Some(r),
            Window::Standard(_) => None,
        }
    }

    pub fn index_of(&self, p: Point) -> Option<usize> {
        match (p, &self.window) {
            (Point::Std(c), Window::Standard(q)) => q.index_of(c),
            (Point::Sloped(c), Window::Sloped(r)) => {
                if !r.contains(c) {
                    return None;
                }
                let (offset, first) = self.rows[(c.k2 - r.b1.doubled()) as usize];
                Some(offset + ((c.s2 - first) / 2) as usize)
            }
            _ => None,
        }
    }

    /// The value at a standard cell, `None` outside the window or unset.
    pub fn get(&self, c: Cell) -> Option<&Scalar> {
        self.index_of(Point::Std(c)).and_then(|i| self.values[i].as_ref())
    }

    pub fn get_sloped(&self, c: SlopedCell) -> Option<&Scalar> {
        self.index_of(Point::Sloped(c)).and_then(|i| self.values[i].as_ref())
    }

    pub fn get_point(&self, p: Point) -> Option<&Scalar> {
        self.index_of(p).and_then(|i| self.values[i].as_ref())
    }

    /// Like [`get`](Self::get) but an error when missing.
    pub fn at(&self, c: Cell) -> Result<&Scalar> {
        self.get(c).ok_or_else(|| Error::OutOfWindow(format!("no value at {c}")))
    }

    pub fn at_sloped(&self, c: SlopedCell) -> Result<&Scalar> {
        self.get_sloped(c).ok_or_else(|| Error::OutOfWindow(format!("no value at {c}")))
    }

    pub fn set_point(&mut self, p: Point, v: Option<Scalar>) -> Result<()> {
        if let Some(s) = &v {
            if s.kind() != self.kind {
                return Err(Error::Numeric(crate::numeric::NumericError::KindMismatch(self.kind, s.kind())));
            }
        }
        let i = self.index_of(p).ok_or_else(|| Error::OutOfWindow(format!("{p} outside window")))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn set(&mut self, c: Cell, v: Scalar) -> Result<()> {
        self.set_point(Point::Std(c), Some(v))
    }

    pub fn set_sloped(&mut self, c: SlopedCell, v: Scalar) -> Result<()> {
        self.set_point(Point::Sloped(c), Some(v))
    }

    /// `(point, value)` pairs in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (Point, Option<&Scalar>)> + '_ {
        self.window.points().into_iter().zip(self.values.iter().map(Option::as_ref))
    }

    /// A copy with every set value mapped through `f`.
    pub fn map<F: FnMut(&Scalar) -> Scalar>(&self, kind: ScalarKind, mut f: F) -> Result<GridFunction> {
        let values = self.values.iter().map(|v| v.as_ref().map(&mut f)).collect();
        GridFunction::from_values(self.window, kind, values)
    }

    /// Largest absolute value over the set entries of a sub-square.
    pub fn max_abs_on(&self, q: &Square) -> Result<Scalar> {
        let mut vals = Vec::with_capacity(q.cell_count());
        for c in q.cells() {
            vals.push(self.at(c)?);
        }
        Ok(Scalar::max_abs(vals)?.unwrap_or_else(|| Scalar::zero(self.kind)))
    }

    /// Largest absolute value over all set entries.
    pub fn max_abs(&self) -> Result<Scalar> {
        Ok(Scalar::max_abs(self.values.iter().flatten())?.unwrap_or_else(|| Scalar::zero(self.kind)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sloped_indexing_is_dense() {
        let r = SlopedRect::from_doubled(-3, 4, -2, 5).unwrap();
        let g = GridFunction::sloped(r, ScalarKind::Rational, |c| Scalar::integer(c.s2 * 100 + c.k2)).unwrap();
        for (i, c) in r.cells().enumerate() {
            assert_eq!(g.index_of(Point::Sloped(c)), Some(i));
            assert_eq!(g.get_sloped(c), Some(&Scalar::integer(c.s2 * 100 + c.k2)));
        }
        assert_eq!(g.get_sloped(SlopedCell { s2: 6, k2: 0 }), None);
    }

    #[test]
    fn kind_is_enforced() {
        let q = Square::centered(1);
        let mut g = GridFunction::unset(Window::Standard(q), ScalarKind::Rational);
        assert!(g.set(Cell::new(0, 0), Scalar::one(ScalarKind::Float(53))).is_err());
        assert!(g.set(Cell::new(2, 0), Scalar::integer(1)).is_err());
        g.set(Cell::new(1, 1), Scalar::integer(5)).unwrap();
        assert_eq!(g.at(Cell::new(1, 1)).unwrap(), &Scalar::integer(5));
        assert!(g.at(Cell::new(0, 0)).is_err());
    }

    #[test]
    fn max_abs_exact() {
        let q = Square::centered(2);
        let g = GridFunction::standard(q, ScalarKind::Rational, |c| Scalar::integer(c.n - 3 * c.m)).unwrap();
        assert_eq!(g.max_abs().unwrap(), Scalar::integer(8));
        assert_eq!(g.max_abs_on(&Square::centered(1)).unwrap(), Scalar::integer(4));
    }
}
