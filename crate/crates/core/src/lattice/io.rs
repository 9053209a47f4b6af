//! JSON and CSV forms of grid functions.
//!
//! JSON: `{"coords", "window", "scalar_kind", "values"}` with values as
//! strings in the scalar grammar (`null` for unset cells) in storage order.
//! CSV: one `n,m,value` (or `s,k,value`) row per set cell in storage order.
//! Lines starting with `#` are comments. Both forms round-trip exactly.

use serde::{Deserialize, Serialize, Serializer};

use super::{Cell, GridFunction, HalfInt, Point, SlopedCell, Window};
use crate::error::{Error, Result};
use crate::numeric::{parse_kind, parse_scalar, Scalar};

pub(crate) fn ser_scalars<S: Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Serialize, Deserialize)]
pub struct GridFile {
    pub coords: String,
    pub window: Window,
    pub scalar_kind: String,
    pub values: Vec<Option<String>>,
}

impl GridFile {
    pub fn from_grid(u: &GridFunction) -> Self {
        GridFile {
            coords: if u.window().is_sloped() { "sloped" } else { "standard" }.into(),
            window: *u.window(),
            scalar_kind: u.kind().to_string(),
            values: u.values().iter().map(|v| v.as_ref().map(|s| s.to_string())).collect(),
        }
    }

    pub fn to_grid(&self) -> Result<GridFunction> {
        let kind = parse_kind(&self.scalar_kind)?;
        let expect = if self.window.is_sloped() { "sloped" } else { "standard" };
        if self.coords != expect {
            return Err(Error::Format(format!("coords {:?} disagree with a {expect} window", self.coords)));
        }
        let values = self
            .values
            .iter()
            .map(|v| v.as_deref().map(|t| parse_scalar(t, kind)).transpose())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        GridFunction::from_values(self.window, kind, values)
    }
}

impl GridFunction {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GridFile::from_grid(self)).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GridFile::from_grid(self)).expect("serializable")
    }

    /// Reads a grid from JSON. Extra top-level keys (such as a `header`
    /// block) are ignored.
    pub fn from_json(text: &str) -> Result<GridFunction> {
        let file: GridFile = serde_json::from_str(text)?;
        file.to_grid()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.window().is_sloped() { "s,k,value\n" } else { "n,m,value\n" });
        for (p, v) in self.entries() {
            let Some(v) = v else { continue };
            match p {
                Point::Std(c) => out.push_str(&format!("{},{},{}\n", c.n, c.m, v)),
                Point::Sloped(c) => out.push_str(&format!("{},{},{}\n", c.s(), c.k(), v)),
            }
        }
        out
    }

    /// Reads CSV rows into `window`; cells without a row stay unset.
    pub fn from_csv(text: &str, window: Window, kind: crate::numeric::ScalarKind) -> Result<GridFunction> {
        let mut g = GridFunction::unset(window, kind);
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                header_seen = true;
                if line.starts_with("n,") || line.starts_with("s,") {
                    continue;
                }
            }
            let mut parts = line.splitn(3, ',');
            let (a, b, v) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(v)) => (a, b, v),
                _ => return Err(Error::Format(format!("line {}: expected three fields", lineno + 1))),
            };
            let value = parse_scalar(v, kind)?;
            let p = if window.is_sloped() {
                let s: HalfInt = a.parse()?;
                let k: HalfInt = b.parse()?;
                Point::Sloped(SlopedCell::new(s, k)?)
            } else {
                let n = a.trim().parse().map_err(|_| Error::Format(format!("line {}: bad n", lineno + 1)))?;
                let m = b.trim().parse().map_err(|_| Error::Format(format!("line {}: bad m", lineno + 1)))?;
                Point::Std(Cell::new(n, m))
            };
            g.set_point(p, Some(value))?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{SlopedRect, Square};
    use crate::numeric::{q, ScalarKind};

    #[test]
    fn json_round_trip_with_unset_cells() {
        let mut g = GridFunction::standard(Square::centered(2), ScalarKind::Quadratic(3), |c| {
            Scalar::quadratic(q(c.n, 3), q(c.m, 7), 3).unwrap()
        })
        .unwrap();
        g.set_point(Point::Std(Cell::new(2, 2)), None).unwrap();
        let back = GridFunction::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), g.to_json());
    }

    #[test]
    fn csv_round_trip_sloped() {
        let r = SlopedRect::from_doubled(-1, 3, 0, 2).unwrap();
        let g = GridFunction::sloped(r, ScalarKind::Float(80), |c| {
            Scalar::rational(q(c.s2 * 7 + 1, 3)).to_float(80).unwrap()
        })
        .unwrap();
        let csv = g.to_csv();
        assert!(csv.lines().nth(1).unwrap().starts_with("-1/2,1/2,") || csv.contains("/2"));
        let back = GridFunction::from_csv(&csv, *g.window(), g.kind()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(GridFunction::from_json("{}").is_err());
        let w = Window::Standard(Square::centered(1));
        assert!(GridFunction::from_csv("n,m,value\n0,0\n", w, ScalarKind::Rational).is_err());
        assert!(GridFunction::from_csv("n,m,value\n5,0,1\n", w, ScalarKind::Rational).is_err());
    }
}
