//! Empirical constant of the discrete gradient estimate
//! `|u(q) − u(q′)| ≤ C·max_{Q_{2R}}|u| / R`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lattice::{Cell, GridFunction, Square};
use crate::numeric::Scalar;

/// `max |u(q) − u(q′)| · R / max_{Q_{2R}} |u|` over neighbouring `q, q′ ∈ Q_R`
/// (squares centered at the window center). Zero when `u` vanishes on
/// `Q_{2R}`. Exact for exact kinds.
pub fn gradient_ratio(u: &GridFunction, r: i64) -> Result<Scalar> {
    let win = u.square().ok_or_else(|| Error::Precondition("gradient ratio needs standard coordinates".into()))?;
    if r < 1 {
        return Err(Error::Precondition(format!("gradient ratio needs R >= 1, got {r}")));
    }
    let outer = Square { center: win.center, radius: 2 * r };
    if !win.contains_square(&outer) {
        return Err(Error::OutOfWindow(format!("Q_{} not inside the window", 2 * r)));
    }
    let inner = Square { center: win.center, radius: r };
    let mut best: Option<Scalar> = None;
    for c in inner.cells() {
        for nb in [Cell::new(c.n + 1, c.m), Cell::new(c.n, c.m + 1)] {
            if !inner.contains(nb) {
                continue;
            }
            let d = u.at(c)?.checked_sub(u.at(nb)?)?;
            if best.as_ref().is_none_or(|b| d.cmp_abs(b).is_ok_and(|o| o == Ordering::Greater)) {
                best = Some(d);
            }
        }
    }
    let m = u.max_abs_on(&outer)?;
    let Some(best) = best else { return Ok(Scalar::zero(u.kind())) };
    if m.is_zero() {
        return Ok(Scalar::zero(u.kind()));
    }
    let rr = Scalar::from_i64(r, u.kind());
    Ok(best.abs().checked_mul(&rr)?.checked_div(&m.convert(u.kind())?)?)
}
