// Good squares: maximal ones around a seed, a Vitali selection, and the
// search on a zero function and on a dense bad one.

use harmlab::goodrect::{check_cover, find_good_square, maximal_good_squares, sloped_q, vitali_select, GoodnessConfig, SearchOutcome};
use harmlab::lattice::GridFunction;
use harmlab::numeric::{Scalar, ScalarKind};

fn main() -> harmlab::Result<()> {
    let cfg = GoodnessConfig::default();
    let u = GridFunction::sloped(sloped_q(12), ScalarKind::Rational, |c| {
        Scalar::integer(if (c.s2 * 7 + c.k2 * 3).rem_euclid(23) == 0 { 7i64.pow(9) } else { 0 })
    })?;
    let fam = maximal_good_squares(&u, &sloped_q(10), &cfg, &sloped_q(3))?;
    println!("{} maximal good squares meet Q_3", fam.squares.len());
    let sel = vitali_select(&fam);
    let chk = check_cover(&fam, &sel)?;
    println!("Vitali picks {}: disjoint = {}, covered = {}", sel.squares.len(), chk.disjoint, chk.covered);

    let zero = GridFunction::sloped(sloped_q(100), ScalarKind::Rational, |_| Scalar::integer(0))?;
    if let SearchOutcome::Found { square, .. } = find_good_square(&zero, 100, &cfg)? {
        println!("U = 0, K = 100: good square {square}");
    }
    let dense = GridFunction::sloped(sloped_q(20), ScalarKind::Rational, |_| Scalar::integer(10))?;
    if let SearchOutcome::Absent { report } = find_good_square(&dense, 20, &cfg)? {
        println!("dense: {} of {} cells bad ({:.3})", report.bad_cells, report.total_cells, report.bad_fraction);
    }
    Ok(())
}
