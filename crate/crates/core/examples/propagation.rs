// Propagation of smallness along a horizontal line, with the certified
// bound compared to the true maximum, and the three-square fit.

use harmlab::dirichlet::BoundaryData;
use harmlab::gallery::chelkak34;
use harmlab::propagation::{propagate_smallness, three_circle_report, ThreeCircleMode};

fn main() -> harmlab::Result<()> {
    let data = BoundaryData::random_signs(64, &mut harmlab::rng::seeded(7))?;
    let rep = propagate_smallness(&data, 0, 1.0, 0.00006, &[0])?;
    println!("{}", harmlab::propagation::PropagationReport::csv_header());
    println!("{}", rep.csv_row());

    let u = chelkak34(32)?;
    let tc = three_circle_report(&u, 32, 1.0, ThreeCircleMode::Fit { c: 2.0 })?;
    println!("three squares on chelkak34, N = 32: fitted alpha = {:?}", tc.alpha_hat);
    Ok(())
}
