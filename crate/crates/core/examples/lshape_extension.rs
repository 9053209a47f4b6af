// Extend data from two bottom lines and two left columns to a sloped
// rectangle, check the 7^(a+b) growth bounds and the line polynomials of a
// zero-bottom extension.

use harmlab::extension::{check_seven_bounds, extend_lshape, line_polynomial, random_lshape};
use harmlab::lattice::{is_harmonic, SlopedRect};
use harmlab::numeric::ToleranceProfile;

fn main() -> harmlab::Result<()> {
    let mut rng = harmlab::rng::seeded(5);
    let rect = SlopedRect::from_doubled(0, 12, 0, 8)?;
    let data = random_lshape(rect, 6, false, &mut rng)?;
    let u = extend_lshape(&data)?;
    println!("extension to {rect}: harmonic = {}", is_harmonic(&u, &ToleranceProfile::exact())?.harmonic);
    let rep = check_seven_bounds(&data, &u)?;
    println!("global bound holds: {}, cellwise violations: {}", rep.global_holds, rep.cellwise_violations);

    let flat = SlopedRect::from_doubled(0, 30, 0, 6)?;
    let zb = random_lshape(flat, 6, true, &mut rng)?;
    let v = extend_lshape(&zb)?;
    for k2 in 2..=6 {
        let lp = line_polynomial(&v, &flat, k2)?;
        println!("line k = {}: degree <= {}, coefficients {}", lp.k, lp.degree_bound, lp.poly);
    }
    Ok(())
}
