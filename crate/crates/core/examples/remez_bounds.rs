// Certified polynomial maxima against continuous and discrete Remez bounds.

use harmlab::remez::{poly_max, remez_bound, remez_bound_discrete, Interval, Polynomial};
use num_rational::BigRational;

fn main() -> harmlab::Result<()> {
    let p = Polynomial::parse("0,0,1")?;
    let iv = Interval::from_i64(0, 10)?;
    let pts: Vec<BigRational> = (0..=5).map(|x| BigRational::from_integer(x.into())).collect();
    let bound = remez_bound_discrete(&p, &iv, &pts, &BigRational::from_integer(25.into()))?;
    println!("coefficients {p} on {iv}: max = {}, discrete bound from 0..5 = {bound}", poly_max(&p, &iv)?.value);

    let q = Polynomial::parse("1,-3,0,1/2")?;
    let iv = Interval::from_i64(-4, 4)?;
    let e = [Interval::from_i64(-1, 1)?];
    let m = poly_max(&q, &iv)?;
    println!("coefficients {q} on {iv}: max = {} at {}", m.value, m.at);
    println!("continuous bound from sup on {} = {}", e[0], remez_bound(&q, &iv, &e, None)?);
    Ok(())
}
