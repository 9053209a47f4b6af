// sin(πn/2)·(2+√3)^m: exact harmonicity, the 3/4 bounded portion and
// exponential growth of M(K).

use harmlab::gallery::chelkak34;
use harmlab::lattice::{doubling_report, growth_profile, is_harmonic, portion_below, Square};
use harmlab::numeric::{Scalar, ToleranceProfile};

fn main() -> harmlab::Result<()> {
    let u = chelkak34(40)?;
    println!("harmonic on Q_40: {}", is_harmonic(&u, &ToleranceProfile::exact())?.harmonic);
    let p = portion_below(&u, &Scalar::integer(1), &Square::centered(40))?;
    println!("portion with |u| <= 1 on Q_40: {p} = {:.4}", Scalar::rational(p.clone()).to_f64());

    let radii: Vec<i64> = (1..=40).collect();
    let prof = growth_profile(&u, &radii)?;
    println!("fitted slope of ln M(K), K in [10, 20]: {:.10}", prof.log_slope(10, 20).unwrap_or(f64::NAN));
    println!("ln(2+sqrt 3)                        = {:.10}", (2.0 + 3f64.sqrt()).ln());
    for row in doubling_report(&prof, 1.3)?.iter().take(5) {
        println!("K = {:>2}: ln M(K) = {:>8.4}, ln M(2K) = {:>8.4}, {:?}", row.k, row.ln_m_k, row.ln_m_2k, row.branch);
    }
    Ok(())
}
