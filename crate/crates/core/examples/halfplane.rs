// A harmonic function vanishing on the half-plane n >= m, built from
// values on the first few diagonals.

use harmlab::extension::{halfplane_construct, DiagonalSeed};
use harmlab::lattice::{is_harmonic, Cell};
use harmlab::numeric::{Scalar, ToleranceProfile};

fn main() -> harmlab::Result<()> {
    let seed = DiagonalSeed::new(vec![Scalar::integer(1), Scalar::ratio(-1, 2)], 8)?;
    let u = halfplane_construct(&seed)?;
    println!("harmonic: {}", is_harmonic(&u, &ToleranceProfile::exact())?.harmonic);
    for m in (-3..=3).rev() {
        let row: Vec<String> = (-3..=3).map(|n| u.at(Cell::new(n, m)).map(|v| format!("{:>7}", v.to_string()))).collect::<Result<_, _>>()?;
        println!("m = {m:>2}: {}", row.join(" "));
    }
    Ok(())
}
