// (3+2√2)^z·u0(x, y) is harmonic on Z^3 when Δu0 = -4·u0.

use harmlab::gallery::{check_eigen, eigen2d, lift3d, residual3};
use harmlab::numeric::Scalar;

fn main() -> harmlab::Result<()> {
    println!("Δu0 = -4 u0: {}", check_eigen(&eigen2d(6)?, &Scalar::integer(-4))?);
    let u = lift3d(4)?;
    let mut nonzero = 0;
    for z in -3..=3 {
        for y in -3..=3 {
            for x in -3..=3 {
                nonzero += usize::from(!residual3(&u, (x, y, z))?.is_zero());
            }
        }
    }
    println!("nonzero six-neighbour residuals on [-3,3]^3: {nonzero}");
    println!("u(1,1,2) = {}", u.get(1, 1, 2).expect("inside the cube"));
    Ok(())
}
