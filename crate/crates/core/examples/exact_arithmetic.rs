// The scalar kinds: rationals, Q(√d), binary floats and complex floats.

use harmlab::numeric::{parse_scalar, Scalar, ScalarKind};

fn main() -> harmlab::Result<()> {
    let b = parse_scalar("2+1*sqrt(3)", ScalarKind::Quadratic(3))?;
    let inv = parse_scalar("2-1*sqrt(3)", ScalarKind::Quadratic(3))?;
    println!("(2+√3)(2-√3) = {}", b.checked_mul(&inv)?);
    println!("(2+√3)^5 = {} ≈ {:.6}", b.pow(5), b.pow(5).to_f64());
    let third = Scalar::ratio(1, 3);
    println!("1/3 as a 64-bit float: {}", third.convert(ScalarKind::Float(64))?);
    println!("1/3 + 1/6 = {}", third.checked_add(&Scalar::ratio(1, 6))?);
    Ok(())
}
