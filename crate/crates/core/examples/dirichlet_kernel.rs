// Solve a small Dirichlet problem three ways and compare.

use harmlab::dirichlet::{build_kernel_table, solve_direct, solve_kernel, BoundaryData, DirectMode};
use harmlab::lattice::{Cell, Square};

fn main() -> harmlab::Result<()> {
    let n = 6;
    let data = BoundaryData::random_rational(n, 10, &mut harmlab::rng::seeded(11))?;
    let kernel = solve_kernel(&data)?;
    let exact = solve_direct(&data, DirectMode::ExactRational)?;
    let mut worst = 0.0f64;
    for c in Square::centered(n - 1).cells() {
        worst = worst.max((kernel.at(c)?.to_f64() - exact.at(c)?.to_f64()).abs());
    }
    println!("u(0,0) exact  = {}", exact.at(Cell::new(0, 0))?);
    println!("u(0,0) kernel = {:.15}", kernel.at(Cell::new(0, 0))?.to_f64());
    println!("max |kernel - exact| on Q_{} = {worst:.2e}", n - 1);

    let table = build_kernel_table(n)?;
    let centre = table.interior.iter().position(|&x| x == Cell::new(0, 0)).expect("centre is interior");
    let row = table.row(centre);
    println!("row sum at the centre = {:.15}", row.iter().sum::<f64>());
    println!("smallest entry in that row = {:.3e}", row.iter().cloned().fold(f64::INFINITY, f64::min));
    Ok(())
}
