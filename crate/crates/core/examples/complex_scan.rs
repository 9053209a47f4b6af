// N·max|g| over the complexified kernel for growing N.

use harmlab::dirichlet::complex::worst_case_scan;
use harmlab::dirichlet::{ComplexRegion, KernelContext};

fn main() -> harmlab::Result<()> {
    let region = ComplexRegion::omega();
    for n in [8, 16, 32] {
        let w = worst_case_scan(&KernelContext::new(n)?, &region);
        println!("N = {n:>3}: N max|g| = {:.5} at y = {:?}, m = {}, z = {:?}", w.n_times_max, w.y, w.m, w.z);
    }
    Ok(())
}
