//! Every cargo example runs to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));

            #[test]
            fn runs() {
                main().unwrap();
            }
        }
    };
}

example!(dirichlet_kernel, "dirichlet_kernel.rs");
example!(chelkak_growth, "chelkak_growth.rs");
example!(lshape_extension, "lshape_extension.rs");
example!(halfplane, "halfplane.rs");
example!(remez_bounds, "remez_bounds.rs");
example!(propagation, "propagation.rs");
example!(good_squares, "good_squares.rs");
example!(three_dimensional_lift, "three_dimensional_lift.rs");
example!(complex_scan, "complex_scan.rs");
example!(exact_arithmetic, "exact_arithmetic.rs");
