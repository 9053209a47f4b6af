//! Cross-module properties on random inputs.

use harmlab::dirichlet::{solve_direct, solve_kernel, BoundaryData, DirectMode};
use harmlab::extension::{extend_lshape, LShapeData};
use harmlab::goodrect::{check_cover, vitali_select, SquareFamily};
use harmlab::lattice::io::GridFile;
use harmlab::lattice::{from_sloped, is_harmonic, to_sloped, GridFunction, SlopedRect, Square};
use harmlab::numeric::{Scalar, ScalarKind, ToleranceProfile};
use harmlab::remez::{poly_max, remez_bound_discrete, Interval, Polynomial};
use num_rational::BigRational;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_agrees_with_exact_solve(n in 1i64..7, seed in any::<u64>()) {
        let data = BoundaryData::random_rational(n, 20, &mut harmlab::rng::seeded(seed)).unwrap();
        let exact = solve_direct(&data, DirectMode::ExactRational).unwrap();
        let kernel = solve_kernel(&data).unwrap();
        prop_assert!(is_harmonic(&exact, &ToleranceProfile::exact()).unwrap().harmonic);
        for c in Square::centered(n - 1).cells() {
            let d = (exact.at(c).unwrap().to_f64() - kernel.at(c).unwrap().to_f64()).abs();
            prop_assert!(d <= 1e-9 * data.max_abs_f64().max(1e-300));
        }
    }

    #[test]
    fn extension_of_a_harmonic_function_restores_it(a in -6i64..6, b in -6i64..6, c in -6i64..6, da in 1i64..16, db in 0i64..16) {
        // u = a + b·n·m + c·(n² − m²) in sloped coordinates.
        let f = |s2: i64, k2: i64| {
            let (n, m) = ((s2 + k2) / 2, (s2 - k2) / 2);
            Scalar::integer(a + b * n * m + c * (n * n - m * m))
        };
        let rect = SlopedRect::from_doubled(0, da, 0, db).unwrap();
        let data = LShapeData::from_fn(rect, ScalarKind::Rational, |p| f(p.s2, p.k2)).unwrap();
        let u = extend_lshape(&data).unwrap();
        for p in rect.cells() {
            prop_assert_eq!(u.at_sloped(p).unwrap(), &f(p.s2, p.k2));
        }
    }

    #[test]
    fn sloped_round_trip_and_json(k in 1i64..6, seed in any::<u64>()) {
        let data = BoundaryData::random_rational(k, 7, &mut harmlab::rng::seeded(seed)).unwrap();
        let u = solve_direct(&data, DirectMode::ExactRational).unwrap();
        let inner = GridFunction::standard(Square::centered(k - 1), ScalarKind::Rational, |c| u.at(c).unwrap().clone()).unwrap();
        let back = from_sloped(&to_sloped(&inner).unwrap(), Square::centered(k - 1)).unwrap();
        prop_assert_eq!(&back, &inner);
        let text = inner.to_json();
        prop_assert_eq!(GridFunction::from_json(&text).unwrap(), inner.clone());
        let file: GridFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(file.to_grid().unwrap(), inner);
    }

    #[test]
    fn discrete_remez_dominates(coeffs in proptest::collection::vec(-9i64..9, 1..7), extra in 0usize..4) {
        let p = Polynomial::from_i64(&coeffs);
        let d = p.degree().unwrap_or(0);
        let iv = Interval::from_i64(0, (d + extra + 3) as i64).unwrap();
        let pts: Vec<BigRational> = (0..=(d + extra) as i64).map(|x| BigRational::from_integer(x.into())).collect();
        let m = pts.iter().map(|x| num_traits::Signed::abs(&p.eval(x))).max().unwrap();
        let bound = remez_bound_discrete(&p, &iv, &pts, &m).unwrap();
        prop_assert!(bound >= poly_max(&p, &iv).unwrap().value);
    }

    #[test]
    fn vitali_selection_is_disjoint_and_covers(raw in proptest::collection::vec((-20i64..20, -20i64..20, 0i64..10), 1..25)) {
        let amb = SlopedRect::from_doubled(-40, 40, -40, 40).unwrap();
        let squares = raw.iter().map(|&(a, b, l)| SlopedRect::from_doubled(a, a + l, b, b + l).unwrap()).collect();
        let fam = SquareFamily::new(amb, squares).unwrap();
        let chk = check_cover(&fam, &vitali_select(&fam)).unwrap();
        prop_assert!(chk.disjoint && chk.covered, "{:?}", chk.witness);
    }
}
