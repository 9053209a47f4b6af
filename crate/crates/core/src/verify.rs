//! The verification battery behind `harmlab verify` and the acceptance
//! test: sixteen numbered checks, each reporting pass or fail with a
//! witness on failure.

use std::cmp::Ordering;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::dirichlet::{
    build_kernel_table, complex::worst_case_scan, compute_ak, solve_direct, solve_kernel, BoundaryData, ComplexRegion, DirectMode,
    ExactLaplaceSolver, KernelContext, SorOptions,
};
use crate::error::Result;
use crate::extension::{check_seven_bounds, extend_lshape, halfplane_construct, random_lshape, LShapeData};
use crate::gallery::{
    check_eigen, chelkak34, chelkak_bounded_region, eigen2d, lift3d, random_diagonal_seed, residual3,
};
use crate::goodrect::{
    check_cover, find_good_square, maximal_good_squares, sloped_q, vitali_select, ExponentTable, GoodnessConfig,
    SearchOutcome,
};
use crate::lattice::{doubling_report, growth_profile, is_harmonic, portion_below, Cell, DoublingBranch, GridFunction, SlopedCell, SlopedRect, Square};
use crate::numeric::{q, Scalar, ScalarKind, ToleranceProfile};
use crate::propagation::{
    composition_dominates, propagate_with, PropagationCase, PropagationSetup, RemainderParams, DEFAULT_GAMMA,
    TAYLOR_RATE,
};
use crate::remez::{poly_max, remez_bound, remez_bound_discrete, Interval, Polynomial};
use crate::rng::seeded;

/// Number of checks in the battery.
pub const CHECK_COUNT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Reduced sample counts; a couple of minutes.
    Quick,
    /// The full sample counts.
    Full,
}

/// Deliberate defects used to confirm that checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negate one kernel entry before the row-sum check.
    KernelSignFlip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<String>,
    pub seconds: f64,
}

impl CheckResult {
    /// One summary line, `PASS` or `FAIL` first.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {:>2} {}/{}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.module,
            self.name,
            self.detail,
            self.seconds
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness: {w}"));
        }
        s
    }
}

/// Outcome of one check body: detail text and an optional failure witness.
struct Outcome {
    detail: String,
    witness: Option<String>,
}

fn pass(detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { detail: detail.into(), witness: None })
}

fn fail(detail: impl Into<String>, witness: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { detail: detail.into(), witness: Some(witness.into()) })
}

const NAMES: [(&str, &str); CHECK_COUNT] = [
    ("dirichlet", "kernel_n1"),
    ("dirichlet", "kernel_matches_direct"),
    ("dirichlet", "kernel_rows_positive_sum_one"),
    ("dirichlet", "kernel_boundary_delta"),
    ("dirichlet", "ak_lower_bound"),
    ("dirichlet", "complex_scan_scaling"),
    ("extension", "lshape_extension"),
    ("extension", "zero_bottom_line_degrees"),
    ("remez", "remez_domination"),
    ("gallery", "gallery_exactness"),
    ("lattice", "growth_slope_and_doubling"),
    ("extension", "halfplane_construction"),
    ("propagation", "propagation_domination"),
    ("goodrect", "vitali_cover"),
    ("goodrect", "good_square_coherence"),
    ("cli", "cli_determinism"),
];

/// Runs check `id` (1-based).
pub fn run_check(id: usize, level: Level, fault: Option<Fault>) -> CheckResult {
    let (module, name) = NAMES[id - 1];
    let start = Instant::now();
    let full = level == Level::Full;
    let out = match id {
        1 => kernel_n1(),
        2 => kernel_matches_direct(full),
        3 => kernel_rows(full, fault),
        4 => boundary_delta(),
        5 => ak_bound(),
        6 => complex_scan(full),
        7 => lshape_extension(full),
        8 => zero_bottom_lines(full),
        9 => remez_domination(full),
        10 => gallery_exactness(full),
        11 => growth_slope(),
        12 => halfplane(full),
        13 => propagation(full),
        14 => vitali(full),
        15 => good_squares(full),
        16 => cli_determinism(),
        _ => unreachable!("check ids run from 1 to {CHECK_COUNT}"),
    };
    let (passed, detail, witness) = match out {
        Ok(Outcome { detail, witness: None }) => (true, detail, None),
        Ok(Outcome { detail, witness }) => (false, detail, witness),
        Err(e) => (false, "check aborted".to_string(), Some(e.to_string())),
    };
    CheckResult { id, module, name, passed, detail, witness, seconds: start.elapsed().as_secs_f64() }
}

/// Runs every check in order, calling `report` after each.
pub fn run_suite(level: Level, fault: Option<Fault>, mut report: impl FnMut(&CheckResult)) -> Vec<CheckResult> {
    (1..=CHECK_COUNT)
        .map(|id| {
            let r = run_check(id, level, fault);
            report(&r);
            r
        })
        .collect()
}

fn indicator(n: i64, y: Cell, kind: ScalarKind) -> Result<BoundaryData> {
    BoundaryData::from_fn(n, kind, |c| if c == y { Scalar::one(kind) } else { Scalar::zero(kind) })
}

fn kernel_n1() -> Result<Outcome> {
    let ctx = KernelContext::new(1)?;
    let solver = ExactLaplaceSolver::new(1)?;
    let quarter = Scalar::rational(q(1, 4));
    for &y in BoundaryData::cells_of(1).iter() {
        let p = ctx.value(Cell::new(0, 0), y)?;
        if (p - 0.25).abs() > 1e-12 {
            return fail("P((0,0), y) differs from 1/4", format!("y = {y}, P = {p:e}"));
        }
        let u = solver.solve(&indicator(1, y, ScalarKind::Rational)?)?;
        if u.at(Cell::new(0, 0))? != &quarter {
            return fail("exact solve differs from 1/4", format!("y = {y}, u = {}", u.at(Cell::new(0, 0))?));
        }
    }
    pass("P((0,0), y) = 1/4 for all four side cells; exact solve agrees")
}

fn kernel_matches_direct(full: bool) -> Result<Outcome> {
    let sets = if full { 20 } else { 4 };
    let mut worst = 0.0f64;
    for n in [2i64, 4, 8, 16] {
        let solver = ExactLaplaceSolver::new(n)?;
        let mut rng = seeded(0x4b45_524e + n as u64);
        let sets_data = (0..sets).map(|_| BoundaryData::random_rational(n, 64, &mut rng)).collect::<Result<Vec<_>>>()?;
        let exact = solver.solve_many(&sets_data)?;
        for (i, (data, ud)) in sets_data.iter().zip(&exact).enumerate() {
            let scale = data.max_abs_f64().max(f64::MIN_POSITIVE);
            let uk = solve_kernel(data)?;
            for c in Square::centered(n - 1).cells() {
                let dev = (uk.at(c)?.to_f64() - ud.at(c)?.to_f64()).abs() / scale;
                worst = worst.max(dev);
                if dev > 1e-9 {
                    return fail("kernel and exact solves disagree", format!("N = {n}, dataset {i}, cell {c}, dev {dev:e}"));
                }
            }
        }
    }
    pass(format!("N in {{2,4,8,16}}, {sets} datasets each, worst relative deviation {worst:.2e} <= 1e-9"))
}

fn kernel_rows(full: bool, fault: Option<Fault>) -> Result<Outcome> {
    let ns: Vec<i64> = if full { (1..=32).collect() } else { vec![1, 2, 3, 4, 8, 16, 32] };
    let mut worst = 0.0f64;
    for n in ns {
        let mut table = build_kernel_table(n)?;
        if fault == Some(Fault::KernelSignFlip) && n == 4 {
            let xi = table.interior.len() / 2;
            let w = table.boundary.len();
            table.values[xi * w] = -table.values[xi * w];
        }
        for (xi, x) in table.interior.iter().enumerate() {
            let row = table.row(xi);
            let sum: f64 = row.iter().sum();
            if let Some(yi) = row.iter().position(|&p| p <= 0.0) {
                return fail(
                    "kernel entry not positive",
                    format!("N = {n}, x = {x}, y = {}, P = {:e}", table.boundary[yi], row[yi]),
                );
            }
            worst = worst.max((sum - 1.0).abs());
            if (sum - 1.0).abs() > 1e-10 {
                return fail("kernel row does not sum to 1", format!("N = {n}, x = {x}, sum - 1 = {:e}", sum - 1.0));
            }
        }
    }
    pass(format!("all rows positive, worst |row sum - 1| = {worst:.2e} <= 1e-10"))
}

fn boundary_delta() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in 1..=16 {
        let ctx = KernelContext::new(n)?;
        let cells = BoundaryData::cells_of(n);
        for &x in &cells {
            for &y in &cells {
                let want = if x == y { 1.0 } else { 0.0 };
                let dev = (ctx.value(x, y)? - want).abs();
                worst = worst.max(dev);
                if dev > 1e-8 {
                    return fail("kernel does not reproduce boundary data", format!("N = {n}, x = {x}, y = {y}, dev {dev:e}"));
                }
            }
        }
    }
    pass(format!("N = 1..16, worst deviation {worst:.2e} <= 1e-8"))
}

fn ak_bound() -> Result<Outcome> {
    let mut count = 0;
    for n in [4i64, 16, 64] {
        for k in 1..2 * n {
            let a = compute_ak(n, k)?;
            if a < k as f64 / (2 * n) as f64 {
                return fail("a_k below k/2N", format!("N = {n}, k = {k}, a_k = {a}"));
            }
            count += 1;
        }
    }
    pass(format!("{count} values of a_k checked, zero violations"))
}

fn complex_scan(full: bool) -> Result<Outcome> {
    let ns: &[i64] = if full { &[16, 32, 64, 128] } else { &[16, 32] };
    let region = ComplexRegion::omega();
    let mut vals = Vec::new();
    for &n in ns {
        let w = worst_case_scan(&KernelContext::new(n)?, &region);
        vals.push((n, w.n_times_max));
    }
    let hi = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let lo = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let list = vals.iter().map(|(n, v)| format!("N={n}: {v:.4}")).collect::<Vec<_>>().join(", ");
    if !(lo > 0.0 && hi / lo <= 4.0) {
        return fail(format!("N max|g| varies by {:.3}", hi / lo), list);
    }
    pass(format!("N max|g| spread {:.3} <= 4 ({list})", hi / lo))
}

/// A random rectangle `[a1, a1 + da] × [b1, b1 + db]` in doubled units.
fn random_rect<R: Rng>(rng: &mut R, max_da: i64, max_db: i64) -> Result<SlopedRect> {
    let a1 = rng.random_range(-20..=20);
    let b1 = rng.random_range(-20..=20);
    SlopedRect::from_doubled(a1, a1 + rng.random_range(1..=max_da), b1, b1 + rng.random_range(0..=max_db))
}

/// `Σ cᵢ hᵢ(n, m)` over the harmonic polynomials of degree at most three.
fn harmonic_poly(coef: &[BigRational; 7], c: SlopedCell) -> Scalar {
    let n = BigRational::from_integer(((c.s2 + c.k2) / 2).into());
    let m = BigRational::from_integer(((c.s2 - c.k2) / 2).into());
    let three = BigRational::from_integer(3.into());
    let basis = [
        BigRational::from_integer(1.into()),
        n.clone(),
        m.clone(),
        &n * &n - &m * &m,
        &n * &m,
        &n * &n * &n - &three * &n * &m * &m,
        &three * &n * &n * &m - &m * &m * &m,
    ];
    Scalar::rational(coef.iter().zip(&basis).map(|(a, b)| a * b).sum())
}

fn lshape_extension(full: bool) -> Result<Outcome> {
    let count = if full { 500 } else { 60 };
    let mut rng = seeded(0x4c53_4850);
    let exact = ToleranceProfile::exact();
    for i in 0..count {
        let r = random_rect(&mut rng, 23, 23)?;
        let data = random_lshape(r, rng.random_range(1..=12), false, &mut rng)?;
        let u = extend_lshape(&data)?;
        if !is_harmonic(&u, &exact)?.harmonic {
            return fail("extension not harmonic", format!("instance {i}, {r}"));
        }
        let rep = check_seven_bounds(&data, &u)?;
        if !rep.global_holds || rep.cellwise_violations > 0 {
            return fail("growth bound violated", format!("instance {i}, {r}, {rep:?}"));
        }
        // Uniqueness: data restricted from a harmonic polynomial extends to it.
        let coef: [BigRational; 7] = std::array::from_fn(|_| q(rng.random_range(-9..=9), rng.random_range(1..=5)));
        let poly = LShapeData::from_fn(r, ScalarKind::Rational, |c| harmonic_poly(&coef, c))?;
        let v = extend_lshape(&poly)?;
        let mismatch = r.cells().find(|&c| v.at_sloped(c).ok() != Some(&harmonic_poly(&coef, c)));
        if let Some(c) = mismatch {
            return fail("extension of restricted harmonic data is not that function", format!("instance {i}, {r}, cell {c}"));
        }
    }
    pass(format!("{count} instances with a, b <= 12: harmonic, unique, both growth bounds hold"))
}

fn zero_bottom_lines(full: bool) -> Result<Outcome> {
    let count = if full { 200 } else { 40 };
    let mut rng = seeded(0x5a45_524f);
    let mut lines = 0;
    for i in 0..count {
        let r = random_rect(&mut rng, 79, 15)?;
        let data = random_lshape(r, rng.random_range(1..=12), true, &mut rng)?;
        let u = extend_lshape(&data)?;
        let b1 = r.b1.doubled();
        for k2 in b1 + 2..=r.b2.doubled() {
            let vals = r
                .line(k2)
                .into_iter()
                .map(|c| {
                    let v = u.at_sloped(c)?.as_rational().expect("rational data extends rationally");
                    Ok(if c.parity_sign() < 0 { -v } else { v })
                })
                .collect::<Result<Vec<_>>>()?;
            let order = (k2 - b1 - 1) as usize;
            let diffs = crate::remez::forward_differences(&vals);
            if let Some(j) = (order..diffs.len()).find(|&j| !diffs[j].is_zero()) {
                return fail(
                    "finite difference above the degree bound is nonzero",
                    format!("instance {i}, {r}, line k2 = {k2}, order {j}"),
                );
            }
            lines += 1;
        }
    }
    pass(format!("{count} rectangles, {lines} lines, all differences of order 2(k-b1)-1 vanish"))
}

fn random_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> BigRational {
    q(rng.random_range(-num..=num), rng.random_range(1..=den))
}

fn remez_domination(full: bool) -> Result<Outcome> {
    let count = if full { 10_000 } else { 1_000 };
    let mut rng = seeded(0x5245_4d5a);
    for i in 0..count {
        let d = rng.random_range(0..=10usize);
        let coeffs: Vec<BigRational> = (0..=d).map(|_| random_rational(&mut rng, 20, 6)).collect();
        let p = Polynomial::new(coeffs);
        let lo = rng.random_range(-20..=10i64);
        let iv = Interval::from_i64(lo, lo + rng.random_range(1..=20))?;
        let max = poly_max(&p, &iv)?;
        // A subset of positive length inside the interval.
        let len = iv.len();
        let a = &iv.lo + &len * q(rng.random_range(0..=50), 100);
        let b = &a + &len * q(rng.random_range(1..=50), 100);
        let sub = [Interval::new(a, b)?];
        let cont = remez_bound(&p, &iv, &sub, None)?;
        if cont < max.upper {
            return fail("continuous bound below the maximum", format!("#{i}: p = {p}, I = {iv}, E = {}", sub[0]));
        }
        // Degree + 1 or more distinct integer points.
        let deg = p.degree().unwrap_or(0);
        let lo_i = lo;
        let span = (&iv.hi - &iv.lo).to_integer().try_into().unwrap_or(0i64);
        if span as usize > deg {
            let mut pts: Vec<i64> = (lo_i..=lo_i + span).collect();
            let keep = rng.random_range(deg + 1..=pts.len());
            while pts.len() > keep {
                let j = rng.random_range(0..pts.len());
                pts.remove(j);
            }
            let pts: Vec<BigRational> = pts.into_iter().map(|x| BigRational::from_integer(x.into())).collect();
            let m = pts.iter().map(|x| p.eval(x).abs()).max().unwrap_or_default();
            let disc = remez_bound_discrete(&p, &iv, &pts, &m)?;
            if disc < max.upper {
                return fail("discrete bound below the maximum", format!("#{i}: p = {p}, I = {iv}"));
            }
        }
    }
    let p = Polynomial::from_i64(&[0, 0, 1]);
    let iv = Interval::from_i64(0, 10)?;
    let pts: Vec<BigRational> = (0..=5).map(|x| BigRational::from_integer(x.into())).collect();
    let b = remez_bound_discrete(&p, &iv, &pts, &BigRational::from_integer(25.into()))?;
    let max = poly_max(&p, &iv)?.value;
    if b != BigRational::from_integer(2500.into()) || max != BigRational::from_integer(100.into()) {
        return fail("worked example", format!("bound {b}, max {max}"));
    }
    pass(format!("{count} random polynomials of degree <= 10 dominated; x^2 example gives 2500 >= 100"))
}

fn gallery_exactness(full: bool) -> Result<Outcome> {
    let exact = ToleranceProfile::exact();
    let u = chelkak34(50)?;
    if !is_harmonic(&u, &exact)?.harmonic {
        return fail("chelkak34 not harmonic on Q_50", "residual nonzero");
    }
    let one = Scalar::one(u.kind());
    for c in Square::centered(50).cells() {
        if chelkak_bounded_region(c) && u.at(c)?.cmp_abs(&one)? == Ordering::Greater {
            return fail("chelkak34 exceeds 1 on the bounded region", format!("cell {c}"));
        }
    }
    let big = if full { 500 } else { 200 };
    let p = portion_below(&chelkak34(big)?, &Scalar::integer(1), &Square::centered(big))?;
    let pf = Scalar::rational(p).to_f64();
    if (pf - 0.75).abs() > 0.01 {
        return fail(format!("portion on Q_{big} is {pf}"), "expected within 0.01 of 3/4");
    }
    let w = lift3d(10)?;
    for z in -9..=9 {
        for y in -9..=9 {
            for x in -9..=9 {
                if !residual3(&w, (x, y, z))?.is_zero() {
                    return fail("lift3d not harmonic", format!("({x}, {y}, {z})"));
                }
            }
        }
    }
    if !check_eigen(&eigen2d(10)?, &Scalar::integer(-4))? {
        return fail("eigen2d is not a -4 eigenfunction", "check_eigen returned false");
    }
    pass(format!("Q_50 harmonic and bounded region exact; portion on Q_{big} = {pf:.5}; lift3d on [-10,10]^3 and eigen2d exact"))
}

fn growth_slope() -> Result<Outcome> {
    let u = chelkak34(200)?;
    let radii: Vec<i64> = (1..=200).collect();
    let prof = growth_profile(&u, &radii)?;
    let slope = prof.log_slope(10, 100).unwrap_or(f64::NAN);
    let target = 1.316_957_896_9;
    if !((slope - target).abs() <= 0.01 * target) {
        return fail(format!("slope {slope:.10}"), format!("target {target}, tolerance 1%"));
    }
    let rows = doubling_report(&prof, 1.3)?;
    if let Some(r) = rows.iter().filter(|r| r.k <= 100).find(|r| !matches!(r.branch, DoublingBranch::Exponential | DoublingBranch::Both)) {
        return fail("doubling label not exponential", format!("K = {}, {:?}", r.k, r.branch));
    }
    let labelled = rows.iter().filter(|r| r.k <= 100).count();
    if labelled != 100 {
        return fail("doubling report incomplete", format!("{labelled} of 100 radii labelled"));
    }
    pass(format!("slope over K in [10,100] = {slope:.10}; K = 1..100 labelled exponential at c1 = 1.3"))
}

fn halfplane(full: bool) -> Result<Outcome> {
    let radius = if full { 64 } else { 32 };
    let exact = ToleranceProfile::exact();
    for seed in 0..20u64 {
        let s = random_diagonal_seed(radius, 0, &mut seeded(seed))?;
        let u = halfplane_construct(&s)?;
        if !is_harmonic(&u, &exact)?.harmonic {
            return fail("not harmonic", format!("seed {seed}"));
        }
        let mut nonzero = false;
        for c in Square::centered(radius).cells() {
            let z = u.at(c)?.is_zero();
            if c.n - c.m >= 0 && !z {
                return fail("nonzero on n - m >= 0", format!("seed {seed}, cell {c}"));
            }
            nonzero |= !z;
        }
        if !nonzero {
            return fail("identically zero", format!("seed {seed}"));
        }
    }
    pass(format!("20 seeds on Q_{radius}: harmonic, zero on n - m >= 0, nonzero"))
}

fn propagation(full: bool) -> Result<Outcome> {
    let runs = if full { 50 } else { 10 };
    let n = 64;
    let mut rng = seeded(0x5052_4f50);
    let side = (2 * n + 1) as usize;
    let mut cases = [0usize; 2];
    let mut setups: Vec<Option<PropagationSetup>> = vec![None; n as usize];
    for i in 0..runs {
        let m0 = rng.random_range(-(n / 2 - 1)..=n / 2 - 1);
        let gamma = if rng.random_bool(0.5) { DEFAULT_GAMMA } else { rng.random_range(1e-5..0.01) };
        let data = BoundaryData::random_signs(n, &mut rng)?;
        let u = solve_direct(&data, DirectMode::FloatIterative(SorOptions::default()))?;
        let grid: Vec<f64> = u.values().iter().map(|v| v.as_ref().map_or(0.0, Scalar::to_f64)).collect();
        let at = |x: i64| grid[(m0 + n) as usize * side + (x + n) as usize];
        let inner = (gamma * n as f64).floor() as i64;
        let pts: Vec<i64> = (-inner..=inner).collect();
        let local = pts.iter().map(|&x| at(x).abs()).fold(0.0, f64::max);
        let slot = (m0 + n / 2) as usize;
        if setups[slot].is_none() {
            setups[slot] = Some(PropagationSetup::new(n, m0)?);
        }
        let setup = setups[slot].as_ref().expect("just filled");
        // Every fifth run takes sigma above C0·M so the Taylor branch is hit.
        let sigma = if i % 5 == 4 {
            setup.c0() * data.max_abs_f64() * (1.0 + rng.random_range(0.0..1.0))
        } else {
            local * (1.0 + rng.random_range(0.0..1.0)) + 1e-12
        };
        let rep = propagate_with(setup, &data, sigma, gamma, &pts)?;
        let seg = (2.0 * gamma * n as f64).floor() as i64;
        let true_max = (-seg..=seg).map(|x| at(x).abs()).fold(0.0, f64::max);
        if true_max > rep.certified_bound * (1.0 + 1e-9) + 1e-12 {
            return fail("certified bound below the true maximum", format!("run {i}: m0 = {m0}, gamma = {gamma}, bound {:e}, true {true_max:e}", rep.certified_bound));
        }
        let t = setup.c0() * rep.m * (2.0 * gamma * TAYLOR_RATE).powi((rep.j / 2) as i32);
        let want = if t < sigma { PropagationCase::TaylorDominates } else { PropagationCase::SigmaDominates };
        if rep.case != want {
            return fail("case split inconsistent", format!("run {i}: T = {t:e}, sigma = {sigma:e}, case {:?}", rep.case));
        }
        cases[(want == PropagationCase::SigmaDominates) as usize] += 1;
    }
    let samples = if full { 1000 } else { 200 };
    for i in 0..samples {
        let mut params = || RemainderParams::new(rng.random_range(1.0..20.0), rng.random_range(0.05..0.95), rng.random_range(0.01..3.0));
        let (a, b) = (params()?, params()?);
        let m = 10f64.powf(rng.random_range(0.0..6.0));
        let sigma = m * 10f64.powf(rng.random_range(-8.0..0.0));
        let nn = rng.random_range(4.0..256.0);
        if !composition_dominates(&a, &b, sigma, m, nn) {
            return fail("composed remainder does not dominate", format!("sample {i}: {a:?} then {b:?}, sigma {sigma:e}, M {m:e}, N {nn}"));
        }
    }
    pass(format!(
        "{runs}/{runs} runs dominated ({} Taylor-dominated, {} sigma-dominated); {samples} compositions dominate",
        cases[0], cases[1]
    ))
}

fn vitali(full: bool) -> Result<Outcome> {
    let count = if full { 1000 } else { 200 };
    let mut rng = seeded(0x5649_5441);
    for i in 0..count {
        let fam = crate::cli::random_family(rng.random(), rng.random_range(1..=30), rng.random_range(4..=40))?;
        let sel = vitali_select(&fam);
        let chk = check_cover(&fam, &sel)?;
        if !chk.disjoint || !chk.covered {
            return fail("Vitali selection invalid", format!("family {i}: {}", chk.witness.unwrap_or_default()));
        }
    }
    pass(format!("{count} families: selections disjoint, tripled selections cover"))
}

/// Sparse spikes `7^e` on a zero background.
fn spiky(k: i64, seed: u64, rate: u32) -> Result<GridFunction> {
    let mut rng = seeded(seed);
    GridFunction::sloped(sloped_q(k), ScalarKind::Rational, |_| {
        if rng.random_range(0..rate) == 0 {
            Scalar::integer(7i64.pow(rng.random_range(1..=22)))
        } else {
            Scalar::integer(0)
        }
    })
}

fn good_squares(full: bool) -> Result<Outcome> {
    let cfg = GoodnessConfig::default();
    let count = if full { 50 } else { 10 };
    let mut rng = seeded(0x474f_4f44);
    let mut total = 0;
    for i in 0..count {
        // Window side 2k+1 doubled units, at most 128 cells across.
        let k = if i % 10 == 9 { 31 } else { rng.random_range(4..=14) };
        let u = spiky(k, rng.random(), rng.random_range(6..=30))?;
        let amb = sloped_q(k);
        let seed = sloped_q(rng.random_range(0..=k / 3));
        let fam = maximal_good_squares(&u, &amb, &cfg, &seed)?;
        let table = ExponentTable::new(&u, &amb, &cfg)?;
        let top = amb.a2.doubled() - amb.a1.doubled();
        for r in &fam.squares {
            if !crate::goodrect::is_good(&u, r, &cfg)? {
                return fail("listed square is not good", format!("instance {i}, {r}"));
            }
            let l0 = r.a2.doubled() - r.a1.doubled();
            for l in l0 + 1..=top {
                for a1 in r.a2.doubled() - l..=r.a1.doubled() {
                    for b1 in r.b2.doubled() - l..=r.b1.doubled() {
                        let s = SlopedRect::from_doubled(a1, a1 + l, b1, b1 + l)?;
                        if amb.contains_rect(&s) && table.is_good(&s, &cfg) {
                            return fail("maximal square has a good strict super-square", format!("instance {i}, {r} inside {s}"));
                        }
                    }
                }
            }
            total += 1;
        }
    }
    let zero = GridFunction::sloped(sloped_q(200), ScalarKind::Rational, |_| Scalar::integer(0))?;
    if !matches!(find_good_square(&zero, 200, &cfg)?, SearchOutcome::Found { .. }) {
        return fail("no good square found for U = 0", "K = 200");
    }
    let dense = GridFunction::sloped(sloped_q(30), ScalarKind::Rational, |c| {
        Scalar::integer(if c.s2 > -40 { 1_000_000 } else { 0 })
    })?;
    match find_good_square(&dense, 30, &cfg)? {
        SearchOutcome::Absent { report } => {
            let expect = sloped_q(30).cells().filter(|c| c.s2 > -40).count() as u64;
            if report.bad_cells != expect || report.bad_fraction <= cfg.bad_threshold {
                return fail("wrong bad-cell report", format!("bad {} (expected {expect}), fraction {}", report.bad_cells, report.bad_fraction));
            }
        }
        other => return fail("dense-bad instance reported a good square", format!("{other:?}")),
    }
    pass(format!("{count} instances, {total} maximal squares with no good super-square; U = 0 found, dense-bad absent"))
}

fn cli_determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("harmlab-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let grid = p("chelkak.json");
    let fam = p("family.json");
    let setup: Vec<Vec<String>> = vec![
        vec!["example".into(), "--name".into(), "chelkak34".into(), "--n".into(), "12".into(), "--out".into(), grid.clone()],
    ];
    std::fs::write(&fam, crate::cli::random_family(5, 25, 30)?.to_json()?)?;
    for args in &setup {
        if crate::cli::run_args(std::iter::once("harmlab".to_string()).chain(args.iter().cloned())) != 0 {
            return fail("setup command failed", args.join(" "));
        }
    }
    let cmds: Vec<(&str, Vec<&str>)> = vec![
        ("solve.json", vec!["solve", "--n", "8", "--seed", "1", "--method", "kernel"]),
        ("kernel.csv", vec!["kernel-dump", "--n", "4"]),
        ("lshape.json", vec!["extend-lshape", "--rect", "0,6,0,3", "--seed", "2", "--zero-bottom", "true"]),
        ("halfplane.json", vec!["halfplane", "--n", "10", "--seed", "3"]),
        ("example.json", vec!["example", "--name", "lift3d", "--n", "3"]),
        ("example_float.json", vec!["example", "--name", "chelkak34", "--n", "4", "--kind", "float", "--precision", "80"]),
        ("portion.json", vec!["portion", "--input", &grid, "--radius", "10"]),
        ("growth.csv", vec!["growth", "--example", "chelkak34", "--radii", "1..30"]),
        ("doubling.csv", vec!["doubling", "--example", "chelkak34", "--radii", "1..10"]),
        ("remez.json", vec!["remez-check", "--poly", "0,0,1", "--interval", "0,10", "--points", "0,1,2,3,4,5", "--subset", "0,5"]),
        ("propagate.json", vec!["propagate", "--n", "32", "--line", "0", "--sigma", "1", "--gamma", "0.001", "--seed", "7"]),
        ("three_circle.json", vec!["three-circle", "--example", "chelkak34", "--n", "32"]),
        ("goodrect.json", vec!["goodrect-scan", "--example", "chelkak34", "--k", "12"]),
        ("vitali.json", vec!["vitali", "--input", &fam]),
    ];
    for (file, args) in &cmds {
        let out = p(file);
        let run = || {
            let mut v: Vec<String> = std::iter::once("harmlab".to_string()).chain(args.iter().map(|s| s.to_string())).collect();
            v.extend(["--out".to_string(), out.clone()]);
            crate::cli::run_args(v)
        };
        if run() != 0 {
            return fail("command failed", args.join(" "));
        }
        let first = std::fs::read(&out)?;
        if run() != 0 {
            return fail("command failed on rerun", args.join(" "));
        }
        if std::fs::read(&out)? != first {
            return fail("rerun output differs", args.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    pass(format!("{} commands byte-identical on rerun", cmds.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        for id in [1, 4, 5, 14] {
            let r = run_check(id, Level::Quick, None);
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn sign_flip_is_caught_with_witness() {
        let r = run_check(3, Level::Quick, Some(Fault::KernelSignFlip));
        assert!(!r.passed);
        assert!(r.line().starts_with("FAIL"));
        assert!(r.witness.unwrap().contains("N = 4, x = (0,0)"));
    }

    #[test]
    fn lines_are_labelled() {
        let r = run_check(5, Level::Quick, None);
        assert!(r.line().starts_with("PASS  5 dirichlet/ak_lower_bound"));
    }
}
