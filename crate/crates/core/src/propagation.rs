//! Propagation of smallness along a horizontal line.
//!
//! The values `u(n, m₀)` of a harmonic function on `Q_N` extend to the entire
//! function `f(z) = Σ_y g_y(z)·u(y)` with `f(n/N) = u(n, m₀)`. If `|u| ≤ σ`
//! at `J` integer points of `[−γN, γN]`, the Taylor polynomial `P_d` of `f`
//! at 0 is small at those points, so the discrete Remez inequality bounds it
//! on `[−2γN, 2γN]`, and `|f − P_d|` is controlled by the Cauchy estimate.
//!
//! `L = 32`: on the disk of radius 1/16 inside `Ω` the Cauchy estimates give
//! `|c_j| ≤ max|f|·16^j`, and for `|z| < 1/32` the tail beyond degree `d` is
//! at most `max|f|·(32|z|)^{d+1}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::direct::solve_direct_f64;
use crate::dirichlet::{BoundaryData, ComplexRegion, KernelContext, SorOptions, KERNEL_PRECISION};
use crate::error::{precondition, Error, Result};
use crate::lattice::{GridFunction, Square};
use crate::numeric::Scalar;
use crate::remez::discrete_remez_factor;

/// The Taylor rate constant `L`.
pub const TAYLOR_RATE: f64 = 32.0;
/// Radius of the Cauchy circle used for the Taylor coefficients.
pub const CAUCHY_RADIUS: f64 = 1.0 / 32.0;
pub const QUADRATURE_NODES: usize = 512;
/// Number of Taylor coefficients kept.
pub const TAYLOR_TERMS: usize = 24;
/// `2⁻⁸·L⁻¹`.
pub const GAMMA_THRESHOLD: f64 = 1.0 / 8192.0;
pub const DEFAULT_GAMMA: f64 = 1.0 / 16384.0;
/// Slack for the iterative solver when comparing against `σ` and the bound.
pub const SOLVER_SLACK: f64 = 1e-9;

/// `f(z) = u(zN, m₀)` continued off the lattice.
#[derive(Clone, Debug)]
pub struct AnalyticLineExtension {
    ctx: KernelContext,
    m0: i64,
    coef: [Vec<f64>; 4],
    taylor: Vec<Complex64>,
}

impl AnalyticLineExtension {
    pub fn n(&self) -> i64 {
        self.ctx.n()
    }

    pub fn m0(&self) -> i64 {
        self.m0
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let ctx = &self.ctx;
        let n = ctx.n();
        let zn = z * n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..2 * n {
            let i = (k - 1) as usize;
            let horiz = ctx.ratio(k, self.m0) * self.coef[0][i] + ctx.ratio(k, -self.m0) * self.coef[1][i];
            acc += ctx.sine_complex(k, z) * horiz;
            let s = ctx.sine(k, self.m0);
            if s != 0.0 {
                acc += (ctx.ratio_complex(k, zn) * self.coef[2][i] + ctx.ratio_complex(k, -zn) * self.coef[3][i]) * s;
            }
        }
        acc / n as f64
    }

    /// Taylor coefficients about 0 from the trapezoid rule on `|z| = 1/32`.
    pub fn taylor(&self) -> &[Complex64] {
        &self.taylor
    }

    pub fn cauchy_coefficients(&self, nodes: usize, count: usize) -> Vec<Complex64> {
        let samples: Vec<Complex64> = (0..nodes)
            .into_par_iter()
            .map(|l| self.eval(Complex64::from_polar(CAUCHY_RADIUS, 2.0 * PI * l as f64 / nodes as f64)))
            .collect();
        (0..count)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, s) in samples.iter().enumerate() {
                    let phase = ((j * l) % nodes) as f64 * 2.0 * PI / nodes as f64;
                    acc += s * Complex64::from_polar(1.0, -phase);
                }
                acc / (nodes as f64 * CAUCHY_RADIUS.powi(j as i32))
            })
            .collect()
    }

    /// `P_d(z) = Σ_{j ≤ d} c_j z^j`.
    pub fn taylor_eval(&self, z: Complex64, d: usize) -> Result<Complex64> {
        if d >= self.taylor.len() {
            return precondition(format!("only {} Taylor coefficients are kept", self.taylor.len()));
        }
        Ok(self.taylor[..=d].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c))
    }

    /// `max |f|` over the boundary samples of `region`.
    pub fn max_on(&self, region: &ComplexRegion) -> f64 {
        region.boundary_points().par_iter().map(|&z| self.eval(z).norm()).reduce(|| 0.0, f64::max)
    }
}

pub fn analytic_extension(data: &BoundaryData, m0: i64) -> Result<AnalyticLineExtension> {
    let n = data.n();
    if 2 * m0.abs() >= n {
        return precondition(format!("line m0 = {m0} needs |m0| < N/2 with N = {n}"));
    }
    let ctx = KernelContext::new(n)?;
    let vals = data.values_f64();
    let lookup = |c| data.cells().iter().position(|&y| y == c).map_or(0.0, |i| vals[i]);
    let coef = ctx.side_coefficients(&lookup);
    let mut ext = AnalyticLineExtension { ctx, m0, coef, taylor: Vec::new() };
    ext.taylor = ext.cauchy_coefficients(QUADRATURE_NODES, TAYLOR_TERMS);
    Ok(ext)
}

/// `max_Ω|f|·(L·r)^{d+1}`, a bound for `|f − P_d|` on `|z| ≤ r`.
pub fn taylor_truncation_bound(ext: &AnalyticLineExtension, d: usize, z_radius: f64) -> Result<Scalar> {
    if !(0.0..1.0 / TAYLOR_RATE).contains(&z_radius) {
        return precondition(format!("z_radius must lie in [0, 1/{TAYLOR_RATE}), got {z_radius}"));
    }
    let max_f = ext.max_on(&ComplexRegion::omega());
    Ok(Scalar::from_f64(max_f * (TAYLOR_RATE * z_radius).powi(d as i32 + 1), KERNEL_PRECISION)?)
}

/// `C₀ = Σ_y max_{∂Ω} |g_y|`, so that `max_Ω |f| ≤ C₀·max|data|`.
pub fn kernel_constant(ctx: &KernelContext, m0: i64, region: &ComplexRegion) -> f64 {
    let n = ctx.n();
    let zs = region.boundary_points();
    let horiz: Vec<Vec<Complex64>> = zs.iter().map(|&z| (1..2 * n).map(|k| ctx.sine_complex(k, z)).collect()).collect();
    let right: Vec<Vec<Complex64>> =
        zs.iter().map(|&z| (1..2 * n).map(|k| ctx.ratio_complex(k, z * n as f64)).collect()).collect();
    let left: Vec<Vec<Complex64>> =
        zs.iter().map(|&z| (1..2 * n).map(|k| ctx.ratio_complex(k, -z * n as f64)).collect()).collect();
    let mut jobs = Vec::new();
    for side in 0..4 {
        for t in -n + 1..n {
            jobs.push((side, t));
        }
    }
    let maxima: Vec<f64> = jobs
        .par_iter()
        .map(|&(side, t)| {
            let b: Vec<f64> = (1..2 * n)
                .map(|k| match side {
                    0 => ctx.sine(k, t) * ctx.ratio(k, m0),
                    1 => ctx.sine(k, t) * ctx.ratio(k, -m0),
                    _ => ctx.sine(k, m0) * ctx.sine(k, t),
                })
                .collect();
            let table = match side {
                0 | 1 => &horiz,
                2 => &right,
                _ => &left,
            };
            table
                .iter()
                .map(|row| row.iter().zip(&b).fold(Complex64::new(0.0, 0.0), |acc, (a, &bk)| acc + a * bk).norm())
                .fold(0.0, f64::max)
                / n as f64
        })
        .collect();
    maxima.iter().sum()
}

/// Which side of the split `C₀M(2γL)^{⌊J/2⌋}` vs `σ` a run took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationCase {
    /// Case (i): `C₀M(2γL)^{⌊J/2⌋} < σ`; degree `J₀ − 1`.
    TaylorDominates,
    /// Case (ii): otherwise; degree `⌊J/2⌋ − 1`.
    SigmaDominates,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub n: i64,
    pub m0: i64,
    pub sigma: f64,
    pub gamma: f64,
    /// `γ ≥ 2⁻⁸L⁻¹`; the run is still valid as long as `2γL < 1`.
    pub gamma_above_threshold: bool,
    pub l: f64,
    pub c0: f64,
    /// `max |data|`.
    pub m: f64,
    /// Small points used, `|n| ≤ γN`.
    pub points: Vec<i64>,
    pub j: usize,
    pub j0: Option<usize>,
    pub case: PropagationCase,
    /// `−1` means the polynomial part is empty.
    pub degree: i64,
    pub delta: Option<f64>,
    /// `C₀M(2γL)^{d+1}`.
    pub taylor_term: f64,
    /// Bound for `|P_d|` at the small points.
    pub point_bound: f64,
    pub remez_bound: f64,
    pub certified_bound: f64,
    /// Target segment `|n| ≤ segment_radius`.
    pub segment_radius: i64,
    pub true_max: f64,
    pub dominates: bool,
}

/// Kernel data shared by runs with the same `N` and line.
#[derive(Clone, Debug)]
pub struct PropagationSetup {
    n: i64,
    m0: i64,
    c0: f64,
}

impl PropagationSetup {
    pub fn new(n: i64, m0: i64) -> Result<Self> {
        if n < 2 || 2 * m0.abs() >= n {
            return precondition(format!("line m0 = {m0} needs |m0| < N/2 with N = {n}"));
        }
        let ctx = KernelContext::new(n)?;
        let c0 = kernel_constant(&ctx, m0, &ComplexRegion::omega());
        Ok(PropagationSetup { n, m0, c0 })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }
}

pub fn propagate_smallness(
    data: &BoundaryData,
    m0: i64,
    sigma: f64,
    gamma: f64,
    small_points: &[i64],
) -> Result<PropagationReport> {
    propagate_with(&PropagationSetup::new(data.n(), m0)?, data, sigma, gamma, small_points)
}

pub fn propagate_with(
    setup: &PropagationSetup,
    data: &BoundaryData,
    sigma: f64,
    gamma: f64,
    small_points: &[i64],
) -> Result<PropagationReport> {
    let n = setup.n;
    if data.n() != n {
        return precondition(format!("setup is for N = {n}, data for N = {}", data.n()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return precondition(format!("sigma must be finite and >= 0, got {sigma}"));
    }
    let rate = 2.0 * gamma * TAYLOR_RATE;
    if !(gamma > 0.0 && rate < 1.0) {
        return precondition(format!("gamma must satisfy 0 < 2*gamma*L < 1, got {gamma}"));
    }
    let m = data.max_abs_f64();
    let inner = (gamma * n as f64).floor() as i64;
    let mut points: Vec<i64> = small_points.iter().copied().filter(|p| p.abs() <= inner).collect();
    points.sort_unstable();
    points.dedup();
    let j = points.len();
    let range = (2 * inner + 1) as usize;
    if j == 0 || 4 * j < range {
        return precondition(format!("need at least a quarter of the {range} integers in [-gamma N, gamma N], got {j}"));
    }

    let side = (2 * n + 1) as usize;
    let u = solve_direct_f64(data, &SorOptions::default())?;
    let at = |x: i64| u[(setup.m0 + n) as usize * side + (x + n) as usize];
    let slack = SOLVER_SLACK * m.max(sigma);
    if let Some(&p) = points.iter().find(|&&p| at(p).abs() > sigma + slack) {
        return precondition(format!("|u({p}, {})| = {} exceeds sigma = {sigma}", setup.m0, at(p).abs()));
    }

    let term = |e: i64| setup.c0 * m * rate.powi(e as i32);
    let h = (j / 2) as i64;
    let (case, j0, degree, delta) = if term(h) < sigma {
        let j0 = (0..=h).find(|&e| term(e) < sigma).expect("h qualifies");
        (PropagationCase::TaylorDominates, Some(j0 as usize), j0 - 1, None)
    } else {
        (PropagationCase::SigmaDominates, None, h - 1, Some(term(h)))
    };
    let taylor_term = term(degree + 1);
    let point_bound = sigma + taylor_term;
    let segment_radius = (2.0 * gamma * n as f64).floor() as i64;
    let remez_bound = if degree < 0 {
        0.0
    } else {
        discrete_remez_factor(4.0 * gamma * n as f64, j, degree as usize)? * point_bound
    };
    let certified_bound = remez_bound + taylor_term;
    let true_max = (-segment_radius..=segment_radius).map(|x| at(x).abs()).fold(0.0, f64::max);
    Ok(PropagationReport {
        n,
        m0: setup.m0,
        sigma,
        gamma,
        gamma_above_threshold: gamma >= GAMMA_THRESHOLD,
        l: TAYLOR_RATE,
        c0: setup.c0,
        m,
        points,
        j,
        j0,
        case,
        degree,
        delta,
        taylor_term,
        point_bound,
        remez_bound,
        certified_bound,
        segment_radius,
        true_max,
        dominates: true_max <= certified_bound + slack,
    })
}

impl PropagationReport {
    pub fn csv_header() -> &'static str {
        "n,m0,sigma,gamma,c0,m,j,j0,case,degree,taylor_term,remez_bound,certified_bound,true_max,dominates"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e},{},{},{},{},{:e},{:e},{:e},{:e},{}",
            self.n,
            self.m0,
            self.sigma,
            self.gamma,
            self.c0,
            self.m,
            self.j,
            self.j0.map_or(String::new(), |v| v.to_string()),
            match self.case {
                PropagationCase::TaylorDominates => "taylor_dominates",
                PropagationCase::SigmaDominates => "sigma_dominates",
            },
            self.degree,
            self.taylor_term,
            self.remez_bound,
            self.certified_bound,
            self.true_max,
            self.dominates
        )
    }
}

/// Shape `C(M^β σ^{1−β} + e^{−cN} M)` of a smallness bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderParams {
    #[serde(rename = "C")]
    pub big_c: f64,
    pub beta: f64,
    pub c: f64,
}

impl RemainderParams {
    pub fn new(big_c: f64, beta: f64, c: f64) -> Result<Self> {
        if !(big_c >= 1.0 && beta > 0.0 && beta < 1.0 && c > 0.0 && big_c.is_finite() && c.is_finite()) {
            return precondition(format!("remainder parameters need C >= 1, 0 < beta < 1, c > 0; got ({big_c}, {beta}, {c})"));
        }
        Ok(RemainderParams { big_c, beta, c })
    }

    /// `r(σ) = C(M^β σ^{1−β} + e^{−cN} M)`.
    pub fn eval(&self, sigma: f64, m: f64, n: f64) -> f64 {
        self.big_c * (m.powf(self.beta) * sigma.powf(1.0 - self.beta) + (-self.c * n).exp() * m)
    }
}

/// Parameters dominating `outer ∘ inner`:
/// `(β+β₁−ββ₁, C(C₁^{1−β}+1), min(c₁(1−β), c))`.
pub fn compose_remainders(inner: &RemainderParams, outer: &RemainderParams) -> RemainderParams {
    let (b, b1) = (outer.beta, inner.beta);
    RemainderParams {
        big_c: outer.big_c * (inner.big_c.powf(1.0 - b) + 1.0),
        beta: b + b1 - b * b1,
        c: (inner.c * (1.0 - b)).min(outer.c),
    }
}

/// `outer(inner(σ)) ≤ composed(σ)` up to relative rounding `1e−12`.
pub fn composition_dominates(inner: &RemainderParams, outer: &RemainderParams, sigma: f64, m: f64, n: f64) -> bool {
    let lhs = outer.eval(inner.eval(sigma, m, n), m, n);
    let rhs = compose_remainders(inner, outer).eval(sigma, m, n);
    lhs <= rhs * (1.0 + 1e-12)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ThreeCircleMode {
    Params(RemainderParams),
    /// Fit `α̂` with the given decay rate `c`.
    Fit { c: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeCircleReport {
    pub n: i64,
    pub sigma: f64,
    /// Fraction of `Q_{⌊N/4⌋}` where `|u| ≤ σ`.
    pub small_fraction: f64,
    pub m: f64,
    pub mid: f64,
    /// Params mode: the right-hand side and whether `mid` stays below it.
    pub rhs: Option<f64>,
    pub holds: Option<bool>,
    /// Fit mode: smallest `α̂ ∈ [0, 1]` with `mid ≤ M^α̂ σ^{1−α̂} + e^{−cN}M`.
    pub alpha_hat: Option<f64>,
}

pub fn three_circle_report(u: &GridFunction, n: i64, sigma: f64, mode: ThreeCircleMode) -> Result<ThreeCircleReport> {
    if n < 4 {
        return precondition(format!("three-circle report needs N >= 4, got {n}"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return precondition(format!("sigma must be positive, got {sigma}"));
    }
    let abs_on = |r: i64| -> Result<Vec<f64>> {
        Square::centered(r).cells().map(|c| u.at(c).map(|v| v.to_f64().abs())).collect()
    };
    let quarter = abs_on(n / 4)?;
    let small = quarter.iter().filter(|&&v| v <= sigma).count();
    if 2 * small < quarter.len() {
        return Err(Error::Precondition(format!(
            "|u| <= sigma holds on {small} of {} cells of Q_{}, fewer than half",
            quarter.len(),
            n / 4
        )));
    }
    let m = abs_on(n)?.into_iter().fold(0.0, f64::max);
    let mid = abs_on(n / 2)?.into_iter().fold(0.0, f64::max);
    let mut rep = ThreeCircleReport {
        n,
        sigma,
        small_fraction: small as f64 / quarter.len() as f64,
        m,
        mid,
        rhs: None,
        holds: None,
        alpha_hat: None,
    };
    match mode {
        ThreeCircleMode::Params(p) => {
            let rhs = p.eval(sigma, m, n as f64);
            rep.rhs = Some(rhs);
            rep.holds = Some(mid <= rhs);
        }
        ThreeCircleMode::Fit { c } => {
            let tail = (-c * n as f64).exp() * m;
            let alpha = if mid - tail <= sigma || m <= sigma {
                0.0
            } else {
                let num = mid.ln() + (-tail / mid).ln_1p() - sigma.ln();
                (num / (m.ln() - sigma.ln())).clamp(0.0, 1.0)
            };
            rep.alpha_hat = Some(alpha);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{solve_kernel, BoundaryData};
    use crate::lattice::Cell;
    use crate::numeric::ScalarKind;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn extension_matches_lattice_values() {
        let mut rng = crate::rng::seeded(5);
        let data = BoundaryData::random_rational(16, 7, &mut rng).unwrap();
        let u = solve_kernel(&data).unwrap();
        for m0 in [-7, 0, 3] {
            let ext = analytic_extension(&data, m0).unwrap();
            for n in -7..=7 {
                let f = ext.eval(c(n as f64 / 16.0));
                assert!((f.re - u.at(Cell::new(n, m0)).unwrap().to_f64()).abs() < 1e-8, "n = {n}");
                assert!(f.im.abs() < 1e-10);
            }
        }
        assert!(analytic_extension(&data, 8).is_err());
    }

    #[test]
    fn constant_data_extension() {
        let data = BoundaryData::constant(16, Scalar::integer(1)).unwrap();
        let ext = analytic_extension(&data, 0).unwrap();
        assert!((ext.eval(c(0.0)).re - 1.0).abs() < 1e-10);
        assert!((ext.taylor()[0].re - 1.0).abs() < 1e-10);
        for j in 1..4 {
            assert!(ext.taylor()[j].norm() < 1e-10, "c_{j} = {}", ext.taylor()[j]);
        }
        for i in 0..20 {
            assert!((ext.eval(c(-0.5 + i as f64 / 19.0)) - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn linear_data_extension() {
        let data = BoundaryData::restrict(16, ScalarKind::Rational, |n, _| Scalar::integer(n)).unwrap();
        let ext = analytic_extension(&data, 0).unwrap();
        for i in 0..20 {
            let x = -0.5 + i as f64 / 19.0;
            assert!((ext.eval(c(x)).re - 16.0 * x).abs() < 1e-9);
        }
    }

    #[test]
    fn quadrature_is_converged() {
        let mut rng = crate::rng::seeded(8);
        let data = BoundaryData::random_rational(16, 5, &mut rng).unwrap();
        let ext = analytic_extension(&data, 2).unwrap();
        let doubled = ext.cauchy_coefficients(2 * QUADRATURE_NODES, 8);
        let scale = ext.max_on(&ComplexRegion::omega());
        for j in 0..8 {
            let tol = 1e-10 * scale * 32f64.powi(j as i32);
            assert!((doubled[j] - ext.taylor()[j]).norm() <= tol, "j = {j}");
        }
    }

    #[test]
    fn taylor_matches_finite_differences() {
        let mut rng = crate::rng::seeded(9);
        let data = BoundaryData::random_rational(16, 5, &mut rng).unwrap();
        let ext = analytic_extension(&data, 1).unwrap();
        let h = 1e-2;
        let f = |x: f64| ext.eval(c(x)).re;
        // Central differences of orders 0..=2 against c_j·j!.
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let t = ext.taylor();
        assert!((t[0].re - f(0.0)).abs() < 1e-6);
        assert!((t[1].re - d1).abs() < 1e-6 * (1.0 + d1.abs()) + h * h * t[3].re.abs() * 2.0);
        assert!((2.0 * t[2].re - d2).abs() < 1e-4 * (1.0 + d2.abs()) + h * h * t[4].re.abs() * 24.0);
    }

    #[test]
    fn truncation_bound_dominates() {
        let mut rng = crate::rng::seeded(10);
        let data = BoundaryData::random_rational(16, 5, &mut rng).unwrap();
        let ext = analytic_extension(&data, 0).unwrap();
        let r = 1.0 / 64.0;
        let bound = taylor_truncation_bound(&ext, 8, r).unwrap().to_f64();
        for i in 0..100 {
            let z = Complex64::from_polar(r * (i % 10) as f64 / 9.0, i as f64 * 0.37);
            let err = (ext.eval(z) - ext.taylor_eval(z, 8).unwrap()).norm();
            assert!(err <= bound, "{err} > {bound}");
        }
        let b9 = taylor_truncation_bound(&ext, 9, r).unwrap().to_f64();
        assert!((b9 / bound - 0.5).abs() < 1e-12);
        assert!(taylor_truncation_bound(&ext, 8, 1.0 / 32.0).is_err());

        let one = analytic_extension(&BoundaryData::constant(8, Scalar::integer(1)).unwrap(), 0).unwrap();
        let b = taylor_truncation_bound(&one, 3, r).unwrap().to_f64();
        let max_f = one.max_on(&ComplexRegion::omega());
        assert!((b - max_f * 0.5f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero_bound() {
        let data = BoundaryData::constant(16, Scalar::integer(0)).unwrap();
        let rep = propagate_smallness(&data, 0, 0.0, 1.0 / 128.0, &[0]).unwrap();
        assert_eq!(rep.certified_bound, 0.0);
        assert_eq!(rep.true_max, 0.0);
        assert!(rep.dominates);
    }

    #[test]
    fn constant_run_dominates() {
        let data = BoundaryData::constant(64, Scalar::integer(1)).unwrap();
        let rep = propagate_smallness(&data, 0, 1.0, DEFAULT_GAMMA, &[0]).unwrap();
        assert!(rep.certified_bound >= 1.0 - 1e-9);
        assert!((rep.true_max - 1.0).abs() < 1e-9);
        assert!(rep.dominates);
        assert_eq!(rep.segment_radius, 0);
        assert!(!rep.gamma_above_threshold);
    }

    #[test]
    fn wider_segment_runs() {
        let mut rng = crate::rng::seeded(21);
        let n = 128;
        let data = BoundaryData::random_signs(n, &mut rng).unwrap();
        let setup = PropagationSetup::new(n, 0).unwrap();
        let u = solve_direct_f64(&data, &SorOptions::default()).unwrap();
        let side = (2 * n + 1) as usize;
        let sigma = (-1..=1).map(|x: i64| u[n as usize * side + (x + n) as usize].abs()).fold(0.0, f64::max);
        let gamma = 0.01;
        let rep = propagate_with(&setup, &data, sigma, gamma, &[-1, 0, 1]).unwrap();
        assert_eq!((rep.j, rep.segment_radius), (3, 2));
        assert!(rep.gamma_above_threshold);
        assert!(rep.dominates, "{rep:?}");
        let expect = if setup.c0() * rep.m * (2.0 * gamma * TAYLOR_RATE) < sigma {
            PropagationCase::TaylorDominates
        } else {
            PropagationCase::SigmaDominates
        };
        assert_eq!(rep.case, expect);
    }

    #[test]
    fn propagation_preconditions() {
        let data = BoundaryData::constant(16, Scalar::integer(1)).unwrap();
        assert!(propagate_smallness(&data, 0, 1.0, 1.0 / 32.0, &[0]).is_err());
        assert!(propagate_smallness(&data, 0, 1.0, 1.0 / 128.0, &[]).is_err());
        assert!(propagate_smallness(&data, 0, 0.5, 1.0 / 128.0, &[0]).is_err());
        assert!(propagate_smallness(&data, 8, 1.0, 1.0 / 128.0, &[0]).is_err());
    }

    #[test]
    fn compose_examples() {
        let half = RemainderParams::new(1.0, 0.5, 1.0).unwrap();
        let comp = compose_remainders(&half, &half);
        assert_eq!((comp.beta, comp.big_c, comp.c), (0.75, 2.0, 0.5));
        let outer = RemainderParams::new(3.0, 0.4, 2.0).unwrap();
        let ident = RemainderParams::new(1.0, 1e-6, 5.0).unwrap();
        assert!((compose_remainders(&ident, &outer).beta - 0.4).abs() < 1e-5);
        assert!(RemainderParams::new(0.5, 0.5, 1.0).is_err());
        assert!(RemainderParams::new(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn three_circle_examples() {
        let sigma = 2.5;
        let flat = GridFunction::standard(Square::centered(16), ScalarKind::Rational, |_| Scalar::ratio(5, 2)).unwrap();
        let rep = three_circle_report(&flat, 16, sigma, ThreeCircleMode::Fit { c: 2.0 }).unwrap();
        assert_eq!(rep.alpha_hat, Some(0.0));
        let p = RemainderParams::new(1.0, 0.5, 1.0).unwrap();
        let rep = three_circle_report(&flat, 16, sigma, ThreeCircleMode::Params(p)).unwrap();
        assert_eq!(rep.holds, Some(true));
        assert!(three_circle_report(&flat, 16, 1.0, ThreeCircleMode::Fit { c: 2.0 }).is_err());

        let n = 64;
        let u = crate::gallery::chelkak34(n).unwrap();
        let sigma = u.max_abs_on(&Square::centered(n / 4)).unwrap().to_f64();
        let rep = three_circle_report(&u, n, sigma, ThreeCircleMode::Fit { c: 2.0 }).unwrap();
        assert!((rep.alpha_hat.unwrap() - 1.0 / 3.0).abs() < 0.01, "{rep:?}");
    }

    proptest! {
        #[test]
        fn composition_sweep(
            c1 in 1.0f64..10.0, b1 in 0.01f64..0.99, k1 in 0.01f64..3.0,
            c2 in 1.0f64..10.0, b2 in 0.01f64..0.99, k2 in 0.01f64..3.0,
            frac in 1e-6f64..1.0, m in 1e-3f64..1e6, n in 1.0f64..200.0,
        ) {
            let inner = RemainderParams::new(c1, b1, k1).unwrap();
            let outer = RemainderParams::new(c2, b2, k2).unwrap();
            prop_assert!(composition_dominates(&inner, &outer, frac * m, m, n));
        }
    }
}
