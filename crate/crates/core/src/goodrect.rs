//! Good rectangles in sloped coordinates.
//!
//! A rectangle `R` is good when `a(R)/10 ≤ b(R) ≤ 10·a(R)` and
//! `max_R |U| ≤ A^{a(R)+b(R)}`. Side lengths are half-integers, so the test
//! is done on squares: `max_R U² ≤ A^{2(a+b)}` with an integer exponent.
//!
//! All geometry uses doubled coordinates. A square with doubled lower-left
//! corner `(a1, b1)` and doubled extent `L` covers `[a1, a1+L] × [b1, b1+L]`,
//! has side `(L+1)/2` and is good iff every cell has exponent `≤ 2L+2`,
//! where the exponent of a cell is the least `e ≥ 0` with `U² ≤ A^e`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::lattice::{GridFunction, HalfInt, SlopedCell, SlopedRect};
use crate::numeric::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodnessConfig {
    /// The base `A > 1`.
    #[serde(with = "crate::remez::rat_string")]
    pub base: BigRational,
    /// Largest allowed ratio between the two sides.
    pub aspect: i64,
    /// Largest bad-cell fraction of `Q_K` accepted by the square search.
    pub bad_threshold: f64,
}

impl Default for GoodnessConfig {
    fn default() -> Self {
        GoodnessConfig { base: BigRational::from_integer(7.into()), aspect: 10, bad_threshold: 1e-3 }
    }
}

impl GoodnessConfig {
    pub fn with_base(base: BigRational) -> Result<Self> {
        let cfg = GoodnessConfig { base, ..GoodnessConfig::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base <= BigRational::one() {
            return precondition(format!("base A must exceed 1, got {}", self.base));
        }
        if self.aspect < 1 {
            return precondition(format!("aspect bound must be >= 1, got {}", self.aspect));
        }
        if !(0.0..=1.0).contains(&self.bad_threshold) {
            return precondition(format!("bad threshold must lie in [0, 1], got {}", self.bad_threshold));
        }
        Ok(())
    }

    fn base_power(&self, e: u64) -> BigRational {
        Pow::pow(&self.base, e)
    }

    pub fn aspect_ok(&self, r: &SlopedRect) -> bool {
        let (a, b) = (r.a().doubled(), r.b().doubled());
        a <= self.aspect * b && b <= self.aspect * a
    }
}

/// Least `e ≥ 0` with `v² ≤ A^e`.
pub fn cell_exponent(v: &Scalar, cfg: &GoodnessConfig) -> Result<u64> {
    let kind = v.kind();
    if v.cmp_abs(&Scalar::one(kind))? != Ordering::Greater {
        return Ok(0);
    }
    let sq = v.checked_mul(v)?;
    let fits = |e: u64| -> Result<bool> {
        let p = Scalar::from_rational_in(&cfg.base_power(e), kind);
        Ok(sq.checked_cmp(&p)? != Ordering::Greater)
    };
    let ln_a = Scalar::rational(cfg.base.clone()).ln_abs();
    let guess = (2.0 * v.ln_abs() / ln_a).floor();
    let mut e = if guess.is_finite() && guess > 1.0 { guess as u64 - 1 } else { 0 };
    while !fits(e)? {
        e += 1;
    }
    while e > 0 && fits(e - 1)? {
        e -= 1;
    }
    Ok(e)
}

fn sloped_window(u: &GridFunction) -> Result<SlopedRect> {
    u.rect().ok_or_else(|| Error::Precondition("goodness tests need a sloped grid".into()))
}

fn check_inside(u: &GridFunction, r: &SlopedRect) -> Result<()> {
    let w = sloped_window(u)?;
    if !w.contains_rect(r) {
        return Err(Error::OutOfWindow(format!("{r} is not inside the window {w}")));
    }
    Ok(())
}

/// `max_R |U|` compared exactly with `A^{a(R)+b(R)}`.
pub fn is_good(u: &GridFunction, r: &SlopedRect, cfg: &GoodnessConfig) -> Result<bool> {
    check_inside(u, r)?;
    if !cfg.aspect_ok(r) {
        return Ok(false);
    }
    let limit = (r.a().doubled() + r.b().doubled()) as u64;
    let bound = Scalar::from_rational_in(&cfg.base_power(limit), u.kind());
    for c in r.cells() {
        let v = u.at_sloped(c)?;
        if v.checked_mul(v)?.checked_cmp(&bound)? == Ordering::Greater {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `nR` with the same center, for odd `n ≥ 1`.
pub fn dilate(r: &SlopedRect, n: i64) -> Result<SlopedRect> {
    if n < 1 || n % 2 == 0 {
        return precondition(format!("dilation factor must be odd and >= 1, got {n}"));
    }
    let (da, db) = ((n - 1) / 2 * r.a().doubled(), (n - 1) / 2 * r.b().doubled());
    SlopedRect::from_doubled(r.a1.doubled() - da, r.a2.doubled() + da, r.b1.doubled() - db, r.b2.doubled() + db)
}

/// The sloped square `[−K, K]²`.
pub fn sloped_q(k: i64) -> SlopedRect {
    SlopedRect { a1: HalfInt::int(-k), a2: HalfInt::int(k), b1: HalfInt::int(-k), b2: HalfInt::int(k) }
}

/// Cell exponents over a sloped rectangle, `None` off the cell parity.
#[derive(Clone, Debug)]
pub struct ExponentTable {
    region: SlopedRect,
    width: usize,
    values: Vec<Option<u64>>,
}

impl ExponentTable {
    pub fn new(u: &GridFunction, region: &SlopedRect, cfg: &GoodnessConfig) -> Result<Self> {
        check_inside(u, region)?;
        let (a1, a2, b1, b2) = (region.a1.doubled(), region.a2.doubled(), region.b1.doubled(), region.b2.doubled());
        let width = (a2 - a1 + 1) as usize;
        let coords: Vec<(i64, i64)> = (b1..=b2).flat_map(|k| (a1..=a2).map(move |s| (s, k))).collect();
        let values = coords
            .par_iter()
            .map(|&(s, k)| {
                if (s + k).rem_euclid(2) != 0 {
                    return Ok(None);
                }
                let c = SlopedCell::from_doubled(s, k)?;
                cell_exponent(u.at_sloped(c)?, cfg).map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExponentTable { region: *region, width, values })
    }

    pub fn get(&self, s2: i64, k2: i64) -> Option<u64> {
        let (i, j) = (s2 - self.region.a1.doubled(), k2 - self.region.b1.doubled());
        if i < 0 || j < 0 || i as usize >= self.width || k2 > self.region.b2.doubled() {
            return None;
        }
        self.values[j as usize * self.width + i as usize]
    }

    /// Largest exponent over the cells of `r`, `None` when `r` has no cells.
    pub fn max_on(&self, r: &SlopedRect) -> Option<u64> {
        r.cells().filter_map(|c| self.get(c.s2, c.k2)).max()
    }

    pub fn is_good(&self, r: &SlopedRect, cfg: &GoodnessConfig) -> bool {
        cfg.aspect_ok(r)
            && self.max_on(r).is_none_or(|e| e <= (r.a().doubled() + r.b().doubled()) as u64)
    }
}

/// Squares inside an ambient rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareFamily {
    pub ambient: SlopedRect,
    pub squares: Vec<SlopedRect>,
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    ambient: [HalfInt; 4],
    squares: Vec<[HalfInt; 4]>,
}

fn quad(r: &SlopedRect) -> [HalfInt; 4] {
    [r.a1, r.a2, r.b1, r.b2]
}

impl SquareFamily {
    pub fn new(ambient: SlopedRect, squares: Vec<SlopedRect>) -> Result<Self> {
        if let Some(s) = squares.iter().find(|s| !s.is_square() || !ambient.contains_rect(s)) {
            return precondition(format!("{s} is not a square inside {ambient}"));
        }
        Ok(SquareFamily { ambient, squares })
    }

    pub fn to_json(&self) -> Result<String> {
        let f = FamilyFile { ambient: quad(&self.ambient), squares: self.squares.iter().map(quad).collect() };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: FamilyFile = serde_json::from_str(text)?;
        let rect = |q: [HalfInt; 4]| SlopedRect::new(q[0], q[1], q[2], q[3]);
        SquareFamily::new(rect(f.ambient)?, f.squares.into_iter().map(rect).collect::<Result<_>>()?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("a1,a2,b1,b2,side\n");
        for s in &self.squares {
            out.push_str(&format!("{},{},{},{},{}\n", s.a1, s.a2, s.b1, s.b2, s.a()));
        }
        out
    }
}

/// Good squares meeting `seed` with no strictly larger good square inside
/// `ambient`, ordered by decreasing size, then corner.
pub fn maximal_good_squares(
    u: &GridFunction,
    ambient: &SlopedRect,
    cfg: &GoodnessConfig,
    seed: &SlopedRect,
) -> Result<SquareFamily> {
    cfg.validate()?;
    let table = ExponentTable::new(u, ambient, cfg)?;
    let (a0, b0) = (ambient.a1.doubled(), ambient.b1.doubled());
    let wa = (ambient.a2.doubled() - a0 + 1) as usize;
    let wb = (ambient.b2.doubled() - b0 + 1) as usize;
    let top = wa.min(wb);
    // max_e[L][(j, i)] over the square of extent L at corner (a0+i, b0+j), −1 if no cell.
    let mut good: Vec<Vec<bool>> = Vec::with_capacity(top);
    let mut cur: Vec<i64> = (0..wb)
        .flat_map(|j| (0..wa).map(move |i| (i, j)))
        .map(|(i, j)| table.get(a0 + i as i64, b0 + j as i64).map_or(-1, |e| e as i64))
        .collect();
    for l in 0..top {
        let (na, nb) = (wa - l, wb - l);
        if l > 0 {
            let (pa, _) = (na + 1, nb + 1);
            let prev = cur;
            cur = (0..nb)
                .flat_map(|j| (0..na).map(move |i| (i, j)))
                .map(|(i, j)| {
                    prev[j * pa + i].max(prev[j * pa + i + 1]).max(prev[(j + 1) * pa + i]).max(prev[(j + 1) * pa + i + 1])
                })
                .collect();
        }
        let limit = 2 * l as i64 + 2;
        good.push(cur.iter().map(|&m| m >= 0 && m <= limit).collect());
    }
    // covered[L]: some good square of extent ≥ L contains the square at L.
    let mut covered: Vec<Vec<bool>> = vec![Vec::new(); top];
    let mut out = Vec::new();
    for l in (0..top).rev() {
        let (na, nb) = (wa - l, wb - l);
        let mut cov = good[l].clone();
        for j in 0..nb {
            for i in 0..na {
                let idx = j * na + i;
                let above = l + 1 < top && {
                    let pa = na - 1;
                    let up = &covered[l + 1];
                    let mut any = false;
                    for (di, dj) in [(0usize, 0usize), (1, 0), (0, 1), (1, 1)] {
                        if i >= di && j >= dj && i - di < pa && j - dj < nb - 1 && up[(j - dj) * pa + (i - di)] {
                            any = true;
                        }
                    }
                    any
                };
                if good[l][idx] && !above {
                    let a1 = a0 + i as i64;
                    let b1 = b0 + j as i64;
                    let r = SlopedRect::from_doubled(a1, a1 + l as i64, b1, b1 + l as i64)?;
                    if r.intersect(seed).is_some() {
                        out.push(r);
                    }
                }
                cov[idx] = cov[idx] || above;
            }
        }
        covered[l] = cov;
    }
    out.sort_by_key(|r| (std::cmp::Reverse(r.a().doubled()), r.b1, r.a1));
    SquareFamily::new(*ambient, out)
}

/// Greedy largest-first selection of pairwise disjoint squares; ties by
/// center (lexicographic), then by input index.
pub fn vitali_select(fam: &SquareFamily) -> SquareFamily {
    let mut order: Vec<usize> = (0..fam.squares.len()).collect();
    order.sort_by_key(|&i| {
        let s = &fam.squares[i];
        (std::cmp::Reverse(s.a().doubled()), s.center_x4(), i)
    });
    let mut chosen: Vec<SlopedRect> = Vec::new();
    for i in order {
        let s = fam.squares[i];
        if chosen.iter().all(|c| c.intersect(&s).is_none()) {
            chosen.push(s);
        }
    }
    SquareFamily { ambient: fam.ambient, squares: chosen }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    pub disjoint: bool,
    pub covered: bool,
    /// A pair of overlapping selected squares, or an uncovered cell.
    pub witness: Option<String>,
}

/// Checks pairwise disjointness of `selected` and that the 3-dilates of
/// `selected` cover every cell of `input`.
pub fn check_cover(input: &SquareFamily, selected: &SquareFamily) -> Result<CoverCheck> {
    for (i, a) in selected.squares.iter().enumerate() {
        for b in &selected.squares[i + 1..] {
            if a.intersect(b).is_some() {
                return Ok(CoverCheck { disjoint: false, covered: false, witness: Some(format!("{a} meets {b}")) });
            }
        }
    }
    let tripled: Vec<SlopedRect> = selected.squares.iter().map(|s| dilate(s, 3)).collect::<Result<_>>()?;
    for s in &input.squares {
        if tripled.iter().any(|t| t.contains_rect(s)) {
            continue;
        }
        if let Some(c) = s.cells().find(|&c| !tripled.iter().any(|t| t.contains(c))) {
            return Ok(CoverCheck { disjoint: true, covered: false, witness: Some(format!("cell {c} of {s}")) });
        }
    }
    Ok(CoverCheck { disjoint: true, covered: true, witness: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Up,
    Left,
    Down,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Right => "right",
            Direction::Up => "up",
            Direction::Left => "left",
            Direction::Down => "down",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Direction::Right),
            "up" => Ok(Direction::Up),
            "left" => Ok(Direction::Left),
            "down" => Ok(Direction::Down),
            _ => precondition(format!("unknown direction {s:?}")),
        }
    }
}

/// A rectangle in a frame where the growing side runs upwards: `t` is the
/// fixed axis, `v` the growing one, all doubled.
#[derive(Clone, Copy, Debug)]
struct Frame {
    dir: Direction,
}

impl Frame {
    fn to_sloped(&self, t: i64, v: i64) -> (i64, i64) {
        match self.dir {
            Direction::Up => (t, v),
            Direction::Down => (t, -v),
            Direction::Right => (v, t),
            Direction::Left => (-v, t),
        }
    }

    fn rect(&self, t1: i64, t2: i64, v1: i64, v2: i64) -> Result<SlopedRect> {
        let (p, q) = (self.to_sloped(t1, v1), self.to_sloped(t2, v2));
        SlopedRect::from_doubled(p.0.min(q.0), p.0.max(q.0), p.1.min(q.1), p.1.max(q.1))
    }

    /// `(t1, t2, v1, v2)` of a sloped rectangle.
    fn coords(&self, r: &SlopedRect) -> (i64, i64, i64, i64) {
        let (a1, a2, b1, b2) = (r.a1.doubled(), r.a2.doubled(), r.b1.doubled(), r.b2.doubled());
        match self.dir {
            Direction::Up => (a1, a2, b1, b2),
            Direction::Down => (a1, a2, -b2, -b1),
            Direction::Right => (b1, b2, a1, a2),
            Direction::Left => (b1, b2, -a2, -a1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandLine {
    pub band: usize,
    /// Doubled height of the line above the bottom of `R`.
    pub height_doubled: i64,
    pub small_fraction: f64,
    /// Least `e` with `max U² ≤ A^e` over `R` extended up to this line.
    pub max_exponent: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub side_doubled: i64,
    pub rect: SlopedRect,
    /// `None` when the rectangle leaves the window.
    pub good: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub rect: SlopedRect,
    pub direction: Direction,
    /// Cells with `|U| > 1` in the rectangle of tripled height, if it fits.
    pub bad_cells: Option<u64>,
    pub rect_cells: u64,
    pub hypothesis_holds: bool,
    /// `true` when `b ≤ 40`, where the forty bands may contain no line.
    pub small_case: bool,
    pub bands: Vec<BandLine>,
    pub missing_band: Option<usize>,
    pub candidates: Vec<Candidate>,
    pub all_good: bool,
}

fn count_bad(u: &GridFunction, r: &SlopedRect) -> Result<u64> {
    let one = Scalar::one(u.kind());
    let mut n = 0;
    for c in r.cells() {
        if u.at_sloped(c)?.cmp_abs(&one)? == Ordering::Greater {
            n += 1;
        }
    }
    Ok(n)
}

/// Grows the side of `r` in `direction` from `b` to each `b' ∈ [3b/2, 2b]`
/// and records which of the grown rectangles are good, following the
/// band-line procedure. `r` must be good with its other side `≥ b`.
pub fn expand_good(u: &GridFunction, r: &SlopedRect, direction: Direction, cfg: &GoodnessConfig) -> Result<ExpansionReport> {
    cfg.validate()?;
    if !is_good(u, r, cfg)? {
        return precondition(format!("{r} is not good"));
    }
    let window = sloped_window(u)?;
    let frame = Frame { dir: direction };
    let (t1, t2, v1, v2) = frame.coords(r);
    let (fixed, grow) = (t2 - t1 + 1, v2 - v1 + 1);
    if fixed < grow {
        return precondition(format!("{r}: the fixed side must be at least the growing side"));
    }
    let rect_cells = r.cell_count() as u64;
    let tripled = frame.rect(t1, t2, v1, v1 + 3 * grow - 1)?;
    let bad_cells = if window.contains_rect(&tripled) { Some(count_bad(u, &tripled)?) } else { None };
    let hypothesis_holds = bad_cells.is_some_and(|b| b * 100_000 < rect_cells);

    let small_case = grow <= 80;
    let mut bands = Vec::new();
    let mut missing_band = None;
    if !small_case {
        let one = Scalar::one(u.kind());
        for k in 1..=40i64 {
            // Doubled heights h with b(1+(2k−1)/40) < h/2 < b(1+2k/40), i.e.
            // grow·(40+2k−1) < 40h < grow·(40+2k).
            let lo = (grow * (40 + 2 * k - 1)).div_euclid(40) + 1;
            let hi = (grow * (40 + 2 * k) - 1).div_euclid(40);
            let mut found = None;
            for h in lo..=hi {
                let line = frame.rect(t1, t2, v1 + h - 1, v1 + h - 1)?;
                if !window.contains_rect(&line) {
                    break;
                }
                let cells: Vec<SlopedCell> = line.cells().collect();
                let mut small = 0usize;
                for c in &cells {
                    if u.at_sloped(*c)?.cmp_abs(&one)? != Ordering::Greater {
                        small += 1;
                    }
                }
                if 2 * small >= cells.len() && !cells.is_empty() {
                    found = Some((h, small as f64 / cells.len() as f64));
                    break;
                }
            }
            match found {
                Some((h, frac)) => {
                    let grown = frame.rect(t1, t2, v1, v1 + h - 1)?;
                    let table = ExponentTable::new(u, &grown, cfg)?;
                    bands.push(BandLine {
                        band: k as usize,
                        height_doubled: h,
                        small_fraction: frac,
                        max_exponent: table.max_on(&grown),
                    });
                }
                None => {
                    missing_band = Some(k as usize);
                    break;
                }
            }
        }
    }

    let mut candidates = Vec::new();
    let lo = (3 * grow + 1) / 2;
    for side in lo..=2 * grow {
        let rect = frame.rect(t1, t2, v1, v1 + side - 1)?;
        let good = if window.contains_rect(&rect) { Some(is_good(u, &rect, cfg)?) } else { None };
        candidates.push(Candidate { side_doubled: side, rect, good });
    }
    let all_good = candidates.iter().all(|c| c.good == Some(true));
    Ok(ExpansionReport {
        rect: *r,
        direction,
        bad_cells,
        rect_cells,
        hypothesis_holds,
        small_case,
        bands,
        missing_band,
        candidates,
        all_good,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleReport {
    pub steps: Vec<(Direction, SlopedRect, bool)>,
    pub tripled: SlopedRect,
    pub tripled_good: bool,
}

/// Grows a good square `R` to `3R`: right to double width, up to double
/// height, left to triple width, down to triple height. Each step is
/// checked directly; the last rectangle equals `3R`.
pub fn triple_square(u: &GridFunction, r: &SlopedRect, cfg: &GoodnessConfig) -> Result<TripleReport> {
    if !r.is_square() {
        return precondition(format!("{r} is not a square"));
    }
    let s = r.a().doubled();
    let (a1, b1, b2) = (r.a1.doubled(), r.b1.doubled(), r.b2.doubled());
    let path = [
        (Direction::Right, SlopedRect::from_doubled(a1, a1 + 2 * s - 1, b1, b2)?),
        (Direction::Up, SlopedRect::from_doubled(a1, a1 + 2 * s - 1, b1, b1 + 2 * s - 1)?),
        (Direction::Left, SlopedRect::from_doubled(a1 - s, a1 + 2 * s - 1, b1, b1 + 2 * s - 1)?),
        (Direction::Down, SlopedRect::from_doubled(a1 - s, a1 + 2 * s - 1, b1 - s, b1 + 2 * s - 1)?),
    ];
    let tripled = dilate(r, 3)?;
    debug_assert_eq!(path[3].1, tripled);
    let window = sloped_window(u)?;
    let mut steps = Vec::new();
    for (d, rect) in path {
        let good = window.contains_rect(&rect) && is_good(u, &rect, cfg)?;
        steps.push((d, rect, good));
    }
    let tripled_good = steps[3].2;
    Ok(TripleReport { steps, tripled, tripled_good })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectedDiagnostic {
    pub square: SlopedRect,
    /// Cells with `|U| > 1` in `9R` within the window.
    pub bad_in_nine: u64,
    pub cells: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub k: i64,
    pub bad_cells: u64,
    pub total_cells: u64,
    pub bad_fraction: f64,
    pub threshold: f64,
    pub ambient: Option<SlopedRect>,
    pub maximal_squares: usize,
    pub candidates_examined: usize,
    /// Vitali selection of the maximal squares with their `9R` bad counts.
    pub selected: Vec<SelectedDiagnostic>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { square: SlopedRect, seed_square: SlopedRect, report: SearchReport },
    Absent { report: SearchReport },
}

/// Looks for a good square between `Q_{⌊K/100⌋}` and `Q_K`.
///
/// Maximal good squares are taken inside the largest centered square whose
/// 9-dilate fits in `Q_K`, seeded by `Q_{⌊K/100⌋}`. A square `R₀` with side
/// `≥ K/50` whose `9R₀` has fewer than `|R₀|/10⁵` bad cells yields `3R₀`
/// once `3R₀` is checked to be good.
pub fn find_good_square(u: &GridFunction, k: i64, cfg: &GoodnessConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    if k < 1 {
        return precondition(format!("K must be >= 1, got {k}"));
    }
    let qk = sloped_q(k);
    check_inside(u, &qk)?;
    let bad_cells = count_bad(u, &qk)?;
    let total_cells = qk.cell_count() as u64;
    let bad_fraction = bad_cells as f64 / total_cells as f64;
    let mut report = SearchReport {
        k,
        bad_cells,
        total_cells,
        bad_fraction,
        threshold: cfg.bad_threshold,
        ambient: None,
        maximal_squares: 0,
        candidates_examined: 0,
        selected: Vec::new(),
    };
    let r_amb = (k - 2).div_euclid(9);
    let r_seed = k / 100;
    if bad_fraction > cfg.bad_threshold || r_amb < r_seed.max(1) {
        return Ok(SearchOutcome::Absent { report });
    }
    let ambient = sloped_q(r_amb);
    report.ambient = Some(ambient);
    let fam = maximal_good_squares(u, &ambient, cfg, &sloped_q(r_seed))?;
    report.maximal_squares = fam.squares.len();
    for r0 in &fam.squares {
        if 50 * r0.a().doubled() < 2 * k {
            continue;
        }
        let nine = dilate(r0, 9)?;
        if !qk.contains_rect(&nine) {
            continue;
        }
        report.candidates_examined += 1;
        if count_bad(u, &nine)? * 100_000 >= r0.cell_count() as u64 {
            continue;
        }
        let three = dilate(r0, 3)?;
        if is_good(u, &three, cfg)? {
            return Ok(SearchOutcome::Found { square: three, seed_square: *r0, report });
        }
    }
    let window = sloped_window(u)?;
    for s in vitali_select(&fam).squares {
        let nine = dilate(&s, 9)?;
        let clipped = nine.intersect(&window);
        let bad = match clipped {
            Some(c) => count_bad(u, &c)?,
            None => 0,
        };
        report.selected.push(SelectedDiagnostic { square: s, bad_in_nine: bad, cells: s.cell_count() as u64 });
    }
    Ok(SearchOutcome::Absent { report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ScalarKind;
    use proptest::prelude::*;
    use rand::Rng;

    fn zero_grid(k: i64) -> GridFunction {
        GridFunction::sloped(sloped_q(k), ScalarKind::Rational, |_| Scalar::integer(0)).unwrap()
    }

    fn sq(a1: i64, b1: i64, l: i64) -> SlopedRect {
        SlopedRect::from_doubled(a1, a1 + l, b1, b1 + l).unwrap()
    }

    #[test]
    fn goodness_examples() {
        let cfg = GoodnessConfig::default();
        let u = zero_grid(10);
        let r = sq(-4, -4, 6);
        assert!(is_good(&u, &r, &cfg).unwrap());
        let thin = SlopedRect::from_doubled(-19, 19, 0, 0).unwrap();
        assert_eq!((thin.a().doubled(), thin.b().doubled()), (39, 1));
        assert!(!is_good(&u, &thin, &cfg).unwrap());
        // One value A^{a+b} + 1 with a = b = 7/2.
        let mut v = u.clone();
        let c = SlopedCell::from_doubled(0, 0).unwrap();
        v.set_sloped(c, Scalar::integer(7i64.pow(7) + 1)).unwrap();
        assert!(!is_good(&v, &r, &cfg).unwrap());
        v.set_sloped(c, Scalar::integer(7i64.pow(7))).unwrap();
        assert!(is_good(&v, &r, &cfg).unwrap());
        assert!(is_good(&u, &sq(-30, 0, 2), &cfg).is_err());
    }

    #[test]
    fn exponents() {
        let cfg = GoodnessConfig::default();
        let e = |v: Scalar| cell_exponent(&v, &cfg).unwrap();
        assert_eq!(e(Scalar::integer(0)), 0);
        assert_eq!(e(Scalar::integer(-1)), 0);
        assert_eq!(e(Scalar::ratio(3, 2)), 1);
        assert_eq!(e(Scalar::integer(7)), 2);
        assert_eq!(e(Scalar::integer(8)), 3);
        assert_eq!(e(Scalar::integer(343)), 6);
        let big = Scalar::rational(Pow::pow(&BigRational::from_integer(7.into()), 400u32));
        assert_eq!(e(big), 800);
        let root = Scalar::quadratic(BigRational::from_integer(0.into()), BigRational::from_integer(1.into()), 7).unwrap();
        assert_eq!(e(root), 1);
    }

    #[test]
    fn dilate_examples() {
        let r = sq(0, 0, 0);
        assert_eq!(dilate(&r, 1).unwrap(), r);
        let three = dilate(&r, 3).unwrap();
        assert_eq!(three.a().doubled(), 3);
        assert_eq!(three.center_x4(), r.center_x4());
        let big = sq(-3, 5, 4);
        let (d3, d9) = (dilate(&big, 3).unwrap(), dilate(&big, 9).unwrap());
        assert!(d9.contains_rect(&d3) && d3.contains_rect(&big));
        assert_eq!(d9.a().doubled(), 9 * big.a().doubled());
        assert!(dilate(&big, 2).is_err());
    }

    #[test]
    fn maximal_on_zero_is_ambient() {
        let cfg = GoodnessConfig::default();
        let u = zero_grid(6);
        let fam = maximal_good_squares(&u, &sloped_q(4), &cfg, &sloped_q(0)).unwrap();
        assert_eq!(fam.squares, vec![sloped_q(4)]);
    }

    #[test]
    fn maximal_on_huge_is_empty() {
        let cfg = GoodnessConfig::default();
        let huge = Scalar::rational(Pow::pow(&BigRational::from_integer(7.into()), 200u32));
        let u = GridFunction::sloped(sloped_q(5), ScalarKind::Rational, |_| huge.clone()).unwrap();
        let fam = maximal_good_squares(&u, &sloped_q(5), &cfg, &sloped_q(5)).unwrap();
        assert!(fam.squares.is_empty());
    }

    fn spiky(k: i64, seed: u64) -> GridFunction {
        let mut rng = crate::rng::seeded(seed);
        GridFunction::sloped(sloped_q(k), ScalarKind::Rational, |_| {
            if rng.random_range(0..12) == 0 {
                Scalar::integer(7i64.pow(rng.random_range(1..9)))
            } else {
                Scalar::integer(0)
            }
        })
        .unwrap()
    }

    fn strict_supersquares(r: &SlopedRect, amb: &SlopedRect) -> Vec<SlopedRect> {
        let mut out = Vec::new();
        let l0 = r.a().doubled() - 1;
        let top = amb.a2.doubled() - amb.a1.doubled();
        for l in l0 + 1..=top {
            for a1 in r.a2.doubled() - l..=r.a1.doubled() {
                for b1 in r.b2.doubled() - l..=r.b1.doubled() {
                    let s = sq(a1, b1, l);
                    if amb.contains_rect(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn maximal_squares_are_maximal() {
        let cfg = GoodnessConfig::default();
        for seed in 0..4 {
            let u = spiky(6, seed);
            let amb = sloped_q(5);
            let fam = maximal_good_squares(&u, &amb, &cfg, &sloped_q(2)).unwrap();
            assert!(!fam.squares.is_empty());
            for r in &fam.squares {
                assert!(is_good(&u, r, &cfg).unwrap());
                assert!(r.intersect(&sloped_q(2)).is_some());
                for s in strict_supersquares(r, &amb) {
                    assert!(!is_good(&u, &s, &cfg).unwrap(), "{s} contains {r}");
                }
            }
            for (i, a) in fam.squares.iter().enumerate() {
                for b in &fam.squares[i + 1..] {
                    assert!(!a.contains_rect(b) && !b.contains_rect(a));
                }
            }
            // Every good square meeting the seed lies in some listed one.
            let table = ExponentTable::new(&u, &amb, &cfg).unwrap();
            for l in 0..=20 {
                for a1 in -10..=10 - l {
                    for b1 in -10..=10 - l {
                        let s = sq(a1, b1, l);
                        if s.cell_count() > 0 && s.intersect(&sloped_q(2)).is_some() && table.is_good(&s, &cfg) {
                            assert!(fam.squares.iter().any(|m| m.contains_rect(&s)), "{s}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vitali_examples() {
        let amb = sloped_q(20);
        let one = SquareFamily::new(amb, vec![sq(0, 0, 4)]).unwrap();
        assert_eq!(vitali_select(&one), one);
        let two = SquareFamily::new(amb, vec![sq(0, 0, 4), sq(10, 10, 4)]).unwrap();
        assert_eq!(vitali_select(&two).squares.len(), 2);
        let nested = SquareFamily::new(amb, vec![sq(0, 0, 2), sq(-2, -2, 8), sq(4, 4, 6)]).unwrap();
        let sel = vitali_select(&nested);
        assert_eq!(sel.squares[0], sq(-2, -2, 8));
        let chk = check_cover(&nested, &sel).unwrap();
        assert!(chk.disjoint && chk.covered);
        let bad = SquareFamily::new(amb, vec![sq(0, 0, 4), sq(2, 2, 4)]).unwrap();
        assert!(!check_cover(&bad, &bad).unwrap().disjoint);
    }

    #[test]
    fn family_json_round_trip() {
        let fam = SquareFamily::new(sloped_q(9), vec![sq(-3, 1, 4), sq(0, -1, 1)]).unwrap();
        let text = fam.to_json().unwrap();
        assert!(text.contains("\"-3/2\""));
        assert_eq!(SquareFamily::from_json(&text).unwrap(), fam);
        assert!(SquareFamily::new(sloped_q(1), vec![sq(0, 0, 6)]).is_err());
    }

    #[test]
    fn expansion_on_zero() {
        let cfg = GoodnessConfig::default();
        let u = zero_grid(12);
        for dir in [Direction::Right, Direction::Up, Direction::Left, Direction::Down] {
            let rep = expand_good(&u, &sq(-3, -3, 6), dir, &cfg).unwrap();
            assert!(rep.hypothesis_holds);
            assert!(rep.all_good, "{dir}");
            assert_eq!(rep.candidates.len(), 4);
            assert!(rep.small_case);
        }
        let rep = expand_good(&u, &sq(-3, -3, 6), Direction::Up, &cfg).unwrap();
        assert_eq!(rep.candidates[0].rect, SlopedRect::from_doubled(-3, 3, -3, 7).unwrap());
    }

    #[test]
    fn expansion_bands_on_large_rect() {
        let cfg = GoodnessConfig::default();
        let u = zero_grid(62);
        let rep = expand_good(&u, &sq(-40, -120, 80), Direction::Up, &cfg).unwrap();
        assert!(!rep.small_case && rep.hypothesis_holds && rep.all_good);
        assert_eq!(rep.bands.len(), 40);
        assert_eq!(rep.missing_band, None);
        for (i, b) in rep.bands.iter().enumerate() {
            assert!(81 * (40 + 2 * (i as i64 + 1) - 1) < 40 * b.height_doubled);
            assert_eq!(b.small_fraction, 1.0);
        }
    }

    #[test]
    fn expansion_hypothesis_fails_on_dense_block() {
        let cfg = GoodnessConfig::default();
        let u = GridFunction::sloped(sloped_q(12), ScalarKind::Rational, |c| {
            Scalar::integer(if c.k2 > 8 { 1_000_000 } else { 0 })
        })
        .unwrap();
        let r = sq(-3, -3, 6);
        let rep = expand_good(&u, &r, Direction::Up, &cfg).unwrap();
        assert!(!rep.hypothesis_holds);
        let tripled = SlopedRect::from_doubled(-3, 3, -3, 17).unwrap();
        let expect = tripled.cells().filter(|c| c.k2 > 8).count() as u64;
        assert_eq!(rep.bad_cells, Some(expect));
    }

    #[test]
    fn tripling_path_ends_at_three_r() {
        let cfg = GoodnessConfig::default();
        let u = zero_grid(12);
        let r = sq(-1, -1, 2);
        let rep = triple_square(&u, &r, &cfg).unwrap();
        assert_eq!(rep.steps[3].1, dilate(&r, 3).unwrap());
        assert!(rep.tripled_good && rep.steps.iter().all(|s| s.2));
    }

    #[test]
    fn search_examples() {
        let cfg = GoodnessConfig::default();
        let u = zero_grid(200);
        match find_good_square(&u, 200, &cfg).unwrap() {
            SearchOutcome::Found { square, .. } => assert!(square.contains_rect(&sloped_q(2))),
            other => panic!("{other:?}"),
        }
        let dense = GridFunction::sloped(sloped_q(30), ScalarKind::Rational, |c| {
            Scalar::integer(if c.s2 > -40 { 1_000_000 } else { 0 })
        })
        .unwrap();
        match find_good_square(&dense, 30, &cfg).unwrap() {
            SearchOutcome::Absent { report } => {
                let expect = sloped_q(30).cells().filter(|c| c.s2 > -40).count() as u64;
                assert_eq!(report.bad_cells, expect);
                assert!(report.bad_fraction > 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn goodness_is_monotone(vals in proptest::collection::vec(0i64..3000, 81), cut in 0i64..3000) {
            let cfg = GoodnessConfig::default();
            let r = sloped_q(2);
            let mut it = vals.iter();
            let big = GridFunction::sloped(sloped_q(2), ScalarKind::Rational, |_| Scalar::integer(*it.next().unwrap())).unwrap();
            let small = big.map(ScalarKind::Rational, |v| if v.to_f64() > cut as f64 { Scalar::integer(cut) } else { v.clone() }).unwrap();
            if is_good(&big, &r, &cfg).unwrap() {
                prop_assert!(is_good(&small, &r, &cfg).unwrap());
            }
            let table = ExponentTable::new(&big, &r, &cfg).unwrap();
            prop_assert_eq!(table.is_good(&r, &cfg), is_good(&big, &r, &cfg).unwrap());
        }

        #[test]
        fn vitali_fuzz(raw in proptest::collection::vec((-30i64..30, -30i64..30, 0i64..12), 1..20)) {
            let amb = SlopedRect::from_doubled(-60, 60, -60, 60).unwrap();
            let fam = SquareFamily::new(amb, raw.iter().map(|&(a, b, l)| sq(a, b, l)).collect()).unwrap();
            let sel = vitali_select(&fam);
            let chk = check_cover(&fam, &sel).unwrap();
            prop_assert!(chk.disjoint && chk.covered, "{:?}", chk.witness);
        }
    }
}
