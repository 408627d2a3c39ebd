//! Banded Laurent series with complex coefficients.
//!
//! Ring operations, projections, derivatives and residues are exact on the
//! stored band. Everything that produces a genuinely infinite expansion
//! (reciprocals, quotients, logarithms) goes through samples on the roots of
//! unity and returns a truncated series together with a bound on what was
//! thrown away.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C = Complex64;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

/// Default relative tolerance for discarded spectral tails.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Samples below this fraction of the largest sample count as zeros.
pub const ZERO_ON_CIRCLE_RATIO: f64 = 1e-10;

/// Finite Laurent polynomial `sum_{d=lo}^{hi} c_d z^d`.
///
/// The band never carries exact zeros at either end; the zero series has an
/// empty coefficient vector.
#[derive(Clone, PartialEq, Default)]
pub struct LaurentSeries {
    lo: i64,
    coeffs: Vec<C>,
}

/// Which half of a series [`LaurentSeries::project`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    Geq,
    Leq,
}

impl LaurentSeries {
    pub fn new(lo: i64, coeffs: Vec<C>) -> Self {
        let mut s = LaurentSeries { lo, coeffs };
        s.normalize();
        s
    }

    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        Self::new(lo, coeffs.iter().map(|&x| C::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        LaurentSeries {
            lo: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(degree: i64, c: C) -> Self {
        Self::new(degree, vec![c])
    }

    /// The series `z`.
    pub fn z() -> Self {
        Self::monomial(1, ONE)
    }

    fn normalize(&mut self) {
        let first = self.coeffs.iter().position(|c| *c != ZERO);
        match first {
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
            Some(i) => {
                let last = self.coeffs.iter().rposition(|c| *c != ZERO).unwrap();
                self.coeffs.truncate(last + 1);
                self.coeffs.drain(..i);
                self.lo += i as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest stored degree (0 for the zero series).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored degree (`lo - 1` for the zero series).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn band(&self) -> Option<(i64, i64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.lo, self.hi()))
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: i64) -> C {
        let i = degree - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            ZERO
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Iterator over `(degree, coefficient)` pairs of the stored band.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.lo + i as i64, *c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest coefficient difference, `max_d |a_d - b_d|`.
    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn scale(&self, c: C) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C::new(c, 0.0))
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentSeries {
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Keeps degrees `>= k` (`Keep::Geq`) or `<= k` (`Keep::Leq`).
    pub fn project(&self, keep: Keep, k: i64) -> Self {
        match keep {
            Keep::Geq => self.restrict(k, i64::MAX),
            Keep::Leq => self.restrict(i64::MIN, k),
        }
    }

    pub fn geq(&self, k: i64) -> Self {
        self.project(Keep::Geq, k)
    }

    pub fn leq(&self, k: i64) -> Self {
        self.project(Keep::Leq, k)
    }

    /// `(f)_{>=0} - (f)_{<=-1}`.
    pub fn pi(&self) -> Self {
        &self.geq(0) - &self.leq(-1)
    }

    /// Keeps degrees in `[lo, hi]`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        if self.is_zero() || lo > hi {
            return Self::zero();
        }
        let a = lo.max(self.lo);
        let b = hi.min(self.hi());
        if a > b {
            return Self::zero();
        }
        let s = (a - self.lo) as usize;
        let e = (b - self.lo) as usize;
        Self::new(a, self.coeffs[s..=e].to_vec())
    }

    /// Drops end coefficients of modulus at most `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        let first = self.coeffs.iter().position(|c| c.norm() > eps);
        match first {
            None => Self::zero(),
            Some(i) => {
                let last = self.coeffs.iter().rposition(|c| c.norm() > eps).unwrap();
                Self::new(self.lo + i as i64, self.coeffs[i..=last].to_vec())
            }
        }
    }

    /// `(1/2 pi i) \oint f dz`, the coefficient of `z^-1`.
    pub fn residue(&self) -> C {
        self.coeff(-1)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.lo - 1,
            self.terms().map(|(d, c)| c * d as f64).collect(),
        )
    }

    /// `z d/dz`.
    pub fn z_derivative(&self) -> Self {
        Self::new(self.lo, self.terms().map(|(d, c)| c * d as f64).collect())
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(ONE);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Value at a point `z != 0`.
    pub fn eval(&self, z: C) -> C {
        if self.is_zero() {
            return ZERO;
        }
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }

    fn convolve(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let m = other.coeffs.len();
        let mut out = vec![ZERO; n + m - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.lo + other.lo, out)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.is_zero() {
            return other.scale_re(sign);
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let mut out = vec![ZERO; (hi - lo + 1) as usize];
        for (d, c) in self.terms() {
            out[(d - lo) as usize] += c;
        }
        for (d, c) in other.terms() {
            out[(d - lo) as usize] += c * sign;
        }
        Self::new(lo, out)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms() {
            if c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6e}{:+.6e}i)z^{}", c.re, c.im, d)?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&LaurentSeries> for &LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: &LaurentSeries) -> LaurentSeries {
                let f: fn(&LaurentSeries, &LaurentSeries) -> LaurentSeries = $body;
                f(self, rhs)
            }
        }
        impl $tr<LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: &LaurentSeries) -> LaurentSeries {
                (&self).$m(rhs)
            }
        }
        impl $tr<LaurentSeries> for &LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.combine(b, 1.0));
binop!(Sub, sub, |a, b| a.combine(b, -1.0));
binop!(Mul, mul, |a, b| a.convolve(b));

impl Mul<C> for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, c: C) -> LaurentSeries {
        self.scale(c)
    }
}

impl Mul<C> for LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, c: C) -> LaurentSeries {
        self.scale(c)
    }
}

impl Mul<f64> for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, c: f64) -> LaurentSeries {
        self.scale_re(c)
    }
}

impl Mul<f64> for LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, c: f64) -> LaurentSeries {
        self.scale_re(c)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale_re(-1.0)
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale_re(-1.0)
    }
}

impl AddAssign<&LaurentSeries> for LaurentSeries {
    fn add_assign(&mut self, rhs: &LaurentSeries) {
        *self = self.combine(rhs, 1.0);
    }
}

impl SubAssign<&LaurentSeries> for LaurentSeries {
    fn sub_assign(&mut self, rhs: &LaurentSeries) {
        *self = self.combine(rhs, -1.0);
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    lo: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            lo: self.lo,
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        if j.re.len() != j.im.len() {
            return Err(serde::de::Error::custom("re and im lengths differ"));
        }
        Ok(LaurentSeries::new(
            j.lo,
            j.re.iter()
                .zip(&j.im)
                .map(|(&r, &i)| C::new(r, i))
                .collect(),
        ))
    }
}

type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn fft_in_place(buf: &mut [C], inverse: bool) {
    let n = buf.len();
    let plan = PLANS.with(|p| {
        let mut p = p.borrow_mut();
        let (planner, cache) = &mut *p;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    });
    plan.process(buf);
}

/// The `m`-th roots of unity `exp(2 pi i j / m)`.
pub fn roots_of_unity(m: usize) -> Vec<C> {
    (0..m)
        .map(|j| C::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// Exact values of `f` at the `m`-th roots of unity (degrees are folded mod `m`).
pub fn sample(f: &LaurentSeries, m: usize) -> Vec<C> {
    let mut buf = vec![ZERO; m];
    for (d, c) in f.terms() {
        buf[d.rem_euclid(m as i64) as usize] += c;
    }
    fft_in_place(&mut buf, true);
    buf
}

/// Discrete Fourier coefficients of grid samples: entry `k` is the sum of
/// all series coefficients with degree congruent to `k` mod `m`.
pub fn spectrum(values: &[C]) -> Vec<C> {
    let m = values.len();
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, false);
    let s = 1.0 / m as f64;
    for c in buf.iter_mut() {
        *c *= s;
    }
    buf
}

/// `(1/2 pi i) \oint g(z) dz` over the unit circle from samples of `g`.
pub fn contour_integral(values: &[C]) -> C {
    let m = values.len();
    let s: C = values
        .iter()
        .enumerate()
        .map(|(j, v)| v * C::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .sum();
    s / m as f64
}

/// Smallest power of two exceeding `4 (hi - lo + 8)`.
pub fn default_grid(lo: i64, hi: i64) -> usize {
    let need = 4 * ((hi - lo).max(0) as usize + 8);
    (need + 1).next_power_of_two()
}

/// Samples of a series on the roots of unity, remembering the band they came from.
#[derive(Clone, Debug)]
pub struct CircleGrid {
    values: Vec<C>,
    source: Option<(i64, i64)>,
}

impl CircleGrid {
    /// Wraps raw samples; the source band is unknown so no alias check is possible.
    pub fn from_values(values: Vec<C>) -> Self {
        CircleGrid {
            values,
            source: None,
        }
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn source_band(&self) -> Option<(i64, i64)> {
        self.source
    }
}

pub fn grid_eval(f: &LaurentSeries, m: usize) -> CircleGrid {
    CircleGrid {
        values: sample(f, m),
        source: f.band(),
    }
}

/// Coefficients of degrees `lo..=hi` from grid samples.
///
/// Fails with `BandTooWide` when the grid cannot separate the band, and with
/// `Aliased` when the grid remembers a source band whose out-of-band degrees
/// fold onto the requested ones.
pub fn grid_to_series(g: &CircleGrid, lo: i64, hi: i64) -> Result<LaurentSeries> {
    let m = g.size();
    if hi < lo {
        return Ok(LaurentSeries::zero());
    }
    if m as i64 <= hi - lo {
        return Err(Error::BandTooWide { lo, hi, grid: m });
    }
    if let Some((slo, shi)) = g.source {
        let width = hi - lo;
        let hits = |d: i64| (d - lo).rem_euclid(m as i64) <= width;
        let segments = [(slo, (lo - 1).min(shi)), ((hi + 1).max(slo), shi)];
        for (a, b) in segments {
            if a > b {
                continue;
            }
            let span = (b - a + 1).min(m as i64);
            if let Some(d) = (a..a + span).find(|&d| hits(d)) {
                return Err(Error::Aliased {
                    degree: d,
                    lo,
                    hi,
                    grid: m,
                });
            }
        }
    }
    let spec = spectrum(&g.values);
    Ok(LaurentSeries::new(
        lo,
        (lo..=hi)
            .map(|d| spec[d.rem_euclid(m as i64) as usize])
            .collect(),
    ))
}

/// Options for the sampled transcendental operations.
#[derive(Clone, Copy, Debug)]
pub struct CircleOpts {
    pub tail_tol: f64,
    /// Grid size; `None` picks [`default_grid`] for the requested band.
    pub grid: Option<usize>,
}

impl Default for CircleOpts {
    fn default() -> Self {
        CircleOpts {
            tail_tol: DEFAULT_TAIL_TOL,
            grid: None,
        }
    }
}

impl CircleOpts {
    fn grid_for(&self, lo: i64, hi: i64) -> usize {
        self.grid.unwrap_or_else(|| default_grid(lo, hi))
    }
}

/// A truncated expansion with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct Certified {
    pub series: LaurentSeries,
    /// Largest discarded coefficient relative to the largest kept one.
    pub tail: f64,
    /// Max grid residual of the defining equation, relative to the scale of
    /// the right-hand side.
    pub residual: f64,
}

fn zero_check(values: &[C]) -> Result<()> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let min = values.iter().fold(f64::INFINITY, |m, v| m.min(v.norm()));
    if !(min > ZERO_ON_CIRCLE_RATIO * max) {
        return Err(Error::ZeroOnCircle { min, max });
    }
    Ok(())
}

/// Coefficients of degrees `[lo, hi]` from samples of an analytic function.
///
/// The spectrum is read on a window of `m` degrees centred on the band; the
/// part outside the band is the discarded tail, reported relative to the
/// largest kept coefficient and bounded by `tail_tol`.
pub fn series_from_samples(
    values: &[C],
    lo: i64,
    hi: i64,
    tail_tol: f64,
) -> Result<(LaurentSeries, f64)> {
    let m = values.len() as i64;
    if m <= hi - lo {
        return Err(Error::BandTooWide {
            lo,
            hi,
            grid: m as usize,
        });
    }
    let spec = spectrum(values);
    let start = (lo + hi).div_euclid(2) - m / 2;
    let mut kept = vec![ZERO; (hi - lo + 1) as usize];
    let mut kept_max = 0.0f64;
    let mut tail = 0.0f64;
    for d in start..start + m {
        let c = spec[d.rem_euclid(m) as usize];
        if d >= lo && d <= hi {
            kept[(d - lo) as usize] = c;
            kept_max = kept_max.max(c.norm());
        } else {
            tail = tail.max(c.norm());
        }
    }
    let rel = if kept_max > 0.0 {
        tail / kept_max
    } else if tail > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    if rel > tail_tol {
        return Err(Error::TruncationLoss {
            tail: rel,
            tol: tail_tol,
        });
    }
    Ok((LaurentSeries::new(lo, kept), rel))
}

/// Expansion of `num / den` on the unit circle, truncated to `[lo, hi]`.
pub fn divide_on_circle(
    num: &LaurentSeries,
    den: &LaurentSeries,
    lo: i64,
    hi: i64,
    opts: CircleOpts,
) -> Result<Certified> {
    let m = opts.grid_for(lo, hi);
    let dv = sample(den, m);
    zero_check(&dv)?;
    let nv = sample(num, m);
    let q: Vec<C> = nv.iter().zip(&dv).map(|(a, b)| a / b).collect();
    let (series, tail) = series_from_samples(&q, lo, hi, opts.tail_tol)?;
    let gv = sample(&series, m);
    let scale = nv
        .iter()
        .fold(0.0f64, |s, v| s.max(v.norm()))
        .max(f64::MIN_POSITIVE);
    let residual = gv
        .iter()
        .zip(&dv)
        .zip(&nv)
        .fold(0.0f64, |r, ((g, d), n)| r.max((g * d - n).norm()))
        / scale;
    Ok(Certified {
        series,
        tail,
        residual,
    })
}

/// Expansion of `1/f` on the unit circle, truncated to `[lo, hi]`.
pub fn reciprocal_on_circle_certified(
    f: &LaurentSeries,
    lo: i64,
    hi: i64,
    opts: CircleOpts,
) -> Result<Certified> {
    divide_on_circle(&LaurentSeries::constant(ONE), f, lo, hi, opts)
}

pub fn reciprocal_on_circle(
    f: &LaurentSeries,
    lo: i64,
    hi: i64,
    tail_tol: f64,
) -> Result<LaurentSeries> {
    reciprocal_on_circle_certified(
        f,
        lo,
        hi,
        CircleOpts {
            tail_tol,
            grid: None,
        },
    )
    .map(|c| c.series)
}

/// Winding number of sampled values around the origin, by phase unwrapping.
///
/// Also returns the unwrapped phases, starting from the principal argument of
/// the first sample.
pub fn unwrap_phase(values: &[C]) -> Result<(i64, Vec<f64>)> {
    zero_check(values)?;
    let mut phases = Vec::with_capacity(values.len());
    let mut acc = values[0].arg();
    phases.push(acc);
    let n = values.len();
    let mut total = 0.0;
    for j in 0..n {
        let a = values[j];
        let b = values[(j + 1) % n];
        let step = (b / a).arg();
        if step.abs() > PI / 2.0 {
            return Err(Error::WindingUnresolved { step });
        }
        total += step;
        if j + 1 < n {
            acc += step;
            phases.push(acc);
        }
    }
    Ok(((total / (2.0 * PI)).round() as i64, phases))
}

/// Principal-branch logarithm of a zero-winding function on the circle,
/// truncated to `[lo, hi]`.
pub fn log_on_circle_certified(
    f: &LaurentSeries,
    lo: i64,
    hi: i64,
    opts: CircleOpts,
) -> Result<Certified> {
    let m = opts.grid_for(lo, hi);
    let fv = sample(f, m);
    let (winding, phases) = unwrap_phase(&fv)?;
    if winding != 0 {
        return Err(Error::WindingNonzero { winding });
    }
    let lv: Vec<C> = fv
        .iter()
        .zip(&phases)
        .map(|(v, p)| C::new(v.norm().ln(), *p))
        .collect();
    let (series, tail) = series_from_samples(&lv, lo, hi, opts.tail_tol)?;
    let gv = sample(&series, m);
    let scale = fv.iter().fold(0.0f64, |s, v| s.max(v.norm()));
    let residual = gv
        .iter()
        .zip(&fv)
        .fold(0.0f64, |r, (g, v)| r.max((g.exp() - v).norm()))
        / scale;
    Ok(Certified {
        series,
        tail,
        residual,
    })
}

pub fn log_on_circle(f: &LaurentSeries, lo: i64, hi: i64, tail_tol: f64) -> Result<LaurentSeries> {
    log_on_circle_certified(
        f,
        lo,
        hi,
        CircleOpts {
            tail_tol,
            grid: None,
        },
    )
    .map(|c| c.series)
}

/// Taylor coefficients of `1/f` at `z = 0` up to degree `order`, by the
/// convolution recurrence.
pub fn taylor_reciprocal_at_zero(f: &LaurentSeries, order: usize) -> Result<LaurentSeries> {
    if f.is_zero() || f.lo() < 0 {
        return Err(Error::SingularAtZero);
    }
    let c0 = f.coeff(0);
    if c0 == ZERO {
        return Err(Error::SingularAtZero);
    }
    let mut r = vec![ZERO; order + 1];
    r[0] = ONE / c0;
    for n in 1..=order {
        let mut s = ZERO;
        for k in 1..=n {
            s += f.coeff(k as i64) * r[n - k];
        }
        r[n] = -s / c0;
    }
    Ok(LaurentSeries::new(0, r))
}
