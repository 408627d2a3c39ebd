//! Flat coordinates `(t, u, v)`.
//!
//! On the curve `Gamma = w(S^1)` the inverse map `z(w)` satisfies
//! `log(z(w)/w) = sum_n t_n w^n`, the nonnegative half coming from `-log f_0`
//! and the negative half from `log(f_infinity/w)`. Pulling back to the unit
//! circle gives `t_n = (1/2 pi i) \oint log(z/w) w^{-n-1} w' dz`. Together with
//! `u = log ub_{-1}` and `v = ub_0` these are flat for the metric.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canonical::w_power_times_w_prime;
use crate::error::{Error, Result};
use crate::laurent::{
    contour_integral, roots_of_unity, sample, series_from_samples, LaurentSeries, C, ONE, ZERO,
};
use crate::manifold::{check_membership, Cotangent, Point, Structure, Tangent};

/// Default range `|n| <= N_MAX` of computed `t_n`.
pub const DEFAULT_N_MAX: i64 = 16;
/// Magnitude below which a computed `t_n` is reported as zero.
pub const T_ZERO_FLOOR: f64 = 1e-14;

/// A point in flat coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatChart {
    pub t: BTreeMap<i64, C>,
    pub u: C,
    pub v: C,
}

impl FlatChart {
    /// `t_n`, zero outside the stored range.
    pub fn t(&self, n: i64) -> C {
        self.t.get(&n).copied().unwrap_or(ZERO)
    }

    /// Largest coordinate difference, over the union of stored indices.
    pub fn dist(&self, other: &FlatChart) -> f64 {
        let mut d = (self.u - other.u).norm().max((self.v - other.v).norm());
        for n in self.t.keys().chain(other.t.keys()) {
            d = d.max((self.t(*n) - other.t(*n)).norm());
        }
        d
    }

    /// `t(w) = sum_n t_n w^n` and its derivative.
    fn exponent(&self, w: C) -> (C, C) {
        let mut f = ZERO;
        let mut df = ZERO;
        for (&n, &c) in &self.t {
            let wn = w.powi(n as i32);
            f += c * wn;
            df += c * n as f64 * wn / w;
        }
        (f, df)
    }
}

/// Coordinate directions of the flat chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FlatIndex {
    T(i64),
    U,
    V,
}

impl std::fmt::Display for FlatIndex {
    /// `t:<n>`, `u`, `v`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlatIndex::T(n) => write!(f, "t:{n}"),
            FlatIndex::U => write!(f, "u"),
            FlatIndex::V => write!(f, "v"),
        }
    }
}

/// Samples of `w`, `w'` and `log(z/w)` on a grid of the structure's size.
struct CurveSamples {
    z: Vec<C>,
    w: Vec<C>,
    wp: Vec<C>,
    log_zw: Vec<C>,
}

fn curve_samples(s: &Structure) -> Result<CurveSamples> {
    let pt = s.point();
    let report = check_membership(pt);
    if report.winding != 1 {
        return Err(Error::WindingNonzero {
            winding: report.winding - 1,
        });
    }
    if !report.in_m0 {
        return Err(Error::InvalidPoint(format!(
            "outside M0 (|w'| >= {:e}, chord-arc {:e})",
            report.w_prime, report.simple_curve
        )));
    }
    let w = pt.w();
    let log_wz = s.truncation().log(&w.shift(-1))?;
    let m = s
        .truncation()
        .grid
        .max(4 * (log_wz.hi() - log_wz.lo() + 1) as usize);
    let m = m.next_power_of_two();
    Ok(CurveSamples {
        z: roots_of_unity(m),
        w: sample(&w, m),
        wp: sample(s.w_prime(), m),
        log_zw: sample(&log_wz, m).into_iter().map(|v| -v).collect(),
    })
}

fn floor_small(c: C) -> C {
    if c.norm() < T_ZERO_FLOOR {
        ZERO
    } else {
        c
    }
}

/// Flat coordinates of a point of `M0`, with `t_n` for `|n| <= n_max`.
pub fn flat_coords(pt: &Point, n_max: i64) -> Result<FlatChart> {
    flat_coords_with(&Structure::new(pt)?, n_max)
}

pub fn flat_coords_with(s: &Structure, n_max: i64) -> Result<FlatChart> {
    let c = curve_samples(s)?;
    let m = c.z.len();
    let mut t = BTreeMap::new();
    for n in -n_max..=n_max {
        let g: Vec<C> = (0..m)
            .map(|j| c.log_zw[j] * c.w[j].powi((-n - 1) as i32) * c.wp[j])
            .collect();
        t.insert(n, floor_small(contour_integral(&g)));
    }
    let pt = s.point();
    Ok(FlatChart {
        t,
        u: pt.u(),
        v: pt.v(),
    })
}

/// `(1/2 pi i) \oint (w/z) log(w/z) dz`.
pub fn w_log_w_integral(s: &Structure) -> Result<C> {
    let c = curve_samples(s)?;
    let g: Vec<C> = (0..c.z.len())
        .map(|j| -c.w[j] / c.z[j] * c.log_zw[j])
        .collect();
    Ok(contour_integral(&g))
}

/// `(1/2 pi i) \oint (w/z) log(w/z) dz - (1/2 sum_{i+j=-1} t_i t_j - t_{-1})`.
pub fn quadratic_identity_residual(s: &Structure, chart: &FlatChart) -> Result<C> {
    let lhs = w_log_w_integral(s)?;
    let n_max = chart.t.keys().map(|n| n.abs()).max().unwrap_or(0);
    let sum: C = (0..=n_max).map(|i| chart.t(i) * chart.t(-1 - i)).sum();
    Ok(lhs - (sum - chart.t(-1)))
}

/// `u_0 + t_{-1} + v`.
pub fn linear_identity_residual(pt: &Point, chart: &FlatChart) -> C {
    pt.u0() + chart.t(-1) + chart.v
}

/// Newton solver settings for [`point_from_flat_with`].
#[derive(Clone, Copy, Debug)]
pub struct FlatSolver {
    pub tol: f64,
    /// Residual above which a finished solve counts as failed.
    pub accept: f64,
    pub max_iter: usize,
    /// Grid size; `None` uses the smallest power of two above `8 (2N + 1)`.
    pub grid: Option<usize>,
    pub tail_tol: f64,
}

impl Default for FlatSolver {
    fn default() -> Self {
        FlatSolver {
            tol: 1e-13,
            accept: 1e-12,
            max_iter: 50,
            grid: None,
            tail_tol: 1e-12,
        }
    }
}

/// Solves `z = w exp(t(w))` for `w`, starting from `w = z`, halving steps that
/// increase the residual.
fn solve_node(chart: &FlatChart, z: C, opts: &FlatSolver) -> Result<C> {
    let residual = |w: C| -> (C, C) {
        let (f, df) = chart.exponent(w);
        let e = f.exp();
        (w * e - z, e * (ONE + w * df))
    };
    let mut w = z;
    let (mut r, mut dr) = residual(w);
    let mut iterations = 0;
    while r.norm() > opts.tol {
        if iterations == opts.max_iter {
            break;
        }
        iterations += 1;
        let step = r / dr;
        let mut h = 1.0;
        loop {
            let cand = w - step * h;
            let (rc, drc) = residual(cand);
            if rc.norm().is_finite() && rc.norm() < r.norm() {
                w = cand;
                r = rc;
                dr = drc;
                break;
            }
            h *= 0.5;
            if h < 1e-10 {
                return Err(Error::NewtonDiverged {
                    residual: r.norm(),
                    iterations,
                });
            }
        }
    }
    if !(r.norm() <= opts.accept) {
        return Err(Error::NewtonDiverged {
            residual: r.norm(),
            iterations,
        });
    }
    Ok(w)
}

/// Rebuilds the point with `lambda, lambda_bar` of band `-n..n` from its flat coordinates.
pub fn point_from_flat(chart: &FlatChart, n: i64) -> Result<Point> {
    point_from_flat_with(chart, n, &FlatSolver::default())
}

pub fn point_from_flat_with(chart: &FlatChart, n: i64, opts: &FlatSolver) -> Result<Point> {
    let m = opts
        .grid
        .unwrap_or_else(|| (8 * (2 * n as usize + 1)).next_power_of_two());
    let z = roots_of_unity(m);
    let w = z
        .iter()
        .map(|&zj| solve_node(chart, zj, opts))
        .collect::<Result<Vec<C>>>()?;
    let (w, _) = series_from_samples(&w, -n, n, opts.tail_tol)?;
    let eu = chart.u.exp();
    let split = LaurentSeries::new(-1, vec![eu, chart.v]);
    let lambda = &(&w.leq(0) + &LaurentSeries::z()) - &split;
    let lambda_bar = &(&w.geq(1) + &split) - &LaurentSeries::z();
    Point::new(lambda, lambda_bar)
}

/// The coordinate vector field `d/dx` for a flat coordinate `x`.
pub fn flat_frame(s: &Structure, idx: FlatIndex) -> Result<Tangent> {
    let eu = s.eu();
    Ok(match idx {
        FlatIndex::T(n) => {
            let g = w_power_times_w_prime(s, n)?;
            Tangent {
                a: -g.leq(-1).shift(1),
                ab: -g.geq(0).shift(1),
            }
        }
        FlatIndex::U => Tangent {
            a: LaurentSeries::monomial(-1, -eu),
            ab: LaurentSeries::monomial(-1, eu),
        },
        FlatIndex::V => Tangent {
            a: LaurentSeries::constant(-ONE),
            ab: LaurentSeries::constant(ONE),
        },
    })
}

/// `dt_n/dw_m = -(1/2 pi i) \oint w^{-n-1} z^{m-1} dz`, by quadrature.
pub fn jacobian_t_w(s: &Structure, n: i64, m: i64) -> C {
    let grid = s.truncation().grid;
    let z = roots_of_unity(grid);
    let w = sample(&s.point().w(), grid);
    let g: Vec<C> = (0..grid)
        .map(|j| w[j].powi((-n - 1) as i32) * z[j].powi((m - 1) as i32))
        .collect();
    -contour_integral(&g)
}

/// The one-form `dt_n = -z^{-1} ((w^{-n-1})_{>=0}, (w^{-n-1})_{<=1})`.
pub fn dt_cotangent(s: &Structure, n: i64) -> Result<Cotangent> {
    let w = s.point().w();
    let p = if n <= -1 {
        w.powi((-n - 1) as u32)
    } else {
        s.truncation()
            .divide(&LaurentSeries::constant(ONE), &w.powi((n + 1) as u32))?
    };
    Ok(Cotangent {
        w1: -p.geq(0).shift(-1),
        w2: -p.leq(1).shift(-1),
    })
}

/// The one-forms `du` and `dv`: `du = (0, e^{-u})` pairs to `alpha_bar_{-1}/ub_{-1}`,
/// `dv = (0, z^{-1})` to `alpha_bar_0`.
pub fn du_dv_cotangents(s: &Structure) -> (Cotangent, Cotangent) {
    let einv = ONE / s.eu();
    (
        Cotangent {
            w1: LaurentSeries::zero(),
            w2: LaurentSeries::constant(einv),
        },
        Cotangent {
            w1: LaurentSeries::zero(),
            w2: LaurentSeries::monomial(-1, ONE),
        },
    )
}
