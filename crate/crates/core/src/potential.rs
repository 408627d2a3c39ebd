//! The potential `F`, its third derivatives in flat coordinates, and the
//! symmetric trilinear form `<x . y, z>` on tangent vectors.

use serde::{Deserialize, Serialize};

use crate::canonical::w_power_times_w_prime;
use crate::error::Result;
use crate::flatcoords::{
    flat_frame, point_from_flat_with, w_log_w_integral, FlatChart, FlatIndex, FlatSolver,
};
use crate::laurent::{
    contour_integral, roots_of_unity, sample, taylor_reciprocal_at_zero, LaurentSeries, C, ONE,
    ZERO,
};
use crate::manifold::{euler_field, Point, Structure, Tangent};

/// Three flat directions; equality ignores their order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleIndex([FlatIndex; 3]);

impl TripleIndex {
    pub fn new(a: FlatIndex, b: FlatIndex, c: FlatIndex) -> Self {
        let mut s = [a, b, c];
        s.sort();
        TripleIndex(s)
    }

    pub fn slots(&self) -> [FlatIndex; 3] {
        self.0
    }
}

/// The flat coordinate paired with `idx` by the metric: `t_n <-> t_{-1-n}`, `u <-> v`.
pub fn dual_index(idx: FlatIndex) -> FlatIndex {
    match idx {
        FlatIndex::T(n) => FlatIndex::T(-1 - n),
        FlatIndex::U => FlatIndex::V,
        FlatIndex::V => FlatIndex::U,
    }
}

/// `F = -1/2 sum_{k>=1} w_k w_{-k}/k + 1/2 (ub_0 - u_0)[(1/2 pi i) \oint (w/z) log(w/z) dz - u_0 - ub_0]
///      + 1/2 ub_0^2 log ub_{-1} + ub_{-1} + u_{-1} + ub_{-1} ub_1`.
///
/// The first sum is the double contour integral of `(w_1/z_1)(w_2/z_2) log((z_2 - z_1)/z_2)`
/// over `|z_1| < |z_2|`, expanded in `z_1/z_2`.
pub fn potential_f(pt: &Point) -> Result<C> {
    potential_f_with(&Structure::new(pt)?)
}

pub fn potential_f_with(s: &Structure) -> Result<C> {
    let pt = s.point();
    let w = pt.w();
    let kmax = w.hi().max(-w.lo()).max(0);
    let sum: C = (1..=kmax)
        .map(|k| w.coeff(k) * w.coeff(-k) / k as f64)
        .sum();
    let (u0, ub0, ubm1) = (pt.u0(), pt.ub0(), pt.ub_m1());
    let middle = (ub0 - u0) * (w_log_w_integral(s)? - u0 - ub0);
    Ok(
        -0.5 * sum
            + 0.5 * middle
            + 0.5 * ub0 * ub0 * ubm1.ln()
            + ubm1
            + pt.u_m1()
            + ubm1 * pt.ub1(),
    )
}

/// Directional derivative `dF(x)`, differentiating the coefficient form term by term.
///
/// The contour term contributes `(1/2 pi i) \oint (dw/z)(log(w/z) + 1) dz`.
pub fn potential_differential(s: &Structure, x: &Tangent) -> Result<C> {
    let pt = s.point();
    let w = pt.w();
    let dw = x.dw();
    let kmax = w.hi().max(-w.lo()).max(dw.hi()).max(-dw.lo()).max(0);
    let sum: C = (1..=kmax)
        .map(|k| (dw.coeff(k) * w.coeff(-k) + w.coeff(k) * dw.coeff(-k)) / k as f64)
        .sum();
    let (u0, ub0, ubm1) = (pt.u0(), pt.ub0(), pt.ub_m1());
    let (du0, dub0, dubm1) = (x.a.coeff(0), x.ab.coeff(0), x.ab.coeff(-1));
    let log_wz = s.truncation().log(&w.shift(-1))?;
    let big_w = w_log_w_integral(s)?;
    let d_big_w = (&dw * &(&log_wz + &LaurentSeries::constant(ONE))).coeff(0);
    Ok(-0.5 * sum
        + 0.5 * (dub0 - du0) * (big_w - u0 - ub0)
        + 0.5 * (ub0 - u0) * (d_big_w - du0 - dub0)
        + ub0 * dub0 * ubm1.ln()
        + 0.5 * ub0 * ub0 * dubm1 / ubm1
        + dubm1
        + x.a.coeff(-1)
        + dubm1 * pt.ub1()
        + ubm1 * x.ab.coeff(1))
}

/// First derivative `dF/dx` along a flat coordinate, the density of the primary Hamiltonian.
pub fn flat_first_derivative(s: &Structure, idx: FlatIndex) -> Result<C> {
    potential_differential(s, &flat_frame(s, idx)?)
}

/// `Pi f = f_{>=0} - f_{<=-1}`.
fn pi_samples(f: &LaurentSeries, m: usize) -> Vec<C> {
    sample(&f.pi(), m)
}

/// `d^3F/dt_i dt_j dt_k`:
/// `(1/4 pi i) \oint z w' [w^{i+j+k} Pi(w') - w^{i+j} Pi(w^k w') - w^{j+k} Pi(w^i w') - w^{k+i} Pi(w^j w')] dz
///  - (1/2 pi i) \oint (z + e^u/z) w^{i+j+k} w' dz`.
fn ttt(s: &Structure, i: i64, j: i64, k: i64, with_eu: bool) -> Result<C> {
    let m = s.truncation().grid;
    let z = roots_of_unity(m);
    let w = sample(&s.point().w(), m);
    let wp = sample(s.w_prime(), m);
    let pw = pi_samples(s.w_prime(), m);
    let pk = pi_samples(&w_power_times_w_prime(s, k)?, m);
    let pi = pi_samples(&w_power_times_w_prime(s, i)?, m);
    let pj = pi_samples(&w_power_times_w_prime(s, j)?, m);
    let eu = if with_eu { s.eu() } else { ZERO };
    let g: Vec<C> = (0..m)
        .map(|q| {
            let wq = w[q];
            let pow = |n: i64| wq.powi(n as i32);
            let bracket = pow(i + j + k) * pw[q]
                - pow(i + j) * pk[q]
                - pow(j + k) * pi[q]
                - pow(k + i) * pj[q];
            0.5 * z[q] * wp[q] * bracket - (z[q] + eu / z[q]) * pow(i + j + k) * wp[q]
        })
        .collect();
    Ok(contour_integral(&g))
}

/// `(e^u/2 pi i) \oint w^n w' dz / z`.
fn eu_moment(s: &Structure, n: i64) -> Result<C> {
    let g = w_power_times_w_prime(s, n)?;
    Ok(s.eu() * g.coeff(0))
}

/// Closed-form third derivative of `F` in flat coordinates.
pub fn triple_derivative_flat(s: &Structure, idx: TripleIndex) -> Result<C> {
    let mut ts = Vec::new();
    let (mut nu, mut nv) = (0, 0);
    for slot in idx.slots() {
        match slot {
            FlatIndex::T(n) => ts.push(n),
            FlatIndex::U => nu += 1,
            FlatIndex::V => nv += 1,
        }
    }
    let delta = |a: i64, b: i64| if a == b { ONE } else { ZERO };
    Ok(match (ts.as_slice(), nu, nv) {
        (&[i, j, k], 0, 0) => ttt(s, i, j, k, true)?,
        (&[i, j], 0, 1) => delta(i + j, -1),
        (&[i, j], 1, 0) => eu_moment(s, i + j)?,
        (&[i], 2, 0) => -eu_moment(s, i)?,
        (&[], 3, 0) => eu_moment(s, 0)? - s.eu(),
        (&[], 1, 2) => ONE,
        _ => ZERO,
    })
}

/// Structure constants of the reduced algebra on the `t`-sector: the
/// closed-form `d^3F/dt_i dt_j dt_k` with the `e^u` term dropped.
pub fn reduced_triple_derivative(s: &Structure, i: i64, j: i64, k: i64) -> Result<C> {
    ttt(s, i, j, k, false)
}

/// Coefficient of `d/d target` in `d/da . d/db`, from the closed-form third
/// derivatives and the constant Gram matrix.
pub fn flat_product_coefficient(
    s: &Structure,
    a: FlatIndex,
    b: FlatIndex,
    target: FlatIndex,
) -> Result<C> {
    triple_derivative_flat(s, TripleIndex::new(a, b, dual_index(target)))
}

/// `<x . y, z>` by the contour formula
/// `(1/4 pi i) \oint [dw dw ds (three placements) - s' dw dw dw / w'] / (z^2 w') dz
///  - res_0 [d(lb - l) dl dl (three placements) + dl dl dl] / (z^2 lb') dz`,
/// with `s = lambda_bar - lambda` and `l = z + v + e^u/z`.
pub fn trilinear_form(s: &Structure, x: &Tangent, y: &Tangent, z: &Tangent) -> Result<C> {
    let m = s.truncation().grid;
    let zs = roots_of_unity(m);
    let pt = s.point();
    let wp = sample(s.w_prime(), m);
    crate::manifold::check_nonzero_samples(&wp)?;
    let sp = sample(&(&pt.lambda_bar - &pt.lambda).derivative(), m);
    let dw: Vec<Vec<C>> = [x, y, z].iter().map(|t| sample(&t.dw(), m)).collect();
    let ds: Vec<Vec<C>> = [x, y, z].iter().map(|t| sample(&t.ds(), m)).collect();
    let g: Vec<C> = (0..m)
        .map(|q| {
            let (a, b, c) = (dw[0][q], dw[1][q], dw[2][q]);
            let num =
                a * b * ds[2][q] + a * ds[1][q] * c + ds[0][q] * b * c - sp[q] * a * b * c / wp[q];
            num / (zs[q] * zs[q] * wp[q])
        })
        .collect();
    let first = 0.5 * contour_integral(&g);

    let dl: Vec<LaurentSeries> = [x, y, z].iter().map(|t| t.dl()).collect();
    let dm: Vec<LaurentSeries> = [x, y, z].iter().map(|t| t.ab.geq(1)).collect();
    let num = &(&(&(&dm[0] * &dl[1]) * &dl[2]) + &(&(&dl[0] * &dm[1]) * &dl[2]))
        + &(&(&(&dl[0] * &dl[1]) * &dm[2]) + &(&(&dl[0] * &dl[1]) * &dl[2]));
    let den = s.lambda_bar_prime().shift(2);
    let order = (-1 - num.lo()).max(0) as usize;
    let recip = taylor_reciprocal_at_zero(&den, order)?;
    let second: C = (0..=order as i64)
        .map(|k| num.coeff(-1 - k) * recip.coeff(k))
        .sum();
    Ok(first - second)
}

/// `E F - 2F - 1/2 (ub_0 - u_0) w_0 - ub_0^2`, with `E F` the centered
/// difference of `F` along the Euler field with step `h`.
pub fn quasihomogeneity_residual(pt: &Point, h: f64) -> Result<C> {
    let e = euler_field(pt);
    let shifted = |sign: f64| -> Result<C> {
        let p = Point {
            lambda: &pt.lambda + &e.a.scale_re(sign * h),
            lambda_bar: &pt.lambda_bar + &e.ab.scale_re(sign * h),
        };
        potential_f(&p)
    };
    let ef = (shifted(1.0)? - shifted(-1.0)?) / (2.0 * h);
    let f = potential_f(pt)?;
    let w0 = pt.w().coeff(0);
    Ok(ef - 2.0 * f - 0.5 * (pt.ub0() - pt.u0()) * w0 - pt.ub0() * pt.ub0())
}

/// Default step for [`quasihomogeneity_residual`].
pub const QH_STEP: f64 = 1e-5;

/// Finite-difference settings for third derivatives of `F` in flat coordinates.
#[derive(Clone, Copy, Debug)]
pub struct ThirdDifference {
    /// Coarse step; the estimate extrapolates from `h` and `h/2`.
    pub h: f64,
    /// Band of the points rebuilt from perturbed charts.
    pub band: i64,
    pub solver: FlatSolver,
}

impl Default for ThirdDifference {
    fn default() -> Self {
        ThirdDifference {
            h: 1e-2,
            band: 80,
            solver: FlatSolver::default(),
        }
    }
}

fn bump(chart: &FlatChart, idx: FlatIndex, d: f64) -> FlatChart {
    let mut c = chart.clone();
    let step = C::new(d, 0.0);
    match idx {
        FlatIndex::T(n) => *c.t.entry(n).or_insert(ZERO) += step,
        FlatIndex::U => c.u += step,
        FlatIndex::V => c.v += step,
    }
    c
}

/// `D^3 F[a, b, c]` by the eight-point centered stencil
/// `sum_{s in {+-1}^3} s_1 s_2 s_3 F(x + h(s_1 a + s_2 b + s_3 c)) / (8 h^3)`,
/// Richardson-extrapolated from steps `h` and `h/2`.
pub fn third_derivative_fd(
    chart: &FlatChart,
    idx: TripleIndex,
    opts: &ThirdDifference,
) -> Result<C> {
    let [a, b, c] = idx.slots();
    let stencil = |h: f64| -> Result<C> {
        let mut acc = ZERO;
        for sa in [-1.0, 1.0] {
            for sb in [-1.0, 1.0] {
                for sc in [-1.0, 1.0] {
                    let ch = bump(&bump(&bump(chart, a, sa * h), b, sb * h), c, sc * h);
                    let pt = point_from_flat_with(&ch, opts.band, &opts.solver)?;
                    acc += sa * sb * sc * potential_f(&pt)?;
                }
            }
        }
        Ok(acc / (8.0 * h * h * h))
    };
    let coarse = stencil(opts.h)?;
    let fine = stencil(opts.h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_on_locus() {
        assert!(potential_f(&Point::locus(ZERO, ZERO)).unwrap().norm() < 1e-15);
        let (u, v) = (C::new(0.3, 0.0), C::new(0.2, 0.0));
        let f = potential_f(&Point::locus(u, v)).unwrap();
        assert!((f - u * v * v / 2.0).norm() < 1e-15, "{f}");
    }

    #[test]
    fn triple_index_ignores_order() {
        let (a, b) = (FlatIndex::T(2), FlatIndex::U);
        assert_eq!(
            TripleIndex::new(a, b, FlatIndex::V),
            TripleIndex::new(FlatIndex::V, a, b)
        );
    }

    #[test]
    fn closed_forms_at_locus() {
        let s = Structure::new(&Point::locus(C::new(0.2, 0.0), C::new(0.1, 0.0))).unwrap();
        let t = |i| FlatIndex::T(i);
        let uvv = TripleIndex::new(FlatIndex::U, FlatIndex::V, FlatIndex::V);
        assert_eq!(triple_derivative_flat(&s, uvv).unwrap(), ONE);
        let uuu = TripleIndex::new(FlatIndex::U, FlatIndex::U, FlatIndex::U);
        assert!(triple_derivative_flat(&s, uuu).unwrap().norm() < 1e-15);
        assert_eq!(
            triple_derivative_flat(&s, TripleIndex::new(t(2), t(-3), FlatIndex::V)).unwrap(),
            ONE
        );
    }
}
