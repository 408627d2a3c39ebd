//! Canonical coordinates.
//!
//! The spectral curve is `sigma(p) = lambda'(p) / w'(p)` for `p` on the unit
//! circle; `p` itself labels its points. The coordinate attached to `p` is
//! `u_sigma = sigma lambda_bar + (sigma - 1) lambda`, whose differential is
//! `du(p) = (lambda'(p) d lambda_bar(p) - lambda_bar'(p) d lambda(p)) / w'(p)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{contour_integral, roots_of_unity, sample, LaurentSeries, C, ONE};
use crate::manifold::{
    check_nonzero_samples, chord_arc_ratio, Point, Structure, Tangent, SIMPLE_TOL,
};

/// Values of the canonical data on the `m`-th roots of unity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalData {
    pub p: Vec<C>,
    pub sigma: Vec<C>,
    pub u_sigma: Vec<C>,
    pub f: Vec<C>,
    /// Chord-arc ratio of the sampled curve.
    pub chord_arc: f64,
    pub self_intersecting: bool,
}

struct Derivs {
    l: Vec<C>,
    lb: Vec<C>,
    lp: Vec<C>,
    lbp: Vec<C>,
}

fn derivs(pt: &Point, m: usize) -> Result<Derivs> {
    let lp = sample(&pt.lambda.derivative(), m);
    let lbp = sample(&pt.lambda_bar.derivative(), m);
    let wp: Vec<C> = lp.iter().zip(&lbp).map(|(a, b)| a + b).collect();
    check_nonzero_samples(&wp)?;
    Ok(Derivs {
        l: sample(&pt.lambda, m),
        lb: sample(&pt.lambda_bar, m),
        lp,
        lbp,
    })
}

/// `sigma(p)` on the grid (no zero check).
pub fn sigma_samples(pt: &Point, m: usize) -> Vec<C> {
    let lp = sample(&pt.lambda.derivative(), m);
    let lbp = sample(&pt.lambda_bar.derivative(), m);
    lp.iter().zip(&lbp).map(|(a, b)| a / (a + b)).collect()
}

pub fn canonical_data(pt: &Point, m: usize) -> Result<CanonicalData> {
    let d = derivs(pt, m)?;
    let p = roots_of_unity(m);
    let mut sigma = Vec::with_capacity(m);
    let mut u_sigma = Vec::with_capacity(m);
    let mut f = Vec::with_capacity(m);
    for j in 0..m {
        let wp = d.lp[j] + d.lbp[j];
        sigma.push(d.lp[j] / wp);
        u_sigma.push((d.lp[j] * d.lb[j] - d.lbp[j] * d.l[j]) / wp);
        f.push(-p[j] * p[j] * d.lp[j] * d.lbp[j] / wp);
    }
    let chord_arc = chord_arc_ratio(&sigma);
    Ok(CanonicalData {
        p,
        sigma,
        u_sigma,
        f,
        chord_arc,
        self_intersecting: chord_arc < SIMPLE_TOL,
    })
}

/// Residual of the critical-point equation `sigma lambda_bar' + (sigma - 1) lambda' = 0`.
pub fn critical_point_residual(pt: &Point, data: &CanonicalData) -> f64 {
    let m = data.p.len();
    let lp = sample(&pt.lambda.derivative(), m);
    let lbp = sample(&pt.lambda_bar.derivative(), m);
    (0..m)
        .map(|j| (data.sigma[j] * lbp[j] + (data.sigma[j] - ONE) * lp[j]).norm())
        .fold(0.0, f64::max)
}

/// `<du(p), x>` at a single point `p` of the circle.
pub fn du_pair(pt: &Point, p: C, x: &Tangent) -> Result<C> {
    let lp = pt.lambda.derivative().eval(p);
    let lbp = pt.lambda_bar.derivative().eval(p);
    let wp = lp + lbp;
    let scale = lp.norm().max(lbp.norm());
    if !(wp.norm() > crate::laurent::ZERO_ON_CIRCLE_RATIO * scale) {
        return Err(Error::ZeroOnCircle {
            min: wp.norm(),
            max: scale,
        });
    }
    Ok((lp * x.ab.eval(p) - lbp * x.a.eval(p)) / wp)
}

/// `<du(p), x>` on the `m`-th roots of unity.
pub fn du_samples(pt: &Point, x: &Tangent, m: usize) -> Result<Vec<C>> {
    let d = derivs(pt, m)?;
    let a = sample(&x.a, m);
    let ab = sample(&x.ab, m);
    Ok((0..m)
        .map(|j| (d.lp[j] * ab[j] - d.lbp[j] * a[j]) / (d.lp[j] + d.lbp[j]))
        .collect())
}

/// Rebuilds a vector from the values `a(p) = alpha(p)/lambda'(p) - alpha_bar(p)/lambda_bar'(p)`.
pub fn reconstruct_from_mu(pt: &Point, mu: &LaurentSeries) -> Tangent {
    let lp = pt.lambda.derivative();
    let lbp = pt.lambda_bar.derivative();
    Tangent {
        a: &lp * &mu.leq(0),
        ab: -(&lbp * &mu.geq(1)),
    }
}

/// `max_p |du(p)(x . y) - du(p)(x) du(p)(y)|`.
pub fn semisimplicity_residual(s: &Structure, x: &Tangent, y: &Tangent, m: usize) -> Result<f64> {
    let xy = s.tan_mul(x, y)?;
    let a = du_samples(s.point(), &xy, m)?;
    let b = du_samples(s.point(), x, m)?;
    let c = du_samples(s.point(), y, m)?;
    Ok((0..m)
        .map(|j| (a[j] - b[j] * c[j]).norm())
        .fold(0.0, f64::max))
}

/// `<x, y> - (1/2 pi i) \oint du(p)(x) du(p)(y) / f(p) dp`.
pub fn metric_diagonality_residual(s: &Structure, x: &Tangent, y: &Tangent, m: usize) -> Result<C> {
    let data = canonical_data(s.point(), m)?;
    let a = du_samples(s.point(), x, m)?;
    let b = du_samples(s.point(), y, m)?;
    let g: Vec<C> = (0..m).map(|j| a[j] * b[j] / data.f[j]).collect();
    Ok(s.metric_tangent(x, y)? - contour_integral(&g))
}

/// Flows whose characteristic velocities are available in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityFlow {
    /// Primary flow `t^{i,0}`.
    T(i64),
    U,
    V,
    /// Lax flow `s_n`.
    S(u32),
    /// Lax flow `s_bar_n`.
    SBar(u32),
}

/// `w^i w'` as a series, dividing on the circle for negative `i`.
pub fn w_power_times_w_prime(s: &Structure, i: i64) -> Result<LaurentSeries> {
    let w = s.point().w();
    let wp = s.w_prime();
    if i >= 0 {
        Ok(&w.powi(i as u32) * wp)
    } else {
        s.truncation().divide(wp, &w.powi((-i) as u32))
    }
}

/// Characteristic velocity of a flow at every grid point `p`.
pub fn char_velocities(s: &Structure, flow: VelocityFlow, m: usize) -> Result<Vec<C>> {
    let pt = s.point();
    let p = roots_of_unity(m);
    match flow {
        VelocityFlow::T(i) => {
            let g = w_power_times_w_prime(s, i)?;
            let hi = sample(&g.geq(0), m);
            let lo = sample(&g.leq(-1), m);
            let sigma = sigma_samples(pt, m);
            Ok((0..m)
                .map(|j| -p[j] * (sigma[j] * hi[j] + (sigma[j] - ONE) * lo[j]))
                .collect())
        }
        VelocityFlow::U => Ok(p.iter().map(|z| s.eu() / z).collect()),
        VelocityFlow::V => Ok(vec![ONE; m]),
        VelocityFlow::S(n) => {
            let g = pt.lambda.powi(n).z_derivative().geq(0);
            Ok(sample(&g, m))
        }
        VelocityFlow::SBar(n) => {
            let g = pt.lambda_bar.powi(n).z_derivative().leq(-1);
            Ok(sample(&g, m))
        }
    }
}

/// Velocities as the literal formula prints them for `s_n`, `s_bar_n`:
/// `[(p lambda'(p))_{>=0}]` and `[(p lambda_bar'(p))_{<0}]`, independent of `n`.
pub fn printed_toda_velocities(pt: &Point, m: usize) -> (Vec<C>, Vec<C>) {
    (
        sample(&pt.lambda.z_derivative().geq(0), m),
        sample(&pt.lambda_bar.z_derivative().leq(-1), m),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn simple_point() -> Point {
        Point::new(
            LaurentSeries::from_real(-1, &[-1.0, 0.0, 1.0]),
            LaurentSeries::from_real(-1, &[1.0]),
        )
        .unwrap()
    }

    #[test]
    fn closed_form_at_simple_point() {
        let pt = simple_point();
        let d = canonical_data(&pt, 64).unwrap();
        for j in 0..64 {
            let p = d.p[j];
            assert!((d.sigma[j] - (ONE + 1.0 / (p * p))).norm() < 1e-14);
            assert!((d.u_sigma[j] - 2.0 / p).norm() < 1e-14);
        }
        assert!(d.self_intersecting);
        assert!(critical_point_residual(&pt, &d) < 1e-14);
    }

    #[test]
    fn perturbed_point_has_simple_curve() {
        let pt = Sampler::new(3).semisimple_point(24);
        let d = canonical_data(&pt, 256).unwrap();
        assert!(!d.self_intersecting);
        assert!(critical_point_residual(&pt, &d) < 1e-14);
    }

    #[test]
    fn unit_and_euler_pairings() {
        let pt = Sampler::new(4).semisimple_point(24);
        let m = 128;
        let e = du_samples(&pt, &Tangent::unit(), m).unwrap();
        assert!(e.iter().all(|v| (v - ONE).norm() < 1e-14));
        let eu = du_samples(&pt, &crate::manifold::euler_field(&pt), m).unwrap();
        let d = canonical_data(&pt, m).unwrap();
        for j in 0..m {
            assert!((eu[j] - d.u_sigma[j]).norm() < 1e-12);
        }
        let p = C::from_polar(1.0, 0.3);
        let single = du_pair(&pt, p, &Tangent::unit()).unwrap();
        assert!((single - ONE).norm() < 1e-14);
    }

    #[test]
    fn reconstruction_from_mu_values() {
        let mut s = Sampler::new(5);
        let pt = s.intersection_point(16);
        let x = s.tangent(8);
        let lp = pt.lambda.derivative();
        let lbp = pt.lambda_bar.derivative();
        let st = Structure::new(&pt).unwrap();
        let a = st.truncation().divide(&x.a, &lp).unwrap();
        let b = st.truncation().divide(&x.ab, &lbp).unwrap();
        let back = reconstruct_from_mu(&pt, &(&a - &b));
        assert!(back.dist(&x) < 1e-9, "{}", back.dist(&x));
    }

    #[test]
    fn zeroth_primary_velocity_at_locus() {
        let pt = Point::locus(C::new(-1.0, 0.0), C::new(0.1, 0.0));
        let s = Structure::new(&pt).unwrap();
        let m = 32;
        let a0 = char_velocities(&s, VelocityFlow::T(0), m).unwrap();
        let sigma = sigma_samples(&pt, m);
        let p = roots_of_unity(m);
        for j in 0..m {
            assert!((a0[j] + p[j] * sigma[j]).norm() < 1e-14);
        }
    }
}
