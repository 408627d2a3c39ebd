//! Points, tangent and cotangent vectors, and the Frobenius structure at a point.
//!
//! A point is a pair `(lambda, lambda_bar)` with `lambda = z + u0 + u_{-1}/z + ...`
//! and `lambda_bar = ub_{-1}/z + ub0 + ub1 z + ...`. Tangent vectors are pairs
//! `(alpha, alpha_bar)` with `alpha` in degrees `<= 0` and `alpha_bar` in degrees
//! `>= -1`; one-forms `(omega, omega_bar)` live in the dual bands `>= -1` and
//! `<= 0`, paired by the residue.

use std::cell::OnceCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{
    contour_integral, divide_on_circle, log_on_circle_certified, sample, taylor_reciprocal_at_zero,
    unwrap_phase, CircleOpts, LaurentSeries, C, ONE, ZERO,
};

/// Smallest admissible `|ub_{-1}|`.
pub const MIN_UB_M1: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub lambda: LaurentSeries,
    pub lambda_bar: LaurentSeries,
}

impl Point {
    /// Validates the bands, the normalization `u1 = 1` and `ub_{-1} != 0`.
    pub fn new(lambda: LaurentSeries, lambda_bar: LaurentSeries) -> Result<Self> {
        if lambda.hi() > 1 {
            return Err(Error::InvalidPoint(format!(
                "lambda has degree {} > 1",
                lambda.hi()
            )));
        }
        if lambda.coeff(1) != ONE {
            return Err(Error::InvalidPoint(format!(
                "leading coefficient of lambda is {}, must be exactly 1",
                lambda.coeff(1)
            )));
        }
        if !lambda_bar.is_zero() && lambda_bar.lo() < -1 {
            return Err(Error::InvalidPoint(format!(
                "lambda_bar has degree {} < -1",
                lambda_bar.lo()
            )));
        }
        let ub = lambda_bar.coeff(-1);
        if !(ub.norm() > MIN_UB_M1) {
            return Err(Error::InvalidPoint(format!("ub_-1 = {ub} vanishes")));
        }
        Ok(Point { lambda, lambda_bar })
    }

    /// The two-dimensional locus `lambda = z - v - e^u/z`, `lambda_bar = v + e^u/z`.
    pub fn locus(u: C, v: C) -> Self {
        let eu = u.exp();
        Point {
            lambda: LaurentSeries::new(-1, vec![-eu, -v, ONE]),
            lambda_bar: LaurentSeries::new(-1, vec![eu, v]),
        }
    }

    pub fn u0(&self) -> C {
        self.lambda.coeff(0)
    }
    pub fn u_m1(&self) -> C {
        self.lambda.coeff(-1)
    }
    pub fn ub_m1(&self) -> C {
        self.lambda_bar.coeff(-1)
    }
    pub fn ub0(&self) -> C {
        self.lambda_bar.coeff(0)
    }
    pub fn ub1(&self) -> C {
        self.lambda_bar.coeff(1)
    }
    /// `w = lambda + lambda_bar`.
    pub fn w(&self) -> LaurentSeries {
        &self.lambda + &self.lambda_bar
    }
    /// `u = log ub_{-1}`, principal branch.
    pub fn u(&self) -> C {
        self.ub_m1().ln()
    }
    pub fn v(&self) -> C {
        self.ub0()
    }
}

/// Tangent vector `(alpha, alpha_bar)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub a: LaurentSeries,
    pub ab: LaurentSeries,
}

/// One-form `(omega, omega_bar)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cotangent {
    pub w1: LaurentSeries,
    pub w2: LaurentSeries,
}

fn check_hi(s: &LaurentSeries, hi: i64, what: &str) -> Result<()> {
    if !s.is_zero() && s.hi() > hi {
        return Err(Error::InvalidPoint(format!(
            "{what} has degree {} > {hi}",
            s.hi()
        )));
    }
    Ok(())
}

fn check_lo(s: &LaurentSeries, lo: i64, what: &str) -> Result<()> {
    if !s.is_zero() && s.lo() < lo {
        return Err(Error::InvalidPoint(format!(
            "{what} has degree {} < {lo}",
            s.lo()
        )));
    }
    Ok(())
}

macro_rules! pair_space {
    ($t:ident, $x:ident, $y:ident) => {
        impl $t {
            pub fn zero() -> Self {
                $t {
                    $x: LaurentSeries::zero(),
                    $y: LaurentSeries::zero(),
                }
            }
            pub fn add(&self, o: &Self) -> Self {
                $t {
                    $x: &self.$x + &o.$x,
                    $y: &self.$y + &o.$y,
                }
            }
            pub fn sub(&self, o: &Self) -> Self {
                $t {
                    $x: &self.$x - &o.$x,
                    $y: &self.$y - &o.$y,
                }
            }
            pub fn scale(&self, c: C) -> Self {
                $t {
                    $x: self.$x.scale(c),
                    $y: self.$y.scale(c),
                }
            }
            /// Largest coefficient of either slot.
            pub fn max_abs(&self) -> f64 {
                self.$x.max_abs().max(self.$y.max_abs())
            }
            pub fn dist(&self, o: &Self) -> f64 {
                self.sub(o).max_abs()
            }
        }
    };
}

pair_space!(Tangent, a, ab);
pair_space!(Cotangent, w1, w2);

impl Tangent {
    pub fn new(a: LaurentSeries, ab: LaurentSeries) -> Result<Self> {
        check_hi(&a, 0, "alpha")?;
        check_lo(&ab, -1, "alpha_bar")?;
        Ok(Tangent { a, ab })
    }

    /// The unit vector `e = (-1, 1)`.
    pub fn unit() -> Self {
        Tangent {
            a: LaurentSeries::constant(-ONE),
            ab: LaurentSeries::constant(ONE),
        }
    }

    /// Variation of `w = lambda + lambda_bar`.
    pub fn dw(&self) -> LaurentSeries {
        &self.a + &self.ab
    }

    /// Variation of `s = lambda_bar - lambda`.
    pub fn ds(&self) -> LaurentSeries {
        &self.ab - &self.a
    }

    /// Variation of `l(z) = z + v + e^u/z`: `ab_0 + ab_{-1}/z`.
    pub fn dl(&self) -> LaurentSeries {
        self.ab.restrict(-1, 0)
    }

    /// Variation of `u = log ub_{-1}` at a point with the given `ub_{-1}`.
    pub fn du(&self, ub_m1: C) -> C {
        self.ab.coeff(-1) / ub_m1
    }

    pub fn dv(&self) -> C {
        self.ab.coeff(0)
    }
}

impl Cotangent {
    pub fn new(w1: LaurentSeries, w2: LaurentSeries) -> Result<Self> {
        check_lo(&w1, -1, "omega")?;
        check_hi(&w2, 0, "omega_bar")?;
        Ok(Cotangent { w1, w2 })
    }
}

/// Residue pairing `res(omega alpha + omega_bar alpha_bar)`.
pub fn pair(o: &Cotangent, x: &Tangent) -> C {
    (&o.w1 * &x.a).residue() + (&o.w2 * &x.ab).residue()
}

/// Euler vector field `(lambda - z lambda', lambda_bar - z lambda_bar')`.
pub fn euler_field(pt: &Point) -> Tangent {
    let f = |s: &LaurentSeries| {
        LaurentSeries::new(s.lo(), s.terms().map(|(d, c)| c * (1 - d) as f64).collect())
    };
    Tangent {
        a: f(&pt.lambda),
        ab: f(&pt.lambda_bar),
    }
}

/// Times [`Truncation::divide`] may double its margin before reporting truncation loss.
pub const MARGIN_DOUBLINGS: u32 = 3;

/// Truncation policy for the analytic divisions.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Truncation {
    /// Degrees kept beyond the input band when dividing on the circle.
    pub margin: i64,
    /// Grid size for contour quadratures.
    pub grid: usize,
    /// Relative tolerance for discarded tails.
    pub tail_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            margin: 160,
            grid: 2048,
            tail_tol: crate::laurent::DEFAULT_TAIL_TOL,
        }
    }
}

impl Truncation {
    /// Expansion of `num/den` on a band wide enough for `num` plus the margin.
    ///
    /// The margin is doubled up to [`MARGIN_DOUBLINGS`] times while the
    /// discarded tail exceeds the tolerance.
    pub fn divide(&self, num: &LaurentSeries, den: &LaurentSeries) -> Result<LaurentSeries> {
        if num.is_zero() {
            return Ok(LaurentSeries::zero());
        }
        let opts = CircleOpts {
            tail_tol: self.tail_tol,
            grid: None,
        };
        let mut margin = self.margin;
        let mut attempt = 0;
        loop {
            let lo = num.lo() - den.hi().max(0) - margin;
            let hi = num.hi() - den.lo().min(0) + margin;
            match divide_on_circle(num, den, lo, hi, opts) {
                Err(Error::TruncationLoss { .. }) if attempt < MARGIN_DOUBLINGS => {
                    margin *= 2;
                    attempt += 1;
                }
                r => return r.map(|c| c.series),
            }
        }
    }

    /// Principal logarithm of a zero-winding `f` on the circle, on the band of
    /// `f` widened by the margin (doubled as in [`Truncation::divide`]).
    pub fn log(&self, f: &LaurentSeries) -> Result<LaurentSeries> {
        let opts = CircleOpts {
            tail_tol: self.tail_tol,
            grid: None,
        };
        let mut margin = self.margin;
        let mut attempt = 0;
        loop {
            let lo = f.lo().min(0) - margin;
            let hi = f.hi().max(0) + margin;
            match log_on_circle_certified(f, lo, hi, opts) {
                Err(Error::TruncationLoss { .. }) if attempt < MARGIN_DOUBLINGS => {
                    margin *= 2;
                    attempt += 1;
                }
                r => return r.map(|c| c.series),
            }
        }
    }

    /// `(1/2 pi i) \oint num/den dz/z^2` by quadrature.
    pub fn integral_over_z2(&self, num: &LaurentSeries, den: &LaurentSeries) -> Result<C> {
        let m = self.grid;
        let nv = sample(&num.shift(-2), m);
        let dv = sample(den, m);
        check_nonzero_samples(&dv)?;
        let q: Vec<C> = nv.iter().zip(&dv).map(|(a, b)| a / b).collect();
        Ok(contour_integral(&q))
    }
}

pub fn check_nonzero_samples(values: &[C]) -> Result<()> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let min = values.iter().fold(f64::INFINITY, |m, v| m.min(v.norm()));
    if !(min > crate::laurent::ZERO_ON_CIRCLE_RATIO * max) {
        return Err(Error::ZeroOnCircle { min, max });
    }
    Ok(())
}

struct GammaData {
    d: LaurentSeries,
}

/// The Frobenius structure at a fixed point.
///
/// Derivatives of the point are computed once; the intersection-form data is
/// built on first use since it needs extra nondegeneracy.
pub struct Structure {
    pt: Point,
    trunc: Truncation,
    lp: LaurentSeries,
    lbp: LaurentSeries,
    wp: LaurentSeries,
    eps: Tangent,
    gamma: OnceCell<Result<GammaData>>,
}

impl Structure {
    pub fn new(pt: &Point) -> Result<Self> {
        Self::with_truncation(pt, Truncation::default())
    }

    pub fn with_truncation(pt: &Point, trunc: Truncation) -> Result<Self> {
        let pt = Point::new(pt.lambda.clone(), pt.lambda_bar.clone())?;
        let lp = pt.lambda.derivative();
        let lbp = pt.lambda_bar.derivative();
        let wp = &lp + &lbp;
        check_nonzero_samples(&sample(&wp, trunc.grid))?;
        let eps = euler_field(&pt);
        Ok(Structure {
            pt,
            trunc,
            lp,
            lbp,
            wp,
            eps,
            gamma: OnceCell::new(),
        })
    }

    pub fn point(&self) -> &Point {
        &self.pt
    }
    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }
    pub fn lambda_prime(&self) -> &LaurentSeries {
        &self.lp
    }
    pub fn lambda_bar_prime(&self) -> &LaurentSeries {
        &self.lbp
    }
    pub fn w_prime(&self) -> &LaurentSeries {
        &self.wp
    }
    /// `e^u = ub_{-1}`.
    pub fn eu(&self) -> C {
        self.pt.ub_m1()
    }

    /// Unit of the cotangent algebra, `(0, 1/ub_{-1})`.
    pub fn cotangent_unit(&self) -> Cotangent {
        Cotangent {
            w1: LaurentSeries::zero(),
            w2: LaurentSeries::constant(ONE / self.eu()),
        }
    }

    fn contract(&self, o: &Cotangent) -> LaurentSeries {
        &(&self.lp * &o.w1) + &(&self.lbp * &o.w2)
    }

    /// Product of one-forms.
    pub fn cot_mul(&self, o1: &Cotangent, o2: &Cotangent) -> Cotangent {
        let a1 = self.contract(o1);
        let a2 = self.contract(o2);
        let cross = &(&o1.w1 * &o2.w2) + &(&o1.w2 * &o2.w1);
        let first = &(&(&o1.w1 * &a2.geq(-1)) + &(&o2.w1 * &a1.geq(-1)))
            - &(&(&(&self.lp * &o1.w1) * &o2.w1) + &(&self.lbp * &cross)).geq(-3);
        let second = &(&(&(&self.lbp * &o1.w2) * &o2.w2) + &(&self.lp * &cross)).leq(-2)
            - &(&(&o1.w2 * &a2.leq(-2)) + &(&o2.w2 * &a1.leq(-2)));
        Cotangent {
            w1: first.shift(2),
            w2: second.shift(2),
        }
    }

    /// The flat metric as a map from one-forms to vectors.
    pub fn eta_apply(&self, o: &Cotangent) -> Tangent {
        let a = self.contract(o);
        let d = &o.w1 - &o.w2;
        let first = &a.leq(-2) - &(&self.lp * &d.leq(-2));
        let second = &a.geq(-1) + &(&self.lbp * &d.geq(-1));
        Tangent {
            a: first.shift(2),
            ab: second.shift(2),
        }
    }

    /// Inverse of [`Structure::eta_apply`].
    pub fn eta_inverse(&self, x: &Tangent) -> Result<Cotangent> {
        let q = self.trunc.divide(&x.dw(), &self.wp)?;
        let w1 = q.geq(1).shift(-2);
        let w2 = &q.leq(2).shift(-2) + &x.dl().scale(ONE / self.eu());
        Ok(Cotangent { w1, w2 })
    }

    /// Flat metric on vectors.
    pub fn metric_tangent(&self, x: &Tangent, y: &Tangent) -> Result<C> {
        let first = self
            .trunc
            .integral_over_z2(&(&x.dw() * &y.dw()), &self.wp)?;
        // z^2 l'(z) = z^2 - e^u
        let zl = LaurentSeries::new(0, vec![-self.eu(), ZERO, ONE]);
        let num = &x.dl() * &y.dl();
        let t = taylor_reciprocal_at_zero(&zl, 2)?;
        Ok(first - (&num * &t).residue())
    }

    /// Product of vectors, `eta(eta^-1 x . eta^-1 y)`.
    pub fn tan_mul(&self, x: &Tangent, y: &Tangent) -> Result<Tangent> {
        let ox = self.eta_inverse(x)?;
        let oy = self.eta_inverse(y)?;
        Ok(self.eta_apply(&self.cot_mul(&ox, &oy)))
    }

    pub fn euler(&self) -> &Tangent {
        &self.eps
    }

    /// Intersection form as a map from one-forms to vectors.
    pub fn gamma_apply(&self, o: &Cotangent) -> Tangent {
        let a = self.contract(o);
        let b = &(&self.eps.a * &o.w1) + &(&self.eps.ab * &o.w2);
        let first = &(&self.lp * &b.leq(-2)) - &(&self.eps.a * &a.leq(-2));
        let second = &(&self.eps.ab * &a.geq(-1)) - &(&self.lbp * &b.geq(-1));
        Tangent {
            a: first.shift(2),
            ab: second.shift(2),
        }
    }

    fn gamma_data(&self) -> Result<&GammaData> {
        self.gamma
            .get_or_init(|| {
                let m = self.trunc.grid;
                check_nonzero_samples(&sample(&self.lp, m))?;
                check_nonzero_samples(&sample(&self.lbp, m))?;
                let d = &(&self.pt.lambda * &self.lbp) - &(&self.pt.lambda_bar * &self.lp);
                check_nonzero_samples(&sample(&d, m))?;
                Ok(GammaData { d })
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Inverse of [`Structure::gamma_apply`].
    pub fn gamma_inverse(&self, x: &Tangent) -> Result<Cotangent> {
        let g = self.gamma_data()?;
        let num = &(&self.lbp * &x.a) - &(&self.lp * &x.ab);
        let r = self.trunc.divide(&num, &g.d)?;
        let w1 = self.trunc.divide(&r.geq(1), &self.lp)?.geq(1).shift(-2);
        let w2 = -self.trunc.divide(&r.leq(0), &self.lbp)?.leq(2).shift(-2);
        Ok(Cotangent { w1, w2 })
    }

    /// Intersection form on vectors, by quadrature.
    pub fn intersection_metric(&self, x: &Tangent, y: &Tangent) -> Result<C> {
        self.gamma_data()?;
        let m = self.trunc.grid;
        let lp = sample(&self.lp, m);
        let lbp = sample(&self.lbp, m);
        let l = sample(&self.pt.lambda, m);
        let lb = sample(&self.pt.lambda_bar, m);
        let mu = |t: &Tangent| {
            let a = sample(&t.a, m);
            let ab = sample(&t.ab, m);
            (0..m)
                .map(|j| a[j] / lp[j] - ab[j] / lbp[j])
                .collect::<Vec<C>>()
        };
        let mx = mu(x);
        let my = mu(y);
        let z = crate::laurent::roots_of_unity(m);
        let g: Vec<C> = (0..m)
            .map(|j| mx[j] * my[j] / (l[j] / lp[j] - lb[j] / lbp[j]) / (z[j] * z[j]))
            .collect();
        Ok(contour_integral(&g))
    }

    /// Nondegeneracy margins at this point.
    pub fn membership(&self) -> MembershipReport {
        check_membership_with(&self.pt, self.trunc.grid.min(512))
    }
}

/// Minimum over the closed polygon of chord length divided by the shorter
/// arc length between vertices. Zero (or tiny) iff the curve meets itself.
pub fn chord_arc_ratio(samples: &[C]) -> f64 {
    let m = samples.len();
    let mut cum = vec![0.0; m + 1];
    for j in 0..m {
        cum[j + 1] = cum[j] + (samples[(j + 1) % m] - samples[j]).norm();
    }
    let total = cum[m];
    if total == 0.0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for j in 0..m {
        for k in j + 2..m {
            if j == 0 && k == m - 1 {
                continue;
            }
            let arc = (cum[k] - cum[j]).min(total - (cum[k] - cum[j]));
            let chord = (samples[k] - samples[j]).norm();
            best = best.min(chord / arc);
        }
    }
    best
}

/// Named pass/fail flags with the margins they were decided on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    pub grid: usize,
    /// `|ub_{-1}|`.
    pub ub_m1: f64,
    /// `min |w'|` on the circle.
    pub w_prime: f64,
    /// Chord-arc ratio of the curve `w(S^1)`.
    pub simple_curve: f64,
    pub winding: i64,
    /// `min |lambda'|`, `min |lambda_bar'|`, `min |lambda lambda_bar' - lambda_bar lambda'|`.
    pub lambda_prime: f64,
    pub lambda_bar_prime: f64,
    pub wronskian: f64,
    /// `min |lambda' lambda_bar'' - lambda_bar' lambda''|`.
    pub semisimple: f64,
    pub nondegenerate: bool,
    pub in_m0: bool,
    pub intersection_valid: bool,
    pub semisimple_valid: bool,
}

/// Threshold below which a margin counts as vanishing.
pub const MARGIN_TOL: f64 = 1e-10;
/// Chord-arc ratio below which the curve counts as self-intersecting.
pub const SIMPLE_TOL: f64 = 1e-6;

pub fn check_membership(pt: &Point) -> MembershipReport {
    check_membership_with(pt, 512)
}

pub fn check_membership_with(pt: &Point, m: usize) -> MembershipReport {
    let minabs = |s: &LaurentSeries| {
        sample(s, m)
            .iter()
            .fold(f64::INFINITY, |a, v| a.min(v.norm()))
    };
    let lp = pt.lambda.derivative();
    let lbp = pt.lambda_bar.derivative();
    let wp = &lp + &lbp;
    let w = pt.w();
    let ws = sample(&w, m);
    let winding = unwrap_phase(&ws).map(|(n, _)| n).unwrap_or(0);
    let ub = pt.ub_m1().norm();
    let w_prime = minabs(&wp);
    let simple_curve = chord_arc_ratio(&ws);
    let lambda_prime = minabs(&lp);
    let lambda_bar_prime = minabs(&lbp);
    let wronskian = minabs(&(&(&pt.lambda * &lbp) - &(&pt.lambda_bar * &lp)));
    let semisimple = minabs(&(&(&lp * &lbp.derivative()) - &(&lbp * &lp.derivative())));
    let nondegenerate = ub > MARGIN_TOL && w_prime > MARGIN_TOL;
    let in_m0 = nondegenerate && simple_curve > SIMPLE_TOL && winding == 1;
    MembershipReport {
        grid: m,
        ub_m1: ub,
        w_prime,
        simple_curve,
        winding,
        lambda_prime,
        lambda_bar_prime,
        wronskian,
        semisimple,
        nondegenerate,
        in_m0,
        intersection_valid: in_m0
            && lambda_prime > MARGIN_TOL
            && lambda_bar_prime > MARGIN_TOL
            && wronskian > MARGIN_TOL,
        semisimple_valid: in_m0 && semisimple > MARGIN_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_point() -> Point {
        // lambda = z - 1/z, lambda_bar = 1/z
        Point::new(
            LaurentSeries::from_real(-1, &[-1.0, 0.0, 1.0]),
            LaurentSeries::from_real(-1, &[1.0]),
        )
        .unwrap()
    }

    #[test]
    fn pairing_examples() {
        let inv_z = LaurentSeries::monomial(-1, ONE);
        let one = LaurentSeries::constant(ONE);
        let o = Cotangent::new(inv_z.clone(), LaurentSeries::zero()).unwrap();
        let x = Tangent::new(one.clone(), LaurentSeries::zero()).unwrap();
        assert_eq!(pair(&o, &x), ONE);
        let o = Cotangent::new(LaurentSeries::zero(), one.clone()).unwrap();
        let x = Tangent::new(LaurentSeries::zero(), inv_z).unwrap();
        assert_eq!(pair(&o, &x), ONE);
        let o = Cotangent::new(LaurentSeries::z(), LaurentSeries::zero()).unwrap();
        let x = Tangent::new(one, LaurentSeries::zero()).unwrap();
        assert_eq!(pair(&o, &x), ZERO);
    }

    #[test]
    fn point_validation() {
        let bad = Point::new(
            LaurentSeries::from_real(-1, &[-1.0, 0.0, 2.0]),
            LaurentSeries::from_real(-1, &[1.0]),
        );
        assert!(bad.is_err());
        let bad = Point::new(
            LaurentSeries::from_real(0, &[0.0, 1.0]),
            LaurentSeries::from_real(0, &[1.0]),
        );
        assert!(bad.is_err());
        assert!(Tangent::new(LaurentSeries::z(), LaurentSeries::zero()).is_err());
        assert!(Cotangent::new(LaurentSeries::monomial(-2, ONE), LaurentSeries::zero()).is_err());
    }

    #[test]
    fn product_at_simple_point() {
        let s = Structure::new(&simple_point()).unwrap();
        let inv_z = LaurentSeries::monomial(-1, ONE);
        let o = Cotangent {
            w1: inv_z,
            w2: LaurentSeries::zero(),
        };
        let p = s.cot_mul(&o, &o);
        assert!(
            p.dist(&Cotangent {
                w1: LaurentSeries::constant(ONE),
                w2: LaurentSeries::zero()
            }) < 1e-15
        );
    }

    #[test]
    fn eta_of_unit() {
        let s = Structure::new(&simple_point()).unwrap();
        let e = s.eta_apply(&Cotangent {
            w1: LaurentSeries::zero(),
            w2: LaurentSeries::constant(ONE),
        });
        assert!(e.dist(&Tangent::unit()) < 1e-15);
        assert!(s.eta_apply(&Cotangent::zero()).max_abs() == 0.0);
        let back = s.eta_inverse(&Tangent::unit()).unwrap();
        assert!(back.dist(&s.cotangent_unit()) < 1e-14);
    }

    #[test]
    fn euler_examples() {
        let e = euler_field(&simple_point());
        let want = Tangent {
            a: LaurentSeries::monomial(-1, C::new(-2.0, 0.0)),
            ab: LaurentSeries::monomial(-1, C::new(2.0, 0.0)),
        };
        assert!(e.dist(&want) < 1e-15);
    }

    #[test]
    fn membership_of_simple_point() {
        let r = check_membership(&simple_point());
        assert!(r.in_m0);
        assert_eq!(r.winding, 1);
        // lambda' = 1 + z^-2 vanishes at z = +-i
        assert!(!r.intersection_valid);
        let degenerate = Point {
            lambda: LaurentSeries::from_real(-1, &[-1.0, 0.0, 1.0]),
            lambda_bar: LaurentSeries::from_real(0, &[1.0]),
        };
        let r = check_membership(&degenerate);
        assert!(!r.nondegenerate);
        assert!(Point::new(degenerate.lambda, degenerate.lambda_bar).is_err());
    }

    #[test]
    fn chord_arc_detects_figure_eight() {
        let m = 256;
        let z = crate::laurent::roots_of_unity(m);
        let circle: Vec<C> = z.clone();
        assert!(chord_arc_ratio(&circle) > 0.6);
        let eight: Vec<C> = z.iter().map(|p| p + p * p * 1.5).collect();
        assert!(chord_arc_ratio(&eight) < 0.05);
    }
}
