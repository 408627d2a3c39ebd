//! The loop space: fields `lambda(z, x)`, `lambda_bar(z, x)` on `K` Fourier
//! collocation nodes `x_k = 2 pi k / K`, the Lax flows `s_n`, `s_bar_n`, the
//! primary flows, both Poisson operators, the Hamiltonians `H_n`, `H_bar_n`
//! and a classical Runge-Kutta integrator.
//!
//! Products of fields are taken nodewise. The x-derivative is spectral and
//! every bracket `{f, g} = z f_z g_x - z g_z f_x` is dealiased by zeroing the
//! Fourier modes `|m| > K/3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canonical::{char_velocities, du_samples, printed_toda_velocities, VelocityFlow};
use crate::error::{Error, Result};
use crate::flatcoords::{flat_coords_with, FlatIndex};
use crate::laurent::{sample, spectrum, LaurentSeries, C, ONE, ZERO};
use crate::manifold::{pair, Cotangent, Point, Structure, Tangent, Truncation};
use crate::potential::flat_first_derivative;
use crate::sampling::Sampler;

pub const DEFAULT_NODES: usize = 32;
pub const DEFAULT_BAND: i64 = 16;
/// Any coefficient above this modulus aborts an integration.
pub const BLOW_UP: f64 = 1e6;
pub const DEFAULT_TAIL_LIMIT: f64 = 1e-8;
/// Coefficients at or below this modulus are dropped from divided series.
const CHOP: f64 = 1e-20;

/// A Laurent series in `z` at each collocation node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopField {
    nodes: Vec<LaurentSeries>,
}

impl LoopField {
    pub fn new(nodes: Vec<LaurentSeries>) -> Self {
        LoopField { nodes }
    }

    /// The same series at all `k` nodes.
    pub fn constant(s: &LaurentSeries, k: usize) -> Self {
        LoopField {
            nodes: vec![s.clone(); k],
        }
    }

    /// The series `f(x_k)` at node `k`.
    pub fn from_fn(k: usize, f: impl Fn(f64) -> LaurentSeries) -> Self {
        LoopField {
            nodes: (0..k).map(|j| f(node_x(j, k))).collect(),
        }
    }

    pub fn nodes(&self) -> &[LaurentSeries] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> &LaurentSeries {
        &self.nodes[j]
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    pub fn zero(k: usize) -> Self {
        LoopField {
            nodes: vec![LaurentSeries::zero(); k],
        }
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        LoopField {
            nodes: self.nodes.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&LaurentSeries) -> Result<LaurentSeries>) -> Result<Self> {
        Ok(LoopField {
            nodes: self.nodes.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn zip(
        &self,
        o: &Self,
        f: impl Fn(&LaurentSeries, &LaurentSeries) -> LaurentSeries,
    ) -> Self {
        LoopField {
            nodes: self
                .nodes
                .iter()
                .zip(&o.nodes)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    /// Nodewise product.
    pub fn mul(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a * b)
    }

    pub fn scale(&self, c: C) -> Self {
        self.map(|a| a.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn powi(&self, n: u32) -> Self {
        self.map(|a| a.powi(n))
    }

    pub fn geq(&self, d: i64) -> Self {
        self.map(|a| a.geq(d))
    }

    pub fn leq(&self, d: i64) -> Self {
        self.map(|a| a.leq(d))
    }

    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        self.map(|a| a.restrict(lo, hi))
    }

    pub fn shift(&self, d: i64) -> Self {
        self.map(|a| a.shift(d))
    }

    /// `z d/dz`.
    pub fn z_derivative(&self) -> Self {
        self.map(|a| a.z_derivative())
    }

    /// Coefficient of `z^d` at every node.
    pub fn coeff(&self, d: i64) -> Vec<C> {
        self.nodes.iter().map(|a| a.coeff(d)).collect()
    }

    /// Node-by-node constants `c_k z^0`.
    pub fn scalars(values: &[C]) -> Self {
        LoopField {
            nodes: values.iter().map(|&c| LaurentSeries::constant(c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, a| m.max(a.max_abs()))
    }

    pub fn dist(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }

    /// Smallest and largest stored degree over all nodes.
    fn band(&self) -> Option<(i64, i64)> {
        self.nodes
            .iter()
            .filter_map(|a| a.band())
            .fold(None, |acc, (lo, hi)| match acc {
                None => Some((lo, hi)),
                Some((l, h)) => Some((l.min(lo), h.max(hi))),
            })
    }

    /// Applies `f(m, c_m)` to the x-Fourier coefficients of every z-degree.
    fn modal_map(&self, f: impl Fn(i64, C) -> C) -> Self {
        let k = self.k();
        let Some((lo, hi)) = self.band() else {
            return self.clone();
        };
        let mut out = vec![vec![ZERO; (hi - lo + 1) as usize]; k];
        for d in lo..=hi {
            let modes = spectrum(&self.coeff(d));
            let half = (k / 2) as i64;
            let shifted: Vec<C> = (-half..half)
                .map(|m| f(m, modes[m.rem_euclid(k as i64) as usize]))
                .collect();
            let values = sample(&LaurentSeries::new(-half, shifted), k);
            for (j, v) in values.into_iter().enumerate() {
                out[j][(d - lo) as usize] = v;
            }
        }
        LoopField {
            nodes: out.into_iter().map(|c| LaurentSeries::new(lo, c)).collect(),
        }
    }

    /// Spectral `d/dx`; the Nyquist mode is dropped.
    pub fn dx(&self) -> Self {
        let half = (self.k() / 2) as i64;
        self.modal_map(|m, c| {
            if m == -half {
                ZERO
            } else {
                c * C::new(0.0, m as f64)
            }
        })
    }

    /// Zeroes the x-modes `|m| > K/3`.
    pub fn dealias(&self) -> Self {
        let cut = (self.k() / 3) as i64;
        self.modal_map(|m, c| if m.abs() > cut { ZERO } else { c })
    }

    /// Largest x-Fourier coefficient with `|m| >= K/3`, over all z-degrees.
    pub fn x_tail(&self) -> f64 {
        let k = self.k();
        let cut = k / 3;
        let Some((lo, hi)) = self.band() else {
            return 0.0;
        };
        let mut t = 0.0f64;
        for d in lo..=hi {
            let modes = spectrum(&self.coeff(d));
            for (j, c) in modes.iter().enumerate() {
                let m = j.min(k - j);
                if m >= cut {
                    t = t.max(c.norm());
                }
            }
        }
        t
    }

    /// x-average of each z-coefficient.
    pub fn average(&self) -> LaurentSeries {
        let mut acc = LaurentSeries::zero();
        for a in &self.nodes {
            acc += a;
        }
        acc.scale_re(1.0 / self.k() as f64)
    }
}

/// `x_k = 2 pi k / K`.
pub fn node_x(j: usize, k: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / k as f64
}

/// `{f, g} = z f_z g_x - z g_z f_x`, dealiased.
pub fn pb(f: &LoopField, g: &LoopField) -> LoopField {
    f.z_derivative()
        .mul(&g.dx())
        .sub(&g.z_derivative().mul(&f.dx()))
        .dealias()
}

/// A point of the loop space: `lambda` in degrees `[-N, 1]`, `lambda_bar` in `[-1, N]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopPoint {
    pub lambda: LoopField,
    pub lambda_bar: LoopField,
    /// The band `N`.
    pub band: i64,
}

/// A vector field along a loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopTangent {
    pub a: LoopField,
    pub ab: LoopField,
}

/// A one-form along a loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopCotangent {
    pub w1: LoopField,
    pub w2: LoopField,
}

macro_rules! loop_pair_ops {
    ($t:ident, $x:ident, $y:ident) => {
        impl $t {
            pub fn zero(k: usize) -> Self {
                $t {
                    $x: LoopField::zero(k),
                    $y: LoopField::zero(k),
                }
            }
            pub fn add(&self, o: &Self) -> Self {
                $t {
                    $x: self.$x.add(&o.$x),
                    $y: self.$y.add(&o.$y),
                }
            }
            pub fn sub(&self, o: &Self) -> Self {
                $t {
                    $x: self.$x.sub(&o.$x),
                    $y: self.$y.sub(&o.$y),
                }
            }
            pub fn scale(&self, c: C) -> Self {
                $t {
                    $x: self.$x.scale(c),
                    $y: self.$y.scale(c),
                }
            }
            pub fn max_abs(&self) -> f64 {
                self.$x.max_abs().max(self.$y.max_abs())
            }
            pub fn dist(&self, o: &Self) -> f64 {
                self.sub(o).max_abs()
            }
            pub fn k(&self) -> usize {
                self.$x.k()
            }
        }
    };
}
loop_pair_ops!(LoopTangent, a, ab);
loop_pair_ops!(LoopCotangent, w1, w2);

impl LoopTangent {
    /// Keeps the tangent bands of a loop of band `n`: `[-n, 0]` and `[-1, n]`.
    pub fn restrict(&self, n: i64) -> Self {
        LoopTangent {
            a: self.a.restrict(-n, 0),
            ab: self.ab.restrict(-1, n),
        }
    }

    pub fn node(&self, j: usize) -> Tangent {
        Tangent {
            a: self.a.node(j).clone(),
            ab: self.ab.node(j).clone(),
        }
    }

    pub fn from_nodes(nodes: &[Tangent]) -> Self {
        LoopTangent {
            a: LoopField::new(nodes.iter().map(|t| t.a.clone()).collect()),
            ab: LoopField::new(nodes.iter().map(|t| t.ab.clone()).collect()),
        }
    }
}

impl LoopCotangent {
    pub fn node(&self, j: usize) -> Cotangent {
        Cotangent {
            w1: self.w1.node(j).clone(),
            w2: self.w2.node(j).clone(),
        }
    }

    pub fn from_nodes(nodes: &[Cotangent]) -> Self {
        LoopCotangent {
            w1: LoopField::new(nodes.iter().map(|t| t.w1.clone()).collect()),
            w2: LoopField::new(nodes.iter().map(|t| t.w2.clone()).collect()),
        }
    }

    /// `f(x) o`, with `f` a scalar field.
    pub fn times_scalars(&self, f: &[C]) -> Self {
        let s = LoopField::scalars(f);
        LoopCotangent {
            w1: self.w1.mul(&s),
            w2: self.w2.mul(&s),
        }
    }
}

impl LoopPoint {
    /// Builds a loop from points, one per node, checking the point invariants.
    pub fn from_points(points: &[Point], band: i64) -> Result<Self> {
        for p in points {
            Point::new(p.lambda.clone(), p.lambda_bar.clone())?;
        }
        Ok(LoopPoint {
            lambda: LoopField::new(points.iter().map(|p| p.lambda.clone()).collect()),
            lambda_bar: LoopField::new(points.iter().map(|p| p.lambda_bar.clone()).collect()),
            band,
        })
    }

    /// The same point at every node.
    pub fn constant(pt: &Point, k: usize, band: i64) -> Self {
        LoopPoint {
            lambda: LoopField::constant(&pt.lambda, k),
            lambda_bar: LoopField::constant(&pt.lambda_bar, k),
            band,
        }
    }

    pub fn k(&self) -> usize {
        self.lambda.k()
    }

    pub fn point(&self, j: usize) -> Result<Point> {
        Point::new(self.lambda.node(j).clone(), self.lambda_bar.node(j).clone())
    }

    pub fn points(&self) -> Result<Vec<Point>> {
        (0..self.k()).map(|j| self.point(j)).collect()
    }

    pub fn w(&self) -> LoopField {
        self.lambda.add(&self.lambda_bar)
    }

    /// `(lambda_x, lambda_bar_x)`.
    pub fn dx(&self) -> LoopTangent {
        LoopTangent {
            a: self.lambda.dx(),
            ab: self.lambda_bar.dx(),
        }
    }

    /// `L + x`, without renormalizing.
    pub fn displace(&self, x: &LoopTangent) -> Self {
        LoopPoint {
            lambda: self.lambda.add(&x.a),
            lambda_bar: self.lambda_bar.add(&x.ab),
            band: self.band,
        }
    }

    pub fn dist(&self, o: &Self) -> f64 {
        self.lambda
            .dist(&o.lambda)
            .max(self.lambda_bar.dist(&o.lambda_bar))
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda.max_abs().max(self.lambda_bar.max_abs())
    }

    fn structures(&self) -> Result<Vec<Structure>> {
        (0..self.k())
            .map(|j| Structure::with_truncation(&self.point(j)?, loop_truncation()))
            .collect()
    }
}

/// Truncation policy for nodewise divisions and logarithms along a loop.
fn loop_truncation() -> Truncation {
    Truncation {
        margin: 80,
        grid: 1024,
        ..Truncation::default()
    }
}

fn check_grids(k1: usize, k2: usize) -> Result<()> {
    if k1 != k2 {
        return Err(Error::GridMismatch(format!("{k1} nodes against {k2}")));
    }
    Ok(())
}

/// x-average of the nodewise pairing `res(w1 a + w2 ab)`.
pub fn loop_pair(o: &LoopCotangent, x: &LoopTangent) -> Result<C> {
    check_grids(o.k(), x.k())?;
    let k = o.k();
    let s: C = (0..k).map(|j| pair(&o.node(j), &x.node(j))).sum();
    Ok(s / k as f64)
}

/// Flows of the hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flow {
    /// Lax flow `s_n`, `n >= 1`.
    S(u32),
    /// Lax flow `s_bar_n`, `n >= 1`.
    SBar(u32),
    /// Primary flow `t^{alpha, 0}`.
    T(i64),
    /// Primary flow `t^{u, 0}`.
    U,
    /// Primary flow `t^{v, 0} = d/dx`.
    V,
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flow::S(n) => write!(f, "s{n}"),
            Flow::SBar(n) => write!(f, "sbar{n}"),
            Flow::T(a) => write!(f, "t:{a}"),
            Flow::U => write!(f, "u"),
            Flow::V => write!(f, "v"),
        }
    }
}

impl FromStr for Flow {
    type Err = Error;

    /// Parses `s<n>`, `sbar<n>`, `t:<alpha>`, `u`, `v`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "unknown flow '{s}', expected s<n>, sbar<n>, t:<alpha>, u or v"
            ))
        };
        let positive = |d: &str| d.parse::<u32>().ok().filter(|&n| n >= 1).ok_or_else(bad);
        if s == "u" {
            Ok(Flow::U)
        } else if s == "v" {
            Ok(Flow::V)
        } else if let Some(d) = s.strip_prefix("sbar") {
            Ok(Flow::SBar(positive(d)?))
        } else if let Some(d) = s.strip_prefix('s') {
            Ok(Flow::S(positive(d)?))
        } else if let Some(d) = s.strip_prefix("t:") {
            d.parse().map(Flow::T).map_err(|_| bad())
        } else {
            Err(bad())
        }
    }
}

/// `s_n`: `({(lambda^n)_+, lambda}, {(lambda^n)_+, lambda_bar})`;
/// `s_bar_n`: `({(lambda_bar^n)_-, lambda}, {(lambda_bar^n)_-, lambda_bar})`.
pub fn lax_rhs(l: &LoopPoint, n: u32, bar: bool) -> LoopTangent {
    let p = if bar {
        l.lambda_bar.powi(n).leq(-1)
    } else {
        l.lambda.powi(n).geq(0)
    };
    LoopTangent {
        a: pb(&p, &l.lambda),
        ab: pb(&p, &l.lambda_bar),
    }
}

/// `w^k` at every node, dividing on the circle for negative `k`.
fn w_power(l: &LoopPoint, k: i64) -> Result<LoopField> {
    let w = l.w();
    if k >= 0 {
        return Ok(w.powi(k as u32));
    }
    let tr = loop_truncation();
    w.try_map(|wj| {
        Ok(tr
            .divide(&LaurentSeries::constant(ONE), &wj.powi((-k) as u32))?
            .chop(CHOP))
    })
}

/// Primary flow `t^{alpha, 0}`. For `alpha != -1`:
/// `(1/(alpha+1)) ({(w^{alpha+1})_{<0}, lambda}, -{(w^{alpha+1})_{>=0}, lambda_bar})`;
/// for `alpha = -1`: `({(log(w/z))_{<0} + log z, lambda}, -{(log(w/z))_{>=0}, lambda_bar})`,
/// where `{log z, lambda} = lambda_x`.
pub fn primary_rhs(l: &LoopPoint, alpha: i64) -> Result<LoopTangent> {
    if alpha == -1 {
        let tr = loop_truncation();
        let g = l.w().try_map(|wj| Ok(tr.log(&wj.shift(-1))?.chop(CHOP)))?;
        return Ok(LoopTangent {
            a: pb(&g.leq(-1), &l.lambda).add(&l.lambda.dx()),
            ab: pb(&g.geq(0), &l.lambda_bar).neg(),
        });
    }
    let g = w_power(l, alpha + 1)?;
    let c = C::new(1.0 / (alpha + 1) as f64, 0.0);
    Ok(LoopTangent {
        a: pb(&g.leq(-1), &l.lambda).scale(c),
        ab: pb(&g.geq(0), &l.lambda_bar).scale(-c),
    })
}

/// Right-hand side of any flow.
pub fn flow_rhs(l: &LoopPoint, flow: Flow) -> Result<LoopTangent> {
    match flow {
        Flow::S(n) => Ok(lax_rhs(l, n, false)),
        Flow::SBar(n) => Ok(lax_rhs(l, n, true)),
        Flow::T(a) => primary_rhs(l, a),
        Flow::U => Ok(lax_rhs(l, 1, true).scale(-ONE)),
        Flow::V => Ok(l.dx()),
    }
}

/// `H_n = -avg_x coeff_0(lambda^{n+1})/(n+1)` (barred: `lambda_bar`).
/// `H_{-1} = -avg_x (t_{-1} + v)` and `H_bar_{-1} = avg_x v`.
pub fn hamiltonian(l: &LoopPoint, n: i64, bar: bool) -> Result<C> {
    if n < -1 {
        return Err(Error::Config(format!("Hamiltonian index {n} < -1")));
    }
    let k = l.k() as f64;
    if n == -1 {
        let mut acc = ZERO;
        for j in 0..l.k() {
            let pt = l.point(j)?;
            acc += if bar {
                pt.v()
            } else {
                let s = Structure::with_truncation(&pt, loop_truncation())?;
                -(flat_coords_with(&s, 1)?.t(-1) + pt.v())
            };
        }
        return Ok(acc / k);
    }
    let f = if bar { &l.lambda_bar } else { &l.lambda };
    let p = f.powi((n + 1) as u32).average().coeff(0);
    Ok(-p / (n + 1) as f64)
}

/// Gradient of [`hamiltonian`]: `(-(lambda^n/z)_{>=-1}, 0)` or `(0, -(lambda_bar^n/z)_{<=0})`.
/// For `n = -1` these are `(z^{-1}, 0)` and `(0, z^{-1})`.
pub fn gradient(l: &LoopPoint, n: i64, bar: bool) -> LoopCotangent {
    let k = l.k();
    let zero = LoopField::zero(k);
    let inv_z = LoopField::constant(&LaurentSeries::monomial(-1, ONE), k);
    match (n, bar) {
        (-1, false) => LoopCotangent {
            w1: inv_z,
            w2: zero,
        },
        (-1, true) => LoopCotangent {
            w1: zero,
            w2: inv_z,
        },
        (_, false) => LoopCotangent {
            w1: l.lambda.powi(n as u32).shift(-1).geq(-1).neg(),
            w2: zero,
        },
        (_, true) => LoopCotangent {
            w1: zero,
            w2: l.lambda_bar.powi(n as u32).shift(-1).leq(0).neg(),
        },
    }
}

/// Nodewise `phi = (1/2 pi i) \oint (z lambda' w1 + z lambda_bar' w2) dz`.
fn phi(l: &LoopPoint, o: &LoopCotangent) -> LoopField {
    let f = l
        .lambda
        .z_derivative()
        .mul(&o.w1)
        .add(&l.lambda_bar.z_derivative().mul(&o.w2));
    LoopField::scalars(&f.coeff(-1))
}

/// `Q = {lambda, z w1} + {lambda_bar, z w2}`.
fn q_field(l: &LoopPoint, zw: &LoopField, zwb: &LoopField) -> LoopField {
    pb(&l.lambda, zw).add(&pb(&l.lambda_bar, zwb))
}

/// First Poisson operator:
/// `(-{lambda, (z w1 - z w2)_-} + Q_{<=0}, {lambda_bar, (z w1 - z w2)_+} + Q_{>0})`.
pub fn poisson1_apply(l: &LoopPoint, o: &LoopCotangent) -> Result<LoopTangent> {
    check_grids(l.k(), o.k())?;
    let (zw, zwb) = (o.w1.shift(1), o.w2.shift(1));
    let diff = zw.sub(&zwb);
    let q = q_field(l, &zw, &zwb);
    Ok(LoopTangent {
        a: pb(&l.lambda, &diff.leq(-1)).neg().add(&q.leq(0)),
        ab: pb(&l.lambda_bar, &diff.geq(0)).add(&q.geq(1)),
    })
}

/// Second Poisson operator:
/// `({lambda, (z lambda w1 + z lambda_bar w2)_-} - lambda Q_{<=0} + z lambda' phi_x,
///   -{lambda_bar, (z lambda_bar w2 + z lambda w1)_+} + lambda_bar Q_{>0} + z lambda_bar' phi_x)`.
pub fn poisson2_apply(l: &LoopPoint, o: &LoopCotangent) -> Result<LoopTangent> {
    check_grids(l.k(), o.k())?;
    let (zw, zwb) = (o.w1.shift(1), o.w2.shift(1));
    let s = l.lambda.mul(&zw).add(&l.lambda_bar.mul(&zwb));
    let q = q_field(l, &zw, &zwb);
    let phi_x = phi(l, o).dx();
    Ok(LoopTangent {
        a: pb(&l.lambda, &s.leq(-1))
            .sub(&l.lambda.mul(&q.leq(0)))
            .add(&l.lambda.z_derivative().mul(&phi_x)),
        ab: pb(&l.lambda_bar, &s.geq(0))
            .neg()
            .add(&l.lambda_bar.mul(&q.geq(1)))
            .add(&l.lambda_bar.z_derivative().mul(&phi_x)),
    })
}

/// `|P1(dH_n) + P2(dH_{n-1})|` (barred: `|P1(dH_bar_n) - P2(dH_bar_{n-1})|`).
pub fn recursion_residual(l: &LoopPoint, n: i64, bar: bool) -> Result<f64> {
    let first = poisson1_apply(l, &gradient(l, n, bar))?;
    let second = poisson2_apply(l, &gradient(l, n - 1, bar))?;
    Ok(if bar {
        first.sub(&second)
    } else {
        first.add(&second)
    }
    .max_abs())
}

/// Nodewise gradient of the primary Hamiltonian `int dF/dx_idx dx` by central
/// differences of the density in the coefficients of `lambda` (degrees
/// `[-reach, 0]`) and `lambda_bar` (degrees `[-1, reach]`).
pub fn primary_hamiltonian_gradient(
    l: &LoopPoint,
    idx: FlatIndex,
    reach: i64,
    step: f64,
) -> Result<LoopCotangent> {
    let mut nodes = Vec::with_capacity(l.k());
    for j in 0..l.k() {
        let pt = l.point(j)?;
        let density = |p: &Point| -> Result<C> {
            flat_first_derivative(&Structure::with_truncation(p, loop_truncation())?, idx)
        };
        let derivative = |degree: i64, bar: bool| -> Result<C> {
            let moved = |sign: f64| -> Result<C> {
                let e = LaurentSeries::monomial(degree, C::new(sign * step, 0.0));
                let mut p = pt.clone();
                if bar {
                    p.lambda_bar = &p.lambda_bar + &e;
                } else {
                    p.lambda = &p.lambda + &e;
                }
                density(&p)
            };
            Ok((moved(1.0)? - moved(-1.0)?) / (2.0 * step))
        };
        let w1: Vec<C> = (-reach..=0)
            .rev()
            .map(|d| derivative(d, false))
            .collect::<Result<_>>()?;
        let w2: Vec<C> = (-1..=reach)
            .rev()
            .map(|d| derivative(d, true))
            .collect::<Result<_>>()?;
        // pairing res(w1 a) picks a_d against the z^{-1-d} coefficient of w1
        nodes.push(Cotangent {
            w1: LaurentSeries::new(-1, w1),
            w2: LaurentSeries::new(-1 - reach, w2),
        });
    }
    Ok(LoopCotangent::from_nodes(&nodes))
}

/// Primary flow through the tangent algebra: `d/dx_idx . L_x` at each node.
pub fn primary_rhs_by_product(l: &LoopPoint, idx: FlatIndex) -> Result<LoopTangent> {
    let lx = l.dx();
    let structures = l.structures()?;
    let nodes: Vec<Tangent> = structures
        .iter()
        .enumerate()
        .map(|(j, s)| s.tan_mul(&crate::flatcoords::flat_frame(s, idx)?, &lx.node(j)))
        .collect::<Result<_>>()?;
    Ok(LoopTangent::from_nodes(&nodes))
}

/// Velocities of `u_sigma` under a flow, where they exist in closed form.
pub fn velocity_flow(flow: Flow) -> VelocityFlow {
    match flow {
        Flow::S(n) => VelocityFlow::S(n),
        Flow::SBar(n) => VelocityFlow::SBar(n),
        Flow::T(a) => VelocityFlow::T(a),
        Flow::U => VelocityFlow::U,
        Flow::V => VelocityFlow::V,
    }
}

/// `max |du(p)(dL/dt) - A(p) du(p)(L_x)|` over `m` circle points and all nodes.
///
/// By the critical-point equation the derivatives of `u_sigma` at fixed
/// `sigma` are the pairings of `du(p)` with the flow and with `L_x`.
pub fn transport_residual(l: &LoopPoint, flow: Flow, m: usize) -> Result<f64> {
    let rhs = flow_rhs(l, flow)?;
    transport_residual_with(l, &rhs, |s| char_velocities(s, velocity_flow(flow), m), m)
}

/// [`transport_residual`] for the Lax flows with the `n`-independent
/// velocities `[(p lambda')_{>=0}]`, `[(p lambda_bar')_{<0}]`.
pub fn printed_toda_transport_residual(l: &LoopPoint, n: u32, bar: bool, m: usize) -> Result<f64> {
    let rhs = lax_rhs(l, n, bar);
    transport_residual_with(
        l,
        &rhs,
        |s| {
            let (c, cb) = printed_toda_velocities(s.point(), m);
            Ok(if bar { cb } else { c })
        },
        m,
    )
}

fn transport_residual_with(
    l: &LoopPoint,
    rhs: &LoopTangent,
    velocity: impl Fn(&Structure) -> Result<Vec<C>>,
    m: usize,
) -> Result<f64> {
    let lx = l.dx();
    let mut worst = 0.0f64;
    for (j, s) in l.structures()?.iter().enumerate() {
        let a = velocity(s)?;
        let dt = du_samples(s.point(), &rhs.node(j), m)?;
        let dx = du_samples(s.point(), &lx.node(j), m)?;
        for q in 0..m {
            worst = worst.max((dt[q] - a[q] * dx[q]).norm());
        }
    }
    Ok(worst)
}

/// Bookkeeping of one integration step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    /// Largest coefficient discarded by the z-band truncation.
    pub z_tail: f64,
    /// Largest x-Fourier coefficient at `|m| >= K/3`.
    pub x_tail: f64,
    /// Largest `|lambda_1 - 1|` before it is reset.
    pub u1_drift: f64,
}

impl StepReport {
    pub fn tail(&self) -> f64 {
        self.z_tail.max(self.x_tail)
    }

    fn merge(self, o: StepReport) -> StepReport {
        StepReport {
            z_tail: self.z_tail.max(o.z_tail),
            x_tail: self.x_tail.max(o.x_tail),
            u1_drift: self.u1_drift.max(o.u1_drift),
        }
    }
}

/// Cuts a loop back to its band and resets `lambda_1 = 1`.
fn renormalize(l: &LoopPoint) -> (LoopPoint, StepReport) {
    let n = l.band;
    let kept_a = l.lambda.restrict(-n, 1);
    let kept_b = l.lambda_bar.restrict(-1, n);
    let z_tail = l.lambda.dist(&kept_a).max(l.lambda_bar.dist(&kept_b));
    let u1_drift = l
        .lambda
        .coeff(1)
        .iter()
        .fold(0.0f64, |m, c| m.max((c - ONE).norm()));
    let lambda = kept_a.map(|a| &a.restrict(-n, 0) + &LaurentSeries::z());
    let out = LoopPoint {
        lambda,
        lambda_bar: kept_b,
        band: n,
    };
    let x_tail = out.lambda.x_tail().max(out.lambda_bar.x_tail());
    (
        out,
        StepReport {
            z_tail,
            x_tail,
            u1_drift,
        },
    )
}

/// One classical Runge-Kutta step of size `h`.
pub fn rk4_step(l: &LoopPoint, flow: Flow, h: f64) -> Result<(LoopPoint, StepReport)> {
    let hc = |c: f64| C::new(c * h, 0.0);
    let k1 = flow_rhs(l, flow)?;
    let (l2, r2) = renormalize(&l.displace(&k1.scale(hc(0.5))));
    let k2 = flow_rhs(&l2, flow)?;
    let (l3, r3) = renormalize(&l.displace(&k2.scale(hc(0.5))));
    let k3 = flow_rhs(&l3, flow)?;
    let (l4, r4) = renormalize(&l.displace(&k3.scale(hc(1.0))));
    let k4 = flow_rhs(&l4, flow)?;
    let incr = k1
        .add(&k2.scale(C::new(2.0, 0.0)))
        .add(&k3.scale(C::new(2.0, 0.0)))
        .add(&k4);
    let (out, r) = renormalize(&l.displace(&incr.scale(hc(1.0 / 6.0))));
    Ok((out, r.merge(r2).merge(r3).merge(r4)))
}

/// One row of the conservation ledger.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub step: usize,
    pub time: f64,
    pub h1: C,
    pub hbar1: C,
    pub h2: C,
    pub tail_norm: f64,
    pub u1_drift: f64,
}

fn ledger_row(l: &LoopPoint, step: usize, time: f64, r: StepReport) -> Result<LedgerRow> {
    Ok(LedgerRow {
        step,
        time,
        h1: hamiltonian(l, 1, false)?,
        hbar1: hamiltonian(l, 1, true)?,
        h2: hamiltonian(l, 2, false)?,
        tail_norm: r.tail(),
        u1_drift: r.u1_drift,
    })
}

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integrator {
    pub h: f64,
    pub tail_limit: f64,
    /// Keep a snapshot every this many steps (and always the last).
    pub snapshot_every: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            h: 1e-3,
            tail_limit: DEFAULT_TAIL_LIMIT,
            snapshot_every: 10,
        }
    }
}

/// Snapshots and ledger of an integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, LoopPoint)>,
    pub ledger: Vec<LedgerRow>,
}

impl Trajectory {
    pub fn last(&self) -> &LoopPoint {
        &self
            .snapshots
            .last()
            .expect("trajectory has the initial snapshot")
            .1
    }
}

/// Integrates `flow` over `[0, t_end]` with `ceil(t_end/h)` equal steps.
pub fn integrate(l: &LoopPoint, flow: Flow, t_end: f64, opts: &Integrator) -> Result<Trajectory> {
    let steps = (t_end / opts.h).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let mut cur = l.clone();
    let mut snapshots = vec![(0.0, cur.clone())];
    let mut ledger = vec![ledger_row(&cur, 0, 0.0, StepReport::default())?];
    for step in 1..=steps {
        let time = step as f64 * h;
        let (next, r) = rk4_step(&cur, flow, h)?;
        if !(next.max_abs() <= BLOW_UP) {
            return Err(Error::BlowUp { time });
        }
        if r.tail() > opts.tail_limit {
            return Err(Error::TailOverflow {
                tail: r.tail(),
                limit: opts.tail_limit,
                time,
            });
        }
        cur = next;
        ledger.push(ledger_row(&cur, step, time, r)?);
        if step % opts.snapshot_every.max(1) == 0 || step == steps {
            snapshots.push((time, cur.clone()));
        }
    }
    Ok(Trajectory { snapshots, ledger })
}

/// `max |Phi_a(Phi_b(L)) - Phi_b(Phi_a(L))| / h^2` for single steps of size `h`.
pub fn commutator_norm(l: &LoopPoint, a: Flow, b: Flow, h: f64) -> Result<f64> {
    let ab = rk4_step(&rk4_step(l, b, h)?.0, a, h)?.0;
    let ba = rk4_step(&rk4_step(l, a, h)?.0, b, h)?.0;
    Ok(ab.dist(&ba) / (h * h))
}

/// Seeded family of loops: the locus `lambda = z - v - e^u/z`,
/// `lambda_bar = v + e^u/z` plus z-tails of size `0.05 rho^|d|`, where `u`, `v`
/// and every tail coefficient carry real x-Fourier modes `|m| <= 2` of
/// relative size `amp`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopFamily {
    pub nodes: usize,
    pub band: i64,
    pub amp: f64,
    pub rho: f64,
}

impl Default for LoopFamily {
    fn default() -> Self {
        LoopFamily {
            nodes: DEFAULT_NODES,
            band: DEFAULT_BAND,
            amp: 0.1,
            rho: 0.3,
        }
    }
}

impl LoopFamily {
    pub fn sample(&self, smp: &mut Sampler) -> LoopPoint {
        let (k, n, amp) = (self.nodes, self.band, self.amp);
        let mut wave = |scale: f64| -> [f64; 5] {
            [
                scale * smp.uniform(-1.0, 1.0),
                amp * scale * smp.uniform(-1.0, 1.0),
                amp * scale * smp.uniform(-1.0, 1.0),
                0.3 * amp * scale * smp.uniform(-1.0, 1.0),
                0.3 * amp * scale * smp.uniform(-1.0, 1.0),
            ]
        };
        let at = |c: &[f64; 5], x: f64| {
            C::new(
                c[0] + c[1] * x.cos()
                    + c[2] * x.sin()
                    + c[3] * (2.0 * x).cos()
                    + c[4] * (2.0 * x).sin(),
                0.0,
            )
        };
        let u = wave(0.3);
        let v = wave(0.2);
        let tails_a: Vec<[f64; 5]> = (2..=n)
            .map(|d| wave(0.05 * self.rho.powi(d as i32)))
            .collect();
        let tails_b: Vec<[f64; 5]> = (1..=n)
            .map(|d| wave(0.05 * self.rho.powi(d as i32)))
            .collect();
        let points: Vec<Point> = (0..k)
            .map(|j| {
                let x = node_x(j, k);
                let base = Point::locus(at(&u, x), at(&v, x));
                // degrees -n..-2, lowest first
                let ta: Vec<C> = tails_a.iter().rev().map(|c| at(c, x)).collect();
                let tb: Vec<C> = tails_b.iter().map(|c| at(c, x)).collect();
                Point {
                    lambda: &base.lambda + &LaurentSeries::new(-n, ta),
                    lambda_bar: &base.lambda_bar + &LaurentSeries::new(1, tb),
                }
            })
            .collect();
        LoopPoint::from_points(&points, n).expect("seeded loop nodes are valid points")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_names_round_trip() {
        for f in [
            Flow::S(1),
            Flow::SBar(3),
            Flow::T(-2),
            Flow::T(0),
            Flow::U,
            Flow::V,
        ] {
            assert_eq!(f.to_string().parse::<Flow>().unwrap(), f);
        }
        assert!("s0".parse::<Flow>().is_err());
        assert!("w".parse::<Flow>().is_err());
    }

    #[test]
    fn bracket_examples() {
        let k = 16;
        let z = LoopField::constant(&LaurentSeries::z(), k);
        let g = LoopField::constant(&LaurentSeries::new(-1, vec![ONE, C::new(2.0, 0.0), ONE]), k);
        assert!(pb(&z, &g).max_abs() < 1e-15);
        let e = LoopField::from_fn(k, |x| LaurentSeries::constant(C::from_polar(1.0, x)));
        let want = LoopField::from_fn(k, |x| {
            LaurentSeries::monomial(1, C::new(0.0, 1.0) * C::from_polar(1.0, x))
        });
        assert!(pb(&z, &e).dist(&want) < 1e-14);
    }

    #[test]
    fn dx_is_spectral() {
        let k = 32;
        let f = LoopField::from_fn(k, |x| {
            LaurentSeries::new(-1, vec![C::new((3.0 * x).sin(), 0.0), C::new(x.cos(), 0.0)])
        });
        let want = LoopField::from_fn(k, |x| {
            LaurentSeries::new(
                -1,
                vec![C::new(3.0 * (3.0 * x).cos(), 0.0), C::new(-x.sin(), 0.0)],
            )
        });
        assert!(f.dx().dist(&want) < 1e-13);
    }

    #[test]
    fn seeded_loop_is_valid() {
        let l = LoopFamily::default().sample(&mut Sampler::new(1));
        assert_eq!(l.k(), 32);
        assert!(l.points().is_ok());
        assert!(l.lambda.x_tail() < 1e-12);
    }
}
