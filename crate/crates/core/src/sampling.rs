//! Seeded generators for test points, vectors and one-forms.
//!
//! Every family is a perturbation of the two-dimensional locus
//! `lambda = z - v - e^u/z`, `lambda_bar = v + e^u/z` by geometrically decaying
//! random tails, so `w' ~ 1` and the point sits well inside the admissible set.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::laurent::{LaurentSeries, C};
use crate::manifold::{check_membership, Cotangent, Point, Tangent};

/// Tail amplitude and decay of random point perturbations.
pub const TAIL_AMP: f64 = 0.05;
pub const TAIL_RHO: f64 = 0.7;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        self.rng.gen_range(a..b)
    }

    /// Standard normal by Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn phase(&mut self) -> C {
        C::from_polar(1.0, 2.0 * PI * self.rng.gen::<f64>())
    }

    /// Complex Gaussian with unit variance per component.
    pub fn gaussian(&mut self) -> C {
        C::new(self.normal(), self.normal())
    }

    fn tail(&mut self, degrees: impl Iterator<Item = i64>, amp: f64, rho: f64) -> Vec<(i64, C)> {
        degrees
            .map(|d| {
                let r = amp * rho.powi(d.abs() as i32) * self.uniform(0.0, 1.0);
                (d, self.phase() * r)
            })
            .collect()
    }

    /// Locus point at `(u, v)` plus random tails in degrees `-n..-2` and `1..n`.
    pub fn point_at(&mut self, n: usize, u: C, v: C) -> Point {
        let base = Point::locus(u, v);
        let n = n as i64;
        let lt = self.tail(-n..=-2, TAIL_AMP, TAIL_RHO);
        let bt = self.tail(1..=n, TAIL_AMP, TAIL_RHO);
        let add = |s: &LaurentSeries, t: &[(i64, C)]| {
            t.iter().fold(s.clone(), |acc, (d, c)| {
                &acc + &LaurentSeries::monomial(*d, *c)
            })
        };
        Point {
            lambda: add(&base.lambda, &lt),
            lambda_bar: add(&base.lambda_bar, &bt),
        }
    }

    /// Generic point of the family: `u` uniform in `[-0.5, 0.5]`, complex `v`.
    pub fn m0_point(&mut self, n: usize) -> Point {
        loop {
            let u = C::new(self.uniform(-0.5, 0.5), 0.0);
            let v = C::new(self.uniform(-0.5, 0.5), 0.1 * self.uniform(-1.0, 1.0));
            let p = self.point_at(n, u, v);
            let r = check_membership(&p);
            if r.in_m0 && r.w_prime > 0.3 {
                return p;
            }
        }
    }

    /// Point where the intersection form is nondegenerate with a safety margin:
    /// `e^u` in `[0.4, 0.6]`, `|v| <= 0.2`.
    pub fn intersection_point(&mut self, n: usize) -> Point {
        loop {
            let u = C::new(self.uniform(0.4, 0.6).ln(), 0.0);
            let v = C::new(self.uniform(-0.2, 0.2), 0.05 * self.uniform(-1.0, 1.0));
            let p = self.point_at(n, u, v);
            let r = check_membership(&p);
            if r.intersection_valid
                && r.lambda_prime > 0.2
                && r.lambda_bar_prime > 0.2
                && r.wronskian > 0.2
            {
                return p;
            }
        }
    }

    /// Point with a smooth, simple spectral curve: small `e^u` and a dominant
    /// `z^2` term in `lambda_bar` make the curve wind once.
    pub fn semisimple_point(&mut self, n: usize) -> Point {
        loop {
            let u = C::new(self.uniform(0.05, 0.15).ln(), 0.0);
            let v = C::new(self.uniform(-0.2, 0.2), 0.0);
            let mut p = self.point_at(n, u, v);
            let lead = self.phase() * 0.25;
            p.lambda_bar = &p.lambda_bar + &LaurentSeries::monomial(2, lead);
            let r = check_membership(&p);
            if !(r.semisimple_valid && r.semisimple > 1e-3) {
                continue;
            }
            let sigma = crate::canonical::sigma_samples(&p, 256);
            if crate::manifold::chord_arc_ratio(&sigma) > 0.02 {
                return p;
            }
        }
    }

    /// Random vector with coefficients `~ 0.7^|d|`, degrees `-n..0` and `-1..n`.
    pub fn tangent(&mut self, n: usize) -> Tangent {
        let n = n as i64;
        let a = (-n..=0)
            .map(|d| self.gaussian() * TAIL_RHO.powi(d.abs() as i32))
            .collect();
        let ab = (-1..=n)
            .map(|d| self.gaussian() * TAIL_RHO.powi(d.abs() as i32))
            .collect();
        Tangent {
            a: LaurentSeries::new(-n, a),
            ab: LaurentSeries::new(-1, ab),
        }
    }

    /// Random one-form with coefficients `~ 0.7^|d|`, degrees `-1..n` and `-n..0`.
    pub fn cotangent(&mut self, n: usize) -> Cotangent {
        let n = n as i64;
        let w1 = (-1..=n)
            .map(|d| self.gaussian() * TAIL_RHO.powi(d.abs() as i32))
            .collect();
        let w2 = (-n..=0)
            .map(|d| self.gaussian() * TAIL_RHO.powi(d.abs() as i32))
            .collect();
        Cotangent {
            w1: LaurentSeries::new(-1, w1),
            w2: LaurentSeries::new(-n, w2),
        }
    }

    /// Random complex number of modulus at most `r`.
    pub fn small(&mut self, r: f64) -> C {
        self.phase() * (r * self.uniform(0.0, 1.0))
    }
}
