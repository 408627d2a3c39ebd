//! Identity suites behind `todafm verify`, one per acceptance criterion.
//!
//! Each suite evaluates one or more checks on seeded samples and reports the
//! largest residual against its tolerance. A check whose computation fails
//! reports an infinite residual and the error as a note.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_data, du_samples, semisimplicity_residual};
use crate::error::{Error, Result};
use crate::flatcoords::{
    flat_coords, flat_frame, point_from_flat, point_from_flat_with, FlatChart, FlatIndex,
    FlatSolver,
};
use crate::hierarchy::{
    commutator_norm, flow_rhs, gradient, integrate, loop_pair, node_x, poisson1_apply,
    poisson2_apply, primary_hamiltonian_gradient, printed_toda_transport_residual,
    recursion_residual, transport_residual, Flow, Integrator, LoopCotangent, LoopFamily, LoopPoint,
};
use crate::laurent::{
    log_on_circle_certified, reciprocal_on_circle_certified, CircleOpts, LaurentSeries, C, ONE,
    ZERO,
};
use crate::manifold::{pair, Cotangent, Point, Structure, Tangent};
use crate::potential::{
    flat_product_coefficient, quasihomogeneity_residual, reduced_triple_derivative,
    third_derivative_fd, trilinear_form, triple_derivative_flat, ThirdDifference, TripleIndex,
    QH_STEP,
};
use crate::sampling::Sampler;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub points_tested: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Suite names in criterion order.
pub const SUITES: [&str; 10] = [
    "gram",
    "frobenius",
    "potential",
    "tables",
    "intersection",
    "semisimple",
    "charts",
    "hierarchy",
    "transport",
    "kernel",
];

/// Default tolerance of every check.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("gram", 1e-9),
        ("frobenius", 1e-10),
        ("potential.trilinear", 1e-8),
        ("potential.finite_differences", 1e-5),
        ("potential.quasihomogeneity", 1e-6),
        ("tables.locus", 1e-12),
        ("tables.reduced", 1e-12),
        ("tables.projective_line", 1e-12),
        ("intersection", 1e-9),
        ("semisimple.factorization", 1e-8),
        ("semisimple.euler", 1e-10),
        ("charts.forward", 1e-9),
        ("charts.reverse", 1e-9),
        ("hierarchy.skew", 1e-9),
        ("hierarchy.symbols", 1e-9),
        ("hierarchy.recursion", 1e-8),
        ("hierarchy.conservation", 1e-8),
        ("hierarchy.commutators", 0.625),
        ("hierarchy.lax_primary", 1e-12),
        ("hierarchy.primary_hamiltonians", 1e-6),
        ("transport.primary", 1e-6),
        ("transport.toda", 1e-6),
        ("kernel.rk4_order", 2.0),
        ("kernel.adjoint", 1e-12),
        ("kernel.certification", 1e-11),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Sizes and tolerances shared by the suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Band `N` of seeded points.
    pub band: usize,
    /// Largest `|n|` of flat coordinates in chart round trips.
    pub n_max: i64,
    /// Collocation nodes `K` of seeded loops.
    pub nodes: usize,
    /// Band of seeded loops.
    pub loop_band: i64,
    /// Tolerance per check name; a suite name applies to all its checks.
    pub tolerances: BTreeMap<String, f64>,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            seed,
            band: 24,
            n_max: 8,
            nodes: 32,
            loop_band: 16,
            tolerances: default_tolerances(),
        }
    }

    /// Tolerance of `check`: an exact entry, else its suite's entry.
    pub fn tolerance(&self, check: &str) -> f64 {
        if let Some(t) = self.tolerances.get(check) {
            return *t;
        }
        let suite = check.split('.').next().unwrap_or(check);
        self.tolerances
            .get(suite)
            .copied()
            .unwrap_or_else(|| default_tolerances()[check])
    }

    /// Sets the tolerance of a check or of every check of a suite.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(Error::Config(format!(
                "tolerance for '{name}' must be nonnegative, got {value}"
            )));
        }
        let defaults = default_tolerances();
        let matching: Vec<String> = defaults
            .keys()
            .filter(|k| *k == name || k.split('.').next() == Some(name))
            .cloned()
            .collect();
        if matching.is_empty() {
            return Err(Error::Config(format!("unknown check or suite '{name}'")));
        }
        for k in matching {
            self.tolerances.insert(k, value);
        }
        Ok(())
    }

    fn loop_family(&self) -> LoopFamily {
        LoopFamily {
            nodes: self.nodes,
            band: self.loop_band,
            ..LoopFamily::default()
        }
    }
}

/// Checks an unknown suite name.
pub fn check_suite_name(name: &str) -> Result<()> {
    if SUITES.contains(&name) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unknown suite '{name}', expected one of {}",
            SUITES.join(", ")
        )))
    }
}

/// Runs one suite.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    check_suite_name(name)?;
    // one sampler stream per suite
    let index = SUITES.iter().position(|s| *s == name).unwrap() as u64;
    let mut smp = Sampler::new(
        cfg.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index),
    );
    let mut out = Reports {
        cfg,
        list: Vec::new(),
    };
    match name {
        "gram" => gram(cfg, &mut smp, &mut out),
        "frobenius" => frobenius(cfg, &mut smp, &mut out),
        "potential" => potential(cfg, &mut smp, &mut out),
        "tables" => tables(&mut out),
        "intersection" => intersection(cfg, &mut smp, &mut out),
        "semisimple" => semisimple(cfg, &mut smp, &mut out),
        "charts" => charts(cfg, &mut smp, &mut out),
        "hierarchy" => hierarchy(cfg, &mut smp, &mut out),
        "transport" => transport(cfg, &mut smp, &mut out),
        _ => kernel(cfg, &mut smp, &mut out),
    }
    Ok(out.list)
}

/// Runs the named suites in order.
pub fn run_suites(names: &[String], cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    for n in names {
        check_suite_name(n)?;
    }
    let mut all = Vec::new();
    for n in names {
        all.extend(run_suite(n, cfg)?);
    }
    Ok(all)
}

struct Reports<'a> {
    cfg: &'a VerifyConfig,
    list: Vec<SuiteReport>,
}

impl Reports<'_> {
    /// Records `(points, residual)` or the error of a check.
    fn record(&mut self, name: &str, outcome: Result<(usize, f64)>, note: Option<String>) {
        let tolerance = self.cfg.tolerance(name);
        let (points_tested, max_residual, note) = match outcome {
            Ok((p, r)) => (p, r, note),
            Err(e) => (0, f64::INFINITY, Some(format!("error: {e}"))),
        };
        self.list.push(SuiteReport {
            name: name.to_string(),
            points_tested,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            note,
        });
    }
}

fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn flat_indices(k: i64) -> Vec<FlatIndex> {
    let mut v: Vec<FlatIndex> = (-k..=k).map(FlatIndex::T).collect();
    v.extend([FlatIndex::U, FlatIndex::V]);
    v
}

/// The constant Gram matrix: `<d/dt_k, d/dt_l> = delta_{k+l,-1}`, `<d/du, d/dv> = 1`.
pub fn gram_entry(a: FlatIndex, b: FlatIndex) -> C {
    match (a, b) {
        (FlatIndex::T(k), FlatIndex::T(l)) if k + l == -1 => ONE,
        (FlatIndex::U, FlatIndex::V) | (FlatIndex::V, FlatIndex::U) => ONE,
        _ => ZERO,
    }
}

/// Metric of the flat frames `d/dt_k` (`|k| <= kmax`), `d/du`, `d/dv`.
pub fn gram_matrix(s: &Structure, kmax: i64) -> Result<(Vec<FlatIndex>, Vec<Vec<C>>)> {
    let idx = flat_indices(kmax);
    let frames: Vec<Tangent> = idx
        .iter()
        .map(|&i| flat_frame(s, i))
        .collect::<Result<_>>()?;
    let mut m = Vec::with_capacity(idx.len());
    for a in &frames {
        m.push(
            frames
                .iter()
                .map(|b| s.metric_tangent(a, b))
                .collect::<Result<Vec<C>>>()?,
        );
    }
    Ok((idx, m))
}

fn gram(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let r = (|| {
        let mut r = 0.0f64;
        for _ in 0..20 {
            let s = Structure::new(&smp.m0_point(cfg.band))?;
            let (idx, m) = gram_matrix(&s, 6)?;
            for (i, a) in idx.iter().enumerate() {
                for (j, b) in idx.iter().enumerate() {
                    r = worst(r, (m[i][j] - gram_entry(*a, *b)).norm());
                }
            }
        }
        Ok((20, r))
    })();
    out.record("gram", r, None);
}

fn frobenius(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let r = (|| {
        let mut r = 0.0f64;
        let mut s = Structure::new(&smp.m0_point(cfg.band))?;
        for i in 0..50 {
            if i % 5 == 0 {
                s = Structure::new(&smp.m0_point(cfg.band))?;
            }
            let (o1, o2, o3) = (smp.cotangent(10), smp.cotangent(10), smp.cotangent(10));
            r = worst(r, s.cot_mul(&o1, &o2).dist(&s.cot_mul(&o2, &o1)));
            r = worst(
                r,
                s.cot_mul(&s.cot_mul(&o1, &o2), &o3)
                    .dist(&s.cot_mul(&o1, &s.cot_mul(&o2, &o3))),
            );
            r = worst(r, s.cot_mul(&s.cotangent_unit(), &o1).dist(&o1));
            let inv = |a: &Cotangent, b: &Cotangent, c: &Cotangent| {
                pair(&s.cot_mul(a, b), &s.eta_apply(c))
            };
            r = worst(r, (inv(&o1, &o2, &o3) - inv(&o1, &o3, &o2)).norm());
            r = worst(r, (inv(&o1, &o2, &o3) - inv(&o2, &o3, &o1)).norm());
            r = worst(
                r,
                s.eta_inverse(&Tangent::unit())?.dist(&s.cotangent_unit()),
            );
        }
        Ok((50, r))
    })();
    out.record("frobenius", r, None);
}

fn small_chart(smp: &mut Sampler, n: i64, amp: f64, rho: f64) -> FlatChart {
    let t = (-n..=n)
        .map(|k| (k, smp.small(amp * rho.powi(k.abs() as i32))))
        .collect();
    FlatChart {
        t,
        u: C::new(smp.uniform(-0.3, 0.3), 0.0),
        v: C::new(smp.uniform(-0.3, 0.3), 0.0),
    }
}

fn potential(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let r = (|| {
        let mut r = 0.0f64;
        let idx = flat_indices(3);
        for _ in 0..2 {
            let s = Structure::new(&smp.m0_point(cfg.band))?;
            let frames: Vec<Tangent> = idx
                .iter()
                .map(|&i| flat_frame(&s, i))
                .collect::<Result<_>>()?;
            for a in 0..idx.len() {
                for b in a..idx.len() {
                    for c in b..idx.len() {
                        let closed =
                            triple_derivative_flat(&s, TripleIndex::new(idx[a], idx[b], idx[c]))?;
                        let form = trilinear_form(&s, &frames[a], &frames[b], &frames[c])?;
                        r = worst(r, (closed - form).norm());
                    }
                }
            }
        }
        Ok((2, r))
    })();
    out.record("potential.trilinear", r, None);

    let r = (|| {
        let chart = small_chart(smp, 4, 0.04, 0.6);
        let s = Structure::new(&point_from_flat(&chart, 80)?)?;
        let (t, u, v) = (FlatIndex::T, FlatIndex::U, FlatIndex::V);
        let mut r = 0.0f64;
        let triples = [
            TripleIndex::new(t(0), t(0), t(-2)),
            TripleIndex::new(t(1), t(-1), t(-2)),
            TripleIndex::new(t(0), t(-1), u),
            TripleIndex::new(t(-1), u, u),
            TripleIndex::new(u, u, u),
            TripleIndex::new(u, v, v),
        ];
        for idx in triples {
            let fd = third_derivative_fd(&chart, idx, &ThirdDifference::default())?;
            let closed = triple_derivative_flat(&s, idx)?;
            r = worst(r, (fd - closed).norm() / closed.norm().max(1.0));
        }
        Ok((triples.len(), r))
    })();
    out.record("potential.finite_differences", r, None);

    let r = (|| {
        let mut r = 0.0f64;
        for _ in 0..3 {
            r = worst(
                r,
                quasihomogeneity_residual(&smp.m0_point(cfg.band), QH_STEP)?.norm(),
            );
        }
        Ok((3, r))
    })();
    out.record("potential.quasihomogeneity", r, None);
}

fn theta(n: i64) -> f64 {
    if n >= 0 {
        1.0
    } else {
        -1.0
    }
}

fn tables(out: &mut Reports) {
    let t = FlatIndex::T;
    let r = (|| {
        let mut r = 0.0f64;
        let mut count = 0;
        for (u, v) in [(0.0, 0.0), (0.3, -0.2)] {
            let s = Structure::new(&Point::locus(C::new(u, 0.0), C::new(v, 0.0)))?;
            let eu = C::new(u, 0.0).exp();
            let mut targets: Vec<FlatIndex> = (-14..=14).map(t).collect();
            targets.extend([FlatIndex::U, FlatIndex::V]);
            let mut compare = |a: FlatIndex, b: FlatIndex, want: &[(FlatIndex, C)]| -> Result<()> {
                for &target in &targets {
                    let got = flat_product_coefficient(&s, a, b, target)?;
                    let w: C = want
                        .iter()
                        .filter(|(i, _)| *i == target)
                        .map(|(_, c)| *c)
                        .sum();
                    r = worst(r, (got - w).norm());
                }
                count += 1;
                Ok(())
            };
            // X_n = -d/dt_n
            for i in -5..=5i64 {
                for j in -5..=5i64 {
                    let half = 0.5 * (theta(i) + theta(j) + theta(-i - j - 2) + 1.0);
                    let mut want = vec![(t(i + j + 1), C::new(-half, 0.0)), (t(i + j - 1), -eu)];
                    if i + j == -1 {
                        want.push((FlatIndex::U, ONE));
                    }
                    if i + j == 0 {
                        want.push((FlatIndex::V, eu));
                    }
                    compare(t(i), t(j), &want)?;
                }
                let mut want = vec![(t(i - 1), eu)];
                if i == 0 {
                    want.push((FlatIndex::V, -eu));
                }
                compare(FlatIndex::U, t(i), &want)?;
            }
            compare(FlatIndex::U, FlatIndex::U, &[(t(-1), -eu)])?;
        }
        Ok((count, r))
    })();
    out.record("tables.locus", r, None);

    let r = (|| {
        let s = Structure::new(&Point::locus(ZERO, ZERO))?;
        let mut r = 0.0f64;
        for i in -5..=5i64 {
            for j in -5..=5i64 {
                let half = 0.5 * (theta(i) + theta(j) + theta(-i - j - 2) + 1.0);
                for n in -14..=14i64 {
                    let c = -reduced_triple_derivative(&s, i, j, -1 - n)?;
                    let want = if n == i + j + 1 { half } else { 0.0 };
                    r = worst(r, (c - want).norm());
                }
            }
        }
        Ok((121, r))
    })();
    out.record("tables.reduced", r, None);

    let r = (|| {
        let mut r = 0.0f64;
        let (u_, v_) = (FlatIndex::U, FlatIndex::V);
        for (u, v) in [(-1.2, 0.1), (-0.4, -0.2), (0.3, 0.2)] {
            let (eu, vc) = (C::new(u, 0.0).exp(), C::new(v, 0.0));
            let l = LaurentSeries::new(-1, vec![eu, vc, ONE]);
            let s = Structure::new(&Point::new(l.clone(), l)?)?;
            let c = |a, b, d| triple_derivative_flat(&s, TripleIndex::new(a, b, d));
            let p = |a, b, d| flat_product_coefficient(&s, a, b, d);
            // F = u v^2/2 + e^u: u.u = e^u v, u.v = u, v.v = v
            for (got, want) in [
                (c(u_, u_, u_)?, eu),
                (c(u_, v_, v_)?, ONE),
                (c(u_, u_, v_)?, ZERO),
                (c(v_, v_, v_)?, ZERO),
                (p(u_, u_, v_)?, eu),
                (p(u_, u_, u_)?, ZERO),
                (p(u_, v_, u_)?, ONE),
                (p(u_, v_, v_)?, ZERO),
                (p(v_, v_, v_)?, ONE),
                (p(v_, v_, u_)?, ZERO),
            ] {
                r = worst(r, (got - want).norm());
            }
        }
        Ok((3, r))
    })();
    out.record("tables.projective_line", r, None);
}

fn intersection(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let r = (|| {
        let mut r = 0.0f64;
        let mut s = Structure::new(&smp.intersection_point(cfg.band))?;
        for i in 0..30 {
            if i % 5 == 0 {
                s = Structure::new(&smp.intersection_point(cfg.band))?;
            }
            let (o1, o2) = (smp.cotangent(10), smp.cotangent(10));
            let lhs = pair(&s.cot_mul(&o1, &o2), s.euler());
            r = worst(r, (lhs - pair(&o1, &s.gamma_apply(&o2))).norm());
            r = worst(r, s.gamma_inverse(&s.gamma_apply(&o1))?.dist(&o1));
            let x = smp.tangent(10);
            r = worst(r, s.gamma_apply(&s.gamma_inverse(&x)?).dist(&x));
        }
        Ok((30, r))
    })();
    out.record("intersection", r, None);
}

fn semisimple(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let m = 256;
    let mut points = Vec::new();
    for _ in 0..5 {
        points.push(smp.semisimple_point(cfg.band));
    }
    let r = (|| {
        let mut r = 0.0f64;
        for pt in &points {
            let s = Structure::new(pt)?;
            for _ in 0..2 {
                let (x, y) = (smp.tangent(10), smp.tangent(10));
                r = worst(r, semisimplicity_residual(&s, &x, &y, m)?);
            }
        }
        Ok((points.len() * 2, r))
    })();
    out.record("semisimple.factorization", r, None);
    let r = (|| {
        let mut r = 0.0f64;
        for pt in &points {
            let s = Structure::new(pt)?;
            let data = canonical_data(pt, m)?;
            let du = du_samples(pt, s.euler(), m)?;
            for j in 0..m {
                r = worst(r, (du[j] - data.u_sigma[j]).norm());
            }
        }
        Ok((points.len(), r))
    })();
    out.record("semisimple.euler", r, None);
}

fn charts(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let r = (|| {
        let mut r = 0.0f64;
        for _ in 0..3 {
            let c = small_chart(smp, cfg.n_max, 0.05, 0.7);
            let back = flat_coords(&point_from_flat(&c, 120)?, cfg.n_max)?;
            r = worst(r, back.dist(&c));
        }
        Ok((3, r))
    })();
    out.record("charts.forward", r, None);
    let r = (|| {
        let mut r = 0.0f64;
        // a chart cut at |n| <= 80 has a tail of order |t_{-80}| past the band
        let solver = FlatSolver {
            tail_tol: 1e-6,
            ..FlatSolver::default()
        };
        for _ in 0..3 {
            let pt = smp.m0_point(12);
            let back = point_from_flat_with(&flat_coords(&pt, 80)?, 12, &solver)?;
            r = worst(
                r,
                back.lambda
                    .dist(&pt.lambda)
                    .max(back.lambda_bar.dist(&pt.lambda_bar)),
            );
        }
        Ok((3, r))
    })();
    out.record("charts.reverse", r, None);
}

/// Random one-form along a loop of `k` nodes with x-modes `|m| <= 2`.
pub fn random_loop_cotangent(smp: &mut Sampler, k: usize, n: usize) -> LoopCotangent {
    let (a, b, c) = (smp.cotangent(n), smp.cotangent(n), smp.cotangent(n));
    let nodes: Vec<Cotangent> = (0..k)
        .map(|j| {
            let x = node_x(j, k);
            a.add(&b.scale(C::new(0.3 * x.cos(), 0.0)))
                .add(&c.scale(C::new(0.2 * (2.0 * x).sin(), 0.0)))
        })
        .collect();
    LoopCotangent::from_nodes(&nodes)
}

/// `|P_i(o)/(i kappa e^{i kappa x}) - eta(o_hat)|`, `|... - gamma(o_hat)|` for `o = o_hat e^{i kappa x}`.
pub fn symbol_residuals(
    pt: &Point,
    band: i64,
    o_hat: &Cotangent,
    kappa: i64,
    k: usize,
) -> Result<(f64, f64)> {
    let s = Structure::new(pt)?;
    let l = LoopPoint::constant(pt, k, band);
    let wave: Vec<C> = (0..k)
        .map(|j| C::from_polar(1.0, kappa as f64 * node_x(j, k)))
        .collect();
    let o = LoopCotangent::from_nodes(&wave.iter().map(|&e| o_hat.scale(e)).collect::<Vec<_>>());
    let (p1, p2) = (poisson1_apply(&l, &o)?, poisson2_apply(&l, &o)?);
    let (eta, gamma) = (s.eta_apply(o_hat), s.gamma_apply(o_hat));
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for (j, e) in wave.iter().enumerate() {
        let f = C::new(0.0, kappa as f64) * e;
        r1 = worst(r1, p1.node(j).dist(&eta.scale(f)));
        r2 = worst(r2, p2.node(j).dist(&gamma.scale(f)));
    }
    Ok((r1, r2))
}

/// Pairs of flows used by the commutator check.
pub const COMMUTING_PAIRS: [(Flow, Flow); 5] = [
    (Flow::S(1), Flow::SBar(1)),
    (Flow::S(1), Flow::T(0)),
    (Flow::T(0), Flow::T(-1)),
    (Flow::T(1), Flow::U),
    (Flow::SBar(1), Flow::V),
];

fn hierarchy(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let fam = cfg.loop_family();
    let loops: Vec<LoopPoint> = (0..2).map(|_| fam.sample(smp)).collect();

    let r = (|| {
        let mut r = 0.0f64;
        for l in &loops {
            let (o1, o2) = (
                random_loop_cotangent(smp, l.k(), 8),
                random_loop_cotangent(smp, l.k(), 8),
            );
            for second in [false, true] {
                let ap = |o: &LoopCotangent| {
                    if second {
                        poisson2_apply(l, o)
                    } else {
                        poisson1_apply(l, o)
                    }
                };
                r = worst(
                    r,
                    (loop_pair(&o1, &ap(&o2)?)? + loop_pair(&o2, &ap(&o1)?)?).norm(),
                );
            }
        }
        Ok((loops.len(), r))
    })();
    out.record("hierarchy.skew", r, None);

    let r = (|| {
        let mut r = 0.0f64;
        for kappa in [1, 3, -4] {
            let (r1, r2) =
                symbol_residuals(&smp.m0_point(10), 10, &smp.cotangent(8), kappa, cfg.nodes)?;
            r = worst(r, worst(r1, r2));
        }
        Ok((3, r))
    })();
    out.record("hierarchy.symbols", r, None);

    let r = (|| {
        let mut r = 0.0f64;
        for l in &loops {
            for n in 1..=2 {
                for bar in [false, true] {
                    r = worst(r, recursion_residual(l, n, bar)?);
                    let lax = flow_rhs(
                        l,
                        if bar {
                            Flow::SBar(n as u32)
                        } else {
                            Flow::S(n as u32)
                        },
                    )?;
                    r = worst(r, lax.dist(&poisson1_apply(l, &gradient(l, n, bar))?));
                }
            }
        }
        Ok((loops.len(), r))
    })();
    out.record("hierarchy.recursion", r, None);

    let r = (|| {
        let mut r = 0.0f64;
        let l = &loops[0];
        let flows = [Flow::S(1), Flow::SBar(1), Flow::T(0)];
        for f in flows {
            let tr = integrate(
                l,
                f,
                0.1,
                &Integrator {
                    h: 1e-3,
                    ..Integrator::default()
                },
            )?;
            let (a, b) = (tr.ledger[0], tr.ledger[tr.ledger.len() - 1]);
            for d in [b.h1 - a.h1, b.hbar1 - a.hbar1, b.h2 - a.h2] {
                r = worst(r, d.norm());
            }
        }
        Ok((flows.len(), r))
    })();
    out.record("hierarchy.conservation", r, None);

    // residual: largest C(h/2)/C(h) over the pairs; O(h) or better means <= 1/2 asymptotically
    let r = (|| {
        let mut r = 0.0f64;
        for (a, b) in COMMUTING_PAIRS {
            let c1 = commutator_norm(&loops[0], a, b, 0.1)?;
            let c2 = commutator_norm(&loops[0], a, b, 0.05)?;
            r = worst(r, c2 / c1);
        }
        Ok((COMMUTING_PAIRS.len(), r))
    })();
    out.record("hierarchy.commutators", r, None);

    let mut note = None;
    let r = (|| {
        let mut r = 0.0f64;
        let mut printed = 0.0f64;
        for l in &loops {
            let f = |x| flow_rhs(l, x);
            let (s1, t0, u) = (f(Flow::S(1))?, f(Flow::T(0))?, f(Flow::U)?);
            r = worst(r, s1.add(&t0).add(&u).max_abs());
            printed = printed.max(s1.add(&t0).sub(&u).max_abs());
        }
        note = Some(format!(
            "d/ds_1 = -d/dt^(0,0) - d/dt^(u,0) holds; with +d/dt^(u,0) the residual is {printed:.3e}"
        ));
        Ok((loops.len(), r))
    })();
    out.record("hierarchy.lax_primary", r, note);

    let r = (|| {
        let l = LoopFamily {
            nodes: 16,
            band: 8,
            ..LoopFamily::default()
        }
        .sample(smp);
        let mut r = 0.0f64;
        let cases: Vec<(Flow, FlatIndex)> =
            (-2..=2).map(|a| (Flow::T(a), FlatIndex::T(a))).collect();
        for (flow, idx) in &cases {
            let g = primary_hamiltonian_gradient(&l, *idx, 2 * l.band, 1e-5)?;
            let got = poisson1_apply(&l, &g)?.restrict(l.band);
            r = worst(r, got.dist(&flow_rhs(&l, *flow)?.restrict(l.band)));
        }
        Ok((cases.len(), r))
    })();
    out.record("hierarchy.primary_hamiltonians", r, None);
}

fn transport(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let fam = cfg.loop_family();
    let loops: Vec<LoopPoint> = (0..2).map(|_| fam.sample(smp)).collect();
    let m = 64;
    let r = (|| {
        let mut r = 0.0f64;
        for l in &loops {
            for f in [Flow::T(0), Flow::U] {
                r = worst(r, transport_residual(l, f, m)?);
            }
        }
        Ok((loops.len() * 2, r))
    })();
    out.record("transport.primary", r, None);
    let mut note = None;
    let r = (|| {
        let (mut r, mut printed) = (0.0f64, 0.0f64);
        for l in &loops {
            for n in 1..=2 {
                for bar in [false, true] {
                    r = worst(
                        r,
                        transport_residual(l, if bar { Flow::SBar(n) } else { Flow::S(n) }, m)?,
                    );
                    printed = printed.max(printed_toda_transport_residual(l, n, bar, m)?);
                }
            }
        }
        note = Some(format!(
            "n-independent printed velocity: residual {printed:.3e} over n = 1, 2"
        ));
        Ok((loops.len() * 4, r))
    })();
    out.record("transport.toda", r, note);
}

/// `|res(f (g)_{>=k}) - res((f)_{<=-k-1} g)|`.
pub fn adjoint_residual(f: &LaurentSeries, g: &LaurentSeries, k: i64) -> f64 {
    ((f * &g.geq(k)).residue() - (&f.leq(-k - 1) * g).residue()).norm()
}

fn random_series(smp: &mut Sampler, lo: i64, hi: i64) -> LaurentSeries {
    LaurentSeries::new(lo, (lo..=hi).map(|_| smp.gaussian()).collect())
}

fn kernel(cfg: &VerifyConfig, smp: &mut Sampler, out: &mut Reports) {
    let r = (|| {
        let l = cfg.loop_family().sample(smp);
        let mut r = 0.0f64;
        for f in [Flow::S(1), Flow::T(0)] {
            let run = |h: f64| -> Result<LoopPoint> {
                Ok(integrate(
                    &l,
                    f,
                    0.4,
                    &Integrator {
                        h,
                        tail_limit: 1.0,
                        ..Integrator::default()
                    },
                )?
                .last()
                .clone())
            };
            let (a, b, c) = (run(0.1)?, run(0.05)?, run(0.025)?);
            r = worst(r, (a.dist(&b) / b.dist(&c) - 16.0).abs());
        }
        Ok((2, r))
    })();
    out.record("kernel.rk4_order", r, None);

    let mut r = 0.0f64;
    let mut count = 0;
    for _ in 0..20 {
        let (f, g) = (random_series(smp, -8, 8), random_series(smp, -8, 8));
        for k in -5..=5 {
            r = worst(r, adjoint_residual(&f, &g, k));
            count += 1;
        }
    }
    out.record("kernel.adjoint", Ok((count, r)), None);

    let r = (|| {
        let mut r = 0.0f64;
        let opts = CircleOpts::default();
        for _ in 0..5 {
            let pt = smp.m0_point(cfg.band);
            let f = pt.w().shift(-1);
            r = worst(
                r,
                reciprocal_on_circle_certified(&f, -200, 200, opts)?.residual,
            );
            r = worst(r, log_on_circle_certified(&f, -200, 200, opts)?.residual);
        }
        Ok((5, r))
    })();
    out.record("kernel.certification", r, None);
}
