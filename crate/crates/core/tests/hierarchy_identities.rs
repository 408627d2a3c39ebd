//! Loop-space identities: brackets, Poisson operators, Hamiltonians, flows
//! and the integrator.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use toda_frobenius::flatcoords::{dt_cotangent, du_dv_cotangents, flat_frame, FlatIndex};
use toda_frobenius::hierarchy::*;
use toda_frobenius::laurent::{LaurentSeries, C, ONE, ZERO};
use toda_frobenius::manifold::{Cotangent, Point, Structure, Tangent};
use toda_frobenius::sampling::Sampler;

const I: C = C::new(0.0, 1.0);

fn family(nodes: usize, band: i64) -> LoopFamily {
    LoopFamily {
        nodes,
        band,
        ..LoopFamily::default()
    }
}

/// Random one-form along a loop with x-modes `|m| <= 2`.
fn random_cotangent(smp: &mut Sampler, k: usize, n: usize) -> LoopCotangent {
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

#[test]
fn loop_pairing() {
    let mut smp = Sampler::new(40);
    let (o, x) = (smp.cotangent(6), smp.tangent(6));
    let k = 16;
    let lo = LoopCotangent::from_nodes(&vec![o.clone(); k]);
    let lx = LoopTangent::from_nodes(&vec![x.clone(); k]);
    let p = toda_frobenius::manifold::pair(&o, &x);
    assert!((loop_pair(&lo, &lx).unwrap() - p).norm() < 1e-14);
    // e^{i 3x} against e^{-i 3x} averages to the nodewise product, against e^{i 3x} to zero
    let wave = |s: f64| -> Vec<C> {
        (0..k)
            .map(|j| C::from_polar(1.0, s * 3.0 * node_x(j, k)))
            .collect()
    };
    let lx_minus =
        LoopTangent::from_nodes(&wave(-1.0).iter().map(|&e| x.scale(e)).collect::<Vec<_>>());
    let lx_plus =
        LoopTangent::from_nodes(&wave(1.0).iter().map(|&e| x.scale(e)).collect::<Vec<_>>());
    let lo_wave = lo.times_scalars(&wave(1.0));
    assert!((loop_pair(&lo_wave, &lx_minus).unwrap() - p).norm() < 1e-14);
    assert!(loop_pair(&lo_wave, &lx_plus).unwrap().norm() < 1e-14);
    let short = LoopTangent::from_nodes(&vec![x; 8]);
    assert!(matches!(
        loop_pair(&lo, &short),
        Err(toda_frobenius::Error::GridMismatch(_))
    ));
}

#[test]
fn bracket_is_antisymmetric() {
    let mut smp = Sampler::new(41);
    let l = family(32, 8).sample(&mut smp);
    let (f, g) = (&l.lambda, &l.lambda_bar.powi(2));
    assert!(pb(f, g).add(&pb(g, f)).max_abs() < 1e-15);
}

#[test]
fn lax_flows_are_tangent() {
    let mut smp = Sampler::new(42);
    let l = family(32, 12).sample(&mut smp);
    for n in 1..=3 {
        for bar in [false, true] {
            let x = lax_rhs(&l, n, bar);
            assert!(
                x.a.coeff(1).iter().all(|c| c.norm() < 1e-13),
                "s{n} bar={bar}"
            );
            assert!(x.a.max_abs() > 1e-4);
        }
    }
}

#[test]
fn x_independent_loops_are_fixed_points() {
    let mut smp = Sampler::new(43);
    let l = LoopPoint::constant(&smp.m0_point(10), 16, 10);
    for f in [
        Flow::S(1),
        Flow::S(2),
        Flow::SBar(1),
        Flow::SBar(2),
        Flow::T(-2),
        Flow::T(-1),
        Flow::T(0),
        Flow::T(2),
        Flow::U,
        Flow::V,
    ] {
        assert!(flow_rhs(&l, f).unwrap().max_abs() < 1e-15, "{f}");
    }
    let (next, _) = rk4_step(&l, Flow::S(1), 0.1).unwrap();
    assert!(next.dist(&l) < 1e-15);
}

/// Two-component dispersionless Toda from `s_1` on `lambda = z + u_0 + u_{-1}/z`,
/// `lambda_bar = ub_{-1}/z + ub_0`: `d u_0 = (u_{-1})_x`, `d u_{-1} = u_{-1} (u_0)_x`.
#[test]
fn first_lax_flow_on_two_fields() {
    let k = 32;
    let u0 = |x: f64| 0.2 * x.sin() + 0.05 * (2.0 * x).cos();
    let u0x = |x: f64| 0.2 * x.cos() - 0.1 * (2.0 * x).sin();
    let um1 = |x: f64| -1.0 + 0.1 * x.cos();
    let um1x = |x: f64| -0.1 * x.sin();
    let points: Vec<Point> = (0..k)
        .map(|j| {
            let x = node_x(j, k);
            Point::new(
                LaurentSeries::from_real(-1, &[um1(x), u0(x), 1.0]),
                LaurentSeries::from_real(-1, &[0.7, 0.1]),
            )
            .unwrap()
        })
        .collect();
    let l = LoopPoint::from_points(&points, 4).unwrap();
    let x = lax_rhs(&l, 1, false);
    for j in 0..k {
        let xj = node_x(j, k);
        assert!((x.a.node(j).coeff(0) - um1x(xj)).norm() < 1e-13);
        assert!((x.a.node(j).coeff(-1) - um1(xj) * u0x(xj)).norm() < 1e-13);
    }
}

#[test]
fn poisson_operators_are_skew() {
    let mut smp = Sampler::new(44);
    for _ in 0..3 {
        let l = family(32, 12).sample(&mut smp);
        let (o1, o2) = (
            random_cotangent(&mut smp, 32, 8),
            random_cotangent(&mut smp, 32, 8),
        );
        let p1 = |o: &LoopCotangent| poisson1_apply(&l, o).unwrap();
        let p2 = |o: &LoopCotangent| poisson2_apply(&l, o).unwrap();
        for (name, p) in [
            ("P1", &p1 as &dyn Fn(&LoopCotangent) -> LoopTangent),
            ("P2", &p2),
        ] {
            let a = loop_pair(&o1, &p(&o2)).unwrap();
            let b = loop_pair(&o2, &p(&o1)).unwrap();
            assert!(a.norm() > 1e-4);
            assert!((a + b).norm() < 1e-9, "{name}: {a} + {b}");
        }
    }
}

#[test]
fn symbols_are_the_two_metrics() {
    let mut smp = Sampler::new(45);
    let k = 32;
    for kappa in [1i64, 3, -4] {
        let pt = smp.m0_point(10);
        let s = Structure::new(&pt).unwrap();
        let l = LoopPoint::constant(&pt, k, 10);
        let om = smp.cotangent(8);
        let wave: Vec<C> = (0..k)
            .map(|j| C::from_polar(1.0, kappa as f64 * node_x(j, k)))
            .collect();
        let o = LoopCotangent::from_nodes(&wave.iter().map(|&e| om.scale(e)).collect::<Vec<_>>());
        let p1 = poisson1_apply(&l, &o).unwrap();
        let p2 = poisson2_apply(&l, &o).unwrap();
        let (eta, gamma) = (s.eta_apply(&om), s.gamma_apply(&om));
        for j in 0..k {
            let f = I * kappa as f64 * wave[j];
            assert!(p1.node(j).dist(&eta.scale(f)) < 1e-9);
            assert!(p2.node(j).dist(&gamma.scale(f)) < 1e-9);
        }
    }
}

fn nodewise<T>(l: &LoopPoint, f: impl Fn(&Structure) -> T) -> Vec<T> {
    l.points()
        .unwrap()
        .iter()
        .map(|p| f(&Structure::new(p).unwrap()))
        .collect()
}

/// In flat coordinates the first operator is `eta^{ab} d/dx`: the flat
/// coordinates are Casimir densities and `P1(f dt_b) = f_x d/dt_{-1-b}`.
#[test]
fn first_operator_in_flat_coordinates() {
    let mut smp = Sampler::new(46);
    let l = family(32, 12).sample(&mut smp);
    let k = l.k();
    let f: Vec<C> = (0..k)
        .map(|j| C::new(node_x(j, k).sin() + 0.5 * (2.0 * node_x(j, k)).cos(), 0.0))
        .collect();
    let fx: Vec<C> = (0..k)
        .map(|j| C::new(node_x(j, k).cos() - (2.0 * node_x(j, k)).sin(), 0.0))
        .collect();
    let frame =
        |idx: FlatIndex| LoopTangent::from_nodes(&nodewise(&l, |s| flat_frame(s, idx).unwrap()));
    let times_fx = |x: LoopTangent| {
        LoopTangent::from_nodes(&(0..k).map(|j| x.node(j).scale(fx[j])).collect::<Vec<_>>())
    };
    let mut forms: Vec<(LoopCotangent, FlatIndex)> = (-3..=2)
        .map(|b| {
            (
                LoopCotangent::from_nodes(&nodewise(&l, |s| dt_cotangent(s, b).unwrap())),
                FlatIndex::T(-1 - b),
            )
        })
        .collect();
    forms.push((
        LoopCotangent::from_nodes(&nodewise(&l, |s| du_dv_cotangents(s).0)),
        FlatIndex::V,
    ));
    forms.push((
        LoopCotangent::from_nodes(&nodewise(&l, |s| du_dv_cotangents(s).1)),
        FlatIndex::U,
    ));
    for (form, dual) in forms {
        assert!(
            poisson1_apply(&l, &form).unwrap().restrict(12).max_abs() < 1e-12,
            "Casimir {dual:?}"
        );
        let got = poisson1_apply(&l, &form.times_scalars(&f))
            .unwrap()
            .restrict(12);
        let want = times_fx(frame(dual)).restrict(12);
        assert!(got.dist(&want) < 1e-12, "{dual:?}: {}", got.dist(&want));
    }
}

/// Values of `f(z, x)` on the grid `z = e^{i theta_a}`, `x = x_b`.
fn on_torus(f: &LoopField, m: usize) -> Vec<Vec<C>> {
    (0..m)
        .map(|a| {
            let z = C::from_polar(1.0, 2.0 * PI * a as f64 / m as f64);
            f.nodes().iter().map(|s| s.eval(z)).collect()
        })
        .collect()
}

/// Spectral derivative of periodic samples.
fn spectral_derivative(v: &[C]) -> Vec<C> {
    let n = v.len();
    let modes: Vec<C> = (0..n)
        .map(|q| {
            v.iter()
                .enumerate()
                .map(|(j, c)| c * C::from_polar(1.0, -2.0 * PI * (q * j) as f64 / n as f64))
                .sum::<C>()
                / n as f64
        })
        .collect();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|q| {
                    let m = if q < n / 2 {
                        q as f64
                    } else if q == n / 2 {
                        0.0
                    } else {
                        q as f64 - n as f64
                    };
                    modes[q] * I * m * C::from_polar(1.0, 2.0 * PI * (q * j) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

/// `w_t = w_{x1} g_{x2} - w_{x2} g_{x1}` on the torus `(theta, x)`.
fn lie_poisson_on_torus(w: &[Vec<C>], g: &[Vec<C>]) -> Vec<Vec<C>> {
    let (m, k) = (w.len(), w[0].len());
    let col = |f: &[Vec<C>], b: usize| -> Vec<C> { (0..m).map(|a| f[a][b]).collect() };
    let d_theta = |f: &[Vec<C>]| -> Vec<Vec<C>> {
        let cols: Vec<Vec<C>> = (0..k).map(|b| spectral_derivative(&col(f, b))).collect();
        (0..m)
            .map(|a| (0..k).map(|b| cols[b][a]).collect())
            .collect()
    };
    let d_x = |f: &[Vec<C>]| -> Vec<Vec<C>> { f.iter().map(|r| spectral_derivative(r)).collect() };
    let (wt, wx, gt, gx) = (d_theta(w), d_x(w), d_theta(g), d_x(g));
    (0..m)
        .map(|a| {
            (0..k)
                .map(|b| wt[a][b] * gx[a][b] - wx[a][b] * gt[a][b])
                .collect()
        })
        .collect()
}

/// For `G = int coeff_s(w^2) dx` the gradient has `c_m = 2 w_{s-m}` on `dw_m`,
/// i.e. `(z^{-1-m}, 0)` for `m <= -2`, `(0, z^{-1-m})` for `m >= 1` and both for `m = -1, 0`.
fn quadratic_functional_gradient(l: &LoopPoint, s: i64) -> LoopCotangent {
    let w = l.w();
    let nodes: Vec<Cotangent> = w
        .nodes()
        .iter()
        .map(|wj| {
            let (lo, hi) = (s - wj.hi(), s - wj.lo());
            let c = |m: i64| 2.0 * wj.coeff(s - m);
            let w1 = (lo.min(-1)..=0)
                .rev()
                .map(|m| (m, c(m)))
                .fold(LaurentSeries::zero(), |acc, (m, v)| {
                    acc + LaurentSeries::monomial(-1 - m, v)
                });
            let w2 = (-1..=hi.max(0))
                .map(|m| (m, c(m)))
                .fold(LaurentSeries::zero(), |acc, (m, v)| {
                    acc + LaurentSeries::monomial(-1 - m, v)
                });
            Cotangent { w1, w2 }
        })
        .collect();
    LoopCotangent::from_nodes(&nodes)
}

/// On functionals of `w` the first operator is the Lie-Poisson bracket of the
/// two-dimensional incompressible fluid under `z = e^{i x_1}`:
/// `w_t = i (w_{x1} g_{x2} - w_{x2} g_{x1})` with `g` the variational derivative.
#[test]
fn first_operator_on_functionals_of_w() {
    let mut smp = Sampler::new(47);
    let l = family(32, 6).sample(&mut smp);
    let m = 64;
    for s in [-1i64, 1] {
        let x = poisson1_apply(&l, &quadratic_functional_gradient(&l, s)).unwrap();
        let wt = on_torus(&x.a.add(&x.ab), m);
        // g = sum_m c_m z^{-m} = 2 z^{-s} w
        let g = on_torus(&l.w().shift(-s).scale(C::new(2.0, 0.0)), m);
        let oracle = lie_poisson_on_torus(&on_torus(&l.w(), m), &g);
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..l.k() {
                worst = worst.max((wt[a][b] + I * oracle[a][b]).norm());
            }
        }
        let size = wt.iter().flatten().fold(0.0f64, |t, c| t.max(c.norm()));
        assert!(
            size > 1e-3 && worst < 1e-11 * size.max(1.0),
            "s = {s}: {worst} (size {size})"
        );
    }
}

#[test]
fn hamiltonian_values() {
    let mut smp = Sampler::new(48);
    let l = family(16, 8).sample(&mut smp);
    let avg = |v: Vec<C>| v.iter().sum::<C>() / v.len() as f64;
    assert!((hamiltonian(&l, 0, false).unwrap() + avg(l.lambda.coeff(0))).norm() < 1e-15);
    assert!((hamiltonian(&l, 0, true).unwrap() + avg(l.lambda_bar.coeff(0))).norm() < 1e-15);
    // H_{-1} = -int (t_{-1} + v) = int u_0
    assert!((hamiltonian(&l, -1, false).unwrap() - avg(l.lambda.coeff(0))).norm() < 1e-12);
    assert!((hamiltonian(&l, -1, true).unwrap() - avg(l.lambda_bar.coeff(0))).norm() < 1e-15);
}

#[test]
fn gradients_match_finite_differences() {
    let mut smp = Sampler::new(49);
    let l = family(32, 8).sample(&mut smp);
    let k = l.k();
    for (n, bar) in [
        (-1, false),
        (-1, true),
        (0, false),
        (1, false),
        (1, true),
        (2, false),
        (2, true),
        (3, true),
    ] {
        let g = gradient(&l, n, bar);
        for (d, m, on_bar) in [
            (0i64, 1i64, false),
            (-3, 2, false),
            (-1, 0, false),
            (-1, -1, true),
            (0, 0, true),
            (2, 3, true),
        ] {
            let e = 1e-6;
            let bump = LoopField::from_fn(k, |x| {
                LaurentSeries::monomial(d, C::from_polar(1.0, m as f64 * x))
            });
            let x = if on_bar {
                LoopTangent {
                    a: LoopField::zero(k),
                    ab: bump,
                }
            } else {
                LoopTangent {
                    a: bump,
                    ab: LoopField::zero(k),
                }
            };
            let h =
                |s: f64| hamiltonian(&l.displace(&x.scale(C::new(s * e, 0.0))), n, bar).unwrap();
            let fd = (h(1.0) - h(-1.0)) / (2.0 * e);
            let exact = loop_pair(&g, &x).unwrap();
            assert!(
                (fd - exact).norm() < 1e-7,
                "H_{n} bar={bar} along ({d},{m}): {fd} vs {exact}"
            );
        }
    }
}

#[test]
fn bihamiltonian_recursion() {
    let mut smp = Sampler::new(50);
    for _ in 0..2 {
        let l = family(32, 12).sample(&mut smp);
        for n in 1..=2 {
            for bar in [false, true] {
                let r = recursion_residual(&l, n, bar).unwrap();
                assert!(r < 1e-8, "n = {n}, bar = {bar}: {r}");
                let lax = lax_rhs(&l, n as u32, bar);
                let p1 = poisson1_apply(&l, &gradient(&l, n, bar)).unwrap();
                assert!(lax.dist(&p1) < 1e-8 && lax.max_abs() > 1e-3);
            }
        }
    }
}

/// `d/ds_1 = -d/dt^{0,0} - d/dt^{u,0}` with `d/dt^{u,0} = -d/ds_bar_1`.
#[test]
fn first_lax_flow_in_primary_flows() {
    let mut smp = Sampler::new(51);
    let l = family(32, 12).sample(&mut smp);
    let f = |x| flow_rhs(&l, x).unwrap();
    let r = f(Flow::S(1)).add(&f(Flow::T(0))).add(&f(Flow::U));
    assert!(r.max_abs() < 1e-12, "{}", r.max_abs());
    assert!(f(Flow::U).add(&f(Flow::SBar(1))).max_abs() < 1e-15);
}

/// `d/dt^{alpha,0} = d/dt_alpha . d/dx`, through the tangent algebra.
#[test]
fn primary_flows_are_products_with_x_derivative() {
    let mut smp = Sampler::new(52);
    let l = family(32, 12).sample(&mut smp);
    for (flow, idx) in [
        (Flow::T(-3), FlatIndex::T(-3)),
        (Flow::T(-2), FlatIndex::T(-2)),
        (Flow::T(-1), FlatIndex::T(-1)),
        (Flow::T(0), FlatIndex::T(0)),
        (Flow::T(1), FlatIndex::T(1)),
        (Flow::T(2), FlatIndex::T(2)),
        (Flow::U, FlatIndex::U),
        (Flow::V, FlatIndex::V),
    ] {
        let a = flow_rhs(&l, flow).unwrap().restrict(12);
        let b = primary_rhs_by_product(&l, idx).unwrap().restrict(12);
        assert!(
            a.dist(&b) < 1e-12 && a.max_abs() > 1e-3,
            "{flow}: {}",
            a.dist(&b)
        );
    }
}

/// `P1(d int dF/dt_alpha dx) = d/dt^{alpha,0}` with the gradient from central
/// differences of the density.
#[test]
fn primary_hamiltonians_generate_primary_flows() {
    let mut smp = Sampler::new(53);
    let l = family(16, 8).sample(&mut smp);
    for (flow, idx) in [
        (Flow::T(-1), FlatIndex::T(-1)),
        (Flow::T(1), FlatIndex::T(1)),
        (Flow::U, FlatIndex::U),
    ] {
        let g = primary_hamiltonian_gradient(&l, idx, 16, 1e-5).unwrap();
        let got = poisson1_apply(&l, &g).unwrap().restrict(8);
        let want = flow_rhs(&l, flow).unwrap().restrict(8);
        assert!(got.dist(&want) < 1e-6, "{flow}: {}", got.dist(&want));
    }
}

#[test]
fn riemann_invariants_are_transported() {
    let mut smp = Sampler::new(54);
    let l = family(32, 12).sample(&mut smp);
    for f in [
        Flow::T(-2),
        Flow::T(-1),
        Flow::T(0),
        Flow::T(1),
        Flow::U,
        Flow::V,
        Flow::S(1),
        Flow::S(2),
        Flow::SBar(2),
    ] {
        let r = transport_residual(&l, f, 64).unwrap();
        assert!(r < 1e-6, "{f}: {r}");
    }
    // the n-independent velocity only agrees with the Lax flow for n = 1
    assert!(printed_toda_transport_residual(&l, 1, false, 64).unwrap() < 1e-12);
    assert!(printed_toda_transport_residual(&l, 2, false, 64).unwrap() > 1e-3);
}

#[test]
fn hamiltonians_are_conserved() {
    let mut smp = Sampler::new(55);
    let l = LoopFamily::default().sample(&mut smp);
    let opts = Integrator {
        h: 1e-3,
        ..Integrator::default()
    };
    for f in [Flow::S(1), Flow::SBar(1), Flow::T(0)] {
        let tr = integrate(&l, f, 0.1, &opts).unwrap();
        let (a, b) = (tr.ledger[0], *tr.ledger.last().unwrap());
        assert_eq!(tr.ledger.len(), 101);
        assert!(tr.last().dist(&l) > 1e-4, "{f} moved the loop");
        for (x, y) in [(a.h1, b.h1), (a.hbar1, b.hbar1), (a.h2, b.h2)] {
            assert!((x - y).norm() < 1e-8, "{f}: {x} -> {y}");
        }
    }
}

#[test]
fn integrator_is_fourth_order() {
    let mut smp = Sampler::new(56);
    let l = LoopFamily::default().sample(&mut smp);
    for f in [Flow::S(1), Flow::T(0)] {
        let run = |h: f64| {
            integrate(
                &l,
                f,
                0.4,
                &Integrator {
                    h,
                    tail_limit: 1.0,
                    ..Integrator::default()
                },
            )
            .unwrap()
            .last()
            .clone()
        };
        let (a, b, c) = (run(0.1), run(0.05), run(0.025));
        let ratio = a.dist(&b) / b.dist(&c);
        assert!((ratio - 16.0).abs() < 2.0, "{f}: {ratio}");
    }
}

#[test]
fn flows_commute() {
    let mut smp = Sampler::new(57);
    let l = LoopFamily::default().sample(&mut smp);
    for (a, b) in [
        (Flow::S(1), Flow::SBar(1)),
        (Flow::S(1), Flow::T(0)),
        (Flow::T(0), Flow::T(-1)),
        (Flow::T(1), Flow::U),
        (Flow::SBar(1), Flow::V),
    ] {
        let (c1, c2) = (
            commutator_norm(&l, a, b, 0.1).unwrap(),
            commutator_norm(&l, a, b, 0.05).unwrap(),
        );
        assert!(c1 / c2 > 1.6, "{a}, {b}: {c1} -> {c2}");
    }
}

#[test]
fn integration_failures() {
    let mut smp = Sampler::new(58);
    let l = LoopFamily {
        rho: 0.9,
        ..LoopFamily::default()
    }
    .sample(&mut smp);
    let r = integrate(&l, Flow::SBar(2), 0.05, &Integrator::default());
    assert!(
        matches!(r, Err(toda_frobenius::Error::TailOverflow { .. })),
        "{r:?}"
    );
    // |R(i kappa h)| ~ 400 for the classical RK4 stability polynomial at kappa h = 10
    let smooth = LoopFamily::default().sample(&mut smp);
    let r = integrate(
        &smooth,
        Flow::V,
        100.0,
        &Integrator {
            h: 5.0,
            tail_limit: f64::INFINITY,
            snapshot_every: 1,
        },
    );
    assert!(
        matches!(r, Err(toda_frobenius::Error::BlowUp { .. })),
        "{r:?}"
    );
    let _ = (ONE, ZERO, Tangent::zero());
}
