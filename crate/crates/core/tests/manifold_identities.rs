//! Frobenius-algebra identities at seeded points, plus an independent check of
//! the one-form product against the kernel formulas for `d lambda(p)`.

use std::f64::consts::PI;

use toda_frobenius::laurent::{LaurentSeries, C, ONE};
use toda_frobenius::manifold::{pair, Cotangent, Point, Structure, Tangent};
use toda_frobenius::sampling::Sampler;

fn circle(m: usize, r: f64) -> Vec<C> {
    (0..m)
        .map(|j| C::from_polar(r, 2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// `<w1 . w2, x>` from the kernel product of `d alpha(p)`, `d beta(q)`:
/// `(1/2 pi i)^2 \oint\oint sum_{a,b} w1_a(p) w2_b(q) pq/(p-q) [a'(p) x_b(q) - b'(q) x_a(p)] dp dq`.
///
/// `d lambda(p)` is realized for `|z| < |p|` and `d lambda_bar(q)` for `|z| > |q|`,
/// so a mixed pair puts the `lambda` variable on the outer circle.
fn kernel_product_pairing(pt: &Point, o1: &Cotangent, o2: &Cotangent, x: &Tangent) -> C {
    let m = 160;
    let (outer, inner) = (1.0, 0.85);
    let lp = pt.lambda.derivative();
    let lbp = pt.lambda_bar.derivative();
    let at = |p: C| {
        (
            [o1.w1.eval(p), o1.w2.eval(p)],
            [o2.w1.eval(p), o2.w2.eval(p)],
            [lp.eval(p), lbp.eval(p)],
            [x.a.eval(p), x.ab.eval(p)],
        )
    };
    let mut acc = C::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            // index 0 is lambda, 1 is lambda_bar
            let (rp, rq) = if a == 1 && b == 0 {
                (inner, outer)
            } else {
                (outer, inner)
            };
            let ps = circle(m, rp);
            let qs = circle(m, rq);
            let pv: Vec<_> = ps.iter().map(|&p| at(p)).collect();
            let qv: Vec<_> = qs.iter().map(|&q| at(q)).collect();
            for (i, &p) in ps.iter().enumerate() {
                let (w1p, _, dp, xp) = pv[i];
                for (k, &q) in qs.iter().enumerate() {
                    let (_, w2q, dq, xq) = qv[k];
                    let kern = p * q / (p - q);
                    let s = w1p[a] * w2q[b] * kern * (dp[a] * xq[b] - dq[b] * xp[a]);
                    // dp dq / (2 pi i)^2 = p q / m^2 on the sampled circles
                    acc += s * p * q;
                }
            }
        }
    }
    acc / (m * m) as f64
}

/// `<w1, w2>_*` from `<d a(p), d b(q)>_* = pq/(p-q) (eps(a) b'(q) - eps(b) a'(p))`,
/// `eps(lambda) = 1`, `eps(lambda_bar) = -1`, with the same circle ordering.
fn kernel_metric(pt: &Point, o1: &Cotangent, o2: &Cotangent) -> C {
    let m = 160;
    let (outer, inner) = (1.0, 0.85);
    let lp = pt.lambda.derivative();
    let lbp = pt.lambda_bar.derivative();
    let eps = [1.0, -1.0];
    let mut acc = C::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            let (rp, rq) = if a == 1 && b == 0 {
                (inner, outer)
            } else {
                (outer, inner)
            };
            let ps = circle(m, rp);
            let qs = circle(m, rq);
            let w =
                |o: &Cotangent, i: usize, z: C| if i == 0 { o.w1.eval(z) } else { o.w2.eval(z) };
            let d = |i: usize, z: C| if i == 0 { lp.eval(z) } else { lbp.eval(z) };
            let pv: Vec<_> = ps.iter().map(|&p| (w(o1, a, p), d(a, p))).collect();
            let qv: Vec<_> = qs.iter().map(|&q| (w(o2, b, q), d(b, q))).collect();
            for (i, &p) in ps.iter().enumerate() {
                for (k, &q) in qs.iter().enumerate() {
                    let kern = p * q / (p - q) * (qv[k].1 * eps[a] - pv[i].1 * eps[b]);
                    acc += pv[i].0 * qv[k].0 * kern * p * q;
                }
            }
        }
    }
    acc / (m * m) as f64
}

#[test]
fn kernel_oracle_matches_invariant_metric() {
    let mut smp = Sampler::new(16);
    for _ in 0..3 {
        let pt = smp.m0_point(3);
        let s = Structure::new(&pt).unwrap();
        let o1 = smp.cotangent(3);
        let o2 = smp.cotangent(3);
        let direct = pair(&o1, &s.eta_apply(&o2));
        let k = kernel_metric(&pt, &o1, &o2);
        assert!(
            (direct - k).norm() < 1e-9 * direct.norm().max(1.0),
            "{direct} vs {k}"
        );
    }
}

#[test]
fn kernel_oracle_matches_simple_point_example() {
    let pt = Point::new(
        LaurentSeries::from_real(-1, &[-1.0, 0.0, 1.0]),
        LaurentSeries::from_real(-1, &[1.0]),
    )
    .unwrap();
    let s = Structure::new(&pt).unwrap();
    let o = Cotangent::new(LaurentSeries::monomial(-1, ONE), LaurentSeries::zero()).unwrap();
    let prod = s.cot_mul(&o, &o);
    let want = Cotangent::new(LaurentSeries::constant(ONE), LaurentSeries::zero()).unwrap();
    assert!(prod.dist(&want) < 1e-15);
    let mut smp = Sampler::new(11);
    for _ in 0..3 {
        let x = smp.tangent(3);
        let k = kernel_product_pairing(&pt, &o, &o, &x);
        assert!(
            (k - pair(&want, &x)).norm() < 1e-10,
            "{k} vs {}",
            pair(&want, &x)
        );
    }
}

#[test]
fn kernel_oracle_matches_product_at_random_points() {
    let mut smp = Sampler::new(12);
    for _ in 0..3 {
        let pt = smp.m0_point(3);
        let s = Structure::new(&pt).unwrap();
        let o1 = smp.cotangent(3);
        let o2 = smp.cotangent(3);
        let x = smp.tangent(3);
        let direct = pair(&s.cot_mul(&o1, &o2), &x);
        let k = kernel_product_pairing(&pt, &o1, &o2, &x);
        assert!(
            (direct - k).norm() < 1e-9 * direct.norm().max(1.0),
            "{direct} vs {k}"
        );
    }
}

#[test]
fn algebra_axioms() {
    let mut smp = Sampler::new(13);
    for _ in 0..5 {
        let pt = smp.m0_point(24);
        let s = Structure::new(&pt).unwrap();
        let (o1, o2, o3) = (smp.cotangent(10), smp.cotangent(10), smp.cotangent(10));
        let comm = s.cot_mul(&o1, &o2).dist(&s.cot_mul(&o2, &o1));
        let assoc = s
            .cot_mul(&s.cot_mul(&o1, &o2), &o3)
            .dist(&s.cot_mul(&o1, &s.cot_mul(&o2, &o3)));
        let unit = s.cot_mul(&s.cotangent_unit(), &o1).dist(&o1);
        assert!(comm < 1e-13, "comm {comm}");
        assert!(assoc < 1e-10, "assoc {assoc}");
        assert!(unit < 1e-12, "unit {unit}");
        let inv =
            |a: &Cotangent, b: &Cotangent, c: &Cotangent| pair(&s.cot_mul(a, b), &s.eta_apply(c));
        let base = inv(&o1, &o2, &o3);
        for v in [inv(&o2, &o3, &o1), inv(&o3, &o1, &o2), inv(&o2, &o1, &o3)] {
            assert!(
                (v - base).norm() < 1e-10,
                "invariance {}",
                (v - base).norm()
            );
        }
        let sym = pair(&o1, &s.eta_apply(&o2)) - pair(&o2, &s.eta_apply(&o1));
        assert!(sym.norm() < 1e-12);
    }
}

#[test]
fn eta_inverse_and_tangent_algebra() {
    let mut smp = Sampler::new(14);
    for _ in 0..3 {
        let pt = smp.m0_point(24);
        let s = Structure::new(&pt).unwrap();
        let (x, y, z) = (smp.tangent(10), smp.tangent(10), smp.tangent(10));
        let back = s.eta_apply(&s.eta_inverse(&x).unwrap());
        assert!(back.dist(&x) < 1e-10, "eta round trip {}", back.dist(&x));
        let e = s.eta_inverse(&Tangent::unit()).unwrap();
        assert!(e.dist(&s.cotangent_unit()) < 1e-12);
        let ex = s.tan_mul(&Tangent::unit(), &x).unwrap();
        assert!(ex.dist(&x) < 1e-10, "unit {}", ex.dist(&x));
        let xy = s.tan_mul(&x, &y).unwrap();
        assert!(xy.dist(&s.tan_mul(&y, &x).unwrap()) < 1e-10);
        let l = s.tan_mul(&xy, &z).unwrap();
        let r = s.tan_mul(&x, &s.tan_mul(&y, &z).unwrap()).unwrap();
        assert!(
            l.dist(&r) < 1e-9 * l.max_abs().max(1.0),
            "assoc {}",
            l.dist(&r)
        );
        let g = s.metric_tangent(&x, &y).unwrap();
        let via_pair = pair(&s.eta_inverse(&x).unwrap(), &y);
        assert!((g - via_pair).norm() < 1e-10, "metric {g} vs {via_pair}");
        let f1 = s.metric_tangent(&xy, &z).unwrap();
        let f2 = s.metric_tangent(&x, &s.tan_mul(&y, &z).unwrap()).unwrap();
        assert!(
            (f1 - f2).norm() < 1e-9 * f1.norm().max(1.0),
            "frobenius {f1} vs {f2}"
        );
    }
}

#[test]
fn intersection_form() {
    let mut smp = Sampler::new(15);
    for _ in 0..3 {
        let pt = smp.intersection_point(24);
        let s = Structure::new(&pt).unwrap();
        let (o1, o2) = (smp.cotangent(10), smp.cotangent(10));
        let lhs = pair(&s.cot_mul(&o1, &o2), s.euler());
        let rhs = pair(&o1, &s.gamma_apply(&o2));
        assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
        let back = s.gamma_inverse(&s.gamma_apply(&o1)).unwrap();
        assert!(back.dist(&o1) < 1e-9, "gamma inv {}", back.dist(&o1));
        let x = smp.tangent(10);
        let y = smp.tangent(10);
        let gx = s.gamma_apply(&s.gamma_inverse(&x).unwrap());
        assert!(gx.dist(&x) < 1e-9, "gamma fwd {}", gx.dist(&x));
        let q = s.intersection_metric(&x, &y).unwrap();
        let via_pair = pair(&s.gamma_inverse(&x).unwrap(), &y);
        assert!((q - via_pair).norm() < 1e-9, "{q} vs {via_pair}");
    }
}
