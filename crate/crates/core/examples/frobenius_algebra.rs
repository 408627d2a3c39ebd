//! The Frobenius algebra on cotangent vectors at a seeded point: product,
//! unit, invariant metric and its inverse.

use toda_frobenius::manifold::{pair, Structure, Tangent};
use toda_frobenius::sampling::Sampler;

fn main() -> toda_frobenius::Result<()> {
    let mut smp = Sampler::new(42);
    let pt = smp.m0_point(24);
    let s = Structure::new(&pt)?;
    let (o1, o2, o3) = (smp.cotangent(8), smp.cotangent(8), smp.cotangent(8));

    let comm = s.cot_mul(&o1, &o2).dist(&s.cot_mul(&o2, &o1));
    let assoc = s
        .cot_mul(&s.cot_mul(&o1, &o2), &o3)
        .dist(&s.cot_mul(&o1, &s.cot_mul(&o2, &o3)));
    let unit = s.cot_mul(&s.cotangent_unit(), &o1).dist(&o1);
    let invariance = pair(&s.cot_mul(&o1, &o2), &s.eta_apply(&o3))
        - pair(&o1, &s.eta_apply(&s.cot_mul(&o2, &o3)));
    println!("commutativity {comm:.1e}, associativity {assoc:.1e}, unit {unit:.1e}");
    println!("invariance of the metric {:.1e}", invariance.norm());

    let x = smp.tangent(8);
    let back = s.eta_apply(&s.eta_inverse(&x)?);
    println!("eta(eta^-1(x)) - x = {:.1e}", back.dist(&x));
    println!(
        "eta^-1(e) - e*     = {:.1e}",
        s.eta_inverse(&Tangent::unit())?.dist(&s.cotangent_unit())
    );
    Ok(())
}
