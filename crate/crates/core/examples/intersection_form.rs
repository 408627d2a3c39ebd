//! The intersection form gamma and its inverse at a point where it is
//! invertible.

use toda_frobenius::manifold::{pair, Structure};
use toda_frobenius::sampling::Sampler;

fn main() -> toda_frobenius::Result<()> {
    let mut smp = Sampler::new(42);
    let s = Structure::new(&smp.intersection_point(24))?;
    let (o1, o2) = (smp.cotangent(8), smp.cotangent(8));
    let lhs = pair(&s.cot_mul(&o1, &o2), s.euler());
    let rhs = pair(&o1, &s.gamma_apply(&o2));
    println!("<o1 o2, E> = {lhs:.12}");
    println!("<o1, g(o2)> = {rhs:.12}");
    let x = smp.tangent(8);
    println!(
        "g(g^-1(x)) - x = {:.1e}",
        s.gamma_apply(&s.gamma_inverse(&x)?).dist(&x)
    );
    Ok(())
}
