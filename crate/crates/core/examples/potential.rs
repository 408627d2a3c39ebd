//! The potential F: value on the locus, closed-form third derivatives against
//! the trilinear form, and quasihomogeneity.

use toda_frobenius::flatcoords::{flat_frame, FlatIndex};
use toda_frobenius::laurent::C;
use toda_frobenius::manifold::{Point, Structure};
use toda_frobenius::potential::{
    potential_f, quasihomogeneity_residual, trilinear_form, triple_derivative_flat, TripleIndex,
    QH_STEP,
};
use toda_frobenius::sampling::Sampler;

fn main() -> toda_frobenius::Result<()> {
    let (u, v) = (0.3, 0.2);
    let f = potential_f(&Point::locus(C::new(u, 0.0), C::new(v, 0.0)))?;
    println!(
        "F on the locus (u, v) = ({u}, {v}): {f:.15}, u v^2/2 = {}",
        u * v * v / 2.0
    );

    let pt = Sampler::new(42).m0_point(24);
    let s = Structure::new(&pt)?;
    let (a, b, c) = (FlatIndex::T(0), FlatIndex::T(-2), FlatIndex::U);
    let closed = triple_derivative_flat(&s, TripleIndex::new(a, b, c))?;
    let form = trilinear_form(
        &s,
        &flat_frame(&s, a)?,
        &flat_frame(&s, b)?,
        &flat_frame(&s, c)?,
    )?;
    println!("d^3F/dt_0 dt_-2 du: closed form {closed:.12}, trilinear form {form:.12}");
    println!(
        "quasihomogeneity residual {:.1e}",
        quasihomogeneity_residual(&pt, QH_STEP)?.norm()
    );
    Ok(())
}
