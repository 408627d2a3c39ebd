//! Canonical coordinates u_sigma on the circle and the factorization of the
//! product they diagonalize.

use toda_frobenius::canonical::{canonical_data, du_samples, semisimplicity_residual};
use toda_frobenius::manifold::Structure;
use toda_frobenius::sampling::Sampler;

fn main() -> toda_frobenius::Result<()> {
    let mut smp = Sampler::new(42);
    let pt = smp.semisimple_point(24);
    let s = Structure::new(&pt)?;
    let m = 16;
    let data = canonical_data(&pt, m)?;
    for j in (0..m).step_by(4) {
        println!(
            "p = {:.4}: sigma = {:.6}, u_sigma = {:.6}",
            data.p[j], data.sigma[j], data.u_sigma[j]
        );
    }
    let du = du_samples(&pt, s.euler(), m)?;
    let euler = (0..m)
        .map(|j| (du[j] - data.u_sigma[j]).norm())
        .fold(0.0, f64::max);
    println!("du(E) - u_sigma: {euler:.1e}");
    let (x, y) = (smp.tangent(8), smp.tangent(8));
    println!(
        "du(x y) - du(x) du(y): {:.1e}",
        semisimplicity_residual(&s, &x, &y, 256)?
    );
    Ok(())
}
