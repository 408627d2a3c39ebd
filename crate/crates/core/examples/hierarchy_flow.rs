//! Integrates the first Lax flow on a seeded loop and prints the conserved
//! Hamiltonians along the way.

use toda_frobenius::hierarchy::{integrate, Flow, Integrator, LoopFamily};
use toda_frobenius::sampling::Sampler;

fn main() -> toda_frobenius::Result<()> {
    let l = LoopFamily::default().sample(&mut Sampler::new(42));
    let tr = integrate(
        &l,
        Flow::S(1),
        0.2,
        &Integrator {
            snapshot_every: 50,
            ..Integrator::default()
        },
    )?;
    for r in tr.ledger.iter().step_by(50) {
        println!(
            "t = {:.3}: H1 = {:.15}, Hbar1 = {:.15}, tail {:.1e}",
            r.time, r.h1.re, r.hbar1.re, r.tail_norm
        );
    }
    println!("loop moved by {:.3e}", tr.last().dist(&l));
    Ok(())
}
