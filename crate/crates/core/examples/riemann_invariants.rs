//! Transport of the canonical coordinates by the flows of the hierarchy, and
//! the size of the commutator of two flows.

use toda_frobenius::hierarchy::{
    commutator_norm, printed_toda_transport_residual, transport_residual, Flow, LoopFamily,
};
use toda_frobenius::sampling::Sampler;

fn main() -> toda_frobenius::Result<()> {
    let l = LoopFamily::default().sample(&mut Sampler::new(42));
    for f in [Flow::T(0), Flow::U, Flow::S(1), Flow::S(2), Flow::SBar(2)] {
        println!(
            "{:>6}: transport residual {:.1e}",
            f.to_string(),
            transport_residual(&l, f, 64)?
        );
    }
    println!(
        "n-independent velocity for s2: residual {:.1e}",
        printed_toda_transport_residual(&l, 2, false, 64)?
    );
    for h in [0.1, 0.05] {
        println!(
            "[s1, sbar1] at h = {h}: {:.3e}",
            commutator_norm(&l, Flow::S(1), Flow::SBar(1), h)?
        );
    }
    Ok(())
}
