//! Flat coordinates of a point, the constant Gram matrix of the flat frames
//! and the rebuild of a point from its chart.

use toda_frobenius::flatcoords::{flat_coords, point_from_flat};
use toda_frobenius::manifold::Structure;
use toda_frobenius::sampling::Sampler;
use toda_frobenius::verify::{gram_entry, gram_matrix};

fn main() -> toda_frobenius::Result<()> {
    let pt = Sampler::new(42).m0_point(16);
    let chart = flat_coords(&pt, 6)?;
    println!("u = {:.6}, v = {:.6}", chart.u, chart.v);
    for n in -3..=3 {
        println!("t_{n:<2} = {:.6}", chart.t(n));
    }

    let (idx, m) = gram_matrix(&Structure::new(&pt)?, 3)?;
    let mut dev = 0.0f64;
    for (i, a) in idx.iter().enumerate() {
        for (j, b) in idx.iter().enumerate() {
            dev = dev.max((m[i][j] - gram_entry(*a, *b)).norm());
        }
    }
    println!(
        "Gram matrix of {} frames: largest deviation from constant {dev:.1e}",
        idx.len()
    );

    let small = flat_coords(&pt, 4)?;
    let rebuilt = point_from_flat(&small, 120)?;
    println!(
        "chart -> point -> chart: {:.1e}",
        flat_coords(&rebuilt, 4)?.dist(&small)
    );
    Ok(())
}
