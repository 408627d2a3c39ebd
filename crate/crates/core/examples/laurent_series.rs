//! Truncated Laurent series: products, projections, residues and the
//! certified reciprocal and logarithm on the unit circle.

use toda_frobenius::laurent::{
    log_on_circle_certified, reciprocal_on_circle_certified, CircleOpts, LaurentSeries, C,
};

fn main() -> toda_frobenius::Result<()> {
    // lambda = z - 0.2 - 0.5/z
    let lambda = LaurentSeries::from_real(-1, &[-0.5, -0.2, 1.0]);
    let sq = &lambda * &lambda;
    println!("lambda^2          = {sq:?}");
    println!("(lambda^2)_+      = {:?}", sq.geq(0));
    println!("res lambda^2      = {}", sq.residue());

    // w/z = 1 + 0.3/z^2 has no zeros on the circle and winding zero
    let f = LaurentSeries::new(
        -2,
        vec![C::new(0.3, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
    );
    let r = reciprocal_on_circle_certified(&f, -60, 0, CircleOpts::default())?;
    println!(
        "1/f: first terms {:?}, tail {:.1e}, residual {:.1e}",
        r.series.restrict(-6, 0),
        r.tail,
        r.residual
    );
    let g = log_on_circle_certified(&f, -60, 0, CircleOpts::default())?;
    println!(
        "log f: first terms {:?}, residual {:.1e}",
        g.series.restrict(-6, 0),
        g.residual
    );
    Ok(())
}
