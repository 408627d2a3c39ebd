//! Runs a few identity suites and prints their reports.

use toda_frobenius::verify::{run_suites, VerifyConfig};

fn main() -> toda_frobenius::Result<()> {
    let cfg = VerifyConfig::new(42);
    let names = ["gram", "intersection", "semisimple"].map(String::from);
    for r in run_suites(&names, &cfg)? {
        println!(
            "{:<28} {:>3} points  {:.2e} <= {:.0e}: {}",
            r.name, r.points_tested, r.max_residual, r.tolerance, r.pass
        );
    }
    Ok(())
}
