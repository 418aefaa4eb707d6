//! Projection of trace theta in the irrational rotation algebra.

use num_complex::Complex64;
use rmlab::qtorus::{boca_projection, EmbeddedLattice, SiegelPoint};

fn main() -> rmlab::Result<()> {
    let theta = 2f64.sqrt() - 1.0;
    let d = EmbeddedLattice::rotation(theta)?;
    let t = SiegelPoint::diagonal(&[Complex64::new(0.0, 1.0)])?;
    for radius in [6, 8, 10] {
        let r = boca_projection(&d, &t, radius, 1e-15)?;
        println!(
            "R = {:>2}: |p*p - p| = {:.2e}, |p^* - p| = {:.1e}, trace = {:.12} (theta = {:.12}), {} Newton steps",
            radius, r.idempotency, r.self_adjointness, r.trace, theta, r.iterations
        );
    }
    Ok(())
}
