//! Quantum theta coefficients on the rotation lattice and their functional equation.

use num_complex::Complex64;
use rmlab::qtorus::{heisenberg_inner, qtheta_coeffs, qtheta_fe_residual, EmbeddedLattice, Multiplier, SiegelPoint};

fn main() -> rmlab::Result<()> {
    let theta = 2f64.sqrt() - 1.0;
    let d = EmbeddedLattice::rotation(theta)?;
    let t = SiegelPoint::diagonal(&[Complex64::new(0.0, 1.0)])?;
    let s = qtheta_coeffs(&d, &t, 8)?;
    for h in [[0, 0], [1, 0], [0, 1], [3, -2]] {
        let r = heisenberg_inner(&d, &t, &h)?;
        println!("c{:?} = {:.12e}, quadrature check {:.1e}", h, s.coeffs.get(&h).re, r.residual());
    }
    for g in [[1, 0], [0, 1], [2, -1]] {
        println!(
            "g = {:?}: residual corrected {:.1e}, printed {:.1e}",
            g,
            qtheta_fe_residual(&s, &g, Multiplier::Corrected)?,
            qtheta_fe_residual(&s, &g, Multiplier::Printed)?
        );
    }
    Ok(())
}
