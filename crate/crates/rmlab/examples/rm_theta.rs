//! RM theta of the worked example, its functional equation and the Hecke average.

use num_complex::Complex64;
use rmlab::rmtheta::{fe_rm_residual, hecke_average, theta_rm, worked_example};

fn main() -> rmlab::Result<()> {
    let spec = worked_example();
    println!("L = {}, l0 = {}, eps = {}", spec.lattice.to_text(), spec.l0.pretty(), spec.eps.pretty());
    for v in [Complex64::new(0.0, 1.0), Complex64::new(0.3, 0.8), Complex64::new(-0.2, 1.5)] {
        let t = theta_rm(&spec, v, 1e-13)?;
        let fe = fe_rm_residual(&spec, v, 1e-13)?;
        println!("v = {:.2}: Theta = {:.12}, {} terms, FE residual {:.1e}", v, t.value, t.terms, fe.residual);
    }
    let v = Complex64::new(0.1, 1.0);
    let (avg, evals) = hecke_average(&spec, v, 1e-10)?;
    println!("Hecke average at {:.2}: {:.12} ({} evaluations)", v, avg, evals);
    Ok(())
}
