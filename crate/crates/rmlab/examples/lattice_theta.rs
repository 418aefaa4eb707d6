//! Classical theta of a lifted lattice and its Fourier transform check.

use num_complex::Complex64;
use rmlab::pseudolattice::Pseudolattice;
use rmlab::quadfield::QuadElem;
use rmlab::rmtheta::{gaussian_ft_check, lattice_fe_residual};

fn main() -> rmlab::Result<()> {
    let v = Complex64::new(0.2, 0.9);
    let (closed, quad) = gaussian_ft_check(v, Complex64::new(1.0, -0.5), Complex64::new(0.4, 0.1))?;
    println!("Gaussian transform: closed {:.12}, quadrature {:.12}", closed, quad);

    let l = Pseudolattice::new(QuadElem::one(3), QuadElem::sqrt_d(3))?;
    let l0 = QuadElem::from_frac(1, 0, 3, 3);
    let m0 = QuadElem::from_frac(0, 1, 4, 3);
    for t in [-1.0, 0.0, 1.0] {
        let r = lattice_fe_residual(&l, &l0, &m0, Complex64::new(1.0, 0.0), t, v, 1e-14)?;
        println!("t = {:>4}: theta = {:.12}, FE residual {:.1e}", t, r.lhs, r.residual);
    }
    Ok(())
}
