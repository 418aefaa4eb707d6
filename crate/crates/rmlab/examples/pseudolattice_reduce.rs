//! Continued fractions, GL(2, Z) equivalence, covolume and duality of pseudolattices.

use rmlab::pseudolattice::{cf_expand, delta, dual_pseudolattice, gl2z_equivalent, stabilizer_matrix, Pseudolattice};
use rmlab::quadfield::QuadElem;

fn main() -> rmlab::Result<()> {
    let phi = QuadElem::from_frac(1, 1, 2, 5);
    let half = QuadElem::from_frac(0, 1, 2, 2);
    for x in [&phi, &QuadElem::sqrt_d(2), &half, &QuadElem::from_frac(3, 2, 7, 3)] {
        println!("{:<12} {}", x.pretty(), cf_expand(x, 12)?.notation());
    }

    let g = gl2z_equivalent(&QuadElem::sqrt_d(2), &half)?.expect("equivalent");
    println!("g = {} sends {} to {}", g, half.pretty(), g.act(&half)?.pretty());
    let s = stabilizer_matrix(&phi)?;
    println!("stabiliser of phi: {} with eigenvalue {}", s.g, s.eps.pretty());

    let l = Pseudolattice::from_ints(2, (1, 0), (0, 1))?;
    let dual = dual_pseudolattice(&l);
    println!("L = {}, Delta = {}", l.to_text(), delta(&l).pretty());
    println!("dual = {}, Delta = {}", dual.to_text(), delta(&dual).pretty());
    Ok(())
}
