//! Fundamental units, integral bases and orders of small real quadratic fields.

use rmlab::quadfield::{fundamental_unit, integer_basis, order_of_conductor};

fn main() -> rmlab::Result<()> {
    for d in [2, 3, 5, 6, 7, 13, 94] {
        let u = fundamental_unit(d)?;
        let (_, omega) = integer_basis(d)?;
        println!(
            "d = {:>2}: omega = {:<10} unit = {:<22} norm {:>2}, totally positive {}",
            d,
            omega.pretty(),
            u.unit.pretty(),
            u.norm,
            u.totally_positive.pretty()
        );
    }
    let o = order_of_conductor(5, 2)?;
    println!("order of conductor 2 in Q(sqrt 5): Z + Z({})", o.basis.1.pretty());
    Ok(())
}
