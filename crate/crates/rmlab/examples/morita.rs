//! Exact Morita action on quadratic irrationals and the cocycle of a composition.

use rmlab::pseudolattice::Mat2;
use rmlab::qtorus::{morita_act, morita_compose};
use rmlab::quadfield::QuadElem;

fn main() -> rmlab::Result<()> {
    let theta = QuadElem::sqrt_d(2);
    let (g, h) = (Mat2::new(0, 1, 1, 0), Mat2::new(1, 1, 0, 1));
    for m in [&g, &h] {
        let a = morita_act(m, &theta)?;
        println!("{} . {} = {}, j = {}", a.g, theta.pretty(), a.target.pretty(), a.j.pretty());
    }
    let c = morita_compose(&g, &h, &theta)?;
    println!(
        "gh = {}: j(gh) = {} = {} * {} ({})",
        c.product,
        c.j_product.pretty(),
        c.j_outer.pretty(),
        c.j_inner.pretty(),
        if c.exact { "exact" } else { "mismatch" }
    );
    Ok(())
}
