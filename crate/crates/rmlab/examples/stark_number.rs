//! Partial zeta values and the Stark number of the worked example.

use num_complex::Complex64;
use rmlab::starkzeta::{algebraicity_probe, stark_number, worked_example, zeta_direct, zeta_mellin, DEFAULT_PROBE_CAP};

fn main() -> rmlab::Result<()> {
    let input = worked_example();
    let d = &input.diagnostics;
    println!("b = {}, f = {}, unit generator {:?}, conditions pass: {}", d.b, d.f, d.unit_generator, d.pass);

    for s in [2.0, 3.0] {
        let s = Complex64::new(s, 0.0);
        let direct = zeta_direct(&input, s, 1e6)?;
        let mellin = zeta_mellin(&input, s, 1e-13)?;
        println!("zeta({}) direct {:.14}, Mellin {:.14}", s.re, direct.value[0], mellin.value[0]);
    }
    let z = zeta_mellin(&input, Complex64::new(0.0, 0.0), 1e-13)?;
    println!("zeta(0) = {:.2e}", z.value[0]);

    let st = stark_number(&input, 1e-13)?;
    println!("zeta'(0) = {:.14}, S0 = {:.14}", st.zeta_prime_at_0, st.s0);
    let probe = algebraicity_probe(st.s0, 4, 30, 1e-9, DEFAULT_PROBE_CAP)?;
    match probe.polynomial {
        Some(p) => println!("candidate polynomial {:?}", p.coeffs),
        None => println!("no polynomial of degree <= 4, height <= 30 ({} candidates)", probe.candidates),
    }
    Ok(())
}
