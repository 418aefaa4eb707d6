//! Relations of the Morita bimodule on a sampled Schwartz function.

use num_complex::Complex64;
use rmlab::qtorus::bimodule_action_residual;

fn main() -> rmlab::Result<()> {
    let theta = 2f64.sqrt() - 1.0;
    let f = |x: f64, mu: i64| Complex64::new((-x * x).exp(), 0.2 * mu as f64 * x).scale((-0.5 * x * x).exp());
    for g in [[[0, 1], [1, -1]], [[1, 1], [1, 2]], [[2, 1], [1, 1]]] {
        let r = bimodule_action_residual(theta, g, &f, 5.0, 64)?;
        println!(
            "g = {:?}: theta' = {:.6}, right {:.1e}, left {:.1e}, commutation {:.1e}, \
             left phase vs e^(+2 pi i theta') {:.1e}, vs e^(-2 pi i theta') {:.1e}",
            g,
            r.theta_prime,
            r.right_relation,
            r.left_relation,
            r.commutation,
            r.left_phase_vs_plus,
            r.left_phase_vs_minus
        );
    }
    Ok(())
}
