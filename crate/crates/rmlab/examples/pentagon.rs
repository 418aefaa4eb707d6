//! Addition and pentagon identities of the q-exponential in truncated q-series.

use rmlab::qexp::{addition_check, pentagon_check, QSeriesParams};

fn main() -> rmlab::Result<()> {
    let p = QSeriesParams::new(6, 40, 0)?;
    println!("e(u) e(v) = e(u + v): {}", addition_check(&p)?.holds());
    for mu in [1, 0] {
        let r = pentagon_check(&QSeriesParams::new(6, 40, mu)?)?;
        println!("pentagon with mu = q^{}: holds {}, {} nonzero terms", mu, r.holds(), r.nonzero_terms);
    }
    Ok(())
}
