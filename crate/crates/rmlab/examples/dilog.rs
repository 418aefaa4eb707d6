//! Rogers five-term identity and the small-y asymptotic of log e_q.

use rmlab::qexp::{asymptotic_ratio, dilog_asymptotic, rogers_numeric, AsymptoticForm};

fn main() -> rmlab::Result<()> {
    println!("five-term residual at (1/2, 1/2): {:.1e}", rogers_numeric(0.5, 0.5)?);
    for t in [0.5, 1.0, 2.0] {
        for form in [AsymptoticForm::Corrected, AsymptoticForm::Printed] {
            println!(
                "t = {}, {:?}: r(0.01) = {:.3e}, r(y)/r(2y) = {:.3}",
                t,
                form,
                dilog_asymptotic(t, 0.01, form)?,
                asymptotic_ratio(t, 0.01, form)?
            );
        }
    }
    Ok(())
}
