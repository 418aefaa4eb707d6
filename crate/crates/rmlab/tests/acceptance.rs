//! Acceptance runner: one PASS/FAIL line per criterion.
//!
//! Criteria 11 and 15 gate on forms that do not hold numerically; their lines
//! carry the corrected residuals as well. Criterion 16 follows from them. The
//! target fails if any criterion departs from the status recorded here.

use std::process::{Command, ExitCode};

use rmlab::acceptance::{run_all, DEFAULT_SEED};

const EXPECTED_FAIL: &[u32] = &[11, 15, 16];

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for c in &results {
        println!("{}", c.line());
    }

    let out =
        Command::new(env!("CARGO_BIN_EXE_rmlab")).args(["selftest", "--table"]).output().expect("rmlab binary runs");
    let code = out.status.code();
    let binary_lines = String::from_utf8_lossy(&out.stdout);
    let agrees = results.iter().map(|c| c.line()).eq(binary_lines.lines().map(str::to_string));
    println!(
        "[{}] 16 selftest binary: exit code {:?}, {} its lines with the in-process run",
        if code == Some(0) { "PASS" } else { "FAIL" },
        code,
        if agrees { "matches" } else { "does not match" }
    );

    let mut ok = agrees && (code == Some(0)) == results.iter().all(|c| c.pass);
    for c in &results {
        let expected = !EXPECTED_FAIL.contains(&c.id);
        if c.pass != expected {
            println!(
                "status change: criterion {} is {} (recorded as {})",
                c.id,
                pass_word(c.pass),
                pass_word(expected)
            );
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "PASS"
    } else {
        "FAIL"
    }
}
