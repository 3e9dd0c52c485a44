//! Acceptance criteria A1 to A10, run in order with one verdict line each.
//! Plain `main` so the lines are shown under `cargo test`.

use std::process::ExitCode;

use orbidt::acceptance::{run, CRITERIA, DEFAULT_SEED};

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, _, _) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| f.eq_ignore_ascii_case(id)) {
            continue;
        }
        let result = run(id, DEFAULT_SEED).expect("known criterion");
        println!("{}", result.line());
        ran += 1;
        if !result.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
