//! Runs every acceptance criterion and prints one line each. Built without
//! the libtest harness so the lines show up in plain `cargo test` output.

use std::process::ExitCode;

use addbasis_core::verify::{criteria, run_criterion};

const SEED: u64 = 20240607;

fn main() -> ExitCode {
    let all = criteria();
    println!("running {} acceptance criteria (seed {SEED})", all.len());
    let mut failed = Vec::new();
    for c in &all {
        let r = run_criterion(c, SEED);
        println!("{}", r.line());
        if !r.passed {
            failed.push(r.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} passed, 0 failed", all.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} passed, {} failed: {failed:?}",
            all.len() - failed.len(),
            failed.len()
        );
        ExitCode::FAILURE
    }
}
