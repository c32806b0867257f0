use addbasis_core::verify::{run_suite, Suite};
use serde_json::json;

use super::Outcome;
use crate::error::{CliError, EXIT_VERIFY_FAILED};
use crate::report::params_digest;

/// Runs a suite; result lines go to stderr, the report carries the same
/// data. Timings are left out of the report when `timing` is false.
pub fn run(suite_name: &str, seed: u64, timing: bool) -> Result<Outcome, CliError> {
    let suite = Suite::parse(suite_name).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        CliError::validation(
            "unknown_suite",
            format!("unknown suite {suite_name:?}; expected one of {}", names.join(", ")),
        )
    })?;
    let results = run_suite(suite, seed);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let criteria: Vec<_> = results
        .iter()
        .map(|r| {
            let mut v = json!({
                "id": r.id,
                "name": r.name,
                "suite": r.suite,
                "passed": r.passed,
                "within_budget": r.within_budget,
                "detail": r.detail,
                "budget_ms": r.budget_ms as u64,
            });
            if timing {
                v["elapsed_ms"] = json!(r.elapsed_ms as u64);
            }
            v
        })
        .collect();
    let all_passed = passed == results.len();
    let params = json!({"suite": suite.name()});
    let mut rows = vec![["id", "name", "suite", "passed", "detail"].map(String::from).to_vec()];
    rows.extend(results.iter().map(|r| {
        vec![
            r.id.to_string(),
            r.name.to_string(),
            r.suite.name().to_string(),
            r.passed.to_string(),
            r.detail.clone(),
        ]
    }));
    Ok(Outcome {
        input_digest: params_digest(&params),
        outputs: json!({
            "suite": suite.name(),
            "total": results.len(),
            "passed": passed,
            "all_passed": all_passed,
            "criteria": criteria,
        }),
        exit: if all_passed { 0 } else { EXIT_VERIFY_FAILED },
        csv: Some(rows),
    })
}
