//! One line per acceptance criterion. Criteria listed in
//! `EXPECTED_RED` are reported but do not fail the target.

use std::process::ExitCode;

use ultraflat::acceptance::{run_selected, ALL, EXPECTED_RED};

fn main() -> ExitCode {
    let results = ultraflat::parallel::pool().install(|| run_selected(&ALL));
    let mut unexpected = Vec::new();
    for r in &results {
        let note = if !r.pass && EXPECTED_RED.contains(&r.id) { " (known, see notes)" } else { "" };
        println!("{}{note}", r.line());
        if !r.pass && !EXPECTED_RED.contains(&r.id) {
            unexpected.push(r.id);
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
