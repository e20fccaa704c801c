//! Runs every acceptance criterion and prints one line each.

use std::process::ExitCode;

use ncpb_core::cohomology::DEFAULT_BUDGET;
use ncpb_core::crosscheck::{cross_check, Level};
use ncpb_core::report::Status;

fn main() -> ExitCode {
    let results = cross_check(Level::Full, DEFAULT_BUDGET);
    for r in &results {
        let mark = if r.status == Status::Ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {mark} {} ({:.2?}): {}", r.id, r.title, r.elapsed, r.detail);
    }
    let failed: Vec<u8> = results.iter().filter(|r| r.status != Status::Ok).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria pass", results.len(), results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria failed: {failed:?}");
        ExitCode::FAILURE
    }
}
