use std::process::ExitCode;

use strata::verify::{run_criterion, Settings, CRITERIA};

fn main() -> ExitCode {
    let settings = Settings::default();
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        let r = run_criterion(id, &settings);
        let status = if r.pass() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {} ({} checks, {:.2}s)", r.id, r.title, r.checks.len(), r.seconds);
        for c in r.failed().take(5) {
            println!("    {}: expected {} got {}", c.name, c.expected, c.got);
        }
        if !r.pass() {
            failed += 1;
        }
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
