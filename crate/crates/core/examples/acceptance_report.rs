//! Runs one acceptance criterion and prints its JSON records.

use strata::verify::{run_criterion, Settings, CRITERIA};

fn main() {
    let id: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1).clamp(1, CRITERIA.len());
    let r = run_criterion(id, &Settings::default());
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
    println!("{}: {}", r.title, if r.pass() { "pass" } else { "fail" });
}
