//! Building, serializing and re-reading a workspace; parse errors carry
//! line and column.

use strata::format::{interval_fixture, Workspace};

fn main() {
    let ws = interval_fixture();
    let text = ws.to_text();
    print!("{text}");
    let back = Workspace::parse(&text).unwrap();
    println!("byte-exact round trip: {}", back.to_text() == text);
    println!("Γ(k) = {}", back.sheaf("k").unwrap().global_sections().cohomology());

    let broken = text.replace("rho 0-1 1 0 1x1 [1]", "rho 0-1 1 0 1x1 [1 0]");
    println!("{}", Workspace::parse(&broken).unwrap_err());
}
