//! Stop configurations on the circle and interval, wrap-once functors and
//! the duality comparisons they satisfy at a full stop.

use strata::wrap1d::{Dir, Lab, StopConfig};
use strata::Field;

fn main() {
    let cfg = StopConfig::parse("stops v1\ncircle 2\npoint 0 +-\npoint 1 +-\n").unwrap();
    let lab = Lab::new(&cfg, Field::Rationals).unwrap();
    println!("fine model: {} cells, coarse: {} strata", lab.fine.len(), lab.coarse.len());
    for (name, g) in lab.generators().unwrap() {
        println!("  {name}: orbit under S⁺ {:?}", lab.orbit(&g, Dir::Plus, 1, 2).unwrap().iter().map(|x| x.to_string()).collect::<Vec<_>>());
    }
    let rows = lab.sabloff_serre(1).unwrap();
    println!("Serre-type tables agree on {} of {} generator pairs", rows.iter().filter(|r| r.agree()).count(), rows.len());
    for r in lab.verdier_standard_compare(1, 1).unwrap() {
        println!("  {}: SD ≃ S⁺ D_naive {}, VD ≃ S⁻ SD ⊗ ω {}", r.generator, r.standard_is_wrapped_naive, r.verdier_is_unwrapped_standard);
    }

    let one_sided = StopConfig::parse("stops v1\ncircle 1\npoint 0 +\n").unwrap();
    let lab = Lab::new(&one_sided, Field::Rationals).unwrap();
    match lab.generators() {
        Ok(g) => println!("one-sided stop: {} generators", g.len()),
        Err(e) => println!("one-sided stop on a circle: {e}"),
    }
}
