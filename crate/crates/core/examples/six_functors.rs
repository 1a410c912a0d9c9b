//! Pullback, pushforward, extension by zero, exceptional restriction and
//! the three dualities.

use strata::functors::{dualizing, naive_dual, push_star, shriek_restrict_closed, standard_dual_sheaf, verdier_dual};
use strata::geometry::{MapKind, PosetMap, SimplicialComplex};
use strata::{Field, Sheaf};

fn show(label: &str, f: &Sheaf) {
    let stalks: Vec<String> = (0..f.base().len()).map(|s| format!("{}:[{}]", f.base().name(s), f.stalk(s).cohomology())).collect();
    println!("{label:>22}  {}", stalks.join(" "));
}

fn main() {
    let q = Field::Rationals;
    let circle = SimplicialComplex::circle(3).unwrap().face_poset();
    let pt = SimplicialComplex::point().face_poset();
    let p = PosetMap::new(circle.clone(), pt, vec![0; circle.len()], MapKind::General).unwrap();
    show("p_* k_S¹", &push_star(&p, &Sheaf::constant(circle.clone(), q)).unwrap());
    show("ω_S¹", &dualizing(&circle, q));

    let interval = SimplicialComplex::interval().face_poset();
    let e = interval.index_of("0-1").unwrap();
    let f = Sheaf::indicator(interval.clone(), q, e);
    show("F = j_! k", &f);
    show("naive dual", &naive_dual(&f).unwrap());
    show("Verdier dual", &verdier_dual(&f).unwrap());
    show("standard dual", &standard_dual_sheaf(&f));

    let v = interval.index_of("0").unwrap();
    let i = PosetMap::inclusion(&interval, &[v], MapKind::ClosedInclusion).unwrap();
    show("i^! k at an endpoint", &shriek_restrict_closed(&i, &Sheaf::constant(interval, q)).unwrap());
}
