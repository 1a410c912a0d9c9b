//! Sheaves as face-poset representations: sections, compact supports,
//! derived Hom and minimal resolutions.

use std::sync::Arc;

use strata::functors::gamma_c;
use strata::geometry::SimplicialComplex;
use strata::resolution::{minimal_resolution, rhom};
use strata::{Field, Sheaf};

fn main() {
    let q = Field::Rationals;
    let circle = SimplicialComplex::circle(3).unwrap().face_poset();
    let k = Arc::new(Sheaf::constant(circle.clone(), q));
    println!("Γ(S¹; k) = {}", k.global_sections().cohomology());
    println!("Γ_c(S¹; k) = {}", gamma_c(&k).cohomology());
    println!("RHom(k, k) = {}", rhom(&k, &k).unwrap().cohomology());

    let interval = SimplicialComplex::interval().face_poset();
    let e = interval.index_of("0-1").unwrap();
    let open = Sheaf::indicator(interval.clone(), q, e);
    println!("Γ_c of k on the open interval = {}", gamma_c(&open).cohomology());

    let v = interval.index_of("0").unwrap();
    let point = Arc::new(Sheaf::closed_indicator(interval.clone(), q, v));
    let r = minimal_resolution(&point);
    println!("minimal resolution of k at the closed endpoint:");
    for g in r.complex.gens() {
        println!("  1_{} in degree {}", interval.name(g.label), g.degree);
    }
    println!("RHom(k_0, k_I) = {}", rhom(&point, &Sheaf::constant(interval, q)).unwrap().cohomology());
}
