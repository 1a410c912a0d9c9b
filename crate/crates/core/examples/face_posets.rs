//! Simplicial complexes, their face posets, stars, closures and products.

use strata::geometry::{FacePoset, SimplicialComplex};

fn main() {
    let k = SimplicialComplex::circle(3).unwrap();
    let p = k.face_poset();
    println!("circle with {} cells, dimension {}", p.len(), k.dimension());
    for s in 0..p.len() {
        let star: Vec<&str> = p.star(s).iter().map(|&t| p.name(t)).collect();
        let closure: Vec<&str> = p.closure(s).iter().map(|&t| p.name(t)).collect();
        println!("  {:>4}: star {:?} closure {:?} link vertices {:?}", p.name(s), star, closure, p.link_vertices(s));
    }

    let (fine, owner) = SimplicialComplex::interval().subdivide_edges(3).unwrap();
    let coarse = SimplicialComplex::interval().face_poset();
    let fp = fine.face_poset();
    for s in 0..fp.len() {
        println!("  fine {:>4} lies in coarse {}", fp.name(s), coarse.name(owner[s]));
    }

    let square = FacePoset::product(&[coarse.clone(), coarse.clone()]);
    println!("interval × interval has {} product cells:", square.len());
    let names: Vec<&str> = (0..square.len()).map(|s| square.name(s)).collect();
    println!("  {}", names.join(" "));
}
