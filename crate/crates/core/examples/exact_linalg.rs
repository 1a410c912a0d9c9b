//! Exact matrices and cochain complexes over Q and F_p.

use std::sync::Arc;

use strata::{ChainMap, Complex, Field, Matrix};

fn main() {
    for field in [Field::Rationals, Field::prime(2).unwrap()] {
        let d = Matrix::from_rows(field, &[vec![1, 1], vec![1, -1]]);
        println!("over {field}: rank of [1 1; 1 -1] is {}", d.rank());

        // The cellular cochains of a circle with one vertex and one edge.
        let c = Complex::new(field, 0, vec![1, 1], vec![Matrix::zeros(field, 1, 1)]).unwrap();
        println!("  circle cochains: H = {}", c.cohomology());

        let c = Arc::new(c);
        let id = ChainMap::identity(c.clone());
        println!("  cone of the identity is acyclic: {}", Complex::cone(&id).is_acyclic());
        println!("  shift by 1: {}", c.shift(1).cohomology());
        println!("  C ⊗ C: {}", Complex::tensor(&c, &c).cohomology());
    }
    let bad = Complex::new(Field::Rationals, 0, vec![1, 1, 1], vec![Matrix::identity(Field::Rationals, 1), Matrix::identity(Field::Rationals, 1)]);
    println!("d∘d ≠ 0 is rejected: {}", bad.unwrap_err());
}
