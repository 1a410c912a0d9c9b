//! Microstalks, singular support and the Thom–Sebastiani identity.

use strata::geometry::SimplicialComplex;
use strata::kernels::boxtimes;
use strata::microlocal::{microstalk, singular_support, ss_csv, thom_sebastiani_pair, SignAssignment};
use strata::{Field, Sheaf};

fn main() {
    let q = Field::Rationals;
    let s = SimplicialComplex::path(2).face_poset();
    let v = s.index_of("0").unwrap();
    let half = Sheaf::closed_indicator(s.clone(), q, s.index_of("0-1").unwrap());
    for xi in SignAssignment::enumerate(&s, v, 16).unwrap() {
        println!("μ at 0 with {:>4}: {}", xi.label(&s), microstalk(&half, &xi).unwrap().cohomology());
    }
    print!("{}", ss_csv(&singular_support(&half, 16, false).unwrap()));

    let i = SimplicialComplex::interval().face_poset();
    let f = Sheaf::indicator(i.clone(), q, 0);
    let g = Sheaf::closed_indicator(i.clone(), q, 2);
    let fg = boxtimes(&f, &g).unwrap();
    let (mut agree, mut total) = (0, 0);
    for a in 0..i.len() {
        for b in 0..i.len() {
            for xi in SignAssignment::enumerate(&i, a, 16).unwrap() {
                for zeta in SignAssignment::enumerate(&i, b, 16).unwrap() {
                    let (l, r) = thom_sebastiani_pair(&f, &g, &fg, &xi, &zeta).unwrap();
                    total += 1;
                    agree += usize::from(l == r);
                }
            }
        }
    }
    println!("Thom–Sebastiani holds in {agree} of {total} cases");
}
