//! Kernels: exterior products, the identity kernel, convolution, the
//! triangle identities and reconstruction of a kernel from its action.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strata::geometry::{FacePoset, SimplicialComplex};
use strata::kernels::{boxtimes, check_triangles, convolve, reconstruct_kernel, DualityData, FunctorTable, Kernel};
use strata::random::random_sheaf;
use strata::resolution::quasi_isomorphic;
use strata::{Field, Sheaf};

fn main() {
    let q = Field::Rationals;
    let k = SimplicialComplex::interval();
    let data = DualityData::new(&k, q).unwrap();
    let s = data.base.clone();

    let x = boxtimes(&Sheaf::indicator(s.clone(), q, 0), &Sheaf::indicator(s.clone(), q, 2)).unwrap();
    println!("1_0 ⊠ 1_0-1 is supported on {:?}", x.support().iter().map(|&c| x.base().name(c)).collect::<Vec<_>>());

    println!("identity kernel stalks on {} product cells", data.eta.sheaf().base().len());
    for t in 0..s.len() {
        let f = Arc::new(Sheaf::indicator(s.clone(), q, t));
        let g = Arc::new(convolve(&data.eta, &f).unwrap());
        println!("  η ∘ 1_{} ≃ 1_{}: {}", s.name(t), s.name(t), quasi_isomorphic(&f, &g, 1).unwrap());
    }
    for r in check_triangles(&data, 1).unwrap() {
        println!("triangle {} holds: {}", r.name, r.passed());
    }

    let ss = FacePoset::product(&[s.clone(), s.clone()]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let kernel = Kernel::new(Arc::new(random_sheaf(&ss, q, 3, &mut rng)), s.clone(), s.clone()).unwrap();
    let table = FunctorTable::of_kernel(&kernel).unwrap();
    let rebuilt = reconstruct_kernel(&table, &data.eta_complex).unwrap();
    println!("random kernel recovered from its action: {}", quasi_isomorphic(kernel.sheaf(), rebuilt.sheaf(), 1).unwrap());
}
