use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strata::format::{sheaf_document, Workspace};
use strata::functors::{gamma_c, standard_dual_sheaf, verdier_dual};
use strata::geometry::{FacePoset, SimplicialComplex};
use strata::kernels::boxtimes;
use strata::random::random_sheaf;
use strata::resolution::{quasi_isomorphic, rhom};
use strata::{Complex, Field, Sheaf, SheafMap};

fn base(which: u8) -> Arc<FacePoset> {
    match which % 3 {
        0 => SimplicialComplex::interval().face_poset(),
        1 => SimplicialComplex::path(2).face_poset(),
        _ => SimplicialComplex::circle(3).unwrap().face_poset(),
    }
}

fn field(p: u8) -> Field {
    match p % 3 {
        0 => Field::Rationals,
        1 => Field::prime(2).unwrap(),
        _ => Field::prime(5).unwrap(),
    }
}

fn sheaf(which: u8, p: u8, seed: u64) -> Arc<Sheaf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Arc::new(random_sheaf(&base(which), field(p), 3, &mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn text_round_trip(which in 0u8..3, p in 0u8..3, seed in any::<u64>()) {
        let f = sheaf(which, p, seed);
        let text = sheaf_document("f", &f);
        let ws = Workspace::parse(&text).unwrap();
        prop_assert_eq!(ws.to_text(), text);
        prop_assert_eq!(ws.sheaf("f").unwrap().stalk_cohomology(), f.stalk_cohomology());
    }

    #[test]
    fn verdier_biduality(which in 0u8..3, p in 0u8..3, seed in any::<u64>()) {
        let f = sheaf(which, p, seed);
        let back = Arc::new(verdier_dual(&verdier_dual(&f).unwrap()).unwrap());
        prop_assert!(quasi_isomorphic(&f, &back, seed).unwrap());
    }

    #[test]
    fn standard_dual_pairing(which in 0u8..3, seed in any::<u64>()) {
        let f = sheaf(which, 0, seed);
        let g = sheaf(which, 0, seed.wrapping_add(1));
        let lhs = rhom(&Arc::new(standard_dual_sheaf(&f)), &g).unwrap().cohomology();
        let rhs = gamma_c(&Sheaf::tensor(&f, &g).unwrap()).cohomology();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compact_kunneth(a in 0u8..2, b in 0u8..2, seed in any::<u64>()) {
        let f = sheaf(a, 0, seed);
        let g = sheaf(b, 0, seed ^ 0x5a5a);
        let lhs = gamma_c(&boxtimes(&f, &g).unwrap()).cohomology();
        prop_assert_eq!(lhs, gamma_c(&f).cohomology().tensor(&gamma_c(&g).cohomology()));
    }

    #[test]
    fn cone_of_identity_is_acyclic(which in 0u8..3, p in 0u8..3, seed in any::<u64>()) {
        let f = sheaf(which, p, seed);
        prop_assert!(SheafMap::identity(&f).cone().is_acyclic());
    }

    #[test]
    fn shift_moves_cohomology(which in 0u8..3, seed in any::<u64>(), n in -3i32..=3) {
        let f = sheaf(which, 0, seed);
        let h: Complex = f.global_sections();
        prop_assert_eq!(f.shift(n).global_sections().cohomology(), h.cohomology().shift(n));
    }
}
